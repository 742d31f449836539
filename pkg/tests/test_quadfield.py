import random
from math import isqrt

import pytest

from constdeg.arith import residue_field
from constdeg.quadfield import (
    RATIONAL,
    NotPrincipal,
    QuadIdeal,
    class_dlog,
    class_group_l_part,
    compose_forms,
    conjugate_prime,
    elt_conj,
    elt_mul,
    elt_norm,
    elt_pow,
    enumerate_class_group,
    factor_rational_prime,
    form_disc,
    form_pow,
    ideal_class_form,
    ideal_conj,
    ideal_contains,
    ideal_mul,
    ideal_norm,
    ideal_pow,
    integer_elt,
    kronecker_disc,
    normalize_unit,
    principal_form,
    principal_generator,
    principal_ideal,
    prime_module,
    quadratic_field,
    reduce_form,
    reduce_mod,
    unit_generators,
    unit_ideal,
    valid_elt,
)

K23 = quadratic_field(-23)


def fundamental_discs(limit):
    out = []
    for d in range(-3, -limit - 1, -1):
        try:
            quadratic_field(d)
        except ValueError:
            continue
        out.append(d)
    return out


def generator_by_scan(field, ideal):
    # oracle: solve x^2 - D y^2 = 4 N(ideal) by brute scan, then filter
    # by membership; independent of the reduction-based implementation
    n = ideal_norm(ideal)
    d = field.disc
    sols = []
    y = 0
    while -d * y * y <= 4 * n:
        rest = 4 * n + d * y * y
        x = isqrt(rest)
        if x * x == rest:
            for u in {(x, y), (-x, y), (x, -y), (-x, -y)}:
                if (u[0] - u[1] * d) % 2 == 0 and ideal_contains(ideal, u):
                    sols.append(u)
        y += 1
    return sols


# ----------------------------------------------------------- field basics


def test_quadratic_field_validation():
    for d in (-3, -4, -8, -23, -47, -56, -136):
        assert quadratic_field(d).disc == d
    for d in (-12, -9, -16, -25, -5, 5, 0):
        with pytest.raises(ValueError):
            quadratic_field(d)


def test_element_arithmetic():
    one = integer_elt(1)
    w = (1, 1)  # (1 + sqrt(-23))/2, norm 6
    assert valid_elt(K23, w)
    assert elt_norm(K23, w) == 6
    assert elt_mul(K23, w, elt_conj(w)) == integer_elt(6)
    assert elt_mul(K23, one, w) == w
    assert elt_pow(K23, w, 0) == one
    assert elt_pow(K23, w, 3) == elt_mul(K23, w, elt_mul(K23, w, w))
    assert elt_norm(K23, (3, 1)) == 8


def test_unit_generators():
    assert unit_generators(RATIONAL) == [integer_elt(-1)]
    assert unit_generators(K23) == [integer_elt(-1)]
    k4 = quadratic_field(-4)
    i = unit_generators(k4)[0]
    assert i == (0, 1)
    assert elt_pow(k4, i, 2) == integer_elt(-1)
    k3 = quadratic_field(-3)
    z = unit_generators(k3)[0]
    assert elt_pow(k3, z, 6) == integer_elt(1)
    assert elt_pow(k3, z, 3) == integer_elt(-1)


# ---------------------------------------------------------------- primes


def test_factor_rational_prime_examples():
    ps = factor_rational_prime(K23, 2)
    assert [P.kind for P in ps] == ["split", "split"]
    assert [P.b for P in ps] == [1, 3]
    (p23,) = factor_rational_prime(K23, 23)
    assert p23.kind == "ramified" and p23.norm == 23
    (p5,) = factor_rational_prime(K23, 5)
    assert p5.kind == "inert" and p5.f == 2 and p5.norm == 25
    (pq,) = factor_rational_prime(RATIONAL, 7)
    assert pq.kind == "rational" and pq.norm == 7


def test_prime_root_convention():
    # the stored b really is a root of x^2 = D mod 4p, with sqrt(D) -> b
    for p in (2, 3, 13, 59, 73, 101):
        for P in factor_rational_prime(K23, p):
            if P.kind == "inert":
                continue
            assert 0 <= P.b < 2 * p
            assert (P.b * P.b + 23) % (4 * p) == 0
            if P.p != 2:
                sqrt_img = reduce_mod(K23, (0, 2), P)  # element sqrt(D)
                assert sqrt_img == P.b % p


def test_split_primes_multiply_to_p():
    for p in (2, 13, 59, 73):
        P, Q = factor_rational_prime(K23, p)
        assert conjugate_prime(P) == Q
        prod = ideal_mul(K23, prime_module(K23, P), prime_module(K23, Q))
        assert prod == QuadIdeal(p, 1, 1)
        assert ideal_norm(prod) == p * p


def test_kronecker_disc():
    assert kronecker_disc(-23, 2) == 1  # -23 = 1 mod 8
    assert kronecker_disc(-23, 5) == -1
    assert kronecker_disc(-23, 23) == 0
    assert kronecker_disc(-4, 2) == 0
    assert kronecker_disc(-8, 3) == 1  # -8 = 1 mod 3
    assert kronecker_disc(-3, 2) == -1  # -3 = 5 mod 8


# ---------------------------------------------------------------- ideals


def test_ideal_norm_and_conj():
    P = prime_module(K23, factor_rational_prime(K23, 2)[0])
    assert ideal_norm(P) == 2
    assert ideal_conj(ideal_conj(P)) == P
    I2 = ideal_pow(K23, P, 2)
    assert ideal_norm(I2) == 4


def test_ideal_mul_against_principal_elements():
    rng = random.Random(17)
    for _ in range(25):
        u = (rng.randrange(-9, 10), rng.randrange(-9, 10))
        v = (rng.randrange(-9, 10), rng.randrange(-9, 10))
        u = u if (u[0] - u[1] * 23) % 2 == 0 else (u[0] + 1, u[1])
        v = v if (v[0] - v[1] * 23) % 2 == 0 else (v[0] + 1, v[1])
        if elt_norm(K23, u) == 0 or elt_norm(K23, v) == 0:
            continue
        lhs = ideal_mul(K23, principal_ideal(K23, u), principal_ideal(K23, v))
        rhs = principal_ideal(K23, elt_mul(K23, u, v))
        assert lhs == rhs


def test_ideal_membership():
    P = QuadIdeal(1, 2, 1)
    assert ideal_contains(P, (4, 0))  # the rational 2
    assert ideal_contains(P, (1, 1))
    assert not ideal_contains(P, (3, 1))
    assert ideal_contains(QuadIdeal(1, 2, 3), (3, 1))


def test_prime_power_towers():
    # P^3 above 2 for D=-23 lands in the module (8, 13); its conjugate in (8, 3)
    P = prime_module(K23, factor_rational_prime(K23, 2)[1])  # root 3, module (2,1)
    assert ideal_pow(K23, P, 3) == QuadIdeal(1, 8, 13)
    Q = prime_module(K23, factor_rational_prime(K23, 2)[0])
    assert ideal_pow(K23, Q, 3) == QuadIdeal(1, 8, 3)


# ----------------------------------------------------------------- forms


def test_reduce_form_examples():
    assert reduce_form((1, 1, 6)) == (1, 1, 6)
    assert reduce_form((6, 1, 1)) == (1, 1, 6)
    assert reduce_form((3, -1, 2)) == (2, 1, 3)
    assert reduce_form(reduce_form((15, 7, 1))) == reduce_form((15, 7, 1))


def test_reduce_form_preserves_disc_and_is_reduced():
    rng = random.Random(23)
    for _ in range(200):
        a = rng.randrange(1, 40)
        b = rng.randrange(-60, 60)
        c = rng.randrange(1, 40)
        if b * b - 4 * a * c >= 0:
            continue
        f = reduce_form((a, b, c))
        assert form_disc(f) == b * b - 4 * a * c
        ra, rb, rc = f
        assert -ra < rb <= ra <= rc
        assert rb >= 0 or ra != rc


def test_compose_forms_examples():
    ident = principal_form(-23)
    assert ident == (1, 1, 6)
    assert compose_forms(ident, (2, 1, 3)) == (2, 1, 3)
    assert compose_forms((2, 1, 3), (2, -1, 3)) == (1, 1, 6)
    assert compose_forms((2, 1, 3), (2, 1, 3)) == (2, -1, 3)


def test_enumerate_class_group_examples():
    assert enumerate_class_group(quadratic_field(-4)) == ([(1, 0, 1)], 1)
    forms, h = enumerate_class_group(K23)
    assert h == 3
    assert set(forms) == {(1, 1, 6), (2, 1, 3), (2, -1, 3)}
    assert enumerate_class_group(quadratic_field(-47))[1] == 5
    assert enumerate_class_group(RATIONAL) == ([], 1)


def test_group_law_exhaustive_small_discs():
    # identity, inverses, associativity, closure for every fundamental
    # discriminant down to -200
    for d in fundamental_discs(200):
        field = quadratic_field(d)
        forms, h = enumerate_class_group(field)
        ident = principal_form(d)
        assert ident in forms
        for f in forms:
            assert compose_forms(ident, f) == f
            inv = reduce_form((f[0], -f[1], f[2]))
            assert inv in forms
            assert compose_forms(f, inv) == ident
        for f in forms:
            for g in forms:
                fg = compose_forms(f, g)
                assert fg in forms
                assert fg == compose_forms(g, f)
        rng = random.Random(d)
        for _ in range(min(60, h * h)):
            f, g, k = (rng.choice(forms) for _ in range(3))
            assert compose_forms(compose_forms(f, g), k) == compose_forms(
                f, compose_forms(g, k)
            )


def test_form_map_transports_ideal_multiplication():
    rng = random.Random(31)
    primes = [
        P
        for p in (2, 3, 13, 29, 31, 41, 59)
        for P in factor_rational_prime(K23, p)
        if P.kind == "split"
    ]
    for _ in range(40):
        P, Q = rng.choice(primes), rng.choice(primes)
        I, J = prime_module(K23, P), prime_module(K23, Q)
        lhs = ideal_class_form(K23, ideal_mul(K23, I, J))
        rhs = compose_forms(ideal_class_form(K23, I), ideal_class_form(K23, J))
        assert lhs == rhs


def test_form_pow_order():
    g = (2, 1, 3)
    assert form_pow(g, 0) == (1, 1, 6)
    assert form_pow(g, 3) == (1, 1, 6)
    assert form_pow(g, 2) == compose_forms(g, g)


# ----------------------------------------------------------- class group


def test_class_group_l_part_trivial_cases():
    part = class_group_l_part(quadratic_field(-4), 3, {2, 3})
    assert part.exps == () and part.t == 0
    part = class_group_l_part(K23, 2, {2, 23})
    assert part.exps == () and part.t == 0
    part = class_group_l_part(RATIONAL, 5, set())
    assert part.exps == () and part.t == 0


def test_class_group_l_part_d23():
    part = class_group_l_part(K23, 3, {2, 3, 23})
    assert part.exps == (1,)
    assert part.t == 1
    (a1,) = part.gens
    assert (a1.p, a1.kind, a1.b) == (13, "split", 9)
    (alpha,) = part.alphas
    assert alpha == (74, 12)
    assert elt_norm(K23, alpha) == 13**3
    cube = ideal_pow(K23, prime_module(K23, a1), 3)
    assert ideal_contains(cube, alpha)
    assert principal_generator(K23, cube) == alpha


def test_class_group_l_part_respects_exclusion():
    part = class_group_l_part(K23, 3, {2, 3, 13, 23})
    assert all(P.p not in {2, 3, 13, 23} for P in part.gens)
    # basis property still holds: orders multiply to the Sylow order
    assert 3 ** sum(part.exps) == 3


def test_class_group_l_part_rank_two():
    # D=-2379 = -3*13*61 has Cl = Z/2 x Z/2 x ... pick a disc with 3-rank 2:
    # D=-3299 has class group Z/3 x Z/9 (h=27)
    field = quadratic_field(-3299)
    forms, h = enumerate_class_group(field)
    assert h == 27
    part = class_group_l_part(field, 3, {2, 3, 3299})
    assert sorted(part.exps, reverse=True) == list(part.exps)
    assert 3 ** sum(part.exps) == 27
    assert part.exps == (2, 1)
    for P, m, alpha in zip(part.gens, part.exps, part.alphas):
        power = ideal_pow(field, prime_module(field, P), 3**m)
        assert principal_generator(field, power) == alpha
        with pytest.raises(NotPrincipal):
            principal_generator(
                field, ideal_pow(field, prime_module(field, P), 3 ** (m - 1))
            )


def test_class_dlog_examples():
    part = class_group_l_part(K23, 3, {2, 3, 23})
    assert class_dlog(K23, unit_ideal(K23), part) == [0]
    assert class_dlog(K23, principal_ideal(K23, (3, 1)), part) == [0]
    a1 = prime_module(K23, part.gens[0])
    assert class_dlog(K23, a1, part) == [1]
    assert class_dlog(K23, ideal_mul(K23, a1, a1), part) == [2]
    conj = prime_module(K23, conjugate_prime(part.gens[0]))
    assert class_dlog(K23, conj, part) == [2]


def test_class_dlog_strips_l_part():
    # after dividing out a_i^c_i the class has trivial l-part
    field = quadratic_field(-3299)
    part = class_group_l_part(field, 3, {2, 3, 3299})
    rng = random.Random(37)
    split = []
    p = 5
    while len(split) < 8:
        for P in factor_rational_prime(field, p):
            if P.kind == "split":
                split.append(P)
        p += 2
    for _ in range(15):
        I = prime_module(field, rng.choice(split))
        for _ in range(rng.randrange(2)):
            I = ideal_mul(field, I, prime_module(field, rng.choice(split)))
        c = class_dlog(field, I, part)
        f = ideal_class_form(field, I)
        for g, e, m in zip(part.basis_forms, c, part.exps):
            assert 0 <= e < 3**m
            f = compose_forms(f, form_pow(g, 3**m - e))
        assert form_pow(f, part.proj_exp) == principal_form(field.disc)


# ---------------------------------------------------------- principality


def test_principal_generator_examples():
    assert principal_generator(K23, unit_ideal(K23)) == (2, 0)
    P2 = [prime_module(K23, P) for P in factor_rational_prime(K23, 2)]
    gens = {principal_generator(K23, ideal_pow(K23, I, 3)) for I in P2}
    assert gens == {(3, 1), (-3, 1)}
    for g in gens:
        assert elt_norm(K23, g) == 8
    with pytest.raises(NotPrincipal):
        principal_generator(K23, P2[0])


def test_principal_generator_matches_scan_oracle():
    rng = random.Random(41)
    primes = [
        P
        for p in (2, 3, 13, 29, 31, 41)
        for P in factor_rational_prime(K23, p)
        if P.kind == "split"
    ]
    for _ in range(30):
        I = prime_module(K23, rng.choice(primes))
        for _ in range(rng.randrange(3)):
            I = ideal_mul(K23, I, prime_module(K23, rng.choice(primes)))
        sols = generator_by_scan(K23, I)
        try:
            g = principal_generator(K23, I)
        except NotPrincipal:
            assert sols == []
            continue
        assert g in sols
        assert elt_norm(K23, g) == ideal_norm(I)
        assert g == normalize_unit(K23, g)
        assert principal_ideal(K23, g) == I


def test_principal_generator_content():
    I = principal_ideal(K23, integer_elt(6))
    assert I == QuadIdeal(6, 1, 1)
    assert principal_generator(K23, I) == integer_elt(6)


def test_principal_generator_units_fields():
    k4 = quadratic_field(-4)
    (P,) = factor_rational_prime(k4, 2)
    assert P.kind == "ramified"
    g = principal_generator(k4, prime_module(k4, P))
    assert elt_norm(k4, g) == 2
    k3 = quadratic_field(-3)
    (P3,) = factor_rational_prime(k3, 3)
    g3 = principal_generator(k3, prime_module(k3, P3))
    assert elt_norm(k3, g3) == 3


def test_normalize_unit():
    assert normalize_unit(K23, (-3, -1)) == (3, 1)
    assert normalize_unit(K23, (-4, 0)) == (4, 0)
    assert normalize_unit(K23, (3, 1)) == (3, 1)
    k4 = quadratic_field(-4)
    orbit = {normalize_unit(k4, u) for u in [(2, 1), (-2, 1), (2, -1), (-2, -1)]}
    assert len(orbit) == 1


# ------------------------------------------------------------- reduction


def test_reduce_mod_examples():
    assert reduce_mod(K23, integer_elt(1), factor_rational_prime(K23, 13)[0]) == 1
    P73 = [P for P in factor_rational_prime(K23, 73) if P.b % 73 == 14][0]
    assert P73.b == 87
    assert reduce_mod(K23, (3, 1), P73) == 45
    (P5,) = factor_rational_prime(K23, 5)
    img = reduce_mod(K23, (0, 2), P5)  # sqrt(-23) in F_25
    fld = residue_field(5, 2)
    assert fld.mul(img, img) == fld.embed(-23)


def test_reduce_mod_is_a_ring_hom():
    rng = random.Random(43)
    targets = [
        factor_rational_prime(K23, 13)[1],
        factor_rational_prime(K23, 5)[0],
        factor_rational_prime(K23, 23)[0],
    ]
    for P in targets:
        fld = residue_field(P.p, P.f)
        for _ in range(20):
            u = (rng.randrange(-20, 21), rng.randrange(-20, 21))
            v = (rng.randrange(-20, 21), rng.randrange(-20, 21))
            u = u if (u[0] - u[1] * 23) % 2 == 0 else (u[0] + 1, u[1])
            v = v if (v[0] - v[1] * 23) % 2 == 0 else (v[0] + 1, v[1])
            lhs = reduce_mod(K23, elt_mul(K23, u, v), P)
            assert lhs == fld.mul(reduce_mod(K23, u, P), reduce_mod(K23, v, P))


def test_reduce_mod_kills_the_prime():
    # elements of P reduce to 0, elements of the conjugate do not (split case)
    P, Q = factor_rational_prime(K23, 13)
    gen = principal_generator(K23, ideal_pow(K23, prime_module(K23, P), 3))
    assert reduce_mod(K23, gen, P) == 0
    assert reduce_mod(K23, gen, Q) != 0


def test_reduce_mod_rejects_p2():
    with pytest.raises(ValueError):
        reduce_mod(K23, (3, 1), factor_rational_prime(K23, 2)[0])


def test_reduce_mod_rational():
    (P,) = factor_rational_prime(RATIONAL, 7)
    assert reduce_mod(RATIONAL, integer_elt(10), P) == 3
