"""Base-field arithmetic: Q or an imaginary quadratic field K = Q(sqrt(D)).

Conventions, used consistently by every caller:

  * D is a negative fundamental discriminant.
  * Field elements are integer pairs (x, y) meaning (x + y*sqrt(D))/2 with
    x = y*D (mod 2).  Rational integers n are stored as (2n, 0).
  * Ideals are triples (g, a, b): content g times the primitive module with
    Z-basis [a, (b + sqrt(D))/2], where 0 <= b < 2a and 4a | b^2 - D.
  * A split or ramified PrimeIdeal stores the root b of x^2 = D (mod 4p)
    that its residue map selects, i.e. sqrt(D) = +b (mod P).  The module
    representation of P therefore uses -b mod 2p.
"""

from dataclasses import dataclass
from functools import lru_cache
from math import gcd, isqrt

from .arith import (
    SearchExhausted,
    factor,
    iter_primes,
    legendre,
    residue_field,
    sqrt_mod,
)


class NotPrincipal(Exception):
    """The ideal has no single generator."""


# ----------------------------------------------------------------- fields


@dataclass(frozen=True)
class BaseField:
    kind: str  # "rational" or "imag_quadratic"
    disc: int = 0


RATIONAL = BaseField("rational")


def _squarefree(n):
    return all(e == 1 for _, e in factor(n))


def quadratic_field(disc: int) -> BaseField:
    """Validate a fundamental discriminant and wrap it."""
    if disc >= 0:
        raise ValueError("discriminant must be negative")
    if disc % 4 == 1:
        if not _squarefree(-disc):
            raise ValueError("discriminant is not fundamental")
    elif disc % 4 == 0:
        m = disc // 4
        if m % 4 not in (2, 3) or not _squarefree(-m):
            raise ValueError("discriminant is not fundamental")
    else:
        raise ValueError("discriminant must be 0 or 1 mod 4")
    return BaseField("imag_quadratic", disc)


# ----------------------------------------------------------------- elements


def integer_elt(n: int):
    return (2 * n, 0)


def valid_elt(field, u) -> bool:
    x, y = u
    if field.kind == "rational":
        return y == 0 and x % 2 == 0
    return (x - y * field.disc) % 2 == 0


def elt_mul(field, u, v):
    x1, y1 = u
    x2, y2 = v
    d = field.disc
    return ((x1 * x2 + y1 * y2 * d) // 2, (x1 * y2 + x2 * y1) // 2)


def elt_pow(field, u, e: int):
    r = integer_elt(1)
    while e:
        if e & 1:
            r = elt_mul(field, r, u)
        u = elt_mul(field, u, u)
        e >>= 1
    return r


def elt_conj(u):
    return (u[0], -u[1])


def elt_neg(u):
    return (-u[0], -u[1])


def elt_norm(field, u):
    x, y = u
    return (x * x - field.disc * y * y) // 4


def torsion_units(field):
    """All roots of unity, as elements."""
    one = integer_elt(1)
    if field.kind == "imag_quadratic" and field.disc == -4:
        i = (0, 1)
        return [one, i, elt_neg(one), elt_neg(i)]
    if field.kind == "imag_quadratic" and field.disc == -3:
        units = [one]
        z = (1, 1)
        for _ in range(5):
            units.append(elt_mul(field, units[-1], z))
        return units
    return [one, elt_neg(one)]


def unit_generators(field):
    if field.kind == "imag_quadratic" and field.disc == -4:
        return [(0, 1)]
    if field.kind == "imag_quadratic" and field.disc == -3:
        return [(1, 1)]
    return [integer_elt(-1)]


def normalize_unit(field, u):
    # canonical associate: positive imaginary part, then positive real
    # part on the real axis, then smallest pair (relevant for D = -3, -4)
    cands = [elt_mul(field, u, w) for w in torsion_units(field)]
    pool = [c for c in cands if c[1] > 0 or (c[1] == 0 and c[0] > 0)]
    return min(pool or cands)


# ----------------------------------------------------------------- ideals


@dataclass(frozen=True)
class QuadIdeal:
    g: int  # content
    a: int  # norm of the primitive part
    b: int  # 0 <= b < 2a, 4a | b^2 - D


def unit_ideal(field) -> QuadIdeal:
    return QuadIdeal(1, 1, field.disc % 2)


def ideal_norm(I: QuadIdeal) -> int:
    return I.g * I.g * I.a


def ideal_conj(I: QuadIdeal) -> QuadIdeal:
    return QuadIdeal(I.g, I.a, (-I.b) % (2 * I.a))


def ideal_contains(I: QuadIdeal, u) -> bool:
    x, y = u
    if x % I.g or y % I.g:
        return False
    return (x // I.g - (y // I.g) * I.b) % (2 * I.a) == 0


def _xgcd(a, b):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a - (a // b) * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def _ideal_from_columns(field, cols):
    # 2-column HNF of the Z-module spanned by the given elements
    f = w = 0
    cols = [(-x, -y) if y < 0 else (x, y) for x, y in cols]
    for x, y in cols:
        if y == 0:
            continue
        if f == 0:
            f, w = y, x
        else:
            f, u, v = _xgcd(f, y)
            w = u * w + v * x
    assert f > 0, "columns do not span an ideal"
    d = 0
    for x, y in cols:
        d = gcd(d, x - (y // f) * w)
    a = d // (2 * f)
    b = (w // f) % (2 * a)
    assert (b * b - field.disc) % (4 * a) == 0
    return QuadIdeal(f, a, b)


def ideal_mul(field, I: QuadIdeal, J: QuadIdeal) -> QuadIdeal:
    d = field.disc
    cols = []
    for x1, y1 in ((2 * I.a, 0), (I.b, 1)):
        for x2, y2 in ((2 * J.a, 0), (J.b, 1)):
            cols.append(((x1 * x2 + y1 * y2 * d) // 2, (x1 * y2 + x2 * y1) // 2))
    prim = _ideal_from_columns(field, cols)
    return QuadIdeal(prim.g * I.g * J.g, prim.a, prim.b)


def ideal_pow(field, I: QuadIdeal, e: int) -> QuadIdeal:
    r = unit_ideal(field)
    while e:
        if e & 1:
            r = ideal_mul(field, r, I)
        I = ideal_mul(field, I, I)
        e >>= 1
    return r


def principal_ideal(field, u) -> QuadIdeal:
    omega = (field.disc % 2, 1)
    return _ideal_from_columns(field, [u, elt_mul(field, u, omega)])


# ----------------------------------------------------------------- primes


@dataclass(frozen=True)
class PrimeIdeal:
    p: int
    kind: str  # "split", "inert", "ramified", "rational"
    b: "int | None"  # root: sqrt(D) = b (mod P); None for inert/rational
    f: int

    @property
    def norm(self):
        return self.p**self.f


def kronecker_disc(d: int, p: int) -> int:
    """Splitting symbol of the discriminant d at the rational prime p."""
    if p == 2:
        if d % 2 == 0:
            return 0
        return 1 if d % 8 == 1 else -1
    return legendre(d % p, p)


def factor_rational_prime(field, p: int):
    if field.kind == "rational":
        return [PrimeIdeal(p, "rational", None, 1)]
    d = field.disc
    sym = kronecker_disc(d, p)
    if sym == -1:
        return [PrimeIdeal(p, "inert", None, 2)]
    if sym == 0:
        b = next(
            b
            for b in range(2 * p)
            if (b - d) % 2 == 0 and (b * b - d) % (4 * p) == 0
        )
        return [PrimeIdeal(p, "ramified", b, 1)]
    if p == 2:
        roots = [1, 3]
    else:
        r = sqrt_mod(d % p, p)
        roots = sorted(r0 if (r0 - d) % 2 == 0 else r0 + p for r0 in (r, p - r))
    return [PrimeIdeal(p, "split", b, 1) for b in roots]


def conjugate_prime(P: PrimeIdeal) -> PrimeIdeal:
    if P.kind != "split":
        return P
    return PrimeIdeal(P.p, "split", 2 * P.p - P.b, 1)


def prime_module(field, P: PrimeIdeal) -> QuadIdeal:
    if P.kind == "inert":
        return QuadIdeal(P.p, 1, field.disc % 2)
    return QuadIdeal(1, P.p, (-P.b) % (2 * P.p))


# ----------------------------------------------------------------- forms


def form_disc(f):
    a, b, c = f
    return b * b - 4 * a * c


def principal_form(d: int):
    b = d % 2
    return (1, b, (b * b - d) // 4)


def reduce_form(f):
    a, b, c = f
    while True:
        if not -a < b <= a:
            k = (a - b) // (2 * a)
            c += k * b + a * k * k
            b += 2 * a * k
        if a > c:
            a, b, c = c, -b, a
            continue
        break
    if a == c and b < 0:
        b = -b
    return (a, b, c)


def form_module(field, f) -> QuadIdeal:
    a, b, _ = f
    return QuadIdeal(1, a, (-b) % (2 * a))


def ideal_class_form(field, I: QuadIdeal):
    return reduce_form((I.a, -I.b, (I.b * I.b - field.disc) // (4 * I.a)))


def compose_forms(f, g):
    # the class-group law, computed on module representatives
    field = BaseField("imag_quadratic", form_disc(f))
    prod = ideal_mul(field, form_module(field, f), form_module(field, g))
    return ideal_class_form(field, prod)


def form_pow(f, e: int):
    r = principal_form(form_disc(f))
    while e:
        if e & 1:
            r = compose_forms(r, f)
        f = compose_forms(f, f)
        e >>= 1
    return r


def enumerate_class_group(field):
    """All reduced forms of disc D, and the class number h."""
    if field.kind == "rational":
        return [], 1
    d = field.disc
    forms = []
    for a in range(1, isqrt(-d // 3) + 1):
        for b in range(-a + 1, a + 1):
            if (b * b - d) % (4 * a):
                continue
            c = (b * b - d) // (4 * a)
            if c < a or (b < 0 and a == c):
                continue
            forms.append((a, b, c))
    return forms, len(forms)


# ------------------------------------------------------------ class group


@dataclass(eq=False)
class ClassGroupLPart:
    ell: int
    gens: tuple  # basis prime ideals a_i, orders descending
    exps: tuple  # m_i: a_i has order ell^m_i in the class group
    alphas: tuple  # generators of a_i^(ell^m_i)
    t: int  # max m_i, 0 when the l-part is trivial
    basis_forms: tuple
    dlog_table: dict  # reduced form -> exponent vector
    proj_exp: int  # powering by this projects a class onto its l-part
    coprime_part: int  # prime-to-l part of the class number


_BASIS_PRIME_CAP = 100000


def class_group_l_part(field, ell: int, exclusion) -> ClassGroupLPart:
    if field.kind == "rational":
        return ClassGroupLPart(ell, (), (), (), 0, (), {}, 0, 1)
    forms, h = enumerate_class_group(field)
    m_coprime = h
    sylow_order = 1
    while m_coprime % ell == 0:
        m_coprime //= ell
        sylow_order *= ell
    ident = principal_form(field.disc)
    sylow = sorted({form_pow(f, m_coprime) for f in forms})
    assert len(sylow) == sylow_order

    # greedy basis of the l-Sylow subgroup: repeatedly take the smallest
    # element of maximal order whose full order survives in the quotient
    basis, exps = [], []
    sub = {ident}
    while len(sub) < len(sylow):
        best = None
        for g in sylow:
            if g in sub:
                continue
            x, true_ord = g, 1
            while x != ident:
                x, true_ord = form_pow(x, ell), true_ord * ell
            x, quot_ord = g, 1
            while x not in sub:
                x, quot_ord = form_pow(x, ell), quot_ord * ell
            if true_ord == quot_ord and (best is None or quot_ord > best[0]):
                best = (quot_ord, g)
        assert best is not None  # abelian group theory guarantees a pick
        quot_ord, g = best
        basis.append(g)
        m = 0
        while ell**m < quot_ord:
            m += 1
        exps.append(m)
        sub = {compose_forms(s, form_pow(g, k)) for s in sub for k in range(quot_ord)}

    # brute dlog table doubles as the independence check
    table = {}
    vecs = [()]
    for m in exps:
        vecs = [v + (k,) for v in vecs for k in range(ell**m)]
    for vec in vecs:
        f = ident
        for g, e in zip(basis, vec):
            f = compose_forms(f, form_pow(g, e))
        assert f not in table, "basis relation found"
        table[f] = vec

    # represent each basis class by a prime ideal outside the exclusion set
    gens, alphas = [], []
    for g_form, m in zip(basis, exps):
        found = None
        for p in iter_primes():
            if p > _BASIS_PRIME_CAP:
                break
            if p in exclusion:
                continue
            for P in factor_rational_prime(field, p):
                if ideal_class_form(field, prime_module(field, P)) == g_form:
                    found = P
                    break
            if found:
                break
        if found is None:
            raise SearchExhausted(
                f"no prime below {_BASIS_PRIME_CAP} represents class {g_form}"
            )
        power = ideal_pow(field, prime_module(field, found), ell**m)
        alpha = principal_generator(field, power)
        assert elt_norm(field, alpha) == ideal_norm(power)
        gens.append(found)
        alphas.append(alpha)

    u = pow(m_coprime, -1, sylow_order)
    return ClassGroupLPart(
        ell,
        tuple(gens),
        tuple(exps),
        tuple(alphas),
        max(exps) if exps else 0,
        tuple(basis),
        table,
        m_coprime * u,
        m_coprime,
    )


def class_dlog(field, ideal: QuadIdeal, basis: ClassGroupLPart):
    """Exponents c_i < ell^m_i with ideal ~ prod a_i^c_i times prime-to-ell."""
    if not basis.exps:
        return []
    f = form_pow(ideal_class_form(field, ideal), basis.proj_exp)
    return list(basis.dlog_table[f])


# ---------------------------------------------------------- principality


def principal_generator(field, ideal: QuadIdeal):
    """A generator of the ideal, canonically normalized, or NotPrincipal.

    Reduces the norm form of the primitive part while tracking the GL2
    change of basis; the ideal is principal exactly when the reduction
    lands on the principal form, and the first transformed basis vector
    is then a generator.
    """
    if field.kind == "rational":
        raise ValueError("no ideal machinery over Q")
    d = field.disc
    a0, b0 = ideal.a, ideal.b
    a, b, c = a0, b0, (b0 * b0 - d) // (4 * a0)
    u11, u12, u21, u22 = 1, 0, 0, 1
    while True:
        if not -a < b <= a:
            k = (a - b) // (2 * a)
            u12 += k * u11
            u22 += k * u21
            c += k * b + a * k * k
            b += 2 * a * k
        if a > c:
            u11, u12, u21, u22 = u12, -u11, u22, -u21
            a, b, c = c, -b, a
            continue
        break
    if (a, b, c) != principal_form(d):
        raise NotPrincipal(f"class of {(ideal.a, ideal.b)} is {(a, b, c)}")
    x = 2 * a0 * u11 + b0 * u21
    y = u21
    return normalize_unit(field, (ideal.g * x, ideal.g * y))


# ------------------------------------------------------------- reduction


@lru_cache(maxsize=4096)
def _local_sqrt_disc(disc, p, f, b):
    # image of sqrt(D) in the residue field at one chosen prime above p
    if f == 1:
        return b % p
    fld = residue_field(p, 2)
    s = sqrt_mod(disc * pow(fld.n0, -1, p) % p, p)
    return (0, min(s, p - s))


def local_field(P: PrimeIdeal):
    return residue_field(P.p, P.f if P.kind == "inert" else 1)


def reduce_mod(field, x, P: PrimeIdeal):
    """Canonical image of the element x in the residue field at P."""
    if field.kind == "rational":
        return (x[0] // 2) % P.p
    if P.p == 2:
        raise ValueError("cannot reduce mod a prime above 2")
    xx, yy = x
    inv2 = (P.p + 1) // 2
    if P.kind == "inert":
        s = _local_sqrt_disc(field.disc, P.p, 2, 0)[1]
        return ((xx * inv2) % P.p, (yy * s * inv2) % P.p)
    root = _local_sqrt_disc(field.disc, P.p, 1, P.b)
    return (xx + yy * root) * inv2 % P.p
