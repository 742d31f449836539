"""Ray-class machinery for cyclic pieces of prime-power degree.

A piece is a cyclic degree-l^r extension of the base field ramified at a
single finite place: either the cyclotomic seed piece, ramified only at l,
or a ray piece cut out of the ray class field of one auxiliary prime
conductor.  Conductors are drawn from a Chebotarev set S of primes chosen
so that the ray class group splits off a cyclic factor of order at least
l^(r+t), where the Frobenius image of any target prime can be read off as
a power residue in the conductor's residue field.

Conventions:
  * the seed character is the canonical order-l^r quotient of
    (Z/l^(r+1))^* for odd l, and for l = 2 the odd character mod 2^(r+2)
    sending 5 to a primitive 2^r-th root of unity;
  * the splitting-map image of a target prime q is computed integrally:
    the prime-to-l class component is killed by raising to kprime (which
    is 1 mod l^(r+t), so Frobenius data in any degree-l^r quotient is
    preserved), and the class-group basis correction a_i^(-c_i) is
    realized as multiplication by the conjugate ideal followed by
    division by the rational norm inside the residue field;
  * only the (Q-1)/l^r power of the image is contractual; it does not
    depend on the choice of l-th roots made along the way.
"""

from dataclasses import dataclass, field as dc_field
from math import gcd, isqrt, lcm

from .arith import (
    SearchExhausted,
    ell_root,
    factor,
    is_prime,
    power_residue_level,
    small_primes,
)
from .quadfield import (
    NotPrincipal,
    PrimeIdeal,
    class_dlog,
    class_group_l_part,
    conjugate_prime,
    factor_rational_prime,
    ideal_mul,
    ideal_pow,
    integer_elt,
    kronecker_disc,
    local_field,
    prime_module,
    principal_generator,
    reduce_mod,
    unit_generators,
)


class InternalInconsistency(Exception):
    """A quantity recomputed two ways disagreed; the result is untrusted."""


# ------------------------------------------------------------- context


@dataclass(eq=False)
class Context:
    field: object
    ell: int
    r: int
    cl: object  # l-part of the class group with basis data
    units: list
    excluded: frozenset  # rational primes dividing 2*l*disc
    kprime: int  # kills the prime-to-l class component, is 1 mod l^(r+t)
    _targets: dict = dc_field(default_factory=dict, repr=False)

    @property
    def t(self):
        return self.cl.t


def build_context(field, ell: int, r: int) -> Context:
    if not is_prime(ell):
        raise ValueError("ell must be prime")
    if r < 1:
        raise ValueError("r must be at least 1")
    disc = field.disc if field.kind == "imag_quadratic" else 1
    excluded = frozenset(p for p, _ in factor(abs(2 * ell * disc)))
    cl = class_group_l_part(field, ell, excluded)
    m = cl.coprime_part
    kprime = m * pow(m, -1, ell ** (r + cl.t))
    return Context(field, ell, r, cl, unit_generators(field), excluded, kprime)


# ---------------------------------------------------------- seed piece


@dataclass(eq=False)
class CyclotomicPiece:
    ell: int
    r: int
    modulus: int
    degree: int  # l^r
    sign: int  # character value at -1
    _pow5: dict = dc_field(default=None, repr=False)


def build_L0_rational(ell: int, r: int) -> CyclotomicPiece:
    """Seed piece: a cyclic degree-l^r field ramified only at l.

    For l = 2 the character is odd, so the seed is imaginary and the real
    place acquires local degree 2.
    """
    if ell == 2:
        return CyclotomicPiece(2, r, 2 ** (r + 2), 2**r, -1)
    return CyclotomicPiece(ell, r, ell ** (r + 1), ell**r, 1)


def _pow5_table(piece):
    if piece._pow5 is None:
        tbl, x = {}, 1
        for b in range(piece.degree):
            tbl[x] = b
            x = 5 * x % piece.modulus
        piece._pow5 = tbl
    return piece._pow5


def character_order(piece, x: int) -> int:
    """Order of the seed character's value at the unit x."""
    m = piece.modulus
    x %= m
    if gcd(x, m) != 1:
        raise ValueError("character undefined at a non-unit")
    if piece.ell != 2:
        # order of x in the l-part of (Z/l^(r+1))^*
        y = pow(x, piece.ell - 1, m)
        j = 0
        while y != 1:
            y = pow(y, piece.ell, m)
            j += 1
        return piece.ell**j
    # x = (-1)^a 5^b, and chi(x) = zeta^(b + a*2^(r-1)) for zeta of order 2^r
    tbl = _pow5_table(piece)
    if x in tbl:
        e = tbl[x]
    else:
        e = tbl[(m - x) % m] + piece.degree // 2
    return piece.degree // gcd(piece.degree, e)


def frobenius_order_in_L0(piece, q: PrimeIdeal, field):
    """Frobenius order of q in the seed piece, None for primes above l."""
    if q.p == piece.ell:
        return None
    return character_order(piece, q.norm)


def l0_local_degrees_above_ell(ctx, piece):
    """Local degree of the seed piece at each prime above l.

    Returns [(prime, degree, a)] where degree = l^(r-a); a >= 1 only in
    the deficient case, where the completion of the base field at the
    prime above 2 already sits inside the seed piece 2-adically.
    """
    ell, r, field = ctx.ell, ctx.r, ctx.field
    out = []
    for lam in factor_rational_prime(field, ell):
        a = 0
        if field.kind == "imag_quadratic" and ell == 2 and field.disc % 8 == 0:
            # the seed's unique quadratic subfield is Q(sqrt(-2)) for
            # r = 1 and Q(sqrt(2)) for r >= 2, so the containment test
            # only depends on D/8 mod 8
            m = field.disc // 8
            if (r == 1 and m % 8 == 7) or (r >= 2 and m % 8 == 1):
                a = 1
        out.append((lam, ell ** (r - a), a))
    return out


# --------------------------------------------------- Chebotarev set S


def in_S(ctx, P: PrimeIdeal) -> bool:
    """Membership test for auxiliary conductor candidates.

    Requires: the l-part of the class of P is trivial, N(P) = 1 mod
    l^(r+t), every unit is an l^(r+t)-th power residue at P, and each
    class-basis generator alpha_i is an l^(m_i)-th power residue at P.
    """
    if P.p in ctx.excluded or P in ctx.cl.gens:
        raise ValueError("candidate collides with an excluded or basis prime")
    kmax = ctx.r + ctx.t
    if (P.norm - 1) % ctx.ell**kmax:
        return False
    if ctx.field.kind == "imag_quadratic":
        if any(class_dlog(ctx.field, prime_module(ctx.field, P), ctx.cl)):
            return False
    fld = local_field(P)
    for u in ctx.units:
        if power_residue_level(reduce_mod(ctx.field, u, P), ctx.ell, kmax, fld) != kmax:
            return False
    for alpha, m in zip(ctx.cl.alphas, ctx.cl.exps):
        if power_residue_level(reduce_mod(ctx.field, alpha, P), ctx.ell, m, fld) != m:
            return False
    return True


# ----------------------------------------------------------- ray piece


@dataclass(eq=False)
class RayPiece:
    conductor: PrimeIdeal
    degree: int  # l^r
    _roots: dict = dc_field(default_factory=dict, repr=False)

    @property
    def Q(self):
        return self.conductor.norm


def make_ray_piece(ctx, P: PrimeIdeal, check: bool = True) -> RayPiece:
    if check and not in_S(ctx, P):
        raise ValueError("conductor lies outside the Chebotarev set")
    return RayPiece(P, ctx.ell**ctx.r)


def _target_data(ctx, q: PrimeIdeal):
    # conductor-independent correction data for the target prime
    data = ctx._targets.get(q)
    if data is None:
        fld = ctx.field
        c = class_dlog(fld, prime_module(fld, q), ctx.cl)
        J = ideal_pow(fld, prime_module(fld, q), ctx.kprime)
        denom = 1
        for a_i, ci in zip(ctx.cl.gens, c):
            if ci:
                bar = prime_module(fld, conjugate_prime(a_i))
                J = ideal_mul(fld, J, ideal_pow(fld, bar, ci))
                denom *= a_i.p**ci
        try:
            gamma = principal_generator(fld, J)
        except NotPrincipal:
            raise InternalInconsistency("projected target ideal is not principal")
        data = (tuple(c), gamma, denom)
        ctx._targets[q] = data
    return data


def _alpha_root(ctx, piece, i, fld):
    # iterated l-th root of alpha_i at the conductor; any choice of root
    # gives the same contractual (Q-1)/l^r power
    root = piece._roots.get(i)
    if root is None:
        root = reduce_mod(ctx.field, ctx.cl.alphas[i], piece.conductor)
        for _ in range(ctx.cl.exps[i]):
            root = ell_root(root, ctx.ell, fld)
        piece._roots[i] = root
    return root


def splitting_map_image(ctx, piece: RayPiece, q: PrimeIdeal):
    """Residue of the target prime q at the conductor whose (Q-1)/l^r
    power has the same order as the Frobenius of q in the piece."""
    eps = piece.conductor
    if ctx.field.kind == "rational":
        return q.p % eps.p
    c, gamma, denom = _target_data(ctx, q)
    fld = local_field(eps)
    g = reduce_mod(ctx.field, gamma, eps)
    if denom != 1:
        g = fld.mul(g, fld.inv(fld.embed(denom)))
    for i, ci in enumerate(c):
        if ci:
            g = fld.mul(g, fld.pow(_alpha_root(ctx, piece, i, fld), ci))
    return g


def frobenius_order_in_ray_piece(ctx, piece: RayPiece, q: PrimeIdeal) -> int:
    """Order of the Frobenius of q in the ray piece; the conductor itself
    is totally ramified and reports the full degree."""
    if q == piece.conductor:
        return piece.degree
    fld = local_field(piece.conductor)
    g = splitting_map_image(ctx, piece, q)
    x = fld.pow(g, (piece.Q - 1) // piece.degree)
    order = 1
    one = fld.one
    while x != one:
        x = fld.pow(x, ctx.ell)
        order *= ctx.ell
        if order > piece.degree:
            raise InternalInconsistency("Frobenius image escapes the piece")
    return order


def kummer_generator(ctx, q: PrimeIdeal):
    """Generator alpha with q^(kprime * l^m) = (alpha), where l^m is the
    order of the l-part of the class of q.  Returns (alpha, m)."""
    if ctx.field.kind == "rational":
        return integer_elt(q.p), 0
    c = class_dlog(ctx.field, prime_module(ctx.field, q), ctx.cl)
    m = 0
    for ci, mi in zip(c, ctx.cl.exps):
        if ci:
            v = 0
            while ci % ctx.ell == 0:
                ci //= ctx.ell
                v += 1
            m = max(m, mi - v)
    alpha = principal_generator(
        ctx.field,
        ideal_pow(ctx.field, prime_module(ctx.field, q), ctx.kprime * ctx.ell**m),
    )
    return alpha, m


def kummer_split_test(ctx, P: PrimeIdeal, alpha, k: int) -> bool:
    """Whether P splits completely in the Kummer layer generated by the
    l^k-th roots of unity and an l^k-th root of alpha."""
    if k == 0:
        return True
    if k > ctx.r + ctx.t:
        raise ValueError("Kummer level exceeds r + t")
    if (P.norm - 1) % ctx.ell**k:
        return False
    x = reduce_mod(ctx.field, alpha, P)
    return power_residue_level(x, ctx.ell, k, local_field(P)) == k


# -------------------------------------------------- search conditions


@dataclass(frozen=True)
class InS:
    pass


@dataclass(frozen=True)
class SplitsCompletelyIn:
    piece: object  # CyclotomicPiece or RayPiece


@dataclass(frozen=True)
class FrobeniusOrderExactly:
    # order of the target's Frobenius in the piece built on the candidate;
    # a candidate equal to the target passes iff order is the full degree
    target: PrimeIdeal
    order: int


@dataclass(frozen=True)
class KummerSplitExactLevel:
    # candidate splits in the level-k Kummer layer of alpha but not k+1
    alpha: tuple
    level: int


def _condition_rank(cond):
    if isinstance(cond, InS):
        return 0
    if isinstance(cond, SplitsCompletelyIn):
        return 1 if isinstance(cond.piece, CyclotomicPiece) else 2
    if isinstance(cond, KummerSplitExactLevel):
        return 3
    return 4


def _passes_all(ctx, conds, P: PrimeIdeal) -> bool:
    piece = None
    for cond in conds:
        if isinstance(cond, InS):
            if not in_S(ctx, P):
                return False
        elif isinstance(cond, SplitsCompletelyIn):
            inner = cond.piece
            if isinstance(inner, CyclotomicPiece):
                if frobenius_order_in_L0(inner, P, ctx.field) != 1:
                    return False
            elif frobenius_order_in_ray_piece(ctx, inner, P) != 1:
                return False
        elif isinstance(cond, FrobeniusOrderExactly):
            if piece is None:
                piece = RayPiece(P, ctx.ell**ctx.r)
            if frobenius_order_in_ray_piece(ctx, piece, cond.target) != cond.order:
                return False
        elif isinstance(cond, KummerSplitExactLevel):
            if not kummer_split_test(ctx, P, cond.alpha, cond.level):
                return False
            if kummer_split_test(ctx, P, cond.alpha, cond.level + 1):
                return False
        else:
            raise ValueError(f"unknown search condition {cond!r}")
    return True


def _cheap_residue_pass(ctx, conds, n: int) -> bool:
    # rational fast path: every condition is a residue test on the
    # candidate integer itself, so run the cheap ones before primality
    cap = ctx.ell**ctx.r
    for cond in conds:
        if isinstance(cond, SplitsCompletelyIn):
            inner = cond.piece
            if isinstance(inner, CyclotomicPiece):
                if character_order(inner, n) != 1:
                    return False
            elif pow(n, (inner.Q - 1) // inner.degree, inner.Q) != 1:
                return False
        elif isinstance(cond, FrobeniusOrderExactly):
            if n == cond.target.p:
                continue
            x = pow(cond.target.p, (n - 1) // cap, n)
            order = 1
            while x != 1:
                x = pow(x, ctx.ell, n)
                order *= ctx.ell
                if order > cap:
                    break  # composite candidates can escape
            if order != cond.order:
                return False
    return True


@dataclass
class SearchCursor:
    cap: int = 10_000_000
    skip: frozenset = frozenset()  # ineligible primes (prior conductors)


def _quad_candidates(ctx, n: int):
    if is_prime(n):
        if n in ctx.excluded or kronecker_disc(ctx.field.disc, n) != 1:
            return []
        return factor_rational_prime(ctx.field, n)
    p = isqrt(n)
    if p * p != n or not is_prime(p):
        return []
    if p in ctx.excluded or kronecker_disc(ctx.field.disc, p) != -1:
        return []
    return factor_rational_prime(ctx.field, p)


def search_prime(ctx, conditions, cursor: SearchCursor) -> PrimeIdeal:
    """First prime, by ascending (norm, root), satisfying every condition.

    Candidates are split or inert primes coprime to 2*l*disc, distinct
    from the class-basis primes and from everything in cursor.skip.  When
    an InS condition is present the enumeration runs over the congruence
    progression N = 1 mod l^(r+t) that S forces on norms; cursor.cap
    bounds the number of progression entries examined.
    """
    rational = ctx.field.kind == "rational"
    skip = set(cursor.skip) | set(ctx.cl.gens)
    conds = sorted(conditions, key=_condition_rank)
    fast = any(isinstance(c, InS) for c in conds)
    step = 1
    if fast:
        step = ctx.ell ** (ctx.r + ctx.t)
        if ctx.ell == 2 and (rational or ctx.field.disc < -4):
            step *= 2  # -1 must be a 2^(r+t)-th power residue
    examined = 0
    n = 1
    while True:
        n += step
        examined += 1
        if examined > cursor.cap:
            raise SearchExhausted(
                f"no conductor within cap {cursor.cap} for {conds!r}"
            )
        if n < 3:
            continue
        if rational:
            if n in ctx.excluded:
                continue
            if fast and not _cheap_residue_pass(ctx, conds, n):
                continue
            if not is_prime(n):
                continue
            cands = [PrimeIdeal(n, "rational", None, 1)]
        else:
            cands = _quad_candidates(ctx, n)
        for P in cands:
            if P in skip:
                continue
            if _passes_all(ctx, conds, P):
                return P


# ------------------------------------------------------- local degrees


def local_degree(ctx, l0, deficiencies, pieces, w: PrimeIdeal) -> int:
    """Local degree at the finite prime w of the compositum of the seed
    and the ray pieces: the ramification factor of the one component
    ramified at w times the lcm of the unramified Frobenius orders.

    deficiencies maps primes above l to their deficiency exponent a.
    """
    ram = 1
    orders = [1]
    if w.p == ctx.ell:
        ram = ctx.ell ** (ctx.r - deficiencies.get(w, 0))
    else:
        orders.append(frobenius_order_in_L0(l0, w, ctx.field))
    for piece in pieces:
        if piece.conductor == w:
            ram = piece.degree
        else:
            orders.append(frobenius_order_in_ray_piece(ctx, piece, w))
    return ram * lcm(*orders)


def enumerate_field_primes(field, bound: int):
    """All primes of the field of norm <= bound, ascending by norm with
    split conjugates ordered by root."""
    out = []
    if field.kind == "rational":
        return [
            PrimeIdeal(p, "rational", None, 1)
            for p in small_primes(bound + 1)
        ]
    for n in range(2, bound + 1):
        if is_prime(n):
            out.extend(P for P in factor_rational_prime(field, n) if P.f == 1)
        else:
            p = isqrt(n)
            if p * p == n and is_prime(p) and kronecker_disc(field.disc, p) == -1:
                out.extend(factor_rational_prime(field, p))
    return out
