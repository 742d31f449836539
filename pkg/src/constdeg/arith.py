"""Exact arithmetic in F_p and F_{p^2}, primality, factoring, power residues.

Elements of F_p are ints in [0, p); elements of F_{p^2} are pairs (a, b)
standing for a + b*w where w*w = n0, the least positive non-residue mod p.
All functions are deterministic.
"""

from __future__ import annotations

import math
import random
from functools import lru_cache

# Jaeschke / Sorenson-Webster witness set, complete below 3.3 * 10^24,
# comfortably covering the 64-bit input range we promise.
MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

_RHO_SEED = 0x5eed


class SearchExhausted(Exception):
    """A bounded prime search ran out of candidates before finding a match."""


def is_prime(m: int) -> bool:
    """Deterministic Miller-Rabin for 2 <= m < 2**64."""
    if m < 2 or m >= 1 << 64:
        raise ValueError(f"is_prime input out of range: {m}")
    for p in MR_WITNESSES:
        if m % p == 0:
            return m == p
    d = m - 1
    s = (d & -d).bit_length() - 1
    d >>= s
    for a in MR_WITNESSES:
        x = pow(a, d, m)
        if x == 1 or x == m - 1:
            continue
        for _ in range(s - 1):
            x = x * x % m
            if x == m - 1:
                break
        else:
            return False
    return True


@lru_cache(maxsize=8)
def small_primes(limit: int = 100000) -> tuple:
    sieve = bytearray([1]) * limit
    sieve[0:2] = b"\x00\x00"
    for i in range(2, math.isqrt(limit - 1) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(range(i * i, limit, i)))
    return tuple(i for i in range(limit) if sieve[i])


def iter_primes():
    """Unbounded ascending prime generator (incremental sieve)."""
    yield 2
    comps = {}
    n = 3
    while True:
        step = comps.pop(n, 0)
        if step:
            m = n + step
            while m in comps:
                m += step
            comps[m] = step
        else:
            yield n
            comps[n * n] = 2 * n
        n += 2


def _brent_rho(n: int, rng: random.Random) -> int:
    # n odd composite, no factor below the trial bound
    while True:
        y = rng.randrange(1, n)
        c = rng.randrange(1, n)
        m = 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def factor(m: int) -> list:
    """Prime factorization as a sorted list of (prime, exponent) pairs.

    Trial division below 10^5, then Brent's rho with a fixed seed so that
    repeated runs factor identically.
    """
    if m < 1:
        raise ValueError(f"factor input must be positive: {m}")
    out = {}
    for p in small_primes():
        if p * p > m:
            break
        while m % p == 0:
            out[p] = out.get(p, 0) + 1
            m //= p
    if m > 1:
        rng = random.Random(_RHO_SEED)
        stack = [m]
        while stack:
            v = stack.pop()
            if is_prime(v):
                out[v] = out.get(v, 0) + 1
                continue
            d = _brent_rho(v, rng)
            stack.append(d)
            stack.append(v // d)
    return sorted(out.items())


def legendre(a: int, p: int) -> int:
    """(a|p) in {-1, 0, 1} for an odd prime p."""
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def least_nonresidue(p: int) -> int:
    for n in range(2, p):
        if legendre(n, p) == -1:
            return n
    raise ValueError(f"no quadratic non-residue mod {p}")


class ResidueField:
    """F_p (f=1, int elements) or F_{p^2} (f=2, pair elements)."""

    __slots__ = ("p", "f", "q", "n0", "_nonpower")

    def __init__(self, p: int, f: int = 1):
        if f not in (1, 2):
            raise ValueError(f"unsupported residue degree {f}")
        self.p = p
        self.f = f
        self.q = p**f
        self.n0 = least_nonresidue(p) if f == 2 else None
        self._nonpower = {}  # ell -> cached non ell-th power witness

    def __repr__(self):
        return f"F({self.p}^2)" if self.f == 2 else f"F({self.p})"

    @property
    def one(self):
        return (1, 0) if self.f == 2 else 1

    def embed(self, n: int):
        n %= self.p
        return (n, 0) if self.f == 2 else n

    def mul(self, x, y):
        if self.f == 1:
            return x * y % self.p
        p = self.p
        a, b = x
        c, d = y
        return ((a * c + b * d * self.n0) % p, (a * d + b * c) % p)

    def pow(self, x, e: int):
        if self.f == 1:
            return pow(x, e, self.p)
        if e < 0:
            x = self.inv(x)
            e = -e
        r = (1, 0)
        while e:
            if e & 1:
                r = self.mul(r, x)
            e >>= 1
            if e:
                x = self.mul(x, x)
        return r

    def inv(self, x):
        if self.f == 1:
            return pow(x, -1, self.p)
        # (a + bw)^-1 = (a - bw) / (a^2 - n0 b^2)
        a, b = x
        d = pow(a * a - self.n0 * b * b, -1, self.p)
        return (a * d % self.p, -b * d % self.p)

    def iter_elements(self):
        # canonical deterministic order, skipping 0 and 1
        if self.f == 1:
            yield from range(2, self.p)
        else:
            for idx in range(2, self.q):
                yield (idx % self.p, idx // self.p)


@lru_cache(maxsize=4096)
def residue_field(p: int, f: int = 1) -> ResidueField:
    return ResidueField(p, f)


def mod_pow(x, e: int, field: ResidueField):
    """x**e in the field; e = 0 gives the identity."""
    if e < 0:
        raise ValueError("exponent must be nonnegative")
    return field.pow(x, e)


def power_residue_level(x, ell: int, k_max: int, field: ResidueField) -> int:
    """Largest k <= k_max with x^((Q-1)/ell^k) = 1.

    Requires ell^k_max | Q - 1. Level k means x is an ell^k-th power.
    """
    e, rem = divmod(field.q - 1, ell**k_max)
    if rem:
        raise ValueError(f"ell^k_max = {ell}^{k_max} does not divide Q - 1")
    a = field.pow(x, e)
    one = field.one
    j = 0
    while a != one:
        a = field.pow(a, ell)
        j += 1
        if j > k_max:
            raise ValueError("x is not a unit of the field")
    return k_max - j


def _nonpower_witness(field: ResidueField, ell: int):
    z = field._nonpower.get(ell)
    if z is None:
        e = (field.q - 1) // ell
        for cand in field.iter_elements():
            if field.pow(cand, e) != field.one:
                z = cand
                break
        field._nonpower[ell] = z
    return z


def _sylow_dlog(field: ResidueField, g, a, ell: int, v: int) -> int:
    # discrete log of a base g in the cyclic group <g> of order ell^v
    gamma = field.pow(g, ell ** (v - 1))
    table = {}
    t = field.one
    for i in range(ell):
        table[t] = i
        t = field.mul(t, gamma)
    k = 0
    ginv = field.inv(g)
    for i in range(v):
        cur = field.pow(field.mul(a, field.pow(ginv, k)), ell ** (v - 1 - i))
        k += table[cur] * ell**i
    return k


def ell_root(x, ell: int, field: ResidueField):
    """One y with y^ell = x, via Adleman-Manders-Miller descent.

    Deterministic, but callers must not depend on which root comes back.
    Raises ValueError when x is not an ell-th power.
    """
    qm1 = field.q - 1
    if qm1 % ell:
        return field.pow(x, pow(ell, -1, qm1))
    if field.pow(x, qm1 // ell) != field.one:
        raise ValueError("not an ell-th power in the field")
    v = 0
    m = qm1
    while m % ell == 0:
        m //= ell
        v += 1
    z = _nonpower_witness(field, ell)
    g = field.pow(z, m)  # generates the ell-Sylow subgroup, order ell^v
    a = field.pow(x, m)
    k = _sylow_dlog(field, g, a, ell, v)  # ell | k since x is an ell-th power
    u = pow(ell, -1, m) if m > 1 else 0
    w = (1 - u * ell) // m
    return field.mul(field.pow(x, u), field.pow(g, (k // ell) * w % (ell**v)))


def sqrt_mod(n: int, p: int) -> int:
    """A square root of n mod p (odd prime); ValueError if none exists."""
    return ell_root(n % p, 2, residue_field(p))


def multiplicative_order(x, field: ResidueField) -> int:
    order = field.q - 1
    for p, _ in factor(order):
        while order % p == 0 and field.pow(x, order // p) == field.one:
            order //= p
    return order
