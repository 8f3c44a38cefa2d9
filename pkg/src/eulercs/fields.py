"""Finite field arithmetic GF(p^r) via dense lookup tables.

Elements are encoded as integers 0..q-1: the code e represents the
polynomial whose coefficient of x^t is the t-th base-p digit of e
(least significant digit = constant term).  Tables are dense q x q
arrays; q is capped so the tables stay small.
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DivisionByZero, FieldTooLarge, InvalidPrime

DEFAULT_FIELD_CAP = 2 ** 16


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def _poly_mul(a, b, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return out


def _poly_trim(a):
    while len(a) > 1 and a[-1] == 0:
        a = a[:-1]
    return a


def _poly_mod(a, mod, p):
    # mod is monic; coefficients constant-term first
    a = list(a)
    dm = len(mod) - 1
    for i in range(len(a) - 1, dm - 1, -1):
        c = a[i] % p
        if c:
            for j in range(dm + 1):
                a[i - dm + j] = (a[i - dm + j] - c * mod[j]) % p
    return _poly_trim(a[:dm] if dm > 0 else [0])


def _code_to_poly(e, p, r):
    digits = []
    for _ in range(r):
        digits.append(e % p)
        e //= p
    return digits


def _poly_to_code(coeffs, p):
    code = 0
    for c in reversed(coeffs):
        code = code * p + (c % p)
    return code


def _divides(a, b, p):
    """True if monic polynomial b divides a over GF(p)."""
    rem = _poly_mod(a, b, p)
    return rem == [0]


def _monic_polys(p, degree):
    """All monic polynomials of the given degree, lexicographic in code."""
    for low in range(p ** degree):
        yield _code_to_poly(low, p, degree) + [1]


def find_irreducible(p: int, r: int) -> list:
    """Lexicographically smallest monic irreducible degree-r polynomial.

    Brute force: candidates enumerated in ascending order of their
    low-coefficient code, each tested by trial division against every
    monic polynomial of degree 1..r//2.
    """
    if not is_prime(p):
        raise InvalidPrime(f"p={p} is not prime")
    if r < 1:
        raise InvalidPrime(f"degree r={r} must be >= 1")
    if r == 1:
        return [0, 1]  # x; degree-1 polynomials are always irreducible
    divisors = [d for deg in range(1, r // 2 + 1) for d in _monic_polys(p, deg)]
    for cand in _monic_polys(p, r):
        if not any(_divides(cand, d, p) for d in divisors):
            return cand
    raise InvalidPrime(f"no irreducible polynomial found for p={p}, r={r}")


@dataclass(eq=False)
class GaloisField:
    p: int
    r: int
    q: int
    irreducible: tuple
    add_table: np.ndarray = field(repr=False)
    mul_table: np.ndarray = field(repr=False)

    def add(self, a, b):
        return int(self.add_table[a, b])

    def mul(self, a, b):
        return int(self.mul_table[a, b])

    def inv(self, e):
        return field_inv(self, e)


@lru_cache(maxsize=128)
def build_field(p: int, r: int, cap: int = DEFAULT_FIELD_CAP) -> GaloisField:
    """Construct GF(p^r) with dense add/mul tables.

    Results are cached: fields are immutable after construction, so the
    shared instance is safe for unrestricted concurrent reads.
    """
    if not is_prime(p):
        raise InvalidPrime(f"p={p} is not prime")
    q = p ** r
    if q > cap:
        raise FieldTooLarge(f"q={q} exceeds cap {cap}")
    irr = find_irreducible(p, r)
    polys = [_code_to_poly(e, p, r) for e in range(q)]

    add = np.zeros((q, q), dtype=np.int64)
    mul = np.zeros((q, q), dtype=np.int64)
    for a in range(q):
        pa = polys[a]
        for b in range(a, q):
            pb = polys[b]
            s = [(x + y) % p for x, y in zip(pa, pb)]
            add[a, b] = add[b, a] = _poly_to_code(s, p)
            m = _poly_mod(_poly_mul(pa, pb, p), irr, p)
            mul[a, b] = mul[b, a] = _poly_to_code(m, p)
    return GaloisField(p=p, r=r, q=q, irreducible=tuple(irr),
                       add_table=add, mul_table=mul)


def field_inv(F: GaloisField, e: int) -> int:
    if e == 0:
        raise DivisionByZero("0 has no multiplicative inverse")
    hits = np.nonzero(F.mul_table[e] == 1)[0]
    return int(hits[0])
