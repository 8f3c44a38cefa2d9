"""Euler squares (systems of mutually orthogonal Latin squares).

An Euler square of index (n, k) is an n x n array of k-tuples over
{0..n-1} that is row-Latin and column-Latin in every coordinate, and
whose coordinate pairs are jointly orthogonal: superimposing any two
coordinates yields all n^2 ordered pairs exactly once.

Construction follows the classical direct-product recipe: prime-power
component squares from finite-field arithmetic, degree reduction, and
products in increasing-prime order.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (DegreeMismatch, DegreeTooLarge, IndexNotConstructible,
                     InvalidInput, InvalidOrder, ParseError)
from .fields import GaloisField, build_field


@dataclass(frozen=True)
class PrimePowerFactorization:
    m: int
    components: tuple  # ((prime, exponent, prime**exponent), ...) primes increasing

    @property
    def values(self):
        return tuple(v for _, _, v in self.components)

    @property
    def min_value(self):
        return min(self.values)


def factorize(m: int) -> PrimePowerFactorization:
    """Exact prime-power decomposition by trial division."""
    if m < 2:
        raise InvalidInput(f"m={m} must be >= 2")
    comps = []
    rest = m
    d = 2
    while d * d <= rest:
        if rest % d == 0:
            e = 0
            while rest % d == 0:
                rest //= d
                e += 1
            comps.append((d, e, d ** e))
        d += 1
    if rest > 1:
        comps.append((rest, 1, rest))
    return PrimePowerFactorization(m=m, components=tuple(comps))


@dataclass(eq=False)
class EulerSquare:
    n: int
    k: int
    cells: np.ndarray  # shape (n, n, k), values 0..n-1
    provenance: str = ""

    def __post_init__(self):
        self.cells = np.asarray(self.cells, dtype=np.int64)
        if self.cells.shape != (self.n, self.n, self.k):
            raise InvalidInput(
                f"cells shape {self.cells.shape} != {(self.n, self.n, self.k)}")


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    message: str = "ok"
    location: tuple = ()


def mols_prime_power(F: GaloisField, k: int) -> EulerSquare:
    """Euler square of index (q, k) from GF(q).

    Cell (x, y) coordinate t is code(alpha_t * x + y) where alpha_t is
    the field element with code t; t runs over 1..k in code order.
    """
    q = F.q
    if not 1 <= k <= q - 1:
        raise DegreeTooLarge(f"degree k={k} must satisfy 1 <= k <= q-1={q - 1}")
    cells = np.empty((q, q, k), dtype=np.int64)
    ys = np.arange(q)
    for t in range(1, k + 1):
        cells[:, :, t - 1] = F.add_table[F.mul_table[t, :][:, None], ys[None, :]]
    return EulerSquare(n=q, k=k, cells=cells,
                       provenance=f"prime-power p={F.p} r={F.r}")


def reduce_degree(E: EulerSquare, k_new: int) -> EulerSquare:
    """Keep the first k_new coordinates of every cell."""
    if not 1 <= k_new <= E.k:
        raise DegreeTooLarge(f"k'={k_new} must satisfy 1 <= k' <= {E.k}")
    if k_new == E.k:
        return E
    return EulerSquare(n=E.n, k=k_new, cells=E.cells[:, :, :k_new].copy(),
                       provenance=f"reduced({E.provenance})")


def macneish_product(A: EulerSquare, B: EulerSquare) -> EulerSquare:
    """Direct product: index (n1*n2, k) from indices (n1, k) and (n2, k).

    Row (i1, i2) flattens to i1*n2 + i2 (0-based), likewise for columns;
    coordinate r value is A_r(i1, j1)*n2 + B_r(i2, j2).
    """
    if A.k != B.k:
        raise DegreeMismatch(f"degrees differ: {A.k} vs {B.k}")
    n1, n2, k = A.n, B.n, A.k
    prod = (A.cells[:, None, :, None, :] * n2 + B.cells[None, :, None, :, :])
    cells = prod.reshape(n1 * n2, n1 * n2, k)
    return EulerSquare(n=n1 * n2, k=k, cells=cells,
                       provenance=f"product({A.provenance} x {B.provenance})")


def euler_square(n: int, k: int) -> EulerSquare:
    """Build an Euler square of index (n, k) when the classical bound allows.

    Requires k <= minpp(n) - 1 where minpp(n) is the smallest prime-power
    component of n.  Each component square is built at full degree and
    reduced to k; components fold via the product in increasing-prime order.
    """
    if n < 3:
        raise InvalidOrder(f"order n={n} must be >= 3")
    if k < 1:
        raise InvalidInput(f"degree k={k} must be >= 1")
    fac = factorize(n)
    bound = fac.min_value - 1
    if k > bound:
        raise IndexNotConstructible(
            f"index ({n},{k}) not constructible: k exceeds minpp({n})-1 = {bound}")
    square = None
    for p, r, q in fac.components:
        F = build_field(p, r)
        comp = reduce_degree(mols_prime_power(F, q - 1), k)
        square = comp if square is None else macneish_product(square, comp)
    square.provenance = f"euler n={n} k={k}"
    return square


def validate_euler_square(E: EulerSquare) -> ValidationReport:
    """Exhaustive row-Latin, column-Latin and orthogonality check.

    Orthogonality is ordered-pair distinctness per coordinate pair.
    Reports the first violation found with its cell coordinates.
    """
    n, k, cells = E.n, E.k, E.cells
    if cells.min() < 0 or cells.max() >= n:
        loc = np.unravel_index(np.argmax((cells < 0) | (cells >= n)), cells.shape)
        return ValidationReport(False, "cell value out of range", tuple(int(v) for v in loc))
    expected = np.arange(n)
    for r in range(k):
        layer = cells[:, :, r]
        rows_ok = np.all(np.sort(layer, axis=1) == expected[None, :], axis=1)
        if not rows_ok.all():
            i = int(np.argmin(rows_ok))
            return ValidationReport(False, f"row-Latin violation in coordinate {r}",
                                    (i, -1, r))
        cols_ok = np.all(np.sort(layer, axis=0) == expected[:, None], axis=0)
        if not cols_ok.all():
            j = int(np.argmin(cols_ok))
            return ValidationReport(False, f"column-Latin violation in coordinate {r}",
                                    (-1, j, r))
    for r in range(k):
        for s in range(r + 1, k):
            codes = cells[:, :, r] * n + cells[:, :, s]
            flat = codes.ravel()
            if len(np.unique(flat)) != n * n:
                order = np.argsort(flat, kind="stable")
                dup = order[np.nonzero(np.diff(flat[order]) == 0)[0][0] + 1]
                i, j = divmod(int(dup), n)
                return ValidationReport(
                    False, f"orthogonality violation for coordinates ({r},{s})",
                    (i, j, r))
    return ValidationReport(True)


def to_text(E: EulerSquare) -> str:
    """Serialize: header 'n k', then n lines of n comma-joined k-tuples."""
    lines = [f"{E.n} {E.k}"]
    for i in range(E.n):
        lines.append(" ".join(",".join(str(int(v)) for v in E.cells[i, j])
                              for j in range(E.n)))
    return "\n".join(lines) + "\n"


def from_text(text: str) -> EulerSquare:
    lines = [ln for ln in text.strip().splitlines()]
    try:
        n, k = map(int, lines[0].split())
    except (ValueError, IndexError):
        raise ParseError("bad header, expected 'n k'", line=1)
    if len(lines) != n + 1:
        raise ParseError(f"expected {n} rows, found {len(lines) - 1}", line=len(lines))
    cells = np.zeros((n, n, k), dtype=np.int64)
    for i in range(n):
        parts = lines[i + 1].split()
        if len(parts) != n:
            raise ParseError(f"expected {n} cells in row {i + 1}", line=i + 2)
        for j, cell in enumerate(parts):
            vals = cell.split(",")
            if len(vals) != k:
                raise ParseError(f"expected {k} coordinates in cell", line=i + 2)
            cells[i, j] = [int(v) for v in vals]
    return EulerSquare(n=n, k=k, cells=cells, provenance="from-text")
