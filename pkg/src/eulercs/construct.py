"""Sensing matrix constructions.

Binary matrices from Euler squares (one column per k-ad, k ones per
column), general-row-size dispatch, column extension by zero-padded
blocks, Hadamard matrices (Sylvester / Paley-I), and the ternary
expansion that replaces each 1 in a binary column with a Hadamard row.

Matrices are stored sparsely: per column, the sorted row indices of the
nonzeros and their values (all +1 for binary, +-1 for ternary).
"""

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import (DegenerateColumn, HadamardUnavailable, IndexTooSmall,
                     InvalidInput, NothingToExtend, ParseError,
                     UnsupportedRowSize)
from .euler import EulerSquare, euler_square, factorize
from .fields import is_prime


@dataclass(eq=False)
class SensingMatrix:
    m: int
    M: int
    alphabet: str        # "binary" or "ternary"
    k: int               # nonzeros per column
    rows: np.ndarray     # (M, k) 0-based row indices, ascending per column
    vals: np.ndarray     # (M, k) entry values at those rows
    provenance: str = ""

    def __post_init__(self):
        self.rows = np.asarray(self.rows, dtype=np.int64)
        self.vals = np.asarray(self.vals, dtype=np.int64)
        if self.rows.shape != (self.M, self.k) or self.vals.shape != (self.M, self.k):
            raise InvalidInput("support arrays must have shape (M, k)")

    def to_sparse(self) -> sp.csc_matrix:
        indptr = np.arange(0, (self.M + 1) * self.k, self.k)
        return sp.csc_matrix(
            (self.vals.ravel().astype(np.float64), self.rows.ravel(), indptr),
            shape=(self.m, self.M))

    def to_dense(self) -> np.ndarray:
        return np.asarray(self.to_sparse().todense())

    @property
    def density(self) -> float:
        return (self.M * self.k) / (self.m * self.M)


def build_binary_matrix(E: EulerSquare) -> SensingMatrix:
    """nk x n^2 binary matrix: one column per k-ad, in row-major cell order.

    Column c (0-based) comes from cell (c // n, c % n); its ones sit at
    rows l*n + a_l for l = 0..k-1 where a is the cell's k-tuple.
    """
    n, k = E.n, E.k
    if k < 2 or n < 3:
        raise IndexTooSmall(f"need k >= 2 and n >= 3, got ({n},{k})")
    ads = E.cells.reshape(n * n, k)
    rows = np.arange(k)[None, :] * n + ads
    vals = np.ones_like(rows)
    return SensingMatrix(m=n * k, M=n * n, alphabet="binary", k=k,
                         rows=rows, vals=vals, provenance=E.provenance)


def build_for_row_size(m: int) -> SensingMatrix:
    """Binary matrix with exactly m rows, for m neither prime nor p^2.

    m = p^i with i >= 3 uses the index (p^{i-1}, p) square; otherwise the
    smallest prime-power component q gives the index (m/q, q) square.
    Either way the coherence comes out to sqrt(M)/m.
    """
    if m < 6:
        raise UnsupportedRowSize(f"row size {m} is below the smallest constructible (6)")
    if is_prime(m):
        raise UnsupportedRowSize(f"row size {m} is prime")
    fac = factorize(m)
    if len(fac.components) == 1:
        p, i, _ = fac.components[0]
        if i == 2:
            raise UnsupportedRowSize(f"row size {m} is the square of prime {p}")
        E = euler_square(p ** (i - 1), p)
    else:
        q = fac.min_value
        E = euler_square(m // q, q)
    mat = build_binary_matrix(E)
    mat.provenance = f"rows m={m} via {E.provenance}"
    return mat


@dataclass(frozen=True)
class ExtensionStage:
    k_t: int            # prime-power peeled at this stage
    n_t: int            # order of this stage's component square
    copies: int         # k ** t zero-padded copies
    cols: int           # copies * n_t ** 2
    offsets: tuple      # row offset of each copy


@dataclass(eq=False)
class ExtensionPlan:
    n: int
    k: int
    stages: list = field(default_factory=list)

    @property
    def total_cols(self) -> int:
        return self.n ** 2 + sum(s.cols for s in self.stages)


def build_extended(n: int):
    """Column-extended matrix [Phi0 Psi1 ... Psil] for composite n.

    Stage t peels the largest remaining prime-power k_t, builds the
    index (n_t, k) matrix and places k^t zero-padded copies, one per row
    offset; offsets recurse as o + s*n_{t-1} for s = 0..k-1.  Every
    column keeps exactly k ones and pairwise overlap stays <= 1.

    Returns (SensingMatrix, ExtensionPlan).
    """
    fac = factorize(n)
    if len(fac.components) < 2:
        raise NothingToExtend(f"n={n} is a single prime power; nothing to extend")
    k = fac.min_value - 1
    if k < 2:
        raise IndexTooSmall(f"n={n} gives degree k={k} < 2")
    base = build_binary_matrix(euler_square(n, k))
    all_rows = [base.rows]
    all_vals = [base.vals]

    plan = ExtensionPlan(n=n, k=k)
    remaining = sorted(fac.values)   # peel from the largest end
    offsets = [0]
    n_prev = n
    t = 0
    while len(remaining) > 1:
        t += 1
        k_t = remaining.pop()
        n_t = n_prev // k_t
        phi_t = build_binary_matrix(euler_square(n_t, k))
        offsets = [o + s * n_prev for o in offsets for s in range(k)]
        for o in offsets:
            all_rows.append(phi_t.rows + o)
            all_vals.append(phi_t.vals)
        plan.stages.append(ExtensionStage(
            k_t=k_t, n_t=n_t, copies=k ** t,
            cols=(k ** t) * n_t * n_t, offsets=tuple(offsets)))
        n_prev = n_t

    rows = np.concatenate(all_rows, axis=0)
    vals = np.concatenate(all_vals, axis=0)
    mat = SensingMatrix(m=n * k, M=rows.shape[0], alphabet="binary", k=k,
                        rows=rows, vals=vals,
                        provenance=f"extended n={n} k={k} stages={len(plan.stages)}")
    return mat, plan


@dataclass(eq=False)
class HadamardMatrix:
    order: int
    entries: np.ndarray  # (order, order), values +-1


def _paley_core(q: int) -> np.ndarray:
    """Paley-I Hadamard matrix of order q+1 for prime q = 3 mod 4."""
    chi = np.zeros(q, dtype=np.int64)
    residues = {(x * x) % q for x in range(1, q)}
    for v in range(1, q):
        chi[v] = 1 if v in residues else -1
    idx = np.arange(q)
    Q = chi[(idx[:, None] - idx[None, :]) % q]
    S = np.zeros((q + 1, q + 1), dtype=np.int64)
    S[0, 1:] = 1
    S[1:, 0] = -1
    S[1:, 1:] = Q
    return S + np.eye(q + 1, dtype=np.int64)


def build_hadamard(h: int) -> HadamardMatrix:
    """Hadamard matrix by Sylvester doubling and/or a Paley-I core."""
    if h == 1:
        return HadamardMatrix(1, np.array([[1]], dtype=np.int64))
    if h == 2:
        return HadamardMatrix(2, np.array([[1, 1], [1, -1]], dtype=np.int64))
    if h % 4 != 0:
        raise HadamardUnavailable(f"order {h} must be 1, 2, or a multiple of 4")
    if h & (h - 1) == 0:
        H = np.array([[1]], dtype=np.int64)
        while H.shape[0] < h:
            H = np.block([[H, H], [H, -H]])
        return HadamardMatrix(h, H)
    # Sylvester doubling of a Paley-I core: h = 2^a * (q + 1)
    a = 0
    rest = h
    while rest % 2 == 0:
        q = rest - 1
        if is_prime(q) and q % 4 == 3:
            H = _paley_core(q)
            for _ in range(a):
                H = np.block([[H, H], [H, -H]])
            return HadamardMatrix(h, H)
        a += 1
        rest //= 2
    raise HadamardUnavailable(
        f"order {h} is not reachable by Sylvester/Paley-I composition")


def build_ternary(p: int, i: int = 1, j: int = 1) -> SensingMatrix:
    """Ternary expansion of the index (p^i, p^i - j) binary matrix.

    Each binary column spawns k = p^i - j ternary columns sharing its
    support: the row holding the l-th one receives H[l][t] in the t-th
    spawned column.  If only a (k+1)-order Hadamard exists, its first k
    rows and columns are used.  Result: p^i*k x p^{2i}*k with entries 0, +-1.
    """
    if j not in (1, 2):
        raise InvalidInput(f"j={j} must be 1 or 2")
    n = p ** i
    k = n - j
    if k < 2:
        raise IndexTooSmall(f"degree k={k} must be >= 2")
    try:
        H = build_hadamard(k).entries
        h_used = k
    except HadamardUnavailable:
        H = build_hadamard(k + 1).entries[:k, :k]
        h_used = k + 1
    phi = build_binary_matrix(euler_square(n, k))
    # column order: all k spawned columns of phi column 0, then column 1, ...
    rows = np.repeat(phi.rows, k, axis=0)
    vals = np.tile(H.T, (phi.M, 1))
    return SensingMatrix(m=phi.m, M=phi.M * k, alphabet="ternary", k=k,
                         rows=rows, vals=vals,
                         provenance=f"ternary p={p} i={i} j={j} hadamard={h_used}")


def normalize(mat: SensingMatrix) -> np.ndarray:
    """Dense real view with every column scaled to unit Euclidean norm."""
    if mat.k < 1:
        raise DegenerateColumn("zero column cannot be normalized")
    return mat.to_dense() / math.sqrt(mat.k)


# ---------------------------------------------------------------------------
# file format: "ESM v1" text header + one support line per column

def save_esm(mat: SensingMatrix, path: str) -> None:
    with open(path, "w") as f:
        f.write(f"ESM v1 rows={mat.m} cols={mat.M} alphabet={mat.alphabet} k={mat.k}\n")
        f.write(f"{mat.provenance or 'unknown'}\n")
        for c in range(mat.M):
            if mat.alphabet == "binary":
                f.write(" ".join(str(int(r) + 1) for r in mat.rows[c]) + "\n")
            else:
                f.write(" ".join(f"{int(r) + 1}:{int(v)}"
                                 for r, v in zip(mat.rows[c], mat.vals[c])) + "\n")


def load_esm(path: str) -> SensingMatrix:
    with open(path) as f:
        lines = f.read().splitlines()
    if not lines or not lines[0].startswith("ESM v1 "):
        raise ParseError("missing 'ESM v1' header", line=1)
    try:
        fields = dict(tok.split("=") for tok in lines[0].split()[2:])
        m, M, k = int(fields["rows"]), int(fields["cols"]), int(fields["k"])
        alphabet = fields["alphabet"]
    except (KeyError, ValueError):
        raise ParseError("malformed header fields", line=1)
    if alphabet not in ("binary", "ternary"):
        raise ParseError(f"unknown alphabet {alphabet!r}", line=1)
    if len(lines) < 2 + M:
        raise ParseError(f"expected {M} column lines", line=len(lines))
    provenance = lines[1]
    rows = np.zeros((M, k), dtype=np.int64)
    vals = np.ones((M, k), dtype=np.int64)
    for c in range(M):
        parts = lines[2 + c].split()
        if len(parts) != k:
            raise ParseError(f"column {c + 1} has {len(parts)} entries, expected {k}",
                             line=3 + c)
        for l, tok in enumerate(parts):
            try:
                if alphabet == "ternary":
                    r, v = tok.split(":")
                    rows[c, l] = int(r) - 1
                    vals[c, l] = int(v)
                else:
                    rows[c, l] = int(tok) - 1
            except ValueError:
                raise ParseError(f"bad support token {tok!r}", line=3 + c)
        if rows[c].min() < 0 or rows[c].max() >= m:
            raise ParseError(f"row index out of range in column {c + 1}", line=3 + c)
        if np.any(np.diff(rows[c]) <= 0):
            raise ParseError(f"rows not strictly ascending in column {c + 1}",
                             line=3 + c)
    return SensingMatrix(m=m, M=M, alphabet=alphabet, k=k, rows=rows, vals=vals,
                         provenance=provenance)


def save_csv(mat: SensingMatrix, path: str) -> None:
    """Dense CSV export for interoperability."""
    np.savetxt(path, mat.to_dense(), fmt="%d", delimiter=",")
