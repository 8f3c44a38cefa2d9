"""Exact coherence verification and bound computation.

The coherence check is exhaustive: the full Gram matrix over all
column pairs is formed (sparsely for the constructed matrices), so the
1/k bound and the sqrt(M)/m identity become machine-checked facts
rather than quoted theory.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.sparse as sp

from .construct import SensingMatrix
from .errors import (BoundUndefined, DegenerateColumn, InvalidInput,
                     ProvenanceRequired)


@dataclass(frozen=True)
class CoherenceReport:
    m: int
    M: int
    coherence: float
    argmax_pair: tuple          # (i, j) 0-based column indices
    max_overlap: int            # max |<phi_i, phi_j>| before normalization
    welch: float                # Welch bound, nan when M <= m
    density: float
    column_weight_hist: dict    # weight -> count

    def to_text(self) -> str:
        lines = [
            f"rows={self.m}",
            f"cols={self.M}",
            f"coherence={self.coherence!r}",
            f"argmax_pair={self.argmax_pair[0]},{self.argmax_pair[1]}",
            f"max_overlap={self.max_overlap}",
            f"welch={self.welch!r}",
            f"density={self.density!r}",
            "weights=" + ";".join(f"{w}:{c}" for w, c in sorted(self.column_weight_hist.items())),
        ]
        return "\n".join(lines) + "\n"

    def to_record(self) -> dict:
        return {
            "m": self.m, "M": self.M, "coherence": self.coherence,
            "argmax_pair": list(self.argmax_pair), "max_overlap": self.max_overlap,
            "welch": self.welch, "density": self.density,
            "column_weight_hist": {str(k): v for k, v in sorted(self.column_weight_hist.items())},
        }


def gram_extrema(A: sp.spmatrix):
    """(max |off-diagonal Gram entry|, argmax pair, diagonal) of A^T A."""
    G = (A.T @ A).tocoo()
    diag = np.zeros(A.shape[1])
    mask = G.row != G.col
    off_abs = np.abs(G.data[mask])
    diag_mask = ~mask
    diag[G.row[diag_mask]] = G.data[diag_mask]
    if off_abs.size == 0:
        return 0.0, (0, 0), diag
    pos = int(np.argmax(off_abs))
    r = G.row[mask][pos]
    c = G.col[mask][pos]
    return float(off_abs[pos]), (int(min(r, c)), int(max(r, c))), diag


def coherence(mat: SensingMatrix) -> CoherenceReport:
    """Exhaustive coherence of a constructed matrix over all M(M-1)/2 pairs."""
    if mat.M < 2:
        raise InvalidInput("need at least 2 columns")
    A = mat.to_sparse()
    max_off, pair, diag = gram_extrema(A)
    if np.any(diag == 0):
        raise DegenerateColumn("matrix has a zero column")
    # uniform column weight: every diagonal entry is k, so mu = max_off / k
    mu = max_off / float(mat.k)
    welch = welch_bound(mat.m, mat.M) if mat.M > mat.m else float("nan")
    weights = {int(mat.k): mat.M}
    return CoherenceReport(m=mat.m, M=mat.M, coherence=mu, argmax_pair=pair,
                           max_overlap=int(round(max_off)), welch=welch,
                           density=mat.density, column_weight_hist=weights)


def dense_coherence(A: np.ndarray) -> float:
    """Coherence of a dense matrix (used for the random baselines)."""
    norms = np.linalg.norm(A, axis=0)
    if np.any(norms == 0):
        raise DegenerateColumn("matrix has a zero column")
    G = (A / norms).T @ (A / norms)
    np.fill_diagonal(G, 0.0)
    return float(np.max(np.abs(G)))


def welch_bound(m: int, M: int) -> float:
    if M <= m:
        raise BoundUndefined(f"Welch bound needs M > m, got M={M}, m={m}")
    if m < 1:
        raise BoundUndefined(f"m={m} must be >= 1")
    return math.sqrt((M - m) / (m * (M - 1)))


def max_binary_columns(m: int, k: int, r: int) -> int:
    """floor(C(m, r) / C(k, r)): cap on the column count of any binary
    matrix with m rows, k ones per column and pairwise overlap < r."""
    if not m >= k >= r >= 1:
        raise InvalidInput(f"need m >= k >= r >= 1, got ({m},{k},{r})")
    return math.comb(m, r) // math.comb(k, r)


def rip_delta(mu, k_prime: int):
    """Coherence-based restricted-isometry constant (k'-1) * mu."""
    if k_prime < 1:
        raise InvalidInput(f"k'={k_prime} must be >= 1")
    return (k_prime - 1) * mu


def sparsity_guarantee(mu):
    """Largest integer k with k < (1 + 1/mu) / 2; inf when mu == 0."""
    if mu < 0:
        raise InvalidInput(f"mu={mu} must be non-negative")
    if mu == 0:
        return math.inf
    if isinstance(mu, Fraction):
        bound = (1 + 1 / mu) / 2
        k = bound.numerator // bound.denominator
        return k - 1 if k == bound else k
    bound = (1 + 1 / mu) / 2
    k = math.floor(bound)
    return k - 1 if k == bound else k


def aspect_constant(mat: SensingMatrix, report: CoherenceReport = None) -> float:
    """c = M / (m*mu)^2 with measured coherence; c in [1,2) for the
    Euler-square constructions."""
    if not mat.provenance:
        raise ProvenanceRequired("aspect constant requires construction provenance")
    rep = report or coherence(mat)
    return mat.M / (mat.m * rep.coherence) ** 2
