"""Experiment harness: success-rate sweeps, phase transition, patch recon.

Every trial draws its signal from a substream keyed by (master seed,
level, trial index), so a report is fully determined by its config.
Reports carry raw success counts next to percentages so statistical
re-tests do not have to re-run the solver.

ES_THREADS caps the worker count for per-level trial parallelism;
results are order-stable regardless of the thread count.
"""

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from . import recovery
from .construct import (SensingMatrix, build_binary_matrix, build_extended,
                        build_for_row_size, build_ternary)
from .errors import ConvergenceFailure, InvalidInput, ShapeError
from .euler import euler_square
from .imaging import haar_forward, haar_inverse, patchify, unpatchify

REPORT_VERSION = "1"


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("ES_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class MatrixSpec:
    """One matrix source: a deterministic construction or a seeded draw."""
    family: str                 # euler | rows | extended | ternary | gaussian | bernoulli
    n: int = None
    k: int = None
    row_size: int = None        # for family == "rows"
    m: int = None               # explicit shape for random families
    M: int = None
    p: int = None               # ternary parameters
    i: int = None
    j: int = None
    seed: int = None


def make_matrix(spec: MatrixSpec) -> np.ndarray:
    """Dense float measurement matrix for a MatrixSpec."""
    if spec.family == "euler":
        return build_binary_matrix(euler_square(spec.n, spec.k)).to_dense().astype(float)
    if spec.family == "rows":
        return build_for_row_size(spec.row_size).to_dense().astype(float)
    if spec.family == "extended":
        return build_extended(spec.n)[0].to_dense().astype(float)
    if spec.family == "ternary":
        return build_ternary(spec.p, spec.i, spec.j).to_dense().astype(float)
    if spec.family == "gaussian":
        return recovery.gen_gaussian_matrix(spec.m, spec.M, spec.seed)
    if spec.family == "bernoulli":
        return recovery.gen_bernoulli_matrix(spec.m, spec.M, spec.seed)
    raise InvalidInput(f"unknown matrix family {spec.family!r}")


@dataclass
class SweepConfig:
    matrix: MatrixSpec
    sparsity_levels: tuple
    trials: int = 1000
    threshold_db: float = 100.0
    solver: str = "omp"
    master_seed: int = 0

    def __post_init__(self):
        if self.trials < 1:
            raise InvalidInput("trials must be >= 1")
        if self.threshold_db <= 0:
            raise InvalidInput("threshold must be positive")


@dataclass(eq=False)
class ExperimentReport:
    kind: str
    config: dict
    rows: list
    version: str = REPORT_VERSION
    wall_clock: float = 0.0     # informational; excluded from the canonical record

    def to_json(self) -> str:
        record = {"version": self.version, "kind": self.kind,
                  "config": self.config, "rows": self.rows}
        return json.dumps(record, sort_keys=True, indent=2) + "\n"

    def to_csv(self) -> str:
        if not self.rows:
            return ""
        keys = list(self.rows[0].keys())
        lines = [",".join(keys)]
        for row in self.rows:
            lines.append(",".join(repr(row[key]) if isinstance(row[key], float)
                                  else str(row[key]) for key in keys))
        return "\n".join(lines) + "\n"


def _solve(A, y, k, solver):
    if solver == "omp":
        return recovery.omp(A, y, K=k, tol=1e-12)
    if solver == "bp":
        try:
            return recovery.basis_pursuit(A, y)
        except ConvergenceFailure as exc:
            return exc.result
    raise InvalidInput(f"unknown solver {solver!r}")


def _run_trial(A, M, k, solver, threshold_db, seed):
    signal = recovery.gen_sparse_signal(M, k, seed)
    x = signal.to_dense()
    y = A @ x
    result = _solve(A, y, k, solver)
    return recovery.snr(x, result.estimate) >= threshold_db


def run_sweep(cfg: SweepConfig) -> ExperimentReport:
    """Success percentage per sparsity level (SNR >= threshold counts)."""
    t0 = time.perf_counter()
    A = make_matrix(cfg.matrix)
    m, M = A.shape
    rows = []
    threads = worker_count()
    for level in cfg.sparsity_levels:
        if not 1 <= level <= m:
            raise InvalidInput(f"sparsity level {level} outside 1..{m}")
        seeds = [(cfg.master_seed, level, t) for t in range(cfg.trials)]
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                outcomes = list(pool.map(
                    lambda s: _run_trial(A, M, level, cfg.solver, cfg.threshold_db, s),
                    seeds))
        else:
            outcomes = [_run_trial(A, M, level, cfg.solver, cfg.threshold_db, s)
                        for s in seeds]
        successes = sum(outcomes)
        rows.append({"k": int(level), "successes": int(successes),
                     "trials": cfg.trials,
                     "success_pct": 100.0 * successes / cfg.trials})
    report = ExperimentReport(kind="sweep",
                              config={"matrix": asdict(cfg.matrix),
                                      "sparsity_levels": list(cfg.sparsity_levels),
                                      "trials": cfg.trials,
                                      "threshold_db": cfg.threshold_db,
                                      "solver": cfg.solver,
                                      "master_seed": cfg.master_seed},
                              rows=rows)
    report.wall_clock = time.perf_counter() - t0
    return report


def _level_reaches_fraction(A, M, k, solver, threshold_db, fraction, trials, seeds):
    """Exact early-exit decision: would the full trial set reach the fraction?"""
    need = math.ceil(fraction * trials)
    allowed_failures = trials - need
    successes = failures = 0
    for seed in seeds:
        if _run_trial(A, M, k, solver, threshold_db, seed):
            successes += 1
            if successes >= need:
                return True
        else:
            failures += 1
            if failures > allowed_failures:
                return False
    return successes >= need


def run_phase_transition(M: int, row_sizes, fraction: float = 0.9,
                         trials: int = 1000, solver: str = "omp",
                         master_seed: int = 0, family: str = "euler",
                         threshold_db: float = 100.0) -> ExperimentReport:
    """Largest sparsity reaching the success fraction, per row size.

    Emits one (m/M, k/M) point per row size.  For the "euler" family
    the matrix for row size m is the index (sqrt(M), m/sqrt(M)) one.
    """
    t0 = time.perf_counter()
    rows = []
    for m in row_sizes:
        if family == "euler":
            n = math.isqrt(M)
            if n * n != M:
                raise InvalidInput(f"M={M} is not a square")
            if m % n:
                raise InvalidInput(f"row size {m} is not a multiple of n={n}")
            A = make_matrix(MatrixSpec(family="euler", n=n, k=m // n))
        elif family in ("gaussian", "bernoulli"):
            A = make_matrix(MatrixSpec(family=family, m=m, M=M,
                                       seed=(master_seed, m)))
        else:
            raise InvalidInput(f"unsupported family {family!r} for phase transition")
        k_star = 0
        k = 1
        while k <= m:
            seeds = [(master_seed, m, k, t) for t in range(trials)]
            if _level_reaches_fraction(A, M, k, solver, threshold_db,
                                       fraction, trials, seeds):
                k_star = k
                k += 1
            else:
                break
        rows.append({"m": int(m), "delta": m / M,
                     "k_star": int(k_star), "k_frac": k_star / M})
    report = ExperimentReport(kind="phase",
                              config={"M": M, "row_sizes": list(row_sizes),
                                      "fraction": fraction, "trials": trials,
                                      "solver": solver, "family": family,
                                      "threshold_db": threshold_db,
                                      "master_seed": master_seed},
                              rows=rows)
    report.wall_clock = time.perf_counter() - t0
    return report


def run_patch_reconstruction(image: np.ndarray, Phi, patch: int,
                             levels: int = None, solver: str = "omp",
                             max_atoms: int = None):
    """Compress every patch through Phi and reconstruct it back.

    Per patch: Haar-transform, measure y = Phi @ w, recover w by the
    chosen solver, inverse-transform, reassemble.  Returns the
    reconstructed image and a report with the whole-image SNR and the
    down-sampling factor M/m.
    """
    t0 = time.perf_counter()
    A = Phi.to_dense().astype(float) if isinstance(Phi, SensingMatrix) else np.asarray(Phi, float)
    m, M = A.shape
    if M != patch * patch:
        raise ShapeError(f"matrix has {M} columns, patch {patch} needs {patch * patch}")
    grid, patches = patchify(image, patch)
    K = max_atoms if max_atoms is not None else m // 2
    recon_patches = []
    for p in patches:
        w = haar_forward(p, levels)
        y = A @ w
        result = _solve(A, y, K, solver)
        recon_patches.append(haar_inverse(result.estimate, levels))
    recon = unpatchify(grid, np.stack(recon_patches))
    snr_db = recovery.snr(np.asarray(image, float).ravel(), recon.ravel())
    report = ExperimentReport(
        kind="recon",
        config={"patch": patch, "levels": levels, "solver": solver,
                "m": int(m), "M": int(M), "max_atoms": K},
        rows=[{"snr_db": snr_db, "downsampling_factor": M / m,
               "patches": grid.num_patches}])
    report.wall_clock = time.perf_counter() - t0
    return recon, report
