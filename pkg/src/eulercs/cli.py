"""Command-line front end.

Subcommands: gen, verify, bench (sweep|phase|recon), recover,
cbir (index|query|score).  Machine-readable output goes to stdout /
output files, human summaries to stderr.  Every output artifact gets a
sibling <out>.manifest.json recording the invocation, so reruns are
reproducible byte for byte.

Exit codes: 0 success, 1 invariant/verification failure, 2 usage error,
3 construction infeasible.
"""

import argparse
import json
import os
import sys
import time

import numpy as np

from . import __version__, construct, experiments, imaging, props
from .errors import (EulerCSError, HadamardUnavailable, IndexNotConstructible,
                     IndexTooSmall, InvalidInput, InvalidOrder, NothingToExtend,
                     ParseError, UnsupportedRowSize)
from .euler import euler_square, validate_euler_square

_INFEASIBLE = (IndexNotConstructible, UnsupportedRowSize, NothingToExtend,
               HadamardUnavailable, IndexTooSmall, InvalidOrder)


def _write_manifest(out_path, subcommand, args, seed, inputs, outputs, wall):
    manifest = {
        "subcommand": subcommand,
        "flags": {k: v for k, v in sorted(vars(args).items())
                  if k != "func" and v is not None},
        "master_seed": seed,
        "tool_version": __version__,
        "inputs": inputs,
        "outputs": outputs,
        "wall_clock": wall,
    }
    with open(out_path + ".manifest.json", "w") as f:
        json.dump(manifest, f, sort_keys=True, indent=2)
        f.write("\n")


def _parse_int_pair(text, what, count=2):
    parts = text.split(",")
    if len(parts) != count:
        raise InvalidInput(f"{what} expects {count} comma-separated integers")
    return tuple(int(p) for p in parts)


# ---------------------------------------------------------------------------
# gen

def cmd_gen(args):
    t0 = time.perf_counter()
    if args.index:
        n, k = _parse_int_pair(args.index, "--index")
        mat = construct.build_binary_matrix(euler_square(n, k))
    elif args.rows:
        mat = construct.build_for_row_size(args.rows)
    elif args.extend:
        mat, _plan = construct.build_extended(args.extend)
    else:
        p, i, j = _parse_int_pair(args.ternary, "--ternary", 3)
        mat = construct.build_ternary(p, i, j)
    if args.format == "esm":
        construct.save_esm(mat, args.out)
    else:
        construct.save_csv(mat, args.out)
    _write_manifest(args.out, "gen", args, None, [], [args.out],
                    time.perf_counter() - t0)
    print(f"wrote {mat.m}x{mat.M} {mat.alphabet} matrix to {args.out}",
          file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------
# verify

def _rebuild_from_provenance(provenance):
    tokens = provenance.split()
    fields = dict(tok.split("=") for tok in tokens if "=" in tok)
    if tokens and tokens[0] == "euler":
        return construct.build_binary_matrix(
            euler_square(int(fields["n"]), int(fields["k"])))
    if tokens and tokens[0] == "rows":
        return construct.build_for_row_size(int(fields["m"]))
    if tokens and tokens[0] == "extended":
        return construct.build_extended(int(fields["n"]))[0]
    if tokens and tokens[0] == "ternary":
        return construct.build_ternary(int(fields["p"]), int(fields["i"]),
                                       int(fields["j"]))
    return None


def cmd_verify(args):
    mat = construct.load_esm(args.matrix)
    report = props.coherence(mat)
    sys.stdout.write(report.to_text())
    failures = []
    if any(tag in mat.provenance.split()[:1]
           for tag in ("euler", "rows", "extended", "ternary")):
        if report.max_overlap > 1:
            failures.append(f"max column overlap {report.max_overlap} exceeds 1")
        rebuilt = None
        try:
            rebuilt = _rebuild_from_provenance(mat.provenance)
        except EulerCSError:
            pass
        if rebuilt is not None:
            if not (np.array_equal(rebuilt.rows, mat.rows)
                    and np.array_equal(rebuilt.vals, mat.vals)):
                failures.append("matrix does not match its provenance rebuild")
            elif mat.provenance.split()[0] == "euler":
                fields = dict(tok.split("=") for tok in mat.provenance.split()
                              if "=" in tok)
                square = euler_square(int(fields["n"]), int(fields["k"]))
                val = validate_euler_square(square)
                if not val.ok:
                    failures.append(f"euler square validation: {val.message}")
    if failures:
        for msg in failures:
            print(f"FAIL: {msg}", file=sys.stderr)
        return 1
    print("verification passed", file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------
# bench

def _sweep_matrix_spec(args):
    if args.index:
        n, k = _parse_int_pair(args.index, "--index")
        return experiments.MatrixSpec(family="euler", n=n, k=k)
    if args.rows:
        return experiments.MatrixSpec(family="rows", row_size=args.rows)
    if args.family in ("gaussian", "bernoulli"):
        if args.m is None or args.M is None:
            raise InvalidInput("--family gaussian/bernoulli needs --m and --M")
        return experiments.MatrixSpec(family=args.family, m=args.m, M=args.M,
                                      seed=args.seed)
    raise InvalidInput("select a matrix: --index, --rows, or --family with --m/--M")


def _emit_report(report, out, args, seed, inputs, extra_outputs=()):
    outputs = list(extra_outputs)
    with open(out + ".json", "w") as f:
        f.write(report.to_json())
    with open(out + ".csv", "w") as f:
        f.write(report.to_csv())
    outputs += [out + ".json", out + ".csv"]
    _write_manifest(out, "bench", args, seed, inputs, outputs, report.wall_clock)
    print(f"report written to {out}.json / {out}.csv "
          f"({report.wall_clock:.2f}s)", file=sys.stderr)


def cmd_bench_sweep(args):
    spec = _sweep_matrix_spec(args)
    levels = (tuple(int(v) for v in args.levels.split(","))
              if args.levels else tuple(range(1, args.kmax + 1)))
    cfg = experiments.SweepConfig(matrix=spec, sparsity_levels=levels,
                                  trials=args.trials,
                                  threshold_db=args.threshold,
                                  solver=args.solver, master_seed=args.seed)
    report = experiments.run_sweep(cfg)
    _emit_report(report, args.out, args, args.seed, [])
    return 0


def cmd_bench_phase(args):
    row_sizes = [int(v) for v in args.rows.split(",")]
    report = experiments.run_phase_transition(
        args.M, row_sizes, fraction=args.fraction, trials=args.trials,
        solver=args.solver, master_seed=args.seed, family=args.family)
    _emit_report(report, args.out, args, args.seed, [])
    return 0


def cmd_bench_recon(args):
    image = imaging.read_pgm(args.image)
    P = args.patch
    if args.family == "euler":
        if args.rows % P:
            raise IndexNotConstructible(
                f"row size {args.rows} is not a multiple of patch edge {P} "
                f"(need an index ({P}, m/{P}) square)")
        A = construct.build_binary_matrix(
            euler_square(P, args.rows // P)).to_dense().astype(float)
    else:
        A = experiments.make_matrix(experiments.MatrixSpec(
            family=args.family, m=args.rows, M=P * P, seed=args.seed))
    recon, report = experiments.run_patch_reconstruction(
        image, A, P, levels=args.levels, solver=args.solver)
    imaging.write_pgm(recon, args.out + ".pgm")
    _emit_report(report, args.out, args, args.seed, [args.image],
                 [args.out + ".pgm"])
    return 0


# ---------------------------------------------------------------------------
# recover

def cmd_recover(args):
    mat = construct.load_esm(args.matrix)
    y = np.loadtxt(args.y, delimiter=",").ravel()
    K = args.k if args.k is not None else mat.m // 2
    A = mat.to_dense().astype(float)
    result = experiments._solve(A, y, K, args.solver)
    np.savetxt(args.out, result.estimate[None, :], delimiter=",")
    _write_manifest(args.out, "recover", args, None, [args.matrix, args.y],
                    [args.out], 0.0)
    print(f"support={sorted(result.support)} residual={result.residual_norm:.3e}",
          file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------
# cbir

def _scan_images(directory):
    entries = []
    for name in sorted(os.listdir(directory)):
        if name.endswith(".pgm"):
            label = name.split("_")[0]
            entries.append((os.path.splitext(name)[0], label,
                            os.path.join(directory, name)))
    return entries


def cmd_cbir_index(args):
    t0 = time.perf_counter()
    P = args.patch
    if args.rows % P:
        raise IndexNotConstructible(
            f"row size {args.rows} is not a multiple of patch edge {P}")
    mat = construct.build_binary_matrix(euler_square(P, args.rows // P))
    entries = _scan_images(args.images)
    if not entries:
        raise InvalidInput(f"no .pgm images found in {args.images}")
    feats = []
    for _, _, path in entries:
        feats.append(imaging.extract_features(imaging.read_pgm(path), mat, P,
                                              args.levels))
    db = imaging.FeatureDB(ids=[e[0] for e in entries],
                           labels=[e[1] for e in entries],
                           paths=[e[2] for e in entries],
                           features=np.stack(feats), patch=P,
                           levels=args.levels if args.levels is not None else -1,
                           matrix_provenance=mat.provenance)
    imaging.save_feature_db(db, args.out)
    construct.save_esm(mat, os.path.join(args.out, "matrix.esm"))
    _write_manifest(os.path.join(args.out, "db"), "cbir-index", args, None,
                    [args.images], [args.out], time.perf_counter() - t0)
    print(f"indexed {len(entries)} images into {args.out}", file=sys.stderr)
    return 0


def _db_and_matrix(db_dir):
    db = imaging.load_feature_db(db_dir)
    mat = construct.load_esm(os.path.join(db_dir, "matrix.esm"))
    levels = None if db.levels < 0 else db.levels
    return db, mat, levels


def cmd_cbir_query(args):
    db, mat, levels = _db_and_matrix(args.db)
    feat = imaging.extract_features(imaging.read_pgm(args.image), mat, db.patch,
                                    levels)
    for rank, (ident, label, sim) in enumerate(
            imaging.retrieve(feat, db, args.topn), start=1):
        print(f"{rank}\t{ident}\t{label}\t{sim:.6f}")
    return 0


def cmd_cbir_score(args):
    db, mat, levels = _db_and_matrix(args.db)
    queries = _scan_images(args.queries)
    if not queries:
        raise InvalidInput(f"no .pgm query images found in {args.queries}")
    rankings, query_labels = [], []
    for ident, label, path in queries:
        feat = imaging.extract_features(imaging.read_pgm(path), mat, db.patch,
                                        levels)
        ranked = imaging.retrieve(feat, db, args.topn)
        rankings.append([r[0] for r in ranked])
        query_labels.append((ident, label))
    metrics = imaging.score_retrieval(rankings, query_labels,
                                      dict(zip(db.ids, db.labels)), args.topn)
    print(f"precision={metrics.precision!r}")
    print(f"recall={metrics.recall!r}")
    print("classes=" + ",".join(metrics.classes))
    for row_label, row in zip(metrics.classes, metrics.confusion_matrix()):
        print(f"confusion[{row_label}]=" + ",".join(str(int(v)) for v in row))
    return 0


# ---------------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(prog="eulercs")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="construct a sensing matrix")
    sel = gen.add_mutually_exclusive_group(required=True)
    sel.add_argument("--index", help="n,k Euler-square index")
    sel.add_argument("--rows", type=int, help="target row size m")
    sel.add_argument("--extend", type=int, help="column-extended matrix for order n")
    sel.add_argument("--ternary", help="p,i,j ternary expansion parameters")
    gen.add_argument("--out", required=True)
    gen.add_argument("--format", choices=["esm", "csv"], default="esm")
    gen.set_defaults(func=cmd_gen)

    ver = sub.add_parser("verify", help="verify a matrix file")
    ver.add_argument("matrix")
    ver.set_defaults(func=cmd_verify)

    bench = sub.add_parser("bench", help="run an experiment")
    bsub = bench.add_subparsers(dest="bench_command", required=True)

    sweep = bsub.add_parser("sweep")
    sweep.add_argument("--index")
    sweep.add_argument("--rows", type=int)
    sweep.add_argument("--family", choices=["gaussian", "bernoulli"])
    sweep.add_argument("--m", type=int)
    sweep.add_argument("--M", type=int)
    sweep.add_argument("--kmax", type=int, default=10)
    sweep.add_argument("--levels", help="explicit comma-separated sparsity levels")
    sweep.add_argument("--trials", type=int, default=1000)
    sweep.add_argument("--threshold", type=float, default=100.0)
    sweep.add_argument("--solver", choices=["omp", "bp"], default="omp")
    sweep.add_argument("--seed", type=int, default=0)
    sweep.add_argument("--out", required=True)
    sweep.set_defaults(func=cmd_bench_sweep)

    phase = bsub.add_parser("phase")
    phase.add_argument("--M", type=int, required=True)
    phase.add_argument("--rows", required=True, help="comma-separated row sizes")
    phase.add_argument("--fraction", type=float, default=0.9)
    phase.add_argument("--trials", type=int, default=1000)
    phase.add_argument("--solver", choices=["omp", "bp"], default="omp")
    phase.add_argument("--family", default="euler",
                       choices=["euler", "gaussian", "bernoulli"])
    phase.add_argument("--seed", type=int, default=0)
    phase.add_argument("--out", required=True)
    phase.set_defaults(func=cmd_bench_phase)

    recon = bsub.add_parser("recon")
    recon.add_argument("--image", required=True)
    recon.add_argument("--rows", type=int, required=True)
    recon.add_argument("--patch", type=int, default=32)
    recon.add_argument("--levels", type=int)
    recon.add_argument("--family", default="euler",
                       choices=["euler", "gaussian", "bernoulli"])
    recon.add_argument("--solver", choices=["omp", "bp"], default="omp")
    recon.add_argument("--seed", type=int, default=0)
    recon.add_argument("--out", required=True)
    recon.set_defaults(func=cmd_bench_recon)

    rec = sub.add_parser("recover", help="recover a signal from measurements")
    rec.add_argument("--matrix", required=True)
    rec.add_argument("--y", required=True, help="CSV measurement vector")
    rec.add_argument("--k", type=int)
    rec.add_argument("--solver", choices=["omp", "bp"], default="omp")
    rec.add_argument("--out", required=True)
    rec.set_defaults(func=cmd_recover)

    cbir = sub.add_parser("cbir", help="content-based retrieval pipeline")
    csub = cbir.add_subparsers(dest="cbir_command", required=True)

    idx = csub.add_parser("index")
    idx.add_argument("--images", required=True)
    idx.add_argument("--rows", type=int, required=True)
    idx.add_argument("--patch", type=int, default=32)
    idx.add_argument("--levels", type=int)
    idx.add_argument("--out", required=True)
    idx.set_defaults(func=cmd_cbir_index)

    qry = csub.add_parser("query")
    qry.add_argument("--db", required=True)
    qry.add_argument("--image", required=True)
    qry.add_argument("--topn", type=int, default=10)
    qry.set_defaults(func=cmd_cbir_query)

    score = csub.add_parser("score")
    score.add_argument("--db", required=True)
    score.add_argument("--queries", required=True)
    score.add_argument("--topn", type=int, default=10)
    score.set_defaults(func=cmd_cbir_score)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _INFEASIBLE as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (InvalidInput,) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ParseError, EulerCSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
