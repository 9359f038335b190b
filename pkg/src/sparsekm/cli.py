"""Command-line interface.

Subcommands: generate, cluster, tune, evaluate, experiment, sweep.
Structured results are JSON, tabular results CSV. Every command takes
--seed and is fully deterministic given it; --threads (or the
SPARSEKM_THREADS variable) only changes wall time, never output bytes.
Exit codes: 0 success, 1 usage, 2 data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
import warnings

import numpy as np

from . import __version__
from ._rng import spawn_seed
from .data import bcss_per_feature, read_csv_matrix, standardize, \
    write_csv_matrix
from .errors import DataError, SparsekmError, UsageError
from .gap import default_grid, gap_statistic
from .kmeans import KmeansConfig, run_kmeans
from .lab import sweep
from .metrics import cer, ecr, feature_counts
from .sparse import SparseKmeansConfig, sparse_kmeans
from .synth import MixtureSpec, experiment_spec, generate


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("SPARSEKM_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"SPARSEKM_THREADS={env!r} is not an integer")
    return 1


def _write_json(path, payload) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _manifest(path, args, started, outputs, warnings_seen=()) -> None:
    payload = {
        "command": args.command,
        "config": {k: v for k, v in sorted(vars(args).items())
                   if k not in ("command", "func") and v is not None},
        "seed": getattr(args, "seed", None),
        "version": __version__,
        "duration_s": round(time.monotonic() - started, 3),
        "outputs": [str(o) for o in outputs],
        "warnings": list(warnings_seen),
    }
    _write_json(path, payload)


def _experiment_from_args(args) -> MixtureSpec:
    return experiment_spec(args.experiment, mu=args.mu, p=args.p,
                           rho=args.rho, seed=args.seed)


def cmd_generate(args) -> int:
    started = time.monotonic()
    spec = _experiment_from_args(args)
    x, truth = generate(spec)
    csv_path = f"{args.out}.csv"
    truth_path = f"{args.out}.truth.json"
    write_csv_matrix(csv_path, x)
    _write_json(truth_path, {
        "labels": truth.labels.tolist(),
        "support": truth.support.tolist(),
        "spec": {"k": spec.k, "sizes": list(spec.sizes), "p": spec.p,
                 "p_star": spec.p_star, "rho": spec.rho, "seed": spec.seed,
                 "means": np.asarray(spec.means).tolist()},
    })
    _manifest(f"{args.out}.manifest.json", args, started,
              [csv_path, truth_path])
    return 0


def _inner_config(args, k) -> KmeansConfig:
    return KmeansConfig(k=k, restarts=args.restarts, seed=args.seed,
                        refine=args.refine)


def _load_input(args) -> np.ndarray:
    x = read_csv_matrix(args.input, header=args.header)
    if args.no_standardize:
        return x
    return standardize(x, allow_constant=True)


def _fit_payload(result, method, s) -> dict:
    return {
        "method": method,
        "s": s,
        "k": result.k,
        "assignments": result.labels.tolist(),
        "weights": result.weights.tolist(),
        "selected_features": result.selected_features.tolist(),
        "objective": result.objective,
        "outer_iters": result.outer_iters,
        "converged": result.converged,
        "bcss": result.bcss.tolist(),
    }


def cmd_cluster(args) -> int:
    started = time.monotonic()
    x = _load_input(args)
    if args.method == "kmeans":
        res = run_kmeans(x, np.ones(x.shape[1]), _inner_config(args, args.k))
        payload = {
            "method": "kmeans",
            "s": None,
            "k": args.k,
            "assignments": res.labels.tolist(),
            "weights": np.ones(x.shape[1]).tolist(),
            "selected_features": list(range(x.shape[1])),
            "objective": float(np.sum(bcss_per_feature(x, res.labels, args.k))),
            "outer_iters": 1,
            "converged": True,
            "bcss": bcss_per_feature(x, res.labels, args.k).tolist(),
        }
    else:
        if args.s is None:
            raise UsageError(f"--s is required for method {args.method}")
        cfg = SparseKmeansConfig(s=args.s, method=args.method,
                                 inner=_inner_config(args, args.k))
        result = sparse_kmeans(x, cfg)
        payload = _fit_payload(result, args.method, args.s)
    out = f"{args.out}.json"
    _write_json(out, payload)
    _manifest(f"{args.out}.manifest.json", args, started, [out])
    return 0


def _parse_grid(text, method, p):
    if text is None:
        return default_grid(method, p)
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"malformed grid {text!r}")
    if not values:
        raise UsageError("empty grid")
    return np.asarray(values)


def cmd_tune(args) -> int:
    started = time.monotonic()
    x = _load_input(args)
    grid = _parse_grid(args.grid, args.method, x.shape[1])
    caught = []
    with warnings.catch_warnings(record=True) as wlist:
        warnings.simplefilter("always")
        profile = gap_statistic(x, args.method, _inner_config(args, args.k),
                                grid=grid, b=args.permutations,
                                one_se=args.one_se, threads=_threads(args))
        caught = [str(w.message) for w in wlist]
    at = int(np.flatnonzero(profile.grid == profile.chosen_s)[0])
    if not np.isnan(profile.gap[at]) and \
            profile.gap[at] <= 2.0 * profile.se[at]:
        caught.append(f"gap profile is flat: best gap {profile.gap[at]:.4g} "
                      f"is within 2 standard errors of 0")
    csv_path = f"{args.out}.gap.csv"
    json_path = f"{args.out}.chosen.json"
    profile.to_csv(csv_path)
    _write_json(json_path, {"chosen_s": profile.chosen_s,
                            "method": args.method})
    outputs = [csv_path, json_path]
    if args.fit:
        cfg = SparseKmeansConfig(s=profile.chosen_s, method=args.method,
                                 inner=_inner_config(args, args.k))
        result = sparse_kmeans(x, cfg)
        fit_path = f"{args.out}.fit.json"
        _write_json(fit_path, _fit_payload(result, args.method,
                                           profile.chosen_s))
        outputs.append(fit_path)
    _manifest(f"{args.out}.manifest.json", args, started, outputs, caught)
    return 0


def _load_json(path, required_keys):
    try:
        with open(path) as fh:
            payload = json.load(fh)
    except OSError as exc:
        raise DataError(f"{path}: {exc.strerror or exc}")
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON: {exc}")
    for key in required_keys:
        if key not in payload:
            raise DataError(f"{path}: missing key {key!r}")
    return payload


def cmd_evaluate(args) -> int:
    started = time.monotonic()
    result = _load_json(args.result, ("assignments", "weights"))
    truth = _load_json(args.truth, ("labels", "support"))
    est = np.asarray(result["assignments"], dtype=int)
    tru = np.asarray(truth["labels"], dtype=int)
    w = np.asarray(result["weights"], dtype=float)
    support = np.asarray(truth["support"], dtype=int)
    counts = feature_counts(w, support)
    payload = {"cer": cer(est, tru), "ecr": ecr(est, tru),
               "nw": counts.nw, "pzw": counts.pzw, "pnw": counts.pnw}
    json_path = f"{args.out}.metrics.json"
    csv_path = f"{args.out}.metrics.csv"
    _write_json(json_path, payload)
    with open(csv_path, "w", newline="") as fh:
        fh.write("cer,ecr,nw,pzw,pnw\n")
        fh.write(f"{payload['cer']!r},{payload['ecr']!r},"
                 f"{counts.nw},{counts.pzw},{counts.pnw}\n")
    _manifest(f"{args.out}.manifest.json", args, started,
              [json_path, csv_path])
    return 0


def _experiment_cells(exp_id):
    if exp_id == "E1":
        return [("E1", {})]
    if exp_id == "E2":
        return [("E2", {"mu": mu, "p": p})
                for mu in (0.6, 0.7) for p in (200, 500, 1000)]
    if exp_id == "E3":
        return [("E3a", {}), ("E3b", {})]
    if exp_id == "E4":
        return [("E4", {"rho": rho}) for rho in (0.1, 0.3, 0.6)]
    raise UsageError(f"unknown experiment id {exp_id!r}")


def _cell_name(cell_id, params):
    if not params:
        return cell_id
    inner = ",".join(f"{k}={v:g}" for k, v in sorted(params.items()))
    return f"{cell_id}({inner})"


def run_experiment_cell(cell_id, params, reps, seed, restarts, tune_restarts,
                        b, threads):
    """All three methods on one benchmark cell, sparse ones gap-tuned.

    Returns a list of per-rep metric dicts.
    """
    records = []
    for rep in range(reps):
        rep_seed = spawn_seed(seed, rep)
        spec = experiment_spec(cell_id, seed=rep_seed, **params)
        x, truth = generate(spec)
        xs = standardize(x)
        k = spec.k
        rec = {"cell": _cell_name(cell_id, params), "rep": rep}
        km = run_kmeans(xs, np.ones(spec.p),
                        KmeansConfig(k=k, restarts=restarts, seed=rep_seed,
                                     refine="swap"))
        rec["cer_kmeans"] = cer(km.labels, truth.labels)
        rec["nw_kmeans"], rec["pzw_kmeans"], rec["pnw_kmeans"] = \
            feature_counts(np.ones(spec.p), truth.support)
        for method in ("l0", "l1"):
            # plain engine for the grid search, refined engine for the final
            # fit: tuning only needs objective rankings, not polished optima
            tune_inner = KmeansConfig(k=k, restarts=tune_restarts,
                                      seed=spawn_seed(rep_seed, 1))
            profile = gap_statistic(xs, method, tune_inner, b=b,
                                    threads=threads)
            fit_inner = KmeansConfig(k=k, restarts=restarts,
                                     seed=spawn_seed(rep_seed, 2), refine="swap")
            cfg = SparseKmeansConfig(s=profile.chosen_s, method=method,
                                     inner=fit_inner)
            result = sparse_kmeans(xs, cfg)
            counts = feature_counts(result.weights, truth.support)
            rec[f"s_{method}"] = profile.chosen_s
            rec[f"cer_{method}"] = cer(result.labels, truth.labels)
            rec[f"nw_{method}"] = counts.nw
            rec[f"pzw_{method}"] = counts.pzw
            rec[f"pnw_{method}"] = counts.pnw
        records.append(rec)
    return records


def _write_records_csv(path, records) -> None:
    names = sorted({name for rec in records for name in rec},
                   key=lambda s: (s not in ("cell", "rep"), s))
    with open(path, "w", newline="") as fh:
        fh.write(",".join(names) + "\n")
        for rec in records:
            fh.write(",".join("" if name not in rec else
                              (rec[name] if isinstance(rec[name], str)
                               else repr(rec[name]))
                              for name in names) + "\n")


def cmd_experiment(args) -> int:
    started = time.monotonic()
    os.makedirs(args.outdir, exist_ok=True)
    outputs = []
    all_records = []
    for cell_id, params in _experiment_cells(args.id):
        records = run_experiment_cell(cell_id, params, args.reps, args.seed,
                                      args.restarts, args.tune_restarts,
                                      args.permutations, _threads(args))
        all_records.extend(records)
        name = _cell_name(cell_id, params).replace("(", "_").replace(")", "") \
            .replace(",", "_").replace("=", "")
        cell_path = os.path.join(args.outdir, f"{name}.reps.csv")
        _write_records_csv(cell_path, records)
        outputs.append(cell_path)
    agg_path = os.path.join(args.outdir, "aggregate.csv")
    metric_names = sorted({name for rec in all_records
                           for name in rec if name not in ("cell", "rep")})
    cells = []
    for rec in all_records:
        if rec["cell"] not in cells:
            cells.append(rec["cell"])
    with open(agg_path, "w", newline="") as fh:
        fh.write("cell,metric,mean,sd,reps\n")
        for cell in cells:
            block = [rec for rec in all_records if rec["cell"] == cell]
            for name in metric_names:
                vals = np.array([rec[name] for rec in block if name in rec])
                if vals.size == 0:
                    continue
                sd = repr(float(vals.std(ddof=1))) if vals.size > 1 else ""
                fh.write(f"{cell},{name},{float(vals.mean())!r},{sd},{vals.size}\n")
    outputs.append(agg_path)
    long_path = os.path.join(args.outdir, "long.csv")
    with open(long_path, "w", newline="") as fh:
        fh.write("cell,rep,metric,value\n")
        for rec in all_records:
            for name in metric_names:
                if name in rec:
                    fh.write(f"{rec['cell']},{rec['rep']},{name},{rec[name]!r}\n")
    outputs.append(long_path)
    _manifest(os.path.join(args.outdir, "manifest.json"), args, started,
              outputs)
    return 0


def cmd_sweep(args) -> int:
    started = time.monotonic()
    n_list = [int(v) for v in args.n_list.split(",") if v.strip()]
    if not n_list:
        raise UsageError("empty --n-list")
    mu = args.mu if args.mu is not None else 0.7
    p = args.p if args.p is not None else 500
    p_star = args.p_star if args.p_star is not None else 50
    means = np.array([[mu] * p_star, [-mu] * p_star, [0.0] * p_star])
    base = MixtureSpec(k=3, sizes=(1, 1, 1), p=p, p_star=p_star, means=means,
                       rho=0.0, seed=args.seed)
    report = sweep(base, n_list, args.trials)
    csv_path = f"{args.out}.sweep.csv"
    json_path = f"{args.out}.sweep.json"
    report.to_csv(csv_path)
    report.to_json(json_path)
    _manifest(f"{args.out}.manifest.json", args, started,
              [csv_path, json_path])
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="sparsekm",
                     description="sparse k-means clustering toolkit")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, seed=True):
        if seed:
            sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--threads", type=int, default=None)

    sp = sub.add_parser("generate", help="draw a synthetic benchmark dataset")
    sp.add_argument("--experiment", required=True,
                    choices=["E1", "E2", "E3a", "E3b", "E4"])
    sp.add_argument("--mu", type=float, default=None)
    sp.add_argument("--p", type=int, default=None)
    sp.add_argument("--rho", type=float, default=None)
    sp.add_argument("--out", required=True)
    common(sp)
    sp.set_defaults(func=cmd_generate)

    sp = sub.add_parser("cluster", help="fit kmeans, l0, or l1 on a CSV")
    sp.add_argument("--input", required=True)
    sp.add_argument("--method", required=True, choices=["kmeans", "l0", "l1"])
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--s", type=float, default=None)
    sp.add_argument("--restarts", type=int, default=10)
    sp.add_argument("--refine", choices=["none", "swap"], default="none")
    sp.add_argument("--header", action="store_true")
    sp.add_argument("--no-standardize", action="store_true")
    sp.add_argument("--out", required=True)
    common(sp)
    sp.set_defaults(func=cmd_cluster)

    sp = sub.add_parser("tune", help="choose s by the gap statistic")
    sp.add_argument("--input", required=True)
    sp.add_argument("--method", required=True, choices=["l0", "l1"])
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--grid", default=None,
                    help="comma-separated s values (default: built-in grid)")
    sp.add_argument("--permutations", type=int, default=10)
    sp.add_argument("--one-se", action="store_true")
    sp.add_argument("--restarts", type=int, default=10)
    sp.add_argument("--refine", choices=["none", "swap"], default="none")
    sp.add_argument("--header", action="store_true")
    sp.add_argument("--no-standardize", action="store_true")
    sp.add_argument("--fit", action="store_true",
                    help="also fit at the chosen s")
    sp.add_argument("--out", required=True)
    common(sp)
    sp.set_defaults(func=cmd_tune)

    sp = sub.add_parser("evaluate", help="score a result against its truth")
    sp.add_argument("--result", required=True)
    sp.add_argument("--truth", required=True)
    sp.add_argument("--out", required=True)
    common(sp, seed=False)
    sp.set_defaults(func=cmd_evaluate)

    sp = sub.add_parser("experiment",
                        help="run a full benchmark with all methods")
    sp.add_argument("--id", required=True, choices=["E1", "E2", "E3", "E4"])
    sp.add_argument("--reps", type=int, default=20)
    sp.add_argument("--restarts", type=int, default=20)
    sp.add_argument("--tune-restarts", type=int, default=5)
    sp.add_argument("--permutations", type=int, default=10)
    sp.add_argument("--outdir", required=True)
    common(sp)
    sp.set_defaults(func=cmd_experiment)

    sp = sub.add_parser("sweep", help="trial frequencies across n")
    sp.add_argument("--theorem", choices=["T2", "T3", "T4"], default="T3",
                    help="which trend the report is read for (same data)")
    sp.add_argument("--mu", type=float, default=None)
    sp.add_argument("--p", type=int, default=None)
    sp.add_argument("--p-star", type=int, default=None)
    sp.add_argument("--n-list", default="30,60,120")
    sp.add_argument("--trials", type=int, default=50)
    sp.add_argument("--out", required=True)
    common(sp)
    sp.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except SparsekmError as exc:
        print(f"sparsekm: error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
