"""Command-line interface: ``sparsedtm <subcommand> ...``."""
from __future__ import annotations

import argparse
import inspect
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import io
from .datasets import GENERATORS, add_gaussian_noise
from .diagrams import bottleneck, log_bottleneck, snr
from .dtm import dP_eval, dtm_eval, dtm_weights, witness_barycenters, witnessed_kdistance_eval
from .filtration import Filtration, format_short
from .pipeline import (
    MODES,
    ExperimentConfig,
    PipelineError,
    build_mode,
    load_space,
    parse_snr_pairs,
    run_pipeline,
    sweep_sizes,
)
from .persistence import reduce
from .sparse_rips import filtration_stats

DEFAULT_SWEEP = tuple(round(0.1 * i, 1) for i in range(1, 10))


def _data_flags(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", help="point CSV, or matrix CSV with --metric matrix")
    src.add_argument("--generator", choices=sorted(GENERATORS), help="built-in dataset")
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                   help="generator parameter, repeatable (e.g. n=2000)")
    p.add_argument("--metric", choices=("l2", "l1", "matrix"), default="l2")
    p.add_argument("--noise", type=float, default=0.0, help="gaussian noise standard deviation")
    p.add_argument("--seed", type=int, default=0, help="random seed for generators and noise")


def _mass_flags(p: argparse.ArgumentParser, required: bool = False) -> None:
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--mass", type=float, help="mass fraction m in (0, 1]")
    g.add_argument("--k", type=float, help="neighbour count k = m n (may be fractional)")


def _filtration_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mode", choices=MODES, default="weighted-rips")
    p.add_argument("--epsilon", type=float, default=0.5)
    p.add_argument("--alpha-max", type=float, default=math.inf)
    p.add_argument("--greedy-seed", type=int, default=None, help="first point of the greedy permutation")
    p.add_argument("--grid-spacing", type=float, default=0.05)


def _parse_params(items):
    out = {}
    for item in items:
        key, _, val = item.partition("=")
        if not _:
            raise SystemExit(f"bad --param {item!r}, expected KEY=VALUE")
        key = key.replace("-", "_")
        if val.lower() in ("true", "false"):
            out[key] = val.lower() == "true"
        else:
            num = float(val)
            out[key] = int(num) if num.is_integer() and "." not in val else num
    return out


def _config(args, **extra) -> ExperimentConfig:
    fields = dict(
        input=args.input,
        generator=args.generator,
        gen_params=_parse_params(args.param),
        metric=args.metric,
        noise=args.noise,
        seed=args.seed,
        mass=getattr(args, "mass", None),
        k=getattr(args, "k", None),
        epsilon=getattr(args, "epsilon", 0.5),
        alpha_max=getattr(args, "alpha_max", math.inf),
        greedy_seed=getattr(args, "greedy_seed", None),
        grid_spacing=getattr(args, "grid_spacing", 0.05),
        out=args.out,
    )
    fields.update(extra)
    return ExperimentConfig(**fields)


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_gen(args) -> int:
    params = _parse_params(args.param)
    gen = GENERATORS[args.generator]
    if "seed" in inspect.signature(gen).parameters:
        params.setdefault("seed", args.seed)
    X = gen(**params)
    if args.noise > 0:
        X = add_gaussian_noise(X, args.noise, args.seed)
    path = _outdir(args) / "points.csv"
    io.write_points(path, X)
    print(f"wrote {len(X)} points to {path}")
    return 0


def cmd_dtm(args) -> int:
    cfg = _config(args, modes=())
    cfg.validate()
    M = load_space(cfg)
    mass = cfg.mass_param
    ids = np.arange(len(M))
    queries = io.read_points(args.queries) if args.queries else None
    W = dtm_weights(M, ids, mass)
    witnesses = None
    if M.is_euclidean and args.witnessed:
        witnesses = witness_barycenters(M, ids, mass)
    header = "query,dtm,dP" + (",dW" if witnesses is not None else "")
    lines = [header]
    targets = range(len(M)) if queries is None else queries
    for i, x in enumerate(targets):
        x = int(x) if queries is None else x
        row = [dtm_eval(M, ids, mass, x), dP_eval(M, ids, mass, x, weights=W)]
        if witnesses is not None:
            row.append(witnessed_kdistance_eval(M, ids, mass, x, witnesses=witnesses))
        lines.append(f"{i}," + ",".join(format_short(v) for v in row))
    path = _outdir(args) / "dtm.csv"
    path.write_text("\n".join(lines) + "\n")
    print(f"wrote {len(lines) - 1} rows to {path}")
    return 0


def cmd_filtration(args) -> int:
    # here --max-dim is the top simplex dimension
    if args.max_dim < 0:
        raise SystemExit("--max-dim must be >= 0")
    cfg = _config(args, modes=(args.mode,))
    cfg.validate()
    M = load_space(cfg)
    W = dtm_weights(M, np.arange(len(M)), cfg.mass_param) if (cfg.mass or cfg.k) else None
    t0 = time.perf_counter()
    F = build_mode(cfg, M, args.mode, W, top=args.max_dim)
    ms = (time.perf_counter() - t0) * 1e3
    out = _outdir(args)
    (out / f"filtration_{args.mode}.txt").write_text(F.to_text())
    eps = args.epsilon if args.mode.startswith("sparse") else None
    stats = filtration_stats(F, args.mode, eps, len(M), ms)
    io.write_json(out / f"stats_{args.mode}.json", stats)
    print(f"{args.mode}: simplices per dimension {stats['simplices_per_dim']}")
    return 0


def cmd_persist(args) -> int:
    F = Filtration.from_text(Path(args.input).read_text())
    D = reduce(F, args.max_dim, keep_zero=args.keep_zero)
    name = Path(args.input).stem.replace("filtration_", "")
    path = _outdir(args) / f"diagram_{name}.csv"
    io.write_diagram(path, D)
    print(f"wrote {len(D)} points to {path}")
    return 0


def cmd_compare(args) -> int:
    names = [Path(p).stem.replace("diagram_", "") for p in args.diagrams]
    dgms = [io.read_diagram(p) for p in args.diagrams]
    f = log_bottleneck if args.log else bottleneck
    mat = np.zeros((len(dgms), len(dgms)))
    for i in range(len(dgms)):
        for j in range(i + 1, len(dgms)):
            mat[i, j] = mat[j, i] = f(dgms[i], dgms[j], args.dim)
    key = "log_bottleneck" if args.log else "bottleneck"
    path = _outdir(args) / f"{key}_dim{args.dim}.csv"
    io.write_named_matrix(path, names, mat)
    print(path.read_text(), end="")
    return 0


def cmd_snr(args) -> int:
    lines = ["diagram,dim,j,snr"]
    for p in args.diagrams:
        D = io.read_diagram(p)
        for dim, j in parse_snr_pairs(args.pairs):
            lines.append(f"{Path(p).stem},{dim},{j},{format_short(snr(D, dim, j))}")
    text = "\n".join(lines) + "\n"
    (_outdir(args) / "snr.csv").write_text(text)
    print(text, end="")
    return 0


def cmd_sweep(args) -> int:
    cfg = _config(
        args,
        modes=("sparse-rips",),
        sweep=tuple(args.epsilons),
        sweep_max_dim=args.max_dim,
        timings=not args.no_timings,
    )
    cfg.validate()
    records = sweep_sizes(cfg, load_space(cfg))
    io.write_json(_outdir(args) / "sizes_vs_epsilon.json", records)
    for r in records:
        print(f"eps={r['epsilon']:.2f} sizes={r['simplices_per_dim']}")
    return 0


def cmd_run(args) -> int:
    cfg = _config(
        args,
        modes=tuple(args.modes),
        max_dim=args.max_dim,
        snr_pairs=parse_snr_pairs(args.snr),
        sweep=tuple(args.sweep or ()),
        timings=not args.no_timings,
        save_filtrations=args.save_filtrations,
    )
    result = run_pipeline(cfg)
    for r in result["snr"]:
        ref = "" if r["reference"] is None else f" (reference {format_short(r['reference'])})"
        print(f"{r['mode']} dim {r['dim']} j={r['j']}: snr {format_short(r['snr'])}{ref}")
    print(f"outputs in {cfg.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sparsedtm", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a built-in dataset as a point CSV")
    p.add_argument("--generator", choices=sorted(GENERATORS), required=True)
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("dtm", help="distance to measure, power distance and witnessed k-distance")
    _data_flags(p)
    _mass_flags(p, required=True)
    p.add_argument("--queries", help="point CSV of query locations (default: the sample itself)")
    p.add_argument("--witnessed", action="store_true", help="also evaluate the witnessed k-distance")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_dtm)

    p = sub.add_parser("filtration", help="build one filtration and write it as text")
    _data_flags(p)
    _mass_flags(p)
    _filtration_flags(p)
    p.add_argument("--max-dim", type=int, default=2, help="top simplex dimension")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_filtration)

    p = sub.add_parser("persist", help="persistence diagram of a filtration text file")
    p.add_argument("--input", required=True, help="filtration text file")
    p.add_argument("--max-dim", type=int, default=None, help="top homology dimension")
    p.add_argument("--keep-zero", action="store_true", help="keep zero-length pairs")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_persist)

    p = sub.add_parser("compare", help="bottleneck matrix between diagram CSV files")
    p.add_argument("diagrams", nargs="+")
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--log", action="store_true", help="log-scale bottleneck")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("snr", help="signal-to-noise ratios of diagram CSV files")
    p.add_argument("diagrams", nargs="+")
    p.add_argument("--pairs", nargs="+", default=["1:1"], metavar="DIM:J")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_snr)

    p = sub.add_parser("sweep", help="sparse filtration size for a range of epsilon")
    _data_flags(p)
    p.add_argument("--epsilons", type=float, nargs="+", default=list(DEFAULT_SWEEP))
    p.add_argument("--max-dim", type=int, default=2, help="top simplex dimension")
    p.add_argument("--greedy-seed", type=int, default=None)
    p.add_argument("--no-timings", action="store_true", help="write null build times for byte-stable output")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("run", help="full pipeline over several modes")
    _data_flags(p)
    _mass_flags(p)
    _filtration_flags(p)
    p.add_argument("--modes", nargs="+", choices=MODES, default=["weighted-rips"])
    p.add_argument("--max-dim", type=int, default=1, help="top homology dimension")
    p.add_argument("--snr", nargs="*", default=[], metavar="DIM:J")
    p.add_argument("--sweep", type=float, nargs="*", help="epsilon values for a size sweep")
    p.add_argument("--no-timings", action="store_true")
    p.add_argument("--save-filtrations", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_run)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (PipelineError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
