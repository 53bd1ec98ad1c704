"""Command-line interface: ``quadfeat {map,approx-error,walltime,bound,selftest}``.

Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from quadfeat import analysis
from quadfeat.bench import (
    METHODS,
    ConfigError,
    ExperimentConfig,
    load_config_dataset,
    make_mapper,
    run_experiment,
    sr_blocks_for,
    walltime_mapping,
)
from quadfeat.data import DatasetError, load_dataset
from quadfeat.kernels import parse_kernel
from quadfeat.quadrature import feature_dim

METHOD_ALIASES = {"sr33": "sr33-butterfly"}


class UsageError(Exception):
    pass


def _method(name: str) -> str:
    name = METHOD_ALIASES.get(name, name)
    if name not in METHODS:
        raise UsageError(f"unknown method {name!r}; choose from sr33, {', '.join(METHODS)}")
    return name


def _resolve_D(method: str, d: int, n, dim) -> int:
    if (n is None) == (dim is None):
        raise UsageError("give exactly one of --n and --dim")
    if n is not None:
        if n < 1:
            raise UsageError("--n must be positive")
        return feature_dim(n, d)
    if method.startswith("sr33"):
        try:
            sr_blocks_for(dim, d)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    return dim


def cmd_map(args) -> int:
    method = _method(args.method)
    data = load_dataset(args.input, args.format, standardize=args.standardize, label_column=args.label_column)
    try:
        kernel = parse_kernel(args.kernel, data.d)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    D = _resolve_D(method, data.d, args.n, args.dim)
    mapper = make_mapper(method, kernel, data.d, D, args.seed)
    padded = getattr(mapper, "padded_dim", data.d)
    Phi = mapper.transform(data.X)
    header = f"method={method} kernel={kernel} seed={args.seed} d={data.d} padded_dim={padded} D={D}"
    with open(args.output, "w") as fh:
        fh.write(f"# {header}\n")
        np.savetxt(fh, Phi, fmt="%.17g", delimiter=",")
    print(f"wrote {Phi.shape[0]} x {D} features to {args.output} ({header})")
    return 0


def cmd_approx_error(args) -> int:
    try:
        raw = json.loads(Path(args.config).read_text())
    except json.JSONDecodeError as exc:
        raise UsageError(f"{args.config}: malformed JSON ({exc})") from None
    cfg = ExperimentConfig.from_dict(raw)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if cfg.dataset is None:
        raise ConfigError("dataset: missing")
    print(f"seed: {cfg.seed}")
    data = load_config_dataset(cfg.dataset, Path(args.config).parent)
    report = run_experiment(cfg, data)
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.csv").write_text(report.to_csv(include_timing=False))
    (out / "report.json").write_text(report.to_json(include_timing=False))
    (out / "timings.csv").write_text(report.to_csv(include_timing=True))
    for (_, kern, meth, n), cell in report.summary().items():
        print(f"{kern:>16} {meth:>15} n={n:<3} D={cell['D']:<6} error={cell['mean']:.6f} +- {cell['ci95']:.6f}")
    return 0


def cmd_walltime(args) -> int:
    method = _method(args.method)
    D = _resolve_D(method, args.d, args.n, args.dim)
    try:
        kernel = parse_kernel(args.kernel, args.d)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    stats = walltime_mapping(method, args.d, D, args.batch, args.repeats, args.seed, kernel)
    result = {
        "method": method,
        "kernel": str(kernel),
        "seed": args.seed,
        "d": args.d,
        "D": D,
        "batch": args.batch,
        "repeats": args.repeats,
        "timing": {"median": stats.median, "mean": stats.mean},
    }
    print(f"method={method} d={args.d} D={D} batch={args.batch} repeats={args.repeats}")
    print(f"median={stats.median:.6e}s mean={stats.mean:.6e}s")
    if args.output:
        Path(args.output).write_text(json.dumps(result, indent=2) + "\n")
    return 0


def cmd_bound(args) -> int:
    try:
        b = analysis.BoundInputs(
            d=args.d, eps=args.eps, delta=args.delta, l=args.l, sigma_p=args.sigma_p,
            kappa=args.kappa, mu=args.mu, M=args.M, lambda0=args.lambda0, sigma_y=args.sigma_y,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    print(f"beta_d: {analysis.beta_d(b.d):.6f}")
    if args.prop == "variance":
        if b.d <= 2:
            raise UsageError("variance bound needs --d > 2")
        print(f"variance_bound: {analysis.variance_bound_sr33(b.d, args.n, b.kappa):.12g}")
        return 0
    fn = {
        "3.1-quad": analysis.required_D_quadrature,
        "3.1-rff": analysis.required_D_rff,
        "krr": analysis.required_D_krr,
    }[args.prop]
    res = fn(b)
    print(f"D: {res.D}")
    print(f"vacuous: {str(res.vacuous).lower()}")
    print(f"bracket: {res.bracket:.12g}")
    if args.prop in ("3.1-quad", "3.1-rff"):
        rbf = analysis.with_rbf_constants(b)
        quad, rff = analysis.required_D_quadrature(rbf), analysis.required_D_rff(rbf)
        print(f"quad_le_rff: {str(quad.D <= rff.D).lower()} (rbf constants: quad={quad.D} rff={rff.D})")
    return 0


def cmd_selftest(args) -> int:
    from quadfeat.selftest import run_selftest

    results = run_selftest(args.seed)
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    failed = sum(not ok for _, ok, _ in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quadfeat", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("map", help="export mapped features of a dataset")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=("csv", "libsvm"), default="csv")
    p.add_argument("--kernel", default="gaussian", help="gaussian[:gamma], arccos0 or arccos1")
    p.add_argument("--method", default="sr33")
    size = p.add_mutually_exclusive_group()
    size.add_argument("--n", type=int, help="number of SR blocks; D = 2n(d+1)+1")
    size.add_argument("--dim", type=int, help="output dimension D")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True)
    p.add_argument("--standardize", action="store_true")
    p.add_argument("--label-column", type=int)
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("approx-error", help="run a kernel-approximation experiment")
    p.add_argument("--config", required=True)
    p.add_argument("--output-dir", default="report")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.set_defaults(func=cmd_approx_error)

    p = sub.add_parser("walltime", help="time the explicit mapping step")
    p.add_argument("--method", default="sr33")
    p.add_argument("--kernel", default="gaussian")
    p.add_argument("--d", type=int, required=True)
    size = p.add_mutually_exclusive_group()
    size.add_argument("--n", type=int)
    size.add_argument("--dim", type=int)
    p.add_argument("--batch", type=int, default=100)
    p.add_argument("--repeats", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output")
    p.set_defaults(func=cmd_walltime)

    p = sub.add_parser("bound", help="evaluate a feature-count or variance bound")
    p.add_argument("--prop", required=True, choices=("3.1-quad", "3.1-rff", "krr", "variance"))
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--l", type=float, default=1.0, help="diameter of the input set")
    p.add_argument("--sigma-p", type=float, default=1.0)
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--M", type=float, default=0.5)
    p.add_argument("--lambda0", type=float, default=1.0)
    p.add_argument("--sigma-y", type=float, default=1.0)
    p.add_argument("--n", type=int, default=1, help="number of SR samples (variance bound)")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("selftest", help="fast invariant checks")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command != "approx-error":
        print(f"seed: {args.seed}")
    try:
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"quadfeat {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (DatasetError, OSError, ValueError, ArithmeticError, RuntimeError) as exc:
        print(f"quadfeat {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
