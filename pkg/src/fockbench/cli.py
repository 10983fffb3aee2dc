"""Command-line front end.

Exit codes: 0 success, 1 internal or numerical failure, 2 usage or
validation error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import io
from .experiment import (
    LAB_NOISE_PARAMS,
    NOISE_KNOBS,
    ExperimentParams,
    evaluate_many,
    measure_result,
    run_pipeline,
)
from .fock import fidelity
from .measures import WignerGrid, non_classicality, non_gaussianity, wigner_grid
from .tomography import (
    DEFAULT_BINS,
    IllConditionedError,
    QuadratureDataset,
    TomoConfig,
    maxlik_reconstruct,
    sample_quadratures,
)

EXIT_OK, EXIT_FAILURE, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _fmt(value: float) -> str:
    return f"{value:.12g}"


def _params_from_args(args, **override) -> ExperimentParams:
    values = dict(alpha=args.alpha, r=args.r, gamma=args.gamma, xi=args.xi, eta=args.eta,
                  dim=args.dim)
    values.update(override)
    try:
        return ExperimentParams(**values)
    except ValueError as exc:
        name = str(exc).split()[0]
        raise UsageError(f"--{name}: {exc}") from None


def _summary(row) -> str:
    return (f"delta_nats={_fmt(row.delta_nats)} nu={_fmt(row.nu)} "
            f"click_weight={_fmt(row.click_weight)}")


def cmd_simulate(args) -> int:
    params = _params_from_args(args)
    result = run_pipeline(params)
    rho = result.rho_out
    io.save_state(args.out, rho)
    io.write_manifest(args.out, "simulate",
                      dict(alpha=args.alpha, r=args.r, gamma=args.gamma, xi=args.xi,
                           eta=args.eta, dim=params.signal_dim,
                           mode_dims=list(params.mode_dims())),
                      formats={"state": io.STATE_FORMAT})
    print(_summary(measure_result(result)))
    return EXIT_OK


def _frange(start, stop, step):
    n = int(round((stop - start) / step))
    return [round(start + k * step, 10) for k in range(n + 1)]


def _parse_values(text: str, flag: str) -> list[float]:
    """``0.1,0.2`` or ``start:stop:step`` (inclusive)."""
    try:
        if ":" in text:
            start, stop, step = (float(v) for v in text.split(":"))
            if step <= 0 or stop < start:
                raise ValueError
            return _frange(start, stop, step)
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"--{flag}: malformed value list {text!r}") from None


def sweep_points(preset: str, args=None) -> list[ExperimentParams]:
    """Parameter points of a sweep preset, in output row order."""
    if preset == "fig2":
        return [ExperimentParams(alpha=a, r=r)
                for r in (1e-4, 0.15, 0.30, 0.45) for a in _frange(0.0, 1.5, 0.05)]
    if preset == "fig4":
        base = ExperimentParams(alpha=0.5, r=0.15)
        return [base.replace(**{knob: v})
                for knob in NOISE_KNOBS for v in _frange(0.0, 1.0, 0.025)]
    if preset == "fig5":
        return [ExperimentParams(alpha=a, **LAB_NOISE_PARAMS) for a in _frange(0.5, 1.5, 0.05)]
    if preset == "custom":
        axes = {}
        for name in ("alpha", "r", "gamma", "xi", "eta"):
            raw = getattr(args, name)
            axes[name] = _parse_values(str(raw), name)
            if not axes[name]:
                raise UsageError(f"--{name}: empty value list")
        points = []
        for a in axes["alpha"]:
            for r in axes["r"]:
                for g in axes["gamma"]:
                    for xi in axes["xi"]:
                        for eta in axes["eta"]:
                            points.append(dict(alpha=a, r=r, gamma=g, xi=xi, eta=eta))
        try:
            return [ExperimentParams(dim=args.dim, **p) for p in points]
        except ValueError as exc:
            raise UsageError(f"--{str(exc).split()[0]}: {exc}") from None
    raise UsageError(f"unknown preset {preset!r}")


def cmd_sweep(args) -> int:
    points = sweep_points(args.preset, args)
    rows = evaluate_many(points, with_nu=True, jobs=args.jobs)
    io.write_sweep_csv(args.out, rows)
    params = {"preset": args.preset, "points": len(points),
              "dim": "auto: 20 for |alpha|<=1, 25 for |alpha|<=1.5"
              if args.dim is None else args.dim}
    if args.preset == "custom":
        params.update({k: str(getattr(args, k)) for k in ("alpha", "r", "gamma", "xi", "eta")})
    io.write_manifest(args.out, "sweep", params, formats={"sweep": io.SWEEP_FORMAT})
    print(f"wrote {len(rows)} rows to {args.out}")
    if len(rows) == 1:
        print(_summary(rows[0]))
    return EXIT_OK


def _load_state(path) -> np.ndarray:
    try:
        return io.load_state(path)
    except FileNotFoundError:
        raise UsageError(f"no such state file: {path}") from None


def _grid_from_args(args) -> WignerGrid | None:
    given = [args.grid_min, args.grid_max, args.grid_step]
    if all(v is None for v in given):
        return None
    if any(v is None for v in given):
        raise UsageError("--grid-min, --grid-max and --grid-step go together")
    if args.grid_step <= 0 or args.grid_max <= args.grid_min:
        raise UsageError("--grid-step must be > 0 and --grid-max > --grid-min")
    bounds = (args.grid_min, args.grid_max)
    return WignerGrid(bounds, bounds, args.grid_step)


def cmd_measure(args) -> int:
    rho = _load_state(args.state)
    grid = _grid_from_args(args)
    if args.which == "delta":
        print(_fmt(non_gaussianity(rho)))
    elif args.which == "nu":
        try:
            print(_fmt(non_classicality(rho, grid)))
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    else:
        if grid is None:
            raise UsageError("wigner-grid needs --grid-min, --grid-max and --grid-step")
        if args.out is None:
            raise UsageError("wigner-grid needs --out")
        grid = wigner_grid(rho, grid.x_range, grid.p_range, grid.step)
        io.write_wigner_csv(args.out, grid)
        io.write_manifest(args.out, "measure wigner-grid",
                          {"state": str(args.state), "grid_min": args.grid_min,
                           "grid_max": args.grid_max, "grid_step": args.grid_step})
        print(f"riemann_sum={_fmt(grid.riemann_sum())}")
    return EXIT_OK


def _sample(args, rho, out) -> QuadratureDataset:
    data = sample_quadratures(rho, args.samples, args.bins, args.seed)
    io.write_dataset_csv(out, data)
    io.write_manifest(out, "tomo sample",
                      {"state": str(args.state), "samples": args.samples, "bins": args.bins},
                      seed=args.seed, formats={"dataset": io.DATASET_FORMAT})
    return data


def _reconstruct(args, data, out, source) -> np.ndarray:
    config = TomoConfig(dim=args.dim)
    rho, log = maxlik_reconstruct(data, config)
    io.save_state(out, rho)
    io.write_manifest(out, "tomo reconstruct",
                      {"data": str(source), "dim": args.dim, "iterations": log.iterations,
                       "converged": log.converged, "dropped": log.dropped},
                      formats={"state": io.STATE_FORMAT})
    print(f"iterations={log.iterations} log_likelihood={_fmt(log.log_likelihood[-1])}")
    return rho


def cmd_tomo(args) -> int:
    if args.samples < 1 or args.bins < 1:
        raise UsageError("--samples and --bins must be >= 1")
    if args.dim is None:
        args.dim = 15
    if args.dim < 2:
        raise UsageError("--dim must be >= 2")
    if args.action == "sample":
        rho = _load_state(args.state)
        _sample(args, rho, args.out)
        print(f"wrote {args.samples} samples to {args.out}")
    elif args.action == "reconstruct":
        try:
            data = io.read_dataset_csv(args.state)
        except FileNotFoundError:
            raise UsageError(f"no such dataset: {args.state}") from None
        rho = _reconstruct(args, data, args.out, args.state)
        if args.reference:
            print(f"fidelity={_fmt(fidelity(rho, _load_state(args.reference)))}")
    else:
        rho_true = _load_state(args.state)
        out = Path(args.out)
        data_path = out.with_name(out.name + ".data.csv")
        data = _sample(args, rho_true, data_path)
        rho = _reconstruct(args, data, out, data_path)
        print(f"fidelity={_fmt(fidelity(rho, rho_true))}")
    return EXIT_OK


def cmd_compare(args) -> int:
    print(_fmt(fidelity(_load_state(args.state_a), _load_state(args.state_b))))
    return EXIT_OK


def _add_model_flags(parser, sweep=False):
    kind = str if sweep else float
    parser.add_argument("--alpha", type=kind, default=kind(0.0 if not sweep else "0.5"),
                        help="coherent amplitude |alpha|" + (" (list or start:stop:step)" if sweep else ""))
    parser.add_argument("--r", type=kind, default=kind(0.105), help="squeezing parameter")
    parser.add_argument("--gamma", type=kind, default=kind(0.0), help="parasitic gain ratio")
    parser.add_argument("--xi", type=kind, default=kind(1.0), help="trigger purity")
    parser.add_argument("--eta", type=kind, default=kind(1.0), help="homodyne efficiency")
    parser.add_argument("--dim", type=int, default=None, help="signal truncation (default: auto)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fockbench", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run the state-preparation model, write the state")
    _add_model_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="parameter sweeps (named presets or a custom grid)")
    p.add_argument("preset", choices=["fig2", "fig4", "fig5", "custom"],
                   help="fig2: alpha x r grid; fig4: one noise knob at a time; "
                   "fig5: alpha at the lab noise point; custom: --alpha etc. as lists")
    _add_model_flags(p, sweep=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("measure", help="non-Gaussianity, non-classicality or a Wigner grid")
    p.add_argument("state")
    p.add_argument("which", choices=["delta", "nu", "wigner-grid"])
    p.add_argument("--grid-min", type=float)
    p.add_argument("--grid-max", type=float)
    p.add_argument("--grid-step", type=float)
    p.add_argument("--out")
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("tomo", help="homodyne sampling and MaxLik reconstruction")
    p.add_argument("action", choices=["sample", "reconstruct", "roundtrip"])
    p.add_argument("state", help="state file (sample, roundtrip) or dataset CSV (reconstruct)")
    p.add_argument("--samples", type=int, default=800_000)
    p.add_argument("--bins", type=int, default=DEFAULT_BINS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dim", type=int, default=None, help="reconstruction truncation (default 15)")
    p.add_argument("--reference", help="state file to compare the reconstruction with")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_tomo)

    p = sub.add_parser("compare", help="fidelity between two state files")
    p.add_argument("state_a")
    p.add_argument("state_b")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"fockbench: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (io.FormatError, FileNotFoundError) as exc:
        print(f"fockbench: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except IllConditionedError as exc:
        print(f"fockbench: numerical error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except Exception as exc:  # noqa: BLE001
        print(f"fockbench: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
