"""Command-line interface.

    fopwc simulate        trajectory CSV (or JSON) of one variant
    fopwc compare         GA / LA / WA divergence report + three trajectories
    fopwc bifurcate       bifurcation diagram CSV (+ optional SVG)
    fopwc lyapunov        finite-time Lyapunov spectrum JSON
    fopwc switching       switching time of the closed-form solution
    fopwc verify-periodic residual of the closed-form periodic solution
    fopwc equilibria      equilibria report with derivation trace

Every command writes its output to ``--out`` plus a ``<out>.config.json``
sidecar holding the full configuration.  Exit codes: 0 success, 1 a
validation failed, 2 bad arguments or config, 3 numerical failure, 4 I/O.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import io as fio
from .abm import IntegrationError
from .config import ConfigError, RunConfig, load_config_file
from .dynamics import (
    PeriodicTestProblem,
    bifurcation_scan,
    compare_variants,
    lyapunov_spectrum,
    verify_ml_periodic,
    periodic_coefficients,
)
from .mlfunc import MLConvergenceError
from .sprott import equilibria_report, simulate, switching_time

log = logging.getLogger("fopwc")

EXIT_OK, EXIT_VALIDATION, EXIT_USAGE, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3, 4

RUN_FLAGS = {
    "a": float,
    "b": float,
    "q": float,
    "h": float,
    "t_end": float,
    "x0": str,
    "variant": str,
    "delta": float,
    "epsilon": float,
    "abs_epsilon": float,
    "corrector_iters": int,
    "renorm_interval": int,
    "transient_fraction": float,
}


def _add_common(p: argparse.ArgumentParser, default_out: str, run_flags=True):
    p.add_argument("--config", metavar="PATH", help="INI file with a [run] section")
    p.add_argument("--out", metavar="PATH", help=f"output path (default {default_out})")
    p.add_argument("--format", choices=["csv", "json"], help="data format where both apply")
    p.add_argument("--svg", action="store_true", help="also write a static SVG plot")
    p.set_defaults(default_out=default_out)
    if run_flags:
        for name, kind in RUN_FLAGS.items():
            flag = "--" + name.replace("_", "-")
            p.add_argument(flag, dest=name, type=kind, default=None, metavar=name.upper())


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fopwc", description=__doc__.split("\n\n")[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    _add_common(sub.add_parser("simulate", help="integrate one variant"), "trajectory.csv")

    _add_common(sub.add_parser("compare", help="GA/LA/WA divergence times"), "compare.json")
    sub.choices["compare"].add_argument("--threshold", type=float, default=1e-6)

    bif = sub.add_parser("bifurcate", help="bifurcation diagram")
    _add_common(bif, "bifurcation.csv")
    bif.add_argument("--param", choices=["b", "q"], default="b")
    bif.add_argument("--start", type=float, required=True)
    bif.add_argument("--stop", type=float, required=True)
    bif.add_argument("--num", type=int, default=50)
    bif.add_argument("--x0-alt", dest="x0_alt", help="second initial condition stream")
    bif.add_argument("--workers", type=int, default=1)

    ly = sub.add_parser("lyapunov", help="finite-time Lyapunov spectrum")
    _add_common(ly, "lyapunov.json")
    ly.add_argument("--memory", choices=["restart", "tangent-restart"], default="restart")

    sw = sub.add_parser("switching", help="switching time of the closed-form solution")
    _add_common(sw, "switching.json")
    sw.add_argument("--t-max", dest="t_max", type=float, default=10.0)

    vp = sub.add_parser("verify-periodic", help="check the closed-form periodic solution")
    _add_common(vp, "verify_periodic.json", run_flags=False)
    vp.add_argument("--q", type=float, required=True)
    vp.add_argument("--beta", type=float, required=True)
    vp.add_argument("--gamma", type=float, required=True)
    vp.add_argument("--omega", type=float, required=True)
    vp.add_argument("--alpha", type=float, default=0.0)
    vp.add_argument("--tol", type=float, default=1e-12)

    _add_common(sub.add_parser("equilibria", help="equilibria report"), "equilibria.json")
    return ap


def _config(args, **defaults) -> RunConfig:
    file_values = load_config_file(args.config) if getattr(args, "config", None) else {}
    overrides = {k: getattr(args, k, None) for k in RUN_FLAGS}
    overrides["out"] = args.out
    overrides["format"] = args.format
    merged = {**defaults, **file_values}
    cfg = RunConfig.from_sources(merged, overrides)
    if cfg.out is None:
        cfg.out = args.default_out
    return cfg


def _sidecar(out: str, payload: dict) -> None:
    fio.write_json(str(out) + ".config.json", payload)


def cmd_simulate(args) -> int:
    cfg = _config(args)
    traj = simulate(cfg.params(), cfg.rhs_variant(), cfg.x0, cfg.t_end, cfg.h, cfg.corrector_iters)
    out = Path(cfg.out)
    if cfg.format == "json":
        fio.write_json(out, {"t": traj.times, "x": traj.states})
    else:
        fio.write_trajectory_csv(out, traj)
    _sidecar(out, {"command": "simulate", **cfg.to_dict(), "rows": len(traj)})
    if args.svg:
        fio.write_svg_scatter(out.with_suffix(".svg"), traj.times, traj.states[:, 0], "t", "x1", line=True)
    return EXIT_OK


def cmd_compare(args) -> int:
    cfg = _config(args)
    rep = compare_variants(cfg.params(), cfg.x0, cfg.t_end, cfg.delta, cfg.epsilon, cfg.h, args.threshold)
    out = Path(cfg.out)
    payload = rep.to_dict()
    files = {}
    for name, traj in rep.trajectories.items():
        path = out.with_name(f"{out.stem}_{name}.csv")
        fio.write_trajectory_csv(path, traj)
        files[name] = path.name
    payload["trajectory_files"] = files
    fio.write_json(out, payload)
    _sidecar(out, {"command": "compare", **cfg.to_dict(), "threshold": args.threshold})
    if args.svg:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        plt.rcParams["svg.hashsalt"] = "fopwc"
        fig, ax = plt.subplots(figsize=(8, 4))
        for name, traj in rep.trajectories.items():
            ax.plot(traj.times, traj.states[:, 0], lw=0.6, label=name.upper())
        ax.set_xlabel("t")
        ax.set_ylabel("x1")
        ax.legend()
        fig.savefig(out.with_suffix(".svg"), format="svg", metadata={"Date": None})
        plt.close(fig)
    return EXIT_OK


def cmd_bifurcate(args) -> int:
    cfg = _config(args, t_end=800.0)
    if args.num < 1:
        raise ConfigError("--num must be at least 1")
    values = np.linspace(args.start, args.stop, args.num)
    x0s = [cfg.x0]
    if args.x0_alt:
        from .config import parse_x0

        x0s.append(parse_x0(args.x0_alt))
    diagram = bifurcation_scan(
        cfg.params(), args.param, values, cfg.rhs_variant(), x0s, cfg.t_end, cfg.h,
        cfg.transient_fraction, workers=args.workers,
    )
    out = Path(cfg.out)
    rows = list(diagram.points())
    if cfg.format == "json":
        fio.write_json(out, {"parameter": args.param, "points": rows})
    else:
        fio.write_csv(out, [args.param, "stream", "x1_max"], rows)
    errors = [{"parameter": s.parameter, "stream": s.stream, "error": s.error} for s in diagram.samples if s.error]
    _sidecar(out, {
        "command": "bifurcate", **cfg.to_dict(), "param": args.param, "start": args.start,
        "stop": args.stop, "num": args.num, "x0s": [list(x) for x in x0s], "errors": errors,
    })
    if args.svg and rows:
        arr = np.array(rows)
        fio.write_svg_scatter(out.with_suffix(".svg"), arr[:, 0], arr[:, 2], args.param, "max x1", c=arr[:, 1])
    for e in errors:
        log.warning("sample %s=%g stream %d failed: %s", args.param, e["parameter"], e["stream"], e["error"])
    return EXIT_VALIDATION if errors else EXIT_OK


def cmd_lyapunov(args) -> int:
    cfg = _config(args, t_end=300.0, h=0.005, variant="la", epsilon=1e-2, abs_epsilon=1e-2)
    if cfg.abs_epsilon is None or cfg.variant == "wa":
        raise ConfigError("lyapunov needs --variant ga|la and --abs-epsilon")
    spec = lyapunov_spectrum(cfg.params(), cfg.rhs_variant(), cfg.x0, cfg.t_end, cfg.h, cfg.renorm_interval, args.memory)
    out = Path(cfg.out)
    payload = {
        "exponents": spec.exponents,
        "sum": float(np.sum(spec.exponents)),
        "n_positive": spec.n_positive,
        "T": spec.T,
        "h": spec.h,
        "renorm_interval": spec.renorm_interval,
        "memory": spec.memory,
        "x0": list(spec.x0),
        "mean_jacobian_trace": spec.mean_trace,
        "orthonormality_error": spec.orthonormality_error,
        **spec.variant.describe(),
    }
    fio.write_json(out, payload)
    _sidecar(out, {"command": "lyapunov", **cfg.to_dict(), "memory": args.memory})
    if args.svg and spec.history is not None and len(spec.times):
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        plt.rcParams["svg.hashsalt"] = "fopwc"
        fig, ax = plt.subplots(figsize=(7, 4.5))
        ax.plot(spec.times, spec.history, lw=0.8)
        ax.set_xlabel("t")
        ax.set_ylabel("finite-time exponents")
        fig.savefig(out.with_suffix(".svg"), format="svg", metadata={"Date": None})
        plt.close(fig)
    return EXIT_OK if np.all(np.isfinite(spec.exponents)) else EXIT_VALIDATION


def cmd_switching(args) -> int:
    cfg = _config(args)
    ev = switching_time(cfg.x0, cfg.params(), args.t_max)
    out = Path(cfg.out)
    payload = {"x0": list(cfg.x0), "t_max": args.t_max, "found": ev is not None}
    if ev is not None:
        payload.update(ev._asdict())
    fio.write_json(out, payload)
    _sidecar(out, {"command": "switching", **cfg.to_dict(), "t_max": args.t_max})
    return EXIT_OK


def cmd_verify_periodic(args) -> int:
    prob = PeriodicTestProblem(args.q, args.beta, args.gamma, args.omega, args.alpha)
    residual = verify_ml_periodic(prob)
    A, B, W = periodic_coefficients(prob)
    out = Path(args.out or args.default_out)
    payload = {
        "q": args.q, "beta": args.beta, "gamma": args.gamma, "Omega": args.omega, "alpha": args.alpha,
        "A": A, "B": B, "residual": residual, "tolerance": args.tol, "passed": residual <= args.tol,
    }
    fio.write_json(out, payload)
    _sidecar(out, {"command": "verify-periodic", **{k: payload[k] for k in ("q", "beta", "gamma", "Omega", "alpha")},
                   "tol": args.tol})
    return EXIT_OK if residual <= args.tol else EXIT_VALIDATION


def cmd_equilibria(args) -> int:
    cfg = _config(args)
    points, trace = equilibria_report(cfg.params())
    out = Path(cfg.out)
    fio.write_json(out, {
        "a": cfg.a, "b": cfg.b,
        "equilibria": [{"point": list(map(float, x)), "region": r} for x, r in points],
        "empty": not points,
        "trace": trace,
    })
    _sidecar(out, {"command": "equilibria", **cfg.to_dict()})
    return EXIT_OK if not points else EXIT_VALIDATION


COMMANDS = {
    "simulate": cmd_simulate,
    "compare": cmd_compare,
    "bifurcate": cmd_bifurcate,
    "lyapunov": cmd_lyapunov,
    "switching": cmd_switching,
    "verify-periodic": cmd_verify_periodic,
    "equilibria": cmd_equilibria,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, ValueError, ZeroDivisionError) as exc:
        print(f"fopwc {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (IntegrationError, MLConvergenceError, FloatingPointError) as exc:
        print(f"fopwc {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"fopwc {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
