"""``diracwalk`` command line: walk, search, scan, scaling, spectral, verify.

Exit codes: 0 success, 1 runtime or experiment failure, 2 invalid input.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import evolve as ev
from . import observables as ob
from . import search as se
from . import spectral as sp
from . import verify
from .errors import InputError
from .lattice import LatticeGeometry, field_table, norm_sq
from .output import write_json, write_table

log = logging.getLogger("diracwalk")

INITIAL_STATES = ("delta", "symmetric", "symmetric2d", "uniform")


@dataclass
class ExperimentConfig:
    command: str
    params: dict = field(default_factory=dict)
    out: str = "."
    seed: int = 0

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        return cls(**json.loads(text))


def int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def geometry_from(args) -> LatticeGeometry:
    if getattr(args, "sides", None):
        if args.d is not None and len(args.sides) != args.d:
            raise InputError(f"--sides has {len(args.sides)} entries but --d is {args.d}")
        return LatticeGeometry(tuple(args.sides))
    d = args.d if args.d is not None else 1
    return LatticeGeometry.cubic(d, args.L)


def initial_state(g: LatticeGeometry, name: str, site=None):
    if name == "delta":
        return ev.init_delta(g, site)
    if name == "symmetric":
        return ev.init_symmetric_1d(g)
    if name == "symmetric2d":
        if g.d != 2:
            raise InputError(f"symmetric2d start needs d=2, got d={g.d}")
        return ev.init_symmetric(g)
    if name == "uniform":
        return ev.init_uniform(g)
    raise InputError(f"unknown initial state {name!r}")


def load_run_descriptor(path, args) -> None:
    """Overlay a run descriptor ``{d, sides, c, t, initial, delta_site, absorbing}`` onto ``args``."""
    desc = json.loads(Path(path).read_text())
    mapping = {"d": "d", "sides": "sides", "c": "c", "t": "t", "initial": "init",
               "delta_site": "delta_site", "absorbing": "absorbing"}
    for key, attr in mapping.items():
        if key in desc:
            setattr(args, attr, desc[key])


def cmd_walk(args) -> int:
    if args.config:
        load_run_descriptor(args.config, args)
    g = geometry_from(args)
    f = initial_state(g, args.init, args.delta_site)
    descriptor = {"d": g.d, "sides": list(g.sides), "c": args.c, "t": args.t, "initial": args.init,
                  "delta_site": list(args.delta_site) if args.delta_site else None,
                  "absorbing": bool(args.absorbing)}
    out = Path(args.out)
    write_json(out, "run.json", descriptor)
    e = ev.WalkEngine.create(g, args.c)
    summary = {"t": args.t}
    if args.absorbing:
        state, absorbed = ev.run_absorbing_1d(ev.AbsorbingWalkState(f), args.t, e)
        f = state.field
        summary["p_abs"] = state.absorbed
        write_table(out, "absorption", ["t", "p_abs"],
                    [[i + 1, a] for i, a in enumerate(absorbed)], args.format)
    else:
        f = ev.run(e, f, args.t)
    summary["norm"] = norm_sq(f)
    p = ob.distribution(f)
    header, rows = ob.distribution_table(p)
    if args.absorbing:
        header, rows = header + ["p_abs"], [r + [summary["p_abs"]] for r in rows]
    write_table(out, "distribution", header, rows, args.format)
    write_table(out, "field", *field_table(f), args.format)
    if g.d == 1 and args.init == "symmetric" and not args.absorbing and args.t >= 1:
        write_table(out, "density", *ob.density_comparison(p, args.t), args.format)
    write_json(out, "summary.json", summary)
    print(json.dumps(summary, sort_keys=True))
    return 0


def _search_config(args, g) -> se.SearchConfig:
    return se.SearchConfig(g, c=args.c, t1=args.t1, max_calls=args.max_calls,
                           marked=tuple(args.marked) if args.marked else None)


def cmd_search(args) -> int:
    g = geometry_from(args)
    cfg = _search_config(args, g)
    if cfg.odd_offset_marked:
        log.warning("marked vertex %s is not an even translate of the origin", cfg.marked)
    trace = se.search_run(cfg)
    out = Path(args.out)
    write_table(out, "trace", se.TRACE_HEADER, trace.rows(), args.format)
    summary = {"d": g.d, "sides": list(g.sides), "N": g.N, "c": cfg.c, "t1": cfg.t1,
               "max_calls": cfg.max_calls, "marked": list(cfg.marked),
               "noise_floor": se.NOISE_FLOOR_FACTOR / g.N, "odd_offset_marked": cfg.odd_offset_marked,
               "found": trace.peak is not None}
    if trace.peak is None:
        write_json(out, "peak.json", summary)
        print(f"error: no peak above the noise floor within {cfg.max_calls} oracle calls", file=sys.stderr)
        return 1
    call, prob = trace.peak
    summary.update(peak_call=call, peak_prob=prob, total_steps=call * cfg.t1)
    write_json(out, "peak.json", summary)
    peak_field = se.field_after_calls(cfg, call)
    write_table(out, "peak_field", *field_table(peak_field), args.format)
    if args.dump_peak:
        write_table(out, "peak_distribution", *ob.distribution_table(ob.distribution(peak_field)), args.format)
    print(json.dumps(summary, sort_keys=True))
    return 0


def cmd_scan(args) -> int:
    g = geometry_from(args)
    rows = se.scan_parameters(g, args.c_grid, args.t1_grid, args.max_calls, threads=args.threads)
    out = Path(args.out)
    write_table(out, "scan", se.SCAN_HEADER, [r.row() for r in rows], args.format)
    best = next((r for r in rows if r.best), None)
    summary = {"d": g.d, "sides": list(g.sides), "rank_by": "total_steps",
               "best": None if best is None else {"c": best.c, "t1": best.t1, "peak_call": best.peak_call,
                                                  "peak_prob": best.peak_prob, "total_steps": best.total_steps}}
    write_json(out, "scan_best.json", summary)
    print(json.dumps(summary, sort_keys=True))
    return 0 if best is not None else 1


def cmd_scaling(args) -> int:
    fit = se.scaling_experiment(args.d, args.sides, c=args.c, t1=args.t1, threads=args.threads)
    out = Path(args.out)
    doc = fit.to_dict()
    write_json(out, "fit.json", doc)
    write_table(out, "scaling_samples", ["L", "N", "peak_prob", "peak_call", "total_steps"],
                [[s.L, s.N, s.peak_prob, s.peak_call, s.total_steps] for s in fit.samples], args.format)
    print(json.dumps({k: doc[k] for k in ("d", "a_prob", "a_steps", "residual_prob", "residual_steps")},
                     sort_keys=True))
    return 0


def cmd_spectral(args) -> int:
    write_table(Path(args.out), "dispersion", *sp.dispersion_table(args.samples), args.format)
    return 0


def cmd_verify(args) -> int:
    results = verify.run_all(args.seed)
    print(verify.format_table(results))
    write_json(Path(args.out), "verify.json",
               {"passed": all(r.passed for r in results),
                "checks": [{"name": r.name, "passed": r.passed, "detail": r.detail} for r in results]})
    return 0 if all(r.passed for r in results) else 1


def _global_flags(parser, suppress: bool) -> None:
    default = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--out", default=default("."), help="output directory")
    parser.add_argument("--threads", type=int, default=default(1), help="worker cap for scans and experiments")
    parser.add_argument("--format", choices=("csv", "json"), default=default("csv"), help="table format")


def _lattice_flags(parser, default_L: int) -> None:
    parser.add_argument("--d", type=int, default=None, help="dimension (default 1 for walk)")
    parser.add_argument("--L", type=int, default=default_L, help="side length of a cubic lattice")
    parser.add_argument("--sides", type=int_list, default=None, help="comma-separated side lengths")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="diracwalk", description=__doc__.splitlines()[0])
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        _global_flags(p, suppress=True)
        p.set_defaults(func=fn)
        return p

    p = add("walk", cmd_walk, "evolve a walk and dump its distribution")
    _lattice_flags(p, 256)
    p.add_argument("--c", type=float, default=ev.UNBIASED_C)
    p.add_argument("--t", type=int, default=32)
    p.add_argument("--init", choices=INITIAL_STATES, default="delta")
    p.add_argument("--delta-site", type=int_list, default=None)
    p.add_argument("--absorbing", action="store_true", help="absorbing wall left of n=0 (d=1)")
    p.add_argument("--config", default=None, help="run descriptor JSON overriding the flags")

    p = add("search", cmd_search, "marked-vertex search trace and first peak")
    _lattice_flags(p, 64)
    p.add_argument("--c", type=float, default=ev.UNBIASED_C)
    p.add_argument("--t1", type=int, default=3)
    p.add_argument("--max-calls", type=int, default=None)
    p.add_argument("--marked", type=int_list, default=None)
    p.add_argument("--dump-peak", action="store_true", help="also write the peak distribution table")

    p = add("scan", cmd_scan, "first peak over a (c, t1) grid")
    _lattice_flags(p, 32)
    p.add_argument("--c-grid", type=float_list, default=[0.5, ev.UNBIASED_C, 0.85])
    p.add_argument("--t1-grid", type=int_list, default=[1, 2, 3, 4])
    p.add_argument("--max-calls", type=int, default=None)

    p = add("scaling", cmd_scaling, "search at several sizes and fit scaling forms")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--sides", type=int_list, required=True)
    p.add_argument("--c", type=float, default=ev.UNBIASED_C)
    p.add_argument("--t1", type=int, default=3)

    p = add("spectral", cmd_spectral, "dispersion relation of the 1-D walk")
    p.add_argument("--samples", type=int, default=1024)

    p = add("verify", cmd_verify, "run the invariant suite")
    p.add_argument("--seed", type=int, default=0)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    params = {k: v for k, v in vars(args).items() if k not in ("func", "command", "out")}
    cfg = ExperimentConfig(args.command, params, args.out, getattr(args, "seed", 0))
    try:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        (Path(args.out) / "config.json").write_text(cfg.to_json() + "\n")
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (RuntimeError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
