"""Command-line front end.

Exit codes: 0 success, 2 validation error, 3 junction resonance,
4 check failure, 5 I/O error.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from ringpol import __version__
from ringpol.checks import run_oracle_check
from ringpol.io import (
    POINT_CSV,
    ConfigError,
    RunConfig,
    SweepConfig,
    dumps,
    load_config,
    point_record,
    rows_to_csv,
    sweep_table,
    table_json,
    texture_table,
    write_text,
)
from ringpol.polarization import normalized_det, spin_texture
from ringpol.ring import RingGeometry, RingParams, derive
from ringpol.search import find_polarization_points, refine_seed, sweep
from ringpol.transport import JunctionResonance, scatter

EXIT_OK, EXIT_VALIDATION, EXIT_RESONANCE, EXIT_CHECK, EXIT_IO = 0, 2, 3, 4, 5
NEAR_POLARIZED = 1e-2


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--so-ratio", type=float, dest="so_ratio")
    p.add_argument("--ka", type=float)
    p.add_argument("--gamma1", type=float)
    p.add_argument("--gamma2", type=float)
    p.add_argument("--degrees", action="store_true", help="angles on the command line are in degrees")
    p.add_argument("--case", choices=("a", "b"))
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"))


def _add_sweep(p: argparse.ArgumentParser) -> None:
    p.add_argument("--variable", choices=("ka", "so_ratio", "gamma2"))
    p.add_argument("--lo", type=float)
    p.add_argument("--hi", type=float)
    p.add_argument("--samples", type=int)
    p.add_argument("--family-index", type=int, help="m (or l) of the polarizing geometry family")
    p.add_argument("--family-sign", type=int, choices=(-1, 1))
    p.add_argument("--family-which", choices=("fix_gamma2", "fix_gamma1"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ringpol", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"ringpol {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("transmit", help="transmission/reflection report at one parameter set")
    _add_common(p)

    p = sub.add_parser("sweep", help="sweep one parameter and export transmission rows")
    _add_common(p)
    _add_sweep(p)
    p.add_argument("--points-out", help="also write refined polarization points here")

    p = sub.add_parser("points", help="refined perfect-polarization points")
    _add_common(p)
    _add_sweep(p)

    p = sub.add_parser("texture", help="spin texture along the ring")
    _add_common(p)
    p.add_argument("--input-mode", choices=("eigen_mixture", "sz_mixture"))
    p.add_argument("--phi-samples", type=int)
    p.add_argument("--refine", action="store_true",
                   help="polish (so_ratio, ka) to an exact polarization root first")

    p = sub.add_parser("oracle-check", help="closed form versus boundary-value oracle")
    p.add_argument("--config")
    p.add_argument("--seed", type=int)
    p.add_argument("--count", type=int)
    p.add_argument("--out")
    return parser


def resolve_config(args) -> RunConfig:
    cfg = load_config(args.config) if getattr(args, "config", None) else RunConfig()
    scale = math.pi / 180.0 if getattr(args, "degrees", False) else 1.0
    for name in ("so_ratio", "ka"):
        if getattr(args, name, None) is not None:
            setattr(cfg, name, getattr(args, name))
    for name in ("gamma1", "gamma2"):
        if getattr(args, name, None) is not None:
            setattr(cfg, name, getattr(args, name) * scale)
    for name in ("case", "out", "format", "seed", "count", "input_mode", "phi_samples", "points_out"):
        if getattr(args, name, None) is not None:
            setattr(cfg, name, getattr(args, name))
    if getattr(args, "refine", False):
        cfg.refine = True
    sweep_flags = {k: getattr(args, k, None) for k in ("variable", "lo", "hi", "samples")}
    fam_flags = {k: getattr(args, f"family_{k}", None) for k in ("index", "sign", "which")}
    if any(v is not None for v in (*sweep_flags.values(), *fam_flags.values())):
        s = cfg.sweep or SweepConfig(lo=float("nan"), hi=float("nan"))
        for k, v in sweep_flags.items():
            if v is not None:
                setattr(s, k, v)
        if any(v is not None for v in fam_flags.values()):
            fam = dict(s.family or {})
            fam.update({k: v for k, v in fam_flags.items() if v is not None})
            s.family = fam
        cfg.sweep = s
    return cfg.validate()


def _base(cfg: RunConfig):
    cfg.require("so_ratio", "ka", "gamma1", "gamma2")
    try:
        return RingGeometry(cfg.gamma1, cfg.gamma2), RingParams(cfg.so_ratio, cfg.ka)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def cmd_transmit(cfg: RunConfig) -> int:
    geom, params = _base(cfg)
    d = derive(params)
    sol = scatter(geom, d)
    dets = [normalized_det(sol.T1), normalized_det(sol.T2)]
    report = {
        "inputs": {"so_ratio": params.so_ratio, "ka": params.ka,
                   "gamma1": geom.gamma1, "gamma2": geom.gamma2},
        "T1": sol.T1, "T2": sol.T2,
        "R": sol.R_matrix,
        "eta1": sol.eta1, "eta2": sol.eta2, "reflect_prob": sol.reflect_prob,
        "conservation_residual": sol.conservation_residual(),
        "det_norm": dets,
        "near_polarized": [v < NEAR_POLARIZED for v in dets],
        "version": __version__,
    }
    write_text(cfg.out, dumps(report))
    return EXIT_OK


def _sweep_meta(cfg: RunConfig, result) -> dict:
    return {"tool": f"ringpol {__version__}", "config": cfg.to_dict(), **result.meta}


def cmd_sweep(cfg: RunConfig) -> int:
    geom, params = _base(cfg)
    spec = cfg.sweep_spec()
    try:
        result = sweep(spec, geom, params)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    header, rows = sweep_table(result)
    meta = _sweep_meta(cfg, result)
    text = table_json(header, rows, meta) if cfg.format == "json" else rows_to_csv(header, rows, meta)
    write_text(cfg.out, text)
    if cfg.points_out:
        points = find_polarization_points(spec, geom, params, result=result)
        _write_points(cfg, points, cfg.points_out, meta)
    return EXIT_OK


def _write_points(cfg, points, path, meta) -> None:
    records = [point_record(p) for p in points]
    if cfg.format == "json":
        text = dumps({"meta": meta, "points": records})
    else:
        text = rows_to_csv(list(POINT_CSV), [[r[c] for c in POINT_CSV] for r in records], meta)
    write_text(path, text)


def cmd_points(cfg: RunConfig) -> int:
    geom, params = _base(cfg)
    if cfg.sweep is None:
        pt = refine_seed(cfg.case, geom, params)
        points = [] if pt is None or not pt.residual < 1e-8 else [pt]
        meta = {"tool": f"ringpol {__version__}", "config": cfg.to_dict(), "mode": "seed"}
    else:
        spec = cfg.sweep_spec()
        try:
            result = sweep(spec, geom, params)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        points = find_polarization_points(spec, geom, params, result=result)
        meta = _sweep_meta(cfg, result)
    _write_points(cfg, points, cfg.out, meta)
    return EXIT_OK


def cmd_texture(cfg: RunConfig) -> int:
    geom, params = _base(cfg)
    if cfg.refine:
        pt = refine_seed(cfg.case, geom, params)
        if pt is None or not pt.residual < 1e-8:
            print("refinement did not converge to a polarization root", file=sys.stderr)
            return EXIT_CHECK
        geom, params = pt.geom, pt.params
    d = derive(params)
    mode = cfg.pure_input() if cfg.pure_input() is not None else cfg.input_mode
    phis = np.linspace(0.0, 2 * math.pi, cfg.phi_samples)
    # make sure the junctions themselves are sampled
    phis = np.unique(np.concatenate([phis, [geom.gamma1, geom.gamma2]]))
    samples = spin_texture(geom, d, params.ka, mode, phis)
    header, rows = texture_table(samples)
    meta = {"tool": f"ringpol {__version__}", "config": cfg.to_dict(),
            "so_ratio": params.so_ratio, "ka": params.ka,
            "junctions": {"gamma1": geom.gamma1, "gamma2": geom.gamma2, "input": 0.0}}
    text = table_json(header, rows, meta) if cfg.format == "json" else rows_to_csv(header, rows, meta)
    write_text(cfg.out, text)
    return EXIT_OK


def cmd_oracle_check(cfg: RunConfig) -> int:
    if cfg.count < 1:
        raise ConfigError("count must be at least 1")
    report = run_oracle_check(cfg.seed, cfg.count)
    body = {"seed": report.seed, "count": report.count, "skipped": report.skipped,
            "max_deviation": report.max_dev, "limits": report.limits,
            "passed": report.passed}
    if not report.passed:
        body["failures"] = {k: report.worst[k] for k in report.failures()}
    write_text(cfg.out, dumps(body))
    if not report.passed:
        for k in report.failures():
            print(f"FAIL {k}: {report.max_dev[k]:.3e} at {report.worst[k]}", file=sys.stderr)
        return EXIT_CHECK
    return EXIT_OK


COMMANDS = {
    "transmit": cmd_transmit,
    "sweep": cmd_sweep,
    "points": cmd_points,
    "texture": cmd_texture,
    "oracle-check": cmd_oracle_check,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except JunctionResonance as exc:
        print(f"resonance: {exc}", file=sys.stderr)
        return EXIT_RESONANCE
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
