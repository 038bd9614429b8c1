"""Batch command-line front end.

Subcommands:

    check    run the criterion matching the space (or the requested form)
    family   generate a hitting family, write it with density reports
    build    assemble the hypercyclic-vector candidate
    orbit    build, then verify the orbit error bound; emit (m, error) CSV
    invert   print the reflected weight rule and run the symmetry check
    density  density report of a configured index set

Every run is driven by one JSON config (--config); flags only override
horizons, thread count, rational mode and the output directory.  Reports are
byte-deterministic for identical configs.  Exit codes: check 0 = satisfied
to horizon, 1 = violated, 2 = inconclusive tail; config errors exit 64.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

from .builder import BuildError, build_vector
from .config import EXIT_CONFIG_ERROR, ConfigError, RunConfig
from .criteria import (
    JMode,
    check_c0_products,
    check_frequent_growth,
    check_norm_form,
    check_unilateral,
    symmetry_check,
    SymmetryMismatchError,
)
from .densities import density_report
from .families import check_separation, family_to_text
from .orbits import verify_orbit
from .sequences import VSequence
from .targets import TargetError, enumerate_targets
from .weights import WeightError, invert_reflect

__all__ = ["main"]

EXIT_MISMATCH = 70


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _write_csv(path: str, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        for row in rows:
            writer.writerow(row)


def _outdir(cfg: RunConfig, args) -> str:
    out = args.out if args.out else cfg.out_dir()
    os.makedirs(out, exist_ok=True)
    return out


def _load_config(args) -> RunConfig:
    cfg = RunConfig.load(args.config)
    overrides = {}
    if args.horizon_outer or args.horizon_inner or args.window:
        hz = dict(cfg.raw.get("horizons", {}))
        if args.horizon_outer:
            hz["outer"] = args.horizon_outer
        if args.horizon_inner:
            hz["inner"] = args.horizon_inner
        if args.window:
            hz["window"] = args.window
        overrides["horizons"] = hz
    if args.threads is not None:
        overrides["threads"] = args.threads
    if args.rational:
        overrides["rational"] = True
    if overrides:
        raw = dict(cfg.raw)
        raw.update(overrides)
        cfg = RunConfig(raw)
    return cfg


def cmd_check(cfg: RunConfig, out: str) -> int:
    space = cfg.space()
    w = cfg.weight()
    family = cfg.family()
    horizons = cfg.horizons()
    eps = cfg.epsilon(family.P)
    threads = cfg.threads()
    form = cfg.check_form()
    if form == "auto":
        form = "norm" if space.bilateral else "unilateral"
    if form == "growth":
        report = check_frequent_growth(w, family, horizons, cfg.growth_thresholds())
        _write_json(os.path.join(out, "report.json"), report.to_dict())
        print(f"check: {report.verdict.value}")
        return report.exit_code
    if form == "unilateral" or not space.bilateral:
        report = check_unilateral(space, w, family, eps, horizons, threads=threads)
    elif form == "products":
        report = check_c0_products(w, family, eps, horizons, cfg.j_mode(), threads=threads)
    else:
        report = check_norm_form(space, w, family, eps, horizons, cfg.j_mode(), threads=threads)
    _write_json(os.path.join(out, "report.json"), report.to_dict())
    _write_csv(os.path.join(out, "extrema.csv"), report.extrema_csv_rows())
    print(f"check: {report.verdict.value}"
          + (f" witness (p,q,m,n,j) = {report.witness.key()}" if report.witness else ""))
    return report.exit_code


def cmd_family(cfg: RunConfig, out: str) -> int:
    family = cfg.family()
    violation = check_separation(family)
    with open(os.path.join(out, "family.txt"), "w", encoding="utf-8") as fh:
        fh.write(family_to_text(family))
    payload = {
        "P": family.P,
        "horizon": family.horizon,
        "sep": family.sep.descriptor,
        "construction": family.construction,
        "separation": "pass" if violation is None else str(violation),
        "sizes": {str(p): len(family.set_for(p)) for p in range(1, family.P + 1)},
    }
    for p in range(1, family.P + 1):
        dr = density_report(family.set_for(p), family.horizon)
        _write_csv(os.path.join(out, f"density_A{p}.csv"), dr.csv_rows())
        payload[f"A{p}_upper"] = dr.upper
        payload[f"A{p}_lower"] = dr.lower
    _write_json(os.path.join(out, "family.json"), payload)
    print(f"family: P={family.P} horizon={family.horizon} separation="
          + ("pass" if violation is None else "VIOLATED"))
    return 0 if violation is None else 1


def _build(cfg: RunConfig):
    space = cfg.space()
    w = cfg.weight()
    family = cfg.family()
    window = cfg.window()
    if family.max_element() + family.P > window:
        family = family.restrict(window - family.P)
    sched = cfg.schedules(w, family.P)
    v = VSequence(w)
    user = cfg.user_targets()
    targets = enumerate_targets(v, family.P, user_targets=user)
    x = build_vector(w, family, targets, sched, window, space=space)
    return space, w, x


def cmd_build(cfg: RunConfig, out: str) -> int:
    _, _, x = _build(cfg)
    _write_json(os.path.join(out, "vector.json"), x.to_dict())
    print(f"build: {x.support_size} coefficients on [-{x.window}, {x.window}], "
          f"dropped {sum(x.dropped_leading)} leading elements")
    return 0


def cmd_orbit(cfg: RunConfig, out: str) -> int:
    space, w, x = _build(cfg)
    report = verify_orbit(space, w, x, cfg.horizons().outer)
    _write_json(os.path.join(out, "orbit.json"), report.to_dict())
    _write_csv(os.path.join(out, "orbit.csv"), report.csv_rows())
    print(f"orbit: {'ok' if report.ok else 'FAILED'}; "
          + "; ".join(f"q={q} max_err={report.max_error(q):.3e} bound={report.bounds[q]:.3e}"
                      for q in sorted(report.m_values)))
    return 0 if report.ok else 1


def cmd_invert(cfg: RunConfig, out: str) -> int:
    w = cfg.weight()
    if not w.invertible:
        raise ConfigError("invert requires an invertible weight rule")
    w_ref = invert_reflect(w)
    family = cfg.family()
    horizons = cfg.horizons()
    eps = cfg.epsilon(family.P)
    exact_upto = 200 if cfg.rational() else 0
    try:
        report = symmetry_check(w, family, eps, horizons, exact_upto=exact_upto,
                                threads=cfg.threads())
    except SymmetryMismatchError as exc:
        _write_json(os.path.join(out, "symmetry.json"), exc.report.to_dict())
        print(f"invert: MISMATCH {exc}")
        return EXIT_MISMATCH
    payload = report.to_dict()
    payload["reflected_weight"] = w_ref.to_config()
    _write_json(os.path.join(out, "symmetry.json"), payload)
    print(f"invert: reflected rule {json.dumps(w_ref.to_config(), sort_keys=True)}")
    print(f"invert: symmetry equal, verdict {report.verdict.value}, "
          f"identity max rel err {report.identity_max_relative_error:.3e}")
    return 0


def cmd_density(cfg: RunConfig, out: str) -> int:
    A = cfg.index_set()
    horizon = int(cfg.raw.get("set", {}).get("horizon",
                                             cfg.raw.get("horizons", {}).get("outer", 10**5)))
    dr = density_report(A, horizon)
    _write_csv(os.path.join(out, "ratios.csv"), dr.csv_rows())
    _write_json(os.path.join(out, "density.json"), {
        "set": A.name or "explicit",
        "horizon": dr.horizon,
        "tail_start": dr.tail_start,
        "upper": dr.upper,
        "lower": dr.lower,
    })
    print(f"density: upper={dr.upper:.6f} lower={dr.lower:.6f} (horizon {horizon})")
    return 0


_COMMANDS = {
    "check": cmd_check,
    "family": cmd_family,
    "build": cmd_build,
    "orbit": cmd_orbit,
    "invert": cmd_invert,
    "density": cmd_density,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="shiftlab",
                                     description="weighted-shift hypercyclicity workbench")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to the JSON run config")
        p.add_argument("--out", default=None, help="output directory (overrides config)")
        p.add_argument("--threads", type=int, default=None)
        p.add_argument("--rational", action="store_true", help="enable exact-rational oracles")
        p.add_argument("--horizon-outer", type=int, default=None)
        p.add_argument("--horizon-inner", type=int, default=None)
        p.add_argument("--window", type=int, default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load_config(args)
        out = _outdir(cfg, args)
        return _COMMANDS[args.command](cfg, out)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except (WeightError, BuildError, TargetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
