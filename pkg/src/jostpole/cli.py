"""Command-line driver.

    jostpole <command> [--config FILE] [--out PATH] [--threads N] [--tol X]

Commands: doublet, ep, unfold, surface, section, trajectory, loop, validate.
Reports are JSON, tabular data is CSV with 12 significant digits. Exit
codes: 0 ok, 1 solver failure, 2 configuration error, 3 validation failure.
The environment variable JOSTPOLE_CONFIG names a config file used when
--config is not given.
"""

from __future__ import annotations

import argparse
import copy
import csv
import io
import json
import logging
import os
import sys
import time

import numpy as np

from . import analysis, exceptional, jost, rootfind, unfolding
from .potential import ControlPoint, FixedParams, PotentialProfile

log = logging.getLogger("jostpole")

EXIT_OK, EXIT_SOLVER, EXIT_CONFIG, EXIT_VALIDATION = 0, 1, 2, 3

DEFAULTS = {
    "potential": {
        "U2": 8.0,
        "U4": 8.0,
        "r1": 1.0,
        "w3": 1.0,
        "w4": 0.304892,
        "well_scale": 2.0,
        "outer_well_sign": 1,
    },
    "control": {"d": 2.0, "v3": 1.04},
    "window": {"re_min": 2.0, "re_max": 2.4, "im_min": -0.3, "im_max": 0.0},
    "grid_n": 64,
    "tol": 1e-10,
    "ep": None,
    "surface": {"half_widths": [2e-3, 5e-4], "grid": [17, 17]},
    "section": {"v3": 1.0381, "d_range": None, "half_width": 3e-3, "n": 201},
    "loop": {"radius": 1e-2, "windings": 1, "samples_per_turn": 256, "center_offset": [0.0, 0.0]},
    "validate": {"seed": 12345, "n_unitarity": 200},
}

CSV_HEADERS = {
    "surface": ["d", "v3", "re_k1", "im_k1", "re_k2", "im_k2", "re_khat1", "im_khat1", "re_khat2", "im_khat2"],
    "section": ["d", "v3", "re_E1", "im_E1", "re_E2", "im_E2", "dE", "dGamma",
                "re_Ehat1", "im_Ehat1", "re_Ehat2", "im_Ehat2"],
    "trajectory": ["step", "re_E", "im_E", "branch_label"],
    "loop": ["turn_fraction", "d", "v3", "re_ka", "im_ka", "re_kb", "im_kb"],
}


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------- config


def _merge(base, over, path=""):
    """Recursively overlay ``over`` on ``base``, rejecting unknown keys."""
    if not isinstance(over, dict):
        raise ConfigError(f"{path or 'config'}: expected an object, got {type(over).__name__}")
    out = copy.deepcopy(base)
    for key, val in over.items():
        where = f"{path}.{key}" if path else key
        if key not in base:
            raise ConfigError(f"{where}: unknown field")
        if isinstance(base[key], dict) and val is not None:
            out[key] = _merge(base[key], val, where)
        else:
            out[key] = val
    return out


def _number(cfg, path, integer=False, positive=False):
    node = cfg
    for part in path.split("."):
        node = node[part]
    ok = isinstance(node, (int, float)) and not isinstance(node, bool)
    if integer:
        ok = ok and float(node).is_integer()
    if not ok or not np.isfinite(node):
        kind = "an integer" if integer else "a finite number"
        raise ConfigError(f"{path}: expected {kind}, got {node!r}")
    if positive and not node > 0:
        raise ConfigError(f"{path}: must be positive, got {node!r}")
    return int(node) if integer else float(node)


def _pair(cfg, path, integer=False):
    node = cfg
    for part in path.split("."):
        node = node[part]
    if not (isinstance(node, list) and len(node) == 2):
        raise ConfigError(f"{path}: expected a list of two numbers, got {node!r}")
    out = []
    for i, v in enumerate(node):
        if isinstance(v, bool) or not isinstance(v, (int, float)) or (integer and not float(v).is_integer()):
            raise ConfigError(f"{path}[{i}]: expected a number, got {v!r}")
        out.append(int(v) if integer else float(v))
    return out


def load_config(path=None, text=None):
    """Merged configuration dict; raises ConfigError with a field or line diagnostic."""
    user = {}
    if text is None and path is not None:
        try:
            with open(path) as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if text is not None:
        try:
            user = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path or '<config>'}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    cfg = _merge(DEFAULTS, user)
    check_config(cfg)
    return cfg


def check_config(cfg):
    for key in ("U2", "U4", "r1", "w3", "w4", "well_scale"):
        _number(cfg, f"potential.{key}")
    sign = cfg["potential"]["outer_well_sign"]
    if sign not in (1, -1) or isinstance(sign, bool):
        raise ConfigError(f"potential.outer_well_sign: must be 1 or -1, got {sign!r}")
    _number(cfg, "control.d", positive=True)
    _number(cfg, "control.v3")
    for key in ("re_min", "re_max", "im_min", "im_max"):
        _number(cfg, f"window.{key}")
    _number(cfg, "grid_n", integer=True)
    _number(cfg, "tol", positive=True)
    _pair(cfg, "surface.half_widths")
    _pair(cfg, "surface.grid", integer=True)
    sec = cfg["section"]
    if sec["v3"] is not None:
        _number(cfg, "section.v3")
    if sec["d_range"] is not None:
        _pair(cfg, "section.d_range")
    _number(cfg, "section.half_width", positive=True)
    _number(cfg, "section.n", integer=True)
    _number(cfg, "loop.radius", positive=True)
    _number(cfg, "loop.windings", integer=True, positive=True)
    _number(cfg, "loop.samples_per_turn", integer=True)
    _pair(cfg, "loop.center_offset")
    _number(cfg, "validate.seed", integer=True)
    _number(cfg, "validate.n_unitarity", integer=True, positive=True)
    ep = cfg["ep"]
    if ep is not None:
        if not isinstance(ep, dict) or set(ep) != {"d", "v3", "k"}:
            raise ConfigError("ep: expected an object with fields d, v3, k")
        _number(cfg, "ep.d", positive=True)
        _number(cfg, "ep.v3")
        _pair(cfg, "ep.k")
    try:
        build_profile(cfg)
        build_window(cfg)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if cfg["grid_n"] < 16:
        raise ConfigError("grid_n: must be at least 16")


def build_profile(cfg) -> PotentialProfile:
    p = cfg["potential"]
    fixed = FixedParams(**{k: (int(v) if k == "outer_well_sign" else float(v)) for k, v in p.items()})
    c = cfg["control"]
    return PotentialProfile(fixed, ControlPoint(float(c["d"]), float(c["v3"])))


def build_window(cfg) -> rootfind.KWindow:
    return rootfind.KWindow(**{k: float(v) for k, v in cfg["window"].items()})


# ---------------------------------------------------------------- output


def fmt(x):
    return format(float(x), ".12g")


def _cplx(z):
    return {"re": float(np.real(z)), "im": float(np.imag(z))}


def write_csv(rows, header, out):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([v if isinstance(v, str) else (str(v) if isinstance(v, (int, np.integer)) else fmt(v)) for v in row])
    _emit(buf.getvalue(), out)


def write_json(obj, out):
    _emit(json.dumps(obj, indent=2, sort_keys=True) + "\n", out)


def _emit(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


# ---------------------------------------------------------------- jobs


def find_doublet(cfg):
    prof = build_profile(cfg)
    zeros = rootfind.scan_window(prof, build_window(cfg), cfg["grid_n"])
    return prof, zeros


def solve_ep(cfg):
    tol = cfg["tol"]
    if cfg["ep"] is not None:
        e = cfg["ep"]
        prof = build_profile(cfg).with_control(ControlPoint(e["d"], e["v3"]))
        k = complex(*e["k"])
        return exceptional.locate_ep(rootfind.Doublet(k, k, prof), tol=tol, presolve=False)
    prof, zeros = find_doublet(cfg)
    if len(zeros) != 2:
        raise rootfind.NonConvergence(f"expected an isolated doublet in the window, found {len(zeros)} zeros")
    return exceptional.locate_ep(rootfind.Doublet(zeros[0], zeros[1], prof), tol=tol)


def _ep_dict(ep):
    return {"d_star": ep.d_star, "v3_star": ep.v3_star, "k_d": _cplx(ep.k_d), "E_d": _cplx(ep.E_d),
            "abs_f": ep.residuals[0], "abs_fprime": ep.residuals[1], "fsecond": _cplx(ep.second_deriv),
            "iterations": ep.iterations}


def cmd_doublet(cfg, args):
    _, zeros = find_doublet(cfg)
    count = rootfind.count_zeros(build_profile(cfg), build_window(cfg))
    write_json({"count": len(zeros), "winding_count": count, "zeros": [_cplx(z) for z in zeros]}, args.out)
    return EXIT_OK


def cmd_ep(cfg, args):
    t0 = time.perf_counter()
    ep = solve_ep(cfg)
    rep = exceptional.verify_ep(ep)
    out = _ep_dict(ep)
    out["verify"] = rep.as_dict()
    log.info("ep solved in %.2f s", time.perf_counter() - t0)
    write_json(out, args.out)
    return EXIT_OK if rep.is_ep else EXIT_SOLVER


def _ep_and_coeffs(cfg):
    ep = solve_ep(cfg)
    return ep, unfolding.compute_coefficients(ep)


def cmd_unfold(cfg, args):
    ep, co = _ep_and_coeffs(cfg)
    write_json({"ep": _ep_dict(ep), "coefficients": co.as_dict()}, args.out)
    return EXIT_OK


def cmd_surface(cfg, args):
    ep, co = _ep_and_coeffs(cfg)
    grid = analysis.surface_scan(ep, co, _pair(cfg, "surface.half_widths"), _pair(cfg, "surface.grid", True),
                                 threads=args.threads)
    rows = []
    for line in grid:
        for p in line:
            rows.append([p.control.d, p.control.v3, p.k1.real, p.k1.imag, p.k2.real, p.k2.imag,
                         p.khat1.real, p.khat1.imag, p.khat2.real, p.khat2.imag])
    failed = sum(not p.ok for line in grid for p in line)
    if failed:
        log.warning("%d of %d surface samples failed (written as nan)", failed, len(rows))
    write_csv(rows, CSV_HEADERS["surface"], args.out)
    return EXIT_OK


def _run_section(cfg, ep, co):
    s = cfg["section"]
    v3 = ep.v3_star if s["v3"] is None else float(s["v3"])
    if s["d_range"] is not None:
        d_range = tuple(s["d_range"])
    else:
        d_range = (ep.d_star - s["half_width"], ep.d_star + s["half_width"])
    return analysis.section(ep, co, v3, d_range, int(s["n"]))


def cmd_section(cfg, args):
    ep, co = _ep_and_coeffs(cfg)
    sec = _run_section(cfg, ep, co)
    log.info("section v3=%s: %s (exact data: %s)", sec.fixed_v3, sec.classification, sec.exact_classification)
    rows = []
    for p in sec.sweep:
        rows.append([p.d, sec.fixed_v3, p.E1.real, p.E1.imag, p.E2.real, p.E2.imag, p.dE, p.dGamma,
                     p.Ehat1.real, p.Ehat1.imag, p.Ehat2.real, p.Ehat2.imag])
    write_csv(rows, CSV_HEADERS["section"], args.out)
    return EXIT_OK


def cmd_trajectory(cfg, args):
    ep, co = _ep_and_coeffs(cfg)
    sec = _run_section(cfg, ep, co)
    fit = analysis.pole_trajectory(sec)
    log.info("trajectory type %s, asymptote slopes %s", fit.trajectory_type, fit.asymptote_slopes)
    rows = [[i, E.real, E.imag, lab] for i, E, lab in analysis.trajectory_rows(sec)]
    write_csv(rows, CSV_HEADERS["trajectory"], args.out)
    return EXIT_OK


def cmd_loop(cfg, args):
    ep, co = _ep_and_coeffs(cfg)
    lp = cfg["loop"]
    res = analysis.encircle(ep, co, lp["radius"], int(lp["windings"]), int(lp["samples_per_turn"]),
                            tuple(lp["center_offset"]))
    report = {"windings": res.windings, "permutation": res.permutation, "max_residual": res.max_residual,
              "closure_mismatch": res.mismatch, "initial": [_cplx(z) for z in res.initial],
              "final": [_cplx(z) for z in res.final]}
    if args.out not in (None, "-"):
        rows = [[t, d.control.d, d.control.v3, d.k1.real, d.k1.imag, d.k2.real, d.k2.imag] for t, d in res.samples]
        write_csv(rows, CSV_HEADERS["loop"], args.out)
        base, _ = os.path.splitext(args.out)
        write_json(report, base + ".json")
    else:
        write_json(report, None)
    return EXIT_OK


def cmd_validate(cfg, args):
    from .validation import run_checks

    results = run_checks(cfg)
    width = max(len(r[0]) for r in results)
    lines = [f"{name:<{width}}  {'PASS' if ok else 'FAIL'}  {detail}" for name, ok, detail in results]
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if all(ok for _, ok, _ in results) else EXIT_VALIDATION


COMMANDS = {
    "doublet": cmd_doublet,
    "ep": cmd_ep,
    "unfold": cmd_unfold,
    "surface": cmd_surface,
    "section": cmd_section,
    "trajectory": cmd_trajectory,
    "loop": cmd_loop,
    "validate": cmd_validate,
}


def build_parser():
    ap = argparse.ArgumentParser(prog="jostpole", description="Jost-function resonance doublets and their exceptional point.")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", help="JSON config (default: $JOSTPOLE_CONFIG, else built-in defaults)")
    ap.add_argument("--out", help="output path; '-' or omitted writes to stdout")
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--tol", type=float, help="override the exceptional-point convergence tolerance")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    path = args.config or os.environ.get("JOSTPOLE_CONFIG")
    try:
        cfg = load_config(path)
        if args.tol is not None:
            cfg["tol"] = args.tol
            check_config(cfg)
        if args.threads < 1:
            raise ConfigError("--threads must be at least 1")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return COMMANDS[args.command](cfg, args)
    except (rootfind.NonConvergence, exceptional.SingularJacobian, unfolding.SecondDerivativeTooSmall,
            jost.DerivativePrecision, ArithmeticError) as exc:
        print(f"solver failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
