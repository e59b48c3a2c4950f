"""Command line front end: seeded verification suites with JSON/CSV reports.

Usage::

    holonomy-lab <command> [--config path.json] [--seed N] [--samples N] [--out DIR]

Exit status is 0 when every non-conditional check holds, 1 when some check
fails and 2 on configuration or input errors.
"""

import argparse
import csv
import datetime
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .develop import DEFAULT_TOL
from .drill import SurfaceSummary, chain_report, drill_constants
from .epstein import (
    curvature_report,
    dual_roundtrip,
    endpoint_region,
    epstein_frame,
    epstein_patch,
    gauss_derivative_check,
    hypercycle_endpoints,
    normbound_verify,
    renormalizing_mobius,
)
from .errors import ConfigError, HolonomyLabError
from .quaddiff import angular_halfwidth, decompose, pointwise_norm, sup_norm
from .sampling import generator, random_direction, sample_quaddiff
from .variation import dlength_fd, dlength_line_integral, n_integral, theorem_main_report

COMMANDS = ("verify-derivative", "verify-normbound", "verify-epstein", "verify-quasigeodesic",
            "n-integral", "drill-plan", "constants", "sweep")
CSV_HEADER = ("sample", "seed", "ell", "K", "r", "lhs", "rhs", "margin", "holds", "conditional")

DEFAULT_TOLERANCES = {
    "ode": DEFAULT_TOL,
    "derivative": 1e-6,
    "fd_step": 1e-3,
    "n_integral": 1e-10,
    "epstein": 1e-10,
    "gauss": 1e-5,
    "endpoint": 1e-6,
}
DEFAULTS = {
    "command": None,
    "seed": 0,
    "samples": 20,
    "tolerances": {},
    "inputs": {},
    "out": "out",
    "ell_range": [0.5, 2.0],
    "K_target": None,
    "r": None,
    "degree": 4,
    "L0": 0.1,
    "c_drill": 1.0,
    "r_values": [0.2, 0.35, 0.5],
    "K_ratios": [0.1, 0.25, 0.4],
    "kappa_range": [0.05, 0.95],
}


# configuration ----------------------------------------------------------


def load_config(path, command, overrides):
    cfg = json.loads(json.dumps(DEFAULTS))
    if path is not None:
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        unknown = set(data) - set(DEFAULTS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(data)
    # relative input paths are taken relative to the config file
    base = os.path.dirname(os.path.abspath(path)) if path is not None else os.getcwd()
    if isinstance(cfg["inputs"], dict):
        cfg["inputs"] = {k: v if not isinstance(v, str) or os.path.isabs(v) else os.path.join(base, v)
                         for k, v in cfg["inputs"].items()}
    if cfg["command"] not in (None, command):
        raise ConfigError(f"config is for {cfg['command']!r}, not {command!r}")
    cfg["command"] = command
    cfg.update({k: v for k, v in overrides.items() if v is not None})
    tol = dict(DEFAULT_TOLERANCES)
    if not isinstance(cfg["tolerances"], dict):
        raise ConfigError("tolerances must be an object")
    for key, value in cfg["tolerances"].items():
        if key not in DEFAULT_TOLERANCES:
            raise ConfigError(f"unknown tolerance {key!r}")
        if not isinstance(value, (int, float)) or not value > 0:
            raise ConfigError(f"tolerance {key!r} must be positive")
        tol[key] = float(value)
    cfg["tolerances"] = tol
    if not isinstance(cfg["samples"], int) or cfg["samples"] < 0:
        raise ConfigError("samples must be a nonnegative integer")
    if not isinstance(cfg["seed"], int):
        raise ConfigError("seed must be an integer")
    lo, hi = cfg["ell_range"]
    if not 0 < lo <= hi:
        raise ConfigError("ell_range must satisfy 0 < lo <= hi")
    for key in ("L0", "c_drill"):
        if not cfg[key] > 0:
            raise ConfigError(f"{key} must be positive")
    return cfg


# suites -----------------------------------------------------------------


def _row(i, seed, ell, K, r, lhs, rhs, holds, conditional=False):
    return {"sample": i, "seed": seed, "ell": ell, "K": K, "r": r, "lhs": lhs, "rhs": rhs,
            "margin": None if lhs is None else rhs - lhs, "holds": bool(holds), "conditional": bool(conditional)}


def suite_derivative(cfg):
    tol = cfg["tolerances"]
    K = cfg["K_target"] if cfg["K_target"] is not None else 1 / 32
    r = cfg["r"] if cfg["r"] is not None else 0.5
    rows = []
    for i in range(cfg["samples"]):
        phi = sample_quaddiff(cfg["seed"], cfg["ell_range"], K, r, cfg["degree"], index=i)
        direction = random_direction(cfg["seed"], phi.ell, cfg["degree"], index=10**6 + i, r=r)
        line = dlength_line_integral(phi, direction, tol["ode"])
        fd = dlength_fd(phi, direction, tol["fd_step"], tol["ode"])
        dev = abs(line - fd) / max(1.0, abs(fd))
        rows.append(_row(i, cfg["seed"], phi.ell, K, r, dev, tol["derivative"], dev < tol["derivative"]))
    return rows, {"max_relative_deviation": max((r_["lhs"] for r_ in rows), default=0.0)}


def _ratio_K(cfg, r):
    return cfg["K_target"] if cfg["K_target"] is not None else 0.24 * r


def suite_normbound(cfg):
    tol = cfg["tolerances"]
    r = cfg["r"] if cfg["r"] is not None else 0.45
    K = _ratio_K(cfg, r)
    rows = []
    for i in range(cfg["samples"]):
        phi = sample_quaddiff(cfg["seed"], cfg["ell_range"], K, r, cfg["degree"], index=i)
        rep = normbound_verify(phi, r, tol["ode"], K=K, seed=cfg["seed"])
        rows.append(_row(i, cfg["seed"], phi.ell, K, r, rep["lhs"], rep["rhs"], rep["holds"], rep["conditional"]))
    return rows, {}


def suite_epstein(cfg):
    tol = cfg["tolerances"]
    r = cfg["r"] if cfg["r"] is not None else 0.5
    K = cfg["K_target"] if cfg["K_target"] is not None else 1 / 8
    rows = []
    worst = {"eigs": 0.0, "roundtrip": 0.0, "gauss": 0.0}
    for i in range(cfg["samples"]):
        rng = generator(cfg["seed"], 2 * 10**6 + i)
        phi = sample_quaddiff(cfg["seed"], cfg["ell_range"], K, r, cfg["degree"], index=i)
        # a point of the r-neighborhood of the axis, where the pointwise norm is at most K
        half = angular_halfwidth(r)
        z = complex(np.exp(phi.ell * rng.random() + 1j * (0.5 * math.pi + rng.uniform(-half, half))))
        frame = epstein_frame(phi, z)
        n = pointwise_norm(phi, z)
        eig = max(abs(frame.eigs_hat[0] - (1 - 2 * n)), abs(frame.eigs_hat[1] - (1 + 2 * n)))
        g_hyp, bhat = dual_roundtrip(frame)
        trip = max(float(np.max(np.abs(g_hyp - frame.g_hyp)) / np.max(np.abs(frame.g_hyp))),
                   float(np.max(np.abs(bhat - frame.Bhat))))
        gauss = gauss_derivative_check(epstein_patch(phi, z))
        curv = curvature_report(phi, r, t0=math.exp(rng.uniform(0, phi.ell)))
        worst = {k: max(worst[k], v) for k, v in (("eigs", eig), ("roundtrip", trip), ("gauss", gauss))}
        ratio = max(eig / tol["epstein"], trip / tol["epstein"], gauss / tol["gauss"],
                    curv["kappa_gamma"] / curv["bound_gamma"], curv["kappa_alpha"] / curv["bound_alpha"])
        rows.append(_row(i, cfg["seed"], phi.ell, K, r, ratio, 1.0, ratio <= 1.0, curv["hypothesis_violated"]))
    return rows, {"worst": worst}


def suite_quasigeodesic(cfg):
    tol = cfg["tolerances"]
    lo, hi = cfg["kappa_range"]
    if not 0 < lo <= hi < 1:
        raise ConfigError("kappa_range must lie in (0, 1)")
    rows = []
    for i in range(cfg["samples"]):
        rng = generator(cfg["seed"], i)
        kappa = float(rng.uniform(lo, hi))
        radius = endpoint_region(kappa)
        z_minus, z_plus = hypercycle_endpoints(kappa)
        reach = max(abs(z_minus), 1 / abs(z_plus))
        # random admissible endpoints for the renormalizing map
        zm = radius * math.sqrt(rng.random()) * complex(np.exp(2j * math.pi * rng.random()))
        zp_inv = radius * math.sqrt(rng.random()) * complex(np.exp(2j * math.pi * rng.random()))
        zp = 1 / zp_inv if zp_inv != 0 else float("inf")
        _, rep = renormalizing_mobius(zm, zp)
        ok_m = max(rep["dev_plus"], rep["dev_minus"]) <= 2 * kappa / (1 - kappa)
        rows.append(_row(i, cfg["seed"], None, kappa, None, reach, radius + tol["endpoint"],
                         reach <= radius + tol["endpoint"] and ok_m))
    return rows, {}


def suite_n_integral(cfg):
    tol = cfg["tolerances"]
    rows = []
    for i in range(cfg["samples"]):
        phi = random_direction(cfg["seed"], float(generator(cfg["seed"], i).uniform(*cfg["ell_range"])),
                               cfg["degree"], index=i)
        value = n_integral(phi)
        psi0 = phi.coefficient(0)
        exact = -4 * math.pi**2 * psi0 / phi.ell
        zero_sup = sup_norm(decompose(phi)[1])
        dev = max(abs(value - exact), abs(abs(value) - phi.ell * zero_sup))
        rows.append(_row(i, cfg["seed"], phi.ell, None, None, dev, tol["n_integral"], dev <= tol["n_integral"]))
    return rows, {}


def suite_sweep(cfg):
    tol = cfg["tolerances"]
    rows = []
    i = 0
    for r in cfg["r_values"]:
        for ratio in cfg["K_ratios"]:
            for j in range(cfg["samples"]):
                K = ratio * r
                phi = sample_quaddiff(cfg["seed"], cfg["ell_range"], K, r, cfg["degree"], index=i)
                direction = random_direction(cfg["seed"], phi.ell, cfg["degree"], index=10**6 + i, r=r)
                rep = theorem_main_report(phi, direction, r, tol["ode"], seed=cfg["seed"], K=K)
                rows.append(_row(i, cfg["seed"], phi.ell, K, r, rep["lhs"], rep["rhs"], rep["holds"],
                                 rep["conditional"]))
                i += 1
    return rows, {}


def run_drill_plan(cfg):
    path = cfg["inputs"].get("summary") if isinstance(cfg["inputs"], dict) else None
    if path is None:
        raise ConfigError("drill-plan needs inputs.summary")
    try:
        with open(path) as fh:
            summary = SurfaceSummary.from_json(fh.read())
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"cannot read summary {path}: {exc}") from exc
    report = chain_report(summary, drill_constants(cfg["L0"], cfg["c_drill"]))
    rows = []
    for i, step in enumerate(s for s in report.steps if s.kind != "audit"):
        rows.append(_row(i, cfg["seed"], None, None, None, step.lhs, step.rhs, step.holds, step.conditional))
    return rows, {"chain": report.to_dict()}


def run_constants(cfg):
    return [], {"constants": drill_constants(cfg["L0"], cfg["c_drill"]).to_dict()}


SUITES = {
    "verify-derivative": suite_derivative,
    "verify-normbound": suite_normbound,
    "verify-epstein": suite_epstein,
    "verify-quasigeodesic": suite_quasigeodesic,
    "n-integral": suite_n_integral,
    "drill-plan": run_drill_plan,
    "constants": run_constants,
    "sweep": suite_sweep,
}


# output -----------------------------------------------------------------


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_outputs(out_dir, cfg, rows, extra):
    os.makedirs(out_dir, exist_ok=True)
    failed = [r for r in rows if not r["holds"] and not r["conditional"]]
    report = {
        "command": cfg["command"],
        "config": {k: cfg[k] for k in sorted(cfg) if k != "out"},
        "summary": {
            "samples": len(rows),
            "holds": sum(r["holds"] for r in rows),
            "failed": len(failed),
            "conditional": sum(r["conditional"] for r in rows),
        },
        "results": extra,
        "rows": rows,
    }
    with open(os.path.join(out_dir, "report.json"), "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")
    with open(os.path.join(out_dir, "rows.csv"), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for r in rows:
            writer.writerow([_fmt(r[k]) for k in CSV_HEADER])
    meta = {"version": __version__, "created": datetime.datetime.now(datetime.timezone.utc).isoformat(),
            "argv": sys.argv}
    with open(os.path.join(out_dir, "metadata.json"), "w") as fh:
        json.dump(meta, fh, indent=2)
        fh.write("\n")
    return failed, report["summary"]


def _json_default(obj):
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def build_parser():
    parser = argparse.ArgumentParser(prog="holonomy-lab", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--samples", type=int)
    parser.add_argument("--out", help="output directory")
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        cfg = load_config(args.config, args.command, {"seed": args.seed, "samples": args.samples, "out": args.out})
        rows, extra = SUITES[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except HolonomyLabError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    failed, summary = write_outputs(cfg["out"], cfg, rows, extra)
    for r in failed:
        print(f"{args.command}: check failed for sample {r['sample']} (seed {r['seed']}): "
              f"lhs={r['lhs']!r} rhs={r['rhs']!r}", file=sys.stderr)
    print(f"{args.command}: {summary['samples']} rows, {summary['failed']} failed, "
          f"{summary['conditional']} conditional -> {cfg['out']}")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
