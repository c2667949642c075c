"""Command-line interface: calibration, figure-style sweeps, sideband fits,
and reproduction of the reference parameter sets, all emitting CSV/JSON.

Exit codes: 0 success, 1 usage error, 2 data/config error, 3 numerical
non-convergence.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import fock, metrics, msgate, noise, sideband
from .sdp import SdpError

TWO_PI = 2.0 * math.pi

SWEEP_COLUMNS = "delta_nu_hz,alpha_sq,phi_rad,nbar,infidelity,diamond_distance"
PHASE_COLUMNS = "sigma_hz,alpha_sq,phi_rad,nbar,infidelity,diamond_distance"
SURFACE_COLUMNS = (
    "alpha_sq,nbar,phi_rad,infidelity,diamond_distance,half_diamond_distance"
)


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def _write_csv(path: Path, header: str, rows: list[list[float]]) -> None:
    lines = [header]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


def _write_json(path: Path | None, payload) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    if path is None:
        print(text)
    else:
        Path(path).write_text(text + "\n")


# ---------------------------------------------------------------- config


_GATE_KEYS = {"loops", "tau_us", "nu0_mhz"}
_MOTION_KEYS = {"alpha_sq", "phi_rad", "nbar"}
_NOISE_KEYS = {"sigma_hz", "quadrature_order"}


def _require_keys(section: dict, allowed: set[str], where: str) -> None:
    unknown = set(section) - allowed
    if unknown:
        raise DataError(f"unknown key(s) {sorted(unknown)} in {where}")


def _gate_from_config(cfg: dict) -> msgate.GateParams:
    _require_keys(cfg, _GATE_KEYS, "gate")
    loops = int(cfg.get("loops", 2))
    tau = float(cfg.get("tau_us", 60.0)) * 1e-6
    nu0 = TWO_PI * float(cfg.get("nu0_mhz", 3.0)) * 1e6
    return msgate.calibrate_gate(loops, tau, nu0)


def _motion_from_config(cfg: dict) -> tuple[float, float, float]:
    _require_keys(cfg, _MOTION_KEYS, "motion")
    alpha_sq = float(cfg.get("alpha_sq", 0.0))
    phi = float(cfg.get("phi_rad", 0.0))
    nbar = float(cfg.get("nbar", 0.0))
    if alpha_sq < 0.0 or nbar < 0.0:
        raise DataError("alpha_sq and nbar must be nonnegative")
    return alpha_sq, phi, nbar


def _noise_from_config(cfg: dict, params: msgate.GateParams) -> noise.NoiseModel:
    _require_keys(cfg, _NOISE_KEYS, "noise")
    sigma = TWO_PI * float(cfg.get("sigma_hz", 0.0))
    order = int(cfg.get("quadrature_order", 31))
    return noise.NoiseModel(sigma=sigma, center=params.nu0, quadrature_order=order)


def _load_config(path: str, allowed: set[str]) -> dict:
    try:
        cfg = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise DataError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise DataError(f"config file {path} is not valid JSON: {exc}")
    if not isinstance(cfg, dict):
        raise DataError("config must be a JSON object")
    _require_keys(cfg, allowed, "config")
    return cfg


# ---------------------------------------------------------------- commands


def cmd_calibrate(args) -> int:
    params = msgate.calibrate_gate(args.loops, args.tau_us * 1e-6, TWO_PI * args.nu0_mhz * 1e6)
    payload = {
        "loops": params.loops,
        "tau_us": params.tau * 1e6,
        "nu0_mhz": params.nu0 / TWO_PI / 1e6,
        "delta0_khz": params.delta0 / TWO_PI / 1e3,
        "eta_omega_khz": params.eta_omega / TWO_PI / 1e3,
        "geometric_phase_at_tau": msgate.geometric_phase(
            params, msgate.FrequencyOffset(0.0), params.tau
        ),
    }
    _write_json(Path(args.out) if args.out else None, payload)
    return 0


def cmd_sweep(args) -> int:
    cfg = _load_config(args.config, {"gate", "motion", "sweep", "output"})
    params = _gate_from_config(cfg.get("gate", {}))
    alpha_sq, phi, nbar = _motion_from_config(cfg.get("motion", {}))
    sweep = cfg.get("sweep", {})
    _require_keys(sweep, {"delta_nu_hz"}, "sweep")
    dnus = [float(v) for v in sweep.get("delta_nu_hz", [])]
    out = Path(cfg.get("output", args.out or "sweep.csv"))

    spec = noise.spec_for_gate(params, math.sqrt(alpha_sq), phi, nbar)
    offsets = [msgate.FrequencyOffset(TWO_PI * d) for d in dnus]
    reports = noise.drift_sweep(params, spec, offsets)
    rows = [
        [d, alpha_sq, spec.phi, nbar, r.infidelity, r.diamond_distance]
        for d, r in zip(dnus, reports)
    ]
    _write_csv(out, SWEEP_COLUMNS, rows)
    print(f"wrote {out} ({len(rows)} rows)")
    return 0


def cmd_phase_scan(args) -> int:
    cfg = _load_config(args.config, {"gate", "motion", "noise", "phis", "output"})
    params = _gate_from_config(cfg.get("gate", {}))
    alpha_sq, _, nbar = _motion_from_config(cfg.get("motion", {}))
    model = _noise_from_config(cfg.get("noise", {}), params)
    phis_cfg = cfg.get("phis", {})
    _require_keys(phis_cfg, {"count", "start_rad", "stop_rad"}, "phis")
    count = int(phis_cfg.get("count", 17))
    start = float(phis_cfg.get("start_rad", 0.0))
    stop = float(phis_cfg.get("stop_rad", math.pi))
    phis = np.linspace(start, stop, count, endpoint=False)
    out = Path(cfg.get("output", args.out or "phase_scan.csv"))

    table = noise.phase_scan(params, math.sqrt(alpha_sq), nbar, model, phis)
    rows = [
        [model.sigma / TWO_PI, alpha_sq, phi, nbar, r.infidelity, r.diamond_distance]
        for phi, r in table
    ]
    _write_csv(out, PHASE_COLUMNS, rows)
    print(f"wrote {out} ({len(rows)} rows)")
    return 0


def cmd_surface(args) -> int:
    cfg = _load_config(args.config, {"gate", "noise", "grid", "output"})
    params = _gate_from_config(cfg.get("gate", {}))
    model = _noise_from_config(cfg.get("noise", {}), params)
    grid = cfg.get("grid", {})
    _require_keys(grid, {"alpha_sq_max", "nbar_max", "points", "phi_rad"}, "grid")
    amax = float(grid.get("alpha_sq_max", 2.0))
    nmax = float(grid.get("nbar_max", 2.0))
    pts = int(grid.get("points", 6))
    phi = float(grid.get("phi_rad", 0.0))
    out = Path(cfg.get("output", args.out or "surface.csv"))

    asq = np.linspace(0.0, amax, pts)
    nbar = np.linspace(0.0, nmax, pts)
    surf = noise.error_surface(params, model, asq, nbar, phi)
    rows = []
    for ia, a in enumerate(asq):
        for ib, nb in enumerate(nbar):
            rows.append(
                [
                    a,
                    nb,
                    phi,
                    surf["infidelity"][ia, ib],
                    surf["diamond_distance"][ia, ib],
                    surf["half_diamond_distance"][ia, ib],
                ]
            )
    _write_csv(out, SURFACE_COLUMNS, rows)
    print(f"wrote {out} ({len(rows)} rows)")
    return 0


def cmd_average(args) -> int:
    cfg = _load_config(args.config, {"gate", "motion", "noise", "output"})
    params = _gate_from_config(cfg.get("gate", {}))
    alpha_sq, phi, nbar = _motion_from_config(cfg.get("motion", {}))
    model = _noise_from_config(cfg.get("noise", {}), params)
    out = Path(cfg.get("output", args.out or "average.csv"))

    spec = noise.spec_for_gate(params, math.sqrt(alpha_sq), phi, nbar)
    report = noise.averaged_gate_error(params, spec, model, check_convergence=True)
    rows = [[model.sigma / TWO_PI, alpha_sq, spec.phi, nbar, report.infidelity, report.diamond_distance]]
    _write_csv(out, PHASE_COLUMNS, rows)
    print(f"wrote {out} (1 row)")
    return 0


# ---------------------------------------------------------------- fitting


def read_rabi_csv(path: str, label: str | None = None) -> sideband.RabiDataset:
    """Read `time_us,excited,shots` rows; `#` comment lines are ignored."""
    p = Path(path)
    if not p.exists():
        raise DataError(f"dataset file not found: {path}")
    times, excited, shots = [], [], []
    header_seen = False
    for lineno, raw in enumerate(p.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if not header_seen:
            if line.lower().replace(" ", "") != "time_us,excited,shots":
                raise DataError(f"{path}:{lineno}: expected header 'time_us,excited,shots'")
            header_seen = True
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise DataError(f"{path}:{lineno}: expected 3 comma-separated fields")
        try:
            t = float(parts[0])
            k = int(parts[1])
            m = int(parts[2])
        except ValueError:
            raise DataError(f"{path}:{lineno}: malformed row {line!r}")
        if k < 0 or k > m or m <= 0:
            raise DataError(f"{path}:{lineno}: excited count {k} outside [0, shots={m}]")
        times.append(t * 1e-6)
        excited.append(k)
        shots.append(m)
    if not header_seen:
        raise DataError(f"{path}: no header row found")
    try:
        return sideband.RabiDataset(label or p.stem, np.array(times), np.array(excited), np.array(shots))
    except ValueError as exc:
        raise DataError(f"{path}: {exc}")


def write_rabi_csv(path: Path, dataset: sideband.RabiDataset) -> None:
    rows = [
        [t * 1e6, int(k), int(m)]
        for t, k, m in zip(dataset.times, dataset.excited, dataset.shots)
    ]
    lines = ["time_us,excited,shots"]
    lines += [f"{_fmt(r[0])},{r[1]},{r[2]}" for r in rows]
    Path(path).write_text("\n".join(lines) + "\n")


def _fit_payload(fit: sideband.FitResult) -> dict:
    return {
        "shared": {
            "omega_sb_khz": fit.omega_sb / TWO_PI / 1e3,
            "gamma0_per_s": fit.gamma0,
            "decoherence_time_ms": 1e3 / fit.gamma0 if fit.gamma0 > 0 else None,
        },
        "max_log_likelihood": fit.max_log_likelihood,
        "datasets": [
            {
                "label": e.label,
                "alpha_sq": e.alpha_sq,
                "alpha_sq_err": e.alpha_sq_err,
                "nbar_th": e.nbar_th,
                "nbar_th_err": e.nbar_th_err,
                "boundary_pinned": e.boundary_pinned,
            }
            for e in fit.per_dataset
        ],
    }


def cmd_fit(args) -> int:
    datasets = []
    labels = args.label or []
    for i, path in enumerate(args.data):
        label = labels[i] if i < len(labels) else None
        datasets.append(read_rabi_csv(path, label))
    box = sideband.SearchBox(
        omega_sb=(TWO_PI * args.omega_min_khz * 1e3, TWO_PI * args.omega_max_khz * 1e3),
        gamma0=(args.gamma_min, args.gamma_max),
        alpha_sq=(1e-6, args.alpha_sq_max),
        nbar_th=(1e-6, args.nbar_max),
    )
    fit = sideband.fit_mle(datasets, box, contour_points=args.contour_points)
    payload = _fit_payload(fit)
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    _write_json(outdir / "fit.json", payload)
    for est, ct in zip(fit.per_dataset, fit.contours):
        rows = []
        for ia, a in enumerate(ct.alpha_sq_grid):
            for ib, nb in enumerate(ct.nbar_grid):
                rows.append([a, nb, ct.log_likelihood[ia, ib]])
        _write_csv(outdir / f"contour_{est.label}.csv", "alpha_sq,nbar,log_likelihood", rows)
    print(f"wrote {outdir}/fit.json and {len(fit.contours)} contour grids")
    return 0


def cmd_predict(args) -> int:
    fit_path = Path(args.fit)
    if not fit_path.exists():
        raise DataError(f"fit file not found: {args.fit}")
    payload = json.loads(fit_path.read_text())
    params = msgate.calibrate_gate(args.loops, args.tau_us * 1e-6, TWO_PI * args.nu0_mhz * 1e6)
    model = noise.NoiseModel(TWO_PI * args.sigma_hz, params.nu0, args.quadrature_order)
    out = {"phi_rad": args.phi, "sigma_hz": args.sigma_hz, "datasets": []}
    for ds in payload.get("datasets", []):
        alpha_sq = float(ds["alpha_sq"])
        nbar = float(ds["nbar_th"])
        entry = {"label": ds.get("label", "?"), "alpha_sq": alpha_sq, "nbar_th": nbar}
        for tag, phi in (("requested", args.phi), ("phi_half_pi", math.pi / 2.0)):
            spec = noise.spec_for_gate(params, math.sqrt(alpha_sq), phi, nbar)
            rep = noise.averaged_gate_error(params, spec, model)
            entry[tag] = {
                "phi_rad": phi,
                "infidelity": rep.infidelity,
                "diamond_distance": rep.diamond_distance,
                "diamond_norm_half": rep.metadata["diamond_norm_half"],
            }
        out["datasets"].append(entry)
    _write_json(Path(args.out) if args.out else None, out)
    return 0


# ---------------------------------------------------------------- reproduce


def _anchor_check(name: str, value: float, expected: float, rel_tol: float) -> dict:
    rel = abs(value - expected) / abs(expected) if expected != 0 else abs(value)
    return {
        "name": name,
        "value": value,
        "expected": expected,
        "relative_error": rel,
        "tolerance": rel_tol,
        "pass": bool(rel <= rel_tol),
    }


def _reproduce_fig1(outdir: Path) -> dict:
    params = msgate.calibrate_gate(2, 60e-6, TWO_PI * 3e6)
    dnus = np.arange(-5000.0, 5000.1, 250.0)
    rows = []
    for alpha_sq in np.arange(0.0, 2.01, 0.4):
        for phi in (0.0, math.pi / 2.0):
            spec = noise.spec_for_gate(params, math.sqrt(alpha_sq), phi, 0.0)
            offsets = [msgate.FrequencyOffset(TWO_PI * d) for d in dnus]
            for d, rep in zip(dnus, noise.drift_sweep(params, spec, offsets)):
                rows.append([d, alpha_sq, phi, 0.0, rep.infidelity, rep.diamond_distance])
            if alpha_sq == 0.0:
                break  # phase is irrelevant without displacement
    _write_csv(outdir / "fig1.csv", SWEEP_COLUMNS, rows)
    return {"figure": "fig1", "rows": len(rows), "checks": [], "all_pass": True}


def _reproduce_fig2(outdir: Path) -> dict:
    params = msgate.calibrate_gate(2, 60e-6, TWO_PI * 3e6)
    model = noise.NoiseModel(TWO_PI * 600.0, params.nu0, 31)
    phis = np.linspace(0.0, math.pi, 33, endpoint=False)
    rows = []
    for alpha_sq in np.arange(0.0, 2.01, 0.4):
        table = noise.phase_scan(params, math.sqrt(alpha_sq), 0.0, model, phis)
        for phi, rep in table:
            rows.append([600.0, alpha_sq, phi, 0.0, rep.infidelity, rep.diamond_distance])
    _write_csv(outdir / "fig2.csv", PHASE_COLUMNS, rows)
    two = [r for r in rows if abs(r[1] - 2.0) < 1e-12]
    imin_phi = min(two, key=lambda r: r[4])[2]
    checks = [_anchor_check("fig2_infidelity_minimum_phi", imin_phi, math.pi / 2.0, 0.05)]
    return {"figure": "fig2", "rows": len(rows), "checks": checks,
            "all_pass": all(c["pass"] for c in checks)}


def _reproduce_fig3(outdir: Path) -> dict:
    params = msgate.calibrate_gate(2, 60e-6, TWO_PI * 3e6)
    model = noise.NoiseModel(TWO_PI * 600.0, params.nu0, 31)
    asq = np.linspace(0.0, 2.0, 6)
    nbar = np.linspace(0.0, 2.0, 6)
    rows = []
    for phi in (0.0, math.pi / 2.0):
        surf = noise.error_surface(params, model, asq, nbar, phi)
        for ia, a in enumerate(asq):
            for ib, nb in enumerate(nbar):
                rows.append(
                    [a, nb, phi, surf["infidelity"][ia, ib],
                     surf["diamond_distance"][ia, ib],
                     surf["half_diamond_distance"][ia, ib]]
                )
    _write_csv(outdir / "fig3.csv", SURFACE_COLUMNS, rows)
    return {"figure": "fig3", "rows": len(rows), "checks": [], "all_pass": True}


def _reproduce_sec4(outdir: Path) -> dict:
    from .channel import gate_channel, ideal_gate_choi

    params = msgate.calibrate_gate(2, 60e-6, TWO_PI * 3e6)
    ideal = ideal_gate_choi()
    off = msgate.FrequencyOffset(-TWO_PI * 600.0)
    checks = []
    single = {}
    for phi, i_exp, e_exp in ((0.0, 0.030, 0.45), (math.pi / 2.0, 0.0045, 0.084)):
        spec = noise.spec_for_gate(params, math.sqrt(2.0), phi, 0.0)
        choi = gate_channel(params, off, spec)
        rep = metrics.error_report(choi, ideal)
        single[phi] = rep
        checks.append(_anchor_check(f"single_offset_infidelity_phi={phi:.3f}", rep.infidelity, i_exp, 0.03))
        checks.append(_anchor_check(f"single_offset_diamond_phi={phi:.3f}", rep.diamond_distance, e_exp, 0.05))
    avg = {}
    for sigma_hz in (600.0, 200.0):
        model = noise.NoiseModel(TWO_PI * sigma_hz, params.nu0, 31)
        for phi in (0.0, math.pi / 2.0):
            spec = noise.spec_for_gate(params, math.sqrt(2.0), phi, 0.0)
            avg[(sigma_hz, phi)] = noise.averaged_gate_error(params, spec, model)
    checks.append(_anchor_check("avg600_infidelity_phi=0", avg[(600.0, 0.0)].infidelity, 0.027, 0.05))
    checks.append(_anchor_check("avg600_infidelity_phi=pi/2", avg[(600.0, math.pi / 2)].infidelity, 0.0048, 0.05))
    checks.append(_anchor_check("avg600_diamond_phi=0", avg[(600.0, 0.0)].diamond_distance, 0.098, 0.05))
    checks.append(_anchor_check("avg600_diamond_phi=pi/2", avg[(600.0, math.pi / 2)].diamond_distance, 0.050, 0.05))
    red_i_600 = 1.0 - avg[(600.0, math.pi / 2)].infidelity / avg[(600.0, 0.0)].infidelity
    red_e_600 = 1.0 - avg[(600.0, math.pi / 2)].diamond_distance / avg[(600.0, 0.0)].diamond_distance
    red_i_200 = 1.0 - avg[(200.0, math.pi / 2)].infidelity / avg[(200.0, 0.0)].infidelity
    red_e_200 = 1.0 - avg[(200.0, math.pi / 2)].diamond_distance / avg[(200.0, 0.0)].diamond_distance
    for name, val, exp in (
        ("reduction600_infidelity", red_i_600, 0.82),
        ("reduction600_diamond", red_e_600, 0.49),
        ("reduction200_infidelity", red_i_200, 0.86),
        ("reduction200_diamond", red_e_200, 0.52),
    ):
        rel = abs(val - exp)
        checks.append(
            {"name": name, "value": val, "expected": exp, "absolute_error_pp": 100 * rel,
             "tolerance_pp": 3.0, "pass": bool(rel <= 0.03)}
        )
    rows = [
        [600.0 if k[0] == 600.0 else 200.0, 2.0, k[1], 0.0, r.infidelity, r.diamond_distance]
        for k, r in avg.items()
    ]
    _write_csv(outdir / "sec4_averages.csv", PHASE_COLUMNS, rows)
    return {"figure": "sec4-checkpoints", "checks": checks,
            "all_pass": all(c["pass"] for c in checks)}


def _reproduce_sec5(outdir: Path) -> dict:
    params = msgate.calibrate_gate(2, 60e-6, TWO_PI * 3e6)
    model = noise.NoiseModel(TWO_PI * 600.0, params.nu0, 31)
    cases = {
        "Ez0": (0.0, 0.49),
        "Ez40": (0.47, 0.12),
    }
    reports = {}
    for label, (alpha_sq, nbar) in cases.items():
        for phi in (0.0, math.pi / 2.0):
            spec = noise.spec_for_gate(params, math.sqrt(alpha_sq), phi, nbar)
            reports[(label, phi)] = noise.averaged_gate_error(params, spec, model)
    checks = [
        _anchor_check("Ez0_infidelity", reports[("Ez0", 0.0)].infidelity, 0.0070, 0.05),
        _anchor_check("Ez40_infidelity_phi=0", reports[("Ez40", 0.0)].infidelity, 0.010, 0.05),
        _anchor_check("Ez40_infidelity_phi=pi/2", reports[("Ez40", math.pi / 2)].infidelity, 0.0049, 0.05),
        _anchor_check("Ez0_diamond", reports[("Ez0", 0.0)].diamond_distance, 0.012, 0.05),
        _anchor_check("Ez40_diamond_phi=0", reports[("Ez40", 0.0)].diamond_distance, 0.030, 0.05),
        _anchor_check("Ez40_diamond_phi=pi/2", reports[("Ez40", math.pi / 2)].diamond_distance, 0.026, 0.05),
    ]
    rows = [
        [600.0, cases[label][0], phi, cases[label][1], r.infidelity, r.diamond_distance]
        for (label, phi), r in reports.items()
    ]
    _write_csv(outdir / "sec5_predictions.csv", PHASE_COLUMNS, rows)
    return {"figure": "sec5-predictions", "checks": checks,
            "all_pass": all(c["pass"] for c in checks)}


_REPRODUCERS = {
    "fig1": _reproduce_fig1,
    "fig2": _reproduce_fig2,
    "fig3": _reproduce_fig3,
    "sec4-checkpoints": _reproduce_sec4,
    "sec5-predictions": _reproduce_sec5,
}


def cmd_reproduce(args) -> int:
    if args.id not in _REPRODUCERS:
        raise DataError(
            f"unknown reproduction id {args.id!r}; choose from {sorted(_REPRODUCERS)}"
        )
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    summary = _REPRODUCERS[args.id](outdir)
    _write_json(outdir / f"{args.id}_summary.json", summary)
    for check in summary["checks"]:
        status = "PASS" if check["pass"] else "FAIL"
        print(f"[{status}] {check['name']}: {check['value']:.6g} vs {check['expected']:.6g}")
    print(f"summary written to {outdir}/{args.id}_summary.json")
    return 0


# ---------------------------------------------------------------- entry


def build_parser() -> _Parser:
    p = _Parser(prog="msgatesim", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("calibrate", help="print calibrated drive parameters")
    c.add_argument("--loops", type=int, required=True)
    c.add_argument("--tau-us", type=float, required=True)
    c.add_argument("--nu0-mhz", type=float, default=3.0)
    c.add_argument("--out", default=None)
    c.set_defaults(func=cmd_calibrate)

    for name, func in (
        ("sweep", cmd_sweep),
        ("phase-scan", cmd_phase_scan),
        ("surface", cmd_surface),
        ("average", cmd_average),
    ):
        s = sub.add_parser(name, help=f"run {name.replace('-', ' ')} from a JSON config")
        s.add_argument("--config", required=True)
        s.add_argument("--out", default=None)
        s.set_defaults(func=func)

    f = sub.add_parser("fit", help="maximum-likelihood fit of Rabi CSV datasets")
    f.add_argument("--data", action="append", required=True, help="CSV file (repeatable)")
    f.add_argument("--label", action="append", help="label per dataset (repeatable)")
    f.add_argument("--outdir", default="fit_out")
    f.add_argument("--omega-min-khz", type=float, default=1.0)
    f.add_argument("--omega-max-khz", type=float, default=100.0)
    f.add_argument("--gamma-min", type=float, default=1.0)
    f.add_argument("--gamma-max", type=float, default=1e5)
    f.add_argument("--alpha-sq-max", type=float, default=3.0)
    f.add_argument("--nbar-max", type=float, default=3.0)
    f.add_argument("--contour-points", type=int, default=41)
    f.set_defaults(func=cmd_fit)

    pr = sub.add_parser("predict", help="gate-error predictions from a fit JSON")
    pr.add_argument("--fit", required=True)
    pr.add_argument("--phi", type=float, default=0.0)
    pr.add_argument("--sigma-hz", type=float, default=600.0)
    pr.add_argument("--quadrature-order", type=int, default=31)
    pr.add_argument("--loops", type=int, default=2)
    pr.add_argument("--tau-us", type=float, default=60.0)
    pr.add_argument("--nu0-mhz", type=float, default=3.0)
    pr.add_argument("--out", default=None)
    pr.set_defaults(func=cmd_predict)

    r = sub.add_parser("reproduce", help="rebuild reference figures/checkpoints")
    r.add_argument("id")
    r.add_argument("--outdir", default="reproduce_out")
    r.set_defaults(func=cmd_reproduce)

    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except (SdpError, fock.TruncationError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
