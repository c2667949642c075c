"""Trap-frequency noise: drift sweeps, Gaussian shot-to-shot averaging, and
displacement-phase optimization.

Shot-to-shot fluctuation of the trap frequency is a mixed channel, so the
average is always taken at the channel level (convex mixture of Choi
matrices) before any metric is evaluated; diamond distance is not linear, so
averaging the metric instead would answer a different question.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import fock, metrics, msgate
from .channel import (
    ChoiMatrix,
    channel_from_propagator,
    gate_channel,
    ideal_gate_choi,
    mix_channels,
)

#: Gauss-Hermite nodes beyond this many sigma carry ~1e-16 weight and only
#: stress the sanity bound on FrequencyOffset, so they are dropped.
GAUSS_TRUNCATION_SIGMAS = 6.0


class QuadratureWarning(UserWarning):
    pass


class FlatLandscapeWarning(UserWarning):
    pass


@dataclass(frozen=True)
class NoiseModel:
    """Gaussian trap-frequency fluctuation of width sigma around center."""

    sigma: float  # rad/s
    center: float  # rad/s, the nominal trap frequency nu0
    quadrature_order: int = 31

    def __post_init__(self):
        if self.sigma < 0.0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")
        if self.quadrature_order < 1:
            raise ValueError(f"quadrature_order must be >= 1, got {self.quadrature_order}")


def gauss_hermite_offsets(model: NoiseModel) -> tuple[list[msgate.FrequencyOffset], np.ndarray]:
    """Offset nodes and normalized weights for the Gaussian average."""
    if model.sigma == 0.0 or model.quadrature_order == 1:
        return [msgate.FrequencyOffset(0.0)], np.array([1.0])
    x, w = np.polynomial.hermite.hermgauss(model.quadrature_order)
    dnu = np.sqrt(2.0) * model.sigma * x
    keep = np.abs(dnu) <= GAUSS_TRUNCATION_SIGMAS * model.sigma
    dnu, w = dnu[keep], w[keep]
    w = w / w.sum()
    return [msgate.FrequencyOffset(d) for d in dnu], w


def spec_for_gate(
    params: msgate.GateParams,
    alpha_mag: float,
    phi: float,
    nbar_th: float,
    leakage_budget: float = fock.DEFAULT_LEAKAGE,
) -> fock.MotionalSpec:
    """Motional spec with truncation padded for the drive's conditional loops."""
    drive = fock.gate_drive_displacement(params.eta_omega, params.delta0)
    return fock.MotionalSpec.with_auto_truncation(
        alpha_mag, phi, nbar_th, leakage_budget, drive_displacement=drive
    )


def drift_sweep(
    params: msgate.GateParams,
    spec: fock.MotionalSpec,
    offsets: list[msgate.FrequencyOffset],
    ideal: ChoiMatrix | None = None,
) -> list[metrics.ErrorReport]:
    """One ErrorReport per deterministic trap-frequency offset."""
    if ideal is None:
        ideal = ideal_gate_choi()
    reports = []
    for off in offsets:
        choi = gate_channel(params, off, spec)
        reports.append(
            metrics.error_report(
                choi,
                ideal,
                delta_nu=off.delta_nu,
                alpha_sq=spec.alpha_sq,
                phi=spec.phi,
                nbar_th=spec.nbar_th,
            )
        )
    return reports


def averaged_channel(
    params: msgate.GateParams,
    spec: fock.MotionalSpec,
    model: NoiseModel,
) -> ChoiMatrix:
    """Channel mixture over the Gauss-Hermite offset nodes."""
    offsets, weights = gauss_hermite_offsets(model)
    chois = [gate_channel(params, off, spec) for off in offsets]
    return mix_channels(list(zip(weights, chois)))


def averaged_gate_error(
    params: msgate.GateParams,
    spec: fock.MotionalSpec,
    model: NoiseModel,
    ideal: ChoiMatrix | None = None,
    check_convergence: bool = False,
) -> metrics.ErrorReport:
    """Metrics of the Gaussian-averaged channel.

    With ``check_convergence`` the infidelity is recomputed at double the
    quadrature order and a QuadratureWarning is emitted if it moves by more
    than 1% relative.
    """
    if ideal is None:
        ideal = ideal_gate_choi()
    mixed = averaged_channel(params, spec, model)
    report = metrics.error_report(
        mixed,
        ideal,
        sigma=model.sigma,
        quadrature_order=model.quadrature_order,
        alpha_sq=spec.alpha_sq,
        phi=spec.phi,
        nbar_th=spec.nbar_th,
    )
    if check_convergence and model.sigma > 0.0:
        doubled = NoiseModel(model.sigma, model.center, 2 * model.quadrature_order + 1)
        i2 = metrics.process_infidelity(averaged_channel(params, spec, doubled), ideal)
        drift = abs(i2 - report.infidelity) / max(i2, 1e-30)
        report.metadata["quadrature_drift"] = drift
        if drift > 0.01:
            warnings.warn(
                f"order {model.quadrature_order} -> {doubled.quadrature_order} moves "
                f"the infidelity by {100 * drift:.2f}%",
                QuadratureWarning,
            )
    return report


def phase_scan(
    params: msgate.GateParams,
    alpha_mag: float,
    nbar_th: float,
    model: NoiseModel,
    phis: np.ndarray,
    leakage_budget: float = fock.DEFAULT_LEAKAGE,
) -> list[tuple[float, metrics.ErrorReport]]:
    """Averaged gate error versus displacement phase.

    Results are pi-periodic in phi, so scans live naturally on [0, pi).
    Propagators are shared across phases: only the motional state changes.
    """
    ideal = ideal_gate_choi()
    offsets, weights = gauss_hermite_offsets(model)
    drive = fock.gate_drive_displacement(params.eta_omega, params.delta0)
    N = fock.choose_truncation(
        alpha_mag, nbar_th, leakage_budget, drive_displacement=drive
    )
    props = [
        msgate.propagator(params, off, N, leakage_budget) for off in offsets
    ]
    out = []
    for phi in phis:
        spec = fock.MotionalSpec(alpha_mag, float(phi), nbar_th, N)
        rho = fock.motional_density_matrix(spec, leakage_budget)
        chois = [channel_from_propagator(U, rho.entries) for U in props]
        mixed = mix_channels(list(zip(weights, chois)))
        out.append(
            (
                float(phi),
                metrics.error_report(
                    mixed,
                    ideal,
                    sigma=model.sigma,
                    alpha_sq=alpha_mag**2,
                    phi=float(phi),
                    nbar_th=nbar_th,
                ),
            )
        )
    return out


def _averaged_infidelity_only(mixed: ChoiMatrix, ideal: ChoiMatrix) -> float:
    return metrics.process_infidelity(mixed, ideal)


def optimize_phase(
    params: msgate.GateParams,
    alpha_mag: float,
    nbar_th: float,
    model: NoiseModel,
    objective: str = "infidelity",
    coarse_points: int = 64,
    tol: float = 1e-3,
    leakage_budget: float = fock.DEFAULT_LEAKAGE,
) -> tuple[float, metrics.ErrorReport, list[tuple[float, float]]]:
    """Phase minimizing the chosen averaged metric over [0, pi).

    A 64-point coarse scan guards against the bimodal landscapes the diamond
    objective develops, then golden-section refines to ``tol`` radians.
    Returns (phi_star, report at phi_star, the coarse scan pairs).
    """
    if objective not in ("infidelity", "diamond"):
        raise ValueError(f"objective must be 'infidelity' or 'diamond', got {objective!r}")
    ideal = ideal_gate_choi()
    offsets, weights = gauss_hermite_offsets(model)
    drive = fock.gate_drive_displacement(params.eta_omega, params.delta0)
    N = fock.choose_truncation(alpha_mag, nbar_th, leakage_budget, drive_displacement=drive)
    props = [msgate.propagator(params, off, N, leakage_budget) for off in offsets]

    def mixed_at(phi: float) -> ChoiMatrix:
        spec = fock.MotionalSpec(alpha_mag, phi, nbar_th, N)
        rho = fock.motional_density_matrix(spec, leakage_budget)
        chois = [channel_from_propagator(U, rho.entries) for U in props]
        return mix_channels(list(zip(weights, chois)))

    def cost(phi: float) -> float:
        mixed = mixed_at(phi)
        if objective == "infidelity":
            return metrics.process_infidelity(mixed, ideal)
        return metrics.diamond_distance(mixed, ideal)

    flat = alpha_mag**2 < 1e-6
    if flat:
        warnings.warn(
            "phase landscape is flat for |alpha|^2 < 1e-6; any phi is optimal",
            FlatLandscapeWarning,
        )

    grid = np.linspace(0.0, math.pi, coarse_points, endpoint=False)
    scan = [(float(p), cost(float(p))) for p in grid]
    if flat:
        phi_star = 0.0
    else:
        k = int(np.argmin([v for _, v in scan]))
        span = math.pi / coarse_points
        lo, hi = grid[k] - span, grid[k] + span
        inv_gr = (math.sqrt(5.0) - 1.0) / 2.0
        c = hi - inv_gr * (hi - lo)
        d = lo + inv_gr * (hi - lo)
        fc, fd = cost(c), cost(d)
        while hi - lo > tol:
            if fc < fd:
                hi, d, fd = d, c, fc
                c = hi - inv_gr * (hi - lo)
                fc = cost(c)
            else:
                lo, c, fc = c, d, fd
                d = lo + inv_gr * (hi - lo)
                fd = cost(d)
        phi_star = float((lo + hi) / 2.0) % math.pi

    report = metrics.error_report(
        mixed_at(phi_star),
        ideal,
        sigma=model.sigma,
        alpha_sq=alpha_mag**2,
        phi=phi_star,
        nbar_th=nbar_th,
        objective=objective,
        flat_landscape=flat,
    )
    return phi_star, report, scan


def error_surface(
    params: msgate.GateParams,
    model: NoiseModel,
    alpha_sq_values: np.ndarray,
    nbar_values: np.ndarray,
    phi: float,
    leakage_budget: float = fock.DEFAULT_LEAKAGE,
) -> dict[str, np.ndarray]:
    """Averaged (I, eps/2) over a grid of |alpha|^2 and nbar at fixed phi.

    Returns arrays keyed ``infidelity``, ``diamond_distance`` and
    ``half_diamond_distance`` of shape (len(alpha_sq_values), len(nbar_values)).
    """
    ideal = ideal_gate_choi()
    offsets, weights = gauss_hermite_offsets(model)
    drive = fock.gate_drive_displacement(params.eta_omega, params.delta0)
    N = fock.choose_truncation(
        math.sqrt(float(np.max(alpha_sq_values))),
        float(np.max(nbar_values)),
        leakage_budget,
        drive_displacement=drive,
    )
    props = [msgate.propagator(params, off, N, leakage_budget) for off in offsets]
    shape = (len(alpha_sq_values), len(nbar_values))
    infid = np.zeros(shape)
    dnorm = np.zeros(shape)
    for ia, asq in enumerate(alpha_sq_values):
        for ib, nbar in enumerate(nbar_values):
            spec = fock.MotionalSpec(math.sqrt(float(asq)), phi, float(nbar), N)
            rho = fock.motional_density_matrix(spec, leakage_budget)
            chois = [channel_from_propagator(U, rho.entries) for U in props]
            mixed = mix_channels(list(zip(weights, chois)))
            infid[ia, ib] = metrics.process_infidelity(mixed, ideal)
            dnorm[ia, ib] = metrics.diamond_distance(mixed, ideal)
    return {
        "alpha_sq": np.asarray(alpha_sq_values, dtype=float),
        "nbar_th": np.asarray(nbar_values, dtype=float),
        "infidelity": infid,
        "diamond_distance": dnorm,
        "half_diamond_distance": 0.5 * dnorm,
    }
