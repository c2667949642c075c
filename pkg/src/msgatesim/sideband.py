"""Blue-sideband Rabi flopping: forward model, binomial maximum likelihood
with (omega_sb, gamma0) shared across datasets, and likelihood-contour
uncertainties.

The excited-state probability is

    P_e(t) = 1/2 - 1/2 sum_n P_n cos(2 omega_sb sqrt(n+1) t) e^{-gamma0 (n+1) t}

with P_n the motional populations, so the data constrain (|alpha|^2, nbar_th)
per dataset but carry no information about the displacement phase.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from scipy.optimize import minimize
from scipy.special import gammaln

from . import fock, metrics, msgate, noise

_PE_CLAMP = 1e-9  # keeps binomial log terms finite for outlier counts


class ContourWarning(UserWarning):
    pass


@dataclass(frozen=True)
class RabiDataset:
    """Time-tagged excited-state counts from one flopping experiment."""

    label: str
    times: np.ndarray  # s, strictly increasing
    excited: np.ndarray  # counts <= shots
    shots: np.ndarray  # per-point shot numbers M

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        k = np.asarray(self.excited, dtype=int)
        m = np.asarray(self.shots, dtype=int)
        if not (t.shape == k.shape == m.shape) or t.ndim != 1:
            raise ValueError("times, excited and shots must be equal-length 1-d arrays")
        if t.size and np.any(np.diff(t) <= 0.0):
            raise ValueError("times must be strictly increasing")
        if np.any(m <= 0):
            raise ValueError("shots must be positive")
        if np.any(k < 0) or np.any(k > m):
            raise ValueError("excited counts must lie in [0, shots]")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "excited", k)
        object.__setattr__(self, "shots", m)

    def __len__(self) -> int:
        return self.times.size


@dataclass(frozen=True)
class RabiModel:
    """Shared flopping parameters: base sideband rate and base decoherence."""

    omega_sb: float  # rad/s, the eta*Omega product in omega_{n,n+1} = omega_sb sqrt(n+1)
    gamma0: float  # 1/s, gamma_n = gamma0 (n+1)

    def __post_init__(self):
        if self.omega_sb <= 0.0:
            raise ValueError(f"omega_sb must be > 0, got {self.omega_sb}")
        if self.gamma0 < 0.0:
            raise ValueError(f"gamma0 must be >= 0, got {self.gamma0}")


@dataclass(frozen=True)
class SearchBox:
    """Bounds for the fit, each a (low, high) pair with low > 0."""

    omega_sb: tuple[float, float]
    gamma0: tuple[float, float]
    alpha_sq: tuple[float, float] = (1e-6, 4.0)
    nbar_th: tuple[float, float] = (1e-6, 4.0)

    def __post_init__(self):
        for name in ("omega_sb", "gamma0", "alpha_sq", "nbar_th"):
            lo, hi = getattr(self, name)
            if not 0.0 < lo < hi:
                raise ValueError(f"{name} bounds must satisfy 0 < low < high")


@dataclass(frozen=True)
class DatasetEstimate:
    label: str
    alpha_sq: float
    nbar_th: float
    alpha_sq_err: float | None = None
    nbar_th_err: float | None = None
    boundary_pinned: bool = False


@dataclass(frozen=True)
class FitResult:
    omega_sb: float
    gamma0: float
    per_dataset: tuple[DatasetEstimate, ...]
    max_log_likelihood: float
    n_restarts: int = 0
    contours: tuple["ContourResult", ...] = ()


@dataclass(frozen=True)
class ContourResult:
    alpha_sq_grid: np.ndarray = field(repr=False)
    nbar_grid: np.ndarray = field(repr=False)
    log_likelihood: np.ndarray = field(repr=False)
    max_log_likelihood: float
    threshold: float  # max - 1, the e^{-1} likelihood level
    alpha_sq_uncertainty: float
    nbar_uncertainty: float
    boundary_pinned: bool


def population_distribution(spec: fock.MotionalSpec, leakage_budget: float = fock.DEFAULT_LEAKAGE) -> np.ndarray:
    """Motional populations P_n, the density matrix diagonal."""
    rho = fock.motional_density_matrix(spec, leakage_budget)
    return np.real(np.diag(rho.entries))


def excited_probability(model: RabiModel, spec: fock.MotionalSpec, t) -> np.ndarray | float:
    """Blue-sideband P_e(t); exactly 0 at t = 0 and 1/2 at late times when
    gamma0 > 0.  Populations are renormalized over the truncated ladder."""
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t_arr < 0.0):
        raise ValueError("t must be >= 0")
    pn = fock.displaced_thermal_populations(spec.alpha_sq, spec.nbar_th, spec.truncation)
    pn = pn / pn.sum()
    n = np.arange(pn.size)
    rabi = 2.0 * model.omega_sb * np.sqrt(n + 1.0)
    decay = model.gamma0 * (n + 1.0)
    osc = np.cos(np.outer(t_arr, rabi)) * np.exp(-np.outer(t_arr, decay))
    pe = 0.5 - 0.5 * (osc @ pn)
    pe = np.clip(pe, 0.0, 1.0)
    return pe if np.ndim(t) else float(pe[0])


def _binom_logpmf(k: np.ndarray, m: np.ndarray, p: np.ndarray) -> np.ndarray:
    p = np.clip(p, _PE_CLAMP, 1.0 - _PE_CLAMP)
    return (
        gammaln(m + 1.0)
        - gammaln(k + 1.0)
        - gammaln(m - k + 1.0)
        + k * np.log(p)
        + (m - k) * np.log1p(-p)
    )


def log_likelihood(
    model: RabiModel,
    specs: Sequence[fock.MotionalSpec],
    datasets: Sequence[RabiDataset],
) -> float:
    """Binomial log likelihood summed over datasets, with (omega_sb, gamma0)
    common to all of them and one motional spec per dataset."""
    if len(specs) != len(datasets):
        raise ValueError("need one motional spec per dataset")
    total = 0.0
    for spec, data in zip(specs, datasets):
        if len(data) == 0:
            continue
        pe = excited_probability(model, spec, data.times)
        total += float(np.sum(_binom_logpmf(data.excited, data.shots, pe)))
    return total


def _fit_truncation(box: SearchBox, leakage: float = 1e-8) -> int:
    """One ladder size covering the whole search box keeps the objective
    smooth and the hot loop free of truncation searches."""
    return fock.choose_truncation(math.sqrt(box.alpha_sq[1]), box.nbar_th[1], leakage)


def _objective_factory(datasets, box):
    """Negative log likelihood over log-parameters, inlined for the hot loop.

    Equivalent to -log_likelihood (asserted by tests) but with the
    time-Fock grids, binomial coefficients, and count arrays hoisted out.
    """
    n_fit = _fit_truncation(box)
    lo = np.log([box.omega_sb[0], box.gamma0[0]] + [box.alpha_sq[0], box.nbar_th[0]] * len(datasets))
    hi = np.log([box.omega_sb[1], box.gamma0[1]] + [box.alpha_sq[1], box.nbar_th[1]] * len(datasets))

    levels = np.arange(n_fit)
    tables = []
    for d in datasets:
        if len(d) == 0:
            tables.append(None)
            continue
        rabi_grid = 2.0 * np.outer(d.times, np.sqrt(levels + 1.0))
        decay_grid = np.outer(d.times, levels + 1.0)
        k = d.excited.astype(float)
        mk = (d.shots - d.excited).astype(float)
        log_comb = float(
            np.sum(gammaln(d.shots + 1.0) - gammaln(k + 1.0) - gammaln(mk + 1.0))
        )
        tables.append((rabi_grid, decay_grid, k, mk, log_comb))

    def unpack(u):
        th = np.exp(np.clip(u, lo, hi))
        model = RabiModel(th[0], th[1])
        specs = [
            fock.MotionalSpec(math.sqrt(th[2 + 2 * i]), 0.0, th[3 + 2 * i], n_fit)
            for i in range(len(datasets))
        ]
        return model, specs

    def cost(u):
        # quadratic penalty keeps the simplex inside the box without killing it
        penalty = float(np.sum(np.square(np.maximum(u - hi, 0.0)))
                        + np.sum(np.square(np.maximum(lo - u, 0.0))))
        th = np.exp(np.clip(u, lo, hi))
        omega, gamma0 = th[0], th[1]
        total = 0.0
        for i, table in enumerate(tables):
            if table is None:
                continue
            rabi_grid, decay_grid, k, mk, log_comb = table
            pn = fock.displaced_thermal_populations(th[2 + 2 * i], th[3 + 2 * i], n_fit)
            pn = pn / pn.sum()
            pe = 0.5 - 0.5 * ((np.cos(omega * rabi_grid) * np.exp(-gamma0 * decay_grid)) @ pn)
            pe = np.clip(pe, _PE_CLAMP, 1.0 - _PE_CLAMP)
            total += log_comb + float(k @ np.log(pe) + mk @ np.log1p(-pe))
        return -total + 1e4 * penalty

    return cost, unpack, lo, hi


def _start_lattice(lo: np.ndarray, hi: np.ndarray, n_datasets: int) -> list[np.ndarray]:
    """Eight deterministic Nelder-Mead starts.

    Shared rates start on a coarse log-space lattice; the motional parameters
    start at moderate occupations (0.05 and 0.5 quanta, clipped into the box)
    because the geometric middle of a box reaching down to ~0 would start
    every simplex in the zero-excitation corner.
    """
    starts = []
    for fo, fg, level in itertools.product((0.35, 0.65), (0.3, 0.7), (0.05, 0.5)):
        u = np.empty_like(lo)
        u[0] = lo[0] + fo * (hi[0] - lo[0])
        u[1] = lo[1] + fg * (hi[1] - lo[1])
        for i in range(n_datasets):
            u[2 + 2 * i] = np.clip(math.log(level), lo[2 + 2 * i], hi[2 + 2 * i])
            u[3 + 2 * i] = np.clip(math.log(level), lo[3 + 2 * i], hi[3 + 2 * i])
        starts.append(u)
    return starts


def fit_mle(
    datasets: Sequence[RabiDataset],
    box: SearchBox,
    compute_uncertainties: bool = True,
    contour_points: int = 41,
) -> FitResult:
    """Maximum-likelihood fit of omega_sb, gamma0 (shared) and per-dataset
    (|alpha|^2, nbar_th), by multi-start Nelder-Mead over log parameters."""
    if not datasets:
        raise ValueError("need at least one dataset")
    cost, unpack, lo, hi = _objective_factory(datasets, box)
    best = None
    for u0 in _start_lattice(lo, hi, len(datasets)):
        res = minimize(
            cost,
            u0,
            method="Nelder-Mead",
            options={"maxiter": 1500, "xatol": 1e-5, "fatol": 1e-7, "adaptive": True},
        )
        if best is None or res.fun < best.fun:
            best = res
    # polish the winner
    res = minimize(
        cost,
        best.x,
        method="Nelder-Mead",
        options={"maxiter": 6000, "xatol": 1e-8, "fatol": 1e-11, "adaptive": True},
    )
    if res.fun > best.fun:
        res = best
    u = np.clip(res.x, lo, hi)
    model, specs = unpack(u)
    estimates = [
        DatasetEstimate(
            label=d.label,
            alpha_sq=specs[i].alpha_sq,
            nbar_th=specs[i].nbar_th,
        )
        for i, d in enumerate(datasets)
    ]
    fit = FitResult(
        omega_sb=model.omega_sb,
        gamma0=model.gamma0,
        per_dataset=tuple(estimates),
        # evaluated at the clipped point so the box penalty never leaks in
        max_log_likelihood=-float(cost(u)),
        n_restarts=8,
    )
    if compute_uncertainties:
        contours = []
        estimates = []
        for i, d in enumerate(datasets):
            ct = likelihood_contour(fit, i, datasets, points=contour_points)
            contours.append(ct)
            estimates.append(
                replace(
                    fit.per_dataset[i],
                    alpha_sq_err=ct.alpha_sq_uncertainty,
                    nbar_th_err=ct.nbar_uncertainty,
                    boundary_pinned=ct.boundary_pinned,
                )
            )
        fit = replace(fit, per_dataset=tuple(estimates), contours=tuple(contours))
    return fit


def _contour_range(values: np.ndarray, mask_any: np.ndarray) -> tuple[float, float]:
    sel = values[mask_any]
    return float(sel.min()), float(sel.max())


def likelihood_contour(
    fit: FitResult,
    dataset_index: int,
    datasets: Sequence[RabiDataset],
    alpha_sq_grid: np.ndarray | None = None,
    nbar_grid: np.ndarray | None = None,
    points: int = 41,
    span_factor: float = 12.0,
) -> ContourResult:
    """Per-dataset log-likelihood over (|alpha|^2, nbar) with omega_sb and
    gamma0 pinned at their fitted values.

    The uncertainty of each parameter is half its range on the contour where
    the likelihood has fallen to e^{-1} of the maximum; if either parameter
    sits at the physical boundary the full range is reported instead.
    """
    est = fit.per_dataset[dataset_index]
    data = datasets[dataset_index]
    model = RabiModel(fit.omega_sb, fit.gamma0)

    def evaluate(a_grid, n_grid_vals):
        n_lad = fock.choose_truncation(
            math.sqrt(float(a_grid[-1])), float(n_grid_vals[-1]), 1e-8
        )
        out = np.empty((a_grid.size, n_grid_vals.size))
        for ia, asq in enumerate(a_grid):
            for ib, nb in enumerate(n_grid_vals):
                spec = fock.MotionalSpec(
                    math.sqrt(max(float(asq), 0.0)), 0.0, max(float(nb), 0.0), n_lad
                )
                pe = excited_probability(model, spec, data.times)
                out[ia, ib] = float(np.sum(_binom_logpmf(data.excited, data.shots, pe)))
        return out

    # width heuristic: binomial Fisher information scales like sqrt(sum M);
    # auto grids then grow until the e^-1 region stops touching their edges,
    # since the flat alpha_sq/nbar trade-off valley can stretch it far
    total_shots = float(np.sum(data.shots))
    scale = span_factor / math.sqrt(max(total_shots, 1.0))
    half_a = max(scale * (1.0 + est.alpha_sq), 0.02)
    half_n = max(scale * (1.0 + est.nbar_th), 0.02)
    auto = alpha_sq_grid is None and nbar_grid is None
    for _ in range(5):
        if auto or alpha_sq_grid is None:
            alpha_sq_grid = np.linspace(
                max(est.alpha_sq - half_a, 0.0), est.alpha_sq + half_a, points
            )
        if auto or nbar_grid is None:
            nbar_grid = np.linspace(
                max(est.nbar_th - half_n, 0.0), est.nbar_th + half_n, points
            )
        ll = evaluate(alpha_sq_grid, nbar_grid)
        inside = ll >= float(ll.max()) - 1.0
        if not auto:
            break
        grow = False
        if inside[-1, :].any() or (inside[0, :].any() and alpha_sq_grid[0] > 0.0):
            half_a *= 2.0
            grow = True
        if inside[:, -1].any() or (inside[:, 0].any() and nbar_grid[0] > 0.0):
            half_n *= 2.0
            grow = True
        if not grow:
            break

    ll_max = float(ll.max())
    threshold = ll_max - 1.0
    inside = ll >= threshold
    n_inside = int(inside.sum())
    if n_inside < 4:
        warnings.warn(
            f"e^-1 contour spans only {n_inside} grid cells; grid too coarse",
            ContourWarning,
        )
    a_lo, a_hi = _contour_range(alpha_sq_grid, inside.any(axis=1))
    n_lo, n_hi = _contour_range(nbar_grid, inside.any(axis=0))
    # pinned when the estimate or the contour touches the physical boundary,
    # in which case the full range stands in for the half range
    eps_a = alpha_sq_grid[1] - alpha_sq_grid[0]
    eps_n = nbar_grid[1] - nbar_grid[0]
    pinned = bool(
        est.alpha_sq <= eps_a
        or est.nbar_th <= eps_n
        or (alpha_sq_grid[0] == 0.0 and a_lo <= eps_a)
        or (nbar_grid[0] == 0.0 and n_lo <= eps_n)
    )
    factor = 1.0 if pinned else 0.5
    return ContourResult(
        alpha_sq_grid=alpha_sq_grid,
        nbar_grid=nbar_grid,
        log_likelihood=ll,
        max_log_likelihood=ll_max,
        threshold=threshold,
        alpha_sq_uncertainty=factor * (a_hi - a_lo),
        nbar_uncertainty=factor * (n_hi - n_lo),
        boundary_pinned=pinned,
    )


def predict_gate_error(
    fit: FitResult,
    params: msgate.GateParams,
    model: noise.NoiseModel,
    phi: float,
) -> list[metrics.ErrorReport]:
    """Averaged MS-gate error for each dataset's fitted motional state at the
    supplied displacement phase (the fit itself cannot determine phi)."""
    reports = []
    for est in fit.per_dataset:
        spec = noise.spec_for_gate(params, math.sqrt(est.alpha_sq), phi, est.nbar_th)
        rep = noise.averaged_gate_error(params, spec, model)
        rep.metadata["dataset"] = est.label
        reports.append(rep)
    return reports
