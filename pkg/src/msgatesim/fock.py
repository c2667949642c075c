"""Truncated harmonic-oscillator numerics.

Fock-basis building blocks used everywhere else: generalized Laguerre
polynomials, displaced Fock states, displacement matrices, thermal weights,
and displaced-thermal density matrices, all on a finite ladder of ``N``
levels with an explicit truncation-leakage budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.constants import hbar, k as k_boltzmann

DEFAULT_LEAKAGE = 1e-8

# Hard ceiling for automatic truncation searches.  Anything above this is a
# sign the requested state is outside the regime this package targets.
TRUNCATION_CAP = 512


class TruncationError(RuntimeError):
    """Raised when a requested Fock truncation cannot hold the state."""


def _reduce_phase(phi: float) -> float:
    phi = math.fmod(phi, 2.0 * math.pi)
    if phi < 0.0:
        phi += 2.0 * math.pi
    return phi


@dataclass(frozen=True)
class MotionalSpec:
    """Initial motional state: coherent displacement plus thermal occupation.

    ``alpha_mag`` and ``phi`` define the displacement alpha = |alpha| e^{i phi},
    ``nbar_th`` the thermal occupation, and ``truncation`` the number of Fock
    levels kept.  ``phi`` is stored reduced to [0, 2*pi).
    """

    alpha_mag: float
    phi: float
    nbar_th: float
    truncation: int

    def __post_init__(self):
        if self.alpha_mag < 0.0:
            raise ValueError(f"alpha_mag must be >= 0, got {self.alpha_mag}")
        if self.nbar_th < 0.0:
            raise ValueError(f"nbar_th must be >= 0, got {self.nbar_th}")
        if self.truncation < 1:
            raise ValueError(f"truncation must be >= 1, got {self.truncation}")
        object.__setattr__(self, "phi", _reduce_phase(self.phi))

    @property
    def alpha(self) -> complex:
        return self.alpha_mag * np.exp(1j * self.phi)

    @property
    def alpha_sq(self) -> float:
        return self.alpha_mag**2

    @property
    def mean_occupation(self) -> float:
        return self.alpha_mag**2 + self.nbar_th

    @classmethod
    def with_auto_truncation(
        cls,
        alpha_mag: float,
        phi: float,
        nbar_th: float,
        leakage_budget: float = DEFAULT_LEAKAGE,
        drive_displacement: float = 0.0,
    ) -> "MotionalSpec":
        n = choose_truncation(
            alpha_mag,
            nbar_th,
            leakage_budget,
            drive_displacement=drive_displacement,
        )
        return cls(alpha_mag, phi, nbar_th, n)


@dataclass(frozen=True)
class MotionalDensityMatrix:
    """Hermitian PSD matrix on the truncated Fock ladder, trace <= 1."""

    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=complex)
        if e.ndim != 2 or e.shape[0] != e.shape[1]:
            raise ValueError("density matrix must be square")
        object.__setattr__(self, "entries", e)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.entries)))

    def mean_occupation(self) -> float:
        return float(np.real(np.diag(self.entries) @ np.arange(self.dim)))

    def validate(self, leakage_budget: float = DEFAULT_LEAKAGE) -> None:
        e = self.entries
        if np.max(np.abs(e - e.conj().T)) > 1e-12:
            raise ValueError("density matrix is not Hermitian to 1e-12")
        if np.linalg.eigvalsh(e)[0] < -1e-10:
            raise ValueError("density matrix has eigenvalue below -1e-10")
        if not (1.0 - leakage_budget <= self.trace <= 1.0 + 1e-12):
            raise TruncationError(
                f"trace {self.trace} outside [1 - {leakage_budget}, 1]; "
                "increase the truncation"
            )


def laguerre(n: int, k: float, x: float) -> float:
    """Generalized Laguerre polynomial L_n^{(k)}(x) by the three-term recurrence.

    Stable for x >= 0.  Callers that would need a negative upper index k go
    through the conjugate-symmetry identity in
    :func:`displaced_fock_coefficients` instead.
    """
    if n < 0:
        raise ValueError(f"Laguerre order must be >= 0, got {n}")
    if n == 0:
        return 1.0
    prev = 1.0
    cur = 1.0 + k - x
    for i in range(2, n + 1):
        prev, cur = cur, ((2 * i - 1 + k - x) * cur - (i - 1 + k) * prev) / i
    return cur


def displaced_fock_coefficients(
    alpha: complex,
    n: int,
    N: int,
    leakage_budget: float = DEFAULT_LEAKAGE,
    validate: bool = True,
) -> np.ndarray:
    """Fock amplitudes ``<m|D(alpha)|n>`` for m = 0..N-1.

    For m >= n this is ``e^{-|a|^2/2} sqrt(n!/m!) a^{m-n} L_n^{(m-n)}(|a|^2)``;
    for m < n the conjugate-symmetry identity is used so the Laguerre upper
    index stays nonnegative.  Factorial ratios are computed in log space.
    """
    if not 0 <= n < N:
        raise ValueError(f"need 0 <= n < N, got n={n}, N={N}")
    alpha = complex(alpha)
    x = abs(alpha) ** 2
    out = np.empty(N, dtype=complex)
    if x == 0.0:
        out[:] = 0.0
        out[n] = 1.0
        return out
    lg = [math.lgamma(m + 1) for m in range(N)]
    gauss = math.exp(-x / 2.0) if x < 1400.0 else 0.0
    for m in range(N):
        if m >= n:
            pref = gauss * math.exp(0.5 * (lg[n] - lg[m]))
            out[m] = pref * alpha ** (m - n) * laguerre(n, m - n, x)
        else:
            pref = gauss * math.exp(0.5 * (lg[m] - lg[n]))
            out[m] = pref * (-alpha.conjugate()) ** (n - m) * laguerre(m, n - m, x)
    if validate:
        norm = float(np.sum(np.abs(out) ** 2))
        if norm < 1.0 - leakage_budget:
            raise TruncationError(
                f"displaced Fock column |alpha|={abs(alpha):.3g}, n={n} keeps "
                f"norm {norm:.12f} < 1 - {leakage_budget} at N={N}"
            )
    return out


def displacement_buffer(alpha: complex) -> int:
    """Fock levels a displacement by ``alpha`` can meaningfully populate
    beyond a low-lying starting index."""
    a = abs(alpha)
    return math.ceil(4.0 * a * a + 8.0 * a)


def complete_columns(D: np.ndarray, leakage_budget: float = DEFAULT_LEAKAGE) -> int:
    """Leading columns of a truncated isometry that kept their norm.

    Column tails below ``leakage_budget`` also bound the Gram defect of the
    block by Cauchy-Schwarz, so the first K columns act unitarily to within
    the budget.
    """
    norms = np.sum(np.abs(D) ** 2, axis=0)
    bad = np.nonzero(norms < 1.0 - leakage_budget)[0]
    return int(bad[0]) if bad.size else D.shape[1]


def displacement_matrix(
    alpha: complex,
    N: int,
    leakage_budget: float = DEFAULT_LEAKAGE,
    validate: bool = True,
) -> np.ndarray:
    """Truncated displacement operator D(alpha) = exp(alpha a^dag - alpha^* a).

    Columns are exact infinite-space amplitudes cut at N, so the matrix is
    only approximately unitary: columns near the top of the ladder lose norm
    (the spread grows like |alpha| sqrt(n)).  Validation requires at least
    one norm-complete column and checks the Gram defect on the complete
    block; end-to-end truncation quality is guarded separately by the
    channel-level trace-preservation check.
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    D = np.empty((N, N), dtype=complex)
    for n in range(N):
        D[:, n] = displaced_fock_coefficients(alpha, n, N, validate=False)
    if validate and abs(alpha) > 0.0:
        safe = complete_columns(D, leakage_budget)
        if safe < 1:
            raise TruncationError(
                f"every column of D(alpha) at N={N} lost more than "
                f"{leakage_budget} of its norm for |alpha|={abs(alpha):.3g}"
            )
        gram = D[:, :safe].conj().T @ D[:, :safe]
        defect = np.max(np.abs(gram - np.eye(safe)))
        if defect > 10.0 * leakage_budget:
            raise TruncationError(
                f"unitarity defect {defect:.3e} on the low {safe}x{safe} block "
                f"exceeds 10x the leakage budget {leakage_budget}"
            )
    return D


def displacement_columns(alpha: complex, N: int, n_cols: int) -> np.ndarray:
    """First ``n_cols`` columns of D(alpha) on N levels by the ladder
    recurrence C[m+1, k] = (sqrt(k) C[m, k-1] + alpha C[m, k]) / sqrt(m+1).

    Vectorized over columns, so it costs O(N * n_cols) numpy work instead of
    the per-entry Laguerre evaluations of
    :func:`displaced_fock_coefficients`; both agree to rounding error.
    """
    alpha = complex(alpha)
    x = abs(alpha) ** 2
    k = np.arange(n_cols)
    C = np.zeros((N, n_cols), dtype=complex)
    if x == 0.0:
        np.fill_diagonal(C, 1.0)
        return C
    # <0|D|k> = e^{-x/2} (-conj(alpha))^k / sqrt(k!), assembled in log space
    lgk = np.array([math.lgamma(i + 1) for i in range(n_cols)])
    mag = np.exp(-x / 2.0 + k * math.log(abs(alpha)) - 0.5 * lgk)
    phase = np.exp(1j * k * np.angle(-alpha.conjugate()))
    C[0, :] = mag * phase
    sqrt_k = np.sqrt(k)
    for m in range(N - 1):
        shifted = np.empty(n_cols, dtype=complex)
        shifted[0] = 0.0
        shifted[1:] = C[m, :-1]
        C[m + 1, :] = (sqrt_k * shifted + alpha * C[m, :]) / math.sqrt(m + 1)
    return C


def displaced_thermal_populations(alpha_sq: float, nbar_th: float, N: int) -> np.ndarray:
    """Fock populations P_n of the displaced thermal state, phase-free.

    Uses the closed form P_n = e^{-x/(1+nb)}/(1+nb) * r^n L_n(-x/(nb(1+nb)))
    with r = nb/(1+nb), evaluated through a recurrence on r^n L_n so the
    huge Laguerre values at small nb never materialize.  Poisson and thermal
    limits fall out smoothly.
    """
    if alpha_sq < 0.0 or nbar_th < 0.0:
        raise ValueError("alpha_sq and nbar_th must be >= 0")
    x = float(alpha_sq)
    nb = float(nbar_th)
    if x == 0.0:
        return thermal_weights(nb, N)
    out = np.empty(N)
    pref = math.exp(-x / (1.0 + nb)) / (1.0 + nb)
    r = nb / (1.0 + nb)
    ry = x / (1.0 + nb) ** 2  # r * |argument|, stays O(x) as nb -> 0
    # scaled recurrence: Lt_n = r^n L_n(-y);  y = x/(nb(1+nb))
    lt_prev = 1.0
    lt_cur = r + ry
    out[0] = pref * lt_prev
    if N > 1:
        out[1] = pref * lt_cur
    for n in range(1, N - 1):
        lt_next = ((2 * n + 1) * r + ry) * lt_cur / (n + 1) - r * r * n * lt_prev / (n + 1)
        lt_prev, lt_cur = lt_cur, lt_next
        out[n + 1] = pref * lt_cur
    return out


def thermal_weights(nbar_th: float, N: int) -> np.ndarray:
    """Geometric thermal weights w_n = (nbar/(1+nbar))^n / (1+nbar)."""
    if nbar_th < 0.0:
        raise ValueError(f"nbar_th must be >= 0, got {nbar_th}")
    if nbar_th == 0.0:
        w = np.zeros(N)
        w[0] = 1.0
        return w
    r = nbar_th / (1.0 + nbar_th)
    return r ** np.arange(N) / (1.0 + nbar_th)


def _thermal_columns(nbar_th: float, N: int, leakage_budget: float) -> int:
    """Number of thermal terms needed so the dropped geometric tail is
    negligible next to the leakage budget."""
    if nbar_th == 0.0:
        return 1
    r = nbar_th / (1.0 + nbar_th)
    n = int(math.ceil(math.log(max(leakage_budget * 1e-2, 1e-300)) / math.log(r))) + 1
    return min(max(n, 1), N)


def motional_density_matrix(
    spec: MotionalSpec,
    leakage_budget: float = DEFAULT_LEAKAGE,
    validate: bool = True,
) -> MotionalDensityMatrix:
    """Displaced thermal state: sum_n w_n |alpha,n><alpha,n| on ``spec.truncation`` levels."""
    N = spec.truncation
    alpha = spec.alpha
    nterm = _thermal_columns(spec.nbar_th, N, leakage_budget)
    w = thermal_weights(spec.nbar_th, nterm)
    if spec.alpha_mag == 0.0:
        rho = np.zeros((N, N), dtype=complex)
        wfull = thermal_weights(spec.nbar_th, N)
        np.fill_diagonal(rho, wfull)
    else:
        cols = np.column_stack(
            [
                displaced_fock_coefficients(alpha, n, N, validate=False)
                for n in range(nterm)
            ]
        )
        rho = (cols * w) @ cols.conj().T
        rho = 0.5 * (rho + rho.conj().T)
    out = MotionalDensityMatrix(rho)
    if validate:
        out.validate(leakage_budget)
    return out


def thermal_occupation(temperature: float, nu: float) -> float:
    """Bose occupation (exp(hbar*nu / kB*T) - 1)^-1 for a mode at angular
    frequency ``nu`` and temperature ``temperature`` in kelvin."""
    if temperature <= 0.0:
        raise ValueError(f"temperature must be > 0, got {temperature}")
    if nu <= 0.0:
        raise ValueError(f"nu must be > 0, got {nu}")
    x = hbar * nu / (k_boltzmann * temperature)
    if x > 700.0:
        return 0.0
    return 1.0 / math.expm1(x)


def gate_drive_displacement(eta_omega: float, delta: float) -> float:
    """Worst-case conditional displacement 2*eta_omega/|delta| the drive adds
    on top of the initial state."""
    return 2.0 * eta_omega / abs(delta)


def choose_truncation(
    alpha_mag: float,
    nbar_th: float,
    leakage_budget: float = DEFAULT_LEAKAGE,
    drive_displacement: float = 0.0,
    floor: int = 8,
    step: int = 4,
    cap: int = TRUNCATION_CAP,
) -> int:
    """Smallest ladder that holds the state, padded for gate use.

    Searches N upward in ``step`` increments until the state's trace loss is
    within ``leakage_budget`` and the top 10% of diagonal entries carry less
    than the budget.  When ``drive_displacement`` is nonzero the result is
    padded by ceil(4*(|alpha| + drive)^2 + 10) so the spin-conditioned loops
    the gate drives stay inside the ladder.
    """
    if not 0.0 < leakage_budget < 1.0:
        raise ValueError(f"leakage_budget must be in (0, 1), got {leakage_budget}")
    N = max(floor, 1)
    while True:
        spec = MotionalSpec(alpha_mag, 0.0, nbar_th, N)
        rho = motional_density_matrix(spec, leakage_budget, validate=False)
        diag = np.real(np.diag(rho.entries))
        top = diag[int(math.ceil(0.9 * N)) :].sum()
        if rho.trace >= 1.0 - leakage_budget and top < leakage_budget:
            break
        if N >= cap:
            raise TruncationError(
                f"no truncation <= {cap} holds |alpha|={alpha_mag:.3g}, "
                f"nbar={nbar_th:.3g} within leakage {leakage_budget}"
            )
        N = min(N + step, cap)
    if drive_displacement > 0.0:
        N += math.ceil(4.0 * (alpha_mag + drive_displacement) ** 2 + 10.0)
    if N > cap:
        raise TruncationError(f"padded truncation {N} exceeds the cap {cap}")
    return N
