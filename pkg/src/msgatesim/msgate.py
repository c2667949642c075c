"""MS-gate dynamics for two ions sharing one motional mode.

The drive couples the collective spin J_y = (sigma_y1 + sigma_y2)/2 to the
mode through H(t) = -eta_omega * J_y (a e^{i delta t} + a^dag e^{-i delta t}).
Because [H(t1), H(t2)] is a c-number times J_y^2, the propagator closes at
second Magnus order:

    U(t) = exp(-i B(t) J_y^2) D(J_y alpha(t)),
    alpha(t) = (eta_omega/delta) (1 - e^{-i delta t}),
    B(t) = (eta_omega/delta)^2 (delta t - sin delta t),

with B negative for the counter-clockwise loops a negative detuning drives.
A midpoint time-stepped integrator of H(t) is kept alongside as an
independent oracle for the closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import fock

# Spin basis is fixed as |00>, |01>, |10>, |11> with <0|sigma_y|1> = -i, so
# channel matrices are bit-exact reproducible across runs.
SIGMA_Y = np.array([[0.0, -1j], [1j, 0.0]])

_plus_y = np.array([1.0, 1j]) / np.sqrt(2.0)
_minus_y = np.array([1.0, -1j]) / np.sqrt(2.0)

#: Columns are J_y eigenvectors in the order j = +1, 0, 0, -1.
JY_EIGENBASIS = np.column_stack(
    [
        np.kron(_plus_y, _plus_y),
        np.kron(_plus_y, _minus_y),
        np.kron(_minus_y, _plus_y),
        np.kron(_minus_y, _minus_y),
    ]
)
JY_EIGENVALUES = np.array([1.0, 0.0, 0.0, -1.0])

JY_MATRIX = 0.5 * (np.kron(SIGMA_Y, np.eye(2)) + np.kron(np.eye(2), SIGMA_Y))

# Below |delta * t| of this size the closed forms switch to their series
# limits to dodge catastrophic cancellation at the removable singularity.
_SMALL_PHASE = 1e-6


@dataclass(frozen=True)
class GateParams:
    """Calibrated MS drive: loop closure |delta0| tau = 2 pi K and geometric
    phase B(tau) = -pi/2 are enforced at construction."""

    eta_omega: float  # rad/s, product eta * Omega
    delta0: float  # rad/s, nominal detuning (negative: counter-clockwise)
    tau: float  # s, gate duration
    loops: int  # K, closed phase-space loops at zero error
    nu0: float  # rad/s, nominal trap frequency

    def __post_init__(self):
        if self.loops < 1:
            raise ValueError(f"loops must be >= 1, got {self.loops}")
        if self.tau <= 0.0:
            raise ValueError(f"tau must be > 0, got {self.tau}")
        closure = abs(self.delta0) * self.tau - 2.0 * math.pi * self.loops
        if abs(closure) > 1e-9 * 2.0 * math.pi * self.loops:
            raise ValueError("delta0 and tau do not close the loops: "
                             f"|delta0| tau = {abs(self.delta0) * self.tau:.12g}")
        target = math.pi * math.sqrt(self.loops) / self.tau
        if abs(self.eta_omega - target) > 1e-9 * target:
            raise ValueError("eta_omega does not give B(tau) = -pi/2: "
                             f"got {self.eta_omega:.12g}, need {target:.12g}")


@dataclass(frozen=True)
class FrequencyOffset:
    """Trap-frequency error delta_nu (rad/s); detuning becomes delta0 - delta_nu."""

    delta_nu: float = 0.0


def calibrate_gate(loops: int, tau: float, nu0: float) -> GateParams:
    """Drive parameters for K counter-clockwise loops in duration tau:
    delta0/2pi = -K/tau and eta_omega/2pi = sqrt(K)/(2 tau)."""
    delta0 = -2.0 * math.pi * loops / tau
    eta_omega = math.pi * math.sqrt(loops) / tau
    return GateParams(eta_omega=eta_omega, delta0=delta0, tau=tau, loops=loops, nu0=nu0)


def _detuning(params: GateParams, offset: FrequencyOffset) -> float:
    if abs(offset.delta_nu) >= 5.0 * abs(params.delta0):
        raise ValueError(
            f"|delta_nu| = {abs(offset.delta_nu):.3g} rad/s is beyond 5x the "
            "nominal detuning; the single-sideband model is meaningless there"
        )
    return params.delta0 - offset.delta_nu


def _check_time(params: GateParams, t: float) -> None:
    if not 0.0 <= t <= params.tau * (1.0 + 1e-12):
        raise ValueError(f"t must lie in [0, tau], got {t}")


def trajectory(params: GateParams, offset: FrequencyOffset, t: float) -> complex:
    """Phase-space trajectory alpha(t) of the spin-conditioned loop."""
    _check_time(params, t)
    delta = _detuning(params, offset)
    x = delta * t
    if abs(x) < _SMALL_PHASE:
        # alpha = i eta_omega t (1 - i x/2 - x^2/6 + ...)
        return params.eta_omega * t * (1j + x / 2.0 - 1j * x * x / 6.0)
    return params.eta_omega / delta * (1.0 - np.exp(-1j * x))


def geometric_phase(params: GateParams, offset: FrequencyOffset, t: float) -> float:
    """Accumulated loop area B(t); equals -pi/2 at t = tau for a calibrated
    gate with no frequency error."""
    _check_time(params, t)
    delta = _detuning(params, offset)
    x = delta * t
    if abs(x) < _SMALL_PHASE:
        return params.eta_omega**2 * t * t * (x / 6.0 - x**3 / 120.0)
    return (params.eta_omega / delta) ** 2 * (x - math.sin(x))


def _spin_motion_assemble(blocks: list[np.ndarray]) -> np.ndarray:
    """(V (x) 1) blkdiag(blocks) (V (x) 1)^dag for the J_y eigenbasis V."""
    N = blocks[0].shape[0]
    U = np.zeros((4 * N, 4 * N), dtype=complex)
    for k in range(4):
        vk = JY_EIGENBASIS[:, k]
        U += np.kron(np.outer(vk, vk.conj()), blocks[k])
    return U


def propagator(
    params: GateParams,
    offset: FrequencyOffset,
    N: int,
    leakage_budget: float = fock.DEFAULT_LEAKAGE,
    validate: bool = True,
) -> np.ndarray:
    """Exact gate propagator U(tau) on spin (x) N-level motion.

    Built blockwise in the J_y eigenbasis: eigenvalue j evolves by
    exp(-i B(tau) j^2) D(j alpha(tau)).
    """
    a_tau = trajectory(params, offset, params.tau)
    b_tau = geometric_phase(params, offset, params.tau)
    blocks = []
    cache: dict[float, np.ndarray] = {}
    for j in JY_EIGENVALUES:
        if j not in cache:
            if j == 0.0:
                cache[j] = np.eye(N, dtype=complex)
            else:
                cache[j] = fock.displacement_matrix(
                    j * a_tau, N, leakage_budget=leakage_budget, validate=validate
                )
        blocks.append(np.exp(-1j * b_tau * j * j) * cache[j])
    return _spin_motion_assemble(blocks)


def _ladder(N: int) -> tuple[np.ndarray, np.ndarray]:
    a = np.diag(np.sqrt(np.arange(1, N)), 1)
    return a, a.conj().T


def brute_force_propagator(
    params: GateParams,
    offset: FrequencyOffset,
    N: int,
    steps: int,
    method: str = "blocked",
) -> np.ndarray:
    """Midpoint time-stepped oracle: ordered product of exp(-i H(t_mid) dt).

    ``method="dense"`` exponentiates the full 4N x 4N Hamiltonian each step;
    ``method="blocked"`` steps each J_y eigenvalue's N x N block separately,
    which is exact because H(t) commutes with J_y at all times, and is what
    makes large step counts affordable.  Both are second-order in dt.
    """
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    delta = _detuning(params, offset)
    dt = params.tau / steps
    a, ad = _ladder(N)

    if method == "blocked":
        u_plus = np.eye(N, dtype=complex)
        for k in range(steps):
            t = (k + 0.5) * dt
            h = -params.eta_omega * (a * np.exp(1j * delta * t) + ad * np.exp(-1j * delta * t))
            w, Q = np.linalg.eigh(h)
            u_plus = (Q * np.exp(-1j * w * dt)) @ Q.conj().T @ u_plus
        # j = -1 runs the same steps with h -> -h = P h P for the parity
        # operator P = diag((-1)^n), so its product is P u_plus P.
        parity = np.where(np.arange(N) % 2 == 0, 1.0, -1.0)
        u_minus = u_plus * np.outer(parity, parity)
        blocks = [u_plus, np.eye(N, dtype=complex), np.eye(N, dtype=complex), u_minus]
        return _spin_motion_assemble(blocks)

    if method == "dense":
        U = np.eye(4 * N, dtype=complex)
        for k in range(steps):
            t = (k + 0.5) * dt
            h = -params.eta_omega * (a * np.exp(1j * delta * t) + ad * np.exp(-1j * delta * t))
            H = np.kron(JY_MATRIX, h)
            w, Q = np.linalg.eigh(H)
            U = (Q * np.exp(-1j * w * dt)) @ Q.conj().T @ U
        return U

    raise ValueError(f"unknown method {method!r}")


def propagator_safe_block(params: GateParams, N: int, alpha_mag: float = 0.0) -> int:
    """Highest Fock index (exclusive) on which a size-N propagator is
    trustworthy, given the initial displacement magnitude."""
    a_drive = fock.gate_drive_displacement(params.eta_omega, params.delta0)
    return N - fock.displacement_buffer(alpha_mag + a_drive)
