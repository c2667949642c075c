"""Two-qubit channels induced by the gate on a given initial motional state.

Channels are represented by Choi matrices with the unnormalized
maximally-entangled convention J = sum_ij E(E_ij) (x) E_ij (output factor
first), so Tr J = 4 and trace preservation is the linear condition
Tr_out J = 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import fock, msgate

HERMITICITY_TOL = 1e-10
PSD_TOL = 1e-8
TRACE_PRESERVATION_TOL = 1e-8


class ChannelError(ValueError):
    """Raised for objects that fail to be the channel they claim to be."""


@dataclass(frozen=True)
class ChoiMatrix:
    """16x16 Choi matrix of a two-qubit channel, trace-4 convention."""

    entries: np.ndarray = field(repr=False)
    dim_in: int = 4
    dim_out: int = 4

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=complex)
        d = self.dim_in * self.dim_out
        if e.shape != (d, d):
            raise ValueError(f"Choi matrix must be {d}x{d}, got {e.shape}")
        object.__setattr__(self, "entries", e)

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """Channel action E(rho) = Tr_in[J (1 (x) rho^T)]."""
        do, di = self.dim_out, self.dim_in
        J = self.entries.reshape(do, di, do, di)
        return np.einsum("aibj,ij->ab", J, np.asarray(rho, dtype=complex))

    def output_trace_map(self) -> np.ndarray:
        """Tr_out J; equals the identity for a trace-preserving channel."""
        do, di = self.dim_out, self.dim_in
        J = self.entries.reshape(do, di, do, di)
        return np.einsum("aiaj->ij", J)

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(0.5 * (self.entries + self.entries.conj().T))[0])

    def trace_preservation_defect(self) -> float:
        return float(np.max(np.abs(self.output_trace_map() - np.eye(self.dim_in))))

    def validate(
        self,
        herm_tol: float = HERMITICITY_TOL,
        psd_tol: float = PSD_TOL,
        tp_tol: float = TRACE_PRESERVATION_TOL,
    ) -> None:
        if self.hermiticity_defect() > herm_tol:
            raise ChannelError(f"Choi not Hermitian: defect {self.hermiticity_defect():.3e}")
        if self.min_eigenvalue() < -psd_tol:
            raise ChannelError(f"Choi not PSD: min eigenvalue {self.min_eigenvalue():.3e}")
        if self.trace_preservation_defect() > tp_tol:
            raise ChannelError(
                f"channel not trace preserving: defect {self.trace_preservation_defect():.3e}"
            )


def _basis_op(i: int, j: int, d: int = 4) -> np.ndarray:
    E = np.zeros((d, d), dtype=complex)
    E[i, j] = 1.0
    return E


def choi_of_unitary(U: np.ndarray) -> ChoiMatrix:
    """Choi matrix of rho -> U rho U^dag."""
    U = np.asarray(U, dtype=complex)
    v = U.reshape(-1)
    return ChoiMatrix(np.outer(v, v.conj()))


def unitary_of_choi(choi: ChoiMatrix, tol: float = 1e-8) -> np.ndarray:
    """Recover U from a rank-one (unitary-channel) Choi matrix."""
    w, V = np.linalg.eigh(0.5 * (choi.entries + choi.entries.conj().T))
    d = choi.dim_in
    if w[-1] <= 0.0 or np.any(np.abs(w[:-1]) > tol * w[-1]):
        raise ChannelError("Choi matrix is not a unitary channel (rank > 1)")
    U = np.sqrt(w[-1]) * V[:, -1].reshape(d, d)
    if np.max(np.abs(U @ U.conj().T - np.eye(d))) > max(tol, 1e-8):
        raise ChannelError("rank-one Choi does not correspond to a unitary")
    return U


def channel_from_propagator(U: np.ndarray, rho_motion: np.ndarray) -> ChoiMatrix:
    """Choi matrix of rho_spin -> Tr_motion[U (rho_spin (x) rho_motion) U^dag].

    Propagates the 16 spin basis operators; memory stays at O(N^2) because
    only the relevant N-column block of U is touched per operator.
    """
    dim = U.shape[0]
    if dim % 4 != 0:
        raise ValueError("propagator dimension must be 4N")
    N = dim // 4
    rho_motion = np.asarray(rho_motion, dtype=complex)
    J = np.zeros((16, 16), dtype=complex)
    Udag = U.conj().T
    for i in range(4):
        Ui_rho = U[:, i * N : (i + 1) * N] @ rho_motion
        for j in range(4):
            Y = Ui_rho @ Udag[j * N : (j + 1) * N, :]
            out = np.einsum("anbn->ab", Y.reshape(4, N, 4, N))
            J += np.kron(out, _basis_op(i, j))
    return ChoiMatrix(J)


def gate_channel(
    params: msgate.GateParams,
    offset: msgate.FrequencyOffset,
    spec: fock.MotionalSpec,
    leakage_budget: float = fock.DEFAULT_LEAKAGE,
    validate: bool = True,
) -> ChoiMatrix:
    """Channel the gate applies to the qubits for one trap-frequency offset.

    ``spec.truncation`` must already include the drive padding from
    :func:`fock.choose_truncation`.
    """
    rho = fock.motional_density_matrix(spec, leakage_budget, validate=validate)
    U = msgate.propagator(params, offset, spec.truncation, leakage_budget, validate=validate)
    choi = channel_from_propagator(U, rho.entries)
    if validate:
        choi.validate()
    return choi


def ideal_gate_choi() -> ChoiMatrix:
    """Choi matrix of the perfect gate exp(i (pi/2) J_y^2)."""
    phases = np.exp(1j * np.pi / 2.0 * msgate.JY_EIGENVALUES**2)
    V = msgate.JY_EIGENBASIS
    U = (V * phases) @ V.conj().T
    return choi_of_unitary(U)


def error_channel(actual: ChoiMatrix, ideal: ChoiMatrix) -> ChoiMatrix:
    """Choi matrix of U_ideal^dag composed after the actual channel, so a
    perfect gate maps to the identity channel."""
    U = unitary_of_choi(ideal)
    rot = np.kron(U.conj().T, np.eye(actual.dim_in))
    return ChoiMatrix(rot @ actual.entries @ rot.conj().T)


def mix_channels(weighted: Sequence[tuple[float, ChoiMatrix]]) -> ChoiMatrix:
    """Convex mixture of channels; weights must sum to one."""
    if not weighted:
        raise ValueError("need at least one channel to mix")
    weights = np.array([w for w, _ in weighted], dtype=float)
    if np.any(weights < 0.0):
        raise ValueError("mixture weights must be nonnegative")
    if abs(weights.sum() - 1.0) > 1e-12:
        raise ValueError(f"mixture weights sum to {weights.sum():.15g}, not 1")
    J = np.zeros((16, 16), dtype=complex)
    for w, choi in weighted:
        J += w * choi.entries
    return ChoiMatrix(J)
