"""Dense primal-dual interior-point solver for small Hermitian SDPs.

Problems are given in linear-matrix-inequality form

    maximize    c . y
    subject to  S(y) = F0 + sum_i y_i F_i  >=  0,

with Hermitian block-diagonal F's.  The associated primal

    minimize    <F0, X>   s.t.   <F_i, X> = -c_i,  X >= 0

is tracked simultaneously; its value upper-bounds c.y, and the reported
duality gap <X, S> certifies the answer.  Nesterov-Todd scaling with a
Mehrotra-style adaptive centering parameter; everything is dense and
deterministic, which is the right trade for blocks up to 64x64.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


class SdpError(RuntimeError):
    """Solver failed to reach the requested accuracy."""


@dataclass(frozen=True)
class SdpProblem:
    """max objective.y with F0[b] + sum_i y_i Fi[b][i] PSD for each block b."""

    objective: np.ndarray
    f0_blocks: tuple[np.ndarray, ...]
    fi_blocks: tuple[np.ndarray, ...]  # per block: array of shape (m, nb, nb)

    def __post_init__(self):
        c = np.asarray(self.objective, dtype=float)
        object.__setattr__(self, "objective", c)
        f0 = tuple(np.asarray(b, dtype=complex) for b in self.f0_blocks)
        fi = tuple(np.asarray(b, dtype=complex) for b in self.fi_blocks)
        if len(f0) != len(fi):
            raise ValueError("f0_blocks and fi_blocks must pair up")
        for b0, bi in zip(f0, fi):
            if bi.shape != (c.size,) + b0.shape:
                raise ValueError("constraint stack shape mismatch")
        object.__setattr__(self, "f0_blocks", f0)
        object.__setattr__(self, "fi_blocks", fi)


@dataclass(frozen=True)
class SdpSolution:
    y: np.ndarray
    x_blocks: tuple[np.ndarray, ...] = field(repr=False)
    dual_objective: float  # c . y, the maximization's achieved value
    primal_objective: float  # <F0, X>, the certifying upper bound
    gap: float
    iterations: int
    status: str

    @property
    def value(self) -> float:
        return self.dual_objective


def _sym(M: np.ndarray) -> np.ndarray:
    return 0.5 * (M + M.conj().T)


def _inner_all(Fs: np.ndarray, M: np.ndarray) -> np.ndarray:
    return np.real(np.einsum("ipq,qp->i", Fs, M, optimize=True))


def _eig_floor(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    w, U = np.linalg.eigh(_sym(M))
    return np.maximum(w, 1e-300), U


def _max_step(blocks: Sequence[np.ndarray], dblocks: Sequence[np.ndarray]) -> float:
    """Largest a with M + a dM staying PSD, per block."""
    amax = np.inf
    for M, dM in zip(blocks, dblocks):
        w, U = _eig_floor(M)
        Li = (U / np.sqrt(w)).conj().T
        lmin = np.linalg.eigvalsh(_sym(Li @ dM @ Li.conj().T))[0]
        if lmin < 0.0:
            amax = min(amax, -1.0 / lmin)
    return amax


def herm_basis(d: int) -> list[np.ndarray]:
    """Orthonormal basis of d x d Hermitian matrices under <A,B> = Tr(AB)."""
    basis = []
    for i in range(d):
        E = np.zeros((d, d), dtype=complex)
        E[i, i] = 1.0
        basis.append(E)
    s = 1.0 / np.sqrt(2.0)
    for i in range(d):
        for j in range(i + 1, d):
            E = np.zeros((d, d), dtype=complex)
            E[i, j] = s
            E[j, i] = s
            basis.append(E)
            E = np.zeros((d, d), dtype=complex)
            E[i, j] = 1j * s
            E[j, i] = -1j * s
            basis.append(E)
    return basis


def sdp_solve(
    problem: SdpProblem,
    tol: float = 1e-8,
    max_iterations: int = 200,
    step_fraction: float = 0.98,
) -> SdpSolution:
    """Solve the SDP to duality gap and feasibility residuals below ``tol``."""
    c = problem.objective
    m = c.size
    F0s = problem.f0_blocks
    Fis = problem.fi_blocks
    sizes = [b.shape[0] for b in F0s]
    ntot = sum(sizes)
    X = [np.eye(n, dtype=complex) for n in sizes]
    S = [np.eye(n, dtype=complex) for n in sizes]
    y = np.zeros(m)
    cscale = 1.0 + float(np.max(np.abs(c))) if m else 1.0
    fscale = 1.0 + max(float(np.max(np.abs(F0))) for F0 in F0s)

    status = "max_iterations"
    it = 0
    for it in range(1, max_iterations + 1):
        mu = sum(np.real(np.trace(x @ s)) for x, s in zip(X, S)) / ntot
        rp = -c - sum(_inner_all(Fb, x) for Fb, x in zip(Fis, X))
        Rd = [F0 + np.einsum("i,ipq->pq", y, Fb) - s for F0, Fb, s in zip(F0s, Fis, S)]
        pinf = float(np.max(np.abs(rp))) / cscale if m else 0.0
        dinf = max(float(np.max(np.abs(R))) for R in Rd) / fscale
        if mu * ntot < tol and pinf < tol and dinf < tol:
            status = "optimal"
            break

        # Nesterov-Todd scaling point W per block: W S W = X.
        Ws, Sinv = [], []
        for x, s in zip(X, S):
            wx, Ux = _eig_floor(x)
            Lx = Ux * np.sqrt(wx)
            d2, U = _eig_floor(Lx.conj().T @ s @ Lx)
            G = Lx @ (U * d2**-0.25)
            Ws.append(G @ G.conj().T)
            ws, Us = _eig_floor(s)
            Sinv.append((Us / ws) @ Us.conj().T)

        M = np.zeros((m, m))
        for Fb, W in zip(Fis, Ws):
            T = np.einsum("pq,iqr,rs->ips", W, Fb, W, optimize=True)
            M += np.real(np.einsum("ipq,jqp->ij", Fb, T, optimize=True))
        reg = 1e-13 * (np.trace(M) / m + 1.0)
        Mch = None
        for _ in range(8):
            try:
                Mch = np.linalg.cholesky(M + reg * np.eye(m))
                break
            except np.linalg.LinAlgError:
                reg *= 100.0
        if Mch is None:
            raise SdpError("Schur complement is numerically indefinite")

        def solve_normal(r):
            z = np.linalg.solve(Mch, r)
            return np.linalg.solve(Mch.conj().T, z)

        def directions(sigmu):
            rhs = -rp.copy()
            for Fb, W, Rdb, x, sinv in zip(Fis, Ws, Rd, X, Sinv):
                rhs += _inner_all(Fb, sigmu * sinv - x - W @ Rdb @ W)
            dy = solve_normal(rhs)
            dS = [_sym(Rdb + np.einsum("i,ipq->pq", dy, Fb)) for Rdb, Fb in zip(Rd, Fis)]
            dX = [
                _sym(sigmu * sinv - x - W @ ds @ W)
                for sinv, x, W, ds in zip(Sinv, X, Ws, dS)
            ]
            return dy, dS, dX

        # Predictor estimates how much centering the corrector needs.
        dy_a, dS_a, dX_a = directions(0.0)
        ap = min(1.0, step_fraction * _max_step(X, dX_a))
        ad = min(1.0, step_fraction * _max_step(S, dS_a))
        mu_aff = (
            sum(
                np.real(np.trace((x + ap * dx) @ (s + ad * ds)))
                for x, dx, s, ds in zip(X, dX_a, S, dS_a)
            )
            / ntot
        )
        sigma = float(np.clip((max(mu_aff, 0.0) / mu) ** 3, 1e-10, 1.0))

        dy, dS, dX = directions(sigma * mu)
        ap = min(1.0, step_fraction * _max_step(X, dX))
        ad = min(1.0, step_fraction * _max_step(S, dS))
        X = [_sym(x + ap * dx) for x, dx in zip(X, dX)]
        S = [_sym(s + ad * ds) for s, ds in zip(S, dS)]
        y = y + ad * dy

    dual_obj = float(c @ y)
    primal_obj = sum(float(np.real(np.trace(F0.conj().T @ x))) for F0, x in zip(F0s, X))
    if status != "optimal":
        raise SdpError(
            f"no convergence in {max_iterations} iterations: "
            f"gap {primal_obj - dual_obj:.3e}, mu {mu:.3e}, "
            f"residuals ({pinf:.3e}, {dinf:.3e})"
        )
    return SdpSolution(
        y=y,
        x_blocks=tuple(X),
        dual_objective=dual_obj,
        primal_objective=primal_obj,
        gap=primal_obj - dual_obj,
        iterations=it,
        status=status,
    )
