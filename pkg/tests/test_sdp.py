import numpy as np
import pytest

from msgatesim import channel, metrics, sdp


def random_cptp_choi(rng, d=4, kraus=3):
    # random Kraus set completed to trace preservation
    ks = [rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)) for _ in range(kraus)]
    S = sum(K.conj().T @ K for K in ks)
    w, V = np.linalg.eigh(S)
    inv_sqrt = (V / np.sqrt(w)) @ V.conj().T
    ks = [K @ inv_sqrt for K in ks]
    J = np.zeros((d * d, d * d), dtype=complex)
    for K in ks:
        v = K.reshape(-1)
        J += np.outer(v, v.conj())
    return channel.ChoiMatrix(J)


class TestSolver:
    def test_trivial_feasibility_in_under_ten_iterations(self):
        # maximize y with 2 - y >= 0: optimum 2
        f0 = (np.array([[2.0 + 0j]]),)
        fi = (np.array([[[-1.0 + 0j]]]),)
        problem = sdp.SdpProblem(np.array([1.0]), f0, fi)
        sol = sdp.sdp_solve(problem)
        assert sol.status == "optimal"
        assert sol.iterations < 10
        assert sol.value == pytest.approx(2.0, abs=1e-7)
        assert abs(sol.gap) < 1e-7

    def test_block_problem(self):
        # maximize y1 + y2 with y1 <= 1, y2 <= 3 expressed as two blocks
        f0 = (np.eye(1, dtype=complex), 3 * np.eye(1, dtype=complex))
        fi = (
            np.array([[[-1.0 + 0j]], [[0.0 + 0j]]]),
            np.array([[[0.0 + 0j]], [[-1.0 + 0j]]]),
        )
        sol = sdp.sdp_solve(sdp.SdpProblem(np.array([1.0, 1.0]), f0, fi))
        assert sol.value == pytest.approx(4.0, abs=1e-7)

    def test_nonconvergence_raises(self):
        # unbounded: maximize y with 1 + 0*y >= 0
        f0 = (np.eye(2, dtype=complex),)
        fi = (np.zeros((1, 2, 2), dtype=complex),)
        with pytest.raises(sdp.SdpError):
            sdp.sdp_solve(sdp.SdpProblem(np.array([1.0]), f0, fi), max_iterations=40)


class TestDiamondNorm:
    def test_zero_map(self, ideal):
        res = metrics.diamond_norm(ideal, ideal)
        assert res.value == 0.0

    @pytest.mark.parametrize("theta", [0.1, 0.5, 1.0])
    def test_one_qubit_phase_unitary(self, theta):
        U = np.diag([1.0, np.exp(1j * theta)])
        a = channel.ChoiMatrix(
            np.outer(U.reshape(-1), U.reshape(-1).conj()), dim_in=2, dim_out=2
        )
        b = channel.ChoiMatrix(np.outer(np.eye(2).reshape(-1), np.eye(2).reshape(-1)),
                               dim_in=2, dim_out=2)
        res = metrics.diamond_norm(a, b)
        assert res.value == pytest.approx(2.0 * np.sin(theta / 2.0), abs=1e-5)
        assert abs(res.gap) < 1e-7

    def test_random_pair_brackets_probe_lower_bound(self):
        rng = np.random.default_rng(123)
        a = random_cptp_choi(rng)
        b = random_cptp_choi(rng)
        res = metrics.diamond_norm(a, b)
        assert abs(res.gap) < 1e-7
        # probe lower bound: entangled pure inputs on a doubled system
        delta = a.entries - b.entries
        J = delta.reshape(4, 4, 4, 4)
        best = 0.0
        for _ in range(60):
            v = rng.normal(size=16) + 1j * rng.normal(size=16)
            v /= np.linalg.norm(v)
            psi = v.reshape(4, 4)  # system (x) ancilla amplitudes
            out = np.einsum("aibj,ix,jy->axby", J, psi, psi.conj())
            out = out.reshape(16, 16)
            best = max(best, float(np.sum(np.abs(np.linalg.eigvalsh(out)))))
        assert best <= res.primal_bound + 1e-6
        assert res.value >= best - 1e-6

    def test_maximally_distant_unitaries(self):
        # orthogonal unitaries reach the maximum distance 2
        X = np.array([[0.0, 1.0], [1.0, 0.0]])
        a = channel.ChoiMatrix(np.outer(X.reshape(-1), X.reshape(-1)), dim_in=2, dim_out=2)
        b = channel.ChoiMatrix(np.outer(np.eye(2).reshape(-1), np.eye(2).reshape(-1)),
                               dim_in=2, dim_out=2)
        assert metrics.diamond_norm(a, b).value == pytest.approx(2.0, abs=1e-6)
