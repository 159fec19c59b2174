import math

import mpmath as mp
import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, strategies as st

from conftest import random_density_matrix
from topoteleport.channel import channel_matrix
from topoteleport.qmatrix import (
    InvalidStateError,
    NotHermitianError,
    PureStateParams,
    bell_states,
    check_density_matrix,
    eig_hermitian,
    fidelity,
    input_state,
    ket_to_dm,
    resource_initial_state,
    trace_distance,
)
from topoteleport.teleport import output_state


def uhlmann(rho, sigma):
    s = scipy.linalg.sqrtm(rho)
    return float(np.real(np.trace(scipy.linalg.sqrtm(s @ sigma @ s))) ** 2)


def charpoly_eigenvalues(m, dps=60):
    """Eigenvalues from the roots of det(m - x I), computed in mpmath."""
    with mp.workdps(dps):
        M = mp.matrix([[mp.mpc(complex(z)) for z in row] for row in m])
        n = M.rows
        # Faddeev-LeVerrier coefficients of the characteristic polynomial
        coeffs = [mp.mpf(1)]
        A = mp.zeros(n, n)
        ident = mp.eye(n)
        for k in range(1, n + 1):
            A = M * (A + coeffs[-1] * ident)
            ck = -sum(A[i, i] for i in range(n)) / k
            coeffs.append(ck)
        roots = mp.polyroots(coeffs, maxsteps=200, extraprec=200)
        return sorted((float(mp.re(r)) for r in roots), reverse=True)


class TestEig:
    def test_identity(self):
        w, _ = eig_hermitian(np.eye(2) / 2)
        assert np.allclose(w, [0.5, 0.5])

    def test_bell_projector(self):
        w, _ = eig_hermitian(bell_states()[0])
        assert np.allclose(w, [1, 0, 0, 0], atol=1e-14)

    def test_channel_state_against_charpoly(self):
        rho = channel_matrix(0.8, 0.8, math.pi / 2)
        w, _ = eig_hermitian(rho)
        assert np.allclose(w, charpoly_eigenvalues(rho), atol=1e-12)

    def test_random_against_charpoly(self, rng):
        for _ in range(10):
            rho = random_density_matrix(rng, 4)
            w, _ = eig_hermitian(rho)
            assert np.allclose(w, charpoly_eigenvalues(rho), atol=1e-12)

    def test_eigen_equation_and_order(self, rng):
        for _ in range(200):
            h = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
            h = h + h.conj().T
            w, v = eig_hermitian(h)
            assert np.all(np.diff(w) <= 0)
            assert np.allclose(h @ v, v * w, atol=1e-10)
            assert np.allclose(v.conj().T @ v, np.eye(4), atol=1e-12)

    def test_not_hermitian(self):
        with pytest.raises(NotHermitianError):
            eig_hermitian(np.array([[0, 1], [0, 0]]))


class TestStates:
    def test_input_state_pure(self):
        for th in np.linspace(0, math.pi, 5):
            rho = input_state(PureStateParams(th, 1.0, 0.3))
            check_density_matrix(rho)
            assert np.trace(rho @ rho).real == pytest.approx(1.0, abs=1e-12)

    def test_resource_initial_state(self):
        assert np.allclose(resource_initial_state(math.pi / 2), bell_states()[0])

    def test_bell_states_orthonormal(self):
        bs = bell_states()
        gram = np.array([[np.trace(a @ b).real for b in bs] for a in bs])
        assert np.allclose(gram, np.eye(4), atol=1e-14)
        assert np.allclose(sum(bs), np.eye(4), atol=1e-14)

    @pytest.mark.parametrize("bad", [
        np.diag([0.5, 0.6]),
        np.diag([1.5, -0.5]),
        np.array([[0.5, 0.5], [0.0, 0.5]]),
        np.eye(3) / 3,
    ])
    def test_invalid(self, bad):
        with pytest.raises(InvalidStateError):
            check_density_matrix(bad)

    def test_params_ranges(self):
        for kw in (dict(theta=-0.1), dict(phi=2 * math.pi), dict(vartheta=4.0)):
            with pytest.raises(ValueError):
                PureStateParams(**kw)

    def test_tensor_trace(self, rng):
        for _ in range(50):
            a = random_density_matrix(rng, 2)
            b = random_density_matrix(rng, 2)
            assert abs(np.trace(np.kron(a, b)) - 1) < 1e-12


class TestFidelity:
    def test_self(self, rng):
        for _ in range(20):
            v = rng.normal(size=4) + 1j * rng.normal(size=4)
            p = ket_to_dm(v / np.linalg.norm(v))
            assert fidelity(p, p) == pytest.approx(1.0, abs=1e-12)

    def test_maximally_mixed(self, rng):
        v = rng.normal(size=4) + 1j * rng.normal(size=4)
        assert fidelity(np.eye(4) / 4, ket_to_dm(v / np.linalg.norm(v))) == pytest.approx(0.25)

    def test_matches_uhlmann(self):
        params = PureStateParams()
        rho = output_state(0.8, params)
        psi = input_state(params)
        assert fidelity(rho, psi) == pytest.approx(uhlmann(rho, psi), abs=1e-8)

    def test_uhlmann_random(self, rng):
        for _ in range(20):
            rho = random_density_matrix(rng, 4)
            psi = random_density_matrix(rng, 4, rank=1)
            assert fidelity(rho, psi) == pytest.approx(uhlmann(rho, psi), abs=1e-7)

    def test_rejects_mixed(self):
        with pytest.raises(InvalidStateError):
            fidelity(np.eye(2) / 2, np.eye(2) / 2)


class TestTraceDistance:
    def test_examples(self, rng):
        rho = random_density_matrix(rng, 4)
        assert trace_distance(rho, rho) == pytest.approx(0.0, abs=1e-14)
        assert trace_distance(np.diag([1.0, 0]), np.diag([0, 1.0])) == pytest.approx(1.0)

    def test_metric(self, rng):
        for _ in range(200):
            a, b, c = (random_density_matrix(rng, 4) for _ in range(3))
            assert trace_distance(a, b) == pytest.approx(trace_distance(b, a), abs=1e-14)
            assert trace_distance(a, c) <= trace_distance(a, b) + trace_distance(b, c) + 1e-10
            assert 0.0 <= trace_distance(a, b) <= 1.0 + 1e-12

    def test_fuchs_van_de_graaf(self, rng):
        for _ in range(200):
            rho = random_density_matrix(rng, 4)
            psi = random_density_matrix(rng, 4, rank=1)
            assert 1.0 - fidelity(rho, psi) <= trace_distance(rho, psi) + 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            trace_distance(np.eye(2) / 2, np.eye(4) / 4)

    @given(st.floats(0, 1))
    def test_dephased_pair(self, a):
        from topoteleport.channel import evolve_single
        d = trace_distance(evolve_single(np.diag([1.0, 0]), a), evolve_single(np.diag([0, 1.0]), a))
        assert d == pytest.approx(a * a, abs=1e-12)
