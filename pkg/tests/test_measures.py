import numpy as np
import pytest
from scipy import integrate
from scipy.linalg import expm

from fockbench import fock
from fockbench.experiment import ideal_photon_added_state
from fockbench.fock import coherent_state, fock_dm, loss_channel, pure_dm
from fockbench.measures import (
    GaussianSummary,
    WignerGrid,
    gaussian_entropy,
    gaussian_reference,
    gaussian_summary,
    non_classicality,
    non_gaussianity,
    von_neumann_entropy,
    wigner,
    wigner_eval,
    wigner_grid,
)
from fockbench.tomography import homodyne_pdf

from conftest import random_density_matrix, random_pure_vector

LN2 = np.log(2.0)


def thermal_entropy(nbar):
    return (nbar + 1) * np.log(nbar + 1) - (nbar * np.log(nbar) if nbar > 0 else 0.0)


def g(nu):
    """Gaussian entropy of symplectic eigenvalue ``nu`` (vacuum = 1/2)."""
    return 0.0 if nu <= 0.5 else (nu + .5) * np.log(nu + .5) - (nu - .5) * np.log(nu - .5)


def photon_added_delta_analytic(alpha):
    """Closed-form moments of a^dag|alpha>/sqrt(1+|alpha|^2); the state is pure."""
    a2 = abs(alpha) ** 2
    mean_a = alpha * (a2 + 2) / (1 + a2)
    mean_aa = alpha**2 * (a2 + 3) / (1 + a2)
    nbar = (a2**2 + 3 * a2 + 1) / (1 + a2)
    d_aa = mean_aa - mean_a**2
    d_n = nbar - abs(mean_a) ** 2
    cov = np.array([[d_n + d_aa.real + .5, d_aa.imag], [d_aa.imag, d_n - d_aa.real + .5]])
    return g(np.sqrt(np.linalg.det(cov)))


# Frozen from photon_added_delta_analytic (no truncation involved).
PACS_DELTA = {0.5: 1.0862464506216947, 1.0: 0.5533032997205156}


class TestGaussianSummary:
    def test_vacuum(self):
        s = gaussian_summary(fock_dm(0, 5))
        np.testing.assert_allclose(s.mean, [0, 0], atol=1e-15)
        np.testing.assert_allclose(s.cov, np.diag([.5, .5]), atol=1e-15)

    def test_coherent(self):
        s = gaussian_summary(pure_dm(coherent_state(1.0, 25).vector))
        np.testing.assert_allclose(s.mean, [np.sqrt(2), 0], atol=1e-8)
        np.testing.assert_allclose(s.cov, np.diag([.5, .5]), atol=1e-8)

    def test_single_photon(self):
        s = gaussian_summary(fock_dm(1, 6))
        np.testing.assert_allclose(s.mean, [0, 0], atol=1e-15)
        np.testing.assert_allclose(s.cov, np.diag([1.5, 1.5]), atol=1e-10)

    def test_matches_quadrature_operators_in_large_space(self, rng):
        # truncated x, p are exact away from the top level
        rho = random_density_matrix(rng, 30, support=6)
        a = fock.annihilation(30)
        x = (a + a.T) / np.sqrt(2)
        p = (a - a.T) / (1j * np.sqrt(2))
        mx, mp = np.trace(rho @ x).real, np.trace(rho @ p).real
        dx, dp = x - mx * np.eye(30), p - mp * np.eye(30)
        cxp = 0.5 * np.trace(rho @ (dx @ dp + dp @ dx)).real
        expected = np.array([[np.trace(rho @ dx @ dx).real, cxp],
                             [cxp, np.trace(rho @ dp @ dp).real]])
        s = gaussian_summary(rho)
        np.testing.assert_allclose(s.mean, [mx, mp], atol=1e-12)
        np.testing.assert_allclose(s.cov, expected, atol=1e-10)

    def test_heisenberg(self, rng):
        for _ in range(50):
            s = gaussian_summary(random_density_matrix(rng, 8, support=5))
            assert np.linalg.det(s.cov) >= 0.25 - 1e-9
            np.testing.assert_allclose(s.cov, s.cov.T, atol=1e-12)


class TestEntropies:
    def test_gaussian_vacuum(self):
        assert gaussian_entropy(GaussianSummary(np.zeros(2), np.diag([.5, .5]))) == 0.0

    def test_gaussian_thermal(self):
        val = gaussian_entropy(GaussianSummary(np.zeros(2), np.diag([1.5, 1.5])))
        assert abs(val - 2 * LN2) < 1e-9
        assert abs(thermal_entropy(1.0) - 2 * LN2) < 1e-12

    @pytest.mark.parametrize("s", [0.0, 0.3, 1.2, -0.7])
    def test_gaussian_squeezed_vacuum(self, s):
        cov = np.diag([np.exp(2 * s) / 2, np.exp(-2 * s) / 2])
        assert abs(gaussian_entropy(GaussianSummary(np.zeros(2), cov))) < 1e-9

    def test_gaussian_ignores_mean(self):
        cov = np.array([[1.1, 0.2], [0.2, 0.9]])
        a = gaussian_entropy(GaussianSummary(np.zeros(2), cov))
        b = gaussian_entropy(GaussianSummary(np.array([3.0, -1.0]), cov))
        assert a == b

    def test_unphysical_covariance(self):
        with pytest.raises(ValueError):
            gaussian_entropy(GaussianSummary(np.zeros(2), np.diag([.2, .2])))

    def test_von_neumann(self, rng):
        assert abs(von_neumann_entropy(pure_dm(random_pure_vector(rng, 8)))) < 1e-9
        assert abs(von_neumann_entropy(np.diag([.5, .5, 0, 0])) - LN2) < 1e-12
        thermal = fock.thermal_dm(0.5, 30)
        assert abs(von_neumann_entropy(thermal) - (1.5 * np.log(3) - LN2)) < 1e-6
        assert 1.5 * np.log(3) - LN2 == pytest.approx(0.95477, abs=1e-5)

    def test_von_neumann_rejects_non_psd(self):
        with pytest.raises(ValueError):
            von_neumann_entropy(np.diag([1.1, -0.1]))


class TestNonGaussianity:
    @pytest.mark.parametrize("alpha", [0, 0.5, 1.0, 1.5, 0.8j])
    def test_coherent_is_gaussian(self, alpha):
        assert non_gaussianity(pure_dm(coherent_state(alpha, 25).vector)) < 2e-6

    def test_single_photon(self):
        assert abs(non_gaussianity(fock_dm(1, 10)) - 2 * LN2) < 1e-6

    @pytest.mark.parametrize("alpha", [0.5, 1.0])
    def test_photon_added_oracle(self, alpha):
        assert photon_added_delta_analytic(alpha) == pytest.approx(PACS_DELTA[alpha], abs=1e-13)
        rho = ideal_photon_added_state(alpha, 40)
        assert abs(non_gaussianity(rho) - PACS_DELTA[alpha]) < 1e-9

    def test_thermal_is_gaussian(self):
        assert non_gaussianity(fock.thermal_dm(0.3, 40)) < 1e-9

    def test_non_negative_on_random_states(self, rng):
        for _ in range(1000):
            dim = int(rng.integers(2, 9))
            rank = int(rng.integers(1, dim + 1))
            rho = random_density_matrix(rng, dim + 4, support=dim, rank=rank)
            assert non_gaussianity(rho) >= -1e-8

    def test_invariant_under_gaussian_unitaries(self, rng):
        for _ in range(10):
            rho = random_density_matrix(rng, 45, support=5, rank=int(rng.integers(1, 6)))
            base = non_gaussianity(rho)
            for _ in range(5):
                beta = 0.5 * (rng.normal() + 1j * rng.normal())
                moved = fock.rotate(fock.displace(rho, beta), rng.uniform(0, 2 * np.pi))
                assert abs(non_gaussianity(moved) - base) < 1e-6

    def test_additive_on_products(self, rng):
        for _ in range(5):
            ra = random_density_matrix(rng, 8, support=4)
            rb = random_density_matrix(rng, 8, support=4, rank=2)
            joint = np.kron(ra, rb)
            expected = two_mode_gaussian_entropy(joint, 8, 8) - von_neumann_entropy(joint)
            assert abs(non_gaussianity(ra) + non_gaussianity(rb) - expected) < 1e-8

    def test_gaussian_reference_matches_moments(self, rng):
        for rho in (ideal_photon_added_state(0.7, 30),
                    random_density_matrix(rng, 30, support=4)):
            tau = gaussian_reference(rho)
            ref, s = gaussian_summary(tau), gaussian_summary(rho)
            np.testing.assert_allclose(ref.cov, s.cov, atol=1e-6)
            np.testing.assert_allclose(ref.mean, s.mean, atol=1e-6)
            # the reference is Gaussian and carries the entropy used by delta
            assert non_gaussianity(tau) < 1e-6
            assert abs(von_neumann_entropy(tau) - gaussian_entropy(s)) < 1e-6


def two_mode_gaussian_entropy(joint, da, db):
    """Entropy of the two-mode Gaussian state sharing ``joint``'s moments."""
    a = np.kron(fock.annihilation(da), np.eye(db))
    b = np.kron(np.eye(da), fock.annihilation(db))
    quads = []
    for op in (a, b):
        quads.append((op + op.conj().T) / np.sqrt(2))
        quads.append((op - op.conj().T) / (1j * np.sqrt(2)))
    means = [np.trace(joint @ q).real for q in quads]
    d = [q - m * np.eye(da * db) for q, m in zip(quads, means)]
    cov = np.array([[0.5 * np.trace(joint @ (x @ y + y @ x)).real for y in d] for x in d])
    omega = np.kron(np.eye(2), np.array([[0, 1], [-1, 0]]))
    nus = np.sort(np.abs(np.linalg.eigvals(1j * omega @ cov)))[::2]
    return sum(g(nu) for nu in nus)


def wigner_parity(rho, x, p, pad=60):
    """Wigner function via displaced parity, an independent route."""
    dim = rho.shape[0]
    big = dim + pad
    beta = (x + 1j * p) / np.sqrt(2)
    a = fock.annihilation(big + 60)
    d = expm(beta * a.T - np.conj(beta) * a)[:big, :big]
    shifted = d.conj().T @ fock.embed(rho, big) @ d
    return float(np.real(np.sum((-1.0) ** np.arange(big) * np.diag(shifted))) / np.pi)


class TestWigner:
    def test_fock_origin(self):
        for n in range(6):
            assert wigner_eval(fock_dm(n, 8), 0, 0) == pytest.approx((-1) ** n / np.pi, abs=1e-13)

    def test_coherent_peak(self):
        rho = pure_dm(coherent_state(1.0, 25).vector)
        assert abs(wigner_eval(rho, np.sqrt(2), 0) - 1 / np.pi) < 1e-9

    def test_against_parity_oracle(self, rng):
        rho = random_density_matrix(rng, 10)
        for x, p in rng.uniform(-3, 3, size=(12, 2)):
            assert wigner_eval(rho, x, p) == pytest.approx(wigner_parity(rho, x, p), abs=1e-10)

    def test_single_photon_closed_form(self):
        x = np.linspace(-3, 3, 13)
        r2 = x**2 + 0.4**2
        expected = (2 * r2 - 1) * np.exp(-r2) / np.pi
        np.testing.assert_allclose(wigner(fock_dm(1, 5), x, 0.4), expected, atol=1e-14)

    def test_grid_normalization(self):
        grid = wigner_grid(fock_dm(0, 5), (-5, 5), (-5, 5), 0.05)
        assert abs(grid.riemann_sum() - 1) < 5e-3
        grid = wigner_grid(ideal_photon_added_state(0.5, 20), (-7, 8), (-7, 7), 0.05)
        assert abs(grid.riemann_sum() - 1) < 5e-3

    def test_grid_layout(self):
        grid = wigner_grid(fock_dm(1, 4), (-1, 1), (0, 0.5), 0.5)
        assert grid.values.shape == (5, 2)
        assert grid.values[2, 0] == pytest.approx(-1 / np.pi)

    def test_p_marginal_matches_homodyne(self, rng):
        rho = random_density_matrix(rng, 10)
        xs = np.linspace(-4, 4, 17)
        ps = np.linspace(-12, 12, 4801)
        w = wigner(rho, xs[:, None], ps[None, :])
        marginal = integrate.simpson(w, x=ps, axis=1)
        np.testing.assert_allclose(marginal, homodyne_pdf(rho, 0.0, xs), atol=1e-4)


class TestNonClassicality:
    def test_single_photon(self):
        assert abs(non_classicality(fock_dm(1, 10)) - 1) < 1e-6

    @pytest.mark.parametrize("rho", [fock_dm(0, 10), pure_dm(coherent_state(1.0, 20).vector),
                                     fock.thermal_dm(0.4, 20)])
    def test_classical_states_never_witness(self, rho):
        assert non_classicality(rho) <= 0

    @pytest.mark.parametrize("eta", [0.6, 0.71, 0.9])
    def test_lossy_single_photon(self, eta):
        rho = loss_channel(fock_dm(1, 10), eta)
        assert abs(non_classicality(rho) - (2 * eta - 1)) < 1e-6

    def test_lossy_single_photon_below_half(self):
        # the origin value turns positive; the minimum sits there, so nu = 2 eta - 1 < 0
        rho = loss_channel(fock_dm(1, 10), 0.4)
        assert non_classicality(rho) <= 0

    def test_photon_added_witness_decreases_with_alpha(self):
        values = [non_classicality(ideal_photon_added_state(a, 25)) for a in (0, 0.5, 1, 1.5)]
        assert values[0] == pytest.approx(1.0, abs=1e-6)
        assert all(v > 0 for v in values)
        assert np.all(np.diff(values) < 0)

    def test_grid_checks(self):
        rho = fock_dm(1, 10)
        with pytest.raises(ValueError, match="coarser"):
            non_classicality(rho, WignerGrid((-8, 8), (-8, 8), 0.1))
        with pytest.raises(ValueError, match="cover"):
            non_classicality(rho, WignerGrid((-2, 2), (-8, 8), 0.05))
        explicit = non_classicality(rho, WignerGrid((-8, 8), (-8, 8), 0.05))
        assert explicit == pytest.approx(1.0, abs=1e-6)

    def test_off_grid_minimum_is_refined(self):
        # displaced photon: minimum at (0.333..., -0.2), not a grid point of step 0.05
        rho = fock.displace(fock_dm(1, 30), (1 / 3 - 0.2j) / np.sqrt(2))
        assert abs(non_classicality(rho) - 1) < 1e-6
