"""Gaussian moments, entropies, non-Gaussianity and Wigner negativity."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import optimize
from scipy.special import gammaln

from .fock import (
    VACUUM_VARIANCE,
    annihilation,
    displacement_operator,
    conjugate,
    rotation_operator,
    squeeze_operator,
    thermal_dm,
)

EIGENVALUE_FLOOR = 1e-14
NEGATIVE_DELTA_TOL = 1e-8
SINGLE_PHOTON_WIGNER_MIN = -1.0 / np.pi
WIGNER_ZERO_TOL = 1e-12


@dataclass(frozen=True)
class GaussianSummary:
    """First moments ``(<x>, <p>)`` and the 2x2 covariance matrix."""

    mean: np.ndarray
    cov: np.ndarray

    @property
    def symplectic_eigenvalue(self) -> float:
        return float(np.sqrt(max(np.linalg.det(self.cov), 0.0)))


def ladder_moments(rho: np.ndarray) -> tuple[complex, complex, float]:
    """``<a>``, ``<a^2>`` and ``<a^dag a>``.

    These three are exact for any state supported on the truncated space,
    unlike moments of truncated ``x`` and ``p`` matrices.
    """
    dim = rho.shape[0]
    a = annihilation(dim)
    mean_a = complex(np.trace(rho @ a))
    mean_a2 = complex(np.trace(rho @ a @ a))
    nbar = float(np.sum(np.arange(dim) * np.real(np.diag(rho))))
    return mean_a, mean_a2, nbar


def gaussian_summary(rho: np.ndarray) -> GaussianSummary:
    mean_a, mean_a2, nbar = ladder_moments(rho)
    d_a2 = mean_a2 - mean_a**2
    d_n = nbar - abs(mean_a) ** 2
    vxx = d_n + d_a2.real + VACUUM_VARIANCE
    vpp = d_n - d_a2.real + VACUUM_VARIANCE
    vxp = d_a2.imag
    mean = np.sqrt(2.0) * np.array([mean_a.real, mean_a.imag])
    cov = np.array([[vxx, vxp], [vxp, vpp]])
    return GaussianSummary(mean, cov)


def entropy_function(nu: float) -> float:
    """Entropy of a single-mode Gaussian state with symplectic eigenvalue ``nu``."""
    if nu <= 0.5:
        return 0.0
    return float((nu + 0.5) * np.log(nu + 0.5) - (nu - 0.5) * np.log(nu - 0.5))


def gaussian_entropy(summary: GaussianSummary, det_tol: float = 1e-9) -> float:
    """Von Neumann entropy (nats) of the Gaussian state with this covariance."""
    cov = np.asarray(summary.cov)
    det = float(np.linalg.det(cov))
    if det < 0.25 - det_tol:
        raise ValueError(f"unphysical covariance: det = {det:.6g} < 1/4")
    return entropy_function(np.sqrt(max(det, 0.25)))


def von_neumann_entropy(rho: np.ndarray, psd_tol: float = 1e-8) -> float:
    vals = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    if vals[0] < -psd_tol:
        raise ValueError(f"state is not positive semidefinite (eigenvalue {vals[0]:.3e})")
    vals = vals[vals > EIGENVALUE_FLOOR]
    return float(-np.sum(vals * np.log(vals)))


def non_gaussianity(rho: np.ndarray) -> float:
    """Entropy gap between the moment-matched Gaussian state and ``rho`` (nats).

    Small negative values produced by eigenvalue noise are clipped to zero
    with a warning. A clearly negative gap means the state is not represented
    faithfully (usually truncation) and raises.
    """
    delta = gaussian_entropy(gaussian_summary(rho)) - von_neumann_entropy(rho)
    if delta < 0:
        if delta < -1e-6:
            raise ValueError(f"negative non-Gaussianity {delta:.3e}; check truncation")
        if delta < -NEGATIVE_DELTA_TOL:
            warnings.warn(f"clipping negative non-Gaussianity {delta:.3e} to zero",
                          RuntimeWarning, stacklevel=2)
        delta = 0.0
    return float(delta)


def gaussian_reference(rho: np.ndarray, dim: int | None = None, pad: int = 60) -> np.ndarray:
    """Materialize the Gaussian state with the same first and second moments.

    Built as displaced, rotated, squeezed thermal light. Only needed for
    checks; the entropy of the reference follows from the covariance alone.
    """
    dim = rho.shape[0] if dim is None else dim
    summary = gaussian_summary(rho)
    vals, vecs = np.linalg.eigh(summary.cov)
    nu = np.sqrt(vals[0] * vals[1])
    nbar = nu - 0.5
    squeeze = 0.5 * np.log(nu / vals[0])
    angle = np.arctan2(vecs[1, 0], vecs[0, 0])
    big = dim + pad
    state = thermal_dm(max(nbar, 0.0), big)
    state = conjugate(state, squeeze_operator(squeeze, big, pad=0))
    state = conjugate(state, rotation_operator(angle, big))
    beta = (summary.mean[0] + 1j * summary.mean[1]) / np.sqrt(2.0)
    state = conjugate(state, displacement_operator(beta, big, pad=pad))
    return state[:dim, :dim]


# Wigner function --------------------------------------------------------------

def wigner(rho: np.ndarray, x, p) -> np.ndarray:
    """Wigner function of ``rho`` at the broadcast points ``(x, p)``.

    Uses the number-basis kernel ``W_mn`` written with generalized Laguerre
    polynomials, evaluated by the three-term recurrence in ``n`` for each
    off-diagonal ``k = m - n``. Normalized so that ``W`` integrates to one
    over ``dx dp`` and ``W_vacuum(0, 0) = 1/pi``.
    """
    x, p = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(p, dtype=float))
    dim = rho.shape[0]
    r2 = x**2 + p**2
    y = 2.0 * r2
    z = np.sqrt(2.0) * (x - 1j * p)
    total = np.zeros(x.shape)
    zk = np.ones(x.shape, dtype=complex)
    for k in range(dim):
        coeffs = np.array([rho[n + k, n] for n in range(dim - k)])
        n = np.arange(dim - k)
        coeffs = coeffs * (-1.0) ** n * np.exp(0.5 * (gammaln(n + 1) - gammaln(n + k + 1)))
        lag_prev = np.ones(x.shape)
        acc = coeffs[0] * lag_prev
        if dim - k > 1:
            lag = 1.0 + k - y
            acc = acc + coeffs[1] * lag
            for j in range(1, dim - k - 1):
                lag, lag_prev = ((2 * j + 1 + k - y) * lag - (j + k) * lag_prev) / (j + 1), lag
                acc = acc + coeffs[j + 1] * lag
        weight = 1.0 if k == 0 else 2.0
        total += weight * np.real(zk * acc)
        zk = zk * z
    return total * np.exp(-r2) / np.pi


def wigner_eval(rho: np.ndarray, x: float, p: float) -> float:
    return float(wigner(rho, x, p))


@dataclass
class WignerGrid:
    """Square-step grid of Wigner values; ``values[i, j]`` is at ``(xs[i], ps[j])``."""

    x_range: tuple[float, float]
    p_range: tuple[float, float]
    step: float
    values: np.ndarray | None = None

    @property
    def xs(self) -> np.ndarray:
        return _axis(self.x_range, self.step)

    @property
    def ps(self) -> np.ndarray:
        return _axis(self.p_range, self.step)

    def riemann_sum(self) -> float:
        return float(np.sum(self.values) * self.step**2)


def _axis(bounds, step):
    lo, hi = bounds
    n = int(np.floor((hi - lo) / step + 1e-9))
    return lo + step * np.arange(n + 1)


def wigner_grid(rho: np.ndarray, x_range, p_range, step: float) -> WignerGrid:
    grid = WignerGrid(tuple(x_range), tuple(p_range), float(step))
    xx, pp = np.meshgrid(grid.xs, grid.ps, indexing="ij")
    grid.values = wigner(rho, xx, pp)
    return grid


def default_grid(rho: np.ndarray, step: float = 0.05, span: float = 6.0) -> WignerGrid:
    """Grid centred on the state's mean, reaching ``span`` standard deviations."""
    summary = gaussian_summary(rho)
    half = span * np.sqrt(np.max(np.linalg.eigvalsh(summary.cov)))
    half = step * np.ceil(half / step)
    cx, cp = (step * np.round(summary.mean / step))
    return WignerGrid((cx - half, cx + half), (cp - half, cp + half), step)


def _check_grid(rho, grid: WignerGrid, span: float, max_step: float):
    if grid.step > max_step + 1e-12:
        raise ValueError(f"grid step {grid.step} is coarser than {max_step}")
    summary = gaussian_summary(rho)
    std = np.sqrt(np.diag(summary.cov))
    for (lo, hi), mu, sd, name in zip((grid.x_range, grid.p_range), summary.mean, std, "xp"):
        if lo > mu - span * sd + 1e-9 or hi < mu + span * sd - 1e-9:
            raise ValueError(f"grid {name}-range ({lo}, {hi}) does not cover "
                             f"mean +/- {span} std ({mu - span * sd:.3f}, {mu + span * sd:.3f})")


def wigner_minimum(rho: np.ndarray, grid: WignerGrid | None = None,
                   polish: bool = True) -> tuple[float, tuple[float, float]]:
    """Smallest Wigner value: coarse grid, one 10x finer pass, then a local polish."""
    if grid is None:
        grid = default_grid(rho)
    if grid.values is None:
        grid = wigner_grid(rho, grid.x_range, grid.p_range, grid.step)
    i, j = np.unravel_index(np.argmin(grid.values), grid.values.shape)
    x0, p0 = grid.xs[i], grid.ps[j]
    fine = grid.step / 10
    offsets = fine * np.arange(-10, 11)
    xx, pp = np.meshgrid(x0 + offsets, p0 + offsets, indexing="ij")
    local = wigner(rho, xx, pp)
    k, m = np.unravel_index(np.argmin(local), local.shape)
    best = (float(local[k, m]), (float(xx[k, m]), float(pp[k, m])))
    if polish:
        start = np.array(best[1])
        res = optimize.minimize(lambda v: wigner_eval(rho, v[0], v[1]), start,
                                method="L-BFGS-B",
                                bounds=[(start[0] - fine, start[0] + fine),
                                        (start[1] - fine, start[1] + fine)])
        if res.fun < best[0]:
            best = (float(res.fun), (float(res.x[0]), float(res.x[1])))
    return best


def non_classicality(rho: np.ndarray, grid: WignerGrid | None = None,
                     span: float = 6.0, max_step: float = 0.05, polish: bool = True) -> float:
    """Wigner minimum of ``rho`` relative to that of the single photon, ``-1/pi``.

    Positive values witness non-classicality; one corresponds to ``|1><1|``.
    Minima within ``WIGNER_ZERO_TOL`` of zero are rounding noise on a
    non-negative Wigner function and never count as a witness.
    """
    if grid is None:
        grid = default_grid(rho, step=max_step, span=span)
    else:
        _check_grid(rho, grid, span, max_step)
    w_min, _ = wigner_minimum(rho, grid, polish=polish)
    if w_min > -WIGNER_ZERO_TOL:
        w_min = max(w_min, 0.0)
    return w_min / SINGLE_PHOTON_WIGNER_MIN
