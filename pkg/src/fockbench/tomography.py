"""Synthetic homodyne data and maximum-likelihood state reconstruction."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DEFAULT_BINS = 12


def hermite_functions(n_max: int, x) -> np.ndarray:
    """Oscillator eigenfunctions ``psi_0..psi_{n_max-1}`` at ``x``, shape ``(n_max, len(x))``.

    ``psi_n(x) = <x|n>`` for ``x = (a + a^dag)/sqrt(2)``, via the stable
    three-term recurrence.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty((n_max, x.size))
    out[0] = np.pi ** -0.25 * np.exp(-0.5 * x**2)
    if n_max > 1:
        out[1] = np.sqrt(2.0) * x * out[0]
    for n in range(1, n_max - 1):
        out[n + 1] = np.sqrt(2.0 / (n + 1)) * x * out[n] - np.sqrt(n / (n + 1)) * out[n - 1]
    return out


def quadrature_overlaps(dim: int, theta: float, x) -> np.ndarray:
    """``<n|x_theta>`` as an array of shape ``(len(x), dim)``."""
    psi = hermite_functions(dim, x)
    return (psi * np.exp(1j * theta * np.arange(dim))[:, None]).T


def homodyne_pdf(rho: np.ndarray, theta: float, x) -> np.ndarray:
    """Marginal density of the rotated quadrature ``x_theta``.

    ``p(x) = sum_mn rho_mn psi_m(x) psi_n(x) exp(i (n - m) theta)``, clipped
    at zero against rounding.
    """
    scalar = np.ndim(x) == 0
    u = quadrature_overlaps(rho.shape[0], theta, x)
    vals = np.real(np.sum((u.conj() @ rho) * u, axis=1))
    vals = np.clip(vals, 0.0, None)
    return float(vals[0]) if scalar else vals


@dataclass
class QuadratureDataset:
    """Phase-binned homodyne samples; ``bins[k]`` indexes ``phases``."""

    bins: np.ndarray
    x: np.ndarray
    n_bins: int = DEFAULT_BINS

    def __post_init__(self):
        self.bins = np.asarray(self.bins, dtype=np.int64)
        self.x = np.asarray(self.x, dtype=float)
        if self.bins.shape != self.x.shape:
            raise ValueError("bins and x must have the same length")
        if self.n_bins < 1:
            raise ValueError("n_bins must be >= 1")
        if self.bins.size and (self.bins.min() < 0 or self.bins.max() >= self.n_bins):
            raise ValueError(f"phase bin index out of range [0, {self.n_bins})")

    @property
    def phases(self) -> np.ndarray:
        return phase_grid(self.n_bins)

    def __len__(self):
        return self.x.size


def phase_grid(n_bins: int) -> np.ndarray:
    """Uniform phases ``pi * b / n_bins`` covering ``[0, pi)``."""
    return np.pi * np.arange(n_bins) / n_bins


def _table_range(dim: int) -> float:
    return np.sqrt(2.0 * dim + 1.0) + 6.0


def sample_quadratures(rho: np.ndarray, n_samples: int, n_bins: int = DEFAULT_BINS,
                       seed: int = 0, n_table: int = 8001) -> QuadratureDataset:
    """Draw i.i.d. homodyne outcomes from ``rho``.

    Each sample picks a phase bin uniformly, then an ``x`` by inverting the
    tabulated CDF of ``homodyne_pdf`` at that phase. Randomness is split with
    ``SeedSequence(seed).spawn(n_bins + 1)``: child 0 draws the bins, child
    ``b + 1`` draws the quadratures of bin ``b``.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    if n_bins < 1:
        raise ValueError("n_bins must be >= 1")
    streams = [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n_bins + 1)]
    bins = streams[0].integers(0, n_bins, size=n_samples)
    x = np.empty(n_samples)
    half = _table_range(rho.shape[0])
    grid = np.linspace(-half, half, n_table)
    for b, theta in enumerate(phase_grid(n_bins)):
        mask = bins == b
        pdf = homodyne_pdf(rho, theta, grid)
        cdf = np.concatenate(([0.0], np.cumsum(0.5 * (pdf[1:] + pdf[:-1]) * np.diff(grid))))
        cdf /= cdf[-1]
        x[mask] = np.interp(streams[b + 1].random(mask.sum()), cdf, grid)
    return QuadratureDataset(bins, x, n_bins)


@dataclass(frozen=True)
class TomoConfig:
    dim: int = 10
    x_grid: tuple[float, float, int] = (-6.0, 6.0, 400)
    max_iters: int = 2000
    log_lik_tol: float = 1e-10

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError("dim must be >= 2")
        if self.x_grid[2] < 100:
            raise ValueError("x_grid needs at least 100 points")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


@dataclass
class TomoLog:
    log_likelihood: list[float] = field(default_factory=list)
    converged: bool = False
    dropped: int = 0
    diluted_steps: int = 0

    @property
    def iterations(self) -> int:
        return max(len(self.log_likelihood) - 1, 0)


class IllConditionedError(RuntimeError):
    """Observed counts fall where the model predicts zero probability."""


def _povm_vectors(data: QuadratureDataset, config: TomoConfig):
    lo, hi, n_points = config.x_grid
    edges = np.linspace(lo, hi, int(n_points) + 1)
    centers = 0.5 * (edges[1:] + edges[:-1])
    width = edges[1] - edges[0]
    inside = (data.x >= lo) & (data.x < hi)
    counts, _, _ = np.histogram2d(data.bins[inside], data.x[inside],
                                  bins=[np.arange(data.n_bins + 1) - 0.5, edges])
    bin_totals = counts.sum(axis=1)
    total = bin_totals.sum()
    if total == 0:
        raise ValueError("no samples fall inside the reconstruction grid")
    vecs, freqs = [], []
    for b, theta in enumerate(data.phases):
        keep = counts[b] > 0
        if not keep.any():
            continue
        u = quadrature_overlaps(config.dim, theta, centers[keep])
        # weight each phase by its observed share so the POVM sums to ~identity
        vecs.append(u * np.sqrt(width * bin_totals[b] / total))
        freqs.append(counts[b, keep] / total)
    return np.vstack(vecs), np.concatenate(freqs), int((~inside).sum())


def _probabilities(rho, vecs):
    return np.real(np.sum((vecs.conj() @ rho) * vecs, axis=1))


def _log_likelihood(freqs, probs):
    if np.any(probs <= 0):
        raise IllConditionedError("zero model probability on an occupied histogram bin")
    return float(np.sum(freqs * np.log(probs)))


def _r_operator(freqs, probs, vecs):
    return (vecs * (freqs / probs)[:, None]).T @ vecs.conj()


def _step(rho, op):
    new = op @ rho @ op.conj().T
    new = 0.5 * (new + new.conj().T)
    return new / np.trace(new).real


def maxlik_reconstruct(data: QuadratureDataset, config: TomoConfig | None = None,
                       rho0: np.ndarray | None = None) -> tuple[np.ndarray, TomoLog]:
    """Iterative ``R rho R`` maximum-likelihood reconstruction from binned data.

    Histograms of each phase over ``config.x_grid`` define rank-one quadrature
    projectors. If a plain ``R rho R`` step would lower the likelihood, the
    step is diluted to ``(1 + e R) rho (1 + e R)`` with ``e`` halved until it
    does not, which keeps the likelihood non-decreasing.
    """
    config = config or TomoConfig()
    if len(data) == 0:
        raise ValueError("empty quadrature dataset")
    vecs, freqs, dropped = _povm_vectors(data, config)
    eye = np.eye(config.dim)
    rho = eye / config.dim if rho0 is None else np.asarray(rho0, dtype=complex)
    probs = _probabilities(rho, vecs)
    log = TomoLog(log_likelihood=[_log_likelihood(freqs, probs)], dropped=dropped)
    for _ in range(config.max_iters):
        current = log.log_likelihood[-1]
        r_op = _r_operator(freqs, probs, vecs)
        candidate = _step(rho, r_op)
        cand_probs = _probabilities(candidate, vecs)
        cand_ll = _log_likelihood(freqs, cand_probs)
        eps = 1.0
        while cand_ll < current and eps > 1e-12:
            log.diluted_steps += 1
            candidate = _step(rho, eye + eps * r_op)
            cand_probs = _probabilities(candidate, vecs)
            cand_ll = _log_likelihood(freqs, cand_probs)
            eps *= 0.5
        if cand_ll < current:
            log.converged = True
            break
        rho, probs = candidate, cand_probs
        log.log_likelihood.append(cand_ll)
        if cand_ll - current < config.log_lik_tol:
            log.converged = True
            break
    return rho, log
