"""Truncated Fock-space states, ladder operators and single-mode channels.

Conventions used across the package (set here, nowhere else):

* a single-mode density matrix is a complex ``(dim, dim)`` ndarray in the
  number basis ``|0>, ..., |dim-1>``;
* quadratures are ``x = (a + a^dag)/sqrt(2)`` and ``p = (a - a^dag)/(i sqrt(2))``
  with hbar = 1, so the vacuum variance is 1/2;
* a multimode pure state stores its amplitudes as an ndarray with one axis
  per mode, so the flat index is row-major over the mode order.
"""

from __future__ import annotations

import functools
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg
from scipy.special import gammaln

HBAR = 1.0
VACUUM_VARIANCE = 0.5
DEFAULT_TAIL_TOL = 1e-6


class TruncationWarning(UserWarning):
    """Population reached the top level of a truncated Fock space."""


@dataclass
class MultiModeState:
    """Pure (possibly sub-normalized) state over up to four truncated modes.

    ``amplitudes[n_0, n_1, ...]`` is the amplitude of ``|n_0, n_1, ...>`` with
    the modes ordered as in ``labels``.
    """

    amplitudes: np.ndarray
    labels: tuple[str, ...] = field(default=("s",))

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        self.labels = tuple(self.labels)
        if self.amplitudes.ndim != len(self.labels):
            raise ValueError(
                f"{self.amplitudes.ndim} amplitude axes but {len(self.labels)} labels"
            )
        if not 1 <= len(self.labels) <= 4:
            raise ValueError("between one and four modes are supported")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError(f"duplicate mode labels {self.labels}")

    @property
    def dims(self) -> tuple[int, ...]:
        return self.amplitudes.shape

    @property
    def norm2(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    @property
    def vector(self) -> np.ndarray:
        return self.amplitudes.reshape(-1)

    def axis(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown mode {label!r}; modes are {self.labels}") from None

    def normalized(self) -> tuple[MultiModeState, float]:
        """Return the normalized state and the squared norm it had."""
        n2 = self.norm2
        if n2 <= 0:
            raise ValueError("cannot normalize a zero vector")
        return MultiModeState(self.amplitudes / np.sqrt(n2), self.labels), n2


def _check_dim(dim):
    if int(dim) != dim or dim < 2:
        raise ValueError(f"invalid dimension {dim!r}: need an integer >= 2")
    return int(dim)


def annihilation(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1)


def creation(dim: int) -> np.ndarray:
    return annihilation(dim).T


def number_operator(dim: int) -> np.ndarray:
    return np.diag(np.arange(dim, dtype=float))


def fock_vector(n: int, dim: int) -> np.ndarray:
    vec = np.zeros(dim, dtype=complex)
    vec[n] = 1.0
    return vec


def fock_dm(n: int, dim: int) -> np.ndarray:
    return pure_dm(fock_vector(n, dim))


def pure_dm(vec) -> np.ndarray:
    vec = np.asarray(vec, dtype=complex).reshape(-1)
    return np.outer(vec, vec.conj())


def coherent_amplitudes(alpha: complex, dim: int) -> np.ndarray:
    """Untruncated-normalization coherent amplitudes ``e^{-|a|^2/2} a^n / sqrt(n!)``."""
    n = np.arange(dim)
    alpha = complex(alpha)
    if alpha == 0:
        return fock_vector(0, dim)
    log_mod = n * np.log(abs(alpha)) - 0.5 * gammaln(n + 1) - 0.5 * abs(alpha) ** 2
    return np.exp(log_mod) * np.exp(1j * n * np.angle(alpha))


def coherent_state(alpha: complex, dim: int, label: str = "s",
                   tail_tol: float = DEFAULT_TAIL_TOL,
                   return_norm: bool = False):
    """Coherent state ``|alpha>`` renormalized on ``dim`` levels.

    With ``return_norm=True`` also returns the Poisson mass captured by the
    truncated space (the renormalization factor is its inverse square root).
    """
    dim = _check_dim(dim)
    amps = coherent_amplitudes(alpha, dim)
    captured = float(np.sum(np.abs(amps) ** 2))
    if 1.0 - captured > tail_tol:
        warnings.warn(
            f"coherent state |alpha|={abs(alpha):.3g} loses {1 - captured:.2e} "
            f"of its Poisson mass above level {dim - 1}",
            TruncationWarning, stacklevel=2)
    state = MultiModeState(amps / np.sqrt(captured), (label,))
    if return_norm:
        return state, captured
    return state


def fock_state(n: int, dim: int, label: str = "s") -> MultiModeState:
    return MultiModeState(fock_vector(n, _check_dim(dim)), (label,))


def vacuum(dim: int, label: str) -> MultiModeState:
    return fock_state(0, dim, label)


def tensor(*states: MultiModeState) -> MultiModeState:
    amps = states[0].amplitudes
    labels = states[0].labels
    for st in states[1:]:
        amps = np.multiply.outer(amps, st.amplitudes)
        labels = labels + st.labels
    return MultiModeState(amps, labels)


def _apply_single_mode(state: MultiModeState, mode: str, op: np.ndarray) -> MultiModeState:
    ax = state.axis(mode)
    out = np.tensordot(op, state.amplitudes, axes=([1], [ax]))
    return MultiModeState(np.moveaxis(out, 0, ax), state.labels)


def _top_level_population(state: MultiModeState, mode: str) -> float:
    ax = state.axis(mode)
    top = np.take(state.amplitudes, state.dims[ax] - 1, axis=ax)
    return float(np.sum(np.abs(top) ** 2))


def apply_creation(state: MultiModeState, mode: str,
                   tail_tol: float = DEFAULT_TAIL_TOL) -> tuple[MultiModeState, float]:
    """Apply ``a^dag`` to one mode without renormalizing.

    Amplitude already at the top level has nowhere to go and is dropped; a
    ``TruncationWarning`` is raised when that mass exceeds ``tail_tol``.
    """
    lost = _top_level_population(state, mode)
    if lost > tail_tol * max(state.norm2, 1e-300):
        warnings.warn(f"a^dag on mode {mode!r} drops population {lost:.2e} at the "
                      "truncation edge", TruncationWarning, stacklevel=2)
    out = _apply_single_mode(state, mode, creation(state.dims[state.axis(mode)]))
    return out, out.norm2


def apply_annihilation(state: MultiModeState, mode: str) -> tuple[MultiModeState, float]:
    out = _apply_single_mode(state, mode, annihilation(state.dims[state.axis(mode)]))
    return out, out.norm2


@functools.lru_cache(maxsize=64)
def _squeezer_matrix(r: float, d1: int, d2: int) -> np.ndarray:
    a = annihilation(d1)
    b = annihilation(d2)
    pair = np.kron(a, b)
    gen = r * (pair.T - pair)
    return linalg.expm(gen)


def squeezer_matrix(r: float, d1: int, d2: int) -> np.ndarray:
    """``exp(r (a^dag b^dag - a b))`` on the ``d1 * d2`` truncated pair space."""
    out = _squeezer_matrix(float(r), int(d1), int(d2))
    out.setflags(write=False)
    return out


def two_mode_squeeze(state: MultiModeState, pair: tuple[str, str], r: float) -> MultiModeState:
    """Apply the two-mode squeezer ``exp(r (a^dag b^dag - a b))`` to ``pair``.

    The exponential of the truncated generator is computed exactly, so the
    map is unitary on the truncated space.
    """
    if not np.isfinite(r):
        raise ValueError(f"squeezing parameter must be finite, got {r!r}")
    first, second = pair
    if first == second:
        raise ValueError("a mode pair needs two distinct modes")
    ax1, ax2 = state.axis(first), state.axis(second)
    if r == 0:
        return MultiModeState(state.amplitudes.copy(), state.labels)
    d1, d2 = state.dims[ax1], state.dims[ax2]
    amps = np.moveaxis(state.amplitudes, (ax1, ax2), (0, 1))
    rest = amps.shape[2:]
    flat = amps.reshape(d1 * d2, -1)
    out = (squeezer_matrix(r, d1, d2) @ flat).reshape((d1, d2) + rest)
    return MultiModeState(np.moveaxis(out, (0, 1), (ax1, ax2)), state.labels)


def partial_trace(state: MultiModeState, keep: str) -> np.ndarray:
    """Reduced density matrix of mode ``keep``; its trace is the squared norm."""
    ax = state.axis(keep)
    amps = np.moveaxis(state.amplitudes, ax, 0).reshape(state.dims[ax], -1)
    rho = amps @ amps.conj().T
    return 0.5 * (rho + rho.conj().T)


def normalize_dm(rho: np.ndarray) -> tuple[np.ndarray, float]:
    tr = float(np.trace(rho).real)
    if tr <= 0:
        raise ValueError("density matrix has non-positive trace")
    return rho / tr, tr


@functools.lru_cache(maxsize=32)
def _loss_kraus(eta: float, dim: int) -> np.ndarray:
    n = np.arange(dim)
    kraus = np.zeros((dim, dim, dim))
    for k in range(dim):
        m = n[k:]
        log_binom = gammaln(m + 1) - gammaln(k + 1) - gammaln(m - k + 1)
        kraus[k, m - k, m] = (np.exp(0.5 * log_binom) * eta ** (0.5 * (m - k))
                              * (1.0 - eta) ** (0.5 * k))
    return kraus


def loss_kraus(eta: float, dim: int) -> np.ndarray:
    """Kraus operators ``A_k`` of the pure-loss channel, stacked on axis 0."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta!r}")
    return _loss_kraus(float(eta), int(dim))


def loss_channel(rho: np.ndarray, eta: float) -> np.ndarray:
    """Beam-splitter loss with transmissivity ``eta``."""
    rho = np.asarray(rho, dtype=complex)
    kraus = loss_kraus(eta, rho.shape[0])
    if eta == 1.0:
        return rho.copy()
    return np.einsum("kab,bc,kdc->ad", kraus, rho, kraus)


def mix(rho_a: np.ndarray, rho_b: np.ndarray, w: float) -> np.ndarray:
    if np.shape(rho_a) != np.shape(rho_b):
        raise ValueError(f"dimension mismatch: {np.shape(rho_a)} vs {np.shape(rho_b)}")
    if not 0.0 <= w <= 1.0:
        raise ValueError(f"mixing weight must lie in [0, 1], got {w!r}")
    return w * np.asarray(rho_a) + (1.0 - w) * np.asarray(rho_b)


def embed(rho: np.ndarray, dim: int) -> np.ndarray:
    """Zero-pad (or crop) a density matrix to ``dim`` levels."""
    out = np.zeros((dim, dim), dtype=complex)
    d = min(dim, rho.shape[0])
    out[:d, :d] = rho[:d, :d]
    return out


def _psd_sqrt(rho: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(rho)
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.conj().T


def fidelity(rho_a: np.ndarray, rho_b: np.ndarray, psd_tol: float = 1e-8) -> float:
    """Uhlmann fidelity ``(Tr sqrt(sqrt(a) b sqrt(a)))**2``.

    Inputs of different truncation are zero-padded to the larger dimension.
    """
    rho_a = np.asarray(rho_a, dtype=complex)
    rho_b = np.asarray(rho_b, dtype=complex)
    dim = max(rho_a.shape[0], rho_b.shape[0])
    rho_a, rho_b = embed(rho_a, dim), embed(rho_b, dim)
    for rho in (rho_a, rho_b):
        if np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0] < -psd_tol:
            raise ValueError("fidelity needs positive semidefinite inputs")
    sa = _psd_sqrt(0.5 * (rho_a + rho_a.conj().T))
    sb = _psd_sqrt(0.5 * (rho_b + rho_b.conj().T))
    # trace norm of sqrt(a) sqrt(b): same value as Tr sqrt(sqrt(a) b sqrt(a)), symmetric in a, b
    vals = np.linalg.svd(sa @ sb, compute_uv=False) ** 2
    return float(min(np.sum(np.sqrt(vals)) ** 2, 1.0))


def check_density_matrix(rho: np.ndarray, herm_tol: float = 1e-12,
                         trace_tol: float = 1e-10, psd_tol: float = 1e-10) -> None:
    """Raise ``ValueError`` unless ``rho`` is Hermitian, unit-trace and PSD."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > herm_tol:
        raise ValueError("matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > trace_tol:
        raise ValueError(f"trace {np.trace(rho).real!r} is not 1")
    low = np.linalg.eigvalsh(rho)[0]
    if low < -psd_tol:
        raise ValueError(f"matrix is not positive semidefinite (eigenvalue {low:.3e})")


def tail_population(rho: np.ndarray) -> float:
    """Population of the highest retained Fock level."""
    return float(np.real(rho[-1, -1]))


def warn_if_truncated(rho: np.ndarray, tail_tol: float = DEFAULT_TAIL_TOL, what: str = "state"):
    tail = tail_population(rho) / max(float(np.trace(rho).real), 1e-300)
    if tail > tail_tol:
        warnings.warn(f"{what} has population {tail:.2e} on its top Fock level "
                      f"(dim {rho.shape[0]})", TruncationWarning, stacklevel=2)
    return tail


def thermal_dm(nbar: float, dim: int) -> np.ndarray:
    """Thermal state with mean photon number ``nbar`` (renormalized on ``dim`` levels)."""
    if nbar == 0:
        return fock_dm(0, dim)
    q = nbar / (1.0 + nbar)
    pops = q ** np.arange(dim)
    return np.diag(pops / pops.sum()).astype(complex)


def _padded_unitary(generator, dim: int, pad: int) -> np.ndarray:
    big = dim + pad
    return linalg.expm(generator(big))[:dim, :dim]


def displacement_operator(beta: complex, dim: int, pad: int = 40) -> np.ndarray:
    """``D(beta)`` computed on ``dim + pad`` levels and cropped to ``dim``.

    Accurate on states whose support, once displaced, stays well below ``dim``.
    """
    beta = complex(beta)

    def gen(d):
        a = annihilation(d)
        return beta * a.T - np.conj(beta) * a

    return _padded_unitary(gen, dim, pad)


def squeeze_operator(z: complex, dim: int, pad: int = 40) -> np.ndarray:
    """Single-mode ``S(z) = exp((z* a^2 - z a^dag^2)/2)`` cropped to ``dim``."""
    z = complex(z)

    def gen(d):
        a = annihilation(d)
        return 0.5 * (np.conj(z) * a @ a - z * a.T @ a.T)

    return _padded_unitary(gen, dim, pad)


def rotation_operator(phi: float, dim: int) -> np.ndarray:
    return np.diag(np.exp(1j * phi * np.arange(dim)))


def conjugate(rho: np.ndarray, unitary: np.ndarray) -> np.ndarray:
    out = unitary @ rho @ unitary.conj().T
    return 0.5 * (out + out.conj().T)


def displace(rho: np.ndarray, beta: complex, pad: int = 40) -> np.ndarray:
    return conjugate(rho, displacement_operator(beta, rho.shape[0], pad))


def rotate(rho: np.ndarray, phi: float) -> np.ndarray:
    return conjugate(rho, rotation_operator(phi, rho.shape[0]))
