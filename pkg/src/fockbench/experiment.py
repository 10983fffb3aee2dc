"""Heralded photon addition to a coherent state, with the experimental noise model.

The signal ``s`` is seeded with ``|alpha>`` and amplified together with the
idler ``i``. Parasitic amplification at strength ``gamma * r`` couples ``s``
and ``i`` to two unobserved modes ``s'`` and ``i'``. An idler click is
modelled by a single application of the idler annihilation operator. A
fraction ``1 - xi`` of clicks comes from the wrong mode and heralds the
unconditioned signal. Homodyne inefficiency is a loss channel of
transmissivity ``eta``.
"""

from __future__ import annotations

import dataclasses
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import fock
from .fock import DEFAULT_TAIL_TOL, MultiModeState, TruncationWarning
from .measures import non_classicality, non_gaussianity

MODES = ("s", "i", "sp", "ip")
DEFAULT_MAX_AMPLITUDES = 25**4
MIN_AUX_DIM = 6
MAX_AUX_DIM = 40
AUX_TAIL_TARGET = 1e-9

# noise point fitted to the lab setup: parasitic gain, trigger purity, efficiency
LAB_NOISE_PARAMS = dict(r=0.105, gamma=0.425, xi=0.96, eta=0.71)


def default_dim(alpha: complex) -> int:
    """Signal truncation used when none is given."""
    amp = abs(alpha)
    if amp <= 1.0:
        return 20
    if amp <= 1.5:
        return 25
    return int(math.ceil(10 + 10 * amp))


def auxiliary_dim(strength: float, alpha: complex) -> int:
    """Truncation for an idler-like mode driven at squeezing ``strength``.

    Bounds the mode's mean photon number by ``sinh(strength)^2 (1 + |alpha|^2)``
    (with ``|alpha|`` at least 1.5 so that sweeps share cached propagators) and
    keeps the geometric tail below ``AUX_TAIL_TARGET``.
    """
    nbar = math.sinh(strength) ** 2 * (1.0 + max(abs(alpha), 1.5) ** 2)
    if nbar <= 0:
        return MIN_AUX_DIM
    q = nbar / (1.0 + nbar)
    need = math.ceil(math.log(AUX_TAIL_TARGET) / math.log(q)) + 1
    return int(min(max(need, MIN_AUX_DIM), MAX_AUX_DIM))


@dataclass(frozen=True)
class ExperimentParams:
    alpha: complex = 0.0
    r: float = 0.105
    gamma: float = 0.0
    xi: float = 1.0
    eta: float = 1.0
    dim: int | None = None
    idler_dim: int | None = None
    parasite_dim: int | None = None
    tail_tol: float = DEFAULT_TAIL_TOL
    max_amplitudes: int = DEFAULT_MAX_AMPLITUDES

    def __post_init__(self):
        if not np.isfinite(complex(self.alpha)):
            raise ValueError(f"alpha must be finite, got {self.alpha!r}")
        if not (np.isfinite(self.r) and self.r >= 0):
            raise ValueError(f"r must be a finite number >= 0, got {self.r!r}")
        for name in ("gamma", "xi", "eta"):
            value = getattr(self, name)
            if not (np.isfinite(value) and 0.0 <= value <= 1.0):
                raise ValueError(f"{name} must lie in [0, 1], got {value!r}")
        for name in ("dim", "idler_dim", "parasite_dim"):
            value = getattr(self, name)
            if value is not None and (int(value) != value or value < 2):
                raise ValueError(f"{name} must be an integer >= 2, got {value!r}")

    @property
    def signal_dim(self) -> int:
        return self.dim if self.dim is not None else default_dim(self.alpha)

    def mode_dims(self) -> tuple[int, int, int, int]:
        """Truncations of ``(s, i, s', i')``.

        Parasitic modes shrink to a single level when ``gamma == 0``: they stay
        in vacuum and only contribute a trivial factor.
        """
        ds = self.signal_dim
        di = self.idler_dim or auxiliary_dim(self.r * (1.0 + self.gamma), self.alpha)
        if self.gamma == 0:
            return ds, di, 1, 1
        dp = self.parasite_dim or auxiliary_dim(self.gamma * self.r, self.alpha)
        return ds, di, dp, dp

    def replace(self, **changes) -> ExperimentParams:
        return dataclasses.replace(self, **changes)


@dataclass
class PipelineResult:
    """Signal states of one pipeline run.

    ``rho_success`` and ``rho_faulty`` are the two heralded branches before
    homodyne loss; ``rho_out = loss(xi * rho_success + (1 - xi) * rho_faulty)``.
    ``click_weight`` is the squared norm left after the idler annihilation,
    relative to the normalized input.
    """

    params: ExperimentParams
    rho_out: np.ndarray
    rho_success: np.ndarray
    rho_faulty: np.ndarray
    click_weight: float


def ideal_photon_added_state(alpha: complex, dim: int,
                             tail_tol: float = DEFAULT_TAIL_TOL) -> np.ndarray:
    """Projector onto ``a^dag |alpha> / sqrt(1 + |alpha|^2)``.

    Raises ``ValueError`` when more than ``tail_tol`` of the norm lies above
    the truncation.
    """
    dim = int(dim)
    if dim < 2:
        raise ValueError(f"invalid dimension {dim}")
    coh = fock.coherent_amplitudes(alpha, dim - 1)
    amps = np.zeros(dim, dtype=complex)
    amps[1:] = np.sqrt(np.arange(1, dim)) * coh
    captured = float(np.sum(np.abs(amps) ** 2)) / (1.0 + abs(alpha) ** 2)
    if 1.0 - captured > tail_tol:
        raise ValueError(f"dim={dim} truncates {1 - captured:.2e} of the photon-added "
                         f"state at |alpha|={abs(alpha):.3g}")
    amps /= np.linalg.norm(amps)
    return fock.pure_dm(amps)


def _initial_state(params: ExperimentParams) -> MultiModeState:
    ds, di, dsp, dip = params.mode_dims()
    amps = fock.coherent_amplitudes(params.alpha, ds)
    tail = 1.0 - float(np.sum(np.abs(amps) ** 2))
    amps = amps / np.linalg.norm(amps)
    if tail > params.tail_tol:
        warnings.warn(f"coherent seed loses {tail:.2e} above level {ds - 1}",
                      TruncationWarning, stacklevel=3)
    full = amps
    for d in (di, dsp, dip):
        vac = np.zeros(d, dtype=complex)
        vac[0] = 1.0
        full = np.multiply.outer(full, vac)
    return MultiModeState(full, MODES)


def _check_tails(state: MultiModeState, tail_tol: float) -> None:
    norm2 = state.norm2
    for label, d in zip(state.labels, state.dims):
        if d == 1:
            continue
        fock.warn_if_truncated(fock.partial_trace(state, label) / norm2, tail_tol,
                               what=f"mode {label!r}")


def amplified_state(params: ExperimentParams) -> MultiModeState:
    """Four-mode state after the three squeezers, applied right to left."""
    dims = params.mode_dims()
    if math.prod(dims) > params.max_amplitudes:
        raise MemoryError(f"mode dims {dims} exceed the cap of {params.max_amplitudes} "
                          "amplitudes")
    state = _initial_state(params)
    weak = params.gamma * params.r
    if weak:
        state = fock.two_mode_squeeze(state, ("sp", "i"), weak)
        state = fock.two_mode_squeeze(state, ("s", "ip"), weak)
    state = fock.two_mode_squeeze(state, ("s", "i"), params.r)
    return state


def run_pipeline(params: ExperimentParams) -> PipelineResult:
    state = amplified_state(params)
    _check_tails(state, params.tail_tol)
    clicked, click_weight = fock.apply_annihilation(state, "i")
    if click_weight <= 0:
        raise ValueError("zero heralding probability; r must be > 0")
    rho_success = fock.partial_trace(clicked, "s") / click_weight
    rho_faulty, _ = fock.normalize_dm(fock.partial_trace(state, "s"))
    mixed = fock.mix(rho_success, rho_faulty, params.xi)
    rho_out = fock.loss_channel(mixed, params.eta)
    fock.warn_if_truncated(rho_out, params.tail_tol, what="output signal")
    return PipelineResult(params, rho_out, rho_success, rho_faulty, float(click_weight))


@dataclass(frozen=True)
class SweepRow:
    alpha: float
    r: float
    gamma: float
    xi: float
    eta: float
    delta_nats: float
    nu: float
    click_weight: float

    FIELDS = ("alpha", "r", "gamma", "xi", "eta", "delta_nats", "nu", "click_weight")

    def as_tuple(self) -> tuple:
        return tuple(getattr(self, f) for f in self.FIELDS)


def evaluate(params: ExperimentParams, with_nu: bool = True) -> SweepRow:
    """Run the pipeline and measure its output."""
    return measure_result(run_pipeline(params), with_nu)


def measure_result(result: PipelineResult, with_nu: bool = True) -> SweepRow:
    params = result.params
    rho = result.rho_out
    nu = non_classicality(rho) if with_nu else float("nan")
    return SweepRow(abs(params.alpha), params.r, params.gamma, params.xi, params.eta,
                    non_gaussianity(rho), nu, result.click_weight)


def _evaluate_star(args):
    return evaluate(*args)


def evaluate_many(points, with_nu: bool = True, jobs: int = 1) -> list[SweepRow]:
    """Evaluate parameter points; rows come back in input order."""
    tasks = [(p, with_nu) for p in points]
    if jobs <= 1 or len(tasks) <= 1:
        return [evaluate(*t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_evaluate_star, tasks))


def sweep_alpha(params: ExperimentParams, alphas, with_nu: bool = True,
                jobs: int = 1) -> list[SweepRow]:
    alphas = list(alphas)
    if not alphas:
        raise ValueError("need at least one alpha")
    return evaluate_many([params.replace(alpha=a) for a in alphas], with_nu, jobs)


NOISE_KNOBS = ("gamma", "xi", "eta")


def sweep_noise(knob: str, values, alpha: complex = 0.5, r: float = 0.15,
                with_nu: bool = False, jobs: int = 1, **fixed) -> list[SweepRow]:
    """Vary one imperfection with the others held ideal unless given in ``fixed``."""
    if knob not in NOISE_KNOBS:
        raise ValueError(f"knob must be one of {NOISE_KNOBS}, got {knob!r}")
    base = ExperimentParams(alpha=alpha, r=r, **fixed)
    return evaluate_many([base.replace(**{knob: v}) for v in values], with_nu, jobs)
