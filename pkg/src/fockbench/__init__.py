"""Photon-added coherent states in a truncated Fock space: noise model,
non-Gaussianity, Wigner negativity and homodyne tomography."""

from .experiment import (
    LAB_NOISE_PARAMS,
    ExperimentParams,
    PipelineResult,
    ideal_photon_added_state,
    run_pipeline,
    sweep_alpha,
    sweep_noise,
)
from .fock import (
    MultiModeState,
    apply_annihilation,
    apply_creation,
    coherent_state,
    fidelity,
    fock_dm,
    loss_channel,
    mix,
    partial_trace,
    two_mode_squeeze,
)
from .measures import (
    gaussian_entropy,
    gaussian_summary,
    non_classicality,
    non_gaussianity,
    von_neumann_entropy,
    wigner,
    wigner_eval,
)
from .tomography import (
    QuadratureDataset,
    TomoConfig,
    homodyne_pdf,
    maxlik_reconstruct,
    sample_quadratures,
)

__version__ = "0.1.0"
