"""Fidelity decay of kicked tops and random unitary ensembles.

Simulates the sensitivity of quantum maps to collective qubit rotations:
two-track echo evolution, symmetry-sector reduction of the kicked top,
interpolating random ensembles, local density of states, and decay-law
classification, plus a deterministic experiment runner.
"""

from .echo import FidelityCurve, averaged_fidelity, fidelity_curve, haar_state
from .ensembles import (
    SpacingHistogram,
    block_diagonal,
    collective_x_basis,
    eigenangle_spacings,
    index_complement_operator,
    pairing_transform,
    sample_cue,
    sample_interpolating,
    spacing_distribution,
)
from .matops import (
    EigenSystem,
    eig_hermitian,
    eig_unitary,
    expm_i_hermitian,
    hermiticity_defect,
    unitarity_defect,
)
from .perturb import (
    PerturbationHamiltonian,
    collective_hamiltonian,
    conjugate,
    perturbation_unitary,
    rmt_rate,
)
from .runner import ExperimentConfig, RunManifest, parse_config, run_experiment
from .spectra import (
    DecayFit,
    LdosFit,
    LdosHistogram,
    average_histograms,
    classify_decay,
    fit_exponential_decay,
    fit_ldos,
    ldos,
)
from .spin import (
    SectorTransform,
    coherent_state,
    kicked_top_floquet,
    parity_operators,
    restrict_to_sector,
    sector_basis,
    sector_dimension,
    spin_operators,
)

__version__ = "0.1.0"

__all__ = [
    "EigenSystem",
    "ExperimentConfig",
    "DecayFit",
    "FidelityCurve",
    "LdosFit",
    "LdosHistogram",
    "PerturbationHamiltonian",
    "RunManifest",
    "SectorTransform",
    "SpacingHistogram",
    "average_histograms",
    "averaged_fidelity",
    "block_diagonal",
    "classify_decay",
    "coherent_state",
    "collective_hamiltonian",
    "collective_x_basis",
    "conjugate",
    "eig_hermitian",
    "eig_unitary",
    "eigenangle_spacings",
    "expm_i_hermitian",
    "fidelity_curve",
    "fit_exponential_decay",
    "fit_ldos",
    "haar_state",
    "hermiticity_defect",
    "index_complement_operator",
    "kicked_top_floquet",
    "ldos",
    "pairing_transform",
    "parity_operators",
    "parse_config",
    "perturbation_unitary",
    "restrict_to_sector",
    "rmt_rate",
    "run_experiment",
    "sample_cue",
    "sample_interpolating",
    "sector_basis",
    "sector_dimension",
    "spacing_distribution",
    "spin_operators",
    "unitarity_defect",
]
