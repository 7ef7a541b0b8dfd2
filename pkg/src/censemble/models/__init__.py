from .builders import (
    PAULI,
    bose_hubbard,
    diagonal_plus_perturbation,
    equally_spaced,
    fock_basis,
    gue_sample,
    klocal_qubit,
    pauli_string,
)
from .factory import ModelFactory, ModelKind, ModelSpec
from .spectra import (
    WIGNER_DYSON_VARIANCE,
    SpacingDistribution,
    sample_spacings,
    spacing_variance,
    synthetic_spectrum,
)

__all__ = [
    "PAULI",
    "ModelFactory",
    "ModelKind",
    "ModelSpec",
    "SpacingDistribution",
    "WIGNER_DYSON_VARIANCE",
    "bose_hubbard",
    "diagonal_plus_perturbation",
    "equally_spaced",
    "fock_basis",
    "gue_sample",
    "klocal_qubit",
    "pauli_string",
    "sample_spacings",
    "spacing_variance",
    "synthetic_spectrum",
]
