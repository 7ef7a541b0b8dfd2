from __future__ import annotations

from enum import Enum
from typing import Any, Callable, Literal

import numpy as np
import structlog
from pydantic import BaseModel, Field, model_validator

from censemble.config import DEFAULT_SETTINGS, Settings
from censemble.linalg.tensors import HermitianOperator, check_cap

from .builders import (
    bose_hubbard,
    diagonal_plus_perturbation,
    equally_spaced,
    gue_sample,
    klocal_qubit,
)
from .spectra import SpacingDistribution, synthetic_spectrum

log = structlog.get_logger()


class ModelKind(str, Enum):
    BOSE_HUBBARD = "bose-hubbard"
    GUE = "gue"
    EQUALLY_SPACED = "equally-spaced"
    KLOCAL_QUBIT = "klocal-qubit"
    DIAGONAL_PLUS_PERTURBATION = "diagonal-plus-perturbation"
    SYNTHETIC = "synthetic"


class GUEParams(BaseModel):
    d: int = Field(ge=2)


class EquallySpacedParams(BaseModel):
    d: int = Field(ge=2)
    spacing: float = Field(default=1.0, gt=0)


class BoseHubbardParams(BaseModel):
    L: int = Field(ge=2, description="Number of sites.")
    N: int = Field(ge=1, description="Number of bosons.")
    J: float = 1.0
    U: float = 1.0
    theta: float = Field(default=0.0, ge=0, le=np.pi / 2)
    parity: Literal["none", "even", "odd"] = "none"
    boundary: Literal["open", "periodic"] = "open"


class KLocalQubitParams(BaseModel):
    n_qubits: int = Field(ge=1)
    k: int = Field(ge=1)
    coupling_scale: float = Field(default=1.0, gt=0)
    time_reversal_breaking: bool = True

    @model_validator(mode="after")
    def _check_locality(self) -> KLocalQubitParams:
        if self.k > self.n_qubits:
            raise ValueError(f"locality k={self.k} exceeds qubit count {self.n_qubits}")
        return self


class DiagonalPlusPerturbationParams(BaseModel):
    energies: list[float] = Field(min_length=1)
    strength: float = Field(default=1.0, ge=0)


class SyntheticParams(BaseModel):
    d: int = Field(ge=2)
    distribution: SpacingDistribution = SpacingDistribution.POISSON
    sigma2: float | None = Field(default=None, gt=0)


def _build_gue(p: GUEParams, seed: int) -> HermitianOperator:
    return gue_sample(p.d, seed)


def _build_equally_spaced(p: EquallySpacedParams, seed: int) -> HermitianOperator:
    return equally_spaced(p.d, p.spacing)


def _build_bose_hubbard(p: BoseHubbardParams, seed: int) -> HermitianOperator:
    return bose_hubbard(p.L, p.N, p.J, p.U, p.theta, p.parity, boundary=p.boundary)


def _build_klocal(p: KLocalQubitParams, seed: int) -> HermitianOperator:
    return klocal_qubit(
        p.n_qubits,
        p.k,
        p.coupling_scale,
        seed,
        time_reversal_breaking=p.time_reversal_breaking,
    )


def _build_perturbed(p: DiagonalPlusPerturbationParams, seed: int) -> HermitianOperator:
    return diagonal_plus_perturbation(p.energies, p.strength, seed)


def _build_synthetic(p: SyntheticParams, seed: int) -> HermitianOperator:
    return synthetic_spectrum(p.distribution, p.d, seed, sigma2=p.sigma2)


class ModelSpec(BaseModel):
    """Serializable model description: kind, kind-specific parameters and seed."""

    version: Literal[1] = 1
    kind: ModelKind
    parameters: dict[str, Any] = Field(default_factory=dict)
    seed: int = Field(default=0, ge=0, lt=2**64)

    @model_validator(mode="after")
    def _validate_parameters(self) -> ModelSpec:
        params_cls, _ = ModelFactory.MODEL_MAPPING[self.kind]
        self.parameters = params_cls.model_validate(self.parameters).model_dump(mode="json")
        return self


class ModelFactory:
    """Registers and instantiates Hamiltonian builders per model kind."""

    MODEL_MAPPING: dict[ModelKind, tuple[type[BaseModel], Callable[[Any, int], HermitianOperator]]] = {
        ModelKind.GUE: (GUEParams, _build_gue),
        ModelKind.EQUALLY_SPACED: (EquallySpacedParams, _build_equally_spaced),
        ModelKind.BOSE_HUBBARD: (BoseHubbardParams, _build_bose_hubbard),
        ModelKind.KLOCAL_QUBIT: (KLocalQubitParams, _build_klocal),
        ModelKind.DIAGONAL_PLUS_PERTURBATION: (DiagonalPlusPerturbationParams, _build_perturbed),
        ModelKind.SYNTHETIC: (SyntheticParams, _build_synthetic),
    }

    def __init__(self, settings: Settings = DEFAULT_SETTINGS) -> None:
        self.settings = settings

    def build(self, spec: ModelSpec) -> HermitianOperator:
        params_cls, builder = self.MODEL_MAPPING[spec.kind]
        params = params_cls.model_validate(spec.parameters)
        h = builder(params, spec.seed)
        check_cap(h.dim, self.settings.caps.max_dim)
        log.info("model.built", kind=spec.kind.value, dim=h.dim, seed=spec.seed)
        return h
