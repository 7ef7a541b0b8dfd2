from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest
import structlog


PROJECT_ROOT = Path(__file__).resolve().parents[1]
SRC_PATH = PROJECT_ROOT / "src"

if str(SRC_PATH) not in sys.path:
    sys.path.insert(0, str(SRC_PATH))

from censemble.linalg.tensors import HermitianOperator, eigh  # noqa: E402
from censemble.models.builders import PAULI, gue_sample  # noqa: E402


@pytest.fixture
def pauli():
    """Single-qubit Pauli operators keyed by label."""
    return {label: HermitianOperator(matrix) for label, matrix in PAULI.items()}


@pytest.fixture
def gue4():
    """Seeded 4×4 GUE Hamiltonian."""
    return gue_sample(4, seed=11)


@pytest.fixture
def gue4_es(gue4):
    """Eigensystem of the seeded 4×4 GUE Hamiltonian."""
    return eigh(gue4)


@pytest.fixture
def observables4():
    """Two independent random Hermitian observables on d = 4."""
    return gue_sample(4, seed=101), gue_sample(4, seed=202)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(autouse=True)
def _single_thread_default(monkeypatch):
    """Keep worker-count resolution independent of the host environment."""
    monkeypatch.delenv("CENSEMBLE_THREADS", raising=False)


@pytest.fixture(autouse=True)
def _reset_structlog():
    """CLI invocations bind structlog to the runner's temporary stderr."""
    yield
    structlog.reset_defaults()
