"""Hamiltonian families used as inputs and test beds."""
from __future__ import annotations

import itertools
import math
from functools import reduce
from typing import Iterator, Literal, Sequence

import numpy as np
import numpy.typing as npt
import structlog

from censemble.config import DEFAULT_SETTINGS
from censemble.errors import InvalidInputError, SymmetryError
from censemble.linalg.tensors import ComplexMatrix, HermitianOperator, check_cap, max_norm

log = structlog.get_logger()

Parity = Literal["none", "even", "odd"]
Boundary = Literal["open", "periodic"]

PAULI = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}

SYMMETRY_TOL = 1e-10


def gue_sample(d: int, seed: int) -> HermitianOperator:
    """GUE matrix with ⟨|H_lm|²⟩ = 1/d, so the spectrum fills [−2, 2]."""
    if d < 2:
        raise InvalidInputError(f"GUE needs d ≥ 2, got {d}")
    check_cap(d, DEFAULT_SETTINGS.caps.max_dim)
    rng = np.random.default_rng(seed)
    a = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    return HermitianOperator((a + a.conj().T) / np.sqrt(2 * d))


def equally_spaced(d: int, spacing: float = 1.0) -> HermitianOperator:
    if d < 2 or spacing <= 0:
        raise InvalidInputError(f"equally spaced levels need d ≥ 2 and ΔE > 0, got {d}, {spacing}")
    return HermitianOperator(np.diag(np.arange(d, dtype=np.float64) * spacing))


def diagonal_plus_perturbation(
    energies: Sequence[float],
    strength: float,
    seed: int,
) -> HermitianOperator:
    """diag(E0) plus a Hermitian Gaussian perturbation of the given strength."""
    e0 = np.asarray(energies, dtype=np.float64)
    if strength < 0:
        raise InvalidInputError(f"strength must be non-negative, got {strength}")
    if e0.ndim != 1 or e0.size == 0:
        raise InvalidInputError("E0 must be a non-empty one-dimensional array")
    h = np.diag(e0).astype(np.complex128)
    if strength > 0:
        if e0.size < 2:
            raise InvalidInputError("a perturbation needs at least two levels")
        h = h + strength * gue_sample(e0.size, seed).matrix
    return HermitianOperator(h)


def pauli_string(labels: str) -> ComplexMatrix:
    """Tensor product of Pauli factors, first label on the slowest qubit."""
    return reduce(np.kron, (PAULI[c] for c in labels))


def _pauli_labels(n_qubits: int, k: int, real_only: bool) -> Iterator[str]:
    for weight in range(1, k + 1):
        for sites in itertools.combinations(range(n_qubits), weight):
            for paulis in itertools.product("XYZ", repeat=weight):
                if real_only and paulis.count("Y") % 2:
                    continue
                labels = ["I"] * n_qubits
                for site, pauli in zip(sites, paulis):
                    labels[site] = pauli
                yield "".join(labels)


def klocal_qubit(
    n_qubits: int,
    k: int,
    coupling_scale: float,
    seed: int,
    *,
    time_reversal_breaking: bool = True,
) -> HermitianOperator:
    """Σ J_P P over all Pauli strings of weight 1..k with Gaussian J_P.

    With ``time_reversal_breaking=False`` only strings with an even number of
    Y factors enter, so H is real symmetric.
    """
    if not 1 <= k <= n_qubits:
        raise InvalidInputError(f"need 1 ≤ k ≤ Nq, got k={k}, Nq={n_qubits}")
    check_cap(2**n_qubits, DEFAULT_SETTINGS.caps.max_dim)
    rng = np.random.default_rng(seed)
    labels = list(_pauli_labels(n_qubits, k, real_only=not time_reversal_breaking))
    couplings = coupling_scale * rng.standard_normal(len(labels))
    h = np.zeros((2**n_qubits, 2**n_qubits), dtype=np.complex128)
    for label, coupling in zip(labels, couplings):
        h += coupling * pauli_string(label)
    log.debug("model.klocal_terms", n_qubits=n_qubits, k=k, terms=len(labels))
    return HermitianOperator(h)


def fock_basis(sites: int, bosons: int) -> list[tuple[int, ...]]:
    """Occupation vectors with ``bosons`` particles, in lexicographic order."""

    def compositions(n: int, slots: int) -> Iterator[tuple[int, ...]]:
        if slots == 1:
            yield (n,)
            return
        for first in range(n + 1):
            for rest in compositions(n - first, slots - 1):
                yield (first, *rest)

    return list(compositions(bosons, sites))


def _bonds(sites: int, boundary: Boundary) -> list[tuple[int, int]]:
    bonds = [(l, l + 1) for l in range(sites - 1)]
    if boundary == "periodic" and sites > 2:
        bonds.append((sites - 1, 0))
    return bonds


def _sector_basis(
    basis: list[tuple[int, ...]],
    index: dict[tuple[int, ...], int],
    gauge: npt.NDArray[np.complex128],
    sign: int,
) -> ComplexMatrix:
    """Orthonormal basis of the ±1 eigenspace of G·R·G†."""
    columns = []
    seen: set[int] = set()
    for i, state in enumerate(basis):
        if i in seen:
            continue
        j = index[tuple(reversed(state))]
        seen.update((i, j))
        vector = np.zeros(len(basis), dtype=np.complex128)
        if i == j:
            if sign < 0:
                continue
            vector[i] = 1.0
        else:
            vector[i] = 1 / np.sqrt(2)
            vector[j] = sign / np.sqrt(2)
        columns.append(gauge * vector)
    return np.stack(columns, axis=1)


def bose_hubbard(
    sites: int,
    bosons: int,
    hopping: float,
    interaction: float,
    theta: float,
    parity: Parity = "none",
    *,
    boundary: Boundary = "open",
    max_dim: int = DEFAULT_SETTINGS.caps.max_dim,
) -> HermitianOperator:
    """Bose–Hubbard chain with complex hopping −(J/2)Σ(e^{iθ}a†_{l+1}a_l + h.c.) + (U/2)Σn(n−1).

    On the open chain the reflection is dressed by the gauge transformation
    exp(iθΣ l·n_l), which makes it a symmetry for every θ. On a ring the bare
    reflection is used and must commute with H.
    """
    if sites < 2 or bosons < 1:
        raise InvalidInputError(f"need L ≥ 2 and N ≥ 1, got L={sites}, N={bosons}")
    if not 0 <= theta <= np.pi / 2:
        raise InvalidInputError(f"θ must lie in [0, π/2], got {theta}")
    dim = math.comb(bosons + sites - 1, bosons)
    check_cap(dim, max_dim, what="Fock dimension")

    basis = fock_basis(sites, bosons)
    index = {state: i for i, state in enumerate(basis)}
    hop = np.zeros((dim, dim), dtype=np.complex128)
    phase = np.exp(1j * theta)
    for col, state in enumerate(basis):
        for src, dst in _bonds(sites, boundary):
            if state[src] == 0:
                continue
            target = list(state)
            target[src] -= 1
            target[dst] += 1
            amplitude = np.sqrt(state[src] * (state[dst] + 1))
            hop[index[tuple(target)], col] += -(hopping / 2) * phase * amplitude
    occupations = np.asarray(basis, dtype=np.float64)
    onsite = (interaction / 2) * np.sum(occupations * (occupations - 1), axis=1)
    h = hop + hop.conj().T + np.diag(onsite)

    if parity == "none":
        return HermitianOperator(h)

    if boundary == "open":
        gauge = np.exp(1j * theta * occupations @ np.arange(sites))
    else:
        gauge = np.ones(dim, dtype=np.complex128)
    reflection = np.zeros((dim, dim), dtype=np.complex128)
    for col, state in enumerate(basis):
        reflection[index[tuple(reversed(state))], col] = 1.0
    p = (gauge[:, None] * reflection) * gauge.conj()[None, :]
    commutator = max_norm(p @ h - h @ p)
    if commutator > SYMMETRY_TOL:
        log.warning("model.parity_broken", boundary=boundary, theta=theta, commutator=commutator)
        raise SymmetryError(
            f"reflection parity is not conserved (‖[P,H]‖ = {commutator:.2e}); "
            "on a ring it requires θ = 0"
        )

    b = _sector_basis(basis, index, gauge, +1 if parity == "even" else -1)
    log.debug("model.parity_sector", parity=parity, dim=b.shape[1], full_dim=dim)
    return HermitianOperator.symmetrized(b.conj().T @ h @ b)
