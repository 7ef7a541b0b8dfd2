from __future__ import annotations

import numpy as np
import pytest

from censemble.errors import InvalidInputError
from censemble.linalg.tensors import HermitianOperator, eigh, kron, swap
from censemble.otoc import (
    ReplicaSign,
    ReplicaSpace,
    Subspace,
    otoc_closed_form,
    otoc_coefficients,
    otoc_direct,
    otoc_series,
    project_subspace,
    replica_contractions,
    replica_hamiltonian,
    replica_subspaces,
    square_commutator,
    subspace_basis,
)
from censemble.spectral import twofold_form_factors

TIMES = [0.0, 0.4, 1.3]


class TestReplicaSpace:
    """Test replica Hamiltonians and SWAP sectors."""

    def test_kronecker_sum_spectrum(self, gue4, gue4_es):
        """Test that H⊗I + I⊗H has eigenvalues E_l + E_m."""
        values = np.linalg.eigvalsh(replica_hamiltonian(gue4).matrix)
        expected = np.sort(np.add.outer(gue4_es.values, gue4_es.values).ravel())
        np.testing.assert_allclose(values, expected, atol=1e-10)

    def test_kronecker_difference_spectrum(self, gue4, gue4_es):
        """Test that H⊗I − I⊗H has eigenvalues E_l − E_m."""
        values = np.linalg.eigvalsh(replica_hamiltonian(gue4, "minus").matrix)
        expected = np.sort(np.subtract.outer(gue4_es.values, gue4_es.values).ravel())
        np.testing.assert_allclose(values, expected, atol=1e-10)

    @pytest.mark.parametrize("which, size", [(Subspace.SYM, 10), (Subspace.ANTISYM, 6)])
    def test_sector_bases(self, which, size):
        """Test that the sector bases are orthonormal SWAP eigenvectors of the right size."""
        b = subspace_basis(4, which)
        sign = 1.0 if which is Subspace.SYM else -1.0
        assert b.shape == (16, size)
        np.testing.assert_allclose(b.conj().T @ b, np.eye(size), atol=1e-14)
        np.testing.assert_allclose(swap(4) @ b, sign * b, atol=1e-14)

    def test_sector_hamiltonians_split_spectrum(self, gue4):
        """Test that the projected sectors together carry the full replica spectrum."""
        sym = ReplicaSpace(4, ReplicaSign.PLUS, Subspace.SYM).hamiltonian(gue4)
        anti = ReplicaSpace(4, ReplicaSign.PLUS, Subspace.ANTISYM).hamiltonian(gue4)
        split = np.sort(np.concatenate([np.linalg.eigvalsh(sym.matrix), np.linalg.eigvalsh(anti.matrix)]))
        full = np.linalg.eigvalsh(replica_hamiltonian(gue4).matrix)
        np.testing.assert_allclose(split, full, atol=1e-10)

    def test_minus_sign_has_no_sectors(self):
        """Test that H⊗I − I⊗H cannot be restricted to a SWAP sector."""
        with pytest.raises(InvalidInputError):
            ReplicaSpace(3, "minus", "sym")

    def test_projection_of_identity(self):
        """Test that projecting I⊗I onto a sector gives the sector identity."""
        np.testing.assert_allclose(project_subspace(np.eye(9), "antisym"), np.eye(3), atol=1e-14)


class TestTwofoldFormFactors:
    """Test the symmetric and antisymmetric form factors."""

    def test_zero_time(self, gue4_es):
        """Test that K±(0) = D±²."""
        plus, minus = twofold_form_factors(gue4_es, 0.0)
        assert plus == pytest.approx(100.0)
        assert minus == pytest.approx(36.0)

    @pytest.mark.parametrize("t", TIMES)
    def test_sum_rule(self, gue4_es, t):
        """Test that K₊ + K₋ = (|Z(it)|⁴ + |Z(2it)|²)/2."""
        plus, minus = twofold_form_factors(gue4_es, t)
        z1 = np.sum(np.exp(1j * t * gue4_es.values))
        z2 = np.sum(np.exp(2j * t * gue4_es.values))
        assert plus + minus == pytest.approx((abs(z1) ** 4 + abs(z2) ** 2) / 2)

    def test_coefficients_at_zero_time(self, gue4_es):
        """Test that only the four-point trace survives at t = 0."""
        coeff = otoc_coefficients(gue4_es, 0.0)
        assert coeff.four_point == pytest.approx(1.0)
        assert coeff.disconnected == pytest.approx(0.0, abs=1e-12)
        assert coeff.plateau_plus == pytest.approx(0.0, abs=1e-12)
        assert coeff.plateau_minus == pytest.approx(0.0, abs=1e-12)


class TestOTOC:
    """Test the out-of-time-ordered correlator."""

    @pytest.mark.parametrize("t", TIMES)
    def test_qubit_direct(self, pauli, t):
        """Test that H = Z, W = V = X gives (1/d)Tr(W(t)VW(t)V) = cos 4t."""
        es = eigh(pauli["Z"])
        assert otoc_direct(pauli["X"], pauli["X"], es, t) == pytest.approx(np.cos(4 * t))

    @pytest.mark.parametrize("t", TIMES)
    def test_qubit_square_commutator(self, pauli, t):
        """Test that the squared commutator is 2 − 2cos 4t."""
        es = eigh(pauli["Z"])
        value = square_commutator(pauli["X"], pauli["X"], es, t)
        assert value == pytest.approx(2 - 2 * np.cos(4 * t))

    def test_closed_form_refuses_qubit(self, pauli):
        """Test that d = 2 is refused by the closed form."""
        es = eigh(pauli["Z"])
        with pytest.raises(InvalidInputError, match="d ≥ 3"):
            otoc_closed_form(pauli["X"], pauli["X"], es, 0.5)

    def test_zero_time_is_four_point_trace(self, gue4_es, observables4):
        """Test that the ensemble OTOC starts at Tr(WVWV)."""
        w, v = observables4
        wv = w.matrix @ v.matrix
        assert otoc_closed_form(w, v, gue4_es, 0.0) == pytest.approx(np.trace(wv @ wv).real)

    def test_normalized_divides_by_d(self, gue4_es, observables4):
        """Test that the normalized form is the trace over d."""
        w, v = observables4
        raw = otoc_closed_form(w, v, gue4_es, 0.8)
        assert otoc_closed_form(w, v, gue4_es, 0.8, normalized=True) == pytest.approx(raw / 4)

    def test_series_reuses_contractions(self, gue4_es, observables4):
        """Test that the series equals pointwise evaluation."""
        w, v = observables4
        expected = [otoc_closed_form(w, v, gue4_es, t) for t in TIMES]
        np.testing.assert_allclose(otoc_series(w, v, gue4_es, TIMES), expected, rtol=1e-10)

    def test_square_commutator_methods_agree_at_zero(self, gue4_es, observables4):
        """Test that direct and ensemble squared commutators coincide at t = 0."""
        w, v = observables4
        direct = square_commutator(w, v, gue4_es, 0.0, method="direct")
        ensemble = square_commutator(w, v, gue4_es, 0.0, method="ensemble")
        assert ensemble == pytest.approx(direct)
        comm = w.matrix @ v.matrix - v.matrix @ w.matrix
        assert direct == pytest.approx(-np.trace(comm @ comm).real / 4)

    def test_sector_dimensions_and_disconnected_trace(self, gue4_es, observables4):
        """Test that the sectors have dimensions D± and the disconnected trace is (Tr WV)²."""
        w, v = observables4
        traces = replica_contractions(w, v, gue4_es)
        sym, anti = replica_subspaces(w, v, gue4_es)
        assert sym.dimension == 10
        assert anti.dimension == 6
        wv = w.matrix @ v.matrix
        assert traces.disconnected == pytest.approx(np.trace(wv).real ** 2)

    def test_sector_operators_are_projections(self, gue4_es, observables4):
        """Test that Ŵ on the symmetric sector is B†(W⊗W)B."""
        w, v = observables4
        sym, _ = replica_subspaces(w, v, gue4_es)
        b = subspace_basis(4, "sym")
        np.testing.assert_allclose(sym.w_hat, b.conj().T @ kron(w.matrix, w.matrix) @ b, atol=1e-12)

    def test_unknown_method(self, gue4_es, observables4):
        """Test that an unknown square-commutator method is refused."""
        w, v = observables4
        with pytest.raises(InvalidInputError):
            square_commutator(w, v, gue4_es, 0.0, method="sampled")

    def test_identity_observable(self, gue4_es):
        """Test that W = V = I gives Tr(I) = d at every time."""
        eye = HermitianOperator(np.eye(4))
        for t in TIMES:
            assert otoc_closed_form(eye, eye, gue4_es, t) == pytest.approx(4.0)
