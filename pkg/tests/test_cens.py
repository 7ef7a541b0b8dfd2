from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from censemble.ensembles.cens import (
    build_diagonalizer,
    c_moment,
    enumerate_orbit,
    frame_potential2,
    frame_potential_exact,
    ipr_bar,
    orbit_residual,
    plateau_exact,
    plateau_split,
    sample_batch,
    sample_C,
    u1sd_moment,
)
from censemble.ensembles.haar import haar_plateau
from censemble.errors import DegenerateSpectrumError, DimensionCapError
from censemble.linalg.tensors import EigenSystem, HermitianOperator, eigh, swap
from censemble.models.builders import equally_spaced, gue_sample
from censemble.validation.oracles import (
    enumerated_plateau,
    moment_residual,
    one_design_residual,
)


@pytest.fixture
def dz3():
    """Diagonalizer of a seeded 3×3 GUE Hamiltonian."""
    return build_diagonalizer(eigh(gue_sample(3, seed=5)))


class TestDiagonalizer:
    """Test the seed diagonalizer and orbit sampling."""

    def test_diagonalizes_h(self, gue4, gue4_es):
        """Test that C₀HC₀† is diag(E)."""
        dz = build_diagonalizer(gue4_es, gue4)
        rotated = dz.C @ gue4.matrix @ dz.C.conj().T
        np.testing.assert_allclose(rotated, np.diag(gue4_es.values), atol=1e-10)

    def test_refuses_degenerate_spectrum(self):
        """Test that a degenerate spectrum has no C-ensemble."""
        es = EigenSystem.from_values([0.0, 0.0, 1.0])
        with pytest.raises(DegenerateSpectrumError):
            build_diagonalizer(es)

    def test_samples_stay_on_the_orbit(self, gue4_es):
        """Test that sampled C are unitary and diagonalize H."""
        dz = build_diagonalizer(gue4_es)
        sample = sample_C(dz, 3)
        assert orbit_residual(dz, sample.C) < 1e-10
        assert sorted(sample.permutation.tolist()) == [0, 1, 2, 3]

    def test_batch_is_seeded(self, dz3):
        """Test that a batch is reproducible from its generator seed."""
        first = sample_batch(dz3, 5, np.random.default_rng(8))
        second = sample_batch(dz3, 5, np.random.default_rng(8))
        np.testing.assert_array_equal(first, second)
        assert first.shape == (5, 3, 3)

    def test_enumeration_visits_every_permutation(self, dz3):
        """Test that the orbit enumeration yields d! distinct representatives."""
        reps = list(enumerate_orbit(dz3))
        assert len(reps) == 6
        assert len({rep.permutation for rep in reps}) == 6

    def test_enumeration_cap(self, dz3):
        """Test that enumeration refuses dimensions above the cap."""
        with pytest.raises(DimensionCapError):
            list(enumerate_orbit(dz3, max_d=2))


class TestMoments:
    """Test the C-ensemble moment operators against orbit enumeration."""

    def test_one_design(self, dz3):
        """Test that the C-ensemble is a unitary 1-design."""
        assert one_design_residual(dz3) < 1e-12

    @pytest.mark.parametrize("k", [1, 2])
    def test_closed_form_matches_enumeration(self, dz3, k):
        """Test that the closed-form moment equals the enumerated one."""
        assert moment_residual(dz3, k) < 1e-10

    def test_phased_permutation_frame_potential(self):
        """Test that the U(1)^d×S_d 4-moment has frame potential 3."""
        assert u1sd_moment(2, 4).frame_potential() == pytest.approx(3.0)

    def test_c_moment_frame_potential_is_unitarily_invariant(self, dz3):
        """Test that dressing by C₀ keeps the frame potential at 3."""
        assert c_moment(dz3, 2).frame_potential() == pytest.approx(3.0)


class TestFramePotential:
    """Test IPR̄ and frame-potential closed forms."""

    @pytest.mark.parametrize("d", [2, 3, 5, 8])
    def test_enumeration_value_is_three(self, d):
        """Test that E|Tr U†V|⁴ over one C-ensemble is exactly 3 for d ≥ 2."""
        assert frame_potential_exact(d) == Fraction(3)
        assert frame_potential_exact(d, k=1) == Fraction(1)

    def test_single_level(self):
        """Test that d = 1 gives |e^{iφ}|⁴ = 1."""
        assert frame_potential_exact(1) == Fraction(1)

    def test_diagonal_hamiltonian(self):
        """Test that a diagonal H has IPR̄ = 1 and closed-form F₂ = 3."""
        dz = build_diagonalizer(eigh(equally_spaced(5)))
        assert ipr_bar(dz) == pytest.approx(1.0)
        assert frame_potential2(dz) == pytest.approx(3.0)

    def test_maximally_delocalized_eigenbasis(self, pauli):
        """Test that H = X has IPR̄ = 1/d."""
        dz = build_diagonalizer(eigh(pauli["X"]))
        assert ipr_bar(dz) == pytest.approx(0.5)

    def test_closed_form_bounded_below_by_two(self, dz3):
        """Test that F₂ ≥ 2 with equality only at the critical IPR̄."""
        assert frame_potential2(dz3) >= 2.0


class TestPlateau:
    """Test the exact plateau operator."""

    def test_invariants(self, gue4_es):
        """Test hermiticity, trace, SWAP invariance, marginals and positivity."""
        residuals = plateau_exact(gue4_es).invariant_residuals()
        assert max(residuals.values()) < 1e-10

    def test_trace_is_dimension(self, gue4_es):
        """Test that Tr G = d."""
        assert np.trace(plateau_exact(gue4_es).matrix).real == pytest.approx(4.0)

    def test_matches_orbit_average(self, dz3):
        """Test that the enumerated orbit average reproduces Σ_l |E_l E_l⟩⟨E_l E_l|."""
        exact = plateau_exact(dz3.eigensystem).matrix
        np.testing.assert_allclose(enumerated_plateau(dz3).matrix, exact, atol=1e-12)

    def test_swap_absorbed(self, gue4_es):
        """Test that SWAP·G = G."""
        g = plateau_exact(gue4_es).matrix
        np.testing.assert_allclose(swap(4) @ g, g, atol=1e-12)

    def test_split_into_haar_and_deviation(self, gue4_es):
        """Test that the Haar part plus the deviation reproduces G."""
        g = plateau_exact(gue4_es)
        haar_part, deviation = plateau_split(g)
        np.testing.assert_allclose(haar_part, haar_plateau(4).matrix)
        np.testing.assert_allclose(haar_part + deviation, g.matrix, atol=1e-14)
        assert abs(np.trace(deviation)) < 1e-10

    def test_contract_equals_trace(self, gue4_es, observables4):
        """Test that contract(W, V) = Tr(G·W⊗V)."""
        w, v = observables4
        g = plateau_exact(gue4_es)
        direct = np.trace(g.matrix @ np.kron(w.matrix, v.matrix))
        assert g.contract(w.matrix, v.matrix) == pytest.approx(direct)

    def test_diagonal_hamiltonian_gives_s_tensor(self):
        """Test that a diagonal H has G = Σ_l |ll⟩⟨ll|."""
        es = eigh(HermitianOperator(np.diag([0.0, 1.0, 3.0])))
        g = plateau_exact(es).matrix
        expected = np.zeros((9, 9))
        for l in range(3):  # noqa: E741
            expected[4 * l, 4 * l] = 1.0
        np.testing.assert_allclose(g, expected, atol=1e-14)
