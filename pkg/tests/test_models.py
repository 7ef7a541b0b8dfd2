from __future__ import annotations

import numpy as np
import pytest
from pydantic import ValidationError

from censemble.errors import DimensionCapError, InvalidInputError, SymmetryError
from censemble.linalg.tensors import eigh
from censemble.models.builders import (
    PAULI,
    bose_hubbard,
    diagonal_plus_perturbation,
    equally_spaced,
    fock_basis,
    gue_sample,
    klocal_qubit,
    pauli_string,
)
from censemble.models.factory import ModelFactory, ModelKind, ModelSpec
from censemble.models.spectra import (
    WIGNER_DYSON_VARIANCE,
    SpacingDistribution,
    sample_spacings,
    spacing_variance,
    synthetic_spectrum,
)


class TestBuilders:
    """Test the Hamiltonian builders."""

    def test_gue_is_seeded(self):
        """Test that the same seed reproduces the same GUE matrix."""
        np.testing.assert_array_equal(gue_sample(5, 3).matrix, gue_sample(5, 3).matrix)
        assert not np.array_equal(gue_sample(5, 3).matrix, gue_sample(5, 4).matrix)

    def test_gue_needs_two_levels(self):
        """Test that d < 2 is refused."""
        with pytest.raises(InvalidInputError):
            gue_sample(1, 0)

    def test_equally_spaced_levels(self):
        """Test that the levels are 0, ΔE, 2ΔE, ..."""
        es = eigh(equally_spaced(4, 0.5))
        np.testing.assert_allclose(es.values, [0.0, 0.5, 1.0, 1.5])

    def test_zero_perturbation_is_diagonal(self):
        """Test that strength 0 returns diag(E0) exactly."""
        h = diagonal_plus_perturbation([0.0, 1.0, 3.0], 0.0, seed=1)
        np.testing.assert_array_equal(h.matrix, np.diag([0.0, 1.0, 3.0]))

    def test_pauli_string_ordering(self):
        """Test that the first label acts on the slowest index."""
        np.testing.assert_array_equal(pauli_string("ZX"), np.kron(PAULI["Z"], PAULI["X"]))

    def test_klocal_is_traceless(self):
        """Test that a sum of non-identity Pauli strings is traceless."""
        h = klocal_qubit(3, 2, 1.0, seed=5)
        assert h.dim == 8
        assert abs(np.trace(h.matrix)) < 1e-12

    def test_klocal_real_only(self):
        """Test that dropping odd-Y strings yields a real symmetric matrix."""
        h = klocal_qubit(3, 2, 1.0, seed=5, time_reversal_breaking=False)
        assert np.max(np.abs(h.matrix.imag)) < 1e-12

    def test_klocal_locality_check(self):
        """Test that k > Nq is refused."""
        with pytest.raises(InvalidInputError):
            klocal_qubit(2, 3, 1.0, seed=0)

    def test_fock_basis_order(self):
        """Test that occupation vectors are listed lexicographically."""
        assert fock_basis(3, 2) == [
            (0, 0, 2),
            (0, 1, 1),
            (0, 2, 0),
            (1, 0, 1),
            (1, 1, 0),
            (2, 0, 0),
        ]


class TestBoseHubbard:
    """Test the Bose–Hubbard chain and its parity sectors."""

    def test_fock_dimension(self):
        """Test that the Hilbert space has C(N+L−1, N) states."""
        h = bose_hubbard(3, 2, 1.0, 1.0, 0.0)
        assert h.dim == 6

    @pytest.mark.parametrize("theta", [0.0, 0.3, np.pi / 2])
    def test_parity_sectors_split_spectrum(self, theta):
        """Test that the even and odd sectors together reproduce the full spectrum."""
        full = eigh(bose_hubbard(3, 2, 1.0, 0.7, theta)).values
        even = eigh(bose_hubbard(3, 2, 1.0, 0.7, theta, "even")).values
        odd = eigh(bose_hubbard(3, 2, 1.0, 0.7, theta, "odd")).values
        assert even.size == 4
        assert odd.size == 2
        np.testing.assert_allclose(np.sort(np.concatenate([even, odd])), full, atol=1e-10)

    def test_ring_with_flux_breaks_parity(self):
        """Test that a ring with θ ≠ 0 refuses a parity sector."""
        with pytest.raises(SymmetryError):
            bose_hubbard(3, 2, 1.0, 1.0, 0.3, "even", boundary="periodic")

    def test_ring_without_flux_has_parity(self):
        """Test that the bare reflection is a symmetry of the ring at θ = 0."""
        h = bose_hubbard(3, 2, 1.0, 1.0, 0.0, "odd", boundary="periodic")
        assert h.dim == 2

    def test_theta_range(self):
        """Test that θ outside [0, π/2] is refused."""
        with pytest.raises(InvalidInputError):
            bose_hubbard(3, 2, 1.0, 1.0, 2.0)

    def test_cap(self):
        """Test that the Fock dimension is checked against the cap."""
        with pytest.raises(DimensionCapError):
            bose_hubbard(4, 4, 1.0, 1.0, 0.0, max_dim=10)


class TestSpacings:
    """Test spacing samplers and synthetic spectra."""

    @pytest.mark.parametrize(
        "distribution",
        [SpacingDistribution.POISSON, SpacingDistribution.WIGNER_DYSON],
    )
    def test_unit_mean_and_variance(self, distribution, rng):
        """Test that sampled spacings have unit mean and the tabulated variance."""
        s = sample_spacings(distribution, 200_000, rng)
        assert s.mean() == pytest.approx(1.0, abs=0.01)
        assert s.var() == pytest.approx(spacing_variance(distribution), abs=0.02)

    def test_custom_gamma_variance(self, rng):
        """Test that custom spacings follow the requested variance."""
        s = sample_spacings("custom", 200_000, rng, sigma2=0.25)
        assert s.mean() == pytest.approx(1.0, abs=0.01)
        assert s.var() == pytest.approx(0.25, abs=0.01)

    def test_custom_needs_variance(self):
        """Test that a custom law without σ² is refused."""
        with pytest.raises(InvalidInputError):
            spacing_variance("custom")

    def test_wigner_dyson_variance_constant(self):
        """Test the surmise variance 3π/8 − 1."""
        assert WIGNER_DYSON_VARIANCE == pytest.approx(0.178097, abs=1e-6)

    def test_synthetic_spectrum_starts_at_zero(self):
        """Test that synthetic levels are cumulative sums starting at zero."""
        h = synthetic_spectrum("poisson", 6, seed=2)
        levels = np.diag(h.matrix).real
        assert levels[0] == 0.0
        assert np.all(np.diff(levels) > 0)


class TestModelFactory:
    """Test ModelSpec validation and the factory."""

    def test_build_equally_spaced(self):
        """Test that the factory builds the requested dimension."""
        spec = ModelSpec(kind=ModelKind.EQUALLY_SPACED, parameters={"d": 5})
        h = ModelFactory().build(spec)
        assert h.dim == 5

    def test_parameters_are_validated(self):
        """Test that invalid kind-specific parameters fail validation."""
        with pytest.raises(ValidationError):
            ModelSpec(kind="gue", parameters={"d": 1})

    def test_defaults_are_filled_in(self):
        """Test that validated parameters carry their defaults for the record."""
        spec = ModelSpec(kind="bose-hubbard", parameters={"L": 3, "N": 2})
        assert spec.parameters["parity"] == "none"
        assert spec.parameters["boundary"] == "open"

    def test_spec_round_trips_through_json(self):
        """Test that a dumped spec validates back to the same model."""
        spec = ModelSpec(kind="synthetic", parameters={"d": 4, "distribution": "wigner_dyson"}, seed=9)
        again = ModelSpec.model_validate_json(spec.model_dump_json())
        assert again == spec
        np.testing.assert_array_equal(
            ModelFactory().build(spec).matrix, ModelFactory().build(again).matrix
        )
