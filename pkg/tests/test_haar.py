from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
import pytest

from censemble.ensembles.haar import (
    haar_batch,
    haar_long_time_two_point,
    haar_moment,
    haar_plateau,
    haar_sample,
    haar_twofold_channel,
    haar_two_point,
)
from censemble.ensembles.weingarten import (
    CycleType,
    compose,
    cycle_lengths,
    inverse,
    weingarten,
)
from censemble.errors import UnsupportedOrderError, WeingartenPoleError
from censemble.linalg.tensors import kron, swap


class TestWeingarten:
    """Test the tabulated unitary Weingarten functions."""

    def test_order_two_values(self):
        """Test the n = 2 values at d = 2."""
        assert weingarten((1, 1), 2) == Fraction(1, 3)
        assert weingarten((2,), 2) == Fraction(-1, 6)

    def test_cycle_type_is_sorted(self):
        """Test that cycle types are normalized to descending parts."""
        assert CycleType((1, 2)).parts == (2, 1)
        assert CycleType.of((1, 0, 2)) == CycleType((2, 1))

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_orthogonality(self, n):
        """Test that Σ_τ Wg(στ⁻¹)·d^{#cycles(τ)} = δ_{σ,e} exactly."""
        d = 5
        perms = list(itertools.permutations(range(n)))
        identity = tuple(range(n))
        for sigma in perms:
            total = sum(
                weingarten(CycleType.of(compose(sigma, inverse(tau))), d)
                * Fraction(d) ** len(cycle_lengths(tau))
                for tau in perms
            )
            assert total == (1 if sigma == identity else 0)

    def test_pole(self):
        """Test that the n = 2 function refuses d = 1."""
        with pytest.raises(WeingartenPoleError):
            weingarten((1, 1), 1)

    def test_unsupported_order(self):
        """Test that n > 4 is refused."""
        with pytest.raises(UnsupportedOrderError):
            weingarten((5,), 6)


class TestHaarMoments:
    """Test the Haar moment operators and twofold channel."""

    def test_first_moment_is_swap_over_d(self):
        """Test that E[U⊗U†] = SWAP/d."""
        np.testing.assert_allclose(haar_moment(1, 3).matrix, swap(3) / 3, atol=1e-14)

    @pytest.mark.parametrize("d", [2, 3])
    def test_frame_potentials(self, d):
        """Test that the Haar frame potentials are 1 and 2 for d ≥ 2."""
        assert haar_moment(1, d).frame_potential() == pytest.approx(1.0)
        assert haar_moment(2, d).frame_potential() == pytest.approx(2.0)

    def test_replica_contraction(self):
        """Test that contracting one replica of the 4-moment gives d times the 2-moment."""
        d = 3
        contracted = haar_moment(2, d).contract_replica()
        np.testing.assert_allclose(contracted, d * haar_moment(1, d).matrix, atol=1e-12)

    def test_unsupported_moment_order(self):
        """Test that k = 3 is refused."""
        with pytest.raises(UnsupportedOrderError):
            haar_moment(3, 4)

    def test_channel_fixes_identity_and_swap(self):
        """Test that the twofold channel leaves I and SWAP invariant."""
        d = 3
        np.testing.assert_allclose(haar_twofold_channel(np.eye(d * d)), np.eye(d * d), atol=1e-12)
        np.testing.assert_allclose(haar_twofold_channel(swap(d)), swap(d), atol=1e-12)

    def test_channel_matches_moment(self, rng):
        """Test that the channel closed form agrees with the Weingarten moment."""
        d = 3
        a = rng.standard_normal((d * d, d * d)) + 1j * rng.standard_normal((d * d, d * d))
        np.testing.assert_allclose(
            haar_moment(2, d).left_channel(a), haar_twofold_channel(a), atol=1e-10
        )

    def test_channel_preserves_trace(self, rng):
        """Test that the channel is trace preserving."""
        a = rng.standard_normal((4, 4))
        assert np.trace(haar_twofold_channel(a)) == pytest.approx(np.trace(a))


class TestHaarSampling:
    """Test Haar unitary sampling."""

    def test_samples_are_unitary(self, rng):
        """Test that every sample in a batch is unitary."""
        batch = haar_batch(4, 8, rng)
        for u in batch:
            np.testing.assert_allclose(u.conj().T @ u, np.eye(4), atol=1e-12)

    def test_seeded_sample_is_reproducible(self):
        """Test that an integer seed reproduces the same unitary."""
        np.testing.assert_array_equal(haar_sample(3, 7), haar_sample(3, 7))


class TestHaarCorrelators:
    """Test Haar plateau and two-point closed forms."""

    def test_plateau_invariants(self):
        """Test that (I + SWAP)/(d + 1) is a valid plateau operator."""
        residuals = haar_plateau(4).invariant_residuals()
        assert max(residuals.values()) < 1e-12

    def test_two_point_at_zero_time(self, gue4_es, observables4):
        """Test that the Haar two-point function starts at ⟨WV⟩."""
        w, v = observables4
        expected = np.trace(w.matrix @ v.matrix).real / 4
        assert haar_two_point(w, v, gue4_es, 0.0).real == pytest.approx(expected)

    def test_long_time_limit_traceless(self, observables4):
        """Test that traceless W = V gives ⟨W²⟩/(d + 1) at late times."""
        w = observables4[0].centered()
        expected = np.trace(w.matrix @ w.matrix).real / 4 / 5
        assert haar_long_time_two_point(w, w) == pytest.approx(expected)

    def test_kron_factor_order_in_channel(self, rng):
        """Test that the channel of a product A⊗B matches its swapped counterpart."""
        d = 3
        a = rng.standard_normal((d, d))
        b = rng.standard_normal((d, d))
        s = swap(d)
        np.testing.assert_allclose(
            haar_twofold_channel(kron(a, b)),
            s @ haar_twofold_channel(kron(b, a)) @ s,
            atol=1e-12,
        )
