from __future__ import annotations

import numpy as np
import pytest

from censemble.correlators import diagonal_ensemble
from censemble.ensembles.cens import build_diagonalizer, plateau_exact
from censemble.errors import InvalidInputError, UnsupportedOrderError
from censemble.linalg.tensors import eigh
from censemble.models.builders import gue_sample
from censemble.validation.oracles import (
    OracleReport,
    c_moment_mc,
    frame_potential_pairs,
    frame_potential_report,
    haar_moment_mc,
    otoc_mc,
    time_averaged_two_point_mc,
    two_point_mc,
    z_scores,
)


@pytest.fixture
def dz3():
    return build_diagonalizer(eigh(gue_sample(3, seed=5)))


class TestZScores:
    """Test entry-wise z-scores."""

    def test_regular_entries(self):
        z = z_scores([1.0, 2.0], [0.5, 0.1], [0.0, 2.05])
        np.testing.assert_allclose(z, [2.0, 0.5])

    def test_entries_without_spread(self):
        """Test that exact entries score 0 and inexact ones score ∞."""
        z = z_scores([1.0, 1.0], [0.0, 0.0], [1.0, 2.0])
        assert z[0] == 0.0
        assert np.isinf(z[1])


class TestMomentOracles:
    """Test sampled moments against their closed forms."""

    def test_haar_first_moment(self):
        report = haar_moment_mc(1, 3, 3000, seed=3, chunk_size=500, threads=2)
        assert isinstance(report, OracleReport)
        assert report.samples == 3000
        assert len(report.z_scores) == 81
        assert report.passed

    def test_c_first_moment(self, dz3):
        report = c_moment_mc(dz3, 1, 3000, seed=4, chunk_size=500, threads=2)
        assert report.passed
        assert report.meta == {"k": 1, "d": 3}

    @pytest.mark.slow
    @pytest.mark.parametrize(("d", "chunk_size"), [(2, 2000), (4, 50)])
    def test_haar_second_moment(self, d, chunk_size):
        """Test the Haar 4-moment entrywise; d = 4 gives 65536 entries per sample."""
        report = haar_moment_mc(2, d, 20_000, seed=5, chunk_size=chunk_size, threads=2)
        assert len(report.z_scores) == d**8
        assert report.passed

    @pytest.mark.slow
    def test_c_second_moment(self, dz3):
        report = c_moment_mc(dz3, 2, 20_000, seed=6, chunk_size=2000, threads=2)
        assert report.passed

    def test_order_three_refused(self, dz3):
        with pytest.raises(UnsupportedOrderError):
            c_moment_mc(dz3, 3, 10, seed=0)


class TestCorrelatorOracles:
    """Test sampled correlators against the ensemble closed forms."""

    def test_two_point(self, gue4_es, observables4):
        w, v = observables4
        series, report = two_point_mc(
            w, v, gue4_es, [0.5, 1.0, 2.0], 4000, seed=8, chunk_size=500, threads=2
        )
        assert report.passed
        assert series.meta["formula"] == "c_two_point_mc"
        assert series.stderr is not None
        assert np.all(series.stderr > 0)

    @pytest.mark.slow
    def test_otoc(self):
        es = eigh(gue_sample(3, seed=17))
        w, v = gue_sample(3, seed=31), gue_sample(3, seed=32)
        report = otoc_mc(w, v, es, [0.4, 1.5], 6000, seed=9, chunk_size=1000, threads=2)
        assert report.passed
        assert report.meta["sym_dim"] == 6
        assert report.meta["antisym_dim"] == 3

    @pytest.mark.slow
    def test_long_time_average_reaches_plateau_contraction(self):
        """Test that the sampled long-time two-point function lands on Tr(G·W⊗W)/d."""
        es = eigh(gue_sample(8, seed=21))
        w = gue_sample(8, seed=22)
        expected = plateau_exact(es).contract(w.matrix, w.matrix).real / 8
        t_max = 1e4 / es.mean_spacing
        value = time_averaged_two_point_mc(
            w, w, es, t_max, 40_000, 40, seed=12, chunk_size=10, threads=2
        )
        assert value == pytest.approx(expected, rel=0.02)
        assert expected == pytest.approx(diagonal_ensemble(w, es))

    def test_time_average_refuses_empty_window(self, gue4_es, observables4):
        w, v = observables4
        with pytest.raises(InvalidInputError):
            time_averaged_two_point_mc(w, v, gue4_es, 0.0, 10, 100, seed=0)


class TestFramePotentialOracles:
    """Test pair-sampled frame potentials."""

    def test_first_frame_potential_is_one(self, dz3):
        """Test that E|Tr U†V|² = 1 for a 1-design."""
        result = frame_potential_pairs(dz3, 1, 4000, seed=10, chunk_size=500, threads=2)
        assert result.agrees_with(1.0)

    def test_second_frame_potential_report(self, dz3):
        """Test that pair sampling lands on the enumeration value 3."""
        report = frame_potential_report(dz3, 6000, seed=11, chunk_size=1000, threads=2)
        assert report.reference == [3.0]
        assert report.passed
        assert report.meta["d"] == 3
        assert report.meta["closed_form"] >= 2.0
