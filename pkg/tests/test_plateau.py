from __future__ import annotations

import numpy as np
import pytest

from censemble.config import SolverConfig
from censemble.ensembles.cens import plateau_exact
from censemble.ensembles.haar import haar_sample
from censemble.errors import InvalidInputError, SolverNonConvergenceError
from censemble.linalg.tensors import HermitianOperator, eigh
from censemble.models.builders import gue_sample
from censemble.plateau import (
    NewtonReport,
    PhiOperator,
    bootstrap_form,
    bootstrap_printed,
    dephasing_error,
    plateau_residual,
    solve_newton,
    solve_qubit,
)


class TestPhiOperator:
    """Test the Δφ container."""

    def test_traceless_required(self):
        """Test that a traced matrix is refused as Δφ."""
        with pytest.raises(InvalidInputError, match="traceless"):
            PhiOperator(np.eye(2))

    def test_centering(self):
        """Test that an uncentered φ centers to its traceless part."""
        phi = PhiOperator(np.diag([2.0, 0.0]), traceless=False).centered()
        np.testing.assert_allclose(phi.matrix, np.diag([1.0, -1.0]))


class TestBootstrap:
    """Test the bootstrap form of the plateau operator."""

    def test_qubit_solution(self, pauli):
        """Test that H = Z gives Δφ = Z/2."""
        phi = solve_qubit(pauli["Z"])
        np.testing.assert_allclose(phi.matrix, pauli["Z"].matrix / 2)

    def test_qubit_reconstruction_is_exact(self, pauli):
        """Test that the bootstrap form of the qubit solution is Σ_l |E_l E_l⟩⟨E_l E_l|."""
        h = HermitianOperator(0.3 * pauli["X"].matrix + 0.8 * pauli["Z"].matrix + 0.1 * np.eye(2))
        g = bootstrap_form(solve_qubit(h))
        np.testing.assert_allclose(g.matrix, plateau_exact(eigh(h)).matrix, atol=1e-12)
        assert plateau_residual(solve_qubit(h), h) < 1e-12
        assert dephasing_error(g, h) < 1e-12

    def test_qutrit_solution_is_proportional_to_hamiltonian(self):
        """Test that Δφ = √(5/9)·ΔH/‖ΔH‖ solves the plateau equation for any d = 3 spectrum."""
        h = gue_sample(3, seed=4)
        dh = h.centered().matrix
        phi = PhiOperator(np.sqrt(5 / 9) * dh / np.linalg.norm(dh))
        assert plateau_residual(phi, h) < 1e-12

    def test_ladder_solution(self):
        """Test the odd solution x = (−p, −q, q, p) with p = (1 + √2)q for levels 0, 1, 2, 3."""
        q = np.sqrt(12 / (134 + 92 * np.sqrt(2)))
        p = (1 + np.sqrt(2)) * q
        phi = PhiOperator(np.diag([-p, -q, q, p]))
        assert plateau_residual(phi, HermitianOperator(np.diag([0.0, 1.0, 2.0, 3.0]))) < 1e-12

    def test_qubit_needs_nontrivial_h(self):
        """Test that ΔH = 0 is refused."""
        with pytest.raises(InvalidInputError):
            solve_qubit(HermitianOperator(np.eye(2)))

    def test_shift_invariance(self, rng):
        """Test that the bootstrap form ignores φ → φ + c·I."""
        x = rng.standard_normal((3, 3))
        x = x + x.T
        g1 = bootstrap_form(x)
        g2 = bootstrap_form(x + 2.5 * np.eye(3))
        np.testing.assert_allclose(g1.matrix, g2.matrix, atol=1e-12)

    def test_trace_is_dimension(self, rng):
        """Test that the centered bootstrap form always has Tr G = d."""
        x = rng.standard_normal((4, 4))
        g = bootstrap_form(x + x.T)
        assert np.trace(g.matrix).real == pytest.approx(4.0)

    def test_printed_form_is_not_shift_invariant(self):
        """Test that the uncentered form changes under φ → φ + c·I."""
        x = np.diag([0.5, -0.5])
        shifted = bootstrap_printed(x + np.eye(2))
        assert not np.allclose(bootstrap_printed(x), shifted)


class TestNewton:
    """Test the plateau-equation Newton solver."""

    def test_qubit_converges_to_closed_form(self, pauli):
        """Test that the Newton solver reproduces the exact qubit plateau."""
        h = HermitianOperator(0.6 * pauli["Z"].matrix + 0.2 * pauli["Y"].matrix)
        phi, report = solve_newton(h)
        assert isinstance(report, NewtonReport)
        assert report.converged
        assert report.residual < 1e-8
        assert report.reconstruction_error < 1e-8
        np.testing.assert_allclose(
            bootstrap_form(phi).matrix, bootstrap_form(solve_qubit(h)).matrix, atol=1e-8
        )

    @pytest.mark.parametrize("d", [3, 4])
    def test_report_is_populated(self, d):
        """Test that a solve on d > 2 returns a complete report."""
        h = HermitianOperator(np.diag(np.arange(d, dtype=np.float64) ** 1.5))
        phi, report = solve_newton(h)
        assert phi.dim == d
        assert len(report.coefficients) == d - 1
        assert report.attempts >= 1
        assert report.residual_history
        assert report.reconstruction_error >= 0.0

    @pytest.mark.parametrize("seed", [1, 2, 3])
    def test_random_qutrit_converges(self, seed):
        h = gue_sample(3, seed=seed)
        phi, report = solve_newton(h)
        assert report.converged
        assert report.residual <= 1e-8
        assert plateau_residual(phi, h) <= 1e-8

    def test_rotated_ladder_converges(self):
        """Test a d = 4 ladder spectrum in a seeded random eigenbasis."""
        u = haar_sample(4, seed=7)
        m = u @ np.diag([0.0, 1.0, 2.0, 3.0]) @ u.conj().T
        h = HermitianOperator(0.5 * (m + m.conj().T))
        phi, report = solve_newton(h)
        assert report.converged
        assert report.residual <= 1e-8
        assert plateau_residual(phi, h) <= 1e-8

    def test_strict_raises_with_report(self):
        """Test that strict mode raises with the best report attached when attempts run out."""
        h = HermitianOperator(np.diag([0.0, 1.0, 3.0, 3.5]))
        config = SolverConfig(max_iter=1, restarts=1, tol=1e-30)
        with pytest.raises(SolverNonConvergenceError) as info:
            solve_newton(h, config=config, strict=True)
        assert isinstance(info.value.report, NewtonReport)
        assert not info.value.report.converged
        assert info.value.exit_code == 5

    def test_non_strict_returns_best_candidate(self):
        """Test that exhausting the attempts without strict still returns Δφ."""
        h = HermitianOperator(np.diag([0.0, 1.0, 3.0, 3.5]))
        config = SolverConfig(max_iter=1, restarts=2, tol=1e-30)
        phi, report = solve_newton(h, config=config)
        assert not report.converged
        assert report.attempts == 2
        assert phi.dim == 4
