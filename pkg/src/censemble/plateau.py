"""Bootstrap form of the plateau operator and the plateau equation for Δφ(H).

The exact plateau operator is fixed by a single traceless operator Δφ(H):

    G = [1/(d+1) + Tr Δφ²/((d+1)(d+2))]·(I⊗I + SWAP) + (Δφ⊗Δφ)(I⊗I + SWAP)
        − (Δφ²⊗I + I⊗Δφ²)(I⊗I + SWAP)/(d+2)

and Tr₁(G(ΔH⊗I)) = ΔH turns into the plateau equation solved below.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
import structlog
from pydantic import BaseModel, Field
from scipy import optimize
from tenacity import RetryError, retry, retry_if_exception_type, stop_after_attempt

from censemble.config import DEFAULT_SETTINGS, SolverConfig
from censemble.ensembles.cens import plateau_exact
from censemble.ensembles.moments import PlateauOperator
from censemble.errors import InvalidInputError, SolverNonConvergenceError
from censemble.linalg.tensors import (
    ComplexMatrix,
    HermitianOperator,
    as_complex_matrix,
    eigh,
    kron,
    max_norm,
    partial_trace,
    s_tensor,
    swap,
)

log = structlog.get_logger()

_TRACE_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class PhiOperator:
    """Hermitian Δφ (or uncentered φ) parametrizing the bootstrap form."""

    matrix: ComplexMatrix
    traceless: bool = True

    def __post_init__(self) -> None:
        matrix = as_complex_matrix(self.matrix, name="φ")
        if matrix.shape[0] != matrix.shape[1]:
            raise InvalidInputError(f"φ must be square, got shape {matrix.shape}")
        if max_norm(matrix - matrix.conj().T) > DEFAULT_SETTINGS.tolerances.hermiticity * max(
            1.0, max_norm(matrix)
        ):
            raise InvalidInputError("φ must be Hermitian")
        if self.traceless and abs(np.trace(matrix)) > _TRACE_TOL * max(1.0, max_norm(matrix)):
            raise InvalidInputError(f"Δφ must be traceless, got Tr = {np.trace(matrix):.3e}")
        matrix = matrix.copy()
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    def centered(self) -> PhiOperator:
        shift = np.trace(self.matrix).real / self.dim
        return PhiOperator(self.matrix - shift * np.eye(self.dim), traceless=True)

    @classmethod
    def from_eigen(cls, values: npt.ArrayLike, vectors: npt.ArrayLike) -> PhiOperator:
        u = np.asarray(vectors, dtype=np.complex128)
        m = (u * np.asarray(values, dtype=np.float64)) @ u.conj().T
        return cls(0.5 * (m + m.conj().T))


def _as_phi(phi: PhiOperator | npt.ArrayLike) -> PhiOperator:
    if isinstance(phi, PhiOperator):
        return phi
    return PhiOperator(np.asarray(phi), traceless=False)


def _bootstrap_matrix(x: ComplexMatrix, scalar: float, q: ComplexMatrix) -> ComplexMatrix:
    d = x.shape[0]
    eye = np.eye(d)
    crossing = np.eye(d * d) + swap(d)
    body = scalar * np.eye(d * d) + kron(x, x) - kron(q, eye) - kron(eye, q)
    return body @ crossing


def bootstrap_form(phi: PhiOperator | npt.ArrayLike) -> PlateauOperator:
    """Plateau operator from Δφ; φ is centered first, so adding c·I changes nothing."""
    x = _as_phi(phi).centered().matrix
    d = x.shape[0]
    sq = x @ x
    scalar = 1 / (d + 1) + np.trace(sq).real / ((d + 1) * (d + 2))
    return PlateauOperator(_bootstrap_matrix(x, scalar, sq / (d + 2)), d)


def bootstrap_printed(phi: PhiOperator | npt.ArrayLike) -> ComplexMatrix:
    """Uncentered variant in terms of φ with first-power traces, kept for comparison.

    It is not invariant under φ → φ + c·I and, for traceless φ, misses the
    Tr φ² scalar, so its trace differs from d in general.
    """
    x = _as_phi(phi).matrix
    d = x.shape[0]
    tr = np.trace(x).real
    scalar = 1 / (d + 1) + (tr + tr**2) / ((d + 1) * (d + 2))
    return _bootstrap_matrix(x, scalar, (x @ x + tr * x) / (d + 2))


def plateau_equation(phi: PhiOperator | npt.ArrayLike, dh: HermitianOperator) -> ComplexMatrix:
    """Left-hand side of the plateau equation for centered Δφ and ΔH."""
    x = _as_phi(phi).centered().matrix
    h = dh.centered().matrix
    d = h.shape[0]
    if x.shape != h.shape:
        raise InvalidInputError(f"Δφ {x.shape} and ΔH {h.shape} must have the same shape")
    eye = np.eye(d)
    sq = x @ x
    bracket = d / (d + 2) * sq + (np.trace(sq).real / ((d + 2) * (d + 1)) - d / (d + 1)) * eye
    return h @ bracket + x * np.trace(x @ h) - np.trace(sq @ h) / (d + 2) * eye


def plateau_residual(phi: PhiOperator | npt.ArrayLike, dh: HermitianOperator) -> float:
    return max_norm(plateau_equation(phi, dh))


def dephasing_error(g: PlateauOperator | ComplexMatrix, h: HermitianOperator) -> float:
    """‖Tr₁(G(H⊗I)) − H‖_max."""
    matrix = g.matrix if isinstance(g, PlateauOperator) else g
    dephased = partial_trace(matrix @ kron(h.matrix, np.eye(h.dim)), "first")
    return max_norm(dephased - h.matrix)


def solve_qubit(h: HermitianOperator) -> PhiOperator:
    """Δφ = ΔH/√(2 Tr ΔH²) for a single qubit."""
    if h.dim != 2:
        raise InvalidInputError(f"solve_qubit needs d = 2, got d = {h.dim}")
    dh = h.centered().matrix
    norm2 = np.trace(dh @ dh).real
    if norm2 <= DEFAULT_SETTINGS.tolerances.hermiticity:
        raise InvalidInputError("ΔH = 0: every φ solves the plateau equation")
    return PhiOperator(dh / np.sqrt(2 * norm2))


class NewtonReport(BaseModel):
    """Outcome of a plateau-equation solve, serializable to JSON."""

    converged: bool = Field(description="Whether the residual reached the tolerance.")
    attempts: int = Field(description="Newton attempts consumed, restarts included.")
    iterations: int = Field(description="Newton iterations of the returned attempt.")
    residual: float = Field(description="Max-norm plateau-equation residual of Δφ.")
    residual_history: list[float] = Field(default_factory=list)
    coefficients: list[float] = Field(
        default_factory=list,
        description="Power-basis coefficients α_l for unit-norm ΔH.",
    )
    extraction_residual: float = Field(description="Residual of the least-squares starting point.")
    reconstruction_error: float = Field(description="‖G_bootstrap − G_exact‖_max.")
    dephasing_error: float = Field(description="‖Tr₁(G(H⊗I)) − H‖_max for the bootstrap G.")
    min_eigenvalue: float = Field(description="Smallest eigenvalue of the bootstrap G.")


class _NewtonStall(Exception):
    def __init__(self, alpha: npt.NDArray[np.float64], residual: float, history: list[float]) -> None:
        super().__init__(f"Newton stalled at residual {residual:.3e}")
        self.alpha = alpha
        self.residual = residual
        self.history = history


@dataclass(frozen=True)
class _PowerProblem:
    """Plateau equation on the spectrum of unit-norm ΔH in the traceless power basis."""

    h: npt.NDArray[np.float64]
    basis: npt.NDArray[np.float64]
    projector: npt.NDArray[np.float64]

    @classmethod
    def from_spectrum(cls, values: npt.NDArray[np.float64]) -> _PowerProblem:
        h = values - values.mean()
        h = h / np.linalg.norm(h)
        d = h.size
        powers = np.stack([h**p for p in range(1, d)], axis=1)
        basis = powers - powers.mean(axis=0)
        q, _ = np.linalg.qr(basis)
        return cls(h, basis, q)

    @property
    def d(self) -> int:
        return self.h.size

    def spectrum(self, alpha: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        return self.basis @ alpha

    def residual_vector(self, alpha: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        d, h, x = self.d, self.h, self.spectrum(alpha)
        s = x @ x
        return (
            h * (d / (d + 2) * x**2 + s / ((d + 2) * (d + 1)) - d / (d + 1))
            + x * (x @ h)
            - (x**2 @ h) / (d + 2)
        )

    def projected(self, alpha: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        return self.projector.T @ self.residual_vector(alpha)

    def extraction_fit(self, alpha0: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        """Least-squares fit of the bootstrap form to Σ_l |ll⟩⟨ll| in the eigenbasis."""
        target = s_tensor(self.d).real

        def mismatch(alpha: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
            x = np.diag(self.spectrum(alpha))
            d = self.d
            sq = x @ x
            scalar = 1 / (d + 1) + np.trace(sq) / ((d + 1) * (d + 2))
            return (_bootstrap_matrix(x, scalar, sq / (d + 2)).real - target).ravel()

        return optimize.least_squares(mismatch, alpha0).x


def _newton(
    problem: _PowerProblem,
    start: npt.NDArray[np.float64],
    scale: float,
    cfg: SolverConfig,
) -> tuple[npt.NDArray[np.float64], list[float]]:
    alpha = start.copy()
    history: list[float] = []
    for iteration in range(cfg.max_iter):
        f = problem.projected(alpha)
        residual = scale * float(np.max(np.abs(problem.residual_vector(alpha))))
        history.append(residual)
        log.debug("solver.iteration", iteration=iteration, residual=residual)
        if residual <= cfg.tol:
            return alpha, history
        jacobian = np.empty((f.size, alpha.size))
        for j in range(alpha.size):
            step = cfg.fd_step * (1 + abs(alpha[j]))
            shifted = alpha.copy()
            shifted[j] += step
            jacobian[:, j] = (problem.projected(shifted) - f) / step
        delta = np.linalg.lstsq(jacobian, -f, rcond=None)[0]
        norm = np.linalg.norm(f)
        damping = 1.0
        while damping > 1e-8:
            candidate = alpha + damping * delta
            if np.linalg.norm(problem.projected(candidate)) < norm:
                alpha = candidate
                break
            damping /= 2
        else:
            raise _NewtonStall(alpha, residual, history)
    residual = scale * float(np.max(np.abs(problem.residual_vector(alpha))))
    if residual <= cfg.tol:
        return alpha, history
    raise _NewtonStall(alpha, residual, history)


def solve_newton(
    h: HermitianOperator,
    *,
    config: SolverConfig | None = None,
    strict: bool = False,
) -> tuple[PhiOperator, NewtonReport]:
    """Solve the plateau equation with Δφ = Σ_l α_l(ΔH^l − Tr(ΔH^l)/d).

    Damped Newton with a forward-difference Jacobian starts from a
    least-squares fit of the bootstrap form to the exact plateau operator;
    stalled attempts restart from seeded perturbations of that start. When
    every attempt stalls, the best candidate is returned with
    ``converged=False``, or SolverNonConvergenceError is raised if ``strict``.
    """
    cfg = config or DEFAULT_SETTINGS.solver
    es = eigh(h)
    es.require_nondegenerate("solve_newton")
    d = es.dim
    if d < 2:
        raise InvalidInputError("the plateau equation needs d ≥ 2")

    centered = es.values - es.values.mean()
    scale = float(np.linalg.norm(centered))
    problem = _PowerProblem.from_spectrum(es.values)
    seed_alpha = np.zeros(d - 1)
    seed_alpha[0] = 1 / np.sqrt(2)
    alpha0 = problem.extraction_fit(seed_alpha)
    extraction_residual = scale * float(np.max(np.abs(problem.residual_vector(alpha0))))

    rng = np.random.default_rng(cfg.seed)
    counter = itertools.count(1)
    stalls: list[_NewtonStall] = []

    @retry(
        retry=retry_if_exception_type(_NewtonStall),
        stop=stop_after_attempt(max(1, cfg.restarts)),
    )
    def _attempt() -> tuple[npt.NDArray[np.float64], list[float], int]:
        attempt = next(counter)
        start = alpha0 if attempt == 1 else alpha0 + rng.normal(0.0, 0.1 * attempt, alpha0.size)
        try:
            alpha, history = _newton(problem, start, scale, cfg)
        except _NewtonStall as stall:
            log.warning("solver.restart", attempt=attempt, residual=stall.residual)
            stalls.append(stall)
            raise
        return alpha, history, attempt

    try:
        alpha, history, attempts = _attempt()
        converged = True
    except RetryError:
        best = min(stalls, key=lambda s: s.residual)
        if best.residual < extraction_residual:
            alpha, history = best.alpha, best.history
        else:
            alpha, history = alpha0, [extraction_residual]
        attempts = len(stalls)
        converged = False

    phi = PhiOperator.from_eigen(problem.spectrum(alpha), es.vectors)
    g = bootstrap_form(phi)
    report = NewtonReport(
        converged=converged,
        attempts=attempts,
        iterations=max(0, len(history) - 1),
        residual=plateau_residual(phi, h),
        residual_history=history,
        coefficients=[float(a) for a in alpha],
        extraction_residual=extraction_residual,
        reconstruction_error=max_norm(g.matrix - plateau_exact(es).matrix),
        dephasing_error=dephasing_error(g, h),
        min_eigenvalue=g.min_eigenvalue,
    )
    log.info(
        "solver.finished",
        d=d,
        converged=converged,
        attempts=attempts,
        residual=report.residual,
        reconstruction_error=report.reconstruction_error,
    )
    if not converged and strict:
        raise SolverNonConvergenceError(
            f"plateau equation residual {report.residual:.3e} above tolerance {cfg.tol:.1e}",
            report=report,
        )
    return phi, report
