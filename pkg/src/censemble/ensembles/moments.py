"""Moment operators E[U^{⊗k} ⊗ U†^{⊗k}] and plateau operators on H⊗H.

A 2k-moment operator is stored as a d^{2k}×d^{2k} matrix whose tensor form
``[a_1..a_{2k}, b_1..b_{2k}]`` holds E[U_{a1 b1}···U_{ak bk} U†_{a(k+1) b(k+1)}···].
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from censemble.errors import InvalidInputError, UnsupportedOrderError
from censemble.linalg.tensors import (
    ComplexMatrix,
    as_complex_matrix,
    max_norm,
    partial_trace,
    swap,
    twofold_dim,
)

PLATEAU_TOL = 1e-10


def index_grid(d: int, n_axes: int) -> list[npt.NDArray[np.int64]]:
    """Open grid of ``n_axes`` index arrays that broadcast to shape (d,)*n_axes."""
    grid = []
    for axis in range(n_axes):
        shape = [1] * n_axes
        shape[axis] = d
        grid.append(np.arange(d).reshape(shape))
    return grid


def phase_balanced_mask(k: int, d: int) -> npt.NDArray[np.bool_]:
    """Entries of E[C^{⊗k}⊗C†^{⊗k}] that survive the average over diagonal phases.

    A monomial survives iff the multiset of unconjugated row indices
    (a_1..a_k) equals the multiset of conjugated column indices
    (b_{k+1}..b_{2k}).
    """
    if k not in (1, 2):
        raise UnsupportedOrderError(f"phase rule implemented for k ∈ {{1, 2}}, got {k}")
    g = index_grid(d, 4 * k)
    if k == 1:
        mask = g[0] == g[3]
    else:
        a1, a2, b3, b4 = g[0], g[1], g[6], g[7]
        mask = ((a1 == b3) & (a2 == b4)) | ((a1 == b4) & (a2 == b3))
    return np.broadcast_to(mask, (d,) * (4 * k))


@dataclass(frozen=True, eq=False)
class MomentOperator:
    order: int
    dimension: int
    matrix: ComplexMatrix

    def __post_init__(self) -> None:
        if self.order not in (2, 4):
            raise UnsupportedOrderError(f"moment order must be 2 or 4, got {self.order}")
        expected = self.dimension ** self.order
        if self.matrix.shape != (expected, expected):
            raise InvalidInputError(
                f"{self.order}-moment on d={self.dimension} must be {expected}×{expected}"
            )

    @classmethod
    def from_tensor(cls, tensor: npt.NDArray[np.complex128], order: int, d: int) -> MomentOperator:
        size = d**order
        return cls(order, d, np.ascontiguousarray(tensor, dtype=np.complex128).reshape(size, size))

    @property
    def k(self) -> int:
        return self.order // 2

    @property
    def tensor(self) -> npt.NDArray[np.complex128]:
        return self.matrix.reshape((self.dimension,) * (2 * self.order))

    def contract_replica(self) -> ComplexMatrix:
        """Pair the last upper replica with the last lower one.

        Unitarity turns this contraction into d times the next lower moment:
        a matrix on d^{2(k−1)} (a 1×1 matrix holding d when k = 1).
        """
        k, d = self.k, self.dimension
        n = 4 * k
        labels = list(range(n))
        labels[n - 1] = labels[k - 1]
        labels[3 * k - 1] = labels[2 * k - 1]
        removed = {k - 1, 2 * k - 1, 3 * k - 1, n - 1}
        out = [i for i in range(n) if i not in removed]
        result = np.einsum(self.tensor, labels, out)
        size = d ** (2 * (k - 1))
        return np.asarray(result).reshape(size, size)

    def left_channel(self, a: npt.ArrayLike) -> ComplexMatrix:
        """E[U^{⊗2} A U†^{⊗2}] for a twofold operator A."""
        a4 = self._twofold_tensor(a)
        out = np.einsum("ijmnklpq,klmn->ijpq", self.tensor, a4)
        return out.reshape(self.dimension**2, self.dimension**2)

    def right_channel(self, a: npt.ArrayLike) -> ComplexMatrix:
        """E[U†^{⊗2} A U^{⊗2}] for a twofold operator A."""
        a4 = self._twofold_tensor(a)
        out = np.einsum("mnijpqkl,klmn->ijpq", self.tensor, a4)
        return out.reshape(self.dimension**2, self.dimension**2)

    def frame_potential(self) -> float:
        """Tr(Φ†Φ) = E|Tr U†V|^{2k} over independent pairs."""
        return float(np.vdot(self.matrix, self.matrix).real)

    def _twofold_tensor(self, a: npt.ArrayLike) -> npt.NDArray[np.complex128]:
        if self.order != 4:
            raise UnsupportedOrderError("twofold channels need the 4-moment operator")
        matrix = as_complex_matrix(a)
        if twofold_dim(matrix) != self.dimension:
            raise InvalidInputError("channel input must act on H⊗H of the moment's dimension")
        d = self.dimension
        return matrix.reshape(d, d, d, d)


@dataclass(frozen=True, eq=False)
class PlateauOperator:
    """SWAP-invariant twofold operator G with Tr G = d."""

    matrix: ComplexMatrix
    dimension: int

    def __post_init__(self) -> None:
        matrix = as_complex_matrix(self.matrix, name="plateau operator")
        if twofold_dim(matrix) != self.dimension:
            raise InvalidInputError("plateau operator must be d²×d²")
        hermiticity = max_norm(matrix - matrix.conj().T)
        trace_error = abs(np.trace(matrix) - self.dimension)
        scale = max(1.0, max_norm(matrix))
        if hermiticity > PLATEAU_TOL * scale or trace_error > PLATEAU_TOL * self.dimension:
            raise InvalidInputError(
                f"not a plateau operator: hermiticity {hermiticity:.2e}, trace error {trace_error:.2e}"
            )
        matrix = matrix.copy()
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @property
    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.matrix)[0])

    def invariant_residuals(self) -> dict[str, float]:
        """Max-norm residuals of the plateau-operator identities."""
        g = self.matrix
        s = swap(self.dimension)
        return {
            "hermiticity": max_norm(g - g.conj().T),
            "trace": abs(complex(np.trace(g)) - self.dimension),
            "swap_left": max_norm(s @ g - g),
            "swap_right": max_norm(g @ s - g),
            "marginals": max_norm(partial_trace(g, "first") - partial_trace(g, "second")),
            "negativity": max(0.0, -self.min_eigenvalue),
        }

    def contract(self, w: npt.ArrayLike, v: npt.ArrayLike) -> complex:
        """Tr(G·(W⊗V)) without forming the Kronecker product."""
        d = self.dimension
        g4 = self.matrix.reshape(d, d, d, d)
        return complex(np.einsum("ijkl,ki,lj->", g4, np.asarray(w), np.asarray(v)))
