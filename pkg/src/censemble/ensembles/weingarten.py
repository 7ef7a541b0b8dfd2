"""Exact unitary Weingarten functions for n ≤ 4 and small permutation helpers."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from censemble.errors import InvalidInputError, UnsupportedOrderError, WeingartenPoleError

Permutation = tuple[int, ...]


@dataclass(frozen=True)
class CycleType:
    """Partition of n given by the cycle lengths of a permutation."""

    parts: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.parts or any(p < 1 for p in self.parts):
            raise InvalidInputError(f"cycle type needs positive parts, got {self.parts}")
        object.__setattr__(self, "parts", tuple(sorted(self.parts, reverse=True)))

    @property
    def n(self) -> int:
        return sum(self.parts)

    @classmethod
    def of(cls, permutation: Sequence[int]) -> CycleType:
        return cls(tuple(cycle_lengths(permutation)))


def cycle_lengths(permutation: Sequence[int]) -> list[int]:
    seen = [False] * len(permutation)
    lengths = []
    for start in range(len(permutation)):
        if seen[start]:
            continue
        length, i = 0, start
        while not seen[i]:
            seen[i] = True
            i = permutation[i]
            length += 1
        lengths.append(length)
    return lengths


def compose(p: Sequence[int], q: Sequence[int]) -> Permutation:
    """(p∘q)(i) = p(q(i))."""
    return tuple(p[q[i]] for i in range(len(q)))


def inverse(p: Sequence[int]) -> Permutation:
    inv = [0] * len(p)
    for i, pi in enumerate(p):
        inv[pi] = i
    return tuple(inv)


def _p4(d: Fraction) -> Fraction:
    return d**2 * (d**2 - 1) * (d**2 - 4) * (d**2 - 9)


_TABLE: dict[tuple[int, ...], Callable[[Fraction], Fraction]] = {
    (1,): lambda d: 1 / d,
    (2,): lambda d: -1 / (d * (d**2 - 1)),
    (1, 1): lambda d: 1 / (d**2 - 1),
    (3,): lambda d: 2 / (d * (d**2 - 1) * (d**2 - 4)),
    (2, 1): lambda d: -1 / ((d**2 - 1) * (d**2 - 4)),
    (1, 1, 1): lambda d: (d**2 - 2) / (d * (d**2 - 1) * (d**2 - 4)),
    (4,): lambda d: -5 * d / _p4(d),
    (3, 1): lambda d: (2 * d**2 - 3) / _p4(d),
    (2, 2): lambda d: (d**2 + 6) / _p4(d),
    (2, 1, 1): lambda d: (-(d**3) + 4 * d) / _p4(d),
    (1, 1, 1, 1): lambda d: (d**4 - 8 * d**2 + 6) / _p4(d),
}

# |d| values where the order-n table has a pole
_POLES = {1: {0}, 2: {0, 1}, 3: {0, 1, 2}, 4: {0, 1, 2, 3}}


def weingarten(cycle_type: CycleType | Iterable[int], d: int) -> Fraction:
    """Exact Wg^U(σ, d) for permutations of n ≤ 4 elements."""
    ct = cycle_type if isinstance(cycle_type, CycleType) else CycleType(tuple(cycle_type))
    if ct.n > 4:
        raise UnsupportedOrderError(f"Weingarten functions are tabulated for n ≤ 4, got n={ct.n}")
    if abs(d) in _POLES[ct.n]:
        raise WeingartenPoleError(f"Wg for n={ct.n} has a pole at d={d}")
    return _TABLE[ct.parts](Fraction(d))
