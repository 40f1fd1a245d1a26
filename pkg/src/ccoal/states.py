"""Colored-state lattice for the two-color coalescent.

A state (k, l) counts the lineages currently carrying each of the two
colors: k of color B, l of color W. The process lives on the lattice
{(k, l): k, l >= 0, 0 < k + l <= n} and loses exactly one lineage per
coalescent event, so it walks down one diagonal at a time until it hits
one of the two absorbing roots (0, 1) or (1, 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple


class ColorState(NamedTuple):
    """Lattice point: k lineages of color B, l of color W."""

    k: int
    l: int

    @property
    def level(self) -> int:
        """Number of live lineages."""
        return self.k + self.l


class Parity(Enum):
    """Evenness of the B-lineage count; the exactly lumpable statistic."""

    EVEN = 0
    ODD = 1

    def flipped(self) -> "Parity":
        return Parity.ODD if self is Parity.EVEN else Parity.EVEN


class ParityBlock(NamedTuple):
    """Aggregated state: all lattice points at one level with one parity."""

    level: int
    parity: Parity


def parity_of(state: ColorState | tuple[int, int]) -> Parity:
    """Parity of the B-lineage count of a state."""
    return Parity.EVEN if state[0] % 2 == 0 else Parity.ODD


def coalescence_rate(m: int) -> int:
    """Total coalescence rate C(m, 2) for a level with m lineages.

    All modules get their binomial C(a, 2) terms from this helper;
    math.comb already yields 0 when a < 2, which is the convention the
    transition rates rely on (states with fewer than two same-colored
    lineages contribute nothing).
    """
    if m < 0:
        raise ValueError(f"lineage count must be nonnegative, got {m}")
    return math.comb(m, 2)


def lattice_size(n: int) -> int:
    """Number of lattice states for sample size n: n(n+3)/2."""
    return n * (n + 3) // 2


@dataclass(frozen=True)
class StateSpace:
    """Canonically ordered lattice with an index lookup.

    Diagonals run from level n down to level 1; within a diagonal the
    B-count increases, so the order is (0,n), (1,n-1), ..., (n,0),
    (0,n-1), ..., (0,1), (1,0). The two roots always occupy the final
    two slots, which every absorbing-chain computation here relies on.
    """

    n: int
    states: tuple[ColorState, ...]
    index: dict[ColorState, int]

    @property
    def size(self) -> int:
        return len(self.states)

    def level_indices(self, m: int) -> range:
        """Index range of the diagonal with m lineages."""
        if not 1 <= m <= self.n:
            raise ValueError(f"level must be in [1, {self.n}], got {m}")
        start = self.size - lattice_size(m)
        return range(start, start + m + 1)

    def diagonal(self, m: int) -> tuple[ColorState, ...]:
        """States of the diagonal with m lineages, in canonical order."""
        r = self.level_indices(m)
        return self.states[r.start : r.stop]

    def index_of(self, state: ColorState | tuple[int, int]) -> int:
        s = ColorState(*state)
        try:
            return self.index[s]
        except KeyError:
            raise ValueError(
                f"state {tuple(s)} is not on the lattice for n={self.n}"
            ) from None


def build_lattice(n: int) -> StateSpace:
    """Enumerate the lattice for sample size n in canonical order."""
    if n < 1:
        raise ValueError(f"sample size must be >= 1, got {n}")
    states = tuple(
        ColorState(k, m - k) for m in range(n, 0, -1) for k in range(m + 1)
    )
    return StateSpace(n=n, states=states, index={s: i for i, s in enumerate(states)})
