"""Exact lumping of finite Markov generators and stochastic matrices.

A partition of the state space is exactly lumpable for a matrix M when
V U M V = M V, where U averages states within each block and V expands
blocks back to states. The lumped matrix is then U M V and, for a
generator, the lumped semigroup is the exponential of the lumped
generator. The partition this package cares about groups each lattice
diagonal by the parity of the B-lineage count.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .states import Parity, StateSpace, coalescence_rate


class NotLumpableError(ValueError):
    """Partition fails the exact-lumpability criterion for the matrix."""

    def __init__(self, max_violation: float, tol: float):
        self.max_violation = max_violation
        self.tol = tol
        super().__init__(
            f"partition is not exactly lumpable: residual {max_violation:.3e} "
            f"exceeds tolerance {tol:.1e}"
        )


@dataclass(frozen=True)
class Partition:
    """Disjoint blocks of state indices, each with a display label."""

    blocks: tuple[tuple[int, ...], ...]
    labels: tuple[str, ...]

    def __post_init__(self):
        if len(self.blocks) != len(self.labels):
            raise ValueError("one label per block required")
        if not self.blocks:
            raise ValueError("partition must have at least one block")
        seen: set[int] = set()
        for block in self.blocks:
            if not block:
                raise ValueError("empty blocks are not allowed")
            for i in block:
                if i in seen:
                    raise ValueError(f"state index {i} appears in two blocks")
                seen.add(i)

    def check_covers(self, size: int) -> None:
        covered = {i for block in self.blocks for i in block}
        if covered != set(range(size)):
            raise ValueError(
                f"partition covers {len(covered)} of {size} states; "
                "blocks must partition the full state space"
            )


class AggregationPair(NamedTuple):
    """Averaging matrix u (blocks x states) and indicator matrix v (states x blocks)."""

    u: np.ndarray
    v: np.ndarray


@dataclass(frozen=True)
class LumpReport:
    """Outcome of a lumpability check."""

    lumpable: bool
    max_violation: float
    lumped: np.ndarray | None


def uv_matrices(p: Partition, r: int) -> AggregationPair:
    """Aggregation matrices for a partition of r states.

    Row b of u is the uniform distribution over block b; column b of v
    is the indicator of block b. u @ v is the identity on blocks.
    """
    p.check_covers(r)
    u = np.zeros((len(p.blocks), r))
    v = np.zeros((r, len(p.blocks)))
    for b, block in enumerate(p.blocks):
        u[b, list(block)] = 1.0 / len(block)
        v[list(block), b] = 1.0
    return AggregationPair(u=u, v=v)


_KINDS = ("generator", "stochastic")


def _validate_kind(m: np.ndarray, kind: str) -> None:
    if kind not in _KINDS:
        raise ValueError(f"kind must be one of {_KINDS}, got {kind!r}")
    scale = max(1.0, float(np.abs(m).max(initial=0.0)))
    off = m - np.diag(np.diag(m))
    if kind == "generator":
        if (off < -1e-12 * scale).any() or (np.abs(m.sum(axis=1)) > 1e-9 * scale).any():
            raise ValueError("matrix is not a generator (off-diagonal >= 0, zero row sums)")
    else:
        if (m < -1e-12).any() or (np.abs(m.sum(axis=1) - 1.0) > 1e-9).any():
            raise ValueError("matrix is not stochastic (entries >= 0, unit row sums)")


def check_lumpable(m, p: Partition, kind: str, tol: float = 1e-9) -> LumpReport:
    """Test the exact-lumpability criterion v u m v = m v.

    max_violation is the largest absolute entry of the residual. When it
    passes, the lumped matrix u m v is included in the report.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    _validate_kind(m, kind)
    pair = uv_matrices(p, m.shape[0])
    mv = m @ pair.v
    residual = pair.v @ (pair.u @ mv) - mv
    max_violation = float(np.abs(residual).max())
    lumpable = max_violation <= tol
    return LumpReport(
        lumpable=lumpable,
        max_violation=max_violation,
        lumped=pair.u @ mv if lumpable else None,
    )


def lump(m, p: Partition, kind: str, tol: float = 1e-9) -> np.ndarray:
    """Lumped matrix u m v; raises NotLumpableError when the criterion fails."""
    report = check_lumpable(m, p, kind, tol)
    if not report.lumpable:
        raise NotLumpableError(report.max_violation, tol)
    return report.lumped


def parity_partition(space: StateSpace) -> Partition:
    """Per-level parity blocks E_m, O_m ordered from level n down to 1."""
    blocks: list[tuple[int, ...]] = []
    labels: list[str] = []
    for m in range(space.n, 0, -1):
        indices = space.level_indices(m)
        for parity, tag in ((0, "E"), (1, "O")):
            blocks.append(tuple(i for i in indices if space.states[i].k % 2 == parity))
            labels.append(f"{tag}{m}")
    return Partition(blocks=tuple(blocks), labels=tuple(labels))


def parity_block_index(n: int, level: int, parity: Parity) -> int:
    """Index of a parity block in the lumped ordering E_n, O_n, ..., E_1, O_1."""
    if not 1 <= level <= n:
        raise ValueError(f"level must be in [1, {n}], got {level}")
    return 2 * (n - level) + parity.value


def parity_step_matrix(x: float) -> np.ndarray:
    """One-event parity transition probabilities [[1-x, x], [x, 1-x]]."""
    return np.array([[1.0 - x, x], [x, 1.0 - x]])


def parity_block_power(x: float, k: int) -> np.ndarray:
    """k-event parity transition probabilities in closed form.

    The one-event matrix has eigenvalues 1 and 1-2x, so its k-th power is
    [[1/2 + d/2, 1/2 - d/2], [1/2 - d/2, 1/2 + d/2]] with d = (1-2x)^k.
    """
    if k < 0:
        raise ValueError(f"exponent must be >= 0, got {k}")
    if not 0.0 < x < 1.0:
        raise ValueError(f"color parameter must satisfy 0 < x < 1, got {x}")
    d = (1.0 - 2.0 * x) ** k
    same = 0.5 + 0.5 * d
    cross = 0.5 - 0.5 * d
    return np.array([[same, cross], [cross, same]])


def lumped_generator(n: int, x: float) -> np.ndarray:
    """Closed-form parity-lumped generator on blocks E_n, O_n, ..., E_1, O_1.

    Block-diagonal entries are -C(m,2) I_2 for levels n..2 and zero at
    level 1; the updiagonal block from level m to m-1 is C(m,2) times the
    one-event parity matrix.
    """
    if n < 2:
        raise ValueError(f"sample size must be >= 2, got {n}")
    q = np.zeros((2 * n, 2 * n))
    c = parity_step_matrix(x)
    for m in range(n, 1, -1):
        rate = coalescence_rate(m)
        i = 2 * (n - m)
        q[i : i + 2, i : i + 2] = -rate * np.eye(2)
        q[i : i + 2, i + 2 : i + 4] = rate * c
    return q
