"""Generator and jump-chain construction on the colored lattice.

A state (k, l) coalesces at total rate C(k+l, 2). The merging pair is
BB with rate C(k, 2), BW with rate k*l, WW with rate C(l, 2), and the
parent color follows the multiplication rules with parameter x: a
same-colored pair produces B with probability x, a mixed pair with
probability 1 - x. Collecting terms per destination state gives four
candidate moves from each lattice point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import SingularMatrixError, solve_linear
from .states import ColorState, StateSpace, build_lattice, coalescence_rate


def check_color_parameter(x: float) -> float:
    """Validate the color parameter; the model requires 0 < x < 1."""
    x = float(x)
    if not 0.0 < x < 1.0:
        raise ValueError(f"color parameter must satisfy 0 < x < 1, got {x}")
    return x


@dataclass(frozen=True)
class Generator:
    """Rate matrix over a colored lattice in canonical state order."""

    space: StateSpace
    x: float
    matrix: np.ndarray


@dataclass(frozen=True)
class JumpChain:
    """Embedded discrete-time chain of a Generator; absorbing rows self-loop."""

    space: StateSpace
    x: float
    matrix: np.ndarray


def transition_rates(state: ColorState, x: float) -> list[tuple[ColorState, float]]:
    """Positive-rate moves out of one lattice state.

    Destinations: (k-2, l+1) when a BB pair produces W, (k-1, l) when a
    BB pair keeps B or a BW pair produces W, (k, l-1) when a BW pair
    produces B or a WW pair keeps W, (k+1, l-2) when a WW pair produces
    B. Rates with a zero binomial or product factor drop out, so every
    returned destination is guaranteed to sit on the lattice.
    """
    k, l = state
    xbar = 1.0 - x
    rb = coalescence_rate(k)
    rw = coalescence_rate(l)
    cross = k * l
    moves = (
        (ColorState(k - 2, l + 1), xbar * rb),
        (ColorState(k - 1, l), x * rb + x * cross),
        (ColorState(k, l - 1), xbar * rw + xbar * cross),
        (ColorState(k + 1, l - 2), x * rw),
    )
    return [(target, rate) for target, rate in moves if rate > 0.0]


def build_generator(n: int, x: float) -> Generator:
    """Dense generator for sample size n and color parameter x."""
    if n < 2:
        raise ValueError(f"sample size must be >= 2, got {n}")
    x = check_color_parameter(x)
    space = build_lattice(n)
    q = np.zeros((space.size, space.size))
    for i, state in enumerate(space.states):
        if state.level < 2:
            continue  # the two roots are absorbing
        for target, rate in transition_rates(state, x):
            q[i, space.index[target]] = rate
        q[i, i] = -coalescence_rate(state.level)
    return Generator(space=space, x=x, matrix=q)


def jump_matrix(rate_matrix: np.ndarray) -> np.ndarray:
    """Embedded jump probabilities of any generator-shaped matrix.

    Transient rows are divided by their total exit rate with a zero
    diagonal; rows with no exit rate become absorbing self-loops.
    """
    q = np.asarray(rate_matrix, dtype=float)
    j = np.zeros_like(q)
    for i in range(q.shape[0]):
        total = -q[i, i]
        if total == 0.0:
            j[i, i] = 1.0
        else:
            j[i] = q[i] / total
            j[i, i] = 0.0
    return j


def jump_chain(g: Generator) -> JumpChain:
    """Jump chain of the colored coalescent generator."""
    return JumpChain(space=g.space, x=g.x, matrix=jump_matrix(g.matrix))


def level_step_block(m: int, x: float) -> np.ndarray:
    """One-event jump probabilities from the m-lineage diagonal down.

    Returns the (m+1) x m block whose (k, k') entry is the probability
    that a state (k, m-k) jumps to (k', m-1-k').
    """
    if m < 2:
        raise ValueError(f"level must be >= 2 to have transitions, got {m}")
    x = check_color_parameter(x)
    total = coalescence_rate(m)
    block = np.zeros((m + 1, m))
    for k in range(m + 1):
        for target, rate in transition_rates(ColorState(k, m - k), x):
            block[k, target.k] = rate / total
    return block


def level_transition_probabilities(n: int, m: int, x: float) -> np.ndarray:
    """Multi-event jump probabilities from the top diagonal to level m-1.

    Product of the per-level one-event blocks for levels n, n-1, ..., m;
    entry (k, k') is the probability that a process started at (k, n-k)
    occupies (k', m-1-k') after n-m+1 events. m = n+1 is the zero-event
    identity; m = 2 gives the absorption probabilities into the roots.
    """
    if n < 2:
        raise ValueError(f"sample size must be >= 2, got {n}")
    if not 2 <= m <= n + 1:
        raise ValueError(f"target level must be in [2, {n + 1}], got {m}")
    out = np.eye(n + 1)
    for level in range(n, m - 1, -1):
        out = out @ level_step_block(level, x)
    return out


def k_step_distribution(n1: int, n2: int, k: int, x: float) -> np.ndarray:
    """Distribution over the diagonal k events below the start (n1, n2).

    Entry k' is the probability of occupying (k', n-k-k') after exactly
    k coalescent events, for k = 0 (point mass at the start) up to n-1
    (absorption).
    """
    if n1 < 0 or n2 < 0:
        raise ValueError(f"lineage counts must be nonnegative, got ({n1}, {n2})")
    n = n1 + n2
    if n < 2:
        raise ValueError(f"sample size must be >= 2, got {n}")
    if not 0 <= k <= n - 1:
        raise ValueError(f"event count must be in [0, {n - 1}], got {k}")
    return level_transition_probabilities(n, n - k + 1, x)[n1]


def absorption_probabilities_exact(n: int, x: float) -> np.ndarray:
    """(n+1) x 2 absorption probabilities from the top diagonal.

    Row k gives (P to white root (0,1), P to black root (1,0)) for a
    start at (k, n-k), computed by exact block products rather than any
    closed form; serves as the matrix oracle for the parity formulas.
    """
    return level_transition_probabilities(n, 2, x)


def fundamental_matrix(jc: JumpChain) -> np.ndarray:
    """Expected visit counts (I - J_tt)^(-1) over the transient states.

    Transient states are everything above level 1, i.e. all but the last
    two indices in canonical order.
    """
    t = jc.space.size - 2
    j_tt = jc.matrix[:t, :t]
    try:
        return solve_linear(np.eye(t) - j_tt, np.eye(t))
    except SingularMatrixError as exc:
        # cannot happen for a chain built here; a failure means a bug upstream
        raise RuntimeError("jump chain is not absorbing") from exc


def expected_absorption_time(g: Generator) -> np.ndarray:
    """Expected time to hit a root from every transient state.

    Weights each transient visit count by the mean holding time at its
    level: E[T from s] = sum_eta N[s, eta] / C(level(eta), 2).
    """
    chain = jump_chain(g)
    visits = fundamental_matrix(chain)
    holding = np.array(
        [1.0 / coalescence_rate(s.level) for s in g.space.states[: g.space.size - 2]]
    )
    return visits @ holding
