"""Finite-population oracle: backward Wright-Fisher sampling with colors.

Each generation back, every surviving lineage picks a parent uniformly at
random among the N individuals of the previous generation; lineages that
pick the same parent merge. A merged pair's color follows the
multiplication rule: a same-colored pair yields B with probability x, a
mixed pair with probability 1-x. When more than two lineages land on one
parent the rule is folded pairwise in a uniformly random order.

The module also carries the consistency check between the two color
models: the child-color likelihoods (each child of a B parent is B with
probability p, each child of a W parent is B with probability 1-q) admit
the rule form above exactly when p = 1-q, where every posterior is 1/2.
parent_color_posterior computes in whatever arithmetic it is handed, so
fractions.Fraction inputs give exact posteriors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .analytic import absorb_prob, expected_time_unconditional
from .generator import check_color_parameter
from .linalg import solve_linear
from .simulator import replicate_stream

BLACK = "B"
WHITE = "W"


class UndefinedPosteriorError(ArithmeticError):
    """All parent hypotheses have zero likelihood for the observed children."""


def _check_colors(colors: Sequence[str]) -> tuple[str, ...]:
    out = tuple(colors)
    for c in out:
        if c not in (BLACK, WHITE):
            raise ValueError(f"colors must be {BLACK!r} or {WHITE!r}, got {c!r}")
    return out


@dataclass(frozen=True)
class WfConfig:
    """Parameters of one backward Wright-Fisher experiment."""

    population: int
    sample_size: int
    initial_colors: tuple[str, ...]
    replicates: int
    seed: int

    def __post_init__(self):
        object.__setattr__(
            self, "initial_colors", _check_colors(self.initial_colors)
        )
        if not 2 <= self.sample_size <= self.population:
            raise ValueError(
                f"need 2 <= sample size <= population, got "
                f"{self.sample_size} and {self.population}"
            )
        if len(self.initial_colors) != self.sample_size:
            raise ValueError(
                f"expected {self.sample_size} initial colors, "
                f"got {len(self.initial_colors)}"
            )
        if self.replicates < 1:
            raise ValueError(f"replicates must be >= 1, got {self.replicates}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")


@dataclass(frozen=True)
class ColoredGenealogy:
    """One recovered genealogy: merge history, root color, depth."""

    merge_events: tuple[tuple[int, tuple[frozenset[int], ...], str], ...]
    root_color: str
    tmrca_generations: int


@dataclass(frozen=True)
class WfReport:
    """Aggregated Wright-Fisher statistics with coalescent references."""

    population: int
    sample_size: int
    x: float
    replicates: int
    seed: int
    mean_tmrca_generations: float
    mean_tmrca_coalescent: float
    stderr_tmrca_coalescent: float
    freq_root_black: float
    freq_root_white: float
    stderr_root_black: float
    ref_time_any: float
    ref_root_black: float


def _pair_color(a: str, b: str, x: float, u: float) -> str:
    """Color of the parent of one merged pair, from a single uniform."""
    threshold = x if a == b else 1.0 - x
    return BLACK if u < threshold else WHITE


def ancestral_recovery(
    cfg: WfConfig, x: float, rng_stream: np.random.Generator
) -> ColoredGenealogy:
    """Sample one colored genealogy of the cfg-sized sample.

    Once only two lineages remain, the per-generation merge chance is
    exactly 1/N, so the remaining depth is drawn geometrically in one
    step instead of generation by generation; the sampled law is
    unchanged.
    """
    check_color_parameter(x)
    pop = cfg.population
    lineages: list[tuple[frozenset[int], str]] = [
        (frozenset([i]), color) for i, color in enumerate(cfg.initial_colors)
    ]
    generation = 0
    merge_events = []
    while len(lineages) > 1:
        if len(lineages) == 2:
            generation += int(rng_stream.geometric(1.0 / pop))
            (set_a, color_a), (set_b, color_b) = lineages
            color = _pair_color(color_a, color_b, x, rng_stream.random())
            merge_events.append((generation, (set_a, set_b), color))
            lineages = [(set_a | set_b, color)]
            break
        generation += 1
        parents = rng_stream.integers(0, pop, size=len(lineages))
        by_parent: dict[int, list[int]] = {}
        for child, parent in enumerate(parents):
            by_parent.setdefault(int(parent), []).append(child)
        survivors = []
        for parent in sorted(by_parent):
            children = by_parent[parent]
            if len(children) == 1:
                survivors.append(lineages[children[0]])
                continue
            order = rng_stream.permutation(len(children))
            merged_set, color = lineages[children[order[0]]]
            merged_sets = [merged_set]
            for position in order[1:]:
                other_set, other_color = lineages[children[position]]
                color = _pair_color(color, other_color, x, rng_stream.random())
                merged_set = merged_set | other_set
                merged_sets.append(other_set)
            merge_events.append((generation, tuple(merged_sets), color))
            survivors.append((merged_set, color))
        lineages = survivors
    root_set, root_color = lineages[0]
    assert root_set == frozenset(range(cfg.sample_size))
    return ColoredGenealogy(
        merge_events=tuple(merge_events),
        root_color=root_color,
        tmrca_generations=generation,
    )


def wf_experiment(cfg: WfConfig, x: float) -> WfReport:
    """Run all replicates and compare against the coalescent limit."""
    tmrca = np.empty(cfg.replicates)
    black = np.empty(cfg.replicates, dtype=bool)
    for i in range(cfg.replicates):
        genealogy = ancestral_recovery(cfg, x, replicate_stream(cfg.seed, i))
        tmrca[i] = genealogy.tmrca_generations
        black[i] = genealogy.root_color == BLACK
    scaled = tmrca / cfg.population
    freq_black = float(np.mean(black))
    n1 = sum(1 for c in cfg.initial_colors if c == BLACK)
    ref_white, ref_black = absorb_prob(n1, cfg.sample_size - n1, x)
    if cfg.replicates >= 2:
        stderr_scaled = float(scaled.std(ddof=1) / math.sqrt(cfg.replicates))
    else:
        stderr_scaled = math.nan
    return WfReport(
        population=cfg.population,
        sample_size=cfg.sample_size,
        x=x,
        replicates=cfg.replicates,
        seed=cfg.seed,
        mean_tmrca_generations=float(tmrca.mean()),
        mean_tmrca_coalescent=float(scaled.mean()),
        stderr_tmrca_coalescent=stderr_scaled,
        freq_root_black=freq_black,
        freq_root_white=1.0 - freq_black,
        stderr_root_black=math.sqrt(
            freq_black * (1.0 - freq_black) / cfg.replicates
        ),
        ref_time_any=expected_time_unconditional(cfg.sample_size),
        ref_root_black=ref_black,
    )


def parent_color_posterior(p, q, children: Sequence[str], prior_black):
    """Posterior (Pr parent B, Pr parent W) given observed child colors.

    Children of a B parent are independently B with probability p;
    children of a W parent are B with probability 1-q. Arithmetic follows
    the argument types, so Fraction inputs yield exact posteriors; the
    shared binomial coefficient cancels and is never computed.
    """
    for name, value in (("p", p), ("q", q), ("prior_black", prior_black)):
        if not 0 <= value <= 1:
            raise ValueError(f"{name} must lie in [0, 1], got {value}")
    colors = _check_colors(children)
    if not colors:
        raise ValueError("need at least one child")
    blacks = sum(1 for c in colors if c == BLACK)
    whites = len(colors) - blacks
    likelihood_black = p**blacks * (1 - p) ** whites
    likelihood_white = (1 - q) ** blacks * q**whites
    weight_black = prior_black * likelihood_black
    weight_white = (1 - prior_black) * likelihood_white
    total = weight_black + weight_white
    if total == 0:
        raise UndefinedPosteriorError(
            "children are impossible under both parent colors"
        )
    return (weight_black / total, weight_white / total)


def _stirling_partition_counts(j: int) -> list[int]:
    """Stirling numbers of the second kind S(j, 0..j), exact integers."""
    row = [1]
    for size in range(1, j + 1):
        prev = row
        row = [0] * (size + 1)
        for blocks in range(1, size + 1):
            row[blocks] = blocks * prev[blocks] if blocks < size else 0
            row[blocks] += prev[blocks - 1]
    return row


def lineage_count_kernel(population: int, max_lineages: int) -> np.ndarray:
    """One-generation transition matrix of the lineage count.

    Entry [j, i] is the probability that j lineages have exactly i
    distinct parents: S(j, i) * N(N-1)...(N-i+1) / N^j. Rows 0..max are
    indexed by count; rows for 0 and 1 lineages are absorbing.
    """
    if not 1 <= max_lineages <= population:
        raise ValueError(
            f"need 1 <= max lineages <= population, got "
            f"{max_lineages} and {population}"
        )
    kernel = np.zeros((max_lineages + 1, max_lineages + 1))
    kernel[0, 0] = 1.0
    kernel[1, 1] = 1.0
    for j in range(2, max_lineages + 1):
        stirling = _stirling_partition_counts(j)
        falling = 1
        denominator = population**j
        for i in range(1, j + 1):
            falling *= population - (i - 1)
            kernel[j, i] = stirling[i] * falling / denominator
    return kernel


def expected_tmrca_generations(population: int, sample_size: int) -> float:
    """Exact expected generations until one lineage remains.

    Fundamental-matrix expectation of the lineage-count chain; the
    deterministic finite-N reference that empirical tmrca means are
    tested against.
    """
    kernel = lineage_count_kernel(population, sample_size)
    transient = kernel[2:, 2:]
    expectations = solve_linear(
        np.eye(sample_size - 1) - transient, np.ones(sample_size - 1)
    )
    return float(expectations[-1])
