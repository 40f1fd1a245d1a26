"""Monte Carlo engines for the colored coalescent and its reductions.

Three modes share one sampling discipline so that scalar trajectories and
the batched experiment runner consume identical random numbers:

* full: the colored chain on (k, l), two uniforms per event (holding
  time, then move choice);
* lumped: the parity chain, two uniforms per event (holding time, then
  flip choice);
* conditional: the parity chain down to level 2 plus one final
  exponential into the chosen root, so 2(n-2) + 1 uniforms.

Replicate i draws from its own Philox stream keyed (seed, i). Streams
are independent of execution order, so serial and batched runs of the
same configuration produce bit-identical statistics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .generator import check_color_parameter
from .states import ColorState, Parity, ParityBlock, coalescence_rate

_MODES = ("full", "lumped", "conditional")

# destination offsets for the four moves out of (k, l), in the fixed
# order: BB merge, BW merge to B, BW/WW merge to W offsets are chosen so
# the same cumulative-threshold comparison picks the move in the scalar
# and batched paths
_DELTA_K = np.array([-2, -1, 0, 1])
_DELTA_L = np.array([1, 0, -1, -2])


@dataclass(frozen=True)
class SimConfig:
    """Parameters of one Monte Carlo experiment."""

    n: int
    n1: int
    x: float
    replicates: int
    seed: int
    mode: str = "full"
    target: Parity | None = None

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"sample size must be >= 2, got {self.n}")
        if not 0 <= self.n1 <= self.n:
            raise ValueError(f"need 0 <= n1 <= n, got n1={self.n1}, n={self.n}")
        check_color_parameter(self.x)
        if self.replicates < 1:
            raise ValueError(f"replicates must be >= 1, got {self.replicates}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")
        if self.mode not in _MODES:
            raise ValueError(f"mode must be one of {_MODES}, got {self.mode!r}")
        if self.mode == "conditional" and self.target is None:
            raise ValueError("conditional mode needs a target parity")

    @property
    def start_parity(self) -> Parity:
        return Parity.EVEN if self.n1 % 2 == 0 else Parity.ODD

    @property
    def start_state(self) -> ColorState:
        return ColorState(self.n1, self.n - self.n1)


@dataclass(frozen=True)
class Trajectory:
    """One sampled path: the state entered at each event time."""

    events: tuple[tuple[float, ColorState | ParityBlock], ...]
    absorbed_at: ColorState | ParityBlock
    total_time: float


@dataclass(frozen=True)
class SimReport:
    """Aggregated statistics of one experiment.

    Frequencies refer to the absorbing root: white is (0,1), the
    even-parity root; black is (1,0). Conditional-mode times to a root
    follow the conditional process, not the full process restricted to
    that absorption event, so mean_time_white here is comparable to
    expected_colored_time only in conditional mode.
    """

    freq_white_root: float
    freq_black_root: float
    mean_time_any: float
    mean_time_white: float
    mean_time_black: float
    stderr_freq_white: float
    stderr_time_any: float
    stderr_time_white: float
    stderr_time_black: float
    seed: int
    replicates: int
    empirical_ccdf: tuple[tuple[float, float], ...] | None = None
    parity_after_events: tuple[tuple[int, float, float], ...] | None = None


def replicate_stream(seed: int, index: int) -> np.random.Generator:
    """Independent generator for replicate `index` of a seeded experiment."""
    key = np.array([seed, index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _hold(u: float | np.ndarray, rate: float | np.ndarray):
    """Exponential holding time by inverse CDF, shared by both paths."""
    return -np.log1p(-u) / rate


def _move_thresholds(k, l, x: float):
    """Cumulative move-rate thresholds c1 <= c2 <= c3 out of (k, l).

    Works elementwise on integer arrays. The move picked by a uniform
    v in [0, total) is (v >= c1) + (v >= c2) + (v >= c3); zero-rate moves
    get empty intervals and are never picked.
    """
    xbar = 1.0 - x
    pairs_b = k * (k - 1) // 2
    pairs_w = l * (l - 1) // 2
    mixed = k * l
    c1 = xbar * pairs_b
    c2 = c1 + (x * pairs_b + x * mixed)
    c3 = c2 + (xbar * pairs_w + xbar * mixed)
    return c1, c2, c3


def simulate_path(cfg: SimConfig, rng_stream: np.random.Generator) -> Trajectory:
    """Sample one trajectory of the full colored chain."""
    if cfg.mode != "full":
        raise ValueError(f"simulate_path needs mode='full', got {cfg.mode!r}")
    k, l = cfg.n1, cfg.n - cfg.n1
    t = 0.0
    events = []
    for level in range(cfg.n, 1, -1):
        total = float(coalescence_rate(level))
        t += float(_hold(rng_stream.random(), total))
        v = rng_stream.random() * total
        c1, c2, c3 = _move_thresholds(k, l, cfg.x)
        move = int(v >= c1) + int(v >= c2) + int(v >= c3)
        k += int(_DELTA_K[move])
        l += int(_DELTA_L[move])
        events.append((t, ColorState(k, l)))
    return Trajectory(events=tuple(events), absorbed_at=ColorState(k, l), total_time=t)


def simulate_lumped(cfg: SimConfig, rng_stream: np.random.Generator) -> Trajectory:
    """Sample one trajectory of the parity chain."""
    if cfg.mode != "lumped":
        raise ValueError(f"simulate_lumped needs mode='lumped', got {cfg.mode!r}")
    parity = cfg.start_parity
    t = 0.0
    events = []
    for level in range(cfg.n, 1, -1):
        total = float(coalescence_rate(level))
        t += float(_hold(rng_stream.random(), total))
        if rng_stream.random() >= 1.0 - cfg.x:
            parity = parity.flipped()
        events.append((t, ParityBlock(level - 1, parity)))
    return Trajectory(
        events=tuple(events),
        absorbed_at=ParityBlock(1, parity),
        total_time=t,
    )


def simulate_conditional(cfg: SimConfig, rng_stream: np.random.Generator) -> Trajectory:
    """Sample one conditional-process time to the configured target root."""
    if cfg.mode != "conditional":
        raise ValueError(
            f"simulate_conditional needs mode='conditional', got {cfg.mode!r}"
        )
    target = cfg.target
    assert target is not None
    parity = cfg.start_parity
    t = 0.0
    events = []
    for level in range(cfg.n, 2, -1):
        total = float(coalescence_rate(level))
        t += float(_hold(rng_stream.random(), total))
        if rng_stream.random() >= 1.0 - cfg.x:
            parity = parity.flipped()
        events.append((t, ParityBlock(level - 1, parity)))
    r2 = float(coalescence_rate(2))
    rate = (1.0 - cfg.x) * r2 if parity is target else cfg.x * r2
    t += float(_hold(rng_stream.random(), rate))
    events.append((t, ParityBlock(1, target)))
    return Trajectory(
        events=tuple(events),
        absorbed_at=ParityBlock(1, target),
        total_time=t,
    )


def _uniform_tape(cfg: SimConfig, columns: int) -> np.ndarray:
    """Stack each replicate's first `columns` uniforms into one matrix."""
    tape = np.empty((cfg.replicates, columns))
    for i in range(cfg.replicates):
        tape[i] = replicate_stream(cfg.seed, i).random(columns)
    return tape


def _batch_sample(cfg: SimConfig, parity_events: Sequence[int] | None):
    """Vectorized replicates: (times, root_is_white, parity snapshots).

    Consumes uniforms in exactly the per-trajectory order, so results are
    bit-identical to running the scalar samplers replicate by replicate.
    """
    n, x = cfg.n, cfg.x
    wanted = set(parity_events or ())
    snapshots = []
    times = np.zeros(cfg.replicates)

    if cfg.mode == "full":
        tape = _uniform_tape(cfg, 2 * (n - 1))
        k = np.full(cfg.replicates, cfg.n1, dtype=np.int64)
        l = np.full(cfg.replicates, n - cfg.n1, dtype=np.int64)
        for j, level in enumerate(range(n, 1, -1)):
            total = float(coalescence_rate(level))
            times += _hold(tape[:, 2 * j], total)
            v = tape[:, 2 * j + 1] * total
            c1, c2, c3 = _move_thresholds(k, l, x)
            move = (v >= c1).astype(np.int64) + (v >= c2) + (v >= c3)
            k += _DELTA_K[move]
            l += _DELTA_L[move]
            if j + 1 in wanted:
                snapshots.append((j + 1, float(np.mean(k % 2 == 0))))
        white = k == 0
        return times, white, snapshots

    parity = np.full(cfg.replicates, cfg.start_parity.value, dtype=np.int64)
    if cfg.mode == "lumped":
        tape = _uniform_tape(cfg, 2 * (n - 1))
        for j, level in enumerate(range(n, 1, -1)):
            total = float(coalescence_rate(level))
            times += _hold(tape[:, 2 * j], total)
            parity ^= tape[:, 2 * j + 1] >= 1.0 - x
            if j + 1 in wanted:
                snapshots.append((j + 1, float(np.mean(parity == 0))))
        white = parity == 0
        return times, white, snapshots

    target = cfg.target
    assert target is not None
    tape = _uniform_tape(cfg, 2 * (n - 2) + 1)
    for j, level in enumerate(range(n, 2, -1)):
        total = float(coalescence_rate(level))
        times += _hold(tape[:, 2 * j], total)
        parity ^= tape[:, 2 * j + 1] >= 1.0 - x
        if j + 1 in wanted:
            snapshots.append((j + 1, float(np.mean(parity == 0))))
    r2 = float(coalescence_rate(2))
    rate = np.where(parity == target.value, (1.0 - x) * r2, x * r2)
    times += _hold(tape[:, 2 * (n - 2)], rate)
    white = np.full(cfg.replicates, target is Parity.EVEN)
    return times, white, snapshots


def _mean_and_stderr(values: np.ndarray) -> tuple[float, float]:
    if values.size == 0:
        return math.nan, math.nan
    if values.size == 1:
        return float(values[0]), math.nan
    return (
        float(values.mean()),
        float(values.std(ddof=1) / math.sqrt(values.size)),
    )


def run_experiment(
    cfg: SimConfig,
    ccdf_grid: Sequence[float] | None = None,
    parity_events: Sequence[int] | None = None,
) -> SimReport:
    """Run all replicates of cfg and aggregate them into a SimReport.

    ccdf_grid, if given, adds the empirical CCDF of the total time at
    those points; parity_events adds the even/odd frequencies observed
    right after the listed event counts.
    """
    times, white, snapshots = _batch_sample(cfg, parity_events)
    reps = cfg.replicates
    freq_white = float(np.mean(white))
    stderr_freq = math.sqrt(freq_white * (1.0 - freq_white) / reps)
    mean_any, se_any = _mean_and_stderr(times)
    mean_white, se_white = _mean_and_stderr(times[white])
    mean_black, se_black = _mean_and_stderr(times[~white])

    empirical_ccdf = None
    if ccdf_grid is not None:
        grid = np.asarray(ccdf_grid, dtype=float)
        ordered = np.sort(times)
        below = np.searchsorted(ordered, grid, side="left")
        empirical_ccdf = tuple(
            (float(t), float((reps - b) / reps)) for t, b in zip(grid, below)
        )

    parity_after = None
    if parity_events is not None:
        parity_after = tuple(
            (count, freq_even, 1.0 - freq_even) for count, freq_even in snapshots
        )

    return SimReport(
        freq_white_root=freq_white,
        freq_black_root=1.0 - freq_white,
        mean_time_any=mean_any,
        mean_time_white=mean_white,
        mean_time_black=mean_black,
        stderr_freq_white=stderr_freq,
        stderr_time_any=se_any,
        stderr_time_white=se_white,
        stderr_time_black=se_black,
        seed=cfg.seed,
        replicates=reps,
        empirical_ccdf=empirical_ccdf,
        parity_after_events=parity_after,
    )
