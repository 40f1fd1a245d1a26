"""Figure-and-data bundles: render plots to files next to the CSV data.

The report path writes, into one directory:

* ccdf.csv / ccdf.png: closed-form coalescent-time CCDFs to the white
  and black roots (from an even start parity) against the
  matrix-exponential oracle, with an optional empirical overlay from a
  seeded conditional simulation;
* expected_times.csv / expected_times.png: expected colored and
  uncolored coalescent times, and the white-root absorption probability,
  as the sample size grows at the given color parameter.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from . import analytic
from ._output import render_csv
from .simulator import SimConfig, run_experiment
from .states import Parity

_TARGET_LABEL = {Parity.EVEN: "white root", Parity.ODD: "black root"}


def _ccdf_rows(n, x, ts, seed, replicates):
    columns = {"t": ts}
    curves = {}
    for target in (Parity.EVEN, Parity.ODD):
        mixture = analytic.ccdf_colored_time(n, Parity.EVEN, target, x)
        closed = mixture.value(ts)
        oracle = analytic.ccdf_matrix(n, x, Parity.EVEN, target, ts)
        key = "white" if target is Parity.EVEN else "black"
        columns[f"ccdf_{key}"] = closed
        columns[f"ccdf_{key}_oracle"] = oracle
        curves[target] = closed
    empirical = None
    if seed is not None:
        cfg = SimConfig(
            n=n,
            n1=0,
            x=x,
            replicates=replicates,
            seed=seed,
            mode="conditional",
            target=Parity.EVEN,
        )
        report = run_experiment(cfg, ccdf_grid=ts)
        empirical = np.array([v for _, v in report.empirical_ccdf])
        columns["ccdf_white_empirical"] = empirical
    rows = [
        {key: float(values[i]) for key, values in columns.items()}
        for i in range(ts.size)
    ]
    return rows, curves, empirical


def _ccdf_figure(path, n, x, ts, curves, oracle_stride, empirical):
    figure, axes = plt.subplots(figsize=(7.0, 4.5))
    for target, closed in curves.items():
        label = _TARGET_LABEL[target]
        (line,) = axes.plot(ts, closed, label=f"closed form, {label}")
        oracle = analytic.ccdf_matrix(
            n, x, Parity.EVEN, target, ts[::oracle_stride]
        )
        axes.plot(
            ts[::oracle_stride],
            oracle,
            linestyle="none",
            marker="o",
            markersize=3.5,
            color=line.get_color(),
            label=f"matrix oracle, {label}",
        )
    if empirical is not None:
        axes.plot(
            ts,
            empirical,
            linestyle=":",
            color="black",
            label="empirical, white root",
        )
    axes.set_xlabel("t")
    axes.set_ylabel("Pr{time to root >= t}")
    axes.set_title(f"Coalescent-time CCDFs, n={n}, x={x:g}, even start")
    axes.legend(frameon=False)
    figure.tight_layout()
    figure.savefig(path, dpi=150)
    plt.close(figure)


def _times_rows(n, x):
    rows = []
    for size in range(2, n + 1):
        e_white, e_black = analytic.expected_time_lumped(
            size, x, analytic.InitialParityDistribution.point_mass(Parity.EVEN)
        )
        p_white, _ = analytic.absorb_prob_lumped(
            size, x, analytic.InitialParityDistribution.point_mass(Parity.EVEN)
        )
        rows.append(
            {
                "n": size,
                "e_time_any": analytic.expected_time_unconditional(size),
                "e_time_white": e_white,
                "e_time_black": e_black,
                "p_white_root": p_white,
            }
        )
    return rows


def _times_figure(path, x, rows):
    sizes = [row["n"] for row in rows]
    figure, (left, right) = plt.subplots(1, 2, figsize=(9.0, 4.0))
    left.plot(sizes, [r["e_time_any"] for r in rows], label="either root")
    left.plot(sizes, [r["e_time_white"] for r in rows], label="white root")
    left.plot(sizes, [r["e_time_black"] for r in rows], label="black root")
    left.set_xlabel("sample size n")
    left.set_ylabel("expected time")
    left.set_title(f"Expected coalescent times, x={x:g}")
    left.legend(frameon=False)
    right.plot(sizes, [r["p_white_root"] for r in rows], color="tab:green")
    right.axhline(0.5, linestyle=":", color="gray")
    right.set_xlabel("sample size n")
    right.set_ylabel("Pr{white root}")
    right.set_title("Absorption probability, even start")
    figure.tight_layout()
    figure.savefig(path, dpi=150)
    plt.close(figure)


def generate_report(
    n: int,
    x: float,
    out_dir: str | Path,
    t_max: float = 10.0,
    t_step: float = 0.05,
    seed: int | None = None,
    replicates: int = 20000,
) -> list[Path]:
    """Write the figure/data bundle for (n, x) and return the file paths."""
    if t_step <= 0 or t_max <= 0:
        raise ValueError("time grid must have positive extent and step")
    directory = Path(out_dir)
    directory.mkdir(parents=True, exist_ok=True)
    ts = np.arange(0.0, t_max + 0.5 * t_step, t_step)

    ccdf_rows, curves, empirical = _ccdf_rows(n, x, ts, seed, replicates)
    times_rows = _times_rows(n, x)

    written = []
    path = directory / "ccdf.csv"
    path.write_text(render_csv(ccdf_rows), encoding="utf-8")
    written.append(path)
    path = directory / "ccdf.png"
    _ccdf_figure(path, n, x, ts, curves, max(1, ts.size // 25), empirical)
    written.append(path)
    path = directory / "expected_times.csv"
    path.write_text(render_csv(times_rows), encoding="utf-8")
    written.append(path)
    path = directory / "expected_times.png"
    _times_figure(path, x, times_rows)
    written.append(path)
    return written
