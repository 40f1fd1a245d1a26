"""Command-line front end for the colored coalescent toolkit.

Subcommands: exact, ccdf, simulate, lump-check, wf, sweep, report.
Results go to stdout (or --out FILE) as a table, CSV, or JSON; exit
status is 0 on success, 2 on a usage error, 1 on a computation error.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

import numpy as np

from . import analytic, report
from ._output import emit
from .generator import absorption_probabilities_exact, build_generator, jump_matrix
from .linalg import mat_exp
from .lumping import check_lumpable, lump, parity_partition, uv_matrices
from .simulator import SimConfig, run_experiment
from .states import Parity
from .wright_fisher import BLACK, WHITE, WfConfig, wf_experiment


class UsageError(Exception):
    """Invalid flag combination or malformed flag value."""


def _parse_parity(text: str) -> Parity:
    try:
        return Parity[text.upper()]
    except KeyError:
        raise UsageError(f"parity must be 'even' or 'odd', got {text!r}") from None


def _parse_start(text: str, n: int) -> tuple[int, int]:
    parts = text.split(",")
    try:
        n1, n2 = (int(p) for p in parts)
    except ValueError:
        raise UsageError(f"--start must look like 'n1,n2', got {text!r}") from None
    if n1 < 0 or n2 < 0 or n1 + n2 != n:
        raise UsageError(
            f"--start {text!r} is not a split of the sample size {n}"
        )
    return n1, n2


def _parse_time_grid(text: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"grid must look like 'start:stop:step', got {text!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise UsageError(f"grid must be numeric, got {text!r}") from None
    if step <= 0 or stop < start or start < 0:
        raise UsageError(f"grid {text!r} needs 0 <= start <= stop and step > 0")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(count)


def _parse_int_range(text: str) -> range:
    parts = text.split(":")
    if len(parts) not in (2, 3):
        raise UsageError(
            f"range must look like 'start:stop[:step]', got {text!r}"
        )
    try:
        numbers = [int(p) for p in parts]
    except ValueError:
        raise UsageError(f"range must be integer, got {text!r}") from None
    step = numbers[2] if len(numbers) == 3 else 1
    if step <= 0 or numbers[1] < numbers[0]:
        raise UsageError(f"range {text!r} needs start <= stop and step > 0")
    return range(numbers[0], numbers[1] + 1, step)


def _parse_float_list(text: str) -> list[float]:
    try:
        return [float(p) for p in text.split(",")]
    except ValueError:
        raise UsageError(f"expected comma-separated reals, got {text!r}") from None


def _exact_row(n1: int, n2: int, x: float) -> dict[str, object]:
    n = n1 + n2
    summary = analytic.colored_time_summary(n1, n2, x)
    start = Parity.EVEN if n1 % 2 == 0 else Parity.ODD
    row = absorption_probabilities_exact(n, x)[n1]
    resid_absorb = max(
        abs(summary.p_white_root - row[0]), abs(summary.p_black_root - row[1])
    )
    resid_white = abs(
        summary.e_time_white - analytic.expected_time_matrix(n, x, start, Parity.EVEN)
    )
    resid_black = abs(
        summary.e_time_black - analytic.expected_time_matrix(n, x, start, Parity.ODD)
    )
    return {
        "n": n,
        "n1": n1,
        "n2": n2,
        "x": x,
        "p_white_root": summary.p_white_root,
        "p_black_root": summary.p_black_root,
        "e_time_white": summary.e_time_white,
        "e_time_black": summary.e_time_black,
        "e_time_any": summary.e_time_any,
        "resid_absorb": resid_absorb,
        "resid_time_white": resid_white,
        "resid_time_black": resid_black,
    }


def _cmd_exact(args) -> None:
    n1, n2 = _parse_start(args.start, args.n)
    rows = [_exact_row(n1, n2, args.x)]
    emit(rows, {"command": "exact", "n": args.n, "n1": n1, "n2": n2, "x": args.x},
         args.format, args.out)


def _cmd_ccdf(args) -> None:
    ts = _parse_time_grid(args.t_grid)
    start = _parse_parity(args.start_parity)
    target = _parse_parity(args.target_parity)
    mixture = analytic.ccdf_colored_time(
        args.n, start, target, args.x,
        uncorrected_odd_start=args.uncorrected_odd_start,
    )
    closed = mixture.value(ts)
    oracle = analytic.ccdf_matrix(args.n, args.x, start, target, ts)
    rows = [
        {
            "t": float(t),
            "ccdf_closed_form": float(c),
            "ccdf_matrix_oracle": float(o),
            "abs_diff": abs(float(c) - float(o)),
        }
        for t, c, o in zip(ts, closed, oracle)
    ]
    params = {
        "command": "ccdf",
        "n": args.n,
        "x": args.x,
        "start_parity": start.name.lower(),
        "target_parity": target.name.lower(),
        "t_grid": args.t_grid,
        "uncorrected_odd_start": args.uncorrected_odd_start,
    }
    emit(rows, params, args.format, args.out)


def _cmd_simulate(args) -> None:
    n1, n2 = _parse_start(args.start, args.n)
    target = _parse_parity(args.target) if args.target else None
    if args.mode == "conditional" and target is None:
        raise UsageError("conditional mode needs --target even|odd")
    cfg = SimConfig(
        n=args.n, n1=n1, x=args.x, replicates=args.reps,
        seed=args.seed, mode=args.mode, target=target,
    )
    result = run_experiment(cfg)
    row = {
        "n": args.n,
        "n1": n1,
        "x": args.x,
        "mode": args.mode,
        "target": target.name.lower() if target else None,
        "replicates": result.replicates,
        "seed": result.seed,
        "freq_white_root": result.freq_white_root,
        "freq_black_root": result.freq_black_root,
        "mean_time_any": result.mean_time_any,
        "mean_time_white": result.mean_time_white,
        "mean_time_black": result.mean_time_black,
        "stderr_freq_white": result.stderr_freq_white,
        "stderr_time_any": result.stderr_time_any,
        "stderr_time_white": result.stderr_time_white,
        "stderr_time_black": result.stderr_time_black,
    }
    params = {
        "command": "simulate", "n": args.n, "n1": n1, "x": args.x,
        "mode": args.mode, "target": target.name.lower() if target else None,
        "replicates": args.reps, "seed": args.seed,
    }
    emit([row], params, args.format, args.out)


def _cmd_lump_check(args) -> None:
    times = _parse_float_list(args.t) if args.t else []
    if any(t < 0 for t in times):
        raise UsageError("--t values must be nonnegative")
    g = build_generator(args.n, args.x)
    partition = parity_partition(g.space)
    generator_report = check_lumpable(g.matrix, partition, kind="generator")
    lumped = lump(g.matrix, partition, kind="generator")
    rows: list[dict[str, object]] = [
        {
            "n": args.n,
            "x": args.x,
            "check": "generator_lumpability",
            "t": None,
            "residual": generator_report.max_violation,
        }
    ]
    u, v = uv_matrices(partition, g.space.size)
    for t in times:
        residual = float(
            np.max(np.abs(u @ mat_exp(g.matrix, t) @ v - mat_exp(lumped, t)))
        )
        rows.append(
            {"n": args.n, "x": args.x, "check": "semigroup", "t": t,
             "residual": residual}
        )
    jump_then_lump = lump(jump_matrix(g.matrix), partition, kind="stochastic")
    lump_then_jump = jump_matrix(lumped)
    rows.append(
        {
            "n": args.n,
            "x": args.x,
            "check": "jump_commutes_with_lump",
            "t": None,
            "residual": float(np.max(np.abs(jump_then_lump - lump_then_jump))),
        }
    )
    params = {"command": "lump-check", "n": args.n, "x": args.x, "t": args.t}
    emit(rows, params, args.format, args.out)


def _cmd_wf(args) -> None:
    if args.colors is not None:
        colors = tuple(args.colors.upper())
    else:
        colors = tuple(BLACK if i % 2 == 0 else WHITE for i in range(args.n))
    cfg = WfConfig(
        population=args.pop,
        sample_size=args.n,
        initial_colors=colors,
        replicates=args.reps,
        seed=args.seed,
    )
    result = wf_experiment(cfg, args.x)
    row = {
        "population": result.population,
        "n": result.sample_size,
        "x": result.x,
        "colors": "".join(colors),
        "replicates": result.replicates,
        "seed": result.seed,
        "mean_tmrca_generations": result.mean_tmrca_generations,
        "mean_tmrca_coalescent": result.mean_tmrca_coalescent,
        "stderr_tmrca_coalescent": result.stderr_tmrca_coalescent,
        "freq_root_black": result.freq_root_black,
        "freq_root_white": result.freq_root_white,
        "stderr_root_black": result.stderr_root_black,
        "ref_time_any": result.ref_time_any,
        "ref_root_black": result.ref_root_black,
    }
    params = {
        "command": "wf", "pop": args.pop, "n": args.n, "x": args.x,
        "colors": "".join(colors), "replicates": args.reps, "seed": args.seed,
    }
    emit([row], params, args.format, args.out)


def _cmd_sweep(args) -> None:
    sizes = _parse_int_range(args.n_range)
    if sizes.start < 2:
        raise UsageError("sweep sample sizes must start at 2 or above")
    xs = _parse_float_list(args.x)
    start = _parse_parity(args.start_parity)
    rows = []
    for n in sizes:
        n1 = 0 if start is Parity.EVEN else 1
        for x in xs:
            base = _exact_row(n1, n - n1, x)
            rows.append(
                {
                    "n": n,
                    "x": x,
                    "start_parity": start.name.lower(),
                    "p_white_root": base["p_white_root"],
                    "p_black_root": base["p_black_root"],
                    "e_time_white": base["e_time_white"],
                    "e_time_black": base["e_time_black"],
                    "e_time_any": base["e_time_any"],
                    "resid_absorb": base["resid_absorb"],
                    "resid_time_max": max(
                        base["resid_time_white"], base["resid_time_black"]
                    ),
                }
            )
    params = {
        "command": "sweep", "n_range": args.n_range, "x": args.x,
        "start_parity": start.name.lower(),
    }
    emit(rows, params, args.format, args.out)


def _cmd_report(args) -> None:
    written = report.generate_report(
        n=args.n,
        x=args.x,
        out_dir=args.out_dir,
        t_max=args.t_max,
        t_step=args.t_step,
        seed=args.seed,
        replicates=args.reps,
    )
    for path in written:
        sys.stdout.write(f"wrote {path}\n")


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--format", choices=("csv", "json", "table"), default="table"
    )
    parser.add_argument("--out", default=None, metavar="FILE")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ccoal",
        description="Exact analytics and simulation for the two-color coalescent.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exact", help="closed-form absorption and time summary")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--start", required=True, metavar="N1,N2")
    _add_common(p)
    p.set_defaults(handler=_cmd_exact)

    p = sub.add_parser("ccdf", help="coalescent-time CCDF with matrix oracle")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--start-parity", required=True, metavar="even|odd")
    p.add_argument("--target-parity", required=True, metavar="even|odd")
    p.add_argument("--t-grid", required=True, metavar="START:STOP:STEP")
    p.add_argument("--uncorrected-odd-start", action="store_true")
    _add_common(p)
    p.set_defaults(handler=_cmd_ccdf)

    p = sub.add_parser("simulate", help="Monte Carlo experiment")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--start", required=True, metavar="N1,N2")
    p.add_argument("--reps", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--mode", choices=("full", "lumped", "conditional"),
                   default="full")
    p.add_argument("--target", default=None, metavar="even|odd")
    _add_common(p)
    p.set_defaults(handler=_cmd_simulate)

    p = sub.add_parser("lump-check", help="parity-lumping residuals")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--t", default=None, metavar="T1,T2,...")
    _add_common(p)
    p.set_defaults(handler=_cmd_lump_check)

    p = sub.add_parser("wf", help="Wright-Fisher backward sampling")
    p.add_argument("--pop", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--reps", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--colors", default=None, metavar="BWBW...")
    _add_common(p)
    p.set_defaults(handler=_cmd_wf)

    p = sub.add_parser("sweep", help="closed forms over an (n, x) grid")
    p.add_argument("--n-range", required=True, metavar="START:STOP[:STEP]")
    p.add_argument("--x", required=True, metavar="X1,X2,...")
    p.add_argument("--start-parity", default="even", metavar="even|odd")
    _add_common(p)
    p.set_defaults(handler=_cmd_sweep)

    p = sub.add_parser("report", help="render figures plus CSV data files")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--t-max", type=float, default=10.0)
    p.add_argument("--t-step", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--reps", type=int, default=20000)
    p.set_defaults(handler=_cmd_report)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.handler(args)
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"computation failed: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
