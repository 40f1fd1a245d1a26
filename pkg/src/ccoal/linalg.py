"""Dense linear algebra helpers shared by the exact-analytics modules."""

from __future__ import annotations

import warnings

import numpy as np
import scipy.linalg
from scipy.linalg import lapack

_COND_LIMIT = 1e12
_POISSON_TAIL = 1e-13
# Uniformization term counts grow like q*t; keep q*t per stage below this
# and square the result back up so the Poisson weights never underflow.
_MAX_STAGE_MEAN = 64.0


class SingularMatrixError(ArithmeticError):
    """Coefficient matrix is singular or too ill conditioned to trust."""


def _as_square(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if a.size and not np.isfinite(a).all():
        raise ValueError("matrix entries must be finite")
    return a


def solve_linear(a, b) -> np.ndarray:
    """Solve a @ x = b by partial-pivoting LU factorization.

    Rejects systems whose 1-norm condition estimate exceeds 1e12 with
    SingularMatrixError; nothing downstream is allowed to consume a
    solution from such a system.
    """
    a = _as_square(a)
    b_arr = np.asarray(b, dtype=float)
    if b_arr.ndim not in (1, 2) or b_arr.shape[0] != a.shape[0]:
        raise ValueError(f"shape mismatch: a is {a.shape}, b is {b_arr.shape}")
    if not np.isfinite(b_arr).all():
        raise ValueError("right-hand side entries must be finite")
    a_norm = np.linalg.norm(a, 1) if a.size else 0.0
    with warnings.catch_warnings():
        # singular inputs are handled through the condition estimate below
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    rcond = lapack.dgecon(lu, a_norm, norm="1")[0]
    if not np.isfinite(rcond) or rcond * _COND_LIMIT <= 1.0:
        raise SingularMatrixError(
            f"matrix is singular or near-singular (rcond ~ {rcond:.3e})"
        )
    return scipy.linalg.lu_solve((lu, piv), b_arr, check_finite=False)


def _is_rate_matrix(a: np.ndarray) -> bool:
    """Nonnegative off diagonal and row sums <= 0 (generator/subgenerator)."""
    off = a - np.diag(np.diag(a))
    if (off < 0.0).any():
        return False
    scale = max(1.0, float(np.abs(a).max(initial=0.0)))
    return bool((a.sum(axis=1) <= 1e-12 * scale).all())


def _uniformized_exp(a: np.ndarray, t: float) -> np.ndarray:
    """e^{t a} for a rate matrix via uniformization.

    With q = max |a_ii| and P = I + a/q (entrywise nonnegative, row sums
    <= 1), e^{ta} = sum_k Poisson(qt)[k] P^k. Every term is nonnegative,
    so there is no cancellation, and truncating when the accumulated
    Poisson mass reaches 1 - 1e-13 bounds the error by the tail mass.
    Large qt is split as e^{ta} = (e^{(t/2^s) a})^{2^s} to keep the
    Poisson weights representable; squaring nonnegative substochastic
    matrices is stable.
    """
    q = float(np.max(-np.diag(a), initial=0.0))
    if q * t == 0.0:
        # zero generator or zero horizon
        return np.eye(a.shape[0])
    stages = 0
    mean = q * t
    while mean > _MAX_STAGE_MEAN:
        mean /= 2.0
        stages += 1
    p = np.eye(a.shape[0]) + a * (t / (2.0**stages) / mean)
    weight = np.exp(-mean)
    term = np.eye(a.shape[0])
    total = weight * term
    accumulated = weight
    k = 0
    # tighten the per-stage tail so s squarings cannot lift it past the bound
    tail_target = _POISSON_TAIL / (2.0**stages)
    while accumulated < 1.0 - tail_target:
        k += 1
        weight *= mean / k
        term = term @ p
        total += weight * term
        accumulated += weight
    for _ in range(stages):
        total = total @ total
    return total


def mat_exp(a, t: float = 1.0) -> np.ndarray:
    """Matrix exponential e^{t a}.

    Rate matrices (the only inputs the exact-analytics code exponentiates)
    go through uniformization, which keeps the result entrywise
    nonnegative and row-stochastic up to the 1e-13 truncation tail.
    Anything else falls back to scipy's Pade implementation.
    """
    a = _as_square(a)
    if not np.isfinite(t):
        raise ValueError(f"time must be finite, got {t}")
    if t == 0.0:
        return np.eye(a.shape[0])
    if t > 0.0 and _is_rate_matrix(a):
        return _uniformized_exp(a, float(t))
    return scipy.linalg.expm(a * float(t))
