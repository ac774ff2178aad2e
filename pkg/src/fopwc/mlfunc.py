"""Two-parameter Mittag-Leffler functions for scalar and matrix arguments.

Evaluation is by the defining power series

    E_{alpha,beta}(Z) = sum_k Z^k / Gamma(alpha*k + beta)

truncated once the terms have started to decrease and the current term is
negligible against the partial sum.  No asymptotic expansions are used, so
arguments with large norm are rejected instead of silently losing digits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "MLOrder",
    "MLConvergenceError",
    "gamma_fn",
    "ml_scalar",
    "ml_matrix",
    "ml_matrix_action",
    "MAX_TERMS",
    "REL_STOP",
    "CANCELLATION_BUDGET",
]

#: hard cap on the number of series terms
MAX_TERMS = 500
#: stop once ``|term| < REL_STOP * |partial sum|`` in the decreasing regime
REL_STOP = 1e-16
#: largest tolerated ratio between the biggest term and max(1, |result|);
#: beyond this the float64 sum has lost more than ~8 significant digits
CANCELLATION_BUDGET = 1e8


class MLConvergenceError(ArithmeticError):
    """The series could not be summed to working precision."""

    def __init__(self, message: str, partial_sum, n_terms: int):
        super().__init__(message)
        self.partial_sum = partial_sum
        self.n_terms = n_terms


@dataclass(frozen=True)
class MLOrder:
    alpha: float
    beta: float = 1.0

    def __post_init__(self):
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise ValueError(f"alpha must be a finite positive number, got {self.alpha}")
        if not math.isfinite(self.beta):
            raise ValueError(f"beta must be finite, got {self.beta}")


def gamma_fn(x: float) -> float:
    """Gamma function; raises ``ValueError`` at the poles 0, -1, -2, ..."""
    x = float(x)
    if x <= 0 and x == math.floor(x):
        raise ValueError(f"Gamma has a pole at {x}")
    return math.gamma(x)


def _rgamma(x: float) -> float:
    # 1/Gamma, zero at the poles (the series terms vanish there)
    if x <= 0 and x == math.floor(x):
        return 0.0
    if x > 171.0:
        return math.exp(-math.lgamma(x))
    return 1.0 / math.gamma(x)


def _as_order(order) -> MLOrder:
    if isinstance(order, MLOrder):
        return order
    alpha, beta = order
    return MLOrder(float(alpha), float(beta))


def _sum_series(order: MLOrder, first, step, norm):
    """Sum ``sum_k term_k / Gamma(alpha k + beta)`` with ``term_{k+1} = step(term_k)``."""
    term = first
    total = first * _rgamma(order.beta)
    peak = norm(total)
    prev = peak
    decreasing = False
    for k in range(1, MAX_TERMS + 1):
        term = step(term)
        c = term * _rgamma(order.alpha * k + order.beta)
        size = norm(c)
        total = total + c
        peak = max(peak, size)
        if size <= prev:
            decreasing = True
        prev = size
        if decreasing and size <= REL_STOP * max(norm(total), 1e-300):
            break
        if decreasing and size == 0.0:
            break
    else:
        raise MLConvergenceError(
            f"Mittag-Leffler series did not converge in {MAX_TERMS} terms",
            total,
            MAX_TERMS + 1,
        )
    if peak > CANCELLATION_BUDGET * max(1.0, norm(total)):
        raise MLConvergenceError(
            f"argument outside the convergence budget (largest term {peak:.3e})",
            total,
            k + 1,
        )
    return total


def ml_scalar(order, z: float) -> float:
    """E_{alpha,beta}(z) for real ``z``.

    >>> round(ml_scalar((1.0, 1.0), 1.0), 12)
    2.718281828459
    """
    order = _as_order(order)
    z = float(z)
    if not math.isfinite(z):
        raise ValueError("z must be finite")
    return float(_sum_series(order, 1.0, lambda t: t * z, abs))


def ml_matrix(order, M, scale: float = 1.0) -> np.ndarray:
    """E_{alpha,beta}(scale * M) for a square matrix ``M``."""
    order = _as_order(order)
    A = np.asarray(M, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)) or not math.isfinite(scale):
        raise ValueError("matrix entries and scale must be finite")
    A = scale * A
    eye = np.eye(A.shape[0])
    return _sum_series(order, eye, lambda P: P @ A, lambda X: float(np.max(np.abs(X))))


def ml_matrix_action(order, M, v, scales) -> np.ndarray:
    """Rows ``E_{alpha,beta}(s * M) @ v`` for every ``s`` in ``scales``.

    Vectorised over ``scales``; the same stopping rule and budget are applied
    to each scale independently (via the column-wise max norm).
    """
    order = _as_order(order)
    A = np.asarray(M, dtype=float)
    v = np.asarray(v, dtype=float)
    s = np.atleast_1d(np.asarray(scales, dtype=float))
    # powers[k] = A^k v, built lazily
    out = np.outer(np.full(s.shape, _rgamma(order.beta)), v)
    power = v.copy()
    log_s = np.log(np.where(s == 0, 1.0, np.abs(s)))
    sign_s = np.sign(s)
    peak = np.abs(out).max(axis=1)
    prev = peak.copy()
    decreasing = np.zeros(s.shape, dtype=bool)
    done = np.zeros(s.shape, dtype=bool)
    for k in range(1, MAX_TERMS + 1):
        power = A @ power
        arg = order.alpha * k + order.beta
        if arg <= 0 and arg == math.floor(arg):
            coef = np.zeros_like(s)
        else:
            # s^k / Gamma(arg) in log space; Gamma > 0 for the orders used here
            coef = sign_s**k * np.exp(k * log_s - math.lgamma(arg))
            coef *= math.copysign(1.0, math.gamma(arg)) if arg < 171 else 1.0
            coef[s == 0] = 0.0
        c = np.outer(coef, power)
        size = np.abs(c).max(axis=1)
        out[~done] += c[~done]
        peak = np.maximum(peak, size)
        decreasing |= size <= prev
        prev = size
        norm_out = np.abs(out).max(axis=1)
        done |= decreasing & (size <= REL_STOP * np.maximum(norm_out, 1e-300))
        if done.all():
            break
    else:
        raise MLConvergenceError(
            f"Mittag-Leffler series did not converge in {MAX_TERMS} terms",
            out,
            MAX_TERMS + 1,
        )
    if np.any(peak > CANCELLATION_BUDGET * np.maximum(1.0, np.abs(out).max(axis=1))):
        raise MLConvergenceError(
            "argument outside the convergence budget", out, k + 1
        )
    return out
