"""Fractional Adams-Bashforth-Moulton predictor-corrector for Caputo IVPs.

Solves ``D^q x = f(x)``, ``x(0) = x0`` with ``0 < q <= 1`` on a uniform grid
``t_k = k h``.  The predictor is the fractional rectangle rule and the
corrector the fractional trapezoidal rule; ``corrector_iters`` corrector
passes give the P(EC)^m scheme.

The history sums are evaluated directly, so a run of ``N`` steps costs
``O(N^2)``.  All convolution weights are tabulated once per run, which keeps
the per-step work to two dot products against the derivative history.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

__all__ = [
    "FDEProblem",
    "Trajectory",
    "AbmWeights",
    "IntegrationError",
    "abm_weights",
    "abm_integrate",
    "grid_size",
    "AbmKernel",
]

Rhs = Callable[[np.ndarray], np.ndarray]


class IntegrationError(FloatingPointError):
    """A non-finite state was produced during integration."""

    def __init__(self, message: str, step: int):
        super().__init__(message)
        self.step = step


def grid_size(t_end: float, h: float) -> int:
    """Number of steps ``floor(t_end / h)``, robust to round-off in the ratio."""
    ratio = t_end / h
    n = math.floor(ratio)
    if math.isclose(ratio, n + 1, rel_tol=1e-12, abs_tol=0.0):
        n += 1
    return n


@dataclass
class FDEProblem:
    q: float
    rhs: Rhs
    x0: np.ndarray
    t_end: float
    h: float

    def __post_init__(self):
        self.x0 = np.atleast_1d(np.asarray(self.x0, dtype=float)).copy()
        if not (0.0 < self.q <= 1.0):
            raise ValueError(f"fractional order must lie in (0, 1], got {self.q}")
        if not self.h > 0:
            raise ValueError(f"step size must be positive, got {self.h}")
        if not self.t_end > 0:
            raise ValueError(f"horizon must be positive, got {self.t_end}")
        if self.h > self.t_end:
            raise ValueError("step size exceeds the horizon")
        if not np.all(np.isfinite(self.x0)):
            raise ValueError("initial state must be finite")


@dataclass
class Trajectory:
    """Uniform-grid solution: ``states[k]`` approximates ``x(times[k])``."""

    times: np.ndarray
    states: np.ndarray
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.times)

    @property
    def h(self) -> float:
        return float(self.times[1] - self.times[0]) if len(self.times) > 1 else 0.0

    def component(self, i: int) -> np.ndarray:
        return self.states[:, i]


class AbmWeights(NamedTuple):
    predictor: np.ndarray
    corrector: np.ndarray


def abm_weights(step_index: int, q: float, h: float) -> AbmWeights:
    """Quadrature weights used to advance from step ``n`` to ``n + 1``.

    ``predictor[j] = h^q/q * ((n+1-j)^q - (n-j)^q)`` for ``j = 0..n``.
    ``corrector[j]`` for ``j = 0..n+1`` are the fractional trapezoidal weights
    ``h^q/(q(q+1)) * a_j``; the last entry multiplies the predicted value.
    Neither array includes the ``1/Gamma(q)`` factor.
    """
    n = int(step_index)
    if n < 0:
        raise ValueError("step_index must be non-negative")
    if not (0.0 < q <= 1.0) or not h > 0:
        raise ValueError("need 0 < q <= 1 and h > 0")
    j = np.arange(n + 1, dtype=float)
    pred = h**q / q * ((n + 1 - j) ** q - (n - j) ** q)

    corr = np.empty(n + 2)
    q1 = q + 1.0
    corr[0] = n**q1 - (n - q) * (n + 1) ** q
    if n >= 1:
        k = n - j[1:]
        corr[1 : n + 1] = (k + 2) ** q1 + k**q1 - 2.0 * (k + 1) ** q1
    corr[n + 1] = 1.0
    corr *= h**q / (q * q1)
    return AbmWeights(pred, corr)


class AbmKernel:
    """Tabulated lag weights for a whole run of ``n_steps`` steps.

    ``pred_lag[k]`` multiplies ``f_j`` with ``k = n - j`` in the predictor,
    ``corr_lag[k]`` multiplies ``f_j`` (``1 <= j <= n``) in the corrector and
    ``corr_first[n]`` multiplies ``f_0``.  All include ``1/Gamma(q)``.
    """

    def __init__(self, q: float, h: float, n_steps: int):
        self.q, self.h, self.n_steps = q, h, n_steps
        k = np.arange(n_steps + 2, dtype=float)
        q1 = q + 1.0
        cp = h**q / math.gamma(q + 1.0)
        cc = h**q / math.gamma(q + 2.0)
        self.pred_lag = cp * ((k + 1) ** q - k**q)
        self.corr_lag = cc * ((k + 2) ** q1 + k**q1 - 2.0 * (k + 1) ** q1)
        self.corr_first = cc * (k**q1 - (k - q) * (k + 1) ** q)
        self.corr_self = cc
        # reversed copies so history dot products read contiguous slices
        self._pred_rev = self.pred_lag[::-1].copy()
        self._corr_rev = self.corr_lag[::-1].copy()

    def predictor_sum(self, F: np.ndarray, n: int) -> np.ndarray:
        """sum_{j=0}^{n} pred_lag[n-j] F[j]"""
        m = len(self._pred_rev)
        return self._pred_rev[m - n - 1 :] @ F[: n + 1]

    def corrector_sum(self, F: np.ndarray, n: int) -> np.ndarray:
        """Explicit part of the corrector: f_0 and f_1..f_n terms."""
        out = self.corr_first[n] * F[0]
        if n >= 1:
            m = len(self._corr_rev)
            out = out + self._corr_rev[m - n :] @ F[1 : n + 1]
        return out


def abm_integrate(problem: FDEProblem, corrector_iters: int = 1) -> Trajectory:
    """Integrate ``problem`` with the fractional P(EC)^m ABM scheme.

    Raises :class:`IntegrationError` with the offending step index if the
    state stops being finite.
    """
    if corrector_iters < 1:
        raise ValueError("corrector_iters must be at least 1")
    q, h, f = problem.q, problem.h, problem.rhs
    x0 = problem.x0
    n_steps = grid_size(problem.t_end, h)
    kernel = AbmKernel(q, h, n_steps)

    X = np.empty((n_steps + 1, x0.size))
    F = np.empty_like(X)
    X[0] = x0
    F[0] = f(x0)
    if not np.all(np.isfinite(F[0])):
        raise IntegrationError("non-finite derivative at the initial state", 0)

    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(n_steps):
            xp = x0 + kernel.predictor_sum(F, n)
            explicit = x0 + kernel.corrector_sum(F, n)
            for _ in range(corrector_iters):
                xp = explicit + kernel.corr_self * f(xp)
            fx = f(xp)
            if not (np.all(np.isfinite(xp)) and np.all(np.isfinite(fx))):
                raise IntegrationError(f"non-finite state at step {n + 1}", n + 1)
            X[n + 1] = xp
            F[n + 1] = fx

    times = np.arange(n_steps + 1) * h
    return Trajectory(times, X, {"q": q, "h": h, "corrector_iters": corrector_iters})
