"""Continuous replacements for ``sgn`` and ``|.|``.

* ``Global(delta)``: logistic sigmoid ``2/(1+exp(-x/delta)) - 1`` on the whole line.
* ``Local(epsilon)``: the cubic ``-x^3/(2 eps^3) + 3x/(2 eps)`` on ``[-eps, eps]``,
  glued with matching value and slope to ``sgn`` outside.
* ``Quadratic(epsilon)`` for the modulus: ``x^2/(2 eps) + eps/2`` on
  ``[-eps, eps]``, ``|x|`` outside.

``Exact`` keeps the original nonsmooth function, with ``sgn(0) = 0``.

All evaluators accept floats or numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "Exact",
    "Global",
    "Local",
    "Quadratic",
    "SgnApprox",
    "AbsApprox",
    "sgn_eval",
    "sgn_deriv",
    "abs_eval",
    "abs_deriv",
    "graph_containment_check",
    "distance_to_sgn_graph",
    "scalar_sgn",
    "scalar_sgn_deriv",
    "scalar_abs",
    "scalar_abs_deriv",
]


@dataclass(frozen=True)
class Exact:
    pass


@dataclass(frozen=True)
class Global:
    delta: float

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError(f"delta must be positive, got {self.delta}")


@dataclass(frozen=True)
class Local:
    epsilon: float

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")


@dataclass(frozen=True)
class Quadratic:
    epsilon: float

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")


SgnApprox = Union[Exact, Global, Local]
AbsApprox = Union[Exact, Quadratic]


def _ret(x, out):
    return float(out) if np.ndim(x) == 0 else out


def sgn_eval(approx: SgnApprox, x):
    x_arr = np.asarray(x, dtype=float)
    if isinstance(approx, Exact):
        out = np.sign(x_arr)
    elif isinstance(approx, Global):
        # logistic form evaluated on |x| so that oddness holds bit-for-bit
        e = np.exp(-np.abs(x_arr) / approx.delta)
        out = np.sign(x_arr) * (2.0 / (1.0 + e) - 1.0)
    elif isinstance(approx, Local):
        eps = approx.epsilon
        u = x_arr / eps
        out = np.where(np.abs(x_arr) <= eps, 0.5 * u * (3.0 - u * u), np.sign(x_arr))
    else:
        raise TypeError(f"unknown sgn approximation {approx!r}")
    return _ret(x, out)


def sgn_deriv(approx: SgnApprox, x):
    x_arr = np.asarray(x, dtype=float)
    if isinstance(approx, Global):
        e = np.exp(-np.abs(x_arr) / approx.delta)
        out = 2.0 * e / (approx.delta * (1.0 + e) ** 2)
    elif isinstance(approx, Local):
        eps = approx.epsilon
        u = x_arr / eps
        out = np.where(np.abs(x_arr) <= eps, 1.5 * (1.0 - u * u) / eps, 0.0)
    elif isinstance(approx, Exact):
        raise ValueError("the exact sign function has no derivative at 0; use Global or Local")
    else:
        raise TypeError(f"unknown sgn approximation {approx!r}")
    return _ret(x, out)


def abs_eval(approx: AbsApprox, x):
    x_arr = np.asarray(x, dtype=float)
    if isinstance(approx, Exact):
        out = np.abs(x_arr)
    elif isinstance(approx, Quadratic):
        eps = approx.epsilon
        out = np.where(np.abs(x_arr) <= eps, x_arr * x_arr / (2.0 * eps) + 0.5 * eps, np.abs(x_arr))
    else:
        raise TypeError(f"unknown modulus approximation {approx!r}")
    return _ret(x, out)


def abs_deriv(approx: AbsApprox, x):
    """Derivative of :func:`abs_eval`; ``Exact`` uses ``sign(x)`` (0 at 0)."""
    x_arr = np.asarray(x, dtype=float)
    if isinstance(approx, Exact):
        out = np.sign(x_arr)
    elif isinstance(approx, Quadratic):
        eps = approx.epsilon
        out = np.where(np.abs(x_arr) <= eps, x_arr / eps, np.sign(x_arr))
    else:
        raise TypeError(f"unknown modulus approximation {approx!r}")
    return _ret(x, out)


def distance_to_sgn_graph(x, v):
    """Euclidean distance from points ``(x, v)`` to the graph of set-valued Sgn.

    The graph is the union of ``(-inf, 0] x {-1}``, ``{0} x [-1, 1]`` and
    ``[0, inf) x {1}``.
    """
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    d_seg = np.hypot(x, np.clip(np.abs(v) - 1.0, 0.0, None))
    d_pos = np.hypot(np.clip(-x, 0.0, None), v - 1.0)
    d_neg = np.hypot(np.clip(x, 0.0, None), v + 1.0)
    return np.minimum(d_seg, np.minimum(d_pos, d_neg))


def graph_containment_check(approx: SgnApprox, neighborhood: float, n_samples: int = 100_000) -> bool:
    """True iff every sampled graph point of ``approx`` lies within
    ``neighborhood`` of the graph of set-valued Sgn.

    Samples ``n_samples`` uniform points on ``[-L, L]`` with
    ``L = 10 max(width, 1)``, another ``n_samples`` on ``[-10 width, 10 width]``
    and the points ``0, +-width`` (``width`` is delta or epsilon).
    """
    if isinstance(approx, Global):
        width = approx.delta
    elif isinstance(approx, Local):
        width = approx.epsilon
    else:
        raise ValueError("containment is only meaningful for Global or Local approximations")
    if not neighborhood > 0:
        raise ValueError("neighborhood must be positive")
    L = 10.0 * max(width, 1.0)
    xs = np.linspace(-L, L, n_samples)
    extra = [0.0, width, -width]
    xs = np.concatenate([xs, extra])
    # the inner structure lives on the scale of ``width``; sample it densely too
    xs = np.concatenate([xs, np.linspace(-10.0 * width, 10.0 * width, n_samples)])
    d = distance_to_sgn_graph(xs, sgn_eval(approx, xs))
    return bool(np.all(d <= neighborhood))


# Scalar closures for the integrator's inner loop; numpy dispatch on 0-d
# arrays costs more than the arithmetic itself.  Must agree with the
# vectorised evaluators above (checked in the tests).


def _sign(x: float) -> float:
    return 1.0 if x > 0.0 else (-1.0 if x < 0.0 else 0.0)


def scalar_sgn(approx: SgnApprox):
    if isinstance(approx, Exact):
        return _sign
    if isinstance(approx, Global):
        d = approx.delta

        def sig(x):
            v = 2.0 / (1.0 + math.exp(-abs(x) / d)) - 1.0
            return v if x >= 0.0 else -v

        return sig
    if isinstance(approx, Local):
        eps = approx.epsilon

        def cubic(x):
            if x > eps:
                return 1.0
            if x < -eps:
                return -1.0
            u = x / eps
            return 0.5 * u * (3.0 - u * u)

        return cubic
    raise TypeError(f"unknown sgn approximation {approx!r}")


def scalar_sgn_deriv(approx: SgnApprox):
    if isinstance(approx, Global):
        d = approx.delta

        def dsig(x):
            e = math.exp(-abs(x) / d)
            return 2.0 * e / (d * (1.0 + e) ** 2)

        return dsig
    if isinstance(approx, Local):
        eps = approx.epsilon

        def dcubic(x):
            if abs(x) > eps:
                return 0.0
            u = x / eps
            return 1.5 * (1.0 - u * u) / eps

        return dcubic
    if isinstance(approx, Exact):
        raise ValueError("the exact sign function has no derivative at 0; use Global or Local")
    raise TypeError(f"unknown sgn approximation {approx!r}")


def scalar_abs(approx: AbsApprox):
    if isinstance(approx, Exact):
        return abs
    if isinstance(approx, Quadratic):
        eps = approx.epsilon
        return lambda x: x * x / (2.0 * eps) + 0.5 * eps if abs(x) <= eps else abs(x)
    raise TypeError(f"unknown modulus approximation {approx!r}")


def scalar_abs_deriv(approx: AbsApprox):
    if isinstance(approx, Exact):
        return _sign
    if isinstance(approx, Quadratic):
        eps = approx.epsilon
        return lambda x: x / eps if abs(x) <= eps else _sign(x)
    raise TypeError(f"unknown modulus approximation {approx!r}")
