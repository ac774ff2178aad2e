"""Numerical experiments on the fractional PWC system.

Lyapunov spectra, bifurcation scans, GA/LA/WA divergence times, shift-based
period estimates, the closed-form check of the periodic solution with lower
terminal -inf, and a point-cloud distance used to tell coexisting attractors
apart.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import regularize as reg
from .abm import Trajectory, grid_size
from .lyapunov import benettin_fractional
from .sprott import DEFAULT_X0, RhsVariant, SystemParams, make_jacobian, make_rhs, simulate

__all__ = [
    "LyapunovSpectrum",
    "lyapunov_spectrum",
    "BifurcationSample",
    "BifurcationDiagram",
    "local_maxima",
    "bifurcation_scan",
    "DivergenceReport",
    "divergence_time",
    "compare_variants",
    "PeriodEstimate",
    "asymptotic_period_estimate",
    "shift_residuals",
    "PeriodicTestProblem",
    "periodic_coefficients",
    "periodic_solution",
    "verify_ml_periodic",
    "cloud_distance",
    "LYAPUNOV_EPSILON",
]

#: LA and modulus smoothing width used for Lyapunov runs by default
LYAPUNOV_EPSILON = 1e-2


# -- Lyapunov spectra ----------------------------------------------------------


@dataclass
class LyapunovSpectrum:
    exponents: np.ndarray
    T: float
    h: float
    renorm_interval: int
    variant: RhsVariant
    x0: tuple
    memory: str = "restart"
    mean_trace: float = float("nan")
    orthonormality_error: float = 0.0
    history: np.ndarray = field(default=None, repr=False)
    times: np.ndarray = field(default=None, repr=False)

    @property
    def n_positive(self) -> int:
        return int(np.sum(self.exponents > 0))

    def matches(self, pattern: str, zero_tol: float = 0.005, sign_tol: float = 0.001) -> bool:
        """Check a sign pattern such as ``"+0--"``.

        ``+``/``-`` need the matching sign and ``|lambda| >= sign_tol``;
        ``0`` needs ``|lambda| <= zero_tol``.
        """
        if len(pattern) != len(self.exponents):
            raise ValueError("pattern length differs from the number of exponents")
        for ch, lam in zip(pattern, self.exponents):
            if ch == "+" and not lam >= sign_tol:
                return False
            if ch == "-" and not lam <= -sign_tol:
                return False
            if ch == "0" and not abs(lam) <= zero_tol:
                return False
        return True


def lyapunov_spectrum(
    p: SystemParams,
    v: Optional[RhsVariant] = None,
    x0=DEFAULT_X0,
    T: float = 300.0,
    h: float = 0.005,
    renorm_interval: int = 10,
    memory: str = "restart",
) -> LyapunovSpectrum:
    """Finite-time Lyapunov exponents of the smoothed system.

    ``v`` must be GA or LA with a quadratic modulus; by default LA with
    ``epsilon = LYAPUNOV_EPSILON`` for both the switch and the modulus.
    """
    if v is None:
        v = RhsVariant.la(LYAPUNOV_EPSILON, reg.Quadratic(LYAPUNOV_EPSILON))
    if not v.smooth:
        raise ValueError("Lyapunov spectra need a smooth variant: GA or LA with a quadratic modulus")
    res = benettin_fractional(
        p.q, make_rhs(p, v), make_jacobian(p, v), np.asarray(x0, float), T, h, renorm_interval, memory
    )
    return LyapunovSpectrum(
        exponents=res.exponents,
        T=res.T,
        h=h,
        renorm_interval=renorm_interval,
        variant=v,
        x0=tuple(float(c) for c in x0),
        memory=memory,
        mean_trace=res.mean_trace,
        orthonormality_error=res.orthonormality_error,
        history=res.history,
        times=res.times,
    )


# -- bifurcation scans -----------------------------------------------------------


def local_maxima(series: np.ndarray) -> np.ndarray:
    """Strict interior local maxima ``s[i-1] < s[i] >= s[i+1]``."""
    s = np.asarray(series)
    if s.size < 3:
        return np.empty(0)
    mid = s[1:-1]
    mask = (mid > s[:-2]) & (mid >= s[2:])
    return mid[mask]


@dataclass
class BifurcationSample:
    parameter: float
    stream: int
    values: np.ndarray
    error: Optional[str] = None


@dataclass
class BifurcationDiagram:
    parameter_name: str
    samples: list
    observable: str
    transient_fraction: float
    T: float
    h: float
    x0s: list

    def points(self):
        """Flat ``(parameter, stream, value)`` rows in parameter order."""
        for s in self.samples:
            for val in s.values:
                yield s.parameter, s.stream, float(val)


def _bifurcation_sample(args):
    name, value, stream, base, variant, x0, T, h, transient_fraction, component = args
    try:
        kw = {"a": base.a, "b": base.b, "q": base.q, name: value}
        p = SystemParams(**kw)
        n_total = grid_size(T, h) + 1
        start = int(math.floor(transient_fraction * n_total))
        if n_total - start < 3:
            raise ValueError(
                f"transient_fraction={transient_fraction} leaves {n_total - start} points; "
                "nothing to observe"
            )
        traj = simulate(p, variant, x0, T, h)
        vals = local_maxima(traj.states[start:, component])
        if not np.all(np.isfinite(vals)):
            raise FloatingPointError("non-finite observable")
        return BifurcationSample(float(value), stream, vals)
    except Exception as exc:  # recorded per sample, the scan goes on
        return BifurcationSample(float(value), stream, np.empty(0), f"{type(exc).__name__}: {exc}")


def bifurcation_scan(
    p_base: SystemParams,
    parameter: str,
    values: Sequence[float],
    v: Optional[RhsVariant] = None,
    x0s=(DEFAULT_X0,),
    T: float = 800.0,
    h: float = 0.002,
    transient_fraction: float = 0.8,
    component: int = 0,
    workers: int = 1,
) -> BifurcationDiagram:
    """Local maxima of ``x[component]`` after the transient, per parameter value.

    Several initial conditions (``x0s``) may be given to expose coexisting
    attractors; each becomes its own stream.  Failed samples carry an error
    message and no values.
    """
    if parameter not in ("b", "q", "a"):
        raise ValueError("parameter must be 'a', 'b' or 'q'")
    values = [float(x) for x in values]
    if not values:
        raise ValueError("empty parameter range")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ValueError("parameter values must be strictly increasing")
    if not (0.0 <= transient_fraction < 1.0):
        raise ValueError("transient_fraction must lie in [0, 1)")
    if v is None:
        v = RhsVariant.la(1e-6)
    if isinstance(x0s[0], (int, float)):
        x0s = (x0s,)
    jobs = [
        (parameter, val, k, p_base, v, tuple(x0), T, h, transient_fraction, component)
        for val in values
        for k, x0 in enumerate(x0s)
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            samples = list(pool.map(_bifurcation_sample, jobs))
    else:
        samples = [_bifurcation_sample(j) for j in jobs]
    return BifurcationDiagram(
        parameter, samples, f"local maxima of x{component + 1}", transient_fraction, T, h,
        [tuple(x) for x in x0s],
    )


# -- GA / LA / WA comparison -------------------------------------------------------


def divergence_time(a: Trajectory, b: Trajectory, threshold: float = 1e-6) -> Optional[float]:
    """First grid time at which the max-norm distance exceeds ``threshold``."""
    if a.states.shape != b.states.shape:
        raise ValueError("trajectories must share the same grid")
    d = np.max(np.abs(a.states - b.states), axis=1)
    idx = np.flatnonzero(d > threshold)
    return float(a.times[idx[0]]) if idx.size else None


@dataclass
class DivergenceReport:
    t_ga: Optional[float]
    t_la: Optional[float]
    threshold: float
    T: float
    h: float
    delta: float
    epsilon: float
    trajectories: dict = field(repr=False, default_factory=dict)

    @property
    def ordered(self) -> bool:
        """GA leaves WA no later than LA does (``None`` counts as never)."""
        ga = math.inf if self.t_ga is None else self.t_ga
        la = math.inf if self.t_la is None else self.t_la
        return ga <= la

    def to_dict(self) -> dict:
        return {
            "t_ga": self.t_ga,
            "t_la": self.t_la,
            "ordered": self.ordered,
            "threshold": self.threshold,
            "T": self.T,
            "h": self.h,
            "delta": self.delta,
            "epsilon": self.epsilon,
            "diverged_within_horizon": {"ga": self.t_ga is not None, "la": self.t_la is not None},
        }


def compare_variants(
    p: SystemParams,
    x0=DEFAULT_X0,
    T: float = 100.0,
    delta: float = 1e-6,
    epsilon: float = 1e-6,
    h: float = 0.002,
    threshold: float = 1e-6,
) -> DivergenceReport:
    """Integrate WA, GA(delta) and LA(epsilon) on one grid and report when
    GA and LA first move further than ``threshold`` from WA."""
    runs = {
        "wa": simulate(p, RhsVariant.wa(), x0, T, h),
        "ga": simulate(p, RhsVariant.ga(delta), x0, T, h),
        "la": simulate(p, RhsVariant.la(epsilon), x0, T, h),
    }
    return DivergenceReport(
        t_ga=divergence_time(runs["ga"], runs["wa"], threshold),
        t_la=divergence_time(runs["la"], runs["wa"], threshold),
        threshold=threshold,
        T=T,
        h=h,
        delta=delta,
        epsilon=epsilon,
        trajectories=runs,
    )


# -- numerically periodic oscillations -------------------------------------------


@dataclass
class PeriodEstimate:
    T_est: float
    residual: float
    relative_residual: float


def shift_residuals(states: np.ndarray, max_lag: int) -> np.ndarray:
    """RMS shift norm ``sqrt(mean_t |x(t+L) - x(t)|^2)`` for ``L = 0..max_lag``.

    Uses FFT autocorrelation, so the cost is ``O(N log N)``.
    """
    X = np.asarray(states, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    n = X.shape[0]
    if max_lag >= n:
        raise ValueError("max_lag must be shorter than the series")
    nfft = 1 << (2 * n - 1).bit_length()
    F = np.fft.rfft(X, nfft, axis=0)
    cross = np.fft.irfft(np.sum(F * np.conj(F), axis=1), nfft)[: max_lag + 1]
    sq = np.sum(X * X, axis=1)
    csum = np.concatenate([[0.0], np.cumsum(sq)])
    lags = np.arange(max_lag + 1)
    counts = n - lags
    head = csum[n - lags]  # sum_{t < n-L} |x(t)|^2
    tail = csum[n] - csum[lags]  # sum_{t >= L} |x(t)|^2
    ms = (head + tail - 2.0 * cross) / counts
    return np.sqrt(np.clip(ms, 0.0, None))


def asymptotic_period_estimate(
    traj: Trajectory,
    transient_fraction: float = 0.5,
    rel_threshold: float = 0.2,
    min_lag: int = 10,
) -> Optional[PeriodEstimate]:
    """Estimate the period of a numerically periodic oscillation.

    The residual ``r(L)`` is the RMS shift norm over the post-transient window
    for lags ``L`` between ``min_lag`` steps and a quarter of the window.
    The initial rise of ``r`` (small lags trivially give small shifts) is
    skipped: the candidate is the smallest residual after the first local
    maximum.  Returns ``None`` if that residual, relative to the RMS size of
    the centred window, exceeds ``rel_threshold``.
    """
    start = int(math.floor(transient_fraction * len(traj)))
    W = traj.states[start:]
    h = traj.h
    max_lag = len(W) // 4
    if max_lag <= min_lag + 2:
        return None
    r = shift_residuals(W, max_lag)
    seg = r[min_lag:]
    # end of the initial rise
    rising = np.flatnonzero(np.diff(seg) < 0)
    if rising.size == 0:
        return None
    first_peak = rising[0]
    tail = seg[first_peak:]
    j = int(np.argmin(tail)) + first_peak
    lag = j + min_lag
    scale = math.sqrt(np.mean(np.sum((W - W.mean(axis=0)) ** 2, axis=1)))
    rel = float(r[lag] / scale) if scale > 0 else math.inf
    if rel > rel_threshold:
        return None
    return PeriodEstimate(lag * h, float(r[lag]), rel)


# -- periodic solution with lower terminal -inf -----------------------------------


@dataclass(frozen=True)
class PeriodicTestProblem:
    """``D^q_{-inf} x + beta x = gamma cos(Omega t + alpha)``."""

    q: float
    beta: float
    gamma: float
    Omega: float
    alpha: float = 0.0

    def __post_init__(self):
        if self.Omega == 0:
            raise ValueError("Omega must be non-zero")
        if not (0.0 < self.q < 1.0):
            raise ValueError("q must lie in (0, 1)")


def _normalised(prob: PeriodicTestProblem):
    # cos(-W t + a) = cos(W t - a): fold negative frequencies onto W > 0
    if prob.Omega < 0:
        return -prob.Omega, -prob.alpha
    return prob.Omega, prob.alpha


def periodic_coefficients(prob: PeriodicTestProblem) -> tuple[float, float, float]:
    """``(A, B, Omega)`` with ``x(t) = A cos(Omega t) + B sin(Omega t)``, ``Omega > 0``."""
    W, al = _normalised(prob)
    q, beta, gamma = prob.q, prob.beta, prob.gamma
    Wq = W**q
    c = math.cos(math.pi * q / 2)
    den = beta * beta + 2.0 * beta * Wq * c + Wq * Wq
    if den == 0.0 or not math.isfinite(den):
        raise ZeroDivisionError("beta^2 + 2 beta Omega^q cos(pi q/2) + Omega^(2q) vanishes")
    A = gamma * (beta * math.cos(al) + Wq * math.cos(al - math.pi * q / 2)) / den
    B = -gamma * (beta * math.sin(al) + Wq * math.sin(al - math.pi * q / 2)) / den
    return A, B, W


def periodic_solution(prob: PeriodicTestProblem, t) -> np.ndarray:
    A, B, W = periodic_coefficients(prob)
    t = np.asarray(t, dtype=float)
    return A * np.cos(W * t) + B * np.sin(W * t)


def _fractional_derivative_trig(A: float, B: float, W: float, q: float, t: np.ndarray) -> np.ndarray:
    # D^q_{-inf} of A cos(Wt) + B sin(Wt): a phase advance by pi q / 2 and gain W^q
    Wq = W**q
    c, s = math.cos(math.pi * q / 2), math.sin(math.pi * q / 2)
    return (A * Wq * c + B * Wq * s) * np.cos(W * t) + (B * Wq * c - A * Wq * s) * np.sin(W * t)


def verify_ml_periodic(prob: PeriodicTestProblem, n_samples: int = 1000, periods: float = 5.0) -> float:
    """Max residual of the closed-form periodic solution plugged into its FDE.

    Samples ``n_samples`` uniform times over ``periods`` periods.
    """
    A, B, W = periodic_coefficients(prob)
    _, al = _normalised(prob)
    t = np.linspace(0.0, periods * 2.0 * math.pi / W, n_samples)
    x = A * np.cos(W * t) + B * np.sin(W * t)
    lhs = _fractional_derivative_trig(A, B, W, prob.q, t) + prob.beta * x
    return float(np.max(np.abs(lhs - prob.gamma * np.cos(W * t + al))))


# -- attractor comparison -------------------------------------------------------


def cloud_distance(P: np.ndarray, Q: np.ndarray, cell: float = 0.5) -> float:
    """Jaccard distance between the sets of grid cells visited by two clouds.

    0 for clouds occupying identical cells, 1 for disjoint ones.
    """
    if cell <= 0:
        raise ValueError("cell must be positive")
    a = {tuple(r) for r in np.floor(np.asarray(P) / cell).astype(np.int64)}
    b = {tuple(r) for r in np.floor(np.asarray(Q) / cell).astype(np.int64)}
    union = a | b
    if not union:
        return 0.0
    return 1.0 - len(a & b) / len(union)
