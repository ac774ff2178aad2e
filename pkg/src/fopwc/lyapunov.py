"""Finite-time Lyapunov spectra for Caputo systems (Benettin/QR method).

The state and ``n`` tangent vectors are advanced together with the same
fractional ABM scheme as one extended system ``D^q (x, Y) = (f(x), J(x) Y)``.
Every ``renorm_interval`` steps the tangent block is QR-factorised,
``Y = Q R``; ``log |R_ii|`` is accumulated and ``Y`` is replaced by ``Q``.

Memory handling across renormalisations:

``"restart"`` (default)
    the extended integration is restarted from ``(x, Q)`` after every
    renormalisation, so both blocks only remember the current window.  This
    is the usual construction for fractional-order spectra and the one whose
    spectra show a near-zero flow exponent.
``"tangent-restart"``
    the state keeps its full memory (the base trajectory is the ordinary
    ABM solution); only the tangent block restarts from ``Q``.

Carrying the full tangent memory through ``Y -> Y R^{-1}`` is exact in
exact arithmetic but rescales the stored history of contracting directions
by ``exp(|lambda| t)`` and cancels catastrophically in double precision, so
it is not offered.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .abm import AbmKernel, IntegrationError, grid_size

__all__ = ["LyapunovResult", "benettin_fractional", "MEMORY_MODES"]

MEMORY_MODES = ("restart", "tangent-restart")


@dataclass
class LyapunovResult:
    exponents: np.ndarray
    T: float
    h: float
    renorm_interval: int
    memory: str
    #: running estimates after each renormalisation, shape (n_renorm, n)
    history: np.ndarray = field(repr=False, default_factory=lambda: np.empty((0, 0)))
    times: np.ndarray = field(repr=False, default_factory=lambda: np.empty(0))
    #: time average of trace J along the base trajectory
    mean_trace: float = float("nan")
    #: max |Q^T Q - I| right after a renormalisation
    orthonormality_error: float = 0.0
    final_state: Optional[np.ndarray] = field(repr=False, default=None)


def benettin_fractional(
    q: float,
    f: Callable[[np.ndarray], np.ndarray],
    jac: Callable[[np.ndarray], np.ndarray],
    x0,
    T: float,
    h: float,
    renorm_interval: int = 10,
    memory: str = "restart",
    n_vectors: Optional[int] = None,
) -> LyapunovResult:
    """Finite-time Lyapunov exponents of ``D^q x = f(x)`` over ``[0, T]``.

    Exponents are ``sum log|R_ii| / T`` sorted in descending order.
    """
    if memory not in MEMORY_MODES:
        raise ValueError(f"memory must be one of {MEMORY_MODES}")
    if renorm_interval < 1:
        raise ValueError("renorm_interval must be a positive number of steps")
    x0 = np.asarray(x0, dtype=float)
    n = x0.size
    k = n if n_vectors is None else int(n_vectors)
    n_steps = grid_size(T, h)
    if n_steps < renorm_interval:
        raise ValueError("horizon shorter than one renormalisation interval")

    # a full restart never looks back further than one window
    kernel = AbmKernel(q, h, renorm_interval if memory == "restart" else n_steps)
    pred_rev, corr_rev = kernel._pred_rev, kernel._corr_rev
    P, C = len(pred_rev), len(corr_rev)

    X = np.empty((n_steps + 1, n))
    FX = np.empty_like(X)
    FY = np.empty((n_steps + 1, n, k))

    x_start = x0.copy()
    Y_start = np.eye(n, k)
    ox = oy = 0  # first step of the state / tangent memory windows
    X[0] = x0
    FX[0] = f(x0)
    J = jac(x0)
    FY[0] = J @ Y_start
    trace_sum = 0.0

    logs = np.zeros(k)
    hist, times = [], []
    ortho_err = 0.0

    for s in range(n_steps):
        mx, my = s - ox, s - oy
        xp = x_start + kernel.predictor_sum(FX[ox:], mx)
        ex = x_start + kernel.corrector_sum(FX[ox:], mx)
        Yp = Y_start + np.tensordot(pred_rev[P - my - 1 :], FY[oy : s + 1], 1)
        eY = Y_start + kernel.corr_first[my] * FY[oy]
        if my >= 1:
            eY = eY + np.tensordot(corr_rev[C - my :], FY[oy + 1 : s + 1], 1)
        fp = f(xp)
        Jp = jac(xp)
        x_new = ex + kernel.corr_self * fp
        Y_new = eY + kernel.corr_self * (Jp @ Yp)
        J = jac(x_new)
        fx = f(x_new)
        if not (np.all(np.isfinite(x_new)) and np.all(np.isfinite(Y_new)) and np.all(np.isfinite(fx))):
            raise IntegrationError(f"non-finite state at step {s + 1}", s + 1)
        X[s + 1] = x_new
        FX[s + 1] = fx
        FY[s + 1] = J @ Y_new
        trace_sum += float(np.trace(J))

        if (s + 1) % renorm_interval == 0:
            Q, R = np.linalg.qr(Y_new)
            d = np.diag(R)
            sgn = np.where(d < 0, -1.0, 1.0)
            Q = Q * sgn
            R = R * sgn[:, None]
            logs += np.log(np.abs(d))
            t_now = (s + 1) * h
            hist.append(logs / t_now)
            times.append(t_now)
            ortho_err = max(ortho_err, float(np.max(np.abs(Q.T @ Q - np.eye(k)))))
            oy = s + 1
            Y_start = Q.copy()
            FY[s + 1] = J @ Q
            if memory == "restart":
                ox = s + 1
                x_start = x_new.copy()

    T_eff = n_steps * h
    n_done = (n_steps // renorm_interval) * renorm_interval
    exps = logs / (n_done * h)
    order = np.argsort(-exps)
    return LyapunovResult(
        exponents=exps[order],
        T=T_eff,
        h=h,
        renorm_interval=renorm_interval,
        memory=memory,
        history=np.asarray(hist)[:, order] if hist else np.empty((0, k)),
        times=np.asarray(times),
        mean_trace=trace_sum / n_steps,
        orthonormality_error=ortho_err,
        final_state=X[-1].copy(),
    )
