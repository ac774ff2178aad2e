"""The 4D fractional-order piecewise-continuous system

    D^q x1 = -x1 + x2
    D^q x2 = -x3 sgn(x1) + x4
    D^q x3 = |x1| - a
    D^q x4 = -b x2

with its smoothed variants, Jacobian, affine pieces on the half-spaces
``x1 > 0`` / ``x1 < 0``, closed-form Mittag-Leffler solutions on each piece,
switching times and the equilibria check.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, NamedTuple, Optional

import numpy as np

from . import regularize as reg
from .abm import FDEProblem, Trajectory, abm_integrate
from .mlfunc import ml_matrix, ml_matrix_action

__all__ = [
    "SystemParams",
    "RhsVariant",
    "AffinePiece",
    "SwitchingEvent",
    "DEFAULT_X0",
    "rhs",
    "make_rhs",
    "jacobian",
    "make_jacobian",
    "affine_pieces",
    "ml_solution",
    "ml_solution_path",
    "switching_function",
    "switching_time",
    "equilibria",
    "equilibria_report",
    "simulate",
]

DEFAULT_X0 = (1.0, 2.0, 0.0, 0.1)

E1 = np.array([1.0, 0.0, 0.0, 0.0])
E3 = np.array([0.0, 0.0, 1.0, 0.0])


@dataclass(frozen=True)
class SystemParams:
    a: float = 1.0
    b: float = 1.25
    q: float = 0.98

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"a must be positive, got {self.a}")
        if not self.b > 0:
            raise ValueError(f"b must be positive, got {self.b}")
        if not (0.0 < self.q < 1.0):
            raise ValueError(f"q must lie in (0, 1), got {self.q}")


@dataclass(frozen=True)
class RhsVariant:
    """Which right-hand side is in force.

    ``sgn`` is ``Exact`` (WA), ``Global`` (GA) or ``Local`` (LA); ``modulus``
    is ``Exact`` by default and ``Quadratic`` for Lyapunov runs.
    """

    sgn: reg.SgnApprox = field(default_factory=reg.Exact)
    modulus: reg.AbsApprox = field(default_factory=reg.Exact)

    @classmethod
    def wa(cls, modulus: reg.AbsApprox | None = None) -> "RhsVariant":
        return cls(reg.Exact(), modulus or reg.Exact())

    @classmethod
    def ga(cls, delta: float, modulus: reg.AbsApprox | None = None) -> "RhsVariant":
        return cls(reg.Global(delta), modulus or reg.Exact())

    @classmethod
    def la(cls, epsilon: float, modulus: reg.AbsApprox | None = None) -> "RhsVariant":
        return cls(reg.Local(epsilon), modulus or reg.Exact())

    @property
    def name(self) -> str:
        return {reg.Exact: "wa", reg.Global: "ga", reg.Local: "la"}[type(self.sgn)]

    @property
    def smooth(self) -> bool:
        return self.name != "wa" and isinstance(self.modulus, reg.Quadratic)

    def describe(self) -> dict:
        out = {"variant": self.name}
        if isinstance(self.sgn, reg.Global):
            out["delta"] = self.sgn.delta
        if isinstance(self.sgn, reg.Local):
            out["epsilon"] = self.sgn.epsilon
        if isinstance(self.modulus, reg.Quadratic):
            out["abs_epsilon"] = self.modulus.epsilon
        return out


def make_rhs(p: SystemParams, v: RhsVariant):
    """Fast ``x -> f(x)`` closure for the integrator."""
    sgn = reg.scalar_sgn(v.sgn)
    mod = reg.scalar_abs(v.modulus)
    a, b = p.a, p.b

    def f(x):
        x1, x2, x3, x4 = x
        return np.array((-x1 + x2, -x3 * sgn(x1) + x4, mod(x1) - a, -b * x2))

    return f


def rhs(x, p: SystemParams, v: RhsVariant) -> np.ndarray:
    return make_rhs(p, v)(np.asarray(x, dtype=float))


def make_jacobian(p: SystemParams, v: RhsVariant):
    """Fast ``x -> Df(x)`` closure.

    Raises ``ValueError`` when evaluated on ``x1 = 0`` with an exact ``sgn``
    or exact modulus, where the derivative does not exist.
    """
    sgn = reg.scalar_sgn(v.sgn)
    dsgn = None if isinstance(v.sgn, reg.Exact) else reg.scalar_sgn_deriv(v.sgn)
    dmod = reg.scalar_abs_deriv(v.modulus)
    exact_mod = isinstance(v.modulus, reg.Exact)
    b = p.b

    def jac(x):
        x1, _, x3, _ = x
        if x1 == 0.0 and (dsgn is None or exact_mod):
            raise ValueError("Jacobian undefined on the switching plane x1 = 0 for a nonsmooth variant")
        ds = 0.0 if dsgn is None else dsgn(x1)
        return np.array(
            (
                (-1.0, 1.0, 0.0, 0.0),
                (-x3 * ds, 0.0, -sgn(x1), 1.0),
                (dmod(x1), 0.0, 0.0, 0.0),
                (0.0, -b, 0.0, 0.0),
            )
        )

    return jac


def jacobian(x, p: SystemParams, v: RhsVariant) -> np.ndarray:
    return make_jacobian(p, v)(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class AffinePiece:
    """``D^q x = M_plus x + m`` on ``x1 > 0`` and ``M_minus x + m`` on ``x1 < 0``."""

    M_plus: np.ndarray
    M_minus: np.ndarray
    m: np.ndarray
    e1: np.ndarray = field(default_factory=lambda: E1.copy())
    e3: np.ndarray = field(default_factory=lambda: E3.copy())

    def matrix(self, piece: str) -> np.ndarray:
        if piece in ("plus", "+"):
            return self.M_plus
        if piece in ("minus", "-"):
            return self.M_minus
        raise ValueError(f"piece must be 'plus' or 'minus', got {piece!r}")


def _M(b: float, s: float) -> np.ndarray:
    return np.array(
        [
            [-1.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, -s, 1.0],
            [s, 0.0, 0.0, 0.0],
            [0.0, -b, 0.0, 0.0],
        ]
    )


def affine_pieces(p: SystemParams) -> AffinePiece:
    return AffinePiece(_M(p.b, 1.0), _M(p.b, -1.0), -p.a * E3)


def ml_solution(x0, t: float, piece: str, p: SystemParams) -> np.ndarray:
    """Closed-form solution on one half-space:

    ``x(t) = E_q(t^q M) x0 - a t^q E_{q,q+1}(t^q M) e3``.

    Only meaningful while the trajectory stays in the chosen half-space.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    M = affine_pieces(p).matrix(piece)
    x0 = np.asarray(x0, dtype=float)
    tq = t**p.q
    return ml_matrix((p.q, 1.0), M, tq) @ x0 - p.a * tq * (ml_matrix((p.q, p.q + 1.0), M, tq) @ E3)


def ml_solution_path(x0, times, piece: str, p: SystemParams) -> np.ndarray:
    """:func:`ml_solution` evaluated at every entry of ``times`` (rows)."""
    times = np.asarray(times, dtype=float)
    if np.any(times < 0):
        raise ValueError("times must be non-negative")
    M = affine_pieces(p).matrix(piece)
    tq = times**p.q
    hom = ml_matrix_action((p.q, 1.0), M, np.asarray(x0, dtype=float), tq)
    forced = ml_matrix_action((p.q, p.q + 1.0), M, E3, tq)
    return hom - p.a * tq[:, None] * forced


def switching_function(x0, times, p: SystemParams, piece: Optional[str] = None) -> np.ndarray:
    """phi(t) = e1^T x(t) for the closed-form solution started at ``x0``."""
    x0 = np.asarray(x0, dtype=float)
    if piece is None:
        piece = _piece_of(x0)
    return ml_solution_path(x0, times, piece, p)[:, 0]


class SwitchingEvent(NamedTuple):
    t_s: float
    piece: str
    direction: str  # "+-" leaves x1 > 0, "-+" leaves x1 < 0
    n_sign_changes_on_grid: int


def _piece_of(x0) -> str:
    if x0[0] > 0:
        return "plus"
    if x0[0] < 0:
        return "minus"
    raise ValueError(
        "x0 lies on the switching plane x1 = 0; closed-form half-space solutions do not "
        "apply there, use the sliding/crossing analysis of the smoothed system instead"
    )


SCAN_POINTS = 10_000
BISECTION_TOL = 1e-12


def switching_time(x0, p: SystemParams, t_max: float) -> Optional[SwitchingEvent]:
    """First zero of the switching function on ``(0, t_max]``.

    Scans ``phi`` on a uniform grid with step ``t_max / 10^4`` and refines the
    first sign change by bisection to ``|dt| < 1e-12``.  Returns ``None`` when
    no sign change is seen on the grid.
    """
    x0 = np.asarray(x0, dtype=float)
    piece = _piece_of(x0)
    if not t_max > 0:
        raise ValueError("t_max must be positive")
    grid = np.linspace(0.0, t_max, SCAN_POINTS + 1)
    phi = switching_function(x0, grid, p, piece)
    s0 = np.sign(phi[0])
    changed = np.flatnonzero(np.sign(phi[1:]) != s0)
    if changed.size == 0:
        return None
    k = changed[0] + 1
    n_changes = int(np.count_nonzero(np.diff(np.sign(phi)) != 0))
    direction = "+-" if piece == "plus" else "-+"
    if phi[k] == 0.0:
        return SwitchingEvent(float(grid[k]), piece, direction, n_changes)
    lo, hi = grid[k - 1], grid[k]

    def phi_at(t):
        return float(ml_solution(x0, t, piece, p)[0])

    while hi - lo >= BISECTION_TOL:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        v = phi_at(mid)
        if v == 0.0:
            lo = hi = mid
            break
        if np.sign(v) == s0:
            lo = mid
        else:
            hi = mid
    return SwitchingEvent(float(0.5 * (lo + hi)), piece, direction, n_changes)


def equilibria_report(p: SystemParams, tol: float = 1e-12) -> tuple[list, list[str]]:
    """Equilibria with a human-readable derivation trace.

    In each open half-space solves ``M x = a e3`` (``M`` is singular, so
    consistency is checked by rank), then checks whether the affine solution
    set meets the half-space.  On the plane ``x1 = 0`` the third component of
    the field is ``-a`` for every selection of Sgn(0), so no equilibrium
    lies there.
    """
    pieces = affine_pieces(p)
    rhs_vec = p.a * E3
    found: list = []
    trace: list[str] = []
    for name, M, sign in (("plus", pieces.M_plus, 1.0), ("minus", pieces.M_minus, -1.0)):
        rank_M = np.linalg.matrix_rank(M, tol=tol)
        rank_aug = np.linalg.matrix_rank(np.column_stack([M, rhs_vec]), tol=tol)
        if rank_aug > rank_M:
            trace.append(
                f"Omega_{name}: M x = a e3 is inconsistent (rank M = {rank_M}, "
                f"rank [M | a e3] = {rank_aug}); rows 1 and 4 force x1 = x2 = 0, "
                f"row 3 forces {'+' if sign > 0 else '-'}x1 = a = {p.a:g}"
            )
            continue
        x_part = np.linalg.lstsq(M, rhs_vec, rcond=None)[0]
        _, sv, vt = np.linalg.svd(M)
        null = vt[np.sum(sv > tol) :]
        if np.any(np.abs(null[:, 0]) > tol) or sign * x_part[0] > tol:
            # some point of the solution set lies strictly inside the half-space
            if sign * x_part[0] <= tol:
                j = int(np.argmax(np.abs(null[:, 0])))
                x_part = x_part + null[j] * (sign * 1.0 - x_part[0]) / null[j, 0]
            found.append((x_part, name))
            trace.append(f"Omega_{name}: equilibrium at {x_part.tolist()}")
        else:
            trace.append(f"Omega_{name}: solution set has x1 = {x_part[0]:g}, outside the half-space")
    trace.append(
        f"x1 = 0: third component of the field is |0| - a = {-p.a:g} != 0 for every "
        "selection of Sgn(0), so the plane holds no equilibria"
    )
    return found, trace


def equilibria(p: SystemParams) -> list:
    """List of ``(point, region)`` equilibria; always empty for ``a > 0``."""
    return equilibria_report(p)[0]


def simulate(
    p: SystemParams,
    v: RhsVariant,
    x0=DEFAULT_X0,
    t_end: float = 100.0,
    h: float = 0.002,
    corrector_iters: int = 1,
) -> Trajectory:
    """Integrate the system with the fractional ABM scheme."""
    traj = abm_integrate(FDEProblem(p.q, make_rhs(p, v), np.asarray(x0, float), t_end, h), corrector_iters)
    traj.meta.update({"a": p.a, "b": p.b, **v.describe()})
    return traj
