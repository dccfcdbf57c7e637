"""
Deterministic derivative-free optimisation on boxes, plus the correlation
surface used by Gaussian signaling.

``optimize_box`` evaluates a full tensor grid, then repeatedly re-grids a
shrinking box around the incumbent.  The objective is called on a whole
``(n_points, n_dims)`` array at once, so objectives should be vectorised
over rows.  Ties go to the first point in lexicographic grid order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

EPS_BND = 1e-6


class NonFiniteObjective(ValueError):
    """Raised when an objective returns NaN (or inf without ``allow_infeasible``)."""

    def __init__(self, point):
        self.point = np.asarray(point)
        super().__init__(f"objective is not finite at {self.point.tolist()}")


class NoFeasiblePoint(RuntimeError):
    pass


@dataclass(frozen=True)
class Box:
    dims: tuple

    def __init__(self, dims: Sequence[tuple[float, float]]):
        dims = tuple((float(lo), float(hi)) for lo, hi in dims)
        for lo, hi in dims:
            if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
                raise ValueError(f"bad box dimension ({lo}, {hi})")
        object.__setattr__(self, "dims", dims)

    @property
    def lo(self) -> np.ndarray:
        return np.array([d[0] for d in self.dims])

    @property
    def hi(self) -> np.ndarray:
        return np.array([d[1] for d in self.dims])

    @property
    def center(self) -> np.ndarray:
        return (self.lo + self.hi) / 2

    def __len__(self):
        return len(self.dims)


@dataclass(frozen=True)
class OptSpec:
    coarse_points_per_dim: int = 21
    refine_rounds: int = 3
    shrink_factor: float = 0.25
    tolerance: float = 1e-9

    def __post_init__(self):
        if self.coarse_points_per_dim < 2:
            raise ValueError("coarse_points_per_dim must be >= 2")
        if self.refine_rounds < 0:
            raise ValueError("refine_rounds must be >= 0")
        if not (0 < self.shrink_factor < 1):
            raise ValueError("shrink_factor must lie in (0, 1)")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be > 0")


@dataclass
class BoundResult:
    """A bound value in bits with the parameters that produced it."""

    value: float
    params: dict = field(default_factory=dict)
    evaluations: int = 0

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError(f"bound value must be finite, got {self.value!r}")


def _grid(lo, hi, n):
    axes = [np.linspace(a, b, n) if b > a else np.array([a]) for a, b in zip(lo, hi)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def _evaluate(f, pts, sense, allow_infeasible, chunk):
    out = np.empty(len(pts))
    for start in range(0, len(pts), chunk):
        block = pts[start:start + chunk]
        out[start:start + chunk] = np.asarray(f(block), dtype=float).reshape(len(block))
    bad = np.isnan(out)
    if allow_infeasible:
        bad |= np.isinf(out) & (np.sign(out) == (1 if sense == "max" else -1))
    else:
        bad |= ~np.isfinite(out)
    if bad.any():
        raise NonFiniteObjective(pts[np.argmax(bad)])
    return out


def _best(vals, sense):
    i = int(np.argmax(vals) if sense == "max" else np.argmin(vals))
    return i, vals[i]


def optimize_box(
    f: Callable[[np.ndarray], np.ndarray],
    box: Box,
    sense: str = "max",
    spec: OptSpec = OptSpec(),
    *,
    allow_infeasible: bool = False,
    chunk: int = 1 << 17,
):
    """Grid search with shrinking local refinement.

    Parameters
    ----------
    f : callable
        Maps an ``(n, d)`` array of points to ``n`` values.
    box : Box
        Closed search box.
    sense : {"max", "min"}
    spec : OptSpec
    allow_infeasible : bool
        If True, ``-inf`` (for max) or ``+inf`` (for min) marks a point as
        infeasible and it is skipped.  NaN always raises.

    Returns
    -------
    arg : ndarray
        Best point found.
    val : float
        ``f(arg)``.
    evaluations : int
        Number of objective evaluations.

    Raises
    ------
    NonFiniteObjective
        With the offending point.
    NoFeasiblePoint
        If every grid node was infeasible.
    """
    if sense not in ("max", "min"):
        raise ValueError("sense must be 'max' or 'min'")
    lo, hi = box.lo, box.hi
    n = spec.coarse_points_per_dim

    pts = _grid(lo, hi, n)
    vals = _evaluate(f, pts, sense, allow_infeasible, chunk)
    evals = len(pts)
    i, val = _best(vals, sense)
    if not np.isfinite(val):
        raise NoFeasiblePoint("no feasible grid point")
    arg = pts[i]

    if sense == "max":
        # the box center is always a candidate
        c = box.center[None, :]
        cv = _evaluate(f, c, sense, allow_infeasible, chunk)[0]
        evals += 1
        if cv > val:
            arg, val = c[0], cv

    width = hi - lo
    for _ in range(spec.refine_rounds):
        width = width * spec.shrink_factor
        if not np.any(width > 0):
            break
        sub_lo = np.maximum(lo, arg - width / 2)
        sub_hi = np.minimum(hi, arg + width / 2)
        pts = _grid(sub_lo, sub_hi, n)
        vals = _evaluate(f, pts, sense, allow_infeasible, chunk)
        evals += len(pts)
        j, cand = _best(vals, sense)
        improved = cand > val if sense == "max" else cand < val
        if improved:
            gain = abs(cand - val)
            arg, val = pts[j], cand
            if gain < spec.tolerance:
                break
    return np.array(arg, dtype=float), float(val), evals


@dataclass(frozen=True)
class SignalingPoint:
    """Real correlation triple (rho_xs, rho_us, rho_ux) of Gaussian signaling."""

    rho_xs: float
    rho_us: float
    rho_ux: float

    def __post_init__(self):
        if abs(self.rho_xs) >= 1 or abs(self.rho_us) >= 1:
            raise ValueError("|rho_xs| and |rho_us| must be < 1")
        if abs(self.rho_ux) > 1 - EPS_BND:
            raise ValueError("|rho_ux| must be <= 1 - eps")
        if abs(surface_residual(self.rho_xs, self.rho_us, self.rho_ux)) > 1e-12:
            raise ValueError("point is not on the correlation surface")

    def correlation_matrix(self) -> np.ndarray:
        """Correlation matrix of (X, S, U)."""
        a, b, c = self.rho_xs, self.rho_us, self.rho_ux
        return np.array([[1.0, a, c], [a, 1.0, b], [c, b, 1.0]])

    def is_joint_law(self, tol: float = 1e-12) -> bool:
        """True when some Gaussian (X, S, U) has these correlations."""
        return bool(joint_law_determinant(self.rho_xs, self.rho_us, self.rho_ux) >= -tol)


def surface_residual(rho_xs, rho_us, rho_ux):
    return 1 + 2 * rho_xs * rho_us - rho_xs**2 - rho_us**2 - rho_ux**2


def joint_law_determinant(rho_xs, rho_us, rho_ux):
    """Determinant of the (X, S, U) correlation matrix; >= 0 iff it is PSD."""
    return 1 + 2 * rho_xs * rho_us * rho_ux - rho_xs**2 - rho_us**2 - rho_ux**2


def region_a_radicand(rho_xs, rho_us):
    return 1 + 2 * rho_xs * rho_us - rho_xs**2 - rho_us**2


def region_a_project(rho_xs: float, rho_us: float, sign: int = +1) -> SignalingPoint | None:
    """Solve the surface equation for ``rho_ux`` with the given sign.

    Returns None when the radicand falls outside ``[0, (1 - eps)^2]``.
    """
    if abs(rho_xs) >= 1 or abs(rho_us) >= 1:
        raise ValueError("|rho_xs| and |rho_us| must be < 1")
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    rad = region_a_radicand(rho_xs, rho_us)
    if rad < 0 or rad > (1 - EPS_BND) ** 2:
        return None
    return SignalingPoint(rho_xs, rho_us, sign * math.sqrt(rad))
