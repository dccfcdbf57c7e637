"""
Achievable rates with jointly Gaussian (U, X, S) and binning, and the
scalar dirty-paper rates under a mis-estimated interference gain.

All rates are in bits per channel use (log base 2).  Correlations are real.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Binomial, ChannelParams, FadingDist, Uniform
from .optimize import (
    EPS_BND,
    Box,
    BoundResult,
    NoFeasiblePoint,
    OptSpec,
    SignalingPoint,
    joint_law_determinant,
    optimize_box,
    region_a_radicand,
)
from .quadrature import QuadratureDidNotConverge, simpson_doubling_batch

# tolerance on the (X, S, U) correlation determinant when screening grid points
JOINT_LAW_TOL = 1e-12
# absolute accuracy of the uniform-fading phase average
UNIFORM_TOL = 1e-9


class NonPositiveLogArgument(ValueError):
    def __init__(self, term, value):
        self.term = term
        self.value = value
        super().__init__(f"{term} has non-positive log argument {value!r}")


@dataclass(frozen=True)
class MismatchParams:
    a: float
    lam: float
    eps: float


def _rate_terms(rho_xs, rho_us, rho_ux, p, q, t_phase):
    c = np.cos(t_phase)
    spq = math.sqrt(p * q)
    num = (p + q + 2 * rho_xs * c * spq + 1) * (1 - rho_us**2)
    den = p * (1 - rho_ux**2) + q * (1 - rho_us**2) + 2 * c * (rho_xs - rho_ux * rho_us) * spq + 1
    return num, den


def rate_rt_raw(rho_xs, rho_us, rho_ux, params: ChannelParams, t_phase):
    """Vectorised rate for fading phase ``t_phase``; NaN where a log argument is <= 0."""
    num, den = _rate_terms(rho_xs, rho_us, rho_ux, params.p, params.q, t_phase)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = 0.5 * np.log2(num) - 0.5 * np.log2(den)
    return np.where((num > 0) & (den > 0), r, np.nan)


def rate_rt(point: SignalingPoint, params: ChannelParams, t_phase: float) -> float:
    """Rate of Gaussian signaling when the interference is rotated by ``t_phase``.

    The fading enters only through ``Re{rho * exp(i t_phase)}``, i.e. through
    ``cos(t_phase)`` for real correlations.  The raw value is returned and
    may be negative.

    Raises
    ------
    NonPositiveLogArgument
        If either log argument is not positive.
    """
    num, den = _rate_terms(point.rho_xs, point.rho_us, point.rho_ux, params.p, params.q, t_phase)
    if not num > 0:
        raise NonPositiveLogArgument("output-variance term", float(num))
    if not den > 0:
        raise NonPositiveLogArgument("conditional-variance term", float(den))
    return 0.5 * math.log2(num) - 0.5 * math.log2(den)


def _expected_raw(rho_xs, rho_us, rho_ux, params, dist):
    rho_xs, rho_us, rho_ux = (np.asarray(v, dtype=float) for v in (rho_xs, rho_us, rho_ux))
    if isinstance(dist, Binomial):
        d = dist.delta
        return 0.5 * (rate_rt_raw(rho_xs, rho_us, rho_ux, params, d)
                      + rate_rt_raw(rho_xs, rho_us, rho_ux, params, -d))

    xs, us, ux = (np.broadcast_to(v, np.broadcast_shapes(rho_xs.shape, rho_us.shape, rho_ux.shape)).ravel()
                  for v in (rho_xs, rho_us, rho_ux))

    def integrand(t, idx):
        return rate_rt_raw(xs[idx, None], us[idx, None], ux[idx, None], params, t)

    two_pi = 2 * np.pi
    avg = simpson_doubling_batch(integrand, xs.size, 0.0, two_pi, tol=UNIFORM_TOL * two_pi) / two_pi
    return avg.reshape(np.broadcast_shapes(rho_xs.shape, rho_us.shape, rho_ux.shape))


def expected_gaussian_rate(point: SignalingPoint, params: ChannelParams, dist: FadingDist) -> float:
    """Fading-averaged rate of a signaling point."""
    if isinstance(dist, Binomial):
        d = dist.delta
        return 0.5 * (rate_rt(point, params, d) + rate_rt(point, params, -d))
    # surfaces log-argument errors with the offending phase
    for t in np.linspace(0, 2 * np.pi, 65):
        rate_rt(point, params, t)
    v = float(_expected_raw(point.rho_xs, point.rho_us, point.rho_ux, params, dist))
    if not math.isfinite(v):
        raise QuadratureDidNotConverge(f"phase average did not converge at {point}")
    return v


def maximize_gaussian_rate(params: ChannelParams, dist: FadingDist, spec: OptSpec = OptSpec()) -> BoundResult:
    """Best Gaussian-signaling rate over the correlation surface.

    Searches (rho_xs, rho_us) on the box shrunk by ``EPS_BND`` for both signs
    of rho_ux.  Grid points off the surface, or whose correlation triple is
    not realisable by any Gaussian (X, S, U), are skipped.
    """
    b = 1 - EPS_BND
    # uniform fading holds a (points x abscissae) array per block
    chunk = 1 << 17 if isinstance(dist, Binomial) else 2048
    box = Box([(-b, b), (-b, b)])
    best = None
    evals = 0
    for sign in (+1, -1):
        def objective(pts, sign=sign):
            xs, us = pts[:, 0], pts[:, 1]
            rad = region_a_radicand(xs, us)
            ok = (rad >= 0) & (rad <= (1 - EPS_BND) ** 2)
            ux = sign * np.sqrt(np.clip(rad, 0, None))
            ok &= joint_law_determinant(xs, us, ux) >= -JOINT_LAW_TOL
            r = _expected_raw(xs, us, ux, params, dist)
            ok &= np.isfinite(r)
            return np.where(ok, r, -np.inf)

        try:
            arg, val, n = optimize_box(objective, box, "max", spec, allow_infeasible=True, chunk=chunk)
        except NoFeasiblePoint:
            continue
        evals += n
        if best is None or val > best[1]:
            ux = sign * math.sqrt(max(region_a_radicand(arg[0], arg[1]), 0.0))
            best = ((float(arg[0]), float(arg[1]), ux), val)
    if best is None:
        raise NoFeasiblePoint("no feasible signaling point on the search grid")
    (xs, us, ux), val = best
    return BoundResult(val, {"rho_xs": xs, "rho_us": us, "rho_ux": ux}, evals)


def costa_rate_lambda(params: ChannelParams, a: float, lam: float) -> float:
    """Rate of U = X + lam*S on Y = X + a*S + Z (half-log convention)."""
    p, q = params.p, params.q
    if not p > 0:
        raise ValueError("p must be > 0")
    return 0.5 * math.log2((p + a * a * q + 1) / (1 + q / p * (lam * lam + p * (a - lam) ** 2)))


def costa_mismatch_rate(params: ChannelParams, a: float, eps: float) -> float:
    """Rate when pre-coding uses the gain a + eps instead of a."""
    p, q = params.p, params.q
    if not p > 0:
        raise ValueError("p must be > 0")
    g = p + a * a * q + 1
    return 0.5 * math.log2((1 + p) * g / (g + q * p * eps * eps))


def costa_point(params: ChannelParams, lam: float | None = None) -> SignalingPoint:
    """Signaling point of U = X + lam*S with X independent of S.

    ``lam`` defaults to P/(P+1).
    """
    p, q = params.p, params.q
    if lam is None:
        lam = p / (p + 1)
    var_u = p + lam * lam * q
    rho_us = lam * math.sqrt(q / var_u)
    rho_ux = math.sqrt(p / var_u)
    if rho_ux > 1 - EPS_BND:
        rho_ux = 1 - EPS_BND
        rho_us = math.sqrt(1 - rho_ux**2)
    return SignalingPoint(0.0, rho_us, rho_ux)
