"""Bounds for circular-uniform phase fading.

The closed-form inner bound subtracts fixed slack (2 bits for the
interference-as-noise codeword, 1 bit for the binning codeword).  The
``*_exact`` variants evaluate the underlying phase integrals instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ChannelParams
from .optimize import Box, BoundResult, OptSpec, optimize_box
from .quadrature import quarter_circle_average


@dataclass(frozen=True)
class UniformInnerParams:
    alpha: float

    def __post_init__(self):
        if not (0.0 <= self.alpha <= 1.0):
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha!r}")

    @property
    def alpha_bar(self) -> float:
        return 1.0 - self.alpha


def uniform_outer(params: ChannelParams) -> float:
    p, q = params.p, params.q
    return (0.5 * math.log2(1 + p) + 0.5 * math.log2(1 + p + q + 2 * math.sqrt(p * q))
            - 0.5 * math.log2(q + 1) + 1.5)


def _inner_raw(alpha, p, q):
    alpha = np.asarray(alpha, dtype=float)
    return (0.5 * np.log2(1 + q + alpha * p) - 0.5 * math.log2(1 + q)
            + 0.5 * np.log2((1 - alpha) * p + 1) - 3)


def uniform_inner(params: ChannelParams, u: UniformInnerParams) -> float:
    """Closed-form inner bound; the raw value may be negative."""
    return float(_inner_raw(u.alpha, params.p, params.q))


def optimal_alpha(params: ChannelParams) -> float:
    """Maximiser of (1+Q+aP)(1+(1-a)P) over a in [0, 1]."""
    p, q = params.p, params.q
    if p == 0:
        return 0.0
    return min(max((p - q) / (2 * p), 0.0), 1.0)


# enough refinement for the grid optimiser to land within 1e-9 of the vertex
CROSSCHECK_SPEC = OptSpec(coarse_points_per_dim=21, refine_rounds=12)


def maximize_uniform_inner(params: ChannelParams, spec: OptSpec = CROSSCHECK_SPEC) -> BoundResult:
    """Best closed-form inner bound over alpha.

    The analytic vertex is the reported value.  The grid optimiser runs as a
    cross-check; its shortfall is stored as ``params["crosscheck_gap"]`` and
    an optimiser value above the vertex raises, since that would mean the
    vertex formula is wrong.
    """
    a = optimal_alpha(params)
    val = uniform_inner(params, UniformInnerParams(a))
    arg, num, evals = optimize_box(lambda x: _inner_raw(x[:, 0], params.p, params.q),
                                   Box([(0.0, 1.0)]), "max", spec)
    if num > val + 1e-9:
        raise RuntimeError(f"optimiser found {num!r} at alpha={arg[0]!r} above the vertex value {val!r}")
    return BoundResult(val, {"alpha": a, "crosscheck_gap": val - num}, evals)


def uniform_inner_exact(params: ChannelParams, u: UniformInnerParams, tol: float = 1e-9) -> float:
    """Phase-averaged rates of the two codewords without the closed-form slack."""
    p, q, a = params.p, params.q, u.alpha

    def integrand(t):
        s2 = np.sin(t) ** 2
        return np.stack([0.5 * np.log2(1 + a * p / (1 + q * s2)),
                         0.5 * np.log2(1 + (1 - a) * p * s2)])

    r_in, r_rc = quarter_circle_average(integrand, tol=tol)
    return float(r_in + r_rc)


def circular_log_integral(q_eff: float, tol: float = 1e-9) -> float:
    """(1/2pi) * integral over [0, 2pi] of 0.5*log2(1 + q_eff*sin(t)^2), by quadrature."""
    if not q_eff >= 0:
        raise ValueError("q_eff must be >= 0")
    return float(quarter_circle_average(lambda t: 0.5 * np.log2(1 + q_eff * np.sin(t) ** 2), tol=tol))


def circular_log_integral_closed(q_eff: float) -> float:
    return math.log2((1 + math.sqrt(1 + q_eff)) / 2)
