"""
Capacity bounds for circular binomial phase fading (theta = +delta or -delta).

Outer bounds: the carbon-copy bound, the genie-aided bound (a max over the
input correlation gamma of a min over genie parameters) and its piecewise
closed-form relaxation.  Inner bounds: interference-as-noise plus binning
with a two-parameter power split, and its closed form at beta = 1/2.

Raw values are returned; negative inner bounds are not clamped here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ChannelParams
from .optimize import Box, BoundResult, OptSpec, optimize_box

FOURTH_TERM_MODES = ("max", "min", "covariance")

# genie search box; any point gives a valid value for its gamma
GENIE_C_RANGE = (-10.0, 10.0)
GENIE_QPRIME_DECADES = 6
GENIE_SPEC = OptSpec(coarse_points_per_dim=11)
GAMMA_SPEC = OptSpec(coarse_points_per_dim=41, refine_rounds=1)


class DegenerateBound(ValueError):
    """The bound is +inf (or undefined) at these parameters."""


class InvalidGeniePoint(ValueError):
    def __init__(self, terms):
        self.terms = terms
        super().__init__(f"non-positive genie term(s): {terms}")


@dataclass(frozen=True)
class GenieParams:
    gamma: float
    q_prime: float
    rho: float
    c_plus: float
    c_minus: float
    c_s: float

    def __post_init__(self):
        for k, v in self.__dict__.items():
            if not math.isfinite(v):
                raise ValueError(f"{k} must be finite")
        if not 0 <= self.gamma <= 1:
            raise ValueError("gamma must lie in [0, 1]")
        if self.q_prime < 0:
            raise ValueError("q_prime must be >= 0")
        if not -1 <= self.rho <= 1:
            raise ValueError("rho must lie in [-1, 1]")


@dataclass(frozen=True)
class PowerSplit:
    alpha: float
    beta: float

    def __post_init__(self):
        if not (0 <= self.alpha <= 1 and 0 <= self.beta <= 1):
            raise ValueError("alpha and beta must lie in [0, 1]")

    @property
    def alpha_bar(self) -> float:
        return 1 - self.alpha

    @property
    def beta_bar(self) -> float:
        return 1 - self.beta


@dataclass(frozen=True)
class GenieTerms:
    t1: float
    t2: float
    t3: float
    t4: float


def _s(params: ChannelParams, delta: float) -> float:
    return math.sin(delta) ** 2 * params.q


# --------------------------------------------------------------------------
# outer bounds


def carbon_copy_outer(params: ChannelParams, delta: float) -> float:
    p, q = params.p, params.q
    s4 = 4 * math.sin(delta) ** 2 * q
    if not s4 > 0:
        raise DegenerateBound("q * sin(delta)^2 = 0: the carbon-copy bound is +inf")
    return (0.5 * math.log2(1 + p) + 0.5 * math.log2(1 + (math.sqrt(p) + math.sqrt(q)) ** 2)
            - 0.25 * math.log2(s4))


def genie_terms_raw(gamma, q_prime, rho, c_plus, c_minus, c_s, p, delta, form="printed"):
    """Vectorised T1..T4 for arrays of genie parameters.

    ``form="conditional"`` evaluates each term as the conditional variance
    it stands for, given the genie signal
    ``U = cS*S + c+*Z+ + c-*Z- + Zo`` (real part) and
    ``c+*Z+ + c-*Z- + Zo`` (imaginary part), with corr(Z+, Z-) = rho.
    ``form="printed"`` reproduces the closed-form expressions literally;
    their T1 and T2 numerators differ from the conditional variances as soon
    as c+ or c- is nonzero, and T1 can then reach 0.

    ``(1 + gamma*sqrt(P/Q'))^2 Q'`` is evaluated as ``(sqrt(Q') + gamma*sqrt(P))^2``
    so that Q' -> 0 stays finite.
    """
    sd = math.sin(delta)
    rq = np.sqrt(q_prime)
    lead = rq + gamma * math.sqrt(p)
    cross = 2 * rho * c_plus * c_minus
    den_noise = c_plus**2 + c_minus**2 + cross + 1
    den = c_s**2 * q_prime + den_noise
    if form == "printed":
        t1 = lead**2 + 1 - (lead * c_s * rq + c_plus + c_minus + cross) ** 2 / den
        t2 = p * (1 - gamma**2) + 1 - (c_plus - c_minus) ** 2 * (1 - rho) ** 2 / den
    elif form == "conditional":
        t1 = lead**2 + 1 - (lead * c_s * rq + c_plus + rho * c_minus) ** 2 / den
        t2 = p * (1 - gamma**2) + 1 - (c_plus + rho * c_minus) ** 2 / den_noise
    else:
        raise ValueError("form must be 'conditional' or 'printed'")
    t3 = 4 * sd**2 * q_prime + 2 * (1 - rho) - (2 * sd * c_s * q_prime + (c_plus - c_minus) * (1 - rho)) ** 2 / den
    t4 = 2 * (1 + rho) - (c_plus + c_minus) ** 2 * (1 + rho) ** 2 / den
    return t1, t2, t3, t4


def genie_terms(g: GenieParams, params: ChannelParams, delta: float, form: str = "printed") -> GenieTerms:
    """The four variance terms of the genie-aided bound.

    Raises
    ------
    InvalidGeniePoint
        If any term is not strictly positive.
    """
    if not g.q_prime > 0:
        raise ValueError("q_prime must be > 0")
    t = genie_terms_raw(g.gamma, g.q_prime, g.rho, g.c_plus, g.c_minus, g.c_s, params.p, delta, form)
    t = GenieTerms(*(float(v) for v in t))
    if min(t.t1, t.t2, t.t3, t.t4) <= 0:
        raise InvalidGeniePoint(t)
    return t


def genie_value(g: GenieParams, params: ChannelParams, delta: float, form: str = "printed") -> float:
    t = genie_terms(g, params, delta, form)
    return 0.5 * math.log2(t.t1 * t.t2) - 0.25 * math.log2(t.t3 * t.t4) + 1


def _genie_objective(gamma, params, delta, form):
    q = params.q

    def f(pts):
        q_prime = q * 10.0 ** pts[:, 0]
        t1, t2, t3, t4 = genie_terms_raw(gamma, q_prime, pts[:, 1], pts[:, 2], pts[:, 3], pts[:, 4],
                                         params.p, delta, form)
        ok = (t1 > 0) & (t2 > 0) & (t3 > 0) & (t4 > 0)
        with np.errstate(divide="ignore", invalid="ignore"):
            v = 0.5 * np.log2(t1 * t2) - 0.25 * np.log2(t3 * t4) + 1
        return np.where(ok, v, np.inf)

    return f


def genie_min_at_gamma(gamma: float, params: ChannelParams, delta: float, spec: OptSpec = GENIE_SPEC,
                       form: str = "printed"):
    """Minimise the genie bound over (Q', rho, c+, c-, cS) for fixed gamma.

    Q' is searched on a log scale over ``[Q * 1e-6, Q]``.  Returns
    ``(value, GenieParams, evaluations)``.
    """
    lo, hi = GENIE_C_RANGE
    box = Box([(-GENIE_QPRIME_DECADES, 0.0), (-1.0, 1.0), (lo, hi), (lo, hi), (lo, hi)])
    arg, val, n = optimize_box(_genie_objective(gamma, params, delta, form), box, "min", spec,
                               allow_infeasible=True)
    g = GenieParams(gamma, float(params.q * 10.0 ** arg[0]), *(float(v) for v in arg[1:]))
    return val, g, n


def genie_outer_bound(params: ChannelParams, delta: float, spec: OptSpec = GENIE_SPEC,
                      gamma_spec: OptSpec = GAMMA_SPEC, form: str = "printed") -> BoundResult:
    """Genie-aided outer bound: max over gamma of the min over genie parameters.

    ``spec`` drives the 5-dimensional inner minimisation and ``gamma_spec``
    the outer 1-dimensional search over gamma in [0, 1].
    """
    if not params.q > 0:
        raise ValueError("q must be > 0")
    evals = 0
    cache = {}

    def outer(pts):
        nonlocal evals
        out = np.empty(len(pts))
        for i, (gamma,) in enumerate(pts):
            if gamma not in cache:
                val, g, n = genie_min_at_gamma(float(gamma), params, delta, spec, form)
                evals += n
                cache[gamma] = (val, g)
            out[i] = cache[gamma][0]
        return out

    arg, val, _ = optimize_box(outer, Box([(0.0, 1.0)]), "max", gamma_spec)
    g = cache[arg[0]][1]
    return BoundResult(val, dict(g.__dict__), evals)


def simple_outer_binomial(params: ChannelParams, delta: float) -> float:
    """Piecewise closed-form outer bound, valid for delta in [pi/4, pi/2]."""
    if not (math.pi / 4 - 1e-12 <= delta <= math.pi / 2 + 1e-12):
        raise ValueError("delta must lie in [pi/4, pi/2]")
    p, q = params.p, params.q
    s = _s(params, delta)
    if s <= 1:
        return math.log2(p + 1) + 2
    if s >= p + 1:
        return 0.75 * math.log2(p + 1) + 2
    return (0.5 * math.log2(p + 1) + 0.5 * math.log2(1 + (math.sqrt(p) + math.sin(delta) * math.sqrt(q)) ** 2)
            - 0.25 * math.log2(2 * s) + 2)


def simple_outer_objective(params: ChannelParams, delta: float, q_prime: float, rho: float) -> float:
    """Expression minimised over (Q', rho) before the piecewise closed form."""
    p = params.p
    sd = math.sin(delta)
    s1 = sd**2 * q_prime
    return (0.5 * math.log2(1 + p) + 0.5 * math.log2(1 + (math.sqrt(p) + sd * math.sqrt(q_prime)) ** 2)
            - 0.25 * math.log2((2 * s1 + 1 - rho) * (1 + rho)) + 2)


def simple_outer_assignment(params: ChannelParams, delta: float) -> tuple[float, float]:
    """The closed-form (Q', rho) choice: rho = min(1, s), s' = min(P+1, s)."""
    sd2 = math.sin(delta) ** 2
    s = sd2 * params.q
    rho = min(1.0, s)
    q_prime = min(params.p + 1, s) / sd2 if sd2 > 0 else 0.0
    return q_prime, rho


# --------------------------------------------------------------------------
# inner bounds


def _fourth_term(a, s, mode):
    num = (a + 1) * (a + s + 1)
    if mode == "covariance":
        return 0.25 * np.log2(num / (a + 4 * s * a + s + 1))
    ratio = num / (a + 2 * s * a + s + 1)
    clamp = np.maximum if mode == "max" else np.minimum
    return 0.25 * np.log2(clamp(1.0, ratio))


def inner_binomial_terms(params: ChannelParams, delta: float, alpha, beta, fourth_term: str = "max"):
    """The four rate terms (real Costa, imaginary noise-treating codeword,
    imaginary pre-coded codeword at +delta and at -delta).  Vectorised."""
    if fourth_term not in FOURTH_TERM_MODES:
        raise ValueError(f"fourth_term must be one of {FOURTH_TERM_MODES}")
    p = params.p
    s = _s(params, delta)
    a = (1 - alpha) * beta * p
    r_real = 0.5 * np.log2(1 + (1 - beta) * p)
    r_noise = 0.5 * np.log2(1 + alpha * beta * p / (1 + a + s))
    r_plus = 0.25 * np.log2(1 + a)
    r_minus = _fourth_term(a, s, fourth_term)
    return r_real, r_noise, r_plus, r_minus


def inner_binomial(params: ChannelParams, delta: float, split: PowerSplit, fourth_term: str = "max") -> float:
    """Interference-as-noise plus binning rate for power split (alpha, beta).

    ``fourth_term`` selects the rate of the pre-coded codeword when the
    fading sign is opposite to the one pre-coded against:

    * ``"max"`` clamps the printed ratio from below at 1 (the default),
    * ``"min"`` clamps it from above at 1,
    * ``"covariance"`` uses the exact Gaussian value for the Costa
      coefficient, ``(a+1)(a+s+1) / (a + 4as + s + 1)``.
    """
    return float(sum(inner_binomial_terms(params, delta, split.alpha, split.beta, fourth_term)))


def maximize_inner_binomial(params: ChannelParams, delta: float, spec: OptSpec = OptSpec(),
                            fourth_term: str = "max") -> BoundResult:
    def f(pts):
        return sum(inner_binomial_terms(params, delta, pts[:, 0], pts[:, 1], fourth_term))

    arg, val, n = optimize_box(f, Box([(0.0, 1.0), (0.0, 1.0)]), "max", spec)
    # fixed plug-in points that the result must dominate
    for alpha, beta in ((1.0, 0.5), (0.0, 0.5), (0.0, 0.0)):
        v = inner_binomial(params, delta, PowerSplit(alpha, beta), fourth_term)
        if v > val:
            arg, val = np.array([alpha, beta]), v
    return BoundResult(float(val), {"alpha": float(arg[0]), "beta": float(arg[1])}, n + 3)


def simple_inner_binomial(params: ChannelParams, delta: float) -> float:
    """Closed-form inner bound at beta = 1/2 with alpha chosen per regime."""
    p = params.p
    s = _s(params, delta)
    h = 0.5 * math.log2(1 + p / 2)
    if s < 1:
        return h + 0.5 * math.log2(1 + p / (2 + 2 * s))
    if s >= p + 1:
        return 0.75 * math.log2(1 + p / 2) - 1
    return h + 0.5 * math.log2(0.5 + (p + 2) / (2 * s)) + 0.25 * math.log2(s) - 1.25


def trivial_outer(params: ChannelParams) -> float:
    """Rate with the interference revealed to the receiver (half-log form)."""
    return 0.5 * math.log2(1 + params.p)
