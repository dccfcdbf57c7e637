"""
Independent checks built from explicit covariance matrices.

Mutual information between jointly Gaussian blocks is computed from
log-determinants, and mixture entropies by Monte Carlo with the exact
mixture density.  Nothing here shares code with the closed-form bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import logsumexp
from scipy.stats import multivariate_normal

from .bounds_binomial import PowerSplit
from .core import ChannelParams, Seed
from .optimize import SignalingPoint

SYM_TOL = 1e-12
PSD_TOL = 1e-9
DET_FLOOR = 1e-300
MC_CHUNK = 1 << 16
JACKKNIFE_BLOCKS = 100


class SingularSubmatrix(ValueError):
    def __init__(self, indices):
        self.indices = tuple(indices)
        super().__init__(f"principal submatrix on {self.indices} is singular")


class CovarianceMatrix:
    """Symmetric PSD matrix with a name for each coordinate."""

    def __init__(self, entries, labels: Sequence[str] | None = None):
        m = np.array(entries, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("covariance must be a square matrix")
        if np.max(np.abs(m - m.T), initial=0.0) > SYM_TOL:
            raise ValueError("covariance is not symmetric")
        m = (m + m.T) / 2
        if m.size and np.linalg.eigvalsh(m)[0] < -PSD_TOL:
            raise ValueError("covariance is not positive semidefinite")
        if labels is None:
            labels = [str(i) for i in range(len(m))]
        labels = list(labels)
        if len(labels) != len(m) or len(set(labels)) != len(labels):
            raise ValueError("need one distinct label per coordinate")
        self.entries = m
        self.labels = labels

    @property
    def dim(self) -> int:
        return len(self.entries)

    def index(self, names) -> list[int]:
        return [self.labels.index(n) if isinstance(n, str) else int(n) for n in names]

    def logdet2(self, idx) -> float:
        """log2 det of the principal submatrix on ``idx`` (0 for the empty set)."""
        idx = sorted(idx)
        if not idx:
            return 0.0
        w = np.linalg.eigvalsh(self.entries[np.ix_(idx, idx)])
        if w[0] <= 0 or np.prod(w) <= DET_FLOOR:
            raise SingularSubmatrix([self.labels[i] for i in idx])
        return float(np.sum(np.log2(w)))

    def __repr__(self):
        return f"CovarianceMatrix(labels={self.labels})"


def gaussian_mi(cov: CovarianceMatrix, set_a, set_b, set_c=()) -> float:
    """I(A; B | C) in bits for jointly Gaussian coordinates.

    Sets are sequences of indices or labels and must be disjoint.
    """
    a, b, c = (set(cov.index(s)) for s in (set_a, set_b, set_c))
    if a & b or a & c or b & c:
        raise ValueError("index sets must be disjoint")
    if not a or not b:
        raise ValueError("set_a and set_b must be nonempty")
    return 0.5 * (cov.logdet2(a | c) + cov.logdet2(b | c) - cov.logdet2(c) - cov.logdet2(a | b | c))


# --------------------------------------------------------------------------
# covariance assembly


def costa_covariance(point: SignalingPoint, params: ChannelParams, t_phase: float) -> CovarianceMatrix:
    """Joint law of (U, S, Y) for real signaling with Y = X + cos(t) S + Z.

    U has unit variance.  Only t in {0, pi} gives a real scalar channel
    whose mutual informations reproduce ``rate_rt`` exactly.
    """
    p, q = params.p, params.q
    c = math.cos(t_phase)
    sp, sq = math.sqrt(p), math.sqrt(q)
    # rows/cols: X, S, U, Z, then Y = X + cS + Z
    base = np.array([
        [p, point.rho_xs * sp * sq, point.rho_ux * sp, 0.0],
        [point.rho_xs * sp * sq, q, point.rho_us * sq, 0.0],
        [point.rho_ux * sp, point.rho_us * sq, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ])
    lin = np.array([[0, 0, 1, 0], [0, 1, 0, 0], [1, c, 0, 1]], dtype=float)
    return CovarianceMatrix(lin @ base @ lin.T, ["U", "S", "Y"])


def precoding_coefficient(split: PowerSplit, params: ChannelParams, delta: float) -> float:
    """Coefficient on S_R in U_IP, pre-coded for the +delta fading state."""
    a = split.alpha_bar * split.beta * params.p
    return a / (a + 1) * math.sin(delta)


def scheme_covariance_binomial(split: PowerSplit, params: ChannelParams, delta: float,
                               theta_sign: int) -> CovarianceMatrix:
    """Covariance of (X_IN, X_IP, U_IP, S_R, Y_I) given theta = theta_sign * delta.

    Y_I = X_IN + X_IP + sin(theta) S_R + Z_I on the imaginary axis, with
    unit-variance Z_I.  U_IP = X_IP + lam S_R is pre-coded for theta = +delta.
    """
    if theta_sign not in (+1, -1):
        raise ValueError("theta_sign must be +1 or -1")
    p, q = params.p, params.q
    v_in = split.alpha * split.beta * p
    v_ip = split.alpha_bar * split.beta * p
    lam = precoding_coefficient(split, params, delta)
    st = theta_sign * math.sin(delta)
    # independent sources X_IN, X_IP, S_R, Z_I
    src = np.diag([v_in, v_ip, q, 1.0])
    lin = np.array([
        [1, 0, 0, 0],       # X_IN
        [0, 1, 0, 0],       # X_IP
        [0, 1, lam, 0],     # U_IP
        [0, 0, 1, 0],       # S_R
        [1, 1, st, 1],      # Y_I
    ], dtype=float)
    return CovarianceMatrix(lin @ src @ lin.T, ["X_IN", "X_IP", "U_IP", "S_R", "Y_I"])


def scheme_rate_terms(split: PowerSplit, params: ChannelParams, delta: float) -> tuple[float, float, float]:
    """Imaginary-axis rates of the scheme from covariances.

    Returns (noise-treating codeword, pre-coded codeword at +delta,
    pre-coded codeword at -delta), each already weighted by the 1/2
    probability of its fading state where applicable.  The pre-coded
    codeword is decoded after X_IN; its rate at -delta is not clipped.
    """
    covs = {s: scheme_covariance_binomial(split, params, delta, s) for s in (+1, -1)}
    r_noise = 0.5 * sum(gaussian_mi(c, ["Y_I"], ["X_IN"]) for c in covs.values())
    if split.alpha_bar * split.beta * params.p == 0:
        return r_noise, 0.0, 0.0
    r_pm = []
    for s in (+1, -1):
        c = covs[s]
        r_pm.append(0.5 * (gaussian_mi(c, ["U_IP"], ["Y_I"], ["X_IN"]) - gaussian_mi(c, ["U_IP"], ["S_R"])))
    return r_noise, r_pm[0], r_pm[1]


# --------------------------------------------------------------------------
# mixtures


@dataclass(frozen=True)
class GaussianMixture:
    weights: tuple
    means: tuple
    covs: tuple

    def __init__(self, components):
        comps = list(components)
        if not comps:
            raise ValueError("mixture needs at least one component")
        w = np.array([c[0] for c in comps], dtype=float)
        if np.any(w <= 0) or abs(w.sum() - 1) > 1e-12:
            raise ValueError("weights must be positive and sum to 1")
        means = [np.atleast_1d(np.asarray(c[1], dtype=float)) for c in comps]
        covs = [c[2] if isinstance(c[2], CovarianceMatrix) else CovarianceMatrix(np.atleast_2d(c[2]))
                for c in comps]
        d = len(means[0])
        if any(len(m) != d or cv.dim != d for m, cv in zip(means, covs)):
            raise ValueError("component dimensions differ")
        object.__setattr__(self, "weights", tuple(w))
        object.__setattr__(self, "means", tuple(means))
        object.__setattr__(self, "covs", tuple(covs))

    @property
    def dim(self) -> int:
        return len(self.means[0])

    def logpdf(self, x: np.ndarray) -> np.ndarray:
        """Natural-log density at the rows of ``x``."""
        x = np.asarray(x, dtype=float).reshape(-1, self.dim)
        parts = [math.log(w) + np.atleast_1d(multivariate_normal(m, c.entries).logpdf(x))
                 for w, m, c in zip(self.weights, self.means, self.covs)]
        return logsumexp(np.stack(parts), axis=0)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        k = rng.choice(len(self.weights), size=n, p=self.weights)
        out = np.empty((n, self.dim))
        for j, (m, c) in enumerate(zip(self.means, self.covs)):
            sel = k == j
            out[sel] = rng.multivariate_normal(m, c.entries, size=int(sel.sum()), method="eigh")
        return out


def _chunk_rng(seed: Seed, k: int) -> np.random.Generator:
    # each chunk gets its own Philox key, so chunks can run in any order
    return np.random.Generator(np.random.Philox(key=int(seed) + (k << 64)))


def mixture_entropy_mc(mix: GaussianMixture, n: int, seed: Seed) -> tuple[float, float]:
    """Resubstitution estimate of the differential entropy in bits.

    Returns ``(estimate, stderr)``; the standard error is a delete-one-block
    jackknife over ``JACKKNIFE_BLOCKS`` contiguous blocks of samples.
    """
    if n < 1000:
        raise ValueError("n must be >= 1000")
    if not 0 <= seed < 1 << 64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    vals = np.empty(n)
    for k, start in enumerate(range(0, n, MC_CHUNK)):
        m = min(MC_CHUNK, n - start)
        x = mix.sample(_chunk_rng(seed, k), m)
        vals[start:start + m] = -mix.logpdf(x) / math.log(2)
    est = float(vals.mean())
    blocks = np.array_split(vals, JACKKNIFE_BLOCKS)
    sums = np.array([b.sum() for b in blocks])
    sizes = np.array([len(b) for b in blocks])
    loo = (vals.sum() - sums) / (n - sizes)
    g = len(blocks)
    stderr = float(math.sqrt((g - 1) / g * np.sum((loo - loo.mean()) ** 2)))
    return est, stderr
