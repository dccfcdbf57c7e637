"""
Channel model for the dirty paper channel with phase fading.

A single channel use is

    Y = X + exp(i*theta) * S_R + Z

where X is the complex input, S_R ~ N(0, Q) is the real interference known
at the transmitter, theta is the phase fading known at the receiver and Z is
complex Gaussian noise.  Complex quantities are numpy complex128, i.e. pairs
of double-precision reals.

Random streams use numpy's Philox counter-based bit generator keyed by a
64-bit seed, so any (seed, call) pair reproduces bit-identical samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

Seed = int

_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class ChannelParams:
    """Transmit power ``p`` and interference power ``q`` (linear units)."""

    p: float
    q: float

    def __post_init__(self):
        for name in ("p", "q"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and nonnegative, got {v!r}")


@dataclass(frozen=True)
class Binomial:
    """Circular binomial fading: theta = +delta or -delta, equiprobable."""

    delta: float

    def __post_init__(self):
        if not (0.0 <= self.delta <= math.pi / 2):
            raise ValueError(f"delta must lie in [0, pi/2], got {self.delta!r}")

    @property
    def name(self) -> str:
        return "binomial"


@dataclass(frozen=True)
class Uniform:
    """Circular uniform fading: theta uniform on [0, 2*pi)."""

    @property
    def name(self) -> str:
        return "uniform"


FadingDist = Binomial | Uniform


@dataclass(frozen=True)
class ChannelSample:
    x: complex
    s_r: float
    theta: float
    z: complex
    y: complex


def make_rng(seed: Seed) -> np.random.Generator:
    """Philox generator for a 64-bit seed."""
    if seed < 0 or seed > _SEED_MASK:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed!r}")
    return np.random.Generator(np.random.Philox(seed))


def _draw_fading(dist: FadingDist, rng: np.random.Generator, n: int) -> np.ndarray:
    if isinstance(dist, Binomial):
        signs = np.where(rng.random(n) < 0.5, 1.0, -1.0)
        return signs * dist.delta
    return rng.uniform(0.0, 2 * np.pi, n)


def fading_sample(dist: FadingDist, seed: Seed, n: int) -> np.ndarray:
    """Draw ``n`` iid fading phases (radians)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return _draw_fading(dist, make_rng(seed), n)


def sample_channel_batch(params: ChannelParams, dist: FadingDist, x, seed: Seed, n: int):
    """Vectorised channel draws.

    Returns ``(s_r, theta, z, y)`` arrays of length ``n``.  ``x`` may be a
    scalar or an array broadcastable to ``n``.  Each real and imaginary noise
    component has unit variance.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = make_rng(seed)
    theta = _draw_fading(dist, rng, n)
    s_r = rng.standard_normal(n) * math.sqrt(params.q)
    z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    x = np.broadcast_to(np.asarray(x, dtype=complex), (n,))
    y = x + np.exp(1j * theta) * s_r + z
    return s_r, theta, z, y


def sample_channel(params: ChannelParams, dist: FadingDist, x: complex, seed: Seed) -> ChannelSample:
    """One channel use with input ``x``."""
    x = complex(x)
    if not (math.isfinite(x.real) and math.isfinite(x.imag)):
        raise ValueError("x must be finite")
    s_r, theta, z, y = sample_channel_batch(params, dist, x, seed, 1)
    return ChannelSample(x=x, s_r=float(s_r[0]), theta=float(theta[0]), z=complex(z[0]), y=complex(y[0]))
