"""
Dirty paper coding when the interference phase is unknown
=========================================================

With no fading, pre-coding against the interference recovers the
interference-free rate 0.5*log2(1+P).  Here we watch that rate erode as the
phase uncertainty grows, and as the pre-coder's estimate of the gain drifts.
"""

import math

import numpy as np

from fading_dirt.core import Binomial, ChannelParams, Uniform
from fading_dirt.gaussian_signaling import costa_mismatch_rate, maximize_gaussian_rate

params = ChannelParams(p=10.0, q=10.0)
print(f"P = {params.p:g}, Q = {params.q:g}, interference-free rate {0.5 * math.log2(1 + params.p):.4f} bits")

# best Gaussian signaling against two equiprobable phases +-delta
print("\n delta    rate")
for delta in np.linspace(0, math.pi / 2, 7):
    r = maximize_gaussian_rate(params, Binomial(float(delta)))
    print(f" {delta:5.3f}  {r.value:7.4f}")

# a uniformly random phase is the hardest case
r = maximize_gaussian_rate(params, Uniform())
print(f"uniform  {r.value:7.4f}   (rho = {r.params['rho_xs']:.3g}, {r.params['rho_us']:.3g}, {r.params['rho_ux']:.3g})")

# pre-coding for the gain a + eps instead of a; the rate falls off fast
print("\n   eps   rate (raw, may go negative)")
for eps in (0.0, 0.1, 0.3, 1.0, 3.0, 10.0):
    print(f" {eps:5.1f}  {costa_mismatch_rate(ChannelParams(3, 5), 1.0, eps):8.4f}")
