"""
Uniform phase: closed forms versus the phase integrals
======================================================

The closed-form inner bound subtracts three bits of slack.  Evaluating the
phase integrals directly shows how much of that slack is real.
"""

import math

import numpy as np

from fading_dirt import bounds_uniform as bu
from fading_dirt.core import ChannelParams
from fading_dirt.sweep import exact_uniform_best

print("     P        Q   outer   inner  exact-in   gap")
for p in (500.0, 1000.0):
    for ratio in (0.1, 1.0, 10.0):
        pr = ChannelParams(p, ratio * p)
        outer = bu.uniform_outer(pr)
        inner = bu.maximize_uniform_inner(pr)
        exact, alpha = exact_uniform_best(pr)
        print(f"{p:6g} {pr.q:8g} {outer:7.3f} {inner.value:7.3f} {exact:9.3f} {outer - inner.value:6.3f}")

# the averaged log that appears in the converse, with its closed form
print("\n      Q   integral   closed form   0.5*log2(Q+1)-1")
for q in [0.0] + [10.0**k for k in range(0, 7, 2)]:
    print(f"{q:8g} {bu.circular_log_integral(q):10.6f} {bu.circular_log_integral_closed(q):13.6f} "
          f"{0.5 * math.log2(q + 1) - 1:17.6f}")

# alpha sweep: closed form vs exact integral at one point
pr = ChannelParams(500.0, 50.0)
print(f"\nalpha sweep at P={pr.p:g}, Q={pr.q:g}")
for a in np.linspace(0, 1, 6):
    u = bu.UniformInnerParams(float(a))
    print(f"  alpha={a:.1f}  closed {bu.uniform_inner(pr, u):7.3f}  exact {bu.uniform_inner_exact(pr, u):7.3f}")
