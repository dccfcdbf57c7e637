"""
Inner and outer bounds for two fading phases
============================================

For theta = +-delta we tabulate the power-split inner bound, its simplified
closed form, and the closed-form outer bounds, then look at the gap between
the simplified outer bound and the best inner bound.
"""

import math

from fading_dirt import bounds_binomial as bb
from fading_dirt.core import ChannelParams

delta = math.pi / 2
print("     P        Q   inner  simple-in  carbon   simple-out   gap")
for p in (1.0, 10.0, 100.0, 1000.0):
    for ratio in (0.1, 1.0, 10.0):
        pr = ChannelParams(p, ratio * p)
        best = bb.maximize_inner_binomial(pr, delta)
        lem = bb.simple_inner_binomial(pr, delta)
        cc = bb.carbon_copy_outer(pr, delta)
        so = bb.simple_outer_binomial(pr, delta)
        print(f"{p:7g} {pr.q:8g} {best.value:7.3f} {lem:9.3f} {cc:8.3f} {so:10.3f} {so - best.value:7.3f}")

# the power split that achieves the inner bound at one point
pr = ChannelParams(100.0, 1000.0)
r = bb.maximize_inner_binomial(pr, delta)
print(f"\nat P=100, Q=1000: alpha={r.params['alpha']:.3f}, beta={r.params['beta']:.3f}")
for name, term in zip(("real axis", "noise codeword", "binned, +delta", "binned, -delta"),
                      bb.inner_binomial_terms(pr, delta, r.params["alpha"], r.params["beta"])):
    print(f"  {name:15s} {float(term):.4f}")

# the genie-aided expression as printed can be driven below every inner
# bound, so it is shown for reference only
g = bb.genie_outer_bound(ChannelParams(4.0, 1.0), delta)
print(f"\ngenie expression at P=4, Q=1: {g.value:.3f}  (inner bound "
      f"{bb.maximize_inner_binomial(ChannelParams(4.0, 1.0), delta).value:.3f})")
