"""Oracle-equivalence checks shared by the ``verify`` command and the tests."""

from __future__ import annotations

import csv
import math
import time

import numpy as np

from . import bounds_binomial as bb
from . import bounds_uniform as bu
from . import oracle
from .core import ChannelParams
from .gaussian_signaling import rate_rt
from .optimize import EPS_BND, SignalingPoint, region_a_project
from .sweep import Row

ENTROPY_N01 = 0.5 * math.log2(2 * math.pi * math.e)


def random_signaling_point(rng: np.random.Generator) -> SignalingPoint:
    """A point on the correlation surface that is also a valid joint law.

    On the surface the joint-law determinant is 2*rho_xs*rho_us*(rho_ux - 1),
    so rho_xs and rho_us must not share a sign.
    """
    while True:
        xs = rng.uniform(-0.99, 0.99)
        us = -math.copysign(1.0, xs) * rng.uniform(0.0, 0.99)
        pt = region_a_project(xs, us, int(rng.choice([1, -1])))
        if pt is not None and pt.is_joint_law() and abs(pt.rho_ux) < 1 - 10 * EPS_BND:
            return pt


def random_params(rng: np.random.Generator, lo: float = -1.0, hi: float = 3.0) -> ChannelParams:
    return ChannelParams(10 ** rng.uniform(lo, hi), 10 ** rng.uniform(lo, hi))


def random_psd(rng: np.random.Generator, d: int) -> np.ndarray:
    a = rng.standard_normal((d, d))
    return a @ a.T + 0.1 * np.eye(d)


def check_rate_rt(seed: int, n: int = 100, tol: float = 1e-9):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        pt = random_signaling_point(rng)
        pr = random_params(rng)
        t = float(rng.choice([0.0, math.pi]))
        cov = oracle.costa_covariance(pt, pr, t)
        mi = oracle.gaussian_mi(cov, ["U"], ["Y"]) - oracle.gaussian_mi(cov, ["U"], ["S"])
        worst = max(worst, abs(mi - rate_rt(pt, pr, t)))
    return worst <= tol, f"max |diff| {worst:.3g} over {n} points"


def check_scheme_terms(seed: int, n: int = 20, tol: float = 1e-9):
    rng = np.random.default_rng(seed + 1)
    worst = 0.0
    for _ in range(n):
        split = bb.PowerSplit(rng.uniform(), rng.uniform())
        pr = random_params(rng)
        delta = rng.uniform(0.05, math.pi / 2)
        r_noise, r_plus, r_minus = oracle.scheme_rate_terms(split, pr, delta)
        _, t2, t3, t4 = bb.inner_binomial_terms(pr, delta, split.alpha, split.beta, "covariance")
        worst = max(worst, abs(r_noise - t2), abs(r_plus - t3), abs(r_minus - t4))
    return worst <= tol, f"max |diff| {worst:.3g} over {n} splits"


def check_chain_rule(seed: int, n: int = 50, tol: float = 1e-10):
    rng = np.random.default_rng(seed + 2)
    worst = 0.0
    for _ in range(n):
        cov = oracle.CovarianceMatrix(random_psd(rng, 5))
        lhs = oracle.gaussian_mi(cov, [0], [1, 2, 3])
        rhs = oracle.gaussian_mi(cov, [0], [3]) + oracle.gaussian_mi(cov, [0], [1, 2], [3])
        worst = max(worst, abs(lhs - rhs))
    return worst <= tol, f"max |diff| {worst:.3g} over {n} matrices"


def check_circular_integral(tol: float = 1e-8):
    worst, slack = 0.0, math.inf
    for q in [0.0] + [10.0**k for k in range(7)]:
        v = bu.circular_log_integral(q)
        worst = max(worst, abs(v - bu.circular_log_integral_closed(q)))
        slack = min(slack, v - (0.5 * math.log2(q + 1) - 1))
    return worst <= tol and slack >= 0, f"max |quad - closed| {worst:.3g}, min slack {slack:.4g}"


def check_entropy(seed: int, samples: int):
    mix = oracle.GaussianMixture([(1.0, [0.0], [[1.0]])])
    est, se = oracle.mixture_entropy_mc(mix, samples, seed)
    z = abs(est - ENTROPY_N01) / se
    return z <= 3, f"estimate {est:.6f} vs {ENTROPY_N01:.6f}, {z:.2f} stderr"


def run_all(seed: int, samples: int):
    checks = [
        ("rate_rt_vs_gaussian_mi", lambda: check_rate_rt(seed)),
        ("scheme_terms_vs_covariance", lambda: check_scheme_terms(seed)),
        ("gaussian_mi_chain_rule", lambda: check_chain_rule(seed)),
        ("circular_log_integral", check_circular_integral),
        ("mixture_entropy_mc", lambda: check_entropy(seed, samples)),
    ]
    out = []
    for name, fn in checks:
        t = time.perf_counter()
        ok, detail = fn()
        out.append((name, bool(ok), detail, time.perf_counter() - t))
    return out


def read_rows(path) -> list[Row]:
    """Parse a CSV written by ``write_csv`` back into rows (params are dropped)."""
    with open(path, encoding="utf-8", newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    rows = []
    for rec in csv.DictReader(lines):
        delta = float(rec["delta"]) if rec["delta"] else None
        rows.append(Row(rec["dist"], delta, float(rec["P"]), float(rec["Q"]), rec["bound"], float(rec["value"])))
    return rows
