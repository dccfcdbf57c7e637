import math

import numpy as np
import pytest
from scipy import integrate

from conftest import HALF_PI, log2
from fading_dirt.bounds_binomial import PowerSplit, inner_binomial_terms
from fading_dirt.core import ChannelParams
from fading_dirt.gaussian_signaling import rate_rt
from fading_dirt.optimize import SignalingPoint
from fading_dirt.oracle import (CovarianceMatrix, GaussianMixture, SingularSubmatrix, costa_covariance,
                                gaussian_mi, mixture_entropy_mc, precoding_coefficient, scheme_covariance_binomial,
                                scheme_rate_terms)
from fading_dirt.verify import (ENTROPY_N01, check_chain_rule, check_rate_rt, check_scheme_terms, random_psd,
                                random_signaling_point)

C = ChannelParams


def test_covariance_validation():
    with pytest.raises(ValueError):
        CovarianceMatrix([[1, 0.5], [0.4, 1]])
    with pytest.raises(ValueError):
        CovarianceMatrix([[1, 2], [2, 1]])
    with pytest.raises(ValueError):
        CovarianceMatrix(np.eye(2), ["a", "a"])
    with pytest.raises(ValueError):
        CovarianceMatrix(np.ones(3))
    cov = CovarianceMatrix(np.eye(2), ["x", "y"])
    assert cov.dim == 2 and cov.index(["y", 0]) == [1, 0]


def test_mi_independent():
    assert gaussian_mi(CovarianceMatrix(np.eye(2)), [0], [1]) == 0.0


def test_mi_one_bit():
    r = math.sqrt(0.75)
    assert gaussian_mi(CovarianceMatrix([[1, r], [r, 1]]), [0], [1]) == pytest.approx(1.0, abs=1e-12)


def test_mi_set_checks():
    cov = CovarianceMatrix(np.eye(3))
    with pytest.raises(ValueError):
        gaussian_mi(cov, [0], [0, 1])
    with pytest.raises(ValueError):
        gaussian_mi(cov, [], [1])


def test_singular_submatrix_named():
    cov = CovarianceMatrix([[1, 1, 0], [1, 1, 0], [0, 0, 1]], ["a", "b", "c"])
    with pytest.raises(SingularSubmatrix) as e:
        gaussian_mi(cov, ["a"], ["b"])
    assert set(e.value.indices) == {"a", "b"}


def test_chain_rule_random():
    rng = np.random.default_rng(0)
    for _ in range(50):
        cov = CovarianceMatrix(random_psd(rng, 4))
        lhs = gaussian_mi(cov, [0], [1, 2], [3])
        rhs = gaussian_mi(cov, [0], [1, 2, 3]) - gaussian_mi(cov, [0], [3])
        assert lhs == pytest.approx(rhs, abs=1e-10)
        assert lhs >= -1e-12
    assert check_chain_rule(1)[0]


def test_data_processing_linear_append():
    rng = np.random.default_rng(1)
    for _ in range(30):
        m = random_psd(rng, 3)
        w = rng.standard_normal(2)
        # append B' = w . (x1, x2) + N with N independent, so A - B - B' is a Markov chain
        lin = np.vstack([np.eye(3), [0, w[0], w[1]]])
        big = CovarianceMatrix(lin @ m @ lin.T + 1e-2 * np.diag([0, 0, 0, 1]))
        small = CovarianceMatrix(m)
        base = gaussian_mi(small, [0], [1, 2])
        assert gaussian_mi(big, [0], [1, 2, 3]) == pytest.approx(base, abs=1e-9)


def test_deterministic_append_is_singular():
    m = random_psd(np.random.default_rng(2), 3)
    lin = np.vstack([np.eye(3), [0, 1.0, -2.0]])
    with pytest.raises(SingularSubmatrix):
        gaussian_mi(CovarianceMatrix(lin @ m @ lin.T), [0], [1, 2, 3])


# -- scheme covariance --------------------------------------------------------

def test_scheme_output_variance():
    split, pr, d = PowerSplit(0.3, 0.6), C(8, 4), 0.9
    for sign in (+1, -1):
        cov = scheme_covariance_binomial(split, pr, d, sign)
        y = cov.index(["Y_I"])[0]
        assert cov.entries[y, y] == pytest.approx(0.6 * 8 + math.sin(d) ** 2 * 4 + 1, abs=1e-12)
    with pytest.raises(ValueError):
        scheme_covariance_binomial(split, pr, d, 0)


def test_scheme_degenerate_split():
    cov = scheme_covariance_binomial(PowerSplit(1.0, 0.5), C(8, 4), HALF_PI, +1)
    xip, u, s = cov.index(["X_IP", "U_IP", "S_R"])
    assert cov.entries[xip, xip] == 0
    lam = precoding_coefficient(PowerSplit(1.0, 0.5), C(8, 4), HALF_PI)
    np.testing.assert_allclose(cov.entries[u], lam * cov.entries[s], atol=1e-15)


def test_scheme_noise_term_example():
    split, pr = PowerSplit(0.5, 0.5), C(8, 4)
    mis = []
    for sign in (+1, -1):
        cov = scheme_covariance_binomial(split, pr, HALF_PI, sign)
        assert np.linalg.eigvalsh(cov.entries)[0] >= -1e-12
        mis.append(gaussian_mi(cov, ["Y_I"], ["X_IN"]))
    assert np.mean(mis) == pytest.approx(0.5 * log2(1 + 2 / 7), abs=1e-9)
    assert np.mean(mis) == pytest.approx(0.181285, abs=1e-6)


def test_scheme_terms_random():
    ok, detail = check_scheme_terms(7, n=40)
    assert ok, detail


def test_fourth_term_resolution():
    """The covariance rate at the opposite fading sign sits below the printed
    ratio, which in turn sits below the clamped default."""
    rng = np.random.default_rng(4)
    for _ in range(40):
        split = PowerSplit(rng.uniform(), rng.uniform())
        pr = C(10 ** rng.uniform(-1, 3), 10 ** rng.uniform(-1, 3))
        d = rng.uniform(0.1, HALF_PI)
        r_minus = scheme_rate_terms(split, pr, d)[2]
        t_max = inner_binomial_terms(pr, d, split.alpha, split.beta, "max")[3]
        t_min = inner_binomial_terms(pr, d, split.alpha, split.beta, "min")[3]
        a = split.alpha_bar * split.beta * pr.p
        s = math.sin(d) ** 2 * pr.q
        printed = 0.25 * math.log2((a + 1) * (a + s + 1) / (a + 2 * a * s + s + 1))
        assert r_minus <= printed + 1e-12
        assert t_min <= printed + 1e-12 <= t_max + 2e-12
        assert t_max >= 0


def test_costa_oracle():
    for p, q in [(3, 5), (1, 1), (100, 10), (0.5, 40)]:
        pr = C(p, q)
        pt = SignalingPoint(0.0, math.sqrt(q / (p + q)), math.sqrt(p / (p + q)))
        cov = costa_covariance(pt, pr, 0.0)
        mi = gaussian_mi(cov, ["U"], ["Y"]) - gaussian_mi(cov, ["U"], ["S"])
        assert mi == pytest.approx(rate_rt(pt, pr, 0.0), abs=1e-9)


def test_rate_rt_random_points():
    ok, detail = check_rate_rt(3, n=100)
    assert ok, detail
    rng = np.random.default_rng(9)
    for _ in range(50):
        assert random_signaling_point(rng).is_joint_law()


# -- mixtures -----------------------------------------------------------------

def test_mixture_validation():
    with pytest.raises(ValueError):
        GaussianMixture([(0.5, [0.0], [[1.0]])])
    with pytest.raises(ValueError):
        GaussianMixture([])
    with pytest.raises(ValueError):
        GaussianMixture([(0.5, [0.0], [[1.0]]), (0.5, [0.0, 1.0], np.eye(2))])
    with pytest.raises(ValueError):
        mixture_entropy_mc(GaussianMixture([(1.0, [0.0], [[1.0]])]), 999, 0)


def test_single_gaussian_entropy():
    est, se = mixture_entropy_mc(GaussianMixture([(1.0, [0.0], [[1.0]])]), 10**6, 1)
    assert abs(est - ENTROPY_N01) <= 3 * se
    assert 0 < se < 0.01


def test_degenerate_mixture():
    mix = GaussianMixture([(0.3, [0.0], [[1.0]]), (0.7, [0.0], [[1.0]])])
    est, se = mixture_entropy_mc(mix, 10**5, 2)
    assert abs(est - ENTROPY_N01) <= 3 * se


def test_two_component_vs_quadrature():
    mix = GaussianMixture([(0.5, [-3.0], [[1.0]]), (0.5, [3.0], [[1.0]])])

    def h(x):
        f = math.exp(mix.logpdf(np.array([[x]]))[0])
        return -f * math.log2(f) if f > 0 else 0.0

    ref, _ = integrate.quad(h, -15, 15, points=[-3, 0, 3], epsabs=1e-12, limit=200)
    est, se = mixture_entropy_mc(mix, 10**6, 3)
    assert abs(est - ref) <= 3 * se


def test_mixture_determinism():
    mix = GaussianMixture([(0.4, [0.0, 1.0], np.eye(2)), (0.6, [2.0, 0.0], [[2.0, 0.5], [0.5, 1.0]])])
    a = mixture_entropy_mc(mix, 5000, 11)
    assert a == mixture_entropy_mc(mix, 5000, 11)
    assert a != mixture_entropy_mc(mix, 5000, 12)
