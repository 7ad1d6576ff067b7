"""Scalar functionals: entropy, the Poisson entropy curve, entropy power,
relative entropy, and the L / Lambda / U functionals."""

import math

import mpmath as mp
import numpy as np
import pytest

from thinpower import (DomainError, FamilySpec, FinitePmf, ParameterError,
                       construct, convolve, entropy, entropy_power, is_ulc,
                       l_functional, lambda_functional, mean, poisson_entropy,
                       poisson_entropy_derivative, random_ulc,
                       rel_entropy_poisson, thin, u_functional)

bern = lambda p: construct(FamilySpec.bernoulli(p))
poi = lambda r: construct(FamilySpec.poisson(r))

mp.mp.dps = 40


def _poisson_entropy_mp(t):
    """Extended-precision oracle for H(Poisson(t))."""
    t = mp.mpf(t)
    total = mp.mpf(0)
    for z in range(int(t + 12 * mp.sqrt(t) + 60)):
        logp = z * mp.log(t) - t - mp.loggamma(z + 1)
        total -= mp.e ** logp * logp
    return float(total)


def _poisson_j_mp(t):
    """Extended-precision oracle for the entropy derivative."""
    t = mp.mpf(t)
    total = mp.mpf(0)
    for z in range(int(t + 12 * mp.sqrt(t) + 60)):
        logp = z * mp.log(t) - t - mp.loggamma(z + 1)
        total += mp.e ** logp * mp.log(mp.mpf(z + 1) / t)
    return float(total)


def test_entropy_of_point_masses_is_zero():
    for k in (0, 1, 5):
        assert entropy(construct(FamilySpec.delta(k))).nats == 0.0


def test_entropy_of_fair_coin():
    value = entropy(bern(0.5))
    assert value.nats == pytest.approx(math.log(2.0), abs=1e-15)
    assert value.bits == pytest.approx(1.0, abs=1e-15)


def test_entropy_of_reference_mixture_in_bits():
    x = convolve(bern(1.0 / 3.0), poi(1.0))
    assert entropy(x).bits == pytest.approx(2.08286, abs=1e-4)


def test_poisson_entropy_endpoints_and_consistency():
    assert poisson_entropy(0.0) == 0.0
    gap = abs(poisson_entropy(1.0) - entropy(poi(1.0)).nats)
    assert gap < 1e-11


@pytest.mark.parametrize("t", [0.5, 1.0, 10.0, 300.0, 2000.0])
def test_poisson_entropy_against_extended_precision(t):
    assert abs(poisson_entropy(t) - _poisson_entropy_mp(t)) < 1e-11


def test_poisson_entropy_rejects_negative_rate():
    with pytest.raises(ParameterError):
        poisson_entropy(-1.0)


def test_poisson_entropy_increasing_and_concave():
    grid = np.concatenate([np.linspace(0.05, 5, 60),
                           np.geomspace(5, 2000, 40)[1:]])
    values = np.array([poisson_entropy(float(t)) for t in grid])
    assert np.all(np.diff(values) > 0.0)
    chords = (values[2:] - values[:-2]) / (grid[2:] - grid[:-2])
    exact = np.array([(values[i + 1] - values[i]) / (grid[i + 1] - grid[i])
                      for i in range(len(grid) - 2)])
    # secant slopes shrink as the interval moves right
    assert np.all(exact + 1e-12 >= chords)


def test_entropy_derivative_positive_and_matches_oracle():
    j1 = poisson_entropy_derivative(1.0)
    assert j1 > 0.0
    assert j1 == pytest.approx(_poisson_j_mp(1.0), rel=1e-10)
    assert 0.0 < poisson_entropy_derivative(1000.0) < 0.001


def test_entropy_derivative_matches_finite_difference():
    for t in (1.0, 10.0):
        h = 1e-5
        fd = (poisson_entropy(t + h) - poisson_entropy(t - h)) / (2 * h)
        assert poisson_entropy_derivative(t) == pytest.approx(fd, rel=1e-6)


def test_entropy_derivative_rejects_nonpositive():
    with pytest.raises(ParameterError):
        poisson_entropy_derivative(0.0)


@pytest.mark.parametrize("lam", [0.1, 0.5, 3.0, 100.0, 1000.0])
def test_entropy_power_inverts_the_poisson_curve(lam):
    assert abs(entropy_power(poi(lam)) - lam) < 1e-8


def test_entropy_power_of_point_mass_is_zero():
    assert entropy_power(construct(FamilySpec.delta(2))) == 0.0


def test_entropy_power_of_reference_mixture():
    x = convolve(bern(1.0 / 3.0), poi(1.0))
    assert entropy_power(x) == pytest.approx(1.27189, abs=1e-4)


def test_entropy_power_below_mean_for_ulc():
    battery = [bern(0.3), construct(FamilySpec.binomial(5, 0.4)), poi(2.0),
               construct(FamilySpec.bernoulli_sum(0.2, 0.6, 0.9))]
    rng = np.random.default_rng(7)
    battery += [random_ulc(int(s), 3, 2.0) for s in rng.integers(0, 2 ** 62, 10)]
    for x in battery:
        assert entropy_power(x) <= mean(x) + 1e-9


def test_ulc_entropy_below_poisson_curve_at_the_mean():
    rng = np.random.default_rng(23)
    battery = [bern(0.4), construct(FamilySpec.binomial(6, 0.7)), poi(3.0)]
    battery += [random_ulc(int(s), 3, 2.0) for s in rng.integers(0, 2 ** 62, 10)]
    for x in battery:
        assert entropy(x).nats <= poisson_entropy(mean(x)) + 1e-10


def test_entropy_power_can_exceed_mean_outside_ulc():
    # geometric beats the Poisson max-entropy bound at its mean, so the
    # root bracket must expand past the mean
    x = construct(FamilySpec.geometric(1.0))
    assert not is_ulc(x)
    assert entropy_power(x) > mean(x)


def test_rel_entropy_vanishes_on_poisson():
    assert rel_entropy_poisson(poi(2.0)) <= 1e-10


def test_rel_entropy_direct_sum_oracle():
    # two-term sum evaluated at 40 digits: 0.5 log(.5/e^-.5) + 0.5 log(.5/(.5 e^-.5))
    assert rel_entropy_poisson(bern(0.5)) == pytest.approx(
        0.15342640972002734529, abs=1e-12)
    assert rel_entropy_poisson(bern(0.5)) > 0.0
    assert rel_entropy_poisson(construct(FamilySpec.delta(0))) == 0.0


def test_cross_entropy_identity():
    battery = [bern(0.5), bern(0.05), poi(1.5),
               construct(FamilySpec.binomial(6, 0.3)),
               construct(FamilySpec.geometric(1.0)),
               construct(FamilySpec.raw([0.25, 0.5, 0.25]))]
    for x in battery:
        lam = lambda_functional(x)
        split = entropy(x).nats + rel_entropy_poisson(x)
        assert abs(lam - split) < 1e-10


@pytest.mark.parametrize("lam", [0.5, 1.0, 5.0, 20.0])
def test_l_functional_at_poisson_equals_rate_times_derivative(lam):
    value = l_functional(poi(lam))
    assert abs(value - lam * poisson_entropy_derivative(lam)) < 1e-9


def test_l_functional_signs_and_hand_value():
    assert l_functional(bern(0.8)) < 0.0
    # two terms cancel exactly: 1*(1/2)log(1/2) + 2*(1/4)log(2)
    assert abs(l_functional(construct(FamilySpec.raw([0.25, 0.5, 0.25])))) < 1e-12


def test_l_functional_gapped_support_raises():
    with pytest.raises(DomainError):
        l_functional(FinitePmf([0.5, 0.0, 0.5]))


def test_l_functional_shifted_support_is_minus_infinity():
    assert l_functional(construct(FamilySpec.delta(2))) == -math.inf


def test_l_functional_is_the_thinning_derivative_of_entropy():
    step = 1e-5
    for x in (bern(0.3), poi(2.0), construct(FamilySpec.raw([0.25, 0.5, 0.25])),
              construct(FamilySpec.bernoulli_sum(0.3, 0.6))):
        fd = (entropy(x).nats - entropy(thin(x, 1.0 - step)).nats) / step
        assert abs(fd - l_functional(x)) < 1e-5


def test_lambda_functional_values():
    assert lambda_functional(construct(FamilySpec.delta(0))) == 0.0
    assert abs(lambda_functional(poi(2.0)) - entropy(poi(2.0)).nats) < 1e-10
    closed_form = 0.5 * (1.0 + math.log(2.0))
    assert lambda_functional(bern(0.5)) == pytest.approx(closed_form, abs=1e-14)


def test_u_functional_values():
    assert u_functional(construct(FamilySpec.delta(0))) == 0.0
    for lam in (0.5, 2.0):
        gap = abs(u_functional(poi(lam)) - lam * poisson_entropy_derivative(lam))
        assert gap < 1e-8
    # single-term evaluation: H - p1 log 1! - mean + 1*p1*log 1 = H - 1/2
    direct = entropy(bern(0.5)).nats - 0.5
    assert u_functional(bern(0.5)) == pytest.approx(direct, abs=1e-14)
