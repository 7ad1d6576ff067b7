"""Thinning, convolution, and thinning inversion."""

import numpy as np
import pytest

from thinpower import (FamilySpec, NotThinnableError, ParameterError,
                       construct, convolve, inverse_thin, is_ulc, mean,
                       random_ulc, thin, total_variation)

bern = lambda p: construct(FamilySpec.bernoulli(p))
poi = lambda r: construct(FamilySpec.poisson(r))

BATTERY = [
    bern(0.3),
    construct(FamilySpec.bernoulli_sum(0.2, 0.5, 0.7)),
    construct(FamilySpec.binomial(4, 0.35)),
    poi(2.0),
    poi(50.0),
]


def test_thin_by_one_is_identity():
    x = construct(FamilySpec.bernoulli_sum(0.3, 0.8))
    assert thin(x, 1.0) is x


def test_thin_single_bernoulli_trial():
    out = thin(bern(1.0), 0.5)
    assert np.allclose(out.probs, [0.5, 0.5], atol=1e-15)


def test_thin_by_zero_collapses_to_origin():
    assert thin(poi(3.0), 0.0).probs.tolist() == [1.0]


@pytest.mark.parametrize("lam", [0.5, 1.0, 5.0, 50.0, 200.0])
@pytest.mark.parametrize("alpha", [0.25, 0.6, 0.9])
def test_thinning_preserves_poisson(lam, alpha):
    tv = total_variation(thin(poi(lam), alpha), poi(alpha * lam))
    assert tv < 1e-10


def test_thin_rejects_bad_alpha():
    with pytest.raises(ParameterError):
        thin(bern(0.5), 1.5)
    with pytest.raises(ParameterError):
        thin(bern(0.5), -0.1)


@pytest.mark.parametrize("x", BATTERY)
@pytest.mark.parametrize("ab", [(0.3, 0.8), (0.5, 0.5), (0.9, 0.1), (0.05, 0.95)])
def test_thinning_semigroup_law(x, ab):
    a, b = ab
    assert total_variation(thin(thin(x, a), b), thin(x, a * b)) < 1e-12


@pytest.mark.parametrize("x", BATTERY)
@pytest.mark.parametrize("alpha", [0.0, 0.15, 0.5, 0.85, 1.0])
def test_thinning_scales_the_mean(x, alpha):
    assert abs(mean(thin(x, alpha)) - alpha * mean(x)) < 1e-12


@pytest.mark.parametrize("x", BATTERY)
@pytest.mark.parametrize("s", [0.1, 0.5, 0.9])
def test_zero_mass_lower_bound(x, s):
    assert thin(x, s).probs[0] >= (1.0 - s) ** mean(x) - 1e-12


def test_thinning_commutes_with_convolution():
    x = construct(FamilySpec.bernoulli_sum(0.4, 0.6))
    y = poi(1.5)
    for alpha in (0.2, 0.55, 0.9):
        lhs = thin(convolve(x, y), alpha)
        rhs = convolve(thin(x, alpha), thin(y, alpha))
        assert total_variation(lhs, rhs) < 1e-12


def test_thinning_preserves_ulc_class():
    rng = np.random.default_rng(1234)
    seeds = rng.integers(0, 2 ** 62, size=200)
    for seed in seeds:
        x = random_ulc(int(seed), 3, 2.0)
        for alpha in (0.1, 0.35, 0.65, 0.9):
            assert is_ulc(thin(x, alpha))


def test_convolution_identity_and_symmetric_case():
    y = construct(FamilySpec.binomial(2, 0.7))
    out = convolve(construct(FamilySpec.delta(0)), y)
    assert np.allclose(out.probs, y.probs, atol=1e-16)
    two = convolve(bern(0.5), bern(0.5))
    assert np.allclose(two.probs, [0.25, 0.5, 0.25], atol=1e-16)


def test_convolution_adds_poisson_rates():
    assert total_variation(convolve(poi(1.0), poi(2.0)), poi(3.0)) < 1e-10


def test_convolution_length():
    out = convolve(construct(FamilySpec.binomial(3, 0.5)), bern(0.5))
    assert len(out) == 4 + 2 - 1


def test_inverse_thin_bernoulli():
    out = inverse_thin(bern(0.3), 0.5)
    assert np.allclose(out.probs, [0.4, 0.6], atol=1e-14)


def test_inverse_thin_infeasible_bernoulli():
    with pytest.raises(NotThinnableError) as info:
        inverse_thin(bern(0.6), 0.5)
    assert info.value.index == 0
    assert info.value.value == pytest.approx(-0.2, abs=1e-12)


def test_inverse_thin_poisson():
    out = inverse_thin(poi(1.0), 0.25)
    assert total_variation(out, poi(4.0)) < 1e-9


def test_inverse_thin_alpha_validation():
    with pytest.raises(ParameterError):
        inverse_thin(bern(0.3), 0.0)


@pytest.mark.parametrize("x,alpha", [
    (bern(0.3), 0.5),
    (poi(1.0), 0.25),
    (construct(FamilySpec.binomial(3, 0.2)), 0.7),
])
def test_inverse_thin_round_trip(x, alpha):
    assert total_variation(thin(inverse_thin(x, alpha), alpha), x) < 1e-10


def test_inverse_thin_round_trip_random_ulc():
    rng = np.random.default_rng(99)
    for seed in rng.integers(0, 2 ** 62, size=20):
        x = random_ulc(int(seed), 2, 1.0)
        alpha = float(rng.uniform(0.85, 0.99))
        try:
            star = inverse_thin(x, alpha)
        except NotThinnableError:
            continue
        assert total_variation(thin(star, alpha), x) < 1e-10
