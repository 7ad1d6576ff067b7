"""Interpolation machinery: evolution map, its defining equation, the
entropy-preserving path, and the isoperimetric comparison."""

import numpy as np
import pytest

from thinpower import (DomainError, FamilySpec, ParameterError,
                       PreconditionError, construct, convolve, default_t_grid,
                       entropy, entropy_power, entropy_preserving_path, evolve,
                       isoperimetric_check, pde_residual, random_ulc, thin,
                       total_variation)

bern = lambda p: construct(FamilySpec.bernoulli(p))
poi = lambda r: construct(FamilySpec.poisson(r))


def test_evolve_identity_and_pure_thinning():
    x = construct(FamilySpec.bernoulli_sum(0.4, 0.7))
    assert evolve(x, 1.0, 0.0) is x
    out = evolve(construct(FamilySpec.delta(1)), 0.5, 0.0)
    assert np.allclose(out.probs, [0.5, 0.5], atol=1e-15)


def test_evolve_reproduces_reference_thinned_mixture():
    # thinning Bern(1/3)+Poisson(1) by a and adding rate f gives
    # Bern(a/3) + Poisson(a + f); at a = 0.999, f = 1 this is the
    # counterexample construction with the distant Poisson leg folded in
    alpha = 0.999
    x = convolve(bern(1.0 / 3.0), poi(1.0))
    left = evolve(x, alpha, 1.0)
    right = convolve(bern(alpha / 3.0), poi(alpha + 1.0))
    assert total_variation(left, right) < 1e-10


def test_evolve_validates_arguments():
    x = bern(0.5)
    with pytest.raises(ParameterError):
        evolve(x, 0.0, 0.0)
    with pytest.raises(ParameterError):
        evolve(x, 0.5, -1.0)


@pytest.mark.parametrize("x,t", [
    (bern(0.7), 0.5),
    (construct(FamilySpec.binomial(3, 0.5)), 0.25),
    (construct(FamilySpec.bernoulli_sum(0.2, 0.5, 0.8)), 0.6),
])
def test_pde_residual_pure_thinning(x, t):
    assert pde_residual(x, t, 0.0, 0.0, 1e-5) < 1e-6


def test_pde_residual_point_mass_is_exactly_zero():
    assert pde_residual(construct(FamilySpec.delta(0)), 0.4, 0.0, 0.0, 1e-5) == 0.0


def test_pde_residual_with_replenishment():
    # constant f: r(t) = f/t, checked against the same analytic right side
    x = bern(0.6)
    t, f = 0.5, 0.8
    assert pde_residual(x, t, f / t, f, 1e-5) < 1e-6


def test_pde_residual_step_validation():
    with pytest.raises(ParameterError):
        pde_residual(bern(0.5), 0.5, 0.0, 0.0, 0.0)
    with pytest.raises(ParameterError):
        pde_residual(bern(0.5), 1.0, 0.0, 0.0, 1e-5)


def test_path_for_poisson_is_linear_rate_exchange():
    lam = 2.0
    report = entropy_preserving_path(poi(lam), default_t_grid(12))
    assert np.max(np.abs(report.f_vals - (1.0 - report.t_grid) * lam)) < 1e-8
    assert report.f0_extrapolated == pytest.approx(lam, abs=1e-3)
    assert report.v_target == pytest.approx(lam, abs=1e-8)


def test_path_extrapolates_to_entropy_power():
    x = construct(FamilySpec.binomial(4, 0.3))
    report = entropy_preserving_path(x, default_t_grid(40))
    assert abs(report.f0_extrapolated - report.v_target) < 1e-3


def test_path_constancy_and_monotone_u():
    x = construct(FamilySpec.bernoulli_sum(0.2, 0.3, 0.4))
    report = entropy_preserving_path(x, default_t_grid(25))
    assert np.max(np.abs(report.h_vals - entropy(x).nats)) < 10 * 1e-10
    assert np.all(np.diff(report.u_vals) <= 1e-8)
    assert np.all(report.f_vals >= -1e-12)
    assert report.f_vals[-1] == 0.0


def test_path_requires_positive_l():
    with pytest.raises(DomainError):
        entropy_preserving_path(bern(0.8))   # L(Bern(0.8)) < 0


def test_path_requires_ulc():
    with pytest.raises(PreconditionError):
        entropy_preserving_path(construct(FamilySpec.geometric(1.0)))


def test_path_grid_validation():
    with pytest.raises(ParameterError):
        entropy_preserving_path(poi(1.0), [0.5, 0.2, 1.0])
    with pytest.raises(ParameterError):
        entropy_preserving_path(poi(1.0), [0.2, 0.9])


def test_isoperimetric_poisson_equality():
    verdict = isoperimetric_check(poi(3.0))
    assert abs(verdict.margin) < 1e-8
    assert verdict.holds


def test_isoperimetric_negative_l_holds_automatically():
    verdict = isoperimetric_check(bern(0.9))
    assert verdict.lhs < 0.0
    assert verdict.holds


def test_isoperimetric_positive_margin_case():
    verdict = isoperimetric_check(construct(FamilySpec.binomial(5, 0.2)))
    assert verdict.holds and verdict.margin > 0.0


def test_isoperimetric_requires_ulc_unless_overridden():
    geo = construct(FamilySpec.geometric(1.0))
    with pytest.raises(PreconditionError):
        isoperimetric_check(geo)
    verdict = isoperimetric_check(geo, allow_non_ulc=True)
    assert verdict.note == "outside theorem hypotheses"


def test_scaled_entropy_power_ratio_is_nonincreasing():
    # the differential form of the isoperimetric statement: V(T_a x)/a falls
    rng = np.random.default_rng(505)
    alphas = np.linspace(0.2, 1.0, 9)
    for seed in rng.integers(0, 2 ** 62, size=50):
        x = random_ulc(int(seed), 3, 2.0)
        ratios = [entropy_power(thin(x, float(a))) / a for a in alphas]
        slopes = np.diff(ratios) / np.diff(alphas)
        assert np.max(slopes) <= 1e-7
