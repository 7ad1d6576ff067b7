"""The acceptance gate: one test per criterion, each printing a PASS/FAIL
line with its headline numbers."""

from thinpower import acceptance


def _report(result):
    status = "PASS" if result.passed else "FAIL"
    print(f"{status} criterion {result.number}: {result.name} "
          f"({result.seconds:.2f}s) {result.details}")
    assert result.passed, result.details


def test_criterion_1_fail2_reproduction():
    result = acceptance.criterion_1()
    assert max(result.details["deviations"]) < 1e-4
    assert result.details["tepi_holds"] is False
    assert result.seconds < 5.0
    _report(result)


def test_criterion_2_fail1_reproduction():
    result = acceptance.criterion_2()
    assert result.details["margin"] < -1e-6
    assert result.details["holds"] is False
    assert result.seconds < 1.0
    _report(result)


def test_criterion_3_theorem_sweeps():
    result = acceptance.criterion_3()
    for name in ("teci", "rtepi", "isop", "hmon", "dsub"):
        assert result.details[name]["violations"] == 0
    assert result.seconds < 60.0
    _report(result)


def test_criterion_4_poisson_equalities():
    result = acceptance.criterion_4()
    for name, margin in result.details["margins"].items():
        assert abs(margin) < 1e-7, name
    _report(result)


def test_criterion_5_binomial_corollary():
    result = acceptance.criterion_5()
    assert result.details["violations"] == 0
    _report(result)


def test_criterion_6_interpolation_machinery():
    result = acceptance.criterion_6()
    assert result.details["worst_pde_residual"] < 1e-6
    assert result.details["worst_f0_gap"] < 1e-3
    assert result.details["worst_u_increase"] <= 1e-8
    assert all(g < 1e-9 for g in result.details["poisson_l_gaps"].values())
    _report(result)


def test_criterion_7_hessian_machinery():
    result = acceptance.criterion_7()
    assert result.details["worst_fd_excess"] <= 0.0
    assert result.details["splitting_witnesses"] == 20
    assert result.details["worst_quadratic_form"] <= 1e-10
    assert result.details["worst_margin_identity_residual"] < 1e-10
    _report(result)


def test_criterion_8_algebraic_invariants():
    result = acceptance.criterion_8()
    d = result.details
    assert d["worst_semigroup_tv"] < 1e-12
    assert d["worst_poisson_closure_tv"] < 1e-10
    assert d["worst_roundtrip_tv"] < 1e-10
    assert d["worst_cross_entropy_identity"] < 1e-10
    assert d["worst_v_of_poisson"] < 1e-8
    assert d["worst_l_vs_fd"] < 1e-5
    _report(result)


def test_criterion_9_determinism():
    result = acceptance.criterion_9()
    assert result.details["search_identical"] is True
    assert result.details["verify_identical"] is True
    _report(result)
