import math

import numpy as np
import pytest

from symwedge import (
    MODE_PROJECTED,
    Configuration,
    DomainSpec,
    LatticeSpec,
    Symmetry,
    TargetFunction,
    build_antisym,
    build_sym,
    builtin_target,
    cauchy_factor_check,
    convergence_sweep,
    eval_antisym,
    eval_sym,
    gradient_bound_estimate,
    invariance_suite,
    run_verification,
    sample_configurations,
    sup_error,
    vandermonde_product,
)
from symwedge.harness import VerificationReport

UNIT_12 = DomainSpec(d=1, N=2, lo=0.0, hi=1.0)
UNIT_13 = DomainSpec(d=1, N=3, lo=0.0, hi=1.0)
SUM_12 = builtin_target("sum-coords", {"d": 1, "N": 2})


def cfg(*rows):
    return Configuration.from_rows(rows)


def constant_target(value):
    return TargetFunction(
        evaluator=lambda X: value,
        declared_symmetry=Symmetry.SYMMETRIC,
        gradient_bound_hint=0.0,
        name="constant",
    )


# ---------------------------------------------------------------- sampling


def test_sampling_is_deterministic():
    a = sample_configurations(UNIT_12, 100, 7)
    b = sample_configurations(UNIT_12, 100, 7)
    assert a.configurations == b.configurations
    assert a.seed == 7 and a.count == 100


def test_sampling_different_seeds_differ():
    a = sample_configurations(UNIT_12, 10, 7)
    b = sample_configurations(UNIT_12, 10, 8)
    assert a.configurations != b.configurations


def test_sampling_count_validation():
    with pytest.raises(ValueError):
        sample_configurations(UNIT_12, 0, 7)


def test_sampling_marginal_means():
    dom = DomainSpec(d=2, N=2, lo=0.0, hi=1.0)
    S = sample_configurations(dom, 100_000, 12345)
    arr = np.array([X.rows() for X in S.configurations])
    se = 1.0 / math.sqrt(12.0 * len(S.configurations))
    for i in range(2):
        for a in range(2):
            assert abs(arr[:, i, a].mean() - 0.5) <= 3.0 * se


def test_samples_stay_in_domain():
    dom = DomainSpec(d=1, N=3, lo=-2.0, hi=3.0)
    S = sample_configurations(dom, 500, 9)
    for X in S.configurations:
        assert dom.contains(X)


# ---------------------------------------------------------------- gradients


def test_gradient_bound_of_linear_target():
    S = sample_configurations(UNIT_12, 500, 21)
    assert gradient_bound_estimate(SUM_12, S) == pytest.approx(math.sqrt(2.0), abs=1e-8)


def test_gradient_bound_of_constant_target():
    S = sample_configurations(UNIT_12, 200, 22)
    assert gradient_bound_estimate(constant_target(4.0), S) <= 1e-8


def test_gradient_bound_step_stability():
    f = builtin_target("gaussian-pair-sym", {"d": 1, "N": 2})
    S = sample_configurations(UNIT_12, 2000, 23)
    coarse = gradient_bound_estimate(f, S, h=1e-4)
    fine = gradient_bound_estimate(f, S, h=5e-5)
    assert abs(coarse - fine) < 1e-6


def test_gradient_bound_step_validation():
    S = sample_configurations(UNIT_12, 10, 24)
    with pytest.raises(ValueError):
        gradient_bound_estimate(SUM_12, S, h=0.0)
    with pytest.raises(ValueError):
        gradient_bound_estimate(SUM_12, S, h=0.6)


def test_gradient_bound_rejects_non_finite_target():
    bad = TargetFunction(
        evaluator=lambda X: float("nan"),
        declared_symmetry=Symmetry.SYMMETRIC,
        name="bad",
    )
    S = sample_configurations(UNIT_12, 5, 25)
    with pytest.raises(ValueError):
        gradient_bound_estimate(bad, S)


# ---------------------------------------------------------------- sup error


def test_sup_error_of_exact_approximation():
    S = sample_configurations(UNIT_12, 200, 31)
    err, _ = sup_error(SUM_12, SUM_12, S)
    assert err == 0.0


def test_sup_error_of_constant_tabulator():
    spec = LatticeSpec.from_domain(UNIT_12, 0.25)
    tab = build_sym(constant_target(1.5), spec, 2)
    S = sample_configurations(UNIT_12, 200, 32)
    err, _ = sup_error(constant_target(1.5), lambda X: eval_sym(tab, X), S)
    assert err <= 1e-12


def test_sup_error_band_for_sum_coords():
    spec = LatticeSpec.from_domain(UNIT_12, 0.25)
    tab = build_sym(SUM_12, spec, 2)
    S = sample_configurations(UNIT_12, 10_000, 33)
    err, arg = sup_error(SUM_12, lambda X: eval_sym(tab, X), S)
    assert 0.2 <= err <= 0.5
    assert abs(SUM_12(arg) - eval_sym(tab, arg)) == err


# ---------------------------------------------------------------- invariance


def test_invariance_residual_zero_for_tabulators():
    spec = LatticeSpec.from_domain(UNIT_13, 0.25)
    S = sample_configurations(UNIT_13, 200, 41)
    f_sym = builtin_target("gaussian-pair-sym", {"d": 1, "N": 3})
    tab = build_sym(f_sym, spec, 3)
    assert invariance_suite(lambda X: eval_sym(tab, X), S, 8, Symmetry.SYMMETRIC) == 0.0
    f_anti = builtin_target("vandermonde-gauss-antisym", {"d": 1, "N": 3})
    anti = build_antisym(f_anti, spec, 3)
    assert (
        invariance_suite(lambda X: eval_antisym(anti, X), S, 8, Symmetry.ANTISYMMETRIC)
        == 0.0
    )


def test_invariance_detects_broken_evaluator():
    spec = LatticeSpec.from_domain(UNIT_12, 0.25)
    tab = build_sym(SUM_12, spec, 2)
    S = sample_configurations(UNIT_12, 100, 42)
    broken = lambda X: eval_sym(tab, X) + X.points[0].coords[0]
    assert invariance_suite(broken, S, 8, Symmetry.SYMMETRIC) > 1e-3


def test_invariance_suite_validation():
    S = sample_configurations(UNIT_12, 10, 43)
    with pytest.raises(ValueError):
        invariance_suite(SUM_12, S, 0, Symmetry.SYMMETRIC)
    with pytest.raises(ValueError):
        invariance_suite(SUM_12, S, 4, Symmetry.NONE)


def test_invariance_suite_is_seed_deterministic():
    S = sample_configurations(UNIT_13, 50, 44)
    f = builtin_target("product-smooth-sym", {"d": 1, "N": 3})
    r1 = invariance_suite(f, S, 6, Symmetry.SYMMETRIC)
    r2 = invariance_suite(f, S, 6, Symmetry.SYMMETRIC)
    assert r1 == r2


# ---------------------------------------------------------------- sweeps


def test_sweep_slope_first_order():
    S = sample_configurations(UNIT_12, 3000, 51)
    res = convergence_sweep(SUM_12, UNIT_12, (0.5, 0.25, 0.125), S)
    assert res.slope is not None
    assert 0.8 <= res.slope <= 1.2


def test_sweep_antisym_target_slope():
    f = builtin_target("vandermonde-sum-antisym", {"d": 1, "N": 2})
    S = sample_configurations(UNIT_12, 3000, 52)
    res = convergence_sweep(f, UNIT_12, (0.5, 0.25, 0.125), S)
    assert res.slope is not None
    assert 0.8 <= res.slope <= 1.2


def test_sweep_constant_target_has_no_slope():
    S = sample_configurations(UNIT_12, 500, 53)
    res = convergence_sweep(constant_target(2.0), UNIT_12, (0.5, 0.25, 0.125), S)
    assert res.slope is None
    assert all(row.sup_error <= 1e-12 for row in res.rows)


def test_sweep_errors_monotone_and_rows_consistent():
    S = sample_configurations(UNIT_12, 3000, 54)
    res = convergence_sweep(SUM_12, UNIT_12, (0.5, 0.25, 0.125, 0.0625), S)
    errs = [row.sup_error for row in res.rows]
    assert all(b <= a + 1e-12 for a, b in zip(errs, errs[1:]))
    for row in res.rows:
        assert row.M == row.wedge_count * 4
        assert row.bound == pytest.approx(
            row.delta * math.sqrt(2.0) * res.gradient_bound, rel=1e-12
        )


def test_sweep_validation():
    S = sample_configurations(UNIT_12, 10, 55)
    with pytest.raises(ValueError):
        convergence_sweep(SUM_12, UNIT_12, (0.5, 0.25), S)
    with pytest.raises(ValueError):
        convergence_sweep(SUM_12, UNIT_12, (0.25, 0.5, 0.125), S)


# ---------------------------------------------------------------- cauchy


def pure_vandermonde(N):
    return TargetFunction(
        evaluator=lambda X: vandermonde_product(tuple(p.coords[0] for p in X.points)),
        declared_symmetry=Symmetry.ANTISYMMETRIC,
        name="pure-vandermonde",
    )


def test_cauchy_pure_vandermonde_is_exactly_factored():
    S = sample_configurations(UNIT_13, 500, 61)
    assert cauchy_factor_check(pure_vandermonde(3), S, min_gap=0.05) <= 1e-12


def test_cauchy_vandermonde_times_sum():
    f = builtin_target("vandermonde-sum-antisym", {"d": 1, "N": 3})
    S = sample_configurations(UNIT_13, 500, 62)
    assert cauchy_factor_check(f, S, min_gap=0.05) <= 1e-9


def test_cauchy_detects_non_antisymmetric_mutant():
    mutant = TargetFunction(
        evaluator=lambda X: vandermonde_product(tuple(p.coords[0] for p in X.points))
        + X.points[0].coords[0],
        declared_symmetry=Symmetry.ANTISYMMETRIC,
        name="mutant",
    )
    S = sample_configurations(UNIT_13, 200, 63)
    assert cauchy_factor_check(mutant, S, min_gap=0.05) > 1e-3


def test_cauchy_validation():
    S = sample_configurations(UNIT_13, 100, 64)
    with pytest.raises(ValueError):
        cauchy_factor_check(pure_vandermonde(3), S, min_gap=0.0)
    with pytest.raises(ValueError):
        cauchy_factor_check(pure_vandermonde(3), S, min_gap=2.0)  # filters everything
    dom2 = DomainSpec(d=2, N=2, lo=0.0, hi=1.0)
    S2 = sample_configurations(dom2, 10, 65)
    f2 = builtin_target("vandermonde-gauss-antisym", {"d": 2, "N": 2})
    with pytest.raises(ValueError):
        cauchy_factor_check(f2, S2, min_gap=0.05)


# ---------------------------------------------------------------- reports


def test_run_verification_sym_passes():
    report, tab = run_verification(SUM_12, UNIT_12, delta=0.25, samples=2000, seed=71)
    assert report.kind == "sym"
    assert report.passed
    assert report.bound_satisfied
    assert report.sup_error <= report.bound + 1e-12
    assert report.invariance_max_residual == 0.0
    assert report.cauchy_residual is None
    assert {c.name for c in report.checks} >= {
        "target_symmetry_residual",
        "sup_error_within_budget",
        "invariance_residual",
    }


def test_run_verification_antisym_includes_cauchy():
    f = builtin_target("vandermonde-gauss-antisym", {"d": 1, "N": 2})
    report, tab = run_verification(
        f, UNIT_12, delta=0.25, construction=MODE_PROJECTED, samples=2000, seed=72
    )
    assert report.kind == "antisym-c2"
    assert report.cauchy_residual is not None
    assert report.passed


def test_run_verification_epsilon_route():
    report, _ = run_verification(SUM_12, UNIT_12, epsilon=0.5, samples=2000, seed=73)
    # delta = eps / (sqrt(Nd) * L_hat) with L_hat almost exactly sqrt(2)
    assert report.delta == pytest.approx(0.25, rel=1e-9)
    assert report.bound == pytest.approx(0.5, rel=1e-9)


def test_run_verification_needs_exactly_one_accuracy_knob():
    with pytest.raises(ValueError):
        run_verification(SUM_12, UNIT_12, samples=10, seed=1)
    with pytest.raises(ValueError):
        run_verification(SUM_12, UNIT_12, delta=0.25, epsilon=0.5, samples=10, seed=1)


def test_verification_report_consistency_enforced():
    report, _ = run_verification(SUM_12, UNIT_12, delta=0.5, samples=200, seed=74)
    from dataclasses import replace

    with pytest.raises(ValueError):
        replace(report, bound_satisfied=not report.bound_satisfied)


def test_run_verification_smooth_mode():
    f = builtin_target("gaussian-pair-sym", {"d": 1, "N": 2})
    report, _ = run_verification(
        f, UNIT_12, delta=0.25, smooth_width=0.06, samples=1000, seed=75
    )
    assert report.passed
    smooth_check = {c.name: c for c in report.checks}["invariance_residual"]
    assert smooth_check.threshold == 1e-12
