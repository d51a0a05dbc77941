import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jointnorm.config import Config
from jointnorm.derivatives import (
    check_smoothness_sufficiency, rho_attainment_formula, rho_operator, rho_sandwich_bounds,
    rho_tuple_infty_formula, smoothness_of_operator,
)
from jointnorm.errors import HypothesisNotSatisfied, ZeroOperatorError
from jointnorm.linops import Operator, OperatorTuple
from jointnorm.theorems import (
    gen_example_a, gen_example_b, gen_lm_example, gen_random, golden_counterexample,
)


def _l2_tuple_norm(Ms):
    # l_2 components with outer 2: ||T||^2 is the top eigenvalue of sum_i T_i^T T_i
    return np.sqrt(np.linalg.eigvalsh(sum(M.T @ M for M in Ms))[-1])


def test_golden_derivatives():
    g = golden_counterexample()
    Ts, Ss = [c.matrix for c in g.T], [c.matrix for c in g.S]
    t = 1e-7
    base = _l2_tuple_norm(Ts)
    right = (_l2_tuple_norm([a + t * b for a, b in zip(Ts, Ss)]) - base) / t
    left = (_l2_tuple_norm([a - t * b for a, b in zip(Ts, Ss)]) - base) / -t
    r = rho_operator(g.T, g.S)
    assert r.rho_plus == pytest.approx(right, abs=1e-5)
    assert r.rho_minus == pytest.approx(left, abs=1e-5)
    assert r.rho_minus < r.rho_plus
    assert r.monotone and not r.disagreement


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 10_000), alpha=st.floats(0.1, 5.0))
def test_scaling_and_reflection(seed, alpha):
    inst = gen_random(3, 2, seed, p_domain=3, p_codomain=2, outer_p=2)
    r = rho_operator(inst.T, inst.S, cross_check=False)
    ra = rho_operator(inst.T, inst.S.map(lambda c: c.scaled(alpha)), cross_check=False)
    rn = rho_operator(inst.T, inst.S.map(lambda c: c.scaled(-1.0)), cross_check=False)
    tol = 1e-6 * max(1.0, alpha)
    assert ra.rho_minus == pytest.approx(alpha * r.rho_minus, abs=tol + alpha * r.error_bound)
    assert ra.rho_plus == pytest.approx(alpha * r.rho_plus, abs=tol + alpha * r.error_bound)
    assert rn.rho_minus == pytest.approx(-r.rho_plus, abs=1e-6)
    assert rn.rho_plus == pytest.approx(-r.rho_minus, abs=1e-6)


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 10_000), p=st.sampled_from([1, 2, 3, "inf"]))
def test_infty_formula_matches_quotients(seed, p):
    inst = gen_random(3, 3, seed, p_domain=p, p_codomain=2, outer_p="inf")
    q = rho_operator(inst.T, inst.S, cross_check=False)
    f = rho_tuple_infty_formula(inst.T, inst.S)
    assert q.monotone and f.monotone
    assert q.rho_minus <= q.rho_plus + 1e-9
    assert f.rho_minus == pytest.approx(q.rho_minus, abs=1e-4)
    assert f.rho_plus == pytest.approx(q.rho_plus, abs=1e-4)


def test_attainment_formula_cross_check():
    inst = gen_example_a(3, 2, seed=2)
    r = rho_operator(inst.T, inst.S)
    lo, hi = rho_attainment_formula(inst.T, inst.S)
    assert r.cross_check == (lo, hi)
    assert not r.disagreement


def test_sandwich_unweighted_at_p1_and_weighted_for_p2():
    inst = gen_example_b(3, 2, seed=1, outer_p=1)
    r = rho_operator(inst.T, inst.S, cross_check=False)
    lo, hi = rho_sandwich_bounds(inst.T, inst.S)
    assert lo - 1e-4 <= r.rho_minus <= r.rho_plus <= hi + 1e-4

    inst = gen_example_b(3, 2, seed=1, outer_p=2)
    self_dir = rho_operator(inst.T, inst.T, cross_check=False)
    assert self_dir.rho_plus == pytest.approx(np.sqrt(2), abs=1e-5)
    assert rho_sandwich_bounds(inst.T, inst.T) == pytest.approx((2.0, 2.0), abs=1e-5)
    assert rho_sandwich_bounds(inst.T, inst.T, weighted=True) == pytest.approx((np.sqrt(2), np.sqrt(2)), abs=1e-5)


def test_sandwich_requires_joint_attainment():
    g = golden_counterexample()
    with pytest.raises(HypothesisNotSatisfied):
        rho_sandwich_bounds(g.T, g.S)
    lo, hi = rho_sandwich_bounds(g.T, g.S, require=False)
    assert lo <= hi


def test_zero_operator_errors():
    Z = OperatorTuple.single(Operator.from_matrix(np.zeros((2, 2))))
    with pytest.raises(ZeroOperatorError):
        rho_operator(Z, Z)
    with pytest.raises(ZeroOperatorError):
        smoothness_of_operator(Z)


@pytest.mark.parametrize("M, p, smooth", [
    (np.diag([1.0, 0.5]), 2, True),
    (np.eye(2), 2, False),
    (np.diag([1.0, 0.5]), 1, False),
    (np.diag([1.0, 0.5]), 3, True),
])
def test_smoothness_of_single_operators(M, p, smooth):
    assert smoothness_of_operator(Operator.from_matrix(M, p)).smooth is smooth


def test_golden_tuple_not_smooth():
    rep = smoothness_of_operator(golden_counterexample().T)
    assert not rep.smooth
    assert rep.attainment_orbits > 1


def test_lm_example_pattern():
    rep = check_smoothness_sufficiency(gen_lm_example(3, 3).T)
    assert rep.components_smooth == [True, False, False]
    assert rep.tuple_smooth and rep.holds and rep.converse_fails


def test_sufficiency_needs_joint_attainment():
    with pytest.raises(HypothesisNotSatisfied):
        check_smoothness_sufficiency(golden_counterexample().T)


def test_smooth_example_a():
    rep = check_smoothness_sufficiency(gen_example_a(3, 2, seed=0).T, Config(seed=1))
    assert rep.components_smooth == [True, True]
    assert rep.tuple_smooth and rep.holds
