import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jointnorm.config import Config
from jointnorm.errors import DimensionTooLarge
from jointnorm.linops import Operator, OperatorTuple
from jointnorm.normcalc import (
    METHODS, attainment_set, brute_force_norm, image_norm, joint_attainment_check,
    orbit_distance, tuple_norm,
)
from jointnorm.spaces import LpSpace
from jointnorm.theorems import gen_example_b, golden_counterexample

GENERIC = Config(fast_paths=False)


def _orbits(reps):
    return sorted(tuple(np.round(np.abs(x), 6)) for x in reps)


@pytest.mark.parametrize("p", [1, 1.5, 2, 3, "inf"])
def test_identity_norm_is_one(p):
    res = tuple_norm(Operator.from_matrix(np.eye(3), p))
    assert res.value == pytest.approx(1.0, abs=1e-9)
    assert res.method in METHODS


def test_identity_attainment_is_incomplete():
    att = attainment_set(Operator.from_matrix(np.eye(2)))
    assert att.value == pytest.approx(1.0)
    assert att.complete_flag is False


def test_t1_witnesses():
    T = golden_counterexample().T
    att = attainment_set(T[0])
    assert _orbits(att.representatives) == [(0.0, 1.0)]
    assert att.value == pytest.approx(1.0)


@pytest.mark.parametrize("M, p, q, expected, method", [
    ([[1, 2], [3, 4]], 1, 1, 6.0, "exact_p1"),
    ([[1, 2], [3, 4]], "inf", "inf", 7.0, "exact_row_dual"),
    ([[3, 0], [0, 4]], 2, 2, 4.0, "exact_spectral"),
    ([[3, 0], [0, -4]], 3, 3, 4.0, "exact_diagonal"),
    ([[1, 1], [1, -1]], "inf", 2, 2.0, "exact_vertex"),
])
def test_exact_paths(M, p, q, expected, method):
    res = tuple_norm(Operator.from_matrix(np.array(M, float), p, q))
    assert res.value == pytest.approx(expected, rel=1e-12)
    assert res.method == method


def test_ascent_path_matches_oracle():
    A = Operator.from_matrix(np.array([[1.0, 2.0, 0.5], [-1.0, 0.3, 2.0]]), 3, 1.5)
    res = tuple_norm(A)
    assert res.method == "power_iteration"
    assert res.value == pytest.approx(brute_force_norm(A).value, abs=1e-7)
    assert image_norm(OperatorTuple.single(A), res.witness) == pytest.approx(res.value, rel=1e-12)


def test_brute_force_dimension_limit():
    with pytest.raises(DimensionTooLarge):
        brute_force_norm(Operator.from_matrix(np.eye(4)))


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 10_000), p=st.sampled_from([1, 2, 3, "inf"]),
       q=st.sampled_from([1, 2, 3, "inf"]), outer=st.sampled_from([1, 2, "inf"]))
def test_tuple_norm_matches_oracle(seed, p, q, outer):
    rng = np.random.default_rng(seed)
    dom = LpSpace(2, p)
    T = OperatorTuple(tuple(Operator(rng.standard_normal((2, 2)), dom, LpSpace(2, q)) for _ in range(2)), outer)
    assert tuple_norm(T, GENERIC).value == pytest.approx(brute_force_norm(T).value, abs=1e-6)


def test_max_formula_matches_generic():
    rng = np.random.default_rng(3)
    dom = LpSpace(3, 3)
    T = OperatorTuple(tuple(Operator(rng.standard_normal((2, 3)), dom, LpSpace(2, 2)) for _ in range(3)), "inf")
    fast, slow = tuple_norm(T), tuple_norm(T, GENERIC)
    assert fast.value == pytest.approx(slow.value, rel=1e-9)
    assert fast.value == pytest.approx(max(tuple_norm(c).value for c in T), rel=1e-12)


def test_norm_is_seed_deterministic():
    A = Operator.from_matrix(np.array([[1.0, 2.0, 0.5], [-1.0, 0.3, 2.0]]), 3, 1.5)
    a, b = tuple_norm(A, Config(seed=5)), tuple_norm(A, Config(seed=5))
    assert a.value == b.value
    np.testing.assert_array_equal(a.witness, b.witness)


def test_complex_norm_and_orbits():
    A = Operator.from_matrix(np.array([[1 + 1j, 0.0], [0.0, 0.5j]]), 2)
    res = tuple_norm(A)
    assert res.value == pytest.approx(np.sqrt(2))
    x = res.witness
    assert orbit_distance(x, 1j * x) == pytest.approx(0.0, abs=1e-12)


def test_joint_attainment_examples():
    ja = joint_attainment_check(gen_example_b(3, 2, seed=0).T)
    assert ja.nonempty
    assert orbit_distance(ja.witness, np.array([1.0, 0.0, 0.0])) < 1e-6
    ja = joint_attainment_check(golden_counterexample().T)
    assert not ja.nonempty
    assert ja.margin < -0.1
