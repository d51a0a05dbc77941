import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jointnorm.errors import DimensionMismatch
from jointnorm.linops import (
    Layout, Operator, OperatorTuple, adjoint, affine_tuple, apply, nested_norms, tuple_apply,
    tuple_codomain_norm,
)
from jointnorm.normcalc import tuple_norm
from jointnorm.spaces import LpSpace, lp_norm
from jointnorm.theorems import golden_counterexample


def test_apply_golden_tuple():
    T = golden_counterexample().T
    x = np.array([0.6, 0.8])
    np.testing.assert_allclose(apply(T[0], x), [0.3, 0.8])
    ys = tuple_apply(T, x)
    np.testing.assert_allclose(ys[1], [0.6, 0.4])
    assert tuple_codomain_norm(ys, 2, [c.codomain for c in T]) == pytest.approx(np.hypot(np.hypot(0.3, 0.8), np.hypot(0.6, 0.4)))


def test_tuple_codomain_norm_pairs_and_inf():
    sp1, sp2 = LpSpace(2, 1), LpSpace(1, "inf")
    vals = [(np.array([1.0, -2.0]), sp1), (np.array([4.0]), sp2)]
    assert tuple_codomain_norm(vals, "inf") == 4.0
    assert tuple_codomain_norm(vals, 1) == 7.0
    with pytest.raises(ValueError):
        tuple_codomain_norm([], 2)


def test_shape_errors():
    sp2, sp3 = LpSpace(2, 2), LpSpace(3, 2)
    with pytest.raises(DimensionMismatch):
        Operator(np.eye(2), sp3, sp2)
    A = Operator(np.eye(2), sp2, sp2)
    with pytest.raises(DimensionMismatch):
        apply(A, np.ones(3))
    with pytest.raises(DimensionMismatch):
        OperatorTuple((A, Operator(np.ones((2, 3)), sp3, sp2)), 2)
    with pytest.raises(DimensionMismatch):
        affine_tuple(OperatorTuple((A,), 2), OperatorTuple((A,), 2), np.zeros(2))


def test_affine_tuple():
    inst = golden_counterexample()
    R = affine_tuple(inst.T, inst.S, [1.0, -1.0])
    np.testing.assert_allclose(R[0].matrix, inst.T[0].matrix - inst.S[0].matrix)
    np.testing.assert_allclose(R[1].matrix, inst.T[1].matrix + inst.S[1].matrix)


def test_matrix_is_read_only():
    A = Operator.from_matrix(np.eye(2))
    with pytest.raises(ValueError):
        A.matrix[0, 0] = 5.0


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000), p=st.sampled_from([1, 1.5, 2, 3, "inf"]),
       q=st.sampled_from([1, 2, 4, "inf"]))
def test_adjoint_norm_duality(seed, p, q):
    rng = np.random.default_rng(seed)
    A = Operator.from_matrix(rng.standard_normal((2, 3)), p, q)
    B = adjoint(A)
    assert B.domain.p == A.codomain.p.dual()
    assert B.codomain.p == A.domain.p.dual()
    assert tuple_norm(B).value == pytest.approx(tuple_norm(A).value, rel=1e-6)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000), outer=st.sampled_from([1, 2, 3, "inf"]))
def test_nested_norms_matches_loop(seed, outer):
    rng = np.random.default_rng(seed)
    dom = LpSpace(3, 2)
    comps = (Operator(rng.standard_normal((2, 3)), dom, LpSpace(2, 1)),
             Operator(rng.standard_normal((3, 3)), dom, LpSpace(3, "inf")))
    T = OperatorTuple(comps, outer)
    X = rng.standard_normal((5, 3))
    fast = nested_norms(X @ T.stacked().T, Layout.of(T))
    slow = [tuple_codomain_norm(tuple_apply(T, x), outer, [c.codomain for c in T]) for x in X]
    np.testing.assert_allclose(fast, slow, rtol=1e-13)
    assert lp_norm(np.array([1.0]), outer) == 1.0
