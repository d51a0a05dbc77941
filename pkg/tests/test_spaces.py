import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from jointnorm.errors import NotUnitVectorError, ZeroVectorError
from jointnorm.spaces import (
    Exponent, LpSpace, dual_exponent, duality_map, is_extreme_point, is_smooth_point,
    lp_norm, rho_vector,
)

EXPONENTS = [1, 1.5, 2, 3, "inf"]


@pytest.mark.parametrize("v, p, expected", [
    ((3, 4), 2, 5.0),
    ((1, -2, 3), "inf", 3.0),
    ((1, 1), 1.5, 2 ** (2 / 3)),
    ((1, -2, 3), 1, 6.0),
    ((0, 0), 3, 0.0),
])
def test_lp_norm_values(v, p, expected):
    assert lp_norm(np.array(v, dtype=float), p) == pytest.approx(expected, rel=1e-15)


def test_lp_norm_complex():
    assert lp_norm(np.array([3j, 4]), 2) == pytest.approx(5.0)


@pytest.mark.parametrize("p, q", [(2, 2), (1, "inf"), ("inf", 1), (4, Exponent.of("4/3")), (3, 1.5)])
def test_dual_exponent(p, q):
    assert dual_exponent(p) == Exponent.of(q)
    assert dual_exponent(p).dual() == Exponent.of(p)


def test_exponent_parsing():
    assert Exponent.of("inf").is_inf
    assert Exponent.of(math.inf).is_inf
    assert Exponent.of(1).is_one
    assert Exponent.of(2.5).value == 2.5
    assert Exponent.of("inf").to_json() == "inf"
    with pytest.raises(ValueError):
        Exponent.of(0.5)
    with pytest.raises(ValueError):
        Exponent.of(float("nan"))


def test_space_validation():
    with pytest.raises(ValueError):
        LpSpace(0, 2)
    with pytest.raises(ValueError):
        LpSpace(2, 2, "quaternion")


def test_duality_map_examples():
    J = duality_map([0.0, 1.0], LpSpace(2, 2))
    np.testing.assert_allclose(J.base, [0, 1])
    assert J.is_singleton

    ext = duality_map([1.0, 1.0], LpSpace(2, "inf")).extremes()
    assert sorted(map(tuple, ext)) == [(0.0, 1.0), (1.0, 0.0)]

    ext = duality_map([1.0, 0.0], LpSpace(2, 1)).extremes()
    assert sorted(map(tuple, ext)) == [(1.0, -1.0), (1.0, 1.0)]


def test_duality_map_zero_vector():
    with pytest.raises(ZeroVectorError):
        duality_map([0.0, 0.0], LpSpace(2, 3))


vectors = arrays(np.float64, st.integers(1, 5), elements=st.floats(-10, 10, allow_nan=False))


@settings(max_examples=60, deadline=None)
@given(x=vectors, p=st.sampled_from(EXPONENTS), cx=st.booleans())
def test_norming_functionals_invariants(x, p, cx):
    if cx:
        x = x * np.exp(1j * np.arange(len(x)))
    if np.abs(x).max() < 1e-3:
        return
    sp = LpSpace(len(x), p, "complex" if cx else "real")
    J = duality_map(x, sp)
    q = sp.p.dual()
    for f in J.extremes():
        assert lp_norm(f, q) == pytest.approx(1.0, abs=1e-9)
        assert np.real(np.dot(f, x)) == pytest.approx(lp_norm(x, p), rel=1e-9)


@pytest.mark.parametrize("x, p, smooth", [
    ((1, 2), 1, True),
    ((1, 1), "inf", False),
    ((1, 0), 1, False),
    ((1, 0), 3, True),
    ((2, 1), "inf", True),
])
def test_is_smooth_point(x, p, smooth):
    assert is_smooth_point(np.array(x, float), LpSpace(2, p)) is smooth


@pytest.mark.parametrize("x, p, extreme", [
    ((2 ** -0.5, 2 ** -0.5), 2, True),
    ((1, 0), "inf", False),
    ((1, -1), "inf", True),
    ((0, 1), 1, True),
    ((0.5, 0.5), 1, False),
])
def test_is_extreme_point(x, p, extreme):
    assert is_extreme_point(np.array(x, float), LpSpace(2, p)) is extreme


def test_is_extreme_point_needs_unit():
    with pytest.raises(NotUnitVectorError):
        is_extreme_point(np.array([2.0, 0.0]), LpSpace(2, 2))


@pytest.mark.parametrize("x, y, p, expected", [
    ((1, 0), (0, 1), 1, (-1.0, 1.0)),
    ((1, 1), (1, -1), "inf", (-1.0, 1.0)),
    ((3, 4), (3, 4), 2, (5.0, 5.0)),
])
def test_rho_vector_examples(x, y, p, expected):
    rm, rp = rho_vector(np.array(x, float), np.array(y, float), LpSpace(2, p))
    assert (rm, rp) == pytest.approx(expected)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10_000), p=st.sampled_from(EXPONENTS), n=st.integers(2, 4))
def test_rho_vector_matches_quotients(seed, p, n):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n)
    if p in (1, "inf"):
        # put x on a kink to exercise the non-smooth branches
        x[0] = 0.0 if p == 1 else np.abs(x).max() * np.sign(x[0] or 1.0)
    y = rng.standard_normal(n)
    sp = LpSpace(n, p)
    rm, rp = rho_vector(x, y, sp)
    assert rm <= rp + 1e-12
    assert max(abs(rm), abs(rp)) <= lp_norm(y, p) + 1e-12
    nx = lp_norm(x, p)
    qp = [(lp_norm(x + t * y, p) - nx) / t for t in 10.0 ** -np.arange(1, 7)]
    qm = [(lp_norm(x - t * y, p) - nx) / -t for t in 10.0 ** -np.arange(1, 7)]
    assert all(a >= b - 1e-9 for a, b in zip(qp, qp[1:]))
    assert all(a <= b + 1e-9 for a, b in zip(qm, qm[1:]))
    assert qp[-1] == pytest.approx(rp, abs=1e-5)
    assert qm[-1] == pytest.approx(rm, abs=1e-5)


@pytest.mark.parametrize("x, p", [((1.0, 0.0, 2.0), 1), ((1.0, -1.0, 0.5), "inf"), ((1.0, 2.0, 3.0), 2.5)])
def test_smooth_iff_equal_derivatives(x, p):
    rng = np.random.default_rng(1)
    sp = LpSpace(3, p)
    x = np.array(x)
    equal = all(abs(np.subtract(*rho_vector(x, y, sp))) <= 1e-9 for y in rng.standard_normal((50, 3)))
    assert equal == is_smooth_point(x, sp)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 1000), p=st.sampled_from([1.5, 2, 3, 4]))
def test_holder_duality_by_sampling(seed, p):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(3)
    q = Exponent.of(p).dual()
    F = rng.standard_normal((10_000, 3))
    F /= np.array([lp_norm(f, q) for f in F])[:, None]
    best = F[np.argmax(F @ x)]
    assert (F @ x).max() <= lp_norm(x, p) + 1e-12
    # polish the best sample along the duality map
    f = duality_map(x, LpSpace(3, p)).base
    assert np.dot(f, x) == pytest.approx(lp_norm(x, p), rel=1e-12)
    assert np.dot(best, x) >= lp_norm(x, p) - 0.1
