"""Derivative-free minimization of convex, possibly nonsmooth, functions.

Objectives here are norms of affine operator families, so every local
minimum is global; the searches only need to cope with kinks.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

__all__ = ["SearchResult", "EllipsoidResult", "golden_section", "pattern_search",
           "ellipsoid_minimize", "Memo"]

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass
class SearchResult:
    x: np.ndarray
    fx: float
    evaluations: int
    convexity_gap: float = 0.0


class Memo:
    """Cache of objective values keyed by the exact argument bits."""

    def __init__(self, fn):
        self.fn = fn
        self.cache: dict = {}
        self.calls = 0

    def __call__(self, x) -> float:
        x = np.asarray(x, dtype=float)
        key = x.tobytes()
        v = self.cache.get(key)
        if v is None:
            self.calls += 1
            v = float(self.fn(x))
            self.cache[key] = v
        return v


def golden_section(f, a: float, b: float, xtol: float, max_iter: int = 400) -> SearchResult:
    """Minimize a unimodal ``f`` on ``[a, b]``; also tries both endpoints and 0 when inside."""
    evals = 0

    def F(t):
        nonlocal evals
        evals += 1
        return f(t)

    c = b - _INVPHI * (b - a)
    e = a + _INVPHI * (b - a)
    fc, fe = F(c), F(e)
    it = 0
    while b - a > xtol and it < max_iter:
        it += 1
        if fc <= fe:
            b, e, fe = e, c, fc
            c = b - _INVPHI * (b - a)
            fc = F(c)
        else:
            a, c, fc = c, e, fe
            e = a + _INVPHI * (b - a)
            fe = F(e)
    cands = [(fc, c), (fe, e), (F(a), a), (F(b), b)]
    if a <= 0.0 <= b:
        cands.append((F(0.0), 0.0))
    fx, x = min(cands, key=lambda t: (t[0], abs(t[1])))
    return SearchResult(np.array([x]), fx, evals)


def _poll_sets(m: int, rng):
    """Coordinate directions first, then corners of the cube (small m) and random ones."""
    basis = np.vstack([np.eye(m), -np.eye(m)])
    extra = []
    if m <= 4:
        extra = [np.array(c, dtype=float) for c in itertools.product((-1.0, 1.0), repeat=m)]
        extra = [c / math.sqrt(m) for c in extra]
    R = rng.standard_normal((2, m))
    extra += list(R / np.linalg.norm(R, axis=1, keepdims=True))
    return basis, np.array(extra)


def _rotation(m: int, rng):
    Q, r = np.linalg.qr(rng.standard_normal((m, m)))
    return Q * np.sign(np.diag(r))


def pattern_search(f, x0, step, lower, upper, xtol: float, seed: int = 0,
                   restarts: int = 2, fixed=None, scale: float = 1.0) -> SearchResult:
    """Compass search with step halving and rotated-basis restarts.

    Parameters
    ----------
    f : callable
        Convex objective on R^m.
    x0 : array_like
        Start point (clipped into the box).
    step : array_like
        Initial per-coordinate step.
    lower, upper : array_like
        Box bounds.
    xtol : float
        Stop once every step component is below ``xtol``.
    fixed : array_like of bool, optional
        Coordinates held at their start value.
    scale : float
        Objective scale for the strict-decrease test.
    """
    rng = np.random.default_rng(seed)
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    F = Memo(f)
    m = len(lower)
    free = np.ones(m, bool) if fixed is None else ~np.asarray(fixed, bool)
    x = np.clip(np.asarray(x0, dtype=float), lower, upper)
    fx = F(x)
    h0 = np.where(free, np.asarray(step, dtype=float), 0.0)
    gap = 0.0
    eps = 1e-14 * max(scale, abs(fx), 1e-300)
    if not free.any():
        return SearchResult(x, fx, F.calls, 0.0)
    k = int(free.sum())
    idx = np.flatnonzero(free)
    rot = np.eye(k)
    for r in range(restarts + 1):
        h = h0 * (1.0 if r == 0 else 1e-3 ** r)
        basis, extra = _poll_sets(k, rng)
        basis, extra = basis @ rot.T, extra @ rot.T
        while h[free].max() > xtol:
            moved = False
            vals = {}
            for j, u in enumerate(basis):
                y = x.copy()
                y[idx] += h[idx] * u
                inside = np.all((y >= lower) & (y <= upper))
                y = np.clip(y, lower, upper)
                fy = F(y)
                if inside:
                    vals[j] = fy
                if fy < fx - eps:
                    x, fx, moved = y, fy, True
                    break
            if not moved:
                for j in range(k):
                    if j in vals and j + k in vals:
                        gap = max(gap, fx - 0.5 * (vals[j] + vals[j + k]))
                for u in extra:
                    y = x.copy()
                    y[idx] += h[idx] * u
                    y = np.clip(y, lower, upper)
                    fy = F(y)
                    if fy < fx - eps:
                        x, fx, moved = y, fy, True
                        break
            if not moved:
                h = h * 0.5
        rot = _rotation(k, rng)
    return SearchResult(x, fx, F.calls, max(gap, 0.0))


@dataclass
class EllipsoidResult:
    x: np.ndarray
    fx: float
    lower_bound: float
    evaluations: int
    center: np.ndarray | None = None


def ellipsoid_minimize(oracle, lower, upper, tol: float, max_iter: int = 5000,
                       fixed=None, xtol: float = 0.0) -> EllipsoidResult:
    """Deep-cut ellipsoid method for a convex function on a box.

    ``oracle(x)`` returns ``(f(x), g)`` with ``g`` a subgradient.  The
    returned lower bound is valid whenever the subgradients are exact.
    Stops when the value gap is below ``tol`` or the ellipsoid's widest
    semi-axis is below ``xtol``.  Cuts use only subgradient directions, so
    the final ``center`` locates the minimizer beyond the square root of
    the value precision.
    """
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    free = np.ones(len(lower), bool) if fixed is None else ~np.asarray(fixed, bool)
    idx = np.flatnonzero(free)
    m = len(idx)
    base = np.clip(np.zeros(len(lower)), lower, upper)
    if m == 0:
        f, _ = oracle(base)
        return EllipsoidResult(base, f, f, 1)
    lo, hi = lower[idx], upper[idx]
    c = (lo + hi) / 2
    P = np.diag((m * ((hi - lo) / 2) ** 2) + 1e-300)
    best_x, best_f, lb, evals = None, math.inf, -math.inf, 0

    def full(u):
        x = base.copy()
        x[idx] = u
        return x

    for _ in range(max_iter):
        if xtol > 0 and math.sqrt(max(float(np.linalg.eigvalsh(P)[-1]), 0.0)) <= xtol:
            break
        out = np.flatnonzero((c < lo) | (c > hi))
        if len(out):
            j = out[0]
            g = np.zeros(m)
            g[j] = 1.0 if c[j] > hi[j] else -1.0
            alpha = (c[j] - hi[j]) if c[j] > hi[j] else (lo[j] - c[j])
        else:
            f, gfull = oracle(full(c))
            evals += 1
            g = np.asarray(gfull, dtype=float)[idx]
            if f < best_f:
                best_f, best_x = f, c.copy()
            gn = math.sqrt(max(float(g @ P @ g), 0.0))
            if gn == 0.0:
                lb = best_f
                break
            lb = max(lb, f - gn)
            if best_f - lb <= tol:
                break
            alpha = f - best_f
        gn = math.sqrt(max(float(g @ P @ g), 0.0))
        if gn == 0.0:
            break
        a = min(alpha / gn, 0.999)
        gt = g / gn
        Pg = P @ gt
        if m == 1:
            # interval bisection with deep cut
            half = math.sqrt(P[0, 0])
            left, right = c[0] - half, c[0] + half
            if gt[0] > 0:
                right = c[0] - a * half
            else:
                left = c[0] + a * half
            c = np.array([(left + right) / 2])
            P = np.array([[((right - left) / 2) ** 2]])
        else:
            c = c - (1 + m * a) / (m + 1) * Pg
            P = (m * m * (1 - a * a) / (m * m - 1.0)) * (P - (2 * (1 + m * a) / ((m + 1) * (1 + a))) * np.outer(Pg, Pg))
            P = (P + P.T) / 2
    if best_x is None:
        best_x = np.clip(c, lo, hi)
        best_f, _ = oracle(full(best_x))
        evals += 1
    return EllipsoidResult(full(best_x), best_f, lb, evals, full(np.clip(c, lo, hi)))
