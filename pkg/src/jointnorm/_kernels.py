"""Compiled inner loops for the nested-norm ascent.

Exponents are passed as floats with ``np.inf`` for infinity; the exact
``Exponent`` type never reaches this module.  All functions are generic
over float64 and complex128 operands.
"""

import numpy as np
from numba import njit

_TIE = 1e-12


@njit(cache=True)
def _pnorm(v, p):
    n = v.shape[0]
    m = 0.0
    for i in range(n):
        a = abs(v[i])
        if a > m:
            m = a
    if p == np.inf or m == 0.0:
        return m
    if p == 1.0:
        s = 0.0
        for i in range(n):
            s += abs(v[i])
        return s
    s = 0.0
    if p == 2.0:
        for i in range(n):
            t = abs(v[i]) / m
            s += t * t
        return m * np.sqrt(s)
    for i in range(n):
        s += (abs(v[i]) / m) ** p
    return m * s ** (1.0 / p)


@njit(cache=True)
def _csgn(z):
    a = abs(z)
    if a == 0.0:
        return z * 0.0
    return np.conj(z) / a


@njit(cache=True)
def _matvec(M, x, y):
    K, n = M.shape
    for i in range(K):
        acc = M[i, 0] * x[0]
        for j in range(1, n):
            acc += M[i, j] * x[j]
        y[i] = acc


@njit(cache=True)
def _rmatvec(M, f, g):
    K, n = M.shape
    for j in range(n):
        acc = M[0, j] * f[0]
        for i in range(1, K):
            acc += M[i, j] * f[i]
        g[j] = acc


@njit(cache=True)
def _nested(y, offs, inner, outer, r):
    d = offs.shape[0] - 1
    for k in range(d):
        r[k] = _pnorm(y[offs[k]:offs[k + 1]], inner[k])
    return _pnorm(r, outer)


@njit(cache=True)
def nested_value(M, offs, inner, outer, x):
    y = np.empty(M.shape[0], dtype=M.dtype)
    r = np.empty(offs.shape[0] - 1)
    _matvec(M, x, y)
    return _nested(y, offs, inner, outer, r)


@njit(cache=True)
def _block_dual(y, lo, hi, p, w, f, pick):
    """Write w * (norming functional of y[lo:hi]) into f[lo:hi].

    For p = inf the coordinate ``pick`` (absolute index, -1 for the lowest
    tied one) is used.  Returns the number of tied maximal coordinates.
    """
    for i in range(lo, hi):
        f[i] = 0.0
    if w == 0.0:
        return 1
    nrm = _pnorm(y[lo:hi], p)
    if nrm == 0.0:
        return 1
    if p == np.inf:
        ties = 0
        first = -1
        for i in range(lo, hi):
            if abs(y[i]) >= nrm * (1.0 - _TIE):
                ties += 1
                if first < 0:
                    first = i
        k = first if pick < 0 else pick
        f[k] = w * _csgn(y[k])
        return ties
    if p == 1.0:
        for i in range(lo, hi):
            f[i] = w * _csgn(y[i])
        return 1
    for i in range(lo, hi):
        a = abs(y[i])
        if a > 0.0:
            if p == 2.0:
                f[i] = w * _csgn(y[i]) * (a / nrm)
            else:
                f[i] = w * _csgn(y[i]) * (a / nrm) ** (p - 1.0)
    return 1


@njit(cache=True)
def _dual_element(g, dom, x):
    """Unit vector x in l_dom with sum g_i x_i = ||g||_q (q conjugate of dom)."""
    n = g.shape[0]
    gmax = 0.0
    for i in range(n):
        a = abs(g[i])
        if a > gmax:
            gmax = a
    if gmax == 0.0:
        return False
    if dom == 1.0:
        for i in range(n):
            x[i] = 0.0
        for i in range(n):
            if abs(g[i]) >= gmax * (1.0 - _TIE):
                x[i] = _csgn(g[i])
                break
        return True
    if dom == np.inf:
        for i in range(n):
            if abs(g[i]) == 0.0:
                x[i] = 1.0
            else:
                x[i] = _csgn(g[i])
        return True
    q = dom / (dom - 1.0)
    nq = _pnorm(g, q)
    for i in range(n):
        a = abs(g[i])
        if a == 0.0:
            x[i] = 0.0
        elif q == 2.0:
            x[i] = _csgn(g[i]) * (a / nq)
        else:
            x[i] = _csgn(g[i]) * (a / nq) ** (q - 1.0)
    return True


@njit(cache=True)
def _functional(y, offs, inner, outer, r, f, ocomp, ipick):
    """Norming functional of y in the nested norm.

    ``ocomp`` forces the outer component for outer = inf (-1: lowest tie);
    ``ipick[k]`` forces the inner coordinate for inner = inf blocks.
    Returns the number of outer ties.
    """
    d = offs.shape[0] - 1
    R = _nested(y, offs, inner, outer, r)
    oties = 1
    for k in range(d):
        if outer == np.inf:
            w = 0.0
        elif outer == 1.0:
            w = 1.0
        else:
            if R == 0.0:
                w = 0.0
            elif outer == 2.0:
                w = r[k] / R
            else:
                w = (r[k] / R) ** (outer - 1.0)
        _block_dual(y, offs[k], offs[k + 1], inner[k], w, f, ipick[k])
    if outer == np.inf:
        oties = 0
        first = -1
        for k in range(d):
            if r[k] >= R * (1.0 - _TIE):
                oties += 1
                if first < 0:
                    first = k
        kk = first if ocomp < 0 else ocomp
        _block_dual(y, offs[kk], offs[kk + 1], inner[kk], 1.0, f, ipick[kk])
    return oties


@njit(cache=True)
def _step(M, offs, inner, outer, dom, x, y, r, f, g, xn):
    """One ascent step x -> xn; ties in inf-norms resolved by the largest ||g||_q."""
    K, n = M.shape
    d = offs.shape[0] - 1
    q = np.inf if dom == 1.0 else (1.0 if dom == np.inf else dom / (dom - 1.0))
    _matvec(M, x, y)
    ipick = -np.ones(d, dtype=np.int64)
    R = _nested(y, offs, inner, outer, r)
    # outer component choice
    ocomp = -1
    if outer == np.inf:
        best = -1.0
        for k in range(d):
            if r[k] >= R * (1.0 - _TIE):
                _functional(y, offs, inner, outer, r, f, k, ipick)
                _rmatvec(M, f, g)
                val = _pnorm(g, q)
                if val > best:
                    best = val
                    ocomp = k
    # inner coordinate choices, greedily per block
    for k in range(d):
        if inner[k] != np.inf:
            continue
        lo = offs[k]
        hi = offs[k + 1]
        nrm = _pnorm(y[lo:hi], np.inf)
        if nrm == 0.0:
            continue
        ties = 0
        for i in range(lo, hi):
            if abs(y[i]) >= nrm * (1.0 - _TIE):
                ties += 1
        if ties < 2:
            continue
        best = -1.0
        bi = -1
        for i in range(lo, hi):
            if abs(y[i]) >= nrm * (1.0 - _TIE):
                ipick[k] = i
                _functional(y, offs, inner, outer, r, f, ocomp, ipick)
                _rmatvec(M, f, g)
                val = _pnorm(g, q)
                if val > best:
                    best = val
                    bi = i
        ipick[k] = bi
    _functional(y, offs, inner, outer, r, f, ocomp, ipick)
    _rmatvec(M, f, g)
    if not _dual_element(g, dom, xn):
        return False
    if dom == 1.0:
        # coordinate choice among tied |g_j|: keep the one with the largest image norm
        gmax = _pnorm(g, np.inf)
        best = -1.0
        bj = -1
        for j in range(n):
            if abs(g[j]) >= gmax * (1.0 - _TIE):
                for i in range(n):
                    xn[i] = 0.0
                xn[j] = _csgn(g[j])
                _matvec(M, xn, y)
                val = _nested(y, offs, inner, outer, r)
                if val > best:
                    best = val
                    bj = j
        for i in range(n):
            xn[i] = 0.0
        xn[bj] = _csgn(g[bj])
    return True


@njit(cache=True)
def ascend(M, offs, inner, outer, dom, X0, max_iter, rtol, xtol):
    """Multi-start ascent of x -> ||M x|| over the unit sphere of l_dom.

    Returns final values, final points, and iteration counts per start.  With
    ``xtol > 0`` a start stops once the step is below ``xtol``; otherwise
    once the relative value gain is below ``rtol``.
    """
    N, n = X0.shape
    K = M.shape[0]
    d = offs.shape[0] - 1
    vals = np.empty(N)
    X = np.empty_like(X0)
    its = np.zeros(N, dtype=np.int64)
    y = np.empty(K, dtype=M.dtype)
    f = np.empty(K, dtype=M.dtype)
    g = np.empty(n, dtype=M.dtype)
    x = np.empty(n, dtype=M.dtype)
    xn = np.empty(n, dtype=M.dtype)
    r = np.empty(d)
    for s in range(N):
        nx = _pnorm(X0[s], dom)
        for i in range(n):
            x[i] = X0[s, i] / nx
        _matvec(M, x, y)
        v = _nested(y, offs, inner, outer, r)
        it = 0
        while it < max_iter:
            it += 1
            if not _step(M, offs, inner, outer, dom, x, y, r, f, g, xn):
                break
            _matvec(M, xn, y)
            vn = _nested(y, offs, inner, outer, r)
            # decreases at rounding level are noise near flat maxima
            if vn < v * (1.0 - 1e-14):
                break
            dx = 0.0
            for i in range(n):
                a = abs(xn[i] - x[i])
                if a > dx:
                    dx = a
                x[i] = xn[i]
            gain = vn - v
            v = vn
            if xtol > 0.0:
                if dx <= xtol:
                    break
            elif gain <= rtol * v:
                break
        vals[s] = v
        for i in range(n):
            X[s, i] = x[i]
        its[s] = it
    return vals, X, its
