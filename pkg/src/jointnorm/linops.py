"""Operators between l_p spaces and d-tuples with a joint codomain norm.

A tuple ``T = (T_1, ..., T_d)`` maps ``x`` to ``(T_1 x, ..., T_d x)``, normed by
the outer l_p norm of the component norms.  Each component keeps its own
codomain space.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch
from .spaces import (
    COMPLEX, REAL, Exponent, LpSpace, duality_map, is_extreme_point, lp_norm,
)

__all__ = [
    "Operator", "OperatorTuple", "Layout",
    "apply", "tuple_apply", "tuple_codomain_norm", "affine_tuple", "adjoint",
    "nested_norms", "nested_functionals", "nested_rho", "nested_is_smooth",
    "nested_is_extreme", "nested_pair", "nested_norming",
]


@dataclass(frozen=True, eq=False)
class Operator:
    matrix: np.ndarray
    domain: LpSpace
    codomain: LpSpace

    def __post_init__(self):
        field = self.domain.field
        if self.codomain.field != field:
            raise DimensionMismatch("domain and codomain fields differ")
        m = np.array(self.matrix, dtype=self.domain.dtype)
        if m.ndim != 2 or m.shape != (self.codomain.dim, self.domain.dim):
            raise DimensionMismatch(
                f"matrix shape {m.shape} does not match "
                f"{self.codomain.dim}x{self.domain.dim}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_matrix(cls, matrix, p_domain=2, p_codomain=None, field=None) -> "Operator":
        m = np.asarray(matrix)
        if field is None:
            field = COMPLEX if np.iscomplexobj(m) else REAL
        p_codomain = p_domain if p_codomain is None else p_codomain
        return cls(m, LpSpace(m.shape[1], p_domain, field), LpSpace(m.shape[0], p_codomain, field))

    @property
    def field(self) -> str:
        return self.domain.field

    @property
    def shape(self):
        return self.matrix.shape

    def __call__(self, x):
        return apply(self, x)

    def scaled(self, c) -> "Operator":
        return Operator(self.matrix * c, self.domain, self.codomain)

    def __repr__(self):
        return (f"Operator({self.codomain.dim}x{self.domain.dim}, "
                f"p={self.domain.p}->{self.codomain.p}, {self.field})")


@dataclass(frozen=True, eq=False)
class OperatorTuple:
    components: tuple
    outer_p: Exponent

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise DimensionMismatch("a tuple needs at least one component")
        dom = comps[0].domain
        for k, c in enumerate(comps):
            if c.domain != dom:
                raise DimensionMismatch(f"component {k} has domain {c.domain}, expected {dom}")
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "outer_p", Exponent.of(self.outer_p))

    @classmethod
    def single(cls, op: Operator) -> "OperatorTuple":
        return cls((op,), op.codomain.p)

    @property
    def d(self) -> int:
        return len(self.components)

    @property
    def domain(self) -> LpSpace:
        return self.components[0].domain

    @property
    def field(self) -> str:
        return self.domain.field

    def __len__(self):
        return len(self.components)

    def __getitem__(self, k) -> Operator:
        return self.components[k]

    def __iter__(self):
        return iter(self.components)

    def __call__(self, x):
        return tuple_apply(self, x)

    def stacked(self) -> np.ndarray:
        return np.vstack([c.matrix for c in self.components])

    def layout(self) -> "Layout":
        return Layout.of(self)

    def map(self, fn) -> "OperatorTuple":
        return OperatorTuple(tuple(fn(c) for c in self.components), self.outer_p)

    def is_zero(self) -> bool:
        return all(not np.any(c.matrix) for c in self.components)

    def __repr__(self):
        return f"OperatorTuple(d={self.d}, outer_p={self.outer_p}, {self.components[0]!r})"


def apply(T: Operator, x) -> np.ndarray:
    x = np.asarray(x)
    if x.shape != (T.domain.dim,):
        raise DimensionMismatch(f"vector of shape {x.shape} not in domain of dim {T.domain.dim}")
    return T.matrix @ x


def tuple_apply(tup: OperatorTuple, x) -> list[np.ndarray]:
    return [apply(c, x) for c in tup.components]


def tuple_codomain_norm(values: Sequence, outer_p, spaces: Sequence[LpSpace] | None = None) -> float:
    """Outer l_p norm of the component norms.

    ``spaces`` gives each component's codomain; when omitted, ``values`` must
    be ``(vector, space)`` pairs.
    """
    if len(values) == 0:
        raise ValueError("empty value list")
    if spaces is None:
        norms = [lp_norm(v, s.p) for v, s in values]
    else:
        norms = [lp_norm(v, s.p) for v, s in zip(values, spaces)]
    return lp_norm(np.array(norms), outer_p)


def affine_tuple(T: OperatorTuple, S: OperatorTuple, z) -> OperatorTuple:
    """The tuple ``(T_1 - z_1 S_1, ..., T_d - z_d S_d)``."""
    z = np.asarray(z)
    if z.shape != (T.d,) or S.d != T.d:
        raise DimensionMismatch(f"z has shape {z.shape}, tuples have d={T.d}, {S.d}")
    comps = []
    for t, s, zj in zip(T.components, S.components, z):
        if t.shape != s.shape or t.domain != s.domain or t.codomain != s.codomain:
            raise DimensionMismatch("T and S components have different spaces")
        comps.append(Operator(t.matrix - zj * s.matrix, t.domain, t.codomain))
    return OperatorTuple(tuple(comps), T.outer_p)


def adjoint(T: Operator) -> Operator:
    """Conjugate transpose, mapping the dual of the codomain to the dual of the domain."""
    return Operator(T.matrix.conj().T, T.codomain.dual(), T.domain.dual())


# -- nested codomain machinery -------------------------------------------------

@dataclass(frozen=True, eq=False)
class Layout:
    """Block structure of a stacked tuple, in the float encoding used by kernels."""

    offsets: np.ndarray
    inner: tuple
    outer: Exponent
    domain: LpSpace

    @classmethod
    def of(cls, tup: OperatorTuple) -> "Layout":
        offs = np.cumsum([0] + [c.codomain.dim for c in tup.components]).astype(np.int64)
        return cls(offs, tuple(c.codomain for c in tup.components), tup.outer_p, tup.domain)

    @property
    def inner_values(self) -> np.ndarray:
        return np.array([s.p.value for s in self.inner], dtype=np.float64)

    @property
    def d(self) -> int:
        return len(self.inner)

    def blocks(self, y):
        return [y[self.offsets[k]:self.offsets[k + 1]] for k in range(self.d)]


def _pnorm_axis(a, p: Exponent, axis=-1):
    """p-norm of nonnegative ``a`` along ``axis`` (vectorized)."""
    if p.is_inf:
        return a.max(axis=axis)
    if p.is_one:
        return a.sum(axis=axis)
    m = a.max(axis=axis, keepdims=True)
    safe = np.where(m > 0, m, 1.0)
    s = np.sum((a / safe) ** p.value, axis=axis, keepdims=True) ** (1.0 / p.value)
    return np.squeeze(m * s, axis=axis)


def nested_norms(Y, layout: Layout):
    """Nested norm of stacked outputs ``Y`` of shape ``(..., K)``."""
    a = np.abs(Y)
    per = [_pnorm_axis(a[..., layout.offsets[k]:layout.offsets[k + 1]], s.p)
           for k, s in enumerate(layout.inner)]
    return _pnorm_axis(np.stack(per, axis=-1), layout.outer)


def _outer_space(layout, field=REAL):
    return LpSpace(layout.d, layout.outer, REAL)


def nested_functionals(ys: Sequence, layout: Layout, tol: float = 1e-7,
                       limit: int = 4096, directions: Sequence | None = None) -> list[list]:
    """Extreme points of J(y) for a tuple value ``y = (y_1, ..., y_d)``.

    Each returned functional is a list of per-component dual vectors.  A zero
    component paired with a nonzero outer weight may carry any unit functional;
    it is represented by the norming functionals of ``directions[k]`` (and
    their negatives) when given, else by ``±e_1``.
    """
    norms = np.array([lp_norm(y, s.p) for y, s in zip(ys, layout.inner)])
    if norms.max(initial=0.0) == 0:
        raise ValueError("J(0) is the whole dual ball")
    outer = duality_map(norms, _outer_space(layout), tol)
    weights = outer.extremes(limit)
    out = []
    for w in weights:
        choices = []
        for k, (y, s) in enumerate(zip(ys, layout.inner)):
            wk = float(np.real(w[k]))
            if wk == 0:
                choices.append([np.zeros(s.dim, dtype=s.dtype)])
            elif norms[k] > tol * norms.max():
                choices.append([wk * f for f in duality_map(y, s, tol).extremes(limit)])
            else:
                reps = []
                v = None if directions is None else np.asarray(directions[k])
                if v is not None and np.abs(v).max(initial=0) > 0:
                    for f in duality_map(v, s, tol).extremes(limit):
                        reps += [wk * f, -wk * f]
                else:
                    e = np.zeros(s.dim, dtype=s.dtype)
                    e[0] = 1
                    reps = [wk * e, -wk * e]
                choices.append(reps)
        n_combo = math.prod(len(c) for c in choices)
        if n_combo > limit:
            raise ValueError(f"{n_combo} extreme functionals exceed limit {limit}")
        out.extend([list(c) for c in itertools.product(*choices)])
    return out


def nested_norming(ys: Sequence, layout: Layout, tol: float = 1e-7) -> list:
    """One norming functional of ``ys`` (the first extreme point of J(y))."""
    norms = np.array([lp_norm(y, s.p) for y, s in zip(ys, layout.inner)])
    if norms.max(initial=0.0) == 0:
        raise ValueError("J(0) is the whole dual ball")
    w = duality_map(norms, _outer_space(layout), tol).base
    out = []
    for y, s, wk, nk in zip(ys, layout.inner, w, norms):
        if wk == 0 or nk == 0:
            out.append(np.zeros(s.dim, dtype=s.dtype))
        else:
            out.append(float(np.real(wk)) * duality_map(y, s, tol).base)
    return out


def nested_pair(f: Sequence, ys: Sequence) -> complex:
    """Bilinear pairing of a tuple functional with a tuple value."""
    return complex(sum(np.dot(fk, yk) for fk, yk in zip(f, ys)))


def nested_rho(ys: Sequence, vs: Sequence, layout: Layout, tol: float = 1e-7) -> tuple[float, float]:
    """(rho_minus, rho_plus) of the nested norm at ``ys`` along ``vs``.

    Uses the chain rule for one-sided derivatives: the outer norm's
    derivative at the vector of inner norms, taken along the inner
    derivatives.
    """
    def plus(vs_):
        norms = np.array([lp_norm(y, s.p) for y, s in zip(ys, layout.inner)])
        inner = []
        for y, v, s, nk in zip(ys, vs_, layout.inner, norms):
            if nk > 0:
                inner.append(duality_map(y, s, tol).support_re(v)[1])
            else:
                inner.append(lp_norm(v, s.p))
        return duality_map(norms, _outer_space(layout), tol).support_re(np.array(inner))[1]

    rp = plus(vs)
    rm = -plus([-np.asarray(v) for v in vs])
    return rm, rp


def nested_is_smooth(ys: Sequence, layout: Layout, tol: float = 1e-7) -> bool:
    """Whether J(y) is a singleton in the nested codomain."""
    norms = np.array([lp_norm(y, s.p) for y, s in zip(ys, layout.inner)])
    outer = duality_map(norms, _outer_space(layout), tol)
    if not outer.is_singleton:
        return False
    w = outer.base
    for k, (y, s) in enumerate(zip(ys, layout.inner)):
        if w[k] != 0 and not duality_map(y, s, tol).is_singleton:
            return False
    return True


def nested_is_extreme(f: Sequence, layout: Layout, tol: float = 1e-9) -> bool:
    """Whether the tuple functional ``f`` is an extreme point of the dual unit ball.

    The dual of ``l_p(Y_k)`` is ``l_q(Y_k*)``; extreme points are unit outer
    weights that are extreme in ``l_q^d`` times extreme unit functionals.
    """
    duals = [s.dual() for s in layout.inner]
    norms = np.array([lp_norm(fk, s.p) for fk, s in zip(f, duals)])
    qout = layout.outer.dual()
    try:
        if not is_extreme_point(norms, LpSpace(layout.d, qout, REAL), tol):
            return False
    except Exception:
        return False
    for fk, s, nk in zip(f, duals, norms):
        if nk > tol and not is_extreme_point(np.asarray(fk) / nk, s, tol):
            return False
    return True
