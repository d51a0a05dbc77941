"""Induced norms of operators and tuples, norm-attainment sets, and a grid oracle.

The general (p, q) problem is a nonconvex maximization; it is solved by a
multi-start ascent ``x <- J*(T^T J(T x))`` (a nonlinear power iteration).
Exact formulas are used where they exist:

* l_1 domain: the largest column norm (extreme points are ``±e_j``);
* l_inf codomain rows: the largest dual row norm;
* l_2 -> l_2: the largest singular value;
* a diagonal map of l_p to itself: the largest entry modulus;
* real l_inf domain: enumeration of the sign vertices;
* real codomains whose dual ball is a polytope: enumeration of its vertices.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .config import Config, resolve
from .errors import DimensionTooLarge
from .linops import Layout, Operator, OperatorTuple, nested_norms
from .spaces import COMPLEX, lp_norm, sgn

__all__ = [
    "NormResult", "AttainmentSet", "JointAttainment",
    "operator_norm", "tuple_norm", "norm_value", "attainment_set",
    "joint_attainment_check", "brute_force_norm", "grid_norms",
    "phase_normalize", "orbit_distance", "image_norm",
]

METHODS = ("exact_p1", "exact_row_dual", "exact_spectral", "exact_diagonal", "exact_vertex",
           "exact_dual_vertex", "power_iteration", "brute_force")

_VERTEX_LIMIT = 1 << 15
# ascent screening: iterations for every start, and how many continue
_SCREEN = 12
_KEEP = 10


@dataclass
class NormResult:
    value: float
    witnesses: list
    method: str
    residual: float
    starts_used: int

    @property
    def witness(self):
        return self.witnesses[0] if self.witnesses else None


@dataclass
class AttainmentSet:
    representatives: list
    complete_flag: bool
    value: float
    hits: list = field(default_factory=list)

    @property
    def orbits(self) -> int:
        return len(self.representatives)


@dataclass
class JointAttainment:
    nonempty: bool
    witness: np.ndarray | None
    margin: float
    eps: float
    component_norms: list

    def __iter__(self):
        return iter((self.nonempty, self.witness))


# -- helpers ---------------------------------------------------------------

def _as_tuple(T) -> OperatorTuple:
    return T if isinstance(T, OperatorTuple) else OperatorTuple.single(T)


def _kernel_args(tup: OperatorTuple):
    lay = tup.layout()
    M = np.ascontiguousarray(tup.stacked())
    outer = lay.outer.value if tup.d > 1 else 2.0
    return M, lay.offsets, lay.inner_values, outer, tup.domain.p.value


def image_norm(tup, x) -> float:
    """``||T x||`` in the nested codomain norm."""
    tup = _as_tuple(tup)
    M, offs, inner, outer, _ = _kernel_args(tup)
    return float(_kernels.nested_value(M, offs, inner, outer, np.asarray(x, dtype=M.dtype)))


def _image_norms(tup, X):
    tup = _as_tuple(tup)
    Y = np.asarray(X) @ tup.stacked().T
    return nested_norms(Y, tup.layout())


def phase_normalize(x):
    """Rotate x so its largest-modulus entry (lowest index on ties) is real positive."""
    x = np.asarray(x)
    a = np.abs(x)
    k = int(np.flatnonzero(a >= a.max() * (1 - 1e-9))[0])
    return x * np.conj(sgn(x[k]))


def orbit_distance(x, y) -> float:
    """min over unimodular alpha of ||x - alpha y||_2."""
    x = np.asarray(x)
    y = np.asarray(y)
    v = np.vdot(x, x).real + np.vdot(y, y).real - 2 * abs(np.vdot(y, x))
    return math.sqrt(max(v, 0.0))


def _lex_key(x):
    x = np.asarray(x)
    return tuple(np.round(np.concatenate([x.real, x.imag]), 12))


def _starts(n: int, field: str, cfg: Config, extra=None, n_rand=None) -> np.ndarray:
    """Canonical starts (coordinates, all-ones, sign patterns) plus seeded random ones."""
    dtype = np.complex128 if field == COMPLEX else np.float64
    rows = [np.eye(n), np.ones((1, n))]
    if n <= 6:
        pats = np.array(list(itertools.product((1.0, -1.0), repeat=n - 1)))
        if len(pats):
            rows.append(np.hstack([np.ones((len(pats), 1)), pats]))
    rng = np.random.default_rng([cfg.seed, n, 1 if field == COMPLEX else 0])
    n_rand = max(cfg.n_starts, 8 * n) if n_rand is None else n_rand
    R = rng.standard_normal((n_rand, n))
    if field == COMPLEX:
        R = R + 1j * rng.standard_normal((n_rand, n))
    rows.append(R)
    X = np.vstack(rows).astype(dtype)
    if extra is not None and len(extra):
        X = np.vstack([np.asarray(extra, dtype=dtype).reshape(-1, n), X])
    return np.ascontiguousarray(X)


def _ascent(tup: OperatorTuple, cfg: Config, extra=None, polish=False, starts=None, n_rand=None):
    M, offs, inner, outer, dom = _kernel_args(tup)
    X0 = _starts(tup.domain.dim, tup.field, cfg, extra, n_rand) if starts is None else starts
    X0 = np.ascontiguousarray(X0, dtype=M.dtype)
    xtol = cfg.xtol_polish if polish else 0.0
    if polish or len(X0) <= _KEEP:
        return _kernels.ascend(M, offs, inner, outer, dom, X0, cfg.max_iter, cfg.rtol_value, xtol)
    # screen every start briefly, then run the best ones to convergence
    vals, X, its = _kernels.ascend(M, offs, inner, outer, dom, X0, _SCREEN, cfg.rtol_value, 0.0)
    top = np.sort(np.argsort(-vals, kind="stable")[:_KEEP])
    v2, X2, it2 = _kernels.ascend(M, offs, inner, outer, dom, np.ascontiguousarray(X[top]),
                                  cfg.max_iter, cfg.rtol_value, 0.0)
    vals[top], X[top], its[top] = v2, X2, its[top] + it2
    return vals, X, its


def _cluster(points, values, cfg: Config):
    """Group points into phase orbits; returns reps (best first) and hit counts."""
    order = sorted(range(len(points)), key=lambda i: (-values[i], _lex_key(phase_normalize(points[i]))))
    reps, hits, best = [], [], []
    for i in order:
        x = phase_normalize(points[i])
        for k, r in enumerate(reps):
            if orbit_distance(x, r) <= cfg.delta_sep:
                hits[k] += 1
                break
        else:
            reps.append(x)
            hits.append(1)
            best.append(values[i])
    return reps, hits, best


# -- exact paths ---------------------------------------------------------

def _dual_element(g, dom_p):
    """Unit x in the domain with sum g_i x_i = ||g||_q."""
    g = np.asarray(g)
    if dom_p.is_inf:
        x = np.conj(sgn(g))
        x[np.abs(g) == 0] = 1
        return x
    if dom_p.is_one:
        x = np.zeros_like(g)
        k = int(np.argmax(np.abs(g)))
        x[k] = np.conj(sgn(g[k]))
        return x
    q = dom_p.dual().value
    a = np.abs(g)
    return np.conj(sgn(g)) * (a / lp_norm(g, q)) ** (q - 1)


def _exact_p1(tup, cfg):
    n = tup.domain.dim
    vals = _image_norms(tup, np.eye(n))
    v = float(vals.max())
    wit = [np.eye(n, dtype=tup.domain.dtype)[j] for j in np.flatnonzero(vals >= v - cfg.tau_norm)]
    return v, wit


def _rows_are_linf(tup):
    inner_inf = all(c.codomain.p.is_inf or c.codomain.dim == 1 for c in tup.components)
    return inner_inf and (tup.d == 1 or tup.outer_p.is_inf)


def _exact_row_dual(tup, cfg):
    M = tup.stacked()
    q = tup.domain.p.dual()
    vals = np.array([lp_norm(r, q) for r in M])
    v = float(vals.max())
    wit = [_dual_element(M[i], tup.domain.p) for i in np.flatnonzero(vals >= v - cfg.tau_norm)]
    return v, wit


def _is_spectral(tup):
    return (tup.domain.p.value == 2.0
            and all(c.codomain.p.value == 2.0 for c in tup.components)
            and (tup.d == 1 or tup.outer_p.value == 2.0))


def _exact_spectral(tup, cfg):
    _, s, vh = np.linalg.svd(tup.stacked())
    v = float(s[0])
    top = np.flatnonzero(s >= v - cfg.tau_norm)
    return v, [np.conj(vh[i]) for i in top], len(top)


def _is_diagonal(tup):
    if tup.d != 1:
        return False
    c = tup.components[0]
    M = c.matrix
    return (M.shape[0] == M.shape[1] and c.codomain.p == c.domain.p
            and not np.any(M - np.diag(np.diag(M))))


def _exact_diagonal(tup, cfg):
    a = np.abs(np.diag(tup.components[0].matrix))
    v = float(a.max())
    top = np.flatnonzero(a >= v - cfg.tau_norm)
    eye = np.eye(len(a), dtype=tup.domain.dtype)
    # tied entries span a whole face of maximizers when the norm is strictly convex
    return v, [eye[i] for i in top], len(top)


def _exact_vertex(tup, cfg):
    n = tup.domain.dim
    V = np.array(list(itertools.product((1.0, -1.0), repeat=n - 1)), dtype=float).reshape(-1, n - 1)
    V = np.hstack([np.ones((len(V), 1)), V])
    vals = _image_norms(tup, V)
    v = float(vals.max())
    return v, [V[i] for i in np.flatnonzero(vals >= v - cfg.tau_norm)]


def _dual_polytope_vertices(tup):
    """Vertices (up to sign) of the dual unit ball of a real l_{1|inf}(l_{1|inf}) codomain."""
    def comp_vertices(sp):
        if sp.p.is_inf:          # dual l_1: ±e_i
            return [np.eye(sp.dim)[i] for i in range(sp.dim)] + [-np.eye(sp.dim)[i] for i in range(sp.dim)]
        return [np.array(s, dtype=float) for s in itertools.product((1.0, -1.0), repeat=sp.dim)]

    spaces = [c.codomain for c in tup.components]
    offs = tup.layout().offsets
    K = offs[-1]
    if tup.d == 1 or tup.outer_p.is_inf:
        for k, sp in enumerate(spaces):
            for f in comp_vertices(sp):
                out = np.zeros(K)
                out[offs[k]:offs[k + 1]] = f
                yield out
    else:
        for combo in itertools.product(*[comp_vertices(sp) for sp in spaces]):
            yield np.concatenate(combo)


def _dual_vertex_count(tup):
    counts = [2 * c.codomain.dim if c.codomain.p.is_inf else 2 ** c.codomain.dim for c in tup.components]
    return sum(counts) if (tup.d == 1 or tup.outer_p.is_inf) else math.prod(counts)


def _dual_polytope(tup):
    if tup.field == COMPLEX:
        return False
    inner_ok = all(c.codomain.p.is_one or c.codomain.p.is_inf for c in tup.components)
    outer_ok = tup.d == 1 or tup.outer_p.is_one or tup.outer_p.is_inf
    return inner_ok and outer_ok and _dual_vertex_count(tup) <= _VERTEX_LIMIT


def _exact_dual_vertex(tup, cfg):
    M = tup.stacked()
    F = np.array(list(_dual_polytope_vertices(tup)))
    G = F @ M
    q = tup.domain.p.dual()
    vals = np.array([lp_norm(g, q) for g in G])
    v = float(vals.max())
    wit = [_dual_element(G[i], tup.domain.p) for i in np.flatnonzero(vals >= v - cfg.tau_norm)]
    return v, wit


def _exact(tup, cfg):
    """Exact (value, witnesses, method, multiplicity) or None."""
    dom = tup.domain.p
    if dom.is_one:
        return (*_exact_p1(tup, cfg), "exact_p1", None)
    if _rows_are_linf(tup):
        return (*_exact_row_dual(tup, cfg), "exact_row_dual", None)
    if _is_spectral(tup):
        v, w, m = _exact_spectral(tup, cfg)
        return v, w, "exact_spectral", m
    if _is_diagonal(tup):
        v, w, m = _exact_diagonal(tup, cfg)
        return v, w, "exact_diagonal", m
    if dom.is_inf and tup.field != COMPLEX and tup.domain.dim <= 16:
        return (*_exact_vertex(tup, cfg), "exact_vertex", None)
    if _dual_polytope(tup):
        return (*_exact_dual_vertex(tup, cfg), "exact_dual_vertex", None)
    return None


def _use_max_formula(tup, cfg):
    return cfg.fast_paths and tup.d > 1 and tup.outer_p.is_inf


# -- public entry points ---------------------------------------------------------

def norm_value(T, cfg: Config | None = None, extra=None) -> tuple[float, np.ndarray]:
    """Fast scalar norm with one maximizer; used inside searches.

    With warm starts ``extra`` only ``cfg.search_starts`` random starts are added.
    """
    cfg = resolve(cfg)
    tup = _as_tuple(T)
    if not np.any(tup.stacked()):
        x = np.zeros(tup.domain.dim, dtype=tup.domain.dtype)
        x[0] = 1
        return 0.0, x
    if _use_max_formula(tup, cfg):
        best = (-1.0, None)
        for c in tup.components:
            v, x = norm_value(c, cfg, extra)
            if v > best[0]:
                best = (v, x)
        return best
    ex = _exact(tup, cfg)
    if ex is not None:
        return ex[0], ex[1][0]
    n_rand = None if extra is None else cfg.search_starts
    vals, X, _ = _ascent(tup, cfg, extra, n_rand=n_rand)
    i = int(np.argmax(vals))
    return float(vals[i]), X[i]


def tuple_norm(T, cfg: Config | None = None, extra=None) -> NormResult:
    """``||T||`` for an operator or tuple, with phase-normalized maximizers."""
    cfg = resolve(cfg)
    tup = _as_tuple(T)
    n = tup.domain.dim
    if not np.any(tup.stacked()):
        e = np.zeros(n, dtype=tup.domain.dtype)
        e[0] = 1
        return NormResult(0.0, [e], "exact_p1" if tup.domain.p.is_one else "power_iteration", 0.0, 0)
    if _use_max_formula(tup, cfg):
        parts = [tuple_norm(c, cfg, extra) for c in tup.components]
        k = int(np.argmax([r.value for r in parts]))
        best = parts[k]
        return NormResult(best.value, best.witnesses, best.method,
                          _residual(tup, best.value, best.witnesses),
                          sum(r.starts_used for r in parts))
    ex = _exact(tup, cfg)
    if ex is not None:
        v, wit, method, _ = ex
        wit = _sorted_witnesses(tup, wit)
        return NormResult(v, wit, method, _residual(tup, v, wit), 0)
    vals, X, _ = _ascent(tup, cfg, extra)
    v = float(vals.max())
    keep = np.flatnonzero(vals >= v - cfg.tau_attain)
    reps, _, _ = _cluster([X[i] for i in keep], vals[keep], cfg)
    # polish the distinct maximizers
    pv, PX, _ = _ascent(tup, cfg, polish=True, starts=np.array(reps))
    v = max(v, float(pv.max()))
    wit = [PX[i] for i in range(len(PX)) if pv[i] >= v - cfg.tau_attain]
    wit = _sorted_witnesses(tup, wit)
    return NormResult(v, wit, "power_iteration", _residual(tup, v, wit), len(vals))


def operator_norm(T, cfg: Config | None = None) -> NormResult:
    return tuple_norm(T, cfg)


def _sorted_witnesses(tup, wit):
    wit = [phase_normalize(np.asarray(w, dtype=tup.domain.dtype) / lp_norm(w, tup.domain.p)) for w in wit]
    vals = [image_norm(tup, w) for w in wit]
    reps, _, _ = _cluster(wit, vals, resolve(None))
    return reps


def _residual(tup, v, wit):
    if not wit:
        return 0.0
    return float(max(abs(image_norm(tup, w) - v) for w in wit))


def attainment_set(T, cfg: Config | None = None, norm: NormResult | None = None) -> AttainmentSet:
    """Phase-orbit representatives of M_T = {x in S_X : ||Tx|| = ||T||}.

    ``complete_flag`` is heuristic: it is set when every orbit was reached
    by at least two starts and no degenerate top singular space was seen.
    """
    cfg = resolve(cfg)
    tup = _as_tuple(T)
    norm = tuple_norm(tup, cfg) if norm is None else norm
    value = norm.value
    if _use_max_formula(tup, cfg):
        pts, vals, complete = [], [], True
        for c in tup.components:
            cn = tuple_norm(c, cfg)
            if cn.value >= value - cfg.tau_tie:
                a = attainment_set(c, cfg, cn)
                pts += a.representatives
                complete &= a.complete_flag
        vals = [image_norm(tup, x) for x in pts]
        keep = [i for i, v in enumerate(vals) if v >= value - cfg.tau_attain]
        reps, hits, _ = _cluster([pts[i] for i in keep], [vals[i] for i in keep], cfg)
        return AttainmentSet(reps, complete, value, hits)

    ex = _exact(tup, cfg)
    multiplicity = ex[3] if ex is not None else None
    # exact witnesses seed the search; ascent witnesses came from these same starts
    extra = np.array(ex[1]) if ex is not None else None
    vals, X, _ = _ascent(tup, cfg, extra=extra, polish=True)
    keep = np.flatnonzero(vals >= value - cfg.tau_attain)
    reps, hits, _ = _cluster([X[i] for i in keep], vals[keep], cfg)
    complete = (bool(reps) and all(h >= 2 for h in hits) and 2 * len(reps) <= len(keep)
                and not (multiplicity and multiplicity > 1))
    return AttainmentSet(reps, complete, value, hits)


def joint_attainment_check(T: OperatorTuple, cfg: Config | None = None) -> JointAttainment:
    """Decide (up to ``tau_attain``) whether the components share a maximizer.

    Maximizes ``sum_i ||T_i x|| / ||T_i||``, which reaches ``d`` exactly on the
    common maximizers, then scores candidates by ``min_i (||T_i x|| - ||T_i||)``.
    """
    cfg = resolve(cfg)
    tup = _as_tuple(T)
    norms = [tuple_norm(c, cfg).value for c in tup.components]
    active = [i for i, v in enumerate(norms) if v > 0]
    cands = []
    for i in active:
        cands += attainment_set(tup.components[i], cfg).representatives
    if len(active) > 1:
        scaled = OperatorTuple(tuple(tup.components[i].scaled(1.0 / norms[i]) for i in active), 1)
        cands = tuple_norm(scaled, cfg).witnesses + cands
    if not cands:
        e = np.zeros(tup.domain.dim, dtype=tup.domain.dtype)
        e[0] = 1
        return JointAttainment(True, e, 0.0, cfg.tau_attain, norms)

    def margin(x):
        return min(image_norm(tup.components[i], x) - norms[i] for i in active)

    scores = [margin(x) for x in cands]
    k = int(np.argmax(scores))
    ok = scores[k] > -cfg.tau_attain
    return JointAttainment(bool(ok), cands[k] if ok else None, float(scores[k]), cfg.tau_attain, norms)


# -- brute-force oracle --------------------------------------------------------

def _param_count(n, field):
    return (n - 1) if field != COMPLEX else 2 * (n - 1)


def _param_to_u(P, n, field):
    """Map angle parameters (..., m) to points on the Euclidean sphere (mod phase)."""
    if n == 1:
        shape = P.shape[:-1] + (1,)
        return np.ones(shape, dtype=np.complex128 if field == COMPLEX else float)
    if field == COMPLEX:
        a, ph = P[..., 0], P[..., 1]
        return np.stack([np.cos(a) + 0j, np.exp(1j * ph) * np.sin(a)], axis=-1)
    if n == 2:
        t = P[..., 0]
        return np.stack([np.cos(t), np.sin(t)], axis=-1)
    th, ph = P[..., 0], P[..., 1]
    return np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], axis=-1)


def _initial_grid(n, field, density):
    m = _param_count(n, field)
    if m == 0:
        return np.zeros((1, 0)), np.zeros(0)
    if m == 1:
        g = np.linspace(0, np.pi, density, endpoint=False)
        return g[:, None], np.array([np.pi / density])
    side = max(int(math.sqrt(density / 2)), 8)
    lim0 = np.pi / 2 if field == COMPLEX else np.pi
    a = np.linspace(0, lim0, side + 1)
    b = np.linspace(0, 2 * np.pi, 2 * side, endpoint=False)
    A, B = np.meshgrid(a, b, indexing="ij")
    return np.stack([A.ravel(), B.ravel()], axis=-1), np.array([lim0 / side, np.pi / side])


def grid_norms(Ms, layout: Layout, field: str, density: int = 4096,
               n_candidates: int = 8, levels: int = 44):
    """Grid-plus-zoom maximization of ``||M x||`` for a batch of matrices.

    ``Ms`` has shape ``(B, K, n)``.  Returns ``(values, maximizers)`` with
    shapes ``(B,)`` and ``(B, n)``.  Independent of the ascent kernel.
    """
    Ms = np.asarray(Ms)
    B, K, n = Ms.shape
    p = layout.domain.p

    def evaluate(P):  # P: (B, c, g, m) -> values (B, c, g), X
        U = _param_to_u(P, n, field)
        X = U / _pnorm_last(U, p)[..., None]
        Y = np.einsum("bkn,bcgn->bcgk", Ms, X)
        return nested_norms(Y, layout), X

    grid, cell = _initial_grid(n, field, density)
    m = grid.shape[1]
    vals, X = evaluate(np.broadcast_to(grid, (B, 1) + grid.shape))
    vals = vals[:, 0]
    if m == 0:
        return vals[:, 0], X[:, 0, 0]
    # pick well-separated candidates per batch element
    C = np.empty((B, n_candidates, m))
    scaled = grid / cell
    for b in range(B):
        v = vals[b].copy()
        for k in range(n_candidates):
            i = int(np.argmax(v))
            C[b, k] = grid[i]
            v[np.max(np.abs(scaled - scaled[i]), axis=1) <= 3] = -np.inf
    steps = np.linspace(-1, 1, 9 if m == 1 else 5)
    offsets = (steps[:, None] if m == 1 else
               np.stack(np.meshgrid(steps, steps, indexing="ij"), -1).reshape(-1, 2))
    half = 2 * cell
    for _ in range(levels):
        P = C[:, :, None, :] + offsets[None, None] * half
        v, _ = evaluate(P)
        best = np.argmax(v, axis=2)
        C = np.take_along_axis(P, best[:, :, None, None], axis=2)[:, :, 0]
        half = half * 0.5
    v, Xc = evaluate(C[:, :, None, :])
    v = v[:, :, 0]
    k = np.argmax(v, axis=1)
    best, Xb = v[np.arange(B), k], Xc[np.arange(B), k, 0]
    V = _ball_vertices(n, p) if field != COMPLEX else None
    if V is not None:
        # a convex function on a polytope peaks at a vertex, which the zoom can miss on a ridge
        vv = nested_norms(np.einsum("bkn,vn->bvk", Ms, V), layout)
        j = np.argmax(vv, axis=1)
        top = vv[np.arange(B), j]
        better = top > best
        best = np.where(better, top, best)
        Xb = np.where(better[:, None], V[j], Xb)
    return best, Xb


def _ball_vertices(n, p):
    """Vertices of the real l_1 or l_inf unit ball, one per sign pair; None otherwise."""
    if p.is_one:
        return np.eye(n)
    if p.is_inf:
        signs = np.array(list(itertools.product([1.0, -1.0], repeat=n - 1))).reshape(-1, n - 1)
        return np.hstack([np.ones((len(signs), 1)), signs])
    return None


def _pnorm_last(U, p):
    a = np.abs(U)
    if p.is_inf:
        return a.max(-1)
    if p.is_one:
        return a.sum(-1)
    return (a ** p.value).sum(-1) ** (1 / p.value)


def brute_force_norm(T, grid_density: int = 4096, cfg: Config | None = None) -> NormResult:
    """Dense angular grid over the unit sphere, refined locally around the best cells."""
    tup = _as_tuple(T)
    n, field = tup.domain.dim, tup.field
    if (field == COMPLEX and n > 2) or n > 3:
        raise DimensionTooLarge(f"brute force supports dim <= 3 (real) / 2 (complex), got {n} ({field})")
    M = tup.stacked()[None]
    v, X = grid_norms(M, tup.layout(), field, grid_density)
    x = phase_normalize(X[0])
    return NormResult(float(v[0]), [x], "brute_force", abs(image_norm(tup, x) - float(v[0])), 0)
