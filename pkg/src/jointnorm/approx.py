"""Best approximation from lines F S and diagonal subspaces F^d S.

Distances are minima of the convex map ``z -> ||T - z S||``, searched in
the a-priori box ``|z_j| <= 2 ||T|| / ||S_j||`` (outside it the norm already
exceeds ``||T||``, the value at ``z = 0``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import linprog, minimize

from .config import Config, resolve
from .errors import CertificateNotFound, DimensionMismatch, ShapeMismatch
from .linops import (
    Operator, OperatorTuple, affine_tuple, nested_functionals,
    nested_is_extreme, nested_norming, nested_norms,
)
from .normcalc import (
    NormResult, _as_tuple, attainment_set, grid_norms, image_norm, norm_value,
    tuple_norm,
)
from .search import ellipsoid_minimize, golden_section, pattern_search
from .spaces import COMPLEX, LpSpace, is_extreme_point, lp_norm

__all__ = [
    "DistanceResult", "SingerCertificate", "BJDecision",
    "distance_to_line", "distance_to_diagonal_subspace", "bj_orthogonal",
    "build_singer_certificate", "certify_orthogonality", "verify_certificate",
    "restricted_functional_norm", "kernel_distance_functional_tuple",
    "vector_distance_to_line", "brute_force_distance",
]


@dataclass
class DistanceResult:
    value: float
    minimizer_z: np.ndarray
    inner_norm: NormResult
    convexity_gap: float
    evaluations: int
    method: str = "pattern_search"
    lower_bound: float | None = None


@dataclass
class SingerCertificate:
    entries: list            # (x, f, t) with f a list of per-component dual vectors
    value: float
    z: np.ndarray
    residual: float = 0.0    # solver-side residual of the weight system

    @property
    def h(self) -> int:
        return len(self.entries)

    @property
    def weights(self) -> np.ndarray:
        return np.array([t for _, _, t in self.entries])


@dataclass
class BJDecision:
    orthogonal: bool
    margin: float
    distance: float
    norm: float
    certificate: SingerCertificate | None = None
    certificate_error: str | None = None


# -- distances ---------------------------------------------------------------------

def _field_dims(tup):
    return 2 if tup.field == COMPLEX else 1


def _z_from_params(u, d, complex_):
    if complex_:
        return u[:d] + 1j * u[d:]
    return u.copy()


class _Objective:
    """``z -> ||T - z S||`` on real parameters, warm-starting the norm ascent."""

    def __init__(self, T: OperatorTuple, S: OperatorTuple, cfg: Config):
        self.T, self.S, self.cfg = T, S, cfg
        self.complex = T.field == COMPLEX
        self.warm: list = []

    def z(self, u):
        return _z_from_params(np.asarray(u, dtype=float), self.T.d, self.complex)

    def _eval(self, u):
        tup = affine_tuple(self.T, self.S, self.z(u))
        extra = np.array(self.warm) if self.warm else None
        v, x = norm_value(tup, self.cfg, extra)
        self.warm = ([x] + self.warm)[:3]
        return tup, v, x

    def __call__(self, u) -> float:
        return self._eval(u)[1]

    def with_subgradient(self, u):
        """Value and a subgradient in the real parameters, from a norming pair (x, f)."""
        tup, v, x = self._eval(u)
        if v == 0.0:
            return v, np.zeros(len(u))
        ys = [c.matrix @ x for c in tup]
        f = nested_norming(ys, tup.layout(), self.cfg.tau_cluster)
        s = np.array([np.dot(fj, sj.matrix @ x) for fj, sj in zip(f, self.S)])
        g = np.concatenate([-s.real, s.imag]) if self.complex else -s.real
        return v, g


def _check_pair(T: OperatorTuple, S: OperatorTuple):
    if S.d != T.d:
        raise DimensionMismatch(f"T has {T.d} components, S has {S.d}")
    for k, (t, s) in enumerate(zip(T, S)):
        if t.shape != s.shape or t.domain != s.domain or t.codomain != s.codomain:
            raise DimensionMismatch(f"component {k}: T and S act between different spaces")


def _finish(T, S, z, cfg, gap, evals, method, alternatives=()):
    """Re-evaluate candidates with the full norm routine and keep the best.

    ``alternatives`` are further minimizer candidates; search-time values come
    from cheaper warm-started evaluations that can underestimate.  Falls back
    to z = 0 unless the best candidate is clearly better.
    """
    res = tuple_norm(affine_tuple(T, S, z), cfg)
    for alt in alternatives:
        cand = tuple_norm(affine_tuple(T, S, alt), cfg)
        if cand.value < res.value:
            z, res = alt, cand
    base = tuple_norm(T, cfg)
    # ties at rounding level go to z = 0, the natural minimizer of orthogonal pairs
    if base.value <= res.value + 1e-12 * max(base.value, 1.0):
        z = np.zeros(T.d, dtype=T.domain.dtype)
        res = base
    return DistanceResult(res.value, z, res, gap, evals, method)


def distance_to_line(T, S, cfg: Config | None = None) -> DistanceResult:
    """dist(T, F S) for single operators (or d = 1 tuples)."""
    cfg = resolve(cfg)
    T, S = _as_tuple(T), _as_tuple(S)
    if T.d != 1:
        raise DimensionMismatch("distance_to_line expects single operators")
    _check_pair(T, S)
    return _line(T, S, cfg)


def _line(T, S, cfg):
    dtype = T.domain.dtype
    nT = norm_value(T, cfg)[0]
    nS = norm_value(S, cfg)[0]
    if nS == 0.0 or nT == 0.0:
        return _finish(T, S, np.zeros(1, dtype=dtype), cfg, 0.0, 0, "golden_section")
    R = 2.0 * nT / nS
    xtol = cfg.search_xtol * R
    obj = _Objective(T, S, cfg)
    if T.field != COMPLEX:
        r = golden_section(lambda t: obj(np.array([t])), -R, R, xtol)
        return _finish(T, S, r.x.astype(dtype), cfg, 0.0, r.evaluations, "golden_section")
    # complex: ellipsoid cuts, then cyclic line searches over rotated directions and a compass polish
    e = ellipsoid_minimize(obj.with_subgradient, np.full(2, -R), np.full(2, R), cfg.search_xtol * nT)
    u, fu = e.x, e.fx
    evals = e.evaluations
    for sweep in range(40):
        before = fu
        for ang in (0.0, 0.5 * math.pi, 0.25 * math.pi, 0.75 * math.pi, sweep * 0.61803):
            dvec = np.array([math.cos(ang), math.sin(ang)])
            r = golden_section(lambda s: obj(u + s * dvec), -2 * R, 2 * R, xtol)
            evals += r.evaluations
            if r.fx < fu:
                u, fu = u + r.x[0] * dvec, r.fx
        if before - fu <= 1e-15 * max(fu, 1.0):
            break
    p = pattern_search(obj, u, np.full(2, 1e-3 * R), np.full(2, -2 * R), np.full(2, 2 * R),
                       xtol, seed=cfg.seed, restarts=1, scale=nT)
    evals += p.evaluations
    if p.fx < fu:
        u = p.x
    return _finish(T, S, obj.z(u).reshape(1), cfg, p.convexity_gap, evals, "golden_section",
                   alternatives=[obj.z(e.x).reshape(1)])


def distance_to_diagonal_subspace(T, S, cfg: Config | None = None) -> DistanceResult:
    """dist(T, F^d S) = min over z of ||T - z S||.

    For outer exponent infinity (with ``cfg.fast_paths``) this is the largest
    component distance; otherwise a compass search over ``z``.
    """
    cfg = resolve(cfg)
    T, S = _as_tuple(T), _as_tuple(S)
    _check_pair(T, S)
    d = T.d
    dtype = T.domain.dtype
    if d == 1:
        return _line(T, S, cfg)
    if cfg.fast_paths and T.outer_p.is_inf:
        parts = [_line(OperatorTuple.single(t), OperatorTuple.single(s), cfg) for t, s in zip(T, S)]
        z = np.array([p.minimizer_z[0] for p in parts], dtype=dtype)
        res = tuple_norm(affine_tuple(T, S, z), cfg)
        value = max(p.value for p in parts)
        return DistanceResult(value, z, res, max(p.convexity_gap for p in parts),
                              sum(p.evaluations for p in parts), "component_max")
    nT = norm_value(T, cfg)[0]
    nS = np.array([norm_value(s, cfg)[0] for s in S])
    if nT == 0.0 or not nS.any():
        return _finish(T, S, np.zeros(d, dtype=dtype), cfg, 0.0, 0, "pattern_search")
    box = np.where(nS > 0, 2.0 * nT / np.where(nS > 0, nS, 1.0), 0.0)
    fixed = nS == 0
    k = _field_dims(T)
    box = np.tile(box, k)
    fixed = np.tile(fixed, k)
    obj = _Objective(T, S, cfg)
    xtol = cfg.search_xtol * float(box.max())
    # ellipsoid cuts locate the minimum through kinks; a compass search polishes it
    e = ellipsoid_minimize(obj.with_subgradient, -box, box, cfg.search_xtol * nT, fixed=fixed)
    r = pattern_search(obj, e.x, np.maximum(box * 1e-4, xtol), -box, box, xtol,
                       seed=cfg.seed, restarts=1, fixed=fixed, scale=nT)
    out = _finish(T, S, obj.z(r.x), cfg, r.convexity_gap, e.evaluations + r.evaluations, "pattern_search",
                  alternatives=[obj.z(e.x)])
    out.lower_bound = min(e.lower_bound, out.value)
    return out


def vector_distance_to_line(y, v, space: LpSpace, cfg: Config | None = None) -> tuple[float, complex]:
    """dist(y, F v) in a single l_p space, with the minimizing scalar."""
    cfg = resolve(cfg)
    y = np.asarray(y)
    v = np.asarray(v)
    ny, nv = lp_norm(y, space.p), lp_norm(v, space.p)
    if nv == 0.0 or ny == 0.0:
        return ny, 0.0
    # search along the unit direction so the box does not scale with 1 / ||v||
    u = v / nv
    R = 2.0 * ny
    xtol = cfg.search_xtol * R
    if space.field != COMPLEX and not np.iscomplexobj(y) and not np.iscomplexobj(v):
        r = golden_section(lambda t: lp_norm(y - t * u, space.p), -R, R, xtol)
        return r.fx, float(r.x[0]) / nv

    def f(w):
        return lp_norm(y - (w[0] + 1j * w[1]) * u, space.p)

    r = pattern_search(f, np.zeros(2), np.full(2, R / 2), np.full(2, -R), np.full(2, R),
                       xtol, seed=cfg.seed, restarts=2, scale=ny)
    return r.fx, complex(r.x[0], r.x[1]) / nv


# -- orthogonality and certificates ------------------------------------------------

def bj_orthogonal(T, S, cfg: Config | None = None) -> BJDecision:
    """Whether T is Birkhoff-James orthogonal to F^d S: dist(T, F^d S) >= ||T|| - tau_bj."""
    cfg = resolve(cfg)
    T, S = _as_tuple(T), _as_tuple(S)
    dist = distance_to_diagonal_subspace(T, S, cfg)
    nrm = tuple_norm(T, cfg).value
    margin = dist.value - nrm
    ok = margin >= -cfg.tau_bj
    cert, err = None, None
    if ok and nrm > 0:
        cert, err = certify_orthogonality(T, S, dist.minimizer_z, cfg)
    return BJDecision(bool(ok), float(margin), dist.value, nrm, cert, err)


def certify_orthogonality(T, S, minimizer_z=None, cfg: Config | None = None):
    """Singer certificate at z = 0, else at the computed best approximation.

    Orthogonality within ``tau_bj`` need not be exact, and then no
    certificate exists at z = 0.  A certificate at the minimizer ``z*``
    still proves ``dist = ||T - z* S||``, which is within ``tau_bj`` of
    ``||T||``.  Returns ``(certificate or None, error message or None)``.
    """
    cfg = resolve(cfg)
    T, S = _as_tuple(T), _as_tuple(S)
    try:
        return build_singer_certificate(T, S, np.zeros(T.d, dtype=T.domain.dtype), cfg), None
    except CertificateNotFound as e:
        err = str(e)
    if minimizer_z is None or not np.any(minimizer_z):
        return None, err
    z = _refine_minimizer(T, S, np.asarray(minimizer_z, dtype=T.domain.dtype), cfg)
    try:
        return build_singer_certificate(T, S, z, cfg), None
    except CertificateNotFound as e:
        return None, f"at z = 0: {err}; at the minimizer: {e}"


def _refine_minimizer(T, S, z, cfg):
    """Sharpen a value-based minimizer with subgradient cuts in a small box around it.

    Value searches place the minimizer of a smooth convex map only to about
    the square root of the value precision, which leaves first-order
    residuals near 1e-8 in the certificate system.
    """
    obj = _Objective(T, S, cfg.with_(search_starts=cfg.n_starts))
    complex_ = T.field == COMPLEX
    u = np.concatenate([z.real, z.imag]) if complex_ else z.real.astype(float)
    h = 1e-5 * max(1.0, float(np.abs(u).max()))
    e = ellipsoid_minimize(obj.with_subgradient, u - h, u + h, 0.0, max_iter=4000, xtol=1e-8 * h)
    cand = obj.z(e.center)
    before = tuple_norm(affine_tuple(T, S, z), cfg).value
    after = tuple_norm(affine_tuple(T, S, cand), cfg).value
    return cand if after <= before + 1e-14 * max(before, 1.0) else z


def _domain_vertices(tup: OperatorTuple, value, cfg):
    """Attaining extreme points of a real l_1 / l_inf domain ball."""
    dom = tup.domain
    n = dom.dim
    if dom.p.is_one:
        V = np.vstack([np.eye(n), -np.eye(n)]).astype(dom.dtype)
    elif dom.field != COMPLEX and n <= 12:
        import itertools
        V = np.array(list(itertools.product((1.0, -1.0), repeat=n)))
    else:
        return []
    vals = nested_norms(V @ tup.stacked().T, tup.layout())
    return [V[i] for i in np.flatnonzero(vals >= value - cfg.tau_attain)]


def _candidates(R: OperatorTuple, S: OperatorTuple, value, cfg):
    dom = R.domain
    if dom.p.is_strict:
        xs = attainment_set(R, cfg).representatives
    else:
        xs = _domain_vertices(R, value, cfg)
        xs += [x for x in attainment_set(R, cfg).representatives
               if is_extreme_point(x / lp_norm(x, dom.p), dom, 1e-9)]
    lay = R.layout()
    out = []
    for x in xs:
        ys = [c.matrix @ x for c in R]
        sx = [s.matrix @ x for s in S]
        try:
            fs = nested_functionals(ys, lay, cfg.tau_cluster, directions=sx)
        except ValueError:
            continue
        out += [(x, f) for f in fs]
    return out


def _columns(cands, S: OperatorTuple, complex_):
    """Rows: f_j(S_j x) per component j (real and imaginary parts when complex)."""
    cols = []
    for x, f in cands:
        v = np.array([np.dot(fj, s.matrix @ x) for fj, s in zip(f, S)])
        cols.append(np.concatenate([v.real, v.imag]) if complex_ else v.real)
    return np.array(cols).T


def build_singer_certificate(T, S, z, cfg: Config | None = None) -> SingerCertificate:
    """Weights t_i >= 0 with sum 1 and norming pairs (x_i, f_i) of the residual T - z S
    such that sum_i t_i f_i(w S x_i) = 0 for every w in F^d.

    Raises
    ------
    CertificateNotFound
        If no convex combination of the candidate pairs annihilates the subspace;
        the exception carries the smallest l_1 residual found.
    """
    cfg = resolve(cfg)
    T, S = _as_tuple(T), _as_tuple(S)
    _check_pair(T, S)
    z = np.asarray(z, dtype=T.domain.dtype).reshape(T.d)
    R = affine_tuple(T, S, z)
    value = tuple_norm(R, cfg).value
    if value == 0.0:
        raise CertificateNotFound("residual is zero; no norming functional exists", 0.0)
    cands = _candidates(R, S, value, cfg)
    cands = [(x, f) for x, f in cands if image_norm(R, x) >= value - cfg.tau_attain]
    if not cands:
        raise CertificateNotFound("no attaining extreme candidates", math.inf)
    complex_ = T.field == COMPLEX
    A = _columns(cands, S, complex_)
    scale = max(1.0, float(np.abs(A).max(initial=0.0)))
    tol1 = 1e-10 * scale
    norms1 = np.abs(A).sum(axis=0)
    j = int(np.argmin(norms1))
    if norms1[j] <= tol1:
        return SingerCertificate([(cands[j][0], cands[j][1], 1.0)], value, z, float(norms1[j]))
    m, N = A.shape
    # min sum(u + w)  s.t.  A t + u - w = 0, sum t = 1, t, u, w >= 0
    c = np.concatenate([np.zeros(N), np.ones(2 * m)])
    Aeq = np.block([[A, np.eye(m), -np.eye(m)],
                    [np.ones((1, N)), np.zeros((1, 2 * m))]])
    beq = np.concatenate([np.zeros(m), [1.0]])
    lp = linprog(c, A_eq=Aeq, b_eq=beq, bounds=(0, None), method="highs-ds")
    if lp.status != 0:
        raise CertificateNotFound(f"weight problem failed: {lp.message}", math.inf)
    if lp.fun > tol1:
        raise CertificateNotFound(f"no annihilating combination (l1 residual {lp.fun:.3e})", float(lp.fun))
    t = lp.x[:N]
    supp = np.flatnonzero(t > 1e-12)
    supp = _caratheodory(A, t, supp)
    # refine on the support
    B = np.vstack([A[:, supp], np.ones((1, len(supp)))])
    ts, *_ = np.linalg.lstsq(B, np.concatenate([np.zeros(m), [1.0]]), rcond=None)
    if np.all(ts > 0):
        t_s = ts
    else:
        t_s = t[supp] / t[supp].sum()
    entries = [(cands[i][0], cands[i][1], float(w)) for i, w in zip(supp, t_s)]
    resid = float(np.abs(A[:, supp] @ t_s).max(initial=0.0))
    return SingerCertificate(entries, value, z, resid)


def _caratheodory(A, t, supp):
    """Drop columns until the support is affinely independent (at most rows + 1)."""
    supp = list(supp)
    t = t.copy()
    while True:
        B = np.vstack([A[:, supp], np.ones((1, len(supp)))])
        if len(supp) <= 1 or np.linalg.matrix_rank(B) == len(supp):
            return np.array(supp)
        kernel = null_space(B)[:, 0]
        if not np.any(kernel > 0):
            kernel = -kernel
        ratios = np.where(kernel > 0, t[supp] / np.where(kernel > 0, kernel, 1), np.inf)
        k = int(np.argmin(ratios))
        ts = t[supp] - ratios[k] * kernel
        ts[k] = 0.0
        t[supp] = ts
        supp = [s for s, w in zip(supp, ts) if w > 1e-14]


@dataclass
class CertificateCheck:
    ok: bool
    weight_sum_error: float
    annihilation: float
    norming_gap: float
    extreme_x: bool
    extreme_f: bool
    h_ok: bool
    problems: list = field(default_factory=list)


def verify_certificate(T, S, cert: SingerCertificate, cfg: Config | None = None,
                       tol: float | None = None) -> CertificateCheck:
    """Independent re-check of every certificate invariant from the raw pairs."""
    cfg = resolve(cfg)
    T, S = _as_tuple(T), _as_tuple(S)
    tol = cfg.tau_cert if tol is None else tol
    R = affine_tuple(T, S, cert.z)
    lay = R.layout()
    d = T.d
    w = cert.weights
    sum_err = abs(float(w.sum()) - 1.0)
    acc = np.zeros(d, dtype=complex)
    norming = 0.0
    ex_x = ex_f = True
    for x, f, t in cert.entries:
        for j, (fj, s) in enumerate(zip(f, S)):
            acc[j] += t * np.dot(fj, s.matrix @ x)
        val = sum(np.dot(fj, c.matrix @ x) for fj, c in zip(f, R)).real
        norming = max(norming, cert.value - val)
        ex_x &= is_extreme_point(x, R.domain, 1e-9)
        ex_f &= nested_is_extreme(f, lay, 1e-9)
    ann = float(np.abs(acc).max())
    limit = d + 1 if T.field != COMPLEX else 2 * d + 1
    probs = []
    if sum_err > 1e-9:
        probs.append(f"weights sum to 1{w.sum() - 1:+.2e}")
    if np.any(w <= 0) or np.any(w > 1 + 1e-12):
        probs.append("weights outside (0, 1]")
    if ann > tol:
        probs.append(f"annihilation residual {ann:.2e}")
    if norming > tol:
        probs.append(f"norming gap {norming:.2e}")
    if not ex_x:
        probs.append("a point is not extreme")
    if not ex_f:
        probs.append("a functional is not extreme")
    if cert.h > limit:
        probs.append(f"h = {cert.h} > {limit}")
    return CertificateCheck(not probs, sum_err, ann, norming, bool(ex_x), bool(ex_f), cert.h <= limit, probs)


# -- functionals ---------------------------------------------------------------------

def restricted_functional_norm(f, g, domain: LpSpace, cfg: Config | None = None) -> float:
    """Norm of the functional ``f`` restricted to ``ker g``: max |f(x)| over unit x with g(x) = 0."""
    cfg = resolve(cfg)
    f = np.asarray(f, dtype=domain.dtype)
    g = np.asarray(g, dtype=domain.dtype)
    q = domain.p.dual()
    if not np.any(g):
        return lp_norm(f, q)
    if domain.p.value == 2.0:
        c = np.dot(np.conj(g), f) / np.vdot(g, g).real
        return lp_norm(f - c * g, 2)
    N = null_space(g[None, :])
    fN = f @ N
    if not np.any(np.abs(fN) > 1e-15 * lp_norm(f, q)):
        return 0.0
    k = N.shape[1]
    complex_ = domain.field == COMPLEX

    def unpack(u):
        return u[:k] + 1j * u[k:] if complex_ else u

    def neg_ratio(u):
        c = unpack(u)
        x = N @ c
        nx = lp_norm(x, domain.p)
        return -abs(np.dot(fN, c)) / nx if nx > 0 else 0.0

    method = "BFGS" if domain.p.is_strict else "Nelder-Mead"
    rng = np.random.default_rng(cfg.seed)
    m = 2 * k if complex_ else k
    starts = [np.concatenate([np.conj(fN).real, np.conj(fN).imag]) if complex_ else fN.real]
    starts += list(np.eye(m)) + list(rng.standard_normal((8, m)))
    best = 0.0
    for s in starts:
        r = minimize(neg_ratio, s, method=method,
                     options={"gtol": 1e-12} if method == "BFGS" else {"xatol": 1e-12, "fatol": 1e-15, "maxiter": 4000})
        best = max(best, -float(r.fun))
    return best


def kernel_distance_functional_tuple(T, S, cfg: Config | None = None) -> float:
    """max_i of the restricted norms of f_i on ker g_i, for functional tuples T = (f_i), S = (g_i)."""
    cfg = resolve(cfg)
    T, S = _as_tuple(T), _as_tuple(S)
    _check_pair(T, S)
    for k, c in enumerate(T):
        if c.codomain.dim != 1:
            raise ShapeMismatch(f"component {k} has codomain dimension {c.codomain.dim}, expected 1")
    if T.d > 1 and not T.outer_p.is_inf:
        raise ShapeMismatch(f"outer exponent must be inf, got {T.outer_p}")
    return max(restricted_functional_norm(t.matrix[0], s.matrix[0], T.domain, cfg) for t, s in zip(T, S))


# -- oracle -------------------------------------------------------------------------

def brute_force_distance(T, S, grid: int | None = None, density: int = 1024):
    """Independent distance oracle for real tuples with d <= 2 and dim <= 3.

    A dense z-grid evaluated with coarse grid norms locates the minimum; a
    bounded scalar search (d = 1) or Nelder-Mead (d = 2) over full grid norms
    polishes it.  Returns ``(value, z)``.
    """
    from scipy.optimize import minimize_scalar
    from .normcalc import brute_force_norm
    T, S = _as_tuple(T), _as_tuple(S)
    if T.field == COMPLEX or T.d > 2:
        raise ShapeMismatch("z-grid oracle supports real tuples with d <= 2")
    nT = brute_force_norm(T, density).value
    nS = np.array([brute_force_norm(s, density).value for s in S])
    if nT == 0.0 or not nS.any():
        return nT, np.zeros(T.d)
    box = np.where(nS > 0, 2 * nT / np.where(nS > 0, nS, 1), 0.0)
    Tst, Sst = T.stacked(), S.stacked()
    lay = T.layout()
    rows = np.repeat(np.arange(T.d), [c.codomain.dim for c in T])

    def values(Z, levels):
        Ms = Tst[None] - Z[:, rows, None] * Sst[None]
        v, _ = grid_norms(Ms, lay, T.field, density, levels=levels)
        return v

    grid = grid or (81 if T.d == 1 else 21)
    axes = [np.linspace(-b, b, grid) for b in box]
    Z = np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, T.d)
    v = values(Z, 8)
    order = np.argsort(v)
    cell = box / (grid - 1)

    def full(z):
        return float(values(np.atleast_2d(np.asarray(z, dtype=float)), 30)[0])

    best = (full(np.zeros(T.d)), np.zeros(T.d))
    if T.d == 1:
        c = Z[order[0], 0]
        r = minimize_scalar(lambda t: full([t]), bounds=(c - 2 * cell[0], c + 2 * cell[0]),
                            method="bounded", options={"xatol": 1e-10 * max(box[0], 1e-300)})
        if r.fun < best[0]:
            best = (float(r.fun), np.array([r.x]))
        return best
    z0, size = Z[order[0]], cell
    for _ in range(2):  # restart once from the first result
        simplex = np.array([z0, z0 + [size[0], 0], z0 + [0, size[1]]])
        r = minimize(full, z0, method="Nelder-Mead",
                     options={"initial_simplex": simplex, "xatol": 1e-9 * float(box.max()),
                              "fatol": 1e-13, "maxiter": 600})
        if r.fun < best[0]:
            best = (float(r.fun), np.asarray(r.x))
        z0, size = np.asarray(r.x), cell / 8
    return best
