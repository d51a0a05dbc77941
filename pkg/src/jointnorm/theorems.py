"""Executable checks of the distance, orthogonality and derivative results for tuples.

Each checker takes an :class:`Instance`, evaluates the hypotheses numerically
(joint attainment is always the tolerance-relative version), evaluates the
conclusion regardless, and returns a :class:`CheckReport`.  Checkers compare
two independent computation paths, so the max-formula shortcuts are disabled
inside them.

Status values:

``holds`` / ``violated``
    all hypotheses satisfied, conclusion true / false;
``vacuous_true`` / ``vacuous_false``
    some hypothesis fails; the conclusion is still reported.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .approx import (
    bj_orthogonal, distance_to_diagonal_subspace, distance_to_line,
    kernel_distance_functional_tuple, vector_distance_to_line,
)
from .config import Config, resolve
from .derivatives import rho_operator, rho_tuple_infty_formula, smoothness_of_operator
from .errors import ZeroOperatorError
from .linops import Operator, OperatorTuple, affine_tuple
from .normcalc import joint_attainment_check, tuple_norm
from .spaces import COMPLEX, REAL, Exponent, LpSpace, duality_map, lp_norm

__all__ = [
    "Instance", "Hypothesis", "Conclusion", "CheckReport", "THEOREMS", "TOLERANCES",
    "gen_example_a", "gen_example_b", "golden_counterexample", "gen_lm_example",
    "gen_random", "gen_functional_tuple",
    "check_norm_max_infty", "check_max_distance_infty", "check_joint_norm",
    "check_sum_distance_theorem", "check_pointwise_distance",
    "check_bj_equivalence_finite_p", "check_bj_equivalence_infty",
    "check_kernel_distance_corollary", "check_rho_sandwich", "check_rho_infty",
    "check_smoothness_sufficiency", "run_suite", "summarize",
]

# default conclusion tolerances, keyed by theorem id
TOLERANCES = {
    "norm_max_infty": 1e-6,
    "max_distance_infty": 1e-5,
    "joint_norm": 1e-6,
    "sum_distance": 1e-5,
    "pointwise_distance": 1e-6,
    "bj_finite_p": 1e-6,
    "bj_infty": 1e-6,
    "kernel_distance": 1e-5,
    "rho_sandwich": 1e-4,
    "rho_infty": 1e-4,
    "smoothness_sufficiency": 0.0,
}


@dataclass
class Instance:
    T: OperatorTuple
    S: OperatorTuple | None
    name: str
    seed: int | None = None
    meta: dict = field(default_factory=dict)

    def direction(self) -> OperatorTuple:
        """S, or the zero tuple when the instance has none."""
        if self.S is not None:
            return self.S
        return self.T.map(lambda c: Operator(np.zeros_like(c.matrix), c.domain, c.codomain))


@dataclass
class Hypothesis:
    name: str
    satisfied: bool
    margin: float


@dataclass
class Conclusion:
    holds: bool
    lhs: float
    rhs: float
    gap: float
    tolerance: float


@dataclass
class CheckReport:
    theorem: str
    instance: str
    hypotheses: list
    conclusion: Conclusion
    # further conclusions that only matter when the hypotheses hold
    extra: dict = field(default_factory=dict)
    witnesses: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    @property
    def hypotheses_hold(self) -> bool:
        return all(h.satisfied for h in self.hypotheses)

    @property
    def status(self) -> str:
        if self.hypotheses_hold:
            ok = self.conclusion.holds and all(c.holds for c in self.extra.values())
            return "holds" if ok else "violated"
        return "vacuous_true" if self.conclusion.holds else "vacuous_false"


def _close(lhs, rhs, tol) -> Conclusion:
    gap = abs(float(lhs) - float(rhs))
    return Conclusion(bool(gap <= tol), float(lhs), float(rhs), gap, float(tol))


def _le(lhs, rhs, tol) -> Conclusion:
    """lhs <= rhs + tol; ``gap`` is the excess."""
    gap = max(float(lhs) - float(rhs), 0.0)
    return Conclusion(bool(gap <= tol), float(lhs), float(rhs), gap, float(tol))


def _tol(theorem, tol):
    return TOLERANCES[theorem] if tol is None else float(tol)


def _generic(cfg):
    return resolve(cfg).with_(fast_paths=False)


def _outer_hyp(T: OperatorTuple, want_inf: bool) -> Hypothesis:
    ok = T.outer_p.is_inf == want_inf
    return Hypothesis("outer_p=inf" if want_inf else "outer_p<inf", ok, 0.0)


def _joint_hyp(T: OperatorTuple, cfg, name="joint_attainment"):
    ja = joint_attainment_check(T, cfg)
    return Hypothesis(name, ja.nonempty, ja.margin), ja


def _pow(v, p: Exponent):
    return v if p.is_inf else v ** p.value


def _agg(vals, p: Exponent):
    vals = list(vals)
    return max(vals) if p.is_inf else float(sum(v ** p.value for v in vals))


def _comp(T: OperatorTuple, i):
    return OperatorTuple.single(T[i])


# -- generators ---------------------------------------------------------------------

def _rand(rng, shape, field):
    M = rng.standard_normal(shape)
    if field == COMPLEX:
        M = M + 1j * rng.standard_normal(shape)
    return M


def gen_example_a(dim: int, d: int, seed: int, p_domain=2, p_codomain=2, outer_p=2,
                  field: str = REAL, codim: int | None = None, cfg: Config | None = None) -> Instance:
    """Tuples sharing a maximizer ``x``: ``T_j = A(x-part + h-part / (j+1))``, ``S_j = B_j`` on ``H``.

    ``H`` is the kernel of a norming functional of ``x``, so ``x`` is
    orthogonal to ``H`` and ``P = x (x) phi`` projects onto ``span x`` along ``H``.
    """
    if dim < 2:
        raise ValueError("dim must be at least 2")
    cfg = resolve(cfg)
    rng = np.random.default_rng([seed, 0xA])
    codim = dim if codim is None else codim
    dom = LpSpace(dim, p_domain, field)
    cod = LpSpace(codim, p_codomain, field)
    A = Operator(_rand(rng, (codim, dim), field), dom, cod)
    x = tuple_norm(A, cfg).witness
    phi = duality_map(x, dom).base
    P = np.outer(x, phi)
    I = np.eye(dim)
    Ts, Ss = [], []
    for j in range(1, d + 1):
        Ts.append(Operator(A.matrix @ (I / (j + 1) + P * (j / (j + 1))), dom, cod))
        Ss.append(Operator(_rand(rng, (codim, dim), field) @ (I - P), dom, cod))
    meta = {"generator": "example_a", "dim": dim, "d": d, "x": x, "codomains": "equal"}
    return Instance(OperatorTuple(tuple(Ts), outer_p), OperatorTuple(tuple(Ss), outer_p),
                    "example_a", seed, meta)


def gen_example_b(dim: int, d: int, seed: int, m=3, outer_p=2, field: str = REAL,
                  lam_max: float = 0.9) -> Instance:
    """Diagonal ``T_j = diag(1, lam_j)`` and ``S_j = diag(0, lam_j)`` on l_m, with ``|lam| <= lam_max``.

    The sequences are truncated to ``dim`` coordinates; ``e_1`` is a common maximizer.
    """
    if dim < 2:
        raise ValueError("dim must be at least 2")
    if not Exponent.of(m).is_strict:
        raise ValueError("the exponent m must lie strictly between 1 and inf")
    rng = np.random.default_rng([seed, 0xB])
    sp = LpSpace(dim, m, field)
    Ts, Ss = [], []
    for _ in range(d):
        lam = rng.uniform(-lam_max, lam_max, dim - 1)
        if field == COMPLEX:
            lam = np.abs(lam) * np.exp(2j * np.pi * rng.uniform(size=dim - 1))
        Ts.append(Operator(np.diag(np.concatenate([[1.0], lam])), sp, sp))
        Ss.append(Operator(np.diag(np.concatenate([[0.0], lam])), sp, sp))
    meta = {"generator": "example_b", "dim": dim, "d": d, "m": Exponent.of(m).to_json(),
            "codomains": "equal"}
    return Instance(OperatorTuple(tuple(Ts), outer_p), OperatorTuple(tuple(Ss), outer_p),
                    "example_b", seed, meta)


def golden_counterexample() -> Instance:
    """``T_1 = diag(1/2, 1)``, ``T_2 = diag(1, 1/2)``, ``S_1 = -S_2 = (a - b)/2 (1, 1)`` on l_2^2, outer 2."""
    sp = LpSpace(2, 2)
    s = 0.5 * np.array([[1.0, -1.0], [1.0, -1.0]])
    T = OperatorTuple((Operator(np.diag([0.5, 1.0]), sp, sp), Operator(np.diag([1.0, 0.5]), sp, sp)), 2)
    S = OperatorTuple((Operator(s, sp, sp), Operator(-s, sp, sp)), 2)
    return Instance(T, S, "golden", None, {"generator": "golden", "codomains": "equal"})


def gen_lm_example(m=3, d=3, outer_p=2) -> Instance:
    """``T_n`` keeps coordinates 1 and n and scales the others by ``1/(n+1)``, on l_m^d."""
    sp = LpSpace(d, m)
    Ts = []
    for n in range(1, d + 1):
        diag = np.full(d, 1.0 / (n + 1))
        diag[0] = diag[n - 1] = 1.0
        Ts.append(Operator(np.diag(diag), sp, sp))
    meta = {"generator": "lm_example", "m": Exponent.of(m).to_json(), "d": d, "codomains": "equal"}
    return Instance(OperatorTuple(tuple(Ts), outer_p), None, "lm_example", None, meta)


def gen_random(dim: int, d: int, seed: int, p_domain=2, p_codomain=2, outer_p="inf",
               field: str = REAL, codims=None) -> Instance:
    """Gaussian T and S; ``p_codomain`` and ``codims`` may be per-component sequences."""
    rng = np.random.default_rng([seed, 0xC])
    dom = LpSpace(dim, p_domain, field)
    pcs = list(p_codomain) if isinstance(p_codomain, (list, tuple)) else [p_codomain] * d
    cds = list(codims) if codims is not None else [dim] * d
    Ts, Ss = [], []
    for k in range(d):
        cod = LpSpace(cds[k], pcs[k], field)
        Ts.append(Operator(_rand(rng, (cds[k], dim), field), dom, cod))
        Ss.append(Operator(_rand(rng, (cds[k], dim), field), dom, cod))
    mixed = len(set(cds)) > 1 or len({str(Exponent.of(p)) for p in pcs}) > 1
    meta = {"generator": "random", "dim": dim, "d": d, "codomains": "mixed" if mixed else "equal"}
    return Instance(OperatorTuple(tuple(Ts), outer_p), OperatorTuple(tuple(Ss), outer_p),
                    "random", seed, meta)


def gen_functional_tuple(dim: int, d: int, seed: int, p_domain=2, equal_norm: bool = False,
                         orthogonal: bool = False, field: str = REAL) -> Instance:
    """Rows ``f_i``, ``g_i`` as 1-dimensional components with outer exponent inf.

    ``equal_norm`` rescales every ``f_i`` to norm 1; ``orthogonal`` makes
    ``g_0`` vanish at the maximizer of ``f_0``.
    """
    rng = np.random.default_rng([seed, 0xF])
    dom = LpSpace(dim, p_domain, field)
    cod = LpSpace(1, 2, field)
    q = dom.p.dual()
    F = _rand(rng, (d, dim), field)
    G = _rand(rng, (d, dim), field)
    if equal_norm:
        F = F / np.array([lp_norm(f, q) for f in F])[:, None]
    if orthogonal:
        # the maximizer of f_0 on the unit sphere is its dual element
        x = duality_map(F[0], dom.dual()).base
        g = G[0]
        G[0] = g - (np.dot(g, x) / np.dot(F[0], x)) * F[0] if np.dot(F[0], x) != 0 else g
    Ts = tuple(Operator(F[i:i + 1], dom, cod) for i in range(d))
    Ss = tuple(Operator(G[i:i + 1], dom, cod) for i in range(d))
    meta = {"generator": "functional", "dim": dim, "d": d, "equal_norm": equal_norm,
            "orthogonal": orthogonal, "codomains": "equal"}
    return Instance(OperatorTuple(Ts, "inf"), OperatorTuple(Ss, "inf"), "functional", seed, meta)


# -- checkers ---------------------------------------------------------------------------

def check_norm_max_infty(inst: Instance, cfg: Config | None = None, tol=None) -> CheckReport:
    """||T|| against the largest component norm, for outer exponent inf."""
    cfg = _generic(cfg)
    T = inst.T
    lhs = tuple_norm(T, cfg)
    comps = [tuple_norm(c, cfg).value for c in T]
    return CheckReport("norm_max_infty", inst.name, [_outer_hyp(T, True)],
                       _close(lhs.value, max(comps), _tol("norm_max_infty", tol)),
                       witnesses={"x": lhs.witness}, details={"component_norms": comps, "method": lhs.method})


def check_max_distance_infty(inst: Instance, cfg: Config | None = None, tol=None) -> CheckReport:
    """Generic-path dist(T, F^d S) against the largest component distance, outer exponent inf."""
    cfg = _generic(cfg)
    T, S = inst.T, inst.direction()
    dist = distance_to_diagonal_subspace(T, S, cfg)
    comps = [distance_to_line(_comp(T, i), _comp(S, i), cfg) for i in range(T.d)]
    return CheckReport("max_distance_infty", inst.name, [_outer_hyp(T, True)],
                       _close(dist.value, max(c.value for c in comps), _tol("max_distance_infty", tol)),
                       witnesses={"z": dist.minimizer_z,
                                  "component_z": np.array([c.minimizer_z[0] for c in comps])},
                       details={"component_distances": [c.value for c in comps], "method": dist.method,
                                "convexity_gap": dist.convexity_gap})


def check_joint_norm(inst: Instance, cfg: Config | None = None, tol=None) -> CheckReport:
    """Under joint attainment: ||T||^p = sum ||T_i||^p and M_T lies in every M_{T_i}."""
    cfg = resolve(cfg)
    T = inst.T
    tol = _tol("joint_norm", tol)
    hj, ja = _joint_hyp(T, cfg)
    hyps = [_outer_hyp(T, False), hj]
    nrm = tuple_norm(T, cfg)
    p = T.outer_p
    concl = _close(_pow(nrm.value, p), _agg(ja.component_norms, p), tol * T.d)
    # tuple maximizers must maximize every component
    deficit = 0.0
    for x in nrm.witnesses:
        for c, n in zip(T, ja.component_norms):
            deficit = max(deficit, n - lp_norm(c.matrix @ x, c.codomain.p))
    scale = max(1.0, max(ja.component_norms))
    extra = {"attainment_inclusion": _le(deficit, 0.0, cfg.tau_attain * scale)}
    return CheckReport("joint_norm", inst.name, hyps, concl, extra,
                       witnesses={"x": nrm.witness, "joint_x": ja.witness},
                       details={"eps": ja.eps, "component_norms": ja.component_norms})


def check_sum_distance_theorem(inst: Instance, cfg: Config | None = None, tol=None) -> CheckReport:
    """dist^p = sum dist(T_j, F S_j)^p when the residual components share a maximizer.

    Also checks dist(T_j, F S_j) = ||T_j^0|| for the residual ``T^0 = T - z S``
    at the computed minimizer.
    """
    cfg = _generic(cfg)
    T, S = inst.T, inst.direction()
    tol = _tol("sum_distance", tol)
    p = T.outer_p
    dist = distance_to_diagonal_subspace(T, S, cfg)
    R = affine_tuple(T, S, dist.minimizer_z)
    hj, ja = _joint_hyp(R, cfg, "residual_joint_attainment")
    outside = Hypothesis("T_not_in_span", dist.value > cfg.tau_norm, dist.value)
    hyps = [_outer_hyp(T, False), outside, hj]
    comps = [distance_to_line(_comp(T, i), _comp(S, i), cfg).value for i in range(T.d)]
    concl = _close(_pow(dist.value, p), _agg(comps, p), tol * T.d)
    per = max(abs(c - n) for c, n in zip(comps, ja.component_norms))
    extra = {"component_identity": Conclusion(per <= tol, float(max(comps)), float(max(ja.component_norms)), per, tol)}
    return CheckReport("sum_distance", inst.name, hyps, concl, extra,
                       witnesses={"z": dist.minimizer_z, "joint_x": ja.witness},
                       details={"distance": dist.value, "component_distances": comps,
                                "residual_component_norms": ja.component_norms, "eps": ja.eps})


def _denoise(M, x):
    """``M x`` with rounding-level images (relative to ``|M| |x|``) set to zero."""
    v = M @ x
    scale = float(np.abs(M).sum(axis=1).max(initial=0.0) * np.abs(x).max(initial=0.0))
    return np.zeros_like(v) if np.abs(v).max(initial=0.0) <= 1e-12 * scale else v


def check_pointwise_distance(inst: Instance, cfg: Config | None = None, tol=None) -> CheckReport:
    """For a smooth residual with maximizer x: dist^p = sum_j dist(T_j x, F S_j x)^p."""
    cfg = _generic(cfg)
    T, S = inst.T, inst.direction()
    tol = _tol("pointwise_distance", tol)
    p = T.outer_p
    dist = distance_to_diagonal_subspace(T, S, cfg)
    R = affine_tuple(T, S, dist.minimizer_z)
    sm = smoothness_of_operator(R, cfg)
    hyps = [Hypothesis("residual_smooth", sm.smooth, float(sm.attainment_orbits))]
    x = sm.witness if sm.witness is not None else tuple_norm(R, cfg).witness
    vd = [vector_distance_to_line(t.matrix @ x, _denoise(s.matrix, x), t.codomain, cfg)[0]
          for t, s in zip(T, S)]
    concl = _close(_pow(dist.value, p), _agg(vd, p), tol * T.d)
    per = max(abs(v - lp_norm(r.matrix @ x, r.codomain.p)) for v, r in zip(vd, R))
    extra = {"component_identity": Conclusion(per <= tol, 0.0, 0.0, per, tol)}
    return CheckReport("pointwise_distance", inst.name, hyps, concl, extra,
                       witnesses={"x": x, "z": dist.minimizer_z},
                       details={"vector_distances": vd, "orbits": sm.attainment_orbits})


def check_bj_equivalence_finite_p(inst: Instance, cfg: Config | None = None, tol=None) -> CheckReport:
    """Under joint attainment, T orthogonal to F^d S forces T_j orthogonal to S_j for every j;
    when every T_j is smooth the converse holds too.

    ``lhs``/``rhs`` are the tuple and worst component orthogonality margins
    (``dist - norm``, orthogonal when at least ``-tol``).
    """
    cfg = _generic(cfg)
    T, S = inst.T, inst.direction()
    tol = _tol("bj_finite_p", tol)
    c2 = cfg.with_(tau_bj=tol)
    hj, ja = _joint_hyp(T, cfg)
    hyps = [_outer_hyp(T, False), hj]
    tup = bj_orthogonal(T, S, c2)
    parts = [bj_orthogonal(_comp(T, i), _comp(S, i), c2) for i in range(T.d)]
    comp_margin = min(b.margin for b in parts)
    all_orth = all(b.orthogonal for b in parts)
    forward = (not tup.orthogonal) or all_orth
    concl = Conclusion(bool(forward), tup.margin, comp_margin,
                       0.0 if forward else -comp_margin, tol)
    smooth = [smoothness_of_operator(_comp(T, i), cfg).smooth for i in range(T.d)]
    reverse = (not (all(smooth) and all_orth)) or tup.orthogonal
    extra = {"reverse": Conclusion(bool(reverse), comp_margin, tup.margin,
                                   0.0 if reverse else -tup.margin, tol)}
    return CheckReport("bj_finite_p", inst.name, hyps, concl, extra,
                       witnesses={"joint_x": ja.witness},
                       details={"tuple_orthogonal": tup.orthogonal,
                                "component_orthogonal": [b.orthogonal for b in parts],
                                "components_smooth": smooth,
                                "certificate_h": tup.certificate.h if tup.certificate else None})


def check_bj_equivalence_infty(inst: Instance, cfg: Config | None = None, tol=None) -> CheckReport:
    """Outer inf: T orthogonal to F^d S iff some T_i with ||T_i|| = ||T|| is orthogonal to S_i.

    ``lhs`` is the tuple margin ``dist - ||T||``; ``rhs`` the best component
    margin ``max_i min(dist_i - ||T_i||, ||T_i|| - ||T||)``.
    """
    cfg = _generic(cfg)
    T, S = inst.T, inst.direction()
    tol = _tol("bj_infty", tol)
    nrm = tuple_norm(T, cfg).value
    dist = distance_to_diagonal_subspace(T, S, cfg).value
    tm = dist - nrm
    cms = []
    for i in range(T.d):
        ni = tuple_norm(T[i], cfg).value
        di = distance_to_line(_comp(T, i), _comp(S, i), cfg).value
        cms.append(min(di - ni, ni - nrm))
    cm = max(cms)
    holds = (tm >= -tol) == (cm >= -tol)
    gap = 0.0 if holds else min(abs(tm + tol), abs(cm + tol))
    return CheckReport("bj_infty", inst.name, [_outer_hyp(T, True)],
                       Conclusion(bool(holds), tm, cm, gap, tol),
                       details={"tuple_orthogonal": bool(tm >= -tol), "component_margins": cms})


def check_kernel_distance_corollary(inst: Instance, cfg: Config | None = None, tol=None) -> CheckReport:
    """Functional tuples ``T = (f_i)``, ``S = (g_i)``: dist(T, F^d S) = max_i ||f_i restricted to ker g_i||.

    Extra conclusions: if T is orthogonal then ``g_i(x) = 0`` at the
    maximizer ``x`` of some ``f_i`` with ``||f_i|| = ||T||``; with equal
    ``||f_i||`` the converse holds as well.
    """
    cfg = _generic(cfg)
    T, S = inst.T, inst.direction()
    tol = _tol("kernel_distance", tol)
    one_dim = all(c.codomain.dim == 1 for c in T)
    hyps = [Hypothesis("functionals", one_dim, 0.0), _outer_hyp(T, True),
            Hypothesis("domain_strictly_convex", T.domain.p.is_strict, 0.0)]
    if not one_dim:
        nan = float("nan")
        return CheckReport("kernel_distance", inst.name, hyps, Conclusion(False, nan, nan, nan, tol))
    kd = kernel_distance_functional_tuple(T, S, cfg)
    dist = distance_to_diagonal_subspace(T, S, cfg)
    concl = _close(kd, dist.value, tol)
    dom = T.domain
    q = dom.p.dual()
    fn = np.array([lp_norm(c.matrix[0], q) for c in T])
    nrm = float(fn.max())
    # maximizer of f_i is its dual element; |g_i(x)| relative to ||g_i||
    zs = []
    for c, s in zip(T, S):
        x = duality_map(c.matrix[0], dom.dual()).base
        gn = lp_norm(s.matrix[0], q)
        zs.append(abs(np.dot(s.matrix[0], x)) / gn if gn > 0 else 0.0)
    top = fn >= nrm - cfg.tau_tie * max(nrm, 1.0)
    orth = dist.value - nrm >= -cfg.tau_bj
    vanish = min(z for z, t in zip(zs, top) if t)
    extra = {"item_ii": Conclusion(bool((not orth) or vanish <= 1e-6), dist.value - nrm, vanish, 0.0, 1e-6)}
    equal = bool(np.ptp(fn) <= cfg.tau_tie * max(nrm, 1.0))
    if equal and nrm > 0:
        ok = orth == (vanish <= 1e-6)
        extra["item_iii"] = Conclusion(bool(ok), dist.value - nrm, vanish, 0.0 if ok else abs(vanish), 1e-6)
    return CheckReport("kernel_distance", inst.name, hyps, concl, extra,
                       witnesses={"z": dist.minimizer_z},
                       details={"f_norms": fn.tolist(), "g_at_maximizers": zs, "equal_norms": equal,
                                "orthogonal": bool(orth)})


def check_rho_sandwich(inst: Instance, cfg: Config | None = None, tol=None) -> CheckReport:
    """Under joint attainment: sum rho_minus(T_i, S_i) <= rho_minus(T, S) <= rho_plus(T, S) <= sum rho_plus(T_i, S_i).

    ``lhs``/``rhs`` of the conclusion are the worse of the two outer
    inequalities.  The weighted bounds (terms scaled by
    ``(||T_i|| / ||T||)^(p-1)``) are reported in ``details``.
    """
    cfg = resolve(cfg)
    T, S = inst.T, inst.direction()
    tol = _tol("rho_sandwich", tol)
    hj, ja = _joint_hyp(T, cfg)
    hyps = [_outer_hyp(T, False), hj]
    tup = rho_operator(T, S, cfg, cross_check=False)
    parts = [rho_operator(_comp(T, i), _comp(S, i), cfg, cross_check=False) for i in range(T.d)]
    lo = float(sum(q.rho_minus for q in parts))
    hi = float(sum(q.rho_plus for q in parts))
    low = _le(lo, tup.rho_minus, tol)
    up = _le(tup.rho_plus, hi, tol)
    concl = low if low.gap >= up.gap else up
    details = {"tuple": (tup.rho_minus, tup.rho_plus), "sums": (lo, hi),
               "monotone": tup.monotone and all(q.monotone for q in parts)}
    if not T.outer_p.is_inf:
        p = T.outer_p.value
        total = tuple_norm(T, cfg).value
        w = [(n / total) ** (p - 1) if n > 0 else 0.0 for n in ja.component_norms]
        details["weighted_sums"] = (float(sum(wi * q.rho_minus for wi, q in zip(w, parts))),
                                    float(sum(wi * q.rho_plus for wi, q in zip(w, parts))))
    extra = {"ordered": _le(tup.rho_minus, tup.rho_plus, 1e-9)}
    return CheckReport("rho_sandwich", inst.name, hyps, concl, extra, details=details)


def check_rho_infty(inst: Instance, cfg: Config | None = None, tol=None) -> CheckReport:
    """Outer inf: tuple rho± from difference quotients against the component formula."""
    cfg = _generic(cfg)
    T, S = inst.T, inst.direction()
    tol = _tol("rho_infty", tol)
    q = rho_operator(T, S, cfg, cross_check=False)
    f = rho_tuple_infty_formula(T, S, cfg) if T.outer_p.is_inf or T.d == 1 else None
    if f is None:
        nan = float("nan")
        concl = Conclusion(False, nan, nan, nan, tol)
    else:
        gp, gm = abs(q.rho_plus - f.rho_plus), abs(q.rho_minus - f.rho_minus)
        concl = (_close(q.rho_plus, f.rho_plus, tol) if gp >= gm else _close(q.rho_minus, f.rho_minus, tol))
    extra = {"monotone": Conclusion(bool(q.monotone), 0.0, 0.0, 0.0, 1e-9),
             "ordered": _le(q.rho_minus, q.rho_plus, 1e-9)}
    details = {"quotients": (q.rho_minus, q.rho_plus)}
    if f is not None:
        details.update(formula=(f.rho_minus, f.rho_plus), members=f.members)
    return CheckReport("rho_infty", inst.name, [_outer_hyp(T, True)], concl, extra, details=details)


def check_smoothness_sufficiency(inst: Instance, cfg: Config | None = None, tol=None) -> CheckReport:
    """Under joint attainment: smooth components give a smooth tuple."""
    cfg = resolve(cfg)
    T = inst.T
    hj, ja = _joint_hyp(T, cfg)
    comps = [smoothness_of_operator(_comp(T, i), cfg).smooth for i in range(T.d)]
    tup = smoothness_of_operator(T, cfg)
    holds = tup.smooth or not all(comps)
    concl = Conclusion(bool(holds), float(all(comps)), float(tup.smooth), 0.0 if holds else 1.0,
                       _tol("smoothness_sufficiency", tol))
    return CheckReport("smoothness_sufficiency", inst.name, [hj], concl,
                       witnesses={"x": tup.witness},
                       details={"components_smooth": comps, "tuple_smooth": tup.smooth,
                                "converse_fails": bool(tup.smooth and not all(comps)),
                                "orbits": tup.attainment_orbits})


THEOREMS = {
    "norm_max_infty": check_norm_max_infty,
    "max_distance_infty": check_max_distance_infty,
    "joint_norm": check_joint_norm,
    "sum_distance": check_sum_distance_theorem,
    "pointwise_distance": check_pointwise_distance,
    "bj_finite_p": check_bj_equivalence_finite_p,
    "bj_infty": check_bj_equivalence_infty,
    "kernel_distance": check_kernel_distance_corollary,
    "rho_sandwich": check_rho_sandwich,
    "rho_infty": check_rho_infty,
    "smoothness_sufficiency": check_smoothness_sufficiency,
}

_FINITE = ("joint_norm", "sum_distance", "pointwise_distance", "bj_finite_p",
           "rho_sandwich", "smoothness_sufficiency")
_INFTY = ("norm_max_infty", "max_distance_infty", "bj_infty", "rho_infty")
_FUNCTIONAL = ("kernel_distance", "bj_infty")

DEFAULT_COUNTS = {"example_a": 3, "example_b": 3, "random_infty": 3, "functional": 2}


def _suite_instances(seed: int, counts: dict):
    """(instance, theorem ids) pairs in a fixed order."""
    out = [(golden_counterexample(), _FINITE), (gen_lm_example(3, 3), ("joint_norm", "smoothness_sufficiency"))]
    outers = (1, 2, 3)
    for k in range(counts.get("example_a", 0)):
        s = seed * 1000 + k
        pd = (2, 3)[k % 2]
        out.append((gen_example_a(3, 2, s, p_domain=pd, p_codomain=pd, outer_p=outers[k % 3]), _FINITE))
    for k in range(counts.get("example_b", 0)):
        s = seed * 1000 + 100 + k
        out.append((gen_example_b(3, 2 + k % 2, s, m=3, outer_p=outers[k % 3]), _FINITE))
    if counts.get("example_b", 0):
        # direction S = T: the unweighted sandwich sums ||T_i|| against ||T||
        inst = gen_example_b(3, 2, seed * 1000 + 150, m=3, outer_p=2)
        out.append((Instance(inst.T, inst.T, "example_b_self", inst.seed,
                             dict(inst.meta, direction="T")), ("rho_sandwich",)))
    pdoms = (1, 2, 3, "inf")
    for k in range(counts.get("random_infty", 0)):
        s = seed * 1000 + 200 + k
        codims = [2, 3] if k % 2 else None
        pcod = [2, "inf"] if k % 2 else 2
        out.append((gen_random(3, 2, s, p_domain=pdoms[k % 4], p_codomain=pcod, outer_p="inf",
                               codims=codims), _INFTY))
    for k in range(counts.get("functional", 0)):
        s = seed * 1000 + 300 + k
        out.append((gen_functional_tuple(3, 2, s, p_domain=(2, 3)[k % 2], equal_norm=True,
                                         orthogonal=bool(k % 2)), _FUNCTIONAL))
    return out


def run_suite(seed: int = 0, counts=None, cfg: Config | None = None, theorems=None,
              tolerances: dict | None = None) -> list[CheckReport]:
    """Run the checkers over the golden instances plus generated ones.

    ``counts`` maps generator families to instance counts (an int applies to
    every family; 0 keeps only the golden instances).  ``theorems`` restricts
    the theorem ids; ``tolerances`` overrides per-theorem tolerances.
    """
    cfg = resolve(cfg).with_(seed=seed)
    if counts is None:
        counts = DEFAULT_COUNTS
    elif isinstance(counts, int):
        counts = {k: counts for k in DEFAULT_COUNTS}
    tolerances = tolerances or {}
    reports = []
    for inst, ids in _suite_instances(seed, counts):
        for tid in ids:
            if theorems is not None and tid not in theorems:
                continue
            try:
                reports.append(THEOREMS[tid](inst, cfg, tolerances.get(tid)))
            except ZeroOperatorError as e:
                nan = float("nan")
                reports.append(CheckReport(tid, inst.name, [Hypothesis("nonzero", False, 0.0)],
                                           Conclusion(False, nan, nan, nan, 0.0), details={"error": str(e)}))
    return reports


def summarize(reports) -> dict:
    out = {"holds": 0, "violated": 0, "vacuous_true": 0, "vacuous_false": 0}
    for r in reports:
        out[r.status] += 1
    return out
