"""One-sided Gateaux derivatives of tuple norms and smoothness of operators.

``rho_plus(T, S) = lim_{t -> 0+} (||T + t S|| - ||T||) / t`` and ``rho_minus``
the limit from the left.  Convexity of ``t -> ||T + t S||`` makes the
difference quotient monotone in ``t``, which is what the quotient method
relies on.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import Config, resolve
from .errors import HypothesisNotSatisfied, ZeroOperatorError
from .linops import OperatorTuple, nested_is_smooth, nested_rho
from .normcalc import _as_tuple, attainment_set, joint_attainment_check, tuple_norm

__all__ = [
    "GateauxPair", "SmoothnessReport", "SufficiencyReport",
    "rho_operator", "rho_attainment_formula", "rho_tuple_infty_formula",
    "rho_sandwich_bounds", "smoothness_of_operator", "check_smoothness_sufficiency",
]

T_STEPS = tuple(10.0 ** -k for k in range(1, 7))
MONO_TOL = 1e-9
# relative error of a single norm evaluation; a quotient at step t carries about 2 * EVAL_REL * ||T|| / |t|
EVAL_REL = 1e-14
AGREE_TOL = 1e-4


@dataclass
class GateauxPair:
    rho_minus: float
    rho_plus: float
    method: str
    quotient_trace: list = field(default_factory=list)
    error_bound: float = 0.0
    monotone: bool = True
    cross_check: tuple | None = None
    disagreement: bool = False
    members: list = field(default_factory=list)


@dataclass
class SmoothnessReport:
    smooth: bool
    attainment_orbits: int
    witness: np.ndarray | None
    codomain_point_smooth: bool | None
    caveat: str
    complete_flag: bool = False


@dataclass
class SufficiencyReport:
    components_smooth: list
    tuple_smooth: bool
    holds: bool
    converse_fails: bool
    joint_margin: float


def _pair(T, S):
    T, S = _as_tuple(T), _as_tuple(S)
    if S.d != T.d:
        raise ValueError(f"T has {T.d} components, S has {S.d}")
    return T, S


def _shift(T: OperatorTuple, S: OperatorTuple, t: float) -> OperatorTuple:
    comps = tuple(type(c)(c.matrix + t * s.matrix, c.domain, c.codomain) for c, s in zip(T, S))
    return OperatorTuple(comps, T.outer_p)


def rho_attainment_formula(T, S, cfg: Config | None = None) -> tuple[float, float]:
    """(min, max) of the vector-level derivatives over attainment representatives."""
    cfg = resolve(cfg)
    T, S = _pair(T, S)
    lay = T.layout()
    reps = attainment_set(T, cfg).representatives
    lo, hi = np.inf, -np.inf
    for x in reps:
        ys = [c.matrix @ x for c in T]
        vs = [s.matrix @ x for s in S]
        rm, rp = nested_rho(ys, vs, lay, cfg.tau_cluster)
        lo, hi = min(lo, rm), max(hi, rp)
    return float(lo), float(hi)


def rho_operator(T, S, cfg: Config | None = None, cross_check: bool = True) -> GateauxPair:
    """rho_minus and rho_plus from difference quotients at t = ±1e-1, ..., ±1e-6.

    The reported limits are the quotients at ``±1e-6``; ``error_bound`` is the
    spread between the last two quotients on each side.  Monotonicity is
    checked up to the rounding noise of each quotient, and a crossing
    ``rho_minus > rho_plus`` within that noise is replaced by the midpoint.
    """
    cfg = resolve(cfg)
    T, S = _pair(T, S)
    base = tuple_norm(T, cfg)
    if base.value == 0.0:
        raise ZeroOperatorError("derivatives of the norm are undefined at the zero operator")
    warm = np.array(base.witnesses)
    trace = []
    for sign in (1.0, -1.0):
        for t in T_STEPS:
            v = tuple_norm(_shift(T, S, sign * t), cfg, extra=warm).value
            trace.append((sign * t, (v - base.value) / (sign * t)))
    qp = [q for t, q in trace if t > 0]
    qm = [q for t, q in trace if t < 0]
    noise = [2.0 * EVAL_REL * max(base.value, 1.0) / t for t in T_STEPS]
    # right quotients decrease, left quotients increase, as |t| shrinks
    mono = all(a >= b - MONO_TOL - na - nb for a, b, na, nb in zip(qp, qp[1:], noise, noise[1:])) and \
        all(a <= b + MONO_TOL + na + nb for a, b, na, nb in zip(qm, qm[1:], noise, noise[1:]))
    err = max(abs(qp[-2] - qp[-1]), abs(qm[-2] - qm[-1]))
    rm, rp = qm[-1], qp[-1]
    if rm > rp:
        # a crossing within evaluation noise: project onto rho_minus <= rho_plus
        mono &= rm - rp <= MONO_TOL + 2.0 * noise[-1]
        if mono:
            rm = rp = 0.5 * (rm + rp)
    pair = GateauxPair(rm, rp, "difference_quotient", trace, err, mono)
    if cross_check:
        cc = rho_attainment_formula(T, S, cfg)
        pair.cross_check = cc
        pair.disagreement = abs(cc[0] - pair.rho_minus) > AGREE_TOL or abs(cc[1] - pair.rho_plus) > AGREE_TOL
    return pair


def rho_tuple_infty_formula(T, S, cfg: Config | None = None) -> GateauxPair:
    """Derivatives of an outer-inf tuple from its components attaining the maximum norm."""
    cfg = resolve(cfg)
    T, S = _pair(T, S)
    if T.d > 1 and not T.outer_p.is_inf:
        raise ValueError(f"outer exponent must be inf, got {T.outer_p}")
    norms = [tuple_norm(c, cfg).value for c in T]
    top = max(norms)
    members = [i for i, v in enumerate(norms) if v >= top - cfg.tau_tie]
    parts = [rho_operator(T[i], S[i], cfg, cross_check=False) for i in members]
    return GateauxPair(min(p.rho_minus for p in parts), max(p.rho_plus for p in parts),
                       "component_formula", [], max(p.error_bound for p in parts),
                       all(p.monotone for p in parts), members=members)


def rho_sandwich_bounds(T, S, cfg: Config | None = None, weighted: bool = False,
                        require: bool = True) -> tuple[float, float]:
    """Component bounds ``(sum_i rho_minus(T_i, S_i), sum_i rho_plus(T_i, S_i))``.

    With ``weighted=True`` each term carries ``(||T_i|| / ||T||)^(p-1)``; these
    are the one-sided derivatives of ``(sum_i ||T_i + t S_i||^p)^(1/p)``, which
    dominates ``||T + t S||`` with equality at ``t = 0`` under joint attainment,
    so they bracket the tuple derivatives for every ``p``.  The unweighted sums
    coincide with them at ``p = 1``.

    Raises
    ------
    HypothesisNotSatisfied
        When the components have no common maximizer and ``require`` is set.
    """
    cfg = resolve(cfg)
    T, S = _pair(T, S)
    if T.outer_p.is_inf and T.d > 1:
        raise ValueError("the sandwich bounds need a finite outer exponent")
    ja = joint_attainment_check(T, cfg)
    if require and not ja.nonempty:
        raise HypothesisNotSatisfied("components have no common maximizer", ja.margin)
    parts = [rho_operator(t, s, cfg, cross_check=False) for t, s in zip(T, S)]
    if not weighted:
        return (float(sum(p.rho_minus for p in parts)), float(sum(p.rho_plus for p in parts)))
    p = T.outer_p.value
    total = tuple_norm(T, cfg).value
    w = [(n / total) ** (p - 1) if n > 0 else 0.0 for n in ja.component_norms]
    return (float(sum(wi * q.rho_minus for wi, q in zip(w, parts))),
            float(sum(wi * q.rho_plus for wi, q in zip(w, parts))))


_CAVEAT = "orbit count comes from a multi-start search and is heuristic"


def smoothness_of_operator(T, cfg: Config | None = None) -> SmoothnessReport:
    """Smooth iff the norm is attained on a single phase orbit whose image is a smooth point."""
    cfg = resolve(cfg)
    T = _as_tuple(T)
    if T.is_zero():
        raise ZeroOperatorError("smoothness is undefined at the zero operator")
    att = attainment_set(T, cfg)
    orbits = att.orbits
    if orbits != 1:
        return SmoothnessReport(False, orbits, None, None, _CAVEAT, att.complete_flag)
    x = att.representatives[0]
    cps = nested_is_smooth([c.matrix @ x for c in T], T.layout(), cfg.tau_cluster)
    return SmoothnessReport(bool(cps), 1, x, bool(cps), _CAVEAT, att.complete_flag)


def check_smoothness_sufficiency(T, cfg: Config | None = None) -> SufficiencyReport:
    """Under joint attainment, smooth components force a smooth tuple.

    ``converse_fails`` records the case of a smooth tuple with some
    non-smooth component.
    """
    cfg = resolve(cfg)
    T = _as_tuple(T)
    ja = joint_attainment_check(T, cfg)
    if not ja.nonempty:
        raise HypothesisNotSatisfied("components have no common maximizer", ja.margin)
    comps = [smoothness_of_operator(c, cfg).smooth for c in T]
    tup = smoothness_of_operator(T, cfg).smooth
    holds = tup or not all(comps)
    return SufficiencyReport(comps, tup, holds, tup and not all(comps), ja.margin)
