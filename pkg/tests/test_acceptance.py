"""Acceptance criteria 1-8; each test prints one PASS/FAIL line."""

import functools
import time

import numpy as np
import pytest

from jointnorm.approx import (
    brute_force_distance, certify_orthogonality, distance_to_diagonal_subspace, distance_to_line,
    verify_certificate,
)
from jointnorm.config import Config
from jointnorm.derivatives import (
    check_smoothness_sufficiency, rho_operator, rho_sandwich_bounds, rho_tuple_infty_formula,
    smoothness_of_operator,
)
from jointnorm.linops import Operator, OperatorTuple
from jointnorm.normcalc import attainment_set, brute_force_norm, joint_attainment_check, tuple_norm
from jointnorm.spaces import LpSpace
from jointnorm.theorems import (
    TOLERANCES, Instance, check_kernel_distance_corollary, check_sum_distance_theorem,
    gen_example_a, gen_example_b, gen_functional_tuple, gen_lm_example, gen_random,
    golden_counterexample,
)

GENERIC = Config(fast_paths=False)
P_ALL = [1, 2, 3, "inf"]
TAU_BJ = Config().tau_bj


@pytest.fixture
def report(capsys):
    def emit(criterion, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {criterion}: {'PASS' if ok else 'FAIL'} ({detail})")
    return emit


def _orthogonal(dist, norm):
    return dist - norm >= -TAU_BJ


# -- shared runs, reused by criterion 8 ----------------------------------------------

@functools.lru_cache(maxsize=None)
def _golden_run():
    g = golden_counterexample()
    t0 = time.perf_counter()
    norm = tuple_norm(g.T).value
    dist = distance_to_diagonal_subspace(g.T, g.S, GENERIC)
    lines = [distance_to_line(t, s) for t, s in zip(g.T, g.S)]
    orbits = [attainment_set(t).representatives for t in g.T]
    ja = joint_attainment_check(g.T)
    return dict(inst=g, norm=norm, dist=dist, lines=lines, orbits=orbits, ja=ja,
                seconds=time.perf_counter() - t0)


def _c2_instance(k):
    rng = np.random.default_rng([k, 2])
    dim, d = int(rng.integers(1, 5)), int(rng.integers(1, 4))
    return gen_random(dim, d, k, p_domain=P_ALL[k % 4], p_codomain=P_ALL[int(rng.integers(4))],
                      outer_p="inf")


@functools.lru_cache(maxsize=None)
def _c2_run():
    t0 = time.perf_counter()
    rows = []
    for k in range(200):
        inst = _c2_instance(k)
        generic = distance_to_diagonal_subspace(inst.T, inst.S, GENERIC)
        formula = max(distance_to_line(t, s).value for t, s in zip(inst.T, inst.S))
        rows.append((inst, generic, formula, tuple_norm(inst.T).value))
    return rows, time.perf_counter() - t0


def _c3_instance(k):
    rng = np.random.default_rng([k, 3])
    dim, d, outer = int(rng.integers(2, 5)), int(rng.integers(1, 4)), [1, 2, 3][k % 3]
    if k % 2 == 0:
        p = [2, 3][int(rng.integers(2))]
        return gen_example_a(dim, d, k, p_domain=p, p_codomain=p, outer_p=outer)
    return gen_example_b(dim, d, k, m=[1.5, 2, 3, 4][int(rng.integers(4))], outer_p=outer)


@functools.lru_cache(maxsize=None)
def _c3_run():
    return [(inst, check_sum_distance_theorem(inst)) for inst in map(_c3_instance, range(100))]


def _c4_instance(k):
    return gen_functional_tuple(3, 1 + k % 3, k, p_domain=2 if k < 50 else 3,
                                equal_norm=(k // 2) % 2 == 0, orthogonal=k % 2 == 0)


@functools.lru_cache(maxsize=None)
def _c4_run():
    return [(inst, check_kernel_distance_corollary(inst)) for inst in map(_c4_instance, range(100))]


# -- criteria -------------------------------------------------------------------------

def test_criterion_1_golden(report):
    r = _golden_run()
    root = np.sqrt(5) / 2
    checks = {
        "norm": abs(r["norm"] - root) <= 1e-6,
        "dist": abs(r["dist"].value - root) <= 1e-6,
        "line_dist": all(abs(l.value ** 2 - 5 / 8) <= 1e-6 for l in r["lines"]),
        "line_z": all(abs(l.minimizer_z[0] + 0.5) <= 1e-5 for l in r["lines"]),
        "orbits": [sorted(tuple(np.round(np.abs(x), 9)) for x in reps) for reps in r["orbits"]]
                  == [[(0.0, 1.0)], [(1.0, 0.0)]],
        "no_joint_attainment": not r["ja"].nonempty,
        "runtime": r["seconds"] < 5.0,
    }
    ok = all(checks.values())
    report(1, ok, f"{r['seconds']:.2f} s; failed: {[k for k, v in checks.items() if not v]}")
    assert ok, checks


def test_criterion_2_max_theorem(report):
    rows, seconds = _c2_run()
    worst = max(abs(g.value - f) for _, g, f, _ in rows)
    ok = worst <= 1e-5 and seconds < 120
    report(2, ok, f"200 instances, max gap {worst:.2e}, {seconds:.1f} s")
    assert worst <= 1e-5
    assert seconds < 120


def test_criterion_3_sum_distance(report):
    runs = _c3_run()
    main_gap, comp_gap, b_gap, bad = 0.0, 0.0, 0.0, []
    for inst, rep in runs:
        d = inst.T.d
        main_gap = max(main_gap, rep.conclusion.gap / d)
        comp_gap = max(comp_gap, rep.extra["component_identity"].gap)
        if inst.name == "example_b":
            b_gap = max(b_gap, abs(rep.conclusion.lhs - d))
        if not (rep.hypotheses_hold and rep.conclusion.gap <= 1e-5 * d
                and rep.extra["component_identity"].gap <= 1e-5):
            bad.append((inst.name, inst.seed))
    ok = not bad and b_gap <= 1e-6
    report(3, ok, f"100 instances, max gap/d {main_gap:.2e}, component {comp_gap:.2e}, "
                  f"example (b) dist^p - d {b_gap:.2e}, failing {bad}")
    assert not bad
    assert b_gap <= 1e-6


def test_criterion_4_kernel_corollary(report):
    runs = _c4_run()
    gap = max(rep.conclusion.gap for _, rep in runs)
    eq = [rep for inst, rep in runs if "item_iii" in rep.extra]
    iii = all(rep.extra["item_iii"].holds for rep in eq)
    both = {rep.details["orthogonal"] for rep in eq}
    ok = gap <= 1e-5 and iii and len(eq) >= 40
    report(4, ok, f"100 instances, max gap {gap:.2e}, item (iii) on {len(eq)} equal-norm "
                  f"instances (orthogonal cases seen: {sorted(both)})")
    assert gap <= 1e-5
    assert iii and len(eq) >= 40


@functools.lru_cache(maxsize=None)
def _c5_infty():
    rows = []
    for k in range(200):
        rng = np.random.default_rng([k, 5])
        inst = gen_random(int(rng.integers(2, 5)), int(rng.integers(2, 4)), 5000 + k,
                          p_domain=P_ALL[k % 4], p_codomain=P_ALL[int(rng.integers(4))], outer_p="inf")
        q = rho_operator(inst.T, inst.S, GENERIC, cross_check=False)
        f = rho_tuple_infty_formula(inst.T, inst.S)
        rows.append((q, f))
    return rows


def _c5_sandwich_instances():
    out = []
    for k in range(30):
        outer = [1, 2, 3][k % 3]
        if k < 15:
            out.append(gen_example_a(3, 2, 700 + k, outer_p=outer))
        else:
            b = gen_example_b(3, 2, 700 + k, outer_p=outer)
            out.append(b)
            out.append(Instance(b.T, b.T, "example_b_self", b.seed, {"outer_p": outer}))
    return out


@functools.lru_cache(maxsize=None)
def _c5_sandwich():
    rows = []
    for inst in _c5_sandwich_instances():
        if not joint_attainment_check(inst.T).nonempty:
            continue
        q = rho_operator(inst.T, inst.S, GENERIC, cross_check=False)
        rows.append((inst, q, rho_sandwich_bounds(inst.T, inst.S)))
    return rows


def test_criterion_5a_quotients(report):
    pairs = [p for q, f in _c5_infty() for p in (q, f)] + [q for _, q, _ in _c5_sandwich()]
    bad = [p for p in pairs if not (p.monotone and p.rho_minus <= p.rho_plus + 1e-9)]
    report("5a", not bad, f"{len(pairs)} derivative calls, {len(bad)} non-monotone or misordered")
    assert not bad


def test_criterion_5b_infty_formula(report):
    gaps = [max(abs(q.rho_minus - f.rho_minus), abs(q.rho_plus - f.rho_plus)) for q, f in _c5_infty()]
    worst = max(gaps)
    report("5b", worst <= 1e-4, f"200 instances, max gap {worst:.2e}")
    assert worst <= 1e-4


def test_criterion_5c_sandwich(report):
    tol = TOLERANCES["rho_sandwich"]
    bad = []
    for inst, q, (lo, hi) in _c5_sandwich():
        if not (lo - tol <= q.rho_minus and q.rho_plus <= hi + tol):
            bad.append((inst.name, inst.T.outer_p.to_json(), round(lo, 5), round(q.rho_minus, 5),
                        round(q.rho_plus, 5), round(hi, 5)))
    n = len(_c5_sandwich())
    report("5c", not bad, f"{n} joint-attainment instances, {len(bad)} outside the bounds: {bad[:3]}")
    assert not bad, bad


@functools.lru_cache(maxsize=None)
def _c6_run():
    rows = []
    for k in range(200):
        rng = np.random.default_rng([k, 6])
        dim = 2 + k % 2
        d = 2 if k % 5 == 0 else 1
        dom = LpSpace(dim, P_ALL[int(rng.integers(4))])
        cods = [LpSpace(int(rng.integers(1, 4)), P_ALL[int(rng.integers(4))]) for _ in range(d)]
        outer = P_ALL[int(rng.integers(4))] if d > 1 else cods[0].p
        T = OperatorTuple(tuple(Operator(rng.standard_normal((c.dim, dim)), dom, c) for c in cods), outer)
        S = OperatorTuple(tuple(Operator(rng.standard_normal((c.dim, dim)), dom, c) for c in cods), outer)
        norm_gap = abs(tuple_norm(T, GENERIC).value - brute_force_norm(T).value)
        ours = distance_to_diagonal_subspace(T, S, GENERIC).value
        dist_gap = abs(ours - brute_force_distance(T, S)[0])
        rows.append((d, norm_gap, dist_gap))
    return rows


def test_criterion_6_oracle(report):
    rows = _c6_run()
    nmax = max(r[1] for r in rows)
    dmax = max(r[2] for r in rows)
    n2 = sum(r[0] == 2 for r in rows)
    ok = nmax <= 1e-5 and dmax <= 1e-5
    report(6, ok, f"200 instances ({n2} with d = 2), max norm gap {nmax:.2e}, max distance gap {dmax:.2e}")
    assert nmax <= 1e-5
    assert dmax <= 1e-5


def test_criterion_7_smoothness(report):
    lm = check_smoothness_sufficiency(gen_lm_example(3, 3).T)
    lm_ok = lm.tuple_smooth and not all(lm.components_smooth) and lm.components_smooth == [True, False, False]
    a_ok = []
    for seed in range(5):
        T = gen_example_a(3, 2, seed).T
        comps = [smoothness_of_operator(c).smooth for c in T]
        a_ok.append(all(comps) and smoothness_of_operator(T).smooth)
    ok = lm_ok and all(a_ok)
    report(7, ok, f"l_m example components {lm.components_smooth}, tuple {lm.tuple_smooth}; "
                  f"example (a) all smooth on {sum(a_ok)}/5 seeds")
    assert lm_ok
    assert all(a_ok)


def _weight_residual(T, S, cert):
    # independent of the solver: rebuild the annihilation system and evaluate it at the weights
    A = np.array([[np.dot(f[j], S[j].matrix @ x) for x, f, _ in cert.entries] for j in range(T.d)])
    w = cert.weights
    return max(float(np.abs(A @ w).max()), abs(float(w.sum()) - 1.0), float(max(0.0, -w.min())))


def _orthogonal_instances():
    """(instance, minimizer z) for every orthogonal instance of criteria 1-4."""
    g = _golden_run()
    out = [(g["inst"], g["dist"].minimizer_z)] if _orthogonal(g["dist"].value, g["norm"]) else []
    out += [(inst, res.minimizer_z) for inst, res, _, nrm in _c2_run()[0] if _orthogonal(res.value, nrm)]
    out += [(inst, rep.witnesses["z"]) for inst, rep in _c3_run()
            if _orthogonal(rep.details["distance"], tuple_norm(inst.T).value)]
    out += [(inst, rep.witnesses["z"]) for inst, rep in _c4_run() if rep.details["orthogonal"]]
    return out


def test_criterion_8_certificates(report):
    insts = _orthogonal_instances()
    bad, worst, hmax, at_min = [], 0.0, 0, 0
    for inst, z in insts:
        cert, err = certify_orthogonality(inst.T, inst.S, z)
        if cert is None:
            bad.append((inst.name, inst.seed, err))
            continue
        at_min += bool(np.any(cert.z))
        chk = verify_certificate(inst.T, inst.S, cert)
        res = _weight_residual(inst.T, inst.S, cert)
        worst, hmax = max(worst, res), max(hmax, cert.h)
        if not (chk.ok and cert.h <= inst.T.d + 1 and res <= 1e-8):
            bad.append((inst.name, inst.seed, chk.problems, res))
    ok = not bad and len(insts) > 0
    report(8, ok, f"{len(insts)} orthogonal instances ({at_min} certified at the minimizer), max h {hmax}, "
                  f"max weight residual {worst:.1e}, failing {bad[:3]}")
    assert insts
    assert not bad, bad
