"""Command-line front end.

Exit codes: 0 on success, 2 when a theorem check reports a violation, 1 on
malformed input or usage errors.
"""

from __future__ import annotations

import sys

import click

from .approx import (
    bj_orthogonal, distance_to_diagonal_subspace, distance_to_line, verify_certificate,
)
from .config import Config
from .derivatives import (
    rho_operator, rho_sandwich_bounds, rho_tuple_infty_formula, smoothness_of_operator,
)
from .errors import HypothesisNotSatisfied, JointNormError
from .instance_io import dump_instance, dumps, load_instance, to_jsonable
from .linops import OperatorTuple
from .normcalc import attainment_set, joint_attainment_check, tuple_norm
from .theorems import (
    DEFAULT_COUNTS, THEOREMS, gen_example_a, gen_example_b, gen_functional_tuple,
    gen_lm_example, gen_random, golden_counterexample, run_suite, summarize,
)

EXIT_OK, EXIT_INPUT, EXIT_VIOLATION = 0, 1, 2


class _Group(click.Group):
    """Maps usage errors to exit code 1 so that 2 always means a violated check."""

    def main(self, args=None, prog_name=None, complete_var=None, standalone_mode=True, **extra):
        try:
            rv = super().main(args, prog_name, complete_var, standalone_mode=False, **extra)
        except click.exceptions.Exit as e:
            rv = e.exit_code
        except click.ClickException as e:
            e.show()
            rv = EXIT_INPUT
        except click.exceptions.Abort:
            click.echo("aborted", err=True)
            rv = EXIT_INPUT
        rv = rv if isinstance(rv, int) else EXIT_OK
        if standalone_mode:
            sys.exit(rv)
        return rv


def _common(f):
    f = click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None,
                     help="Write the report here instead of stdout.")(f)
    f = click.option("--json/--text", "as_json", default=True, help="Report format.")(f)
    f = click.option("--starts", type=click.IntRange(1), default=None, help="Random starts for the norm ascent.")(f)
    f = click.option("--seed", type=int, default=0, show_default=True)(f)
    f = click.option("--tol", type=click.FloatRange(0.0), default=None,
                     help="Decision tolerance (attainment for norm/smooth, orthogonality for bj, "
                          "theorem tolerance for check).")(f)
    return f


def _config(seed, starts, **changes) -> Config:
    cfg = Config(seed=seed, **changes)
    return cfg if starts is None else cfg.with_(n_starts=starts)


def _read(path):
    if path is None or path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _load(path):
    try:
        return load_instance(_read(path))
    except OSError as e:
        _fail(f"cannot read {path}: {e.strerror}")
    except JointNormError as e:
        _fail(str(e))


def _fail(msg):
    click.echo(f"error: {msg}", err=True)
    raise click.exceptions.Exit(EXIT_INPUT)


def _need_s(inst):
    if inst.S is None:
        _fail("$.S: missing (this command needs a direction tuple S)")
    return inst.S


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k in obj:
            yield from _flatten(obj[k], f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list) and obj and any(isinstance(v, (dict, list)) for v in obj) \
            and not all(isinstance(v, list) and len(v) == 2 and all(isinstance(u, float) for u in v) for v in obj):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}[{i}]")
    else:
        yield prefix, obj


def _text(report) -> str:
    rows = list(_flatten(to_jsonable(report)))
    width = max((len(k) for k, _ in rows), default=0)
    return "\n".join(f"{k.ljust(width)}  {v}" for k, v in rows)


def _emit(report, as_json, out):
    text = dumps(report) if as_json else _text(report)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        click.echo(text)


def _report(command, cfg, result):
    return {"command": command, "seed": cfg.seed, "config": cfg, "result": result}


def _run(fn):
    try:
        return fn()
    except JointNormError as e:
        _fail(str(e))


@click.group(cls=_Group)
@click.version_option(package_name="artifact")
def cli():
    """Joint norms, distances, orthogonality and derivatives for tuples of l_p operators."""


@cli.command()
@click.argument("path", required=False)
@_common
def norm(path, tol, seed, starts, as_json, out):
    """Tuple (or operator) norm with maximizers and component norms."""
    inst = _load(path)
    cfg = _config(seed, starts, **({} if tol is None else {"tau_attain": tol}))

    def go():
        T = inst.T
        res = tuple_norm(T, cfg)
        comps = [tuple_norm(c, cfg).value for c in T]
        return {"norm": res, "component_norms": comps,
                "attainment": attainment_set(T, cfg, res) if T.d >= 1 else None}

    _emit(_report("norm", cfg, _run(go)), as_json, out)


@cli.command()
@click.argument("path", required=False)
@_common
def dist(path, tol, seed, starts, as_json, out):
    """dist(T, F^d S); a single line when d = 1."""
    inst = _load(path)
    S = _need_s(inst)
    cfg = _config(seed, starts)

    def go():
        if inst.T.d == 1:
            return distance_to_line(inst.T, S, cfg)
        return distance_to_diagonal_subspace(inst.T, S, cfg)

    _emit(_report("dist", cfg, _run(go)), as_json, out)


@cli.command()
@click.argument("path", required=False)
@_common
def bj(path, tol, seed, starts, as_json, out):
    """Birkhoff-James orthogonality of T to F^d S, with a certificate when orthogonal."""
    inst = _load(path)
    S = _need_s(inst)
    cfg = _config(seed, starts, **({} if tol is None else {"tau_bj": tol}))

    def go():
        dec = bj_orthogonal(inst.T, S, cfg)
        check = verify_certificate(inst.T, S, dec.certificate, cfg) if dec.certificate else None
        return {"decision": dec, "certificate_check": check}

    _emit(_report("bj", cfg, _run(go)), as_json, out)


@cli.command()
@click.argument("path", required=False)
@_common
def rho(path, tol, seed, starts, as_json, out):
    """One-sided derivatives rho-/rho+ of ||T|| along S by every applicable method."""
    inst = _load(path)
    S = _need_s(inst)
    cfg = _config(seed, starts)

    def go():
        T = inst.T
        res = {"quotients": rho_operator(T, S, cfg)}
        if T.d > 1 and T.outer_p.is_inf:
            res["component_formula"] = rho_tuple_infty_formula(T, S, cfg)
        elif T.d > 1:
            try:
                res["sandwich"] = rho_sandwich_bounds(T, S, cfg)
                res["sandwich_weighted"] = rho_sandwich_bounds(T, S, cfg, weighted=True)
            except HypothesisNotSatisfied as e:
                res["sandwich"] = {"skipped": str(e), "margin": e.margin}
        return res

    _emit(_report("rho", cfg, _run(go)), as_json, out)


@cli.command()
@click.argument("path", required=False)
@_common
def smooth(path, tol, seed, starts, as_json, out):
    """Smoothness of each component and of the tuple."""
    inst = _load(path)
    cfg = _config(seed, starts, **({} if tol is None else {"tau_attain": tol}))

    def go():
        T = inst.T
        comps = [smoothness_of_operator(OperatorTuple.single(c), cfg) for c in T]
        return {"components": comps, "tuple": smoothness_of_operator(T, cfg),
                "joint_attainment": joint_attainment_check(T, cfg)}

    _emit(_report("smooth", cfg, _run(go)), as_json, out)


@cli.command()
@click.argument("path", required=False)
@click.option("--suite", is_flag=True, help="Run the full theorem suite.")
@click.option("--theorem", "theorems", multiple=True, type=click.Choice(sorted(THEOREMS)),
              help="Restrict to these theorem ids (repeatable).")
@click.option("--count", type=click.IntRange(0), default=None,
              help="Generated instances per family (0: golden instances only).")
@_common
def check(path, suite, theorems, count, tol, seed, starts, as_json, out):
    """Run theorem checks on PATH, or the seeded suite with --suite.

    Exits with status 2 when any check is violated.
    """
    cfg = _config(seed, starts)
    tols = {t: tol for t in THEOREMS} if tol is not None else {}
    if path is not None and not suite:
        inst = _load(path)
        ids = theorems or sorted(THEOREMS)
        reports = _run(lambda: [THEOREMS[t](inst, cfg, tols.get(t)) for t in ids])
    elif suite or theorems:
        counts = DEFAULT_COUNTS if count is None else count
        reports = _run(lambda: run_suite(seed, counts, cfg, theorems or None, tols))
    else:
        _fail("give an instance PATH or --suite")
    summary = summarize(reports)
    _emit(_report("check", cfg, {"summary": summary, "reports": reports}), as_json, out)
    if summary["violated"]:
        raise click.exceptions.Exit(EXIT_VIOLATION)


@cli.command()
@click.option("--example", type=click.Choice(["a", "b", "golden", "lm", "random", "functional"]),
              required=True)
@click.option("--dim", type=click.IntRange(2), default=3, show_default=True)
@click.option("--d", "d", type=click.IntRange(1), default=2, show_default=True)
@click.option("--p", "p", default="2", show_default=True, help="Domain exponent (m for example b).")
@click.option("--outer-p", default="2", show_default=True)
@click.option("--complex", "complex_", is_flag=True, help="Complex field.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None)
def gen(example, dim, d, p, outer_p, complex_, seed, out):
    """Write a generated instance as JSON."""
    field = "complex" if complex_ else "real"

    def go():
        if example == "a":
            return gen_example_a(dim, d, seed, p_domain=p, p_codomain=p, outer_p=outer_p, field=field)
        if example == "b":
            return gen_example_b(dim, d, seed, m=p, outer_p=outer_p, field=field)
        if example == "golden":
            return golden_counterexample()
        if example == "lm":
            return gen_lm_example(p, dim, outer_p)
        if example == "random":
            return gen_random(dim, d, seed, p_domain=p, p_codomain=p, outer_p=outer_p, field=field)
        return gen_functional_tuple(dim, d, seed, p_domain=p, equal_norm=True, field=field)

    try:
        inst = go()
    except (ValueError, JointNormError) as e:
        _fail(str(e))
    text = dump_instance(inst)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        click.echo(text)


def main():
    cli()
