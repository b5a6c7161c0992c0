"""``submwp`` command line.

Every command prints a JSON run report on stdout. Exit codes: 0 success,
1 verification failure, 2 input error, 3 capacity refusal.
"""

from __future__ import annotations

import json
import sys
import time
from fractions import Fraction

import click

from ._util import fmt_value, make_rng
from .errors import CapacityError, DomainError, SubmwpError
from . import io


def _val(v):
    if isinstance(v, Fraction):
        return fmt_value(v)
    if isinstance(v, float):
        return v
    if isinstance(v, dict):
        return {k: _val(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_val(x) for x in v]
    return v


class Report:
    def __init__(self, ctx, command, params=None, doc=None):
        self.t0 = time.perf_counter()
        self.data = {
            "command": command,
            "instance_digest": io.digest(doc) if doc is not None else None,
            "parameters": params or {},
            "results": {},
            "seed": ctx.obj["seed"],
        }

    def __setitem__(self, key, value):
        self.data["results"][key] = value

    def emit(self, ok=True):
        self.data["wall_time_ms"] = round((time.perf_counter() - self.t0) * 1000, 3)
        click.echo(json.dumps(_val(self.data), indent=2))
        if not ok:
            raise click.exceptions.Exit(1)


def _ratio(a, b):
    if b == 0:
        return None
    return a / b if isinstance(a, Fraction) and isinstance(b, Fraction) else float(a) / float(b)


@click.group()
@click.option("--seed", type=int, default=0, show_default=True, help="Root seed for every random stream.")
@click.option("--jobs", type=int, default=None, help="Worker processes (default: SUBMWP_JOBS or 1).")
@click.pass_context
def cli(ctx, seed, jobs):
    """Monotone submodular multiway partition toolkit."""
    ctx.ensure_object(dict)
    ctx.obj.update(seed=seed, jobs=jobs)


@cli.command()
@click.argument("family", type=click.Choice(["tight43", "ckr3", "symgap", "matroid-tight"]))
@click.option("--k", "param", type=int, default=None, help="Family size parameter.")
@click.option("--form", type=click.Choice(["native", "explicit"]), default="native", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.pass_context
def gen(ctx, family, param, form, out):
    """Write a named instance family as instance JSON."""
    inst = io.family_instance(family, param)
    note = None
    try:
        doc = io.instance_to_json(inst, form)
    except DomainError as exc:
        if form != "explicit":
            raise
        note = f"explicit table refused ({exc}); wrote oracle form"
        doc = io.instance_to_json(inst, "native")
    if out:
        io.dump_json(doc, out)
    rep = Report(ctx, "gen", {"family": family, "k": param, "form": form}, doc)
    rep["n"], rep["k"], rep["kind"] = inst.n, inst.k, doc["function"]["kind"]
    if note:
        rep["note"] = note
    if not out:
        rep["instance"] = doc
    rep.emit()


def _solve(inst, iters, tol, init, seed):
    from .relax import solve_relaxation

    return solve_relaxation(inst, max_iters=iters, tol=tol, init=init, seed=seed)


@cli.command()
@click.argument("instance", type=click.Path(exists=True, dir_okay=False, allow_dash=True))
@click.option("--iters", type=int, default=20_000, show_default=True)
@click.option("--tol", type=float, default=1e-9, show_default=True)
@click.option("--init", type=click.Choice(["uniform", "random"]), default="uniform", show_default=True)
@click.option("--dump-x", type=click.Path(dir_okay=False), default=None)
@click.pass_context
def relax(ctx, instance, iters, tol, init, dump_x):
    """Solve the convex relaxation by projected subgradient descent."""
    from .relax import relaxation_objective

    doc = io.load_json(instance)
    inst = io.instance_from_json(doc)
    res = _solve(inst, iters, tol, init, ctx.obj["seed"])
    xr = res.best_x.rationalize()
    rep = Report(ctx, "relax", {"iters": iters, "tol": tol, "init": init}, doc)
    rep["objective"] = res.objective
    rep["objective_rationalized"] = relaxation_objective(inst.oracle, xr)
    rep["iterations"], rep["converged"] = res.iterations, res.converged
    if dump_x:
        io.dump_json(io.x_to_json(xr), dump_x)
    rep.emit()


@cli.command(name="round")
@click.argument("instance", type=click.Path(exists=True, dir_okay=False, allow_dash=True))
@click.option("--x", "xpath", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--interval", type=click.Choice(["quarter", "half", "full"]), default="quarter", show_default=True)
@click.option("--expect", is_flag=True, help="Exact expected cost instead of one random rounding.")
@click.pass_context
def round_cmd(ctx, instance, xpath, interval, expect):
    """Threshold-round a fractional assignment."""
    from .relax import relaxation_objective
    from .rounding import RoundingConfig, expected_cost, round_random

    doc = io.load_json(instance)
    inst = io.instance_from_json(doc)
    x = io.x_from_json(io.load_json(xpath), inst)
    cfg = RoundingConfig(interval)
    rep = Report(ctx, "round", {"interval": interval, "expect": expect}, doc)
    rep["relaxation_objective"] = relaxation_objective(inst.oracle, x)
    if expect:
        rep["expected_cost"] = expected_cost(inst, x, cfg)
    else:
        out = round_random(inst, x, cfg, seed=ctx.obj["seed"])
        rep["theta"] = float(out.theta)
        rep["cost"] = out.cost
        rep["labels"] = list(out.partition.labels)
    rep.emit()


@cli.command()
@click.argument("graph", type=click.Path(exists=True, dir_okay=False, allow_dash=True))
@click.option("--x", "xpath", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Fractional point; the relaxation is solved when omitted.")
@click.option("--trials", type=int, default=10_000, show_default=True)
@click.pass_context
def gcov(ctx, graph, xpath, trials):
    """Exponential-clock rounding on a graph coverage instance."""
    from .gcov import estimate_expected_cost, gcov_objective_frac

    doc = io.load_json(graph)
    g, terms = io.graph_from_json(doc)
    if not terms:
        raise DomainError("graph JSON needs a terminals list")
    inst = g.instance(terms)
    x = io.x_from_json(io.load_json(xpath), inst) if xpath else _solve(inst, 20_000, 1e-9, "uniform", 0).best_x
    est = estimate_expected_cost(g, terms, x, trials=trials, seed=ctx.obj["seed"])
    lp = gcov_objective_frac(g, x)
    rep = Report(ctx, "gcov", {"trials": trials}, doc)
    rep["lp_value"] = lp
    rep["expected_cost"] = est.mean
    rep["stderr"] = est.stderr
    rep["ratio_to_lp"] = _ratio(est.mean, float(lp))
    rep.emit()


@cli.command()
@click.argument("instance", type=click.Path(exists=True, dir_okay=False, allow_dash=True))
@click.pass_context
def greedy(ctx, instance):
    """Singleton parts for the cheapest k-1 terminals, the rest with the last."""
    from .exact import greedy_baseline

    doc = io.load_json(instance)
    inst = io.instance_from_json(doc)
    P, v = greedy_baseline(inst)
    rep = Report(ctx, "greedy", {}, doc)
    rep["value"], rep["labels"] = v, list(P.labels)
    rep.emit()


@cli.command()
@click.argument("instance", type=click.Path(exists=True, dir_okay=False, allow_dash=True))
@click.option("--sym", is_flag=True, help="Restrict to symmetric partitions (symgap instances).")
@click.option("--budget", type=int, default=None)
@click.pass_context
def brute(ctx, instance, sym, budget):
    """Exhaustive optimum."""
    from .exact import brute_force_opt, brute_force_sym_opt

    doc = io.load_json(instance)
    inst = io.instance_from_json(doc)
    rep = Report(ctx, "brute", {"sym": sym, "budget": budget}, doc)
    if sym:
        if inst.oracle.kind != "symgap":
            raise DomainError("--sym needs a symgap instance")
        P, v = brute_force_sym_opt(inst.oracle.sym, budget=budget)
        rep["value"], rep["labels"] = v, list(P.to_partition().labels)
    else:
        P, v = brute_force_opt(inst, budget=budget, jobs=ctx.obj["jobs"])
        rep["value"], rep["labels"] = v, list(P.labels)
    rep.emit()


@cli.command()
@click.option("--k", type=int, default=4, show_default=True)
@click.option("--brute", "do_brute", is_flag=True, help="Brute-force OPT and OPT_Sym.")
@click.option("--structured", is_flag=True, help="Tabulate structured partition values.")
@click.option("--structure-random", type=int, default=0, help="Run the structuring pipeline on N random partitions.")
@click.pass_context
def symgap(ctx, k, do_brute, structured, structure_random):
    """The grid instance with the 10/9 symmetry gap."""
    from .symgap import (SymInstance, SymPartition, min_structured_value, opt_upper_partition,
                         structure_partition, structured_lower_bound, structured_value, sym_objective,
                         symmetry_gap)

    sym = SymInstance(k)
    rep = Report(ctx, "symgap", {"k": k, "brute": do_brute, "structured": structured,
                                 "structure_random": structure_random})
    ok = True
    rep["row_partition_value"] = opt_upper_partition(sym)[1]
    if structured:
        rep["structured_values"] = {str(s): structured_value(sym, s) for s in range(1, k + 1)}
        val, i_star = min_structured_value(sym)
        rep["structured_min"] = {"value": val, "i_star": i_star, "lower_bound": structured_lower_bound(k)}
    if do_brute:
        g = symmetry_gap(sym, jobs=ctx.obj["jobs"])
        rep["opt"], rep["opt_sym"], rep["gap"] = g.opt, g.opt_sym, g.gap
        rep["checks"] = g.checks
        ok = g.ok
    if structure_random:
        rng = make_rng(ctx.obj["seed"], "cli-structure", k)
        worst = Fraction(-10 ** 9)
        tags = {}
        for _ in range(structure_random):
            P = SymPartition.random(k, rng)
            Q, tag = structure_partition(sym, P)
            worst = max(worst, sym_objective(sym, Q) - sym_objective(sym, P))
            tags[str(tag.i_star)] = tags.get(str(tag.i_star), 0) + 1
        rep["structure_random"] = {"trials": structure_random, "max_increase": worst,
                                   "allowed": 2 * k, "i_star_counts": tags}
        ok = ok and worst <= 2 * k
    rep.emit(ok)


@cli.command(name="reduce")
@click.argument("graph", type=click.Path(exists=True, dir_okay=False, allow_dash=True))
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.pass_context
def reduce_cmd(ctx, graph, out):
    """Build the graph coverage instance of the Max-Cut reduction."""
    from .hardness import reduce

    doc = io.load_json(graph)
    G = io.simple_graph_from_json(doc)
    R = reduce(G)
    hdoc = io.graph_to_json(R.graph, R.terminals)
    if out:
        io.dump_json(hdoc, out)
    rep = Report(ctx, "reduce", {}, doc)
    rep["vertices"], rep["edges"], rep["total_weight"] = R.graph.n, len(R.graph.edges), R.graph.total_weight()
    if not out:
        rep["graph"] = hdoc
    rep.emit()


@cli.command(name="verify-reduction")
@click.argument("graph", type=click.Path(exists=True, dir_okay=False, allow_dash=True))
@click.option("--budget", type=int, default=None)
@click.pass_context
def verify_reduction_cmd(ctx, graph, budget):
    """Brute-force both sides of the reduction and check its identities."""
    from .hardness import verify_reduction

    doc = io.load_json(graph)
    G = io.simple_graph_from_json(doc)
    r = verify_reduction(G, budget=budget, jobs=ctx.obj["jobs"])
    rep = Report(ctx, "verify-reduction", {"budget": budget}, doc)
    rep["maxcut"], rep["mwc_opt"], rep["gcov_opt"] = r.maxcut, r.mwc_opt, r.gcov_opt
    rep["gcov_route"], rep["identities"] = r.gcov_route, r.identities
    rep["identities_ok"] = r.identities_ok
    rep.emit(r.identities_ok)


@cli.command()
@click.argument("suite", type=click.Choice(["lemmas", "symgap", "reduction", "gcov"]))
@click.option("--k", type=int, default=4, show_default=True, help="Grid size for the symgap suite.")
@click.option("--quick", is_flag=True, help="Smaller random sweeps.")
@click.pass_context
def verify(ctx, suite, k, quick):
    """Run a named property suite; exit 0 iff every check passes."""
    from .suites import SUITES

    seed = ctx.obj["seed"]
    kw = {"seed": seed}
    if suite == "symgap":
        kw.update(k=k, partitions=50 if quick else 200)
    elif suite == "lemmas" and quick:
        kw.update(vectors=1000, instances=4, points=4)
    elif suite == "gcov" and quick:
        kw.update(trials=10_000, pairs=100, pair_trials=2000)
    elif suite == "reduction" and quick:
        kw.update(partitions=50)
    checks = SUITES[suite](**kw)
    for c in checks:
        click.echo(c.line(), err=True)
    rep = Report(ctx, "verify", {"suite": suite, "k": k, "quick": quick})
    rep["checks"] = {c.name: {"ok": c.ok, "detail": c.detail} for c in checks}
    rep.emit(all(c.ok for c in checks))


@cli.command()
@click.option("--k", type=int, default=3, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.pass_context
def ckr(ctx, k, out):
    """Write the CKR gap graph; report its LP and integral optima."""
    from .exact import brute_force_opt
    from .gcov import ckr_half_point, ckr_instance, gcov_objective_frac

    g, t = ckr_instance(k)
    gdoc = io.graph_to_json(g, t)
    if out:
        io.dump_json(gdoc, out)
    lp = gcov_objective_frac(g, ckr_half_point(g, t))
    _, opt = brute_force_opt(g.instance(t))
    rep = Report(ctx, "ckr", {"k": k}, gdoc)
    rep["lp_half_point"], rep["opt"], rep["gap"] = lp, opt, opt / lp
    if not out:
        rep["graph"] = gdoc
    rep.emit()


@cli.command()
@click.argument("instance", type=click.Path(exists=True, dir_okay=False, allow_dash=True))
@click.option("--x", "xpath", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Use this fractional point instead of the solver's.")
@click.option("--interval", type=click.Choice(["quarter", "half", "full"]), default="quarter", show_default=True)
@click.option("--brute", "do_brute", is_flag=True)
@click.option("--iters", type=int, default=20_000, show_default=True)
@click.pass_context
def solve(ctx, instance, xpath, interval, do_brute, iters):
    """Relaxation, threshold rounding, greedy and (optionally) brute force side by side."""
    from .exact import brute_force_opt, greedy_baseline
    from .relax import relaxation_objective
    from .rounding import RoundingConfig, expected_cost

    doc = io.load_json(instance)
    inst = io.instance_from_json(doc)
    rep = Report(ctx, "solve", {"interval": interval, "brute": do_brute, "iters": iters, "x": xpath}, doc)
    if xpath:
        x = io.x_from_json(io.load_json(xpath), inst)
    else:
        res = _solve(inst, iters, 1e-9, "uniform", ctx.obj["seed"])
        rep["relaxation_float"] = res.objective
        x = res.best_x.rationalize()
    lp = relaxation_objective(inst.oracle, x)
    e = expected_cost(inst, x, RoundingConfig(interval))
    _, gv = greedy_baseline(inst)
    rep["relaxation"], rep["expected_rounding"], rep["greedy"] = lp, e, gv
    rep["ratio_rounding_to_relaxation"] = _ratio(e, lp)
    if do_brute:
        _, opt = brute_force_opt(inst, jobs=ctx.obj["jobs"])
        rep["opt"] = opt
        rep["ratio_rounding_to_opt"] = _ratio(e, opt)
        rep["ratio_greedy_to_opt"] = _ratio(gv, opt)
    rep.emit()


def main(argv=None):
    try:
        cli.main(args=argv, prog_name="submwp", standalone_mode=False)
    except click.exceptions.Exit as exc:
        sys.exit(exc.exit_code)
    except click.ClickException as exc:
        exc.show()
        sys.exit(2)
    except click.exceptions.Abort:
        sys.exit(1)
    except SubmwpError as exc:
        err = {"error": type(exc).__name__, "message": str(exc)}
        if getattr(exc, "pointer", None) is not None:
            err["pointer"] = exc.pointer
        if isinstance(exc, CapacityError) and exc.required is not None:
            err["required"] = exc.required
        click.echo(json.dumps(err), err=True)
        sys.exit(exc.exit_code)
    sys.exit(0)


if __name__ == "__main__":
    main()
