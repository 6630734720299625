"""Command line front end: spectrum, groundstate, evolve, region, validate.

Exit codes: 0 success, 2 bad input (arguments, files, JSON, domains),
3 below threshold / outside the existence region, 4 groundstate on a
graph that is not flower-representable, 1 any other failure including
failed validation suites.

File formats are stable: JSON summaries carry a "schema": 1 field; CSV
files always start with a header row.  Profile CSVs are `edge_id,x,u`,
evolution traces `t,H,sup_norm`, boundary curves `loop_half,critical_stem`
(one extra loop_half column per loop for grids).  Set FKPP_LOG=INFO or
DEBUG for progress output on stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
from multiprocessing import get_context

import numpy as np

from .errors import (
    BelowThreshold,
    ComparisonViolated,
    FisherKppError,
    InvalidDomain,
    LoopTooLong,
    NegativeInitialData,
    OutsideRegion,
)
from .evolve import comparison_monitor, run_to_attractor
from .graph import (
    FlowerSpec,
    MetricGraph,
    as_flower,
    flower_graph,
    graph_from_json,
    validate,
)
from .groundstate import (
    energy_of,
    jacobian_report,
    solve_flower,
)
from .mesh import Field, GraphMesh, constant_field, field_from_function, \
    field_from_profiles
from .period import asymptotic_T, center_limits, grad_T, grad_T0, period_T, \
    period_T0
from .phaseplane import PhasePoint, well
from .spectral import (
    lambda0_discretized,
    lambda0_flower,
    lower_boundary,
    region_membership,
)

logger = logging.getLogger("fkpp")

__all__ = ["main"]


# ---------------------------------------------------------------- plumbing

def _parse_flower(tokens: list[str]) -> FlowerSpec:
    """stem=0.8 loops=1.5,0.6 -> FlowerSpec; loop entries are total lengths."""
    stem = None
    halves: tuple[float, ...] = ()
    for tok in tokens:
        key, sep, val = tok.partition("=")
        if not sep:
            raise InvalidDomain(f"expected KEY=VALUE, got {tok!r}")
        if key == "stem":
            stem = float(val)
        elif key == "loops":
            totals = [float(v) for v in val.split(",") if v]
            halves = tuple(t / 2.0 for t in totals)
        else:
            raise InvalidDomain(f"unknown flower key {key!r} (stem, loops)")
    if stem is None:
        raise InvalidDomain("flower shorthand needs stem=LENGTH")
    return FlowerSpec(stem, halves)


def _load_graph(args) -> tuple[FlowerSpec | None, MetricGraph]:
    if getattr(args, "flower", None):
        spec = _parse_flower(args.flower)
        return spec, flower_graph(spec)
    path = args.graph
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InvalidDomain(f"cannot read graph file {path}: {exc}") from exc
    graph = graph_from_json(text)
    validate(graph)
    logger.info("loaded graph with %d edges, total length %.6g",
                len(graph.edges), graph.total_length())
    return as_flower(graph), graph


def _emit_json(obj: dict, path: str | None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _write_csv(path: str | None, header: list[str], rows) -> None:
    fh = open(path, "w", newline="", encoding="utf-8") if path else sys.stdout
    try:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    finally:
        if path:
            fh.close()


def _profile_rows(field: Field):
    for e in field.mesh.graph.edges:
        x, u = field.on_edge(e.id)
        for xi, ui in zip(x, u):
            yield (e.id, repr(float(xi)), repr(float(ui)))


def _read_profile_csv(path: str) -> dict:
    profiles: dict[str, tuple[list, list]] = {}
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [h.strip() for h in header[:3]] != ["edge_id", "x", "u"]:
                raise InvalidDomain(
                    f"{path}: expected header edge_id,x,u, got {header}")
            for row in reader:
                if not row:
                    continue
                xs, us = profiles.setdefault(row[0], ([], []))
                xs.append(float(row[1]))
                us.append(float(row[2]))
    except OSError as exc:
        raise InvalidDomain(f"cannot read profile CSV {path}: {exc}") from exc
    if not profiles:
        raise InvalidDomain(f"{path}: no profile rows")
    return {k: (np.asarray(xs), np.asarray(us)) for k, (xs, us) in profiles.items()}


def _initial_field(mesh: GraphMesh, text: str, spec: FlowerSpec | None) -> Field:
    kind, _, arg = text.partition(":")
    if kind == "const":
        return constant_field(mesh, float(arg))
    if kind == "hat":
        amp = float(arg)

        def tent(edge_id, x):
            ell = x[-1]
            return amp * np.minimum(x, ell - x) / (ell / 2.0)

        return field_from_function(mesh, tent)
    if kind == "csv":
        return field_from_profiles(mesh, _read_profile_csv(arg))
    if kind == "groundstate":
        if spec is None:
            raise InvalidDomain(
                "initial groundstate needs a flower-representable graph")
        sol = solve_flower(spec)
        return field_from_profiles(mesh, sol.profiles)
    raise InvalidDomain(
        f"unknown initial data {text!r} (const:V, hat:V, csv:FILE, groundstate)")


# ------------------------------------------------------------- subcommands

def cmd_spectrum(args) -> int:
    spec, graph = _load_graph(args)
    if spec is not None:
        res = lambda0_flower(spec)
        membership = region_membership(spec)
        out = {
            "schema": 1,
            "lambda0": res.lambda0,
            "method": res.method,
            "residual": res.residual,
            "region": membership.region.value,
        }
        mesh_h = args.mesh if args.mesh else 2e-3
        disc = lambda0_discretized(graph, mesh_h=mesh_h)
        out["discretized"] = {
            "lambda0": disc.lambda0,
            "mesh_h": mesh_h,
            "iterations": disc.iterations,
            "gap": abs(disc.lambda0 - res.lambda0),
        }
    else:
        mesh_h = args.mesh if args.mesh else 1e-3
        disc = lambda0_discretized(graph, mesh_h=mesh_h)
        out = {
            "schema": 1,
            "lambda0": disc.lambda0,
            "method": disc.method,
            "residual": disc.residual,
            "mesh_h": mesh_h,
            "region": "Nontrivial" if disc.lambda0 < 1.0 else "Trivial",
        }
    logger.info("lambda0 = %.12g", out["lambda0"])
    _emit_json(out, args.out)
    return 0


def cmd_groundstate(args) -> int:
    spec, _ = _load_graph(args)
    if spec is None:
        print("error: graph is not flower-representable; the period method "
              "does not apply. Use the evolve subcommand instead.",
              file=sys.stderr)
        return 4
    sol = solve_flower(spec, tol=args.tol)
    lam = lambda0_flower(spec).lambda0
    out = {
        "schema": 1,
        "p": sol.p,
        "q": list(sol.q_loops),
        "q_stem": sol.q_stem,
        "lambda0": lam,
        "H": energy_of(sol),
        "sup_u": sol.sup_u,
        "residuals": {k: (dict(v) if isinstance(v, dict) else v)
                      for k, v in sol.residuals.items()},
        "newton_iterations": sol.newton_iterations,
        "convergence_floor": sol.convergence_floor,
    }
    if spec.n_loops:
        rep = jacobian_report(sol.p, list(sol.q_loops))
        out["jacobian_determinant"] = rep.determinant
        out["jacobian_sign_ok"] = bool(rep.sign_ok)
    if args.profile:
        _write_csv(args.profile, ["edge_id", "x", "u"],
                   ((eid, repr(float(xi)), repr(float(ui)))
                    for eid, (x, u) in sol.profiles.items()
                    for xi, ui in zip(x, u)))
        logger.info("profile written to %s", args.profile)
    _emit_json(out, args.out)
    return 0


def cmd_evolve(args) -> int:
    spec, graph = _load_graph(args)
    mesh = GraphMesh(graph, mesh_h=args.mesh)
    u0 = _initial_field(mesh, args.initial, spec)
    logger.info("evolving %d nodes, dt=%g, tol=%g", mesh.n_nodes, args.dt, args.tol)
    trace = run_to_attractor(u0, dt=args.dt, max_t=args.max_t, tol=args.tol)
    comparison_monitor(trace)
    if args.trace:
        _write_csv(args.trace, ["t", "H", "sup_norm"],
                   zip(map(repr, trace.times.tolist()),
                       map(repr, trace.energy.tolist()),
                       map(repr, trace.sup_norm.tolist())))
    if args.profile:
        _write_csv(args.profile, ["edge_id", "x", "u"], _profile_rows(trace.final))
    out = {
        "schema": 1,
        "terminal": trace.terminal.value,
        "t_end": float(trace.times[-1]),
        "steps": trace.steps,
        "H_end": float(trace.energy[-1]),
        "sup_end": float(trace.sup_norm[-1]),
    }
    _emit_json(out, args.out)
    return 0


def _boundary_row(case: tuple) -> tuple:
    halves = case
    limit = math.pi / 2.0
    if any(h >= limit for h in halves):
        # continuous extension: tan blows up, the critical stem closes to 0
        return halves + (0.0,)
    return halves + (lower_boundary(halves),)


def cmd_region(args) -> int:
    if args.flower or args.graph:
        spec, _ = _load_graph(args)
        if spec is None:
            raise InvalidDomain("region membership needs a flower graph")
        rep = region_membership(spec)
        _emit_json({
            "schema": 1,
            "region": rep.region.value,
            "lambda0": rep.lambda0,
            "boundary": rep.boundary,
        }, args.out)
        return 0

    limit = math.pi / 2.0
    if args.grid:
        ls = np.linspace(0.0, limit, args.samples)
        cases = [(float(l1), float(l2)) for l1 in ls for l2 in ls]
        header = ["loop_half_1", "loop_half_2", "critical_stem"]
    else:
        n = args.curve
        ls = np.linspace(0.0, limit, args.samples, endpoint=False)
        cases = [(float(l),) * n for l in ls]
        header = [f"loop_half_{j + 1}" for j in range(n)] + ["critical_stem"]
    if args.jobs > 1:
        with get_context("fork").Pool(args.jobs) as pool:
            rows = pool.map(_boundary_row, cases)
    else:
        rows = [_boundary_row(c) for c in cases]
    _write_csv(args.out, header, (tuple(repr(v) for v in row) for row in rows))
    return 0


# --------------------------------------------------------- validate suites

def _admissible_loop_sample(rng) -> tuple[float, float]:
    p = rng.uniform(0.05, 0.95)
    q = -math.sqrt(well(p)) * rng.uniform(0.05, 0.95)
    return p, q


def _suite_asymptotics(args) -> list[dict]:
    checks = []
    resid = []
    for p in (1e-2, 1e-3, 1e-4):
        r = abs(period_T(PhasePoint(p, -p)).value - asymptotic_T(PhasePoint(p, -p)))
        resid.append(r / p)
    ratio = max(resid) / min(resid)
    checks.append({
        "name": "homoclinic residual scales linearly in p",
        "passed": ratio <= 3.0,
        "detail": f"residual/p over three decades: {resid} (spread x{ratio:.3f})",
    })
    for L in (6.0, 8.0, 10.0):
        p = 6.0 * math.exp(-L - 2.0 * math.acosh(math.sqrt(1.5)))
        q = -math.sqrt(well(p))
        err = abs(period_T(PhasePoint(p, q)).value - L)
        checks.append({
            "name": f"homoclinic trace law at L={L:g}",
            "passed": err <= 10.0 * math.exp(-L),
            "detail": f"|T - L| = {err:.3e} vs 10 e^-L = {10 * math.exp(-L):.3e}",
        })
    for Q in (-0.5, -1.0, -2.0):
        bp = 1e-3
        pt = PhasePoint(1.0 - bp, Q * bp)
        lim_t, lim_t0 = center_limits(Q)
        dev_t = abs(period_T(pt).value - lim_t)
        dev_t0 = abs(period_T0(pt).value - lim_t0)
        dev_sum = abs(period_T(pt).value + period_T0(pt).value - math.pi / 2.0)
        ok = max(dev_t, dev_t0, dev_sum) <= 5e-3
        checks.append({
            "name": f"center limits along q = {Q:g}(1-p)",
            "passed": ok,
            "detail": f"deviations T {dev_t:.2e}, T0 {dev_t0:.2e}, sum {dev_sum:.2e}",
        })
    return checks


def _suite_monotonicity(args) -> list[dict]:
    checks = []
    ps = np.geomspace(0.02, 0.98, 20)
    qs = -np.geomspace(0.005, 3.0, 20)
    bad = 0
    for p in ps:
        for q in qs:
            g = grad_T(PhasePoint(float(p), float(q)))
            if not (g.dT_dp < 0.0 and g.dT_dq > 0.0):
                bad += 1
    checks.append({
        "name": "dT/dp < 0 and dT/dq > 0 on the 20x20 grid",
        "passed": bad == 0,
        "detail": f"{bad} violations out of {ps.size * qs.size}",
    })
    rng = np.random.default_rng(args.seed)
    bad_q = bad_p = 0
    n_inside = 0
    for _ in range(args.samples or 200):
        p, q = _admissible_loop_sample(rng)
        g0 = grad_T0(PhasePoint(p, q))
        n_inside += 1
        if not g0.dT_dq < 0.0:
            bad_q += 1
        if p <= 0.5 and not g0.dT_dp < 0.0:
            bad_p += 1
    checks.append({
        "name": "dT0/dq < 0 on random closed orbits",
        "passed": bad_q == 0,
        "detail": f"{bad_q} violations out of {n_inside}",
    })
    checks.append({
        "name": "dT0/dp < 0 for p <= 1/2",
        "passed": bad_p == 0,
        "detail": f"{bad_p} violations",
    })
    worst = 0.0
    for _ in range(20):
        p, q = _admissible_loop_sample(rng)
        p = min(max(p, 0.1), 0.9)
        g = grad_T(PhasePoint(p, q))
        h = 1e-5
        fd_p = (period_T(PhasePoint(p + h, q)).value
                - period_T(PhasePoint(p - h, q)).value) / (2 * h)
        fd_q = (period_T(PhasePoint(p, q + h)).value
                - period_T(PhasePoint(p, q - h)).value) / (2 * h)
        worst = max(worst,
                    abs(g.dT_dp - fd_p) / max(abs(fd_p), 1e-12),
                    abs(g.dT_dq - fd_q) / max(abs(fd_q), 1e-12))
    checks.append({
        "name": "analytic gradient matches central differences",
        "passed": worst <= 1e-4,
        "detail": f"worst relative mismatch {worst:.2e}",
    })
    return checks


def _suite_jacobian(args) -> list[dict]:
    rng = np.random.default_rng(args.seed)
    checks = []
    samples = args.samples or 100
    for n in range(1, 6):
        bad = 0
        for _ in range(samples):
            p = rng.uniform(0.05, 0.95)
            qs = [-math.sqrt(well(p)) * rng.uniform(0.05, 0.95) for _ in range(n)]
            rep = jacobian_report(p, qs)
            if not rep.sign_ok:
                bad += 1
        checks.append({
            "name": f"sign(det) = (-1)^(N+1) for N={n}",
            "passed": bad == 0,
            "detail": f"{bad} violations out of {samples}",
        })
    return checks


def _dichotomy_case(case: tuple) -> dict:
    stem, halves = case
    spec = FlowerSpec(stem, halves)
    expected = region_membership(spec).region.value
    mesh = GraphMesh(flower_graph(spec), mesh_h=0.02)
    u0 = constant_field(mesh, 0.5)
    trace = run_to_attractor(u0, dt=0.1, max_t=400.0, tol=1e-7)
    got = {"ConvergedTrivial": "Trivial",
           "ConvergedNontrivial": "Nontrivial"}.get(trace.terminal.value, "?")
    return {
        "name": f"dichotomy stem={stem:.4g} halves={list(halves)}",
        "passed": got == expected,
        "detail": f"spectral {expected}, evolve {trace.terminal.value} "
                  f"after {trace.steps} steps",
    }


def _suite_dichotomy(args) -> list[dict]:
    cases = []
    for halves in [(0.75,), (0.5,), (1.2,), (0.8, 0.5), (0.6, 0.6),
                   (0.5, 0.4, 0.3)]:
        crit = lower_boundary(halves)
        cases.append((max(0.05, 0.6 * crit), halves))
        cases.append((crit + 0.4, halves))
    if args.jobs > 1:
        with get_context("fork").Pool(args.jobs) as pool:
            return pool.map(_dichotomy_case, cases)
    return [_dichotomy_case(c) for c in cases]


_SUITES = {
    "asymptotics": _suite_asymptotics,
    "monotonicity": _suite_monotonicity,
    "jacobian": _suite_jacobian,
    "dichotomy": _suite_dichotomy,
}


def cmd_validate(args) -> int:
    checks = _SUITES[args.suite](args)
    passed = all(c["passed"] for c in checks)
    _emit_json({
        "schema": 1,
        "suite": args.suite,
        "seed": args.seed,
        "checks": checks,
        "passed": passed,
    }, args.out)
    return 0 if passed else 1


# ------------------------------------------------------------------ parser

def _add_graph_source(sub, required=True):
    group = sub.add_mutually_exclusive_group(required=required)
    group.add_argument("--flower", nargs="+", metavar="KEY=VAL",
                       help="flower shorthand: stem=L loops=T1,T2,... "
                            "(loop entries are total lengths)")
    group.add_argument("--graph", metavar="FILE", help="metric graph JSON file")
    return group


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fkpp",
        description="Ground states and dynamics of u_t = u'' + u(1-u) "
                    "on metric graphs.")
    subs = parser.add_subparsers(dest="command", required=True)

    sp = subs.add_parser("spectrum", help="lowest Laplacian eigenvalue")
    _add_graph_source(sp)
    sp.add_argument("--mesh", type=float, default=None,
                    help="mesh width for the discretized eigenvalue")
    sp.add_argument("--out", metavar="FILE", help="write the JSON summary here")
    sp.set_defaults(func=cmd_spectrum)

    gs = subs.add_parser("groundstate", help="positive steady state on a flower")
    _add_graph_source(gs)
    gs.add_argument("--tol", type=float, default=1e-10,
                    help="period residual tolerance")
    gs.add_argument("--out", metavar="FILE", help="write the JSON summary here")
    gs.add_argument("--profile", metavar="FILE",
                    help="write the reconstructed profile CSV here")
    gs.set_defaults(func=cmd_groundstate)

    ev = subs.add_parser("evolve", help="time integration to the attractor")
    _add_graph_source(ev)
    ev.add_argument("--mesh", type=float, default=1e-2, help="mesh width")
    ev.add_argument("--dt", type=float, default=0.1, help="initial time step")
    ev.add_argument("--max-t", type=float, default=500.0, help="time horizon")
    ev.add_argument("--tol", type=float, default=1e-9,
                    help="steady-state tolerance on |du/dt|")
    ev.add_argument("--initial", default="hat:0.1",
                    help="const:V | hat:V | csv:FILE | groundstate")
    ev.add_argument("--trace", metavar="FILE", help="write t,H,sup_norm CSV here")
    ev.add_argument("--profile", metavar="FILE",
                    help="write the terminal profile CSV here")
    ev.add_argument("--out", metavar="FILE", help="write the JSON summary here")
    ev.set_defaults(func=cmd_evolve)

    rg = subs.add_parser("region", help="existence region and its lower boundary")
    _add_graph_source(rg, required=False)
    rg.add_argument("--curve", type=int, metavar="N",
                    help="sample the symmetric N-loop boundary curve")
    rg.add_argument("--grid", action="store_true",
                    help="sample the two-loop boundary surface")
    rg.add_argument("--samples", type=int, default=50, help="points per axis")
    rg.add_argument("--jobs", type=int, default=1, help="worker processes")
    rg.add_argument("--out", metavar="FILE", help="write the CSV/JSON here")
    rg.set_defaults(func=cmd_region)

    va = subs.add_parser("validate", help="property suites")
    va.add_argument("--suite", required=True, choices=sorted(_SUITES),
                    help="which suite to run")
    va.add_argument("--seed", type=int, default=0, help="RNG seed")
    va.add_argument("--samples", type=int, default=None,
                    help="override the per-check sample count")
    va.add_argument("--jobs", type=int, default=1, help="worker processes")
    va.add_argument("--out", metavar="FILE", help="write the JSON report here")
    va.set_defaults(func=cmd_validate)

    return parser


def main(argv=None) -> int:
    level = os.environ.get("FKPP_LOG", "WARNING").upper()
    logging.basicConfig(stream=sys.stderr,
                        level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    if args.command == "region" and not (args.flower or args.graph
                                         or args.curve or args.grid):
        print("error: region needs --flower/--graph, --curve N, or --grid",
              file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (BelowThreshold, OutsideRegion) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (InvalidDomain, NegativeInitialData, LoopTooLong) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ComparisonViolated as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FisherKppError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
