"""Command-line front end.  Every command prints one JSON report.

Exit codes: 0 when every check in the run passes, 1 when a check fails,
2 for unusable input, 3 when the budget is exceeded.
"""

from __future__ import annotations

import argparse
import json
import math
import random
import sys
import time
from importlib import resources
from pathlib import Path

from . import __version__
from . import budget
from . import building as bd
from . import classical as cl
from . import forms as fm
from . import matvec as mv
from . import permgrp as pg
from . import polar as pol
from .named import NamedGroupError, orthogonal_standard, parse_named_group
from .projgeom import PointLineGeometry, build_pg, check_pg_axioms
from .scalar import GF, H, parse_quaternion

SCHEMA = "geomforge.report/1"


class InputError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    # report bad arguments through the JSON report instead of exiting
    def error(self, message):
        raise InputError(message)


# ---------------------------------------------------------------------------
# input helpers

def _field(q):
    try:
        return GF(q)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _form_path(path):
    """A file on disk, or else the name of one of the bundled sample forms."""
    if Path(path).exists():
        return Path(path)
    bundled = resources.files("geomforge") / "data" / "forms" / Path(path).name
    return bundled if bundled.is_file() else Path(path)


def _load_form(path):
    try:
        data = json.loads(_form_path(path).read_text())
        return fm.PseudoQuadraticForm.from_json(data)
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        raise InputError(f"cannot read form from {path}: {exc}") from None


def _load_geometry(path):
    try:
        with open(path) as fh:
            return PointLineGeometry.from_text(fh.read())
    except OSError as exc:
        raise InputError(f"cannot read geometry from {path}: {exc}") from None


def _group(args):
    if getattr(args, "name", None):
        return parse_named_group(args.name)[0]
    if getattr(args, "gens", None):
        gens = [pg.parse_perm(g) for g in args.gens.split(";") if g.strip()]
        if not gens:
            raise InputError("no generators given")
        return pg.PermGroup(gens)
    raise InputError("give --name or --gens")


def _family_form(family, n, q):
    F = _field(q)
    if family == "sp":
        if n % 2:
            raise InputError("sp needs an even dimension")
        return fm.symplectic_form(F, n // 2)
    if family == "o":
        return orthogonal_standard(F, n)
    if family == "u":
        F2 = _field(q * q)
        a = next(x for x in F2.elements() if F2.add(x, F2.frobenius(x, F2.k // 2)) == F2.one)
        return fm.unitary_form(F2, mv.diagonal(F2, [a] * n))
    raise InputError(f"unknown family {family!r}")


def _polar_source(args):
    if getattr(args, "example", None) == "grid":
        return pol.grid_geometry(3, 3)
    if getattr(args, "example", None) == "a32":
        return pol.build_a32(_field(args.q or 2))
    if getattr(args, "file", None):
        return pol.PolarSpace(_load_geometry(args.file))
    if getattr(args, "form", None):
        return pol.build_polar(_load_form(args.form))
    if getattr(args, "family", None):
        return pol.build_polar(_family_form(args.family, args.n, args.q))
    raise InputError("give --form, --family with --n/--q, --file or --example")


def _fmt_subspace(U):
    return [[U.D.fmt(x) for x in b] for b in U.basis]


# ---------------------------------------------------------------------------
# commands: each returns (results, passed)

def cmd_geometry_build(args):
    G = build_pg(args.n, _field(args.q))
    res = {"rank": args.n, "q": args.q, "counts": {str(k): len(G.grass[k]) for k in sorted(G.grass)}}
    if args.n >= 2:
        pl = G.point_line()
        res["points"], res["lines"] = len(pl.points), len(pl.lines)
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(pl.to_text())
            res["written"] = args.out
    return res, True


def cmd_geometry_check(args):
    if args.file:
        geo = _load_geometry(args.file)
    elif args.n and args.q:
        geo = build_pg(args.n, _field(args.q)).point_line()
    else:
        raise InputError("give --file or --n and --q")
    if args.axioms == "pg":
        rep = check_pg_axioms(geo)
        return rep, rep["all_pass"]
    rep = pol.check_polar_axioms(geo)
    return rep, rep["weak_polar_space"]


def cmd_polar_build(args):
    P = _polar_source(args)
    geo = P.geometry
    res = {"points": len(geo.points), "lines": len(geo.lines), "rank": P.rank,
           "subspaces_by_rank": {str(r): len(v) for r, v in sorted(P.subspaces().items())}}
    if P.form is not None:
        res["witt_index"] = fm.witt_index(P.form)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(geo.to_text())
        res["written"] = args.out
    return res, True


def cmd_polar_check(args):
    rep = pol.check_polar_axioms(_polar_source(args))
    return rep, rep["weak_polar_space"]


def cmd_polar_oriflamme(args):
    rep = pol.a32_oriflamme_isomorphism(_field(args.q))
    return rep, rep["isomorphic"]


def cmd_forms_classify(args):
    pq = _load_form(args.file)
    c = fm.classify_form_case(pq.param)
    return c.to_json(), True


def cmd_forms_witt(args):
    pq = _load_form(args.file)
    res = {"index": fm.witt_index(pq), "nondegenerate": pq.is_nondegenerate()}
    ok = True
    if pq.is_nondegenerate():
        dec = fm.witt_decompose(pq)
        chk = dec.check()
        res["decomposition"] = dec.to_json()
        res["check"] = chk
        ok = chk["all_pass"] and dec.index == res["index"]
    return res, ok


def cmd_forms_reduce(args):
    pq = _load_form(args.file)
    if not pq.is_slightly_degenerate():
        raise InputError("the form is not slightly degenerate")
    red = fm.reduce_slightly_degenerate(pq)
    a, b = len(pq.isotropic_points()), len(red.reduced.isotropic_points())
    res = {
        "radical": _fmt_subspace(red.radical),
        "reduced": red.reduced.to_json(),
        "isotropic_points": [a, b],
        "witt_index": [fm.witt_index(pq), fm.witt_index(red.reduced)],
    }
    return res, a == b


def cmd_forms_paramcheck(args):
    pq = _load_form(args.file)
    rep = fm.form_parameter_check(pq.param)
    return rep, rep["all_pass"]


def cmd_group_order(args):
    G = _group(args)
    return {"order": G.order(), "degree": G.degree}, True


def cmd_group_transitivity(args):
    G = _group(args)
    return {"transitivity_degree": G.transitivity_degree(), "degree": G.degree}, True


def cmd_group_perfect(args):
    G = _group(args)
    return {"perfect": G.is_perfect(), "order": G.order()}, True


def cmd_group_simple(args):
    G = _group(args)
    return {"simple": G.is_simple(), "order": G.order()}, True


def cmd_group_iso(args):
    A, B = parse_named_group(args.a)[0], parse_named_group(args.b)[0]
    r = pg.iso_small(A, B)
    res = {"isomorphic": r["isomorphic"], "orders": [A.order(), B.order()]}
    if r["isomorphic"]:
        res["generators"] = [pg.format_perm(g) for g in r["generators"]]
        res["images"] = [pg.format_perm(g) for g in r["images"]]
        res["verified"] = pg.verify_isomorphism(A, B, r["generators"], r["images"])
        return res, res["verified"]
    res["separated_by"] = r.get("invariant")
    return res, True


def cmd_classical_build(args):
    if args.form:
        iso = cl.build_unitary(_load_form(args.form))
        return {"order": iso.order(), "isotropic_points": len(iso.isotropic_points)}, True
    name = {"el": "el", "sl": "sl", "gl": "gl", "pel": "pel", "pgl": "pgl", "sp": "sp", "o": "o", "u": "u"}[args.group]
    G, action = parse_named_group(f"{name}({args.n},{args.q})")
    return {"group": f"{name}({args.n},{args.q})", "order": G.order(), "degree": G.degree, "action": action}, True


def cmd_classical_steinberg(args):
    if args.quaternion:
        rep = cl.check_steinberg(args.n, H, samples=args.samples, rng=random.Random(args.seed))
    else:
        rep = cl.check_steinberg(args.n, _field(args.q))
    return rep, rep["all_pass"]


def cmd_classical_det(args):
    if args.quaternion:
        M = [[parse_quaternion(x) for x in row.split(",")] for row in args.matrix.split(";")]
        d = cl.dieudonne_det(H, M)
        return {"det": H.fmt(d), "norm": str(d.norm())}, True
    F = _field(args.q)
    try:
        M = mv.parse_matrix(F, args.matrix)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    leib = cl.determinant(F, M)
    try:
        d = cl.dieudonne_det(F, M)
    except cl.ClassicalError:
        return {"det": None, "leibniz": F.fmt(leib), "singular": True}, leib == F.zero
    return {"det": F.fmt(d), "leibniz": F.fmt(leib)}, d == leib


def cmd_classical_moufang(args):
    rep = cl.check_moufang(cl.moufang_set_projective_line(_field(args.q), args.level))
    return rep, rep["all_pass"]


def cmd_classical_reconstruct(args):
    G = parse_named_group(args.name)[0]
    L = cl.reconstruct_lines(G)
    rep = check_pg_axioms(L)
    return {"points": len(L.points), "lines": [list(L.line_points[l]) for l in L.lines],
            "pg_axioms": {k: rep[k]["status"] for k in ("PG1", "PG2", "PG3", "PG4")}}, rep["all_pass"]


def cmd_building_flags(args):
    K = bd.flag_complex(build_pg(args.n, _field(args.q)))
    res = {"vertices": len(K.labels), "chambers": len(K.chambers()), "rank": K.rank,
           "gallery_connected": K.is_gallery_connected(), "chambers_per_panel": K.panel_counts()}
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(K.to_edge_list())
        res["written"] = args.out
    return res, res["gallery_connected"]


def cmd_building_apartment(args):
    F = _field(args.q)
    A = bd.apartment(F, mv.identity(F, args.n + 1))
    verts, chambers = len(A.vertices), len(A.chambers())
    ok = verts == 2 ** (args.n + 1) - 2 and chambers == math.factorial(args.n + 1)
    return {"vertices": verts, "chambers": chambers}, ok


def cmd_building_tits(args):
    ts = bd.extract_tits_system(args.n, _field(args.q))
    rep = bd.verify_tits(ts)
    return rep, rep["all_pass"]


def cmd_building_roots(args):
    rep = bd.root_commutator_correspondence(args.n, _field(args.q))
    return rep, rep["agree"]


def cmd_verify(args):
    from .suite import run_suite

    if args.suite != "paper":
        raise InputError(f"unknown suite {args.suite!r}")
    select = None
    if args.only:
        try:
            select = [int(x) for x in args.only.split(",")]
        except ValueError:
            raise InputError("--only takes comma-separated criterion numbers") from None
    results = run_suite(select, seed=args.seed)
    if not args.timing:
        for r in results:
            r.pop("seconds")
    summary = [{"criterion": r["criterion"], "title": r["title"], "passed": r["passed"]} for r in results]
    return {"summary": summary, "criteria": results}, all(r["passed"] for r in results)


# ---------------------------------------------------------------------------
# parser

def build_parser():
    p = _Parser(prog="geomforge", description="Classical groups and their geometries, checked exactly.")
    p.add_argument("--version", action="version", version=f"geomforge {__version__}")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    p.add_argument("--human", action="store_true", help="also print a short summary on stderr")
    p.add_argument("--timing", action="store_true", help="include wall-clock times (breaks byte-identical output)")
    top = p.add_subparsers(dest="area", required=True)

    def nq(sp, n_default=None, q_default=None):
        sp.add_argument("--n", type=int, default=n_default)
        sp.add_argument("--q", type=int, default=q_default)

    geo = top.add_parser("geometry").add_subparsers(dest="action", required=True)
    s = geo.add_parser("build")
    nq(s, 2, 2)
    s.add_argument("--out")
    s.set_defaults(func=cmd_geometry_build)
    s = geo.add_parser("check")
    nq(s)
    s.add_argument("--file")
    s.add_argument("--axioms", choices=["pg", "polar"], default="pg")
    s.set_defaults(func=cmd_geometry_check)

    polar = top.add_parser("polar").add_subparsers(dest="action", required=True)
    for name, func in (("build", cmd_polar_build), ("check", cmd_polar_check)):
        s = polar.add_parser(name)
        nq(s)
        s.add_argument("--form")
        s.add_argument("--family", choices=["sp", "o", "u"])
        s.add_argument("--file")
        s.add_argument("--example", choices=["grid", "a32"])
        if name == "build":
            s.add_argument("--out")
        s.set_defaults(func=func)
    s = polar.add_parser("oriflamme")
    s.add_argument("--q", type=int, default=2)
    s.set_defaults(func=cmd_polar_oriflamme)

    forms = top.add_parser("forms").add_subparsers(dest="action", required=True)
    for name, func in (("classify", cmd_forms_classify), ("witt", cmd_forms_witt),
                       ("reduce", cmd_forms_reduce), ("paramcheck", cmd_forms_paramcheck)):
        s = forms.add_parser(name)
        s.add_argument("--file", required=True)
        s.set_defaults(func=func)

    group = top.add_parser("group").add_subparsers(dest="action", required=True)
    for name, func in (("order", cmd_group_order), ("transitivity", cmd_group_transitivity),
                       ("perfect", cmd_group_perfect), ("simple", cmd_group_simple)):
        s = group.add_parser(name)
        s.add_argument("--name", help='e.g. "psl(2,7)"')
        s.add_argument("--gens", help='images separated by ";", e.g. "1 0 2;0 2 1"')
        s.set_defaults(func=func)
    s = group.add_parser("iso")
    s.add_argument("--a", required=True)
    s.add_argument("--b", required=True)
    s.set_defaults(func=cmd_group_iso)

    classical = top.add_parser("classical").add_subparsers(dest="action", required=True)
    s = classical.add_parser("build")
    s.add_argument("--group", choices=["el", "sl", "gl", "pel", "pgl", "sp", "o", "u"], default="el")
    nq(s, 2, 2)
    s.add_argument("--form")
    s.set_defaults(func=cmd_classical_build)
    s = classical.add_parser("steinberg")
    nq(s, 3, 2)
    s.add_argument("--quaternion", action="store_true")
    s.add_argument("--samples", type=int, default=200)
    s.set_defaults(func=cmd_classical_steinberg)
    s = classical.add_parser("det")
    s.add_argument("--q", type=int, default=2)
    s.add_argument("--quaternion", action="store_true")
    s.add_argument("--matrix", required=True, help='rows separated by ";"')
    s.set_defaults(func=cmd_classical_det)
    s = classical.add_parser("moufang")
    s.add_argument("--q", type=int, default=2)
    s.add_argument("--level", choices=["EL", "GL"], default="GL")
    s.set_defaults(func=cmd_classical_moufang)
    s = classical.add_parser("reconstruct")
    s.add_argument("--name", default="pel(3,2)")
    s.set_defaults(func=cmd_classical_reconstruct)

    building = top.add_parser("building").add_subparsers(dest="action", required=True)
    for name, func, n_default in (("flags", cmd_building_flags, 2), ("apartment", cmd_building_apartment, 2),
                                  ("tits", cmd_building_tits, 2), ("roots", cmd_building_roots, 2)):
        s = building.add_parser(name)
        nq(s, n_default, 2)
        if name == "flags":
            s.add_argument("--out")
        s.set_defaults(func=func)

    s = top.add_parser("verify")
    s.add_argument("--suite", default="paper")
    s.add_argument("--only", help="comma-separated criterion numbers")
    s.set_defaults(func=cmd_verify)
    return p


def _inputs(args):
    skip = {"func", "area", "action", "human", "timing"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None and v is not False}


def _write(report, human):
    sys.stdout.write(json.dumps(report, indent=2, sort_keys=True, default=str) + "\n")
    if human:
        status = report.get("passed")
        line = f"{report['command']}: " + ("PASS" if status else "FAIL" if status is False else "ERROR")
        if "error" in report:
            line += f" ({report['error']['message']})"
        print(line, file=sys.stderr)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except InputError as exc:
        raw = list(sys.argv[1:] if argv is None else argv)
        report = {"schema": SCHEMA, "version": __version__, "command": None, "inputs": {"argv": raw},
                  "error": {"kind": "input", "message": str(exc)}}
        _write(report, "--human" in raw)
        return 2
    command = args.area + (f" {args.action}" if getattr(args, "action", None) else "")
    report = {"schema": SCHEMA, "version": __version__, "command": command, "inputs": _inputs(args)}
    budget.counters.clear()
    try:
        active = budget.Budget.from_env()
    except ValueError as exc:
        report["error"] = {"kind": "input", "message": f"GEOMFORGE_BUDGET: {exc}"}
        _write(report, args.human)
        return 2
    t0 = time.perf_counter()
    code = 0
    try:
        with budget.use(active):
            results, passed = args.func(args)
        report["results"] = results
        report["passed"] = bool(passed)
        code = 0 if passed else 1
    except budget.BudgetExceeded as exc:
        report["error"] = {"kind": "budget", "message": str(exc), "budget": exc.kind}
        code = 3
    except (InputError, NamedGroupError, fm.FormError, cl.ClassicalError, pol.PolarError,
            bd.BuildingError, ValueError) as exc:
        report["error"] = {"kind": "input", "message": str(exc)}
        code = 2
    report["budget"] = {"limits": active.as_dict(), "peak": dict(sorted(budget.counters.items()))}
    if args.timing:
        report["seconds"] = round(time.perf_counter() - t0, 3)
    _write(report, args.human)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
