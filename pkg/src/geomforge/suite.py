"""The verification suite: ten checks, each with a runtime ceiling.

Every check returns ``(ok, details)``; ``run_suite`` adds timing and turns a
blown ceiling into a failure.
"""

from __future__ import annotations

import itertools
import random
import time

from . import building as bd
from . import classical as cl
from . import forms as fm
from . import matvec as mv
from . import permgrp as pg
from . import polar as pol
from .named import parse_named_group
from .projgeom import build_pg, check_pg_axioms
from .scalar import GF, H, Quaternion

ISO_TABLE = [
    ("psl(2,2)", "sym(3)"),
    ("psl(2,3)", "alt(4)"),
    ("psl(2,4)", "alt(5)"),
    ("psl(2,5)", "alt(5)"),
    ("psl(2,4)", "psl(2,5)"),
    ("psl(2,7)", "psl(3,2)"),
    ("psl(2,9)", "alt(6)"),
    ("psl(4,2)", "alt(8)"),
]


def check_isomorphisms(seed=0):
    rows = []
    ok = True
    for a, b in ISO_TABLE:
        r = pg.iso_small(parse_named_group(a)[0], parse_named_group(b)[0])
        if r["isomorphic"]:
            G, Hh = parse_named_group(a)[0], parse_named_group(b)[0]
            r["verified"] = pg.verify_isomorphism(G, Hh, r["generators"], r["images"])
        ok &= r["isomorphic"] and r.get("verified", False)
        rows.append({"a": a, "b": b, "isomorphic": r["isomorphic"], "verified": r.get("verified", False)})
    A, B = parse_named_group("psl(3,4)")[0], parse_named_group("psl(4,2)")[0]
    r = pg.iso_small(A, B)
    orders = [A.order(), B.order()]
    ok &= (not r["isomorphic"]) and orders == [20160, 20160]
    rows.append({"a": "psl(3,4)", "b": "psl(4,2)", "isomorphic": r["isomorphic"], "orders": orders,
                 "separated_by": r.get("invariant")})
    return ok, {"pairs": rows}


def check_perfectness(seed=0):
    expect = {"psl(2,2)": False, "psl(2,3)": False}
    for q in (4, 5, 7, 9):
        expect[f"psl(2,{q})"] = True
    for q in (2, 3):
        expect[f"pel(3,{q})"] = True
    got = {name: parse_named_group(name)[0].is_perfect() for name in expect}
    return got == expect, {"perfect": got}


def check_steinberg_suite(seed=0):
    reports = {}
    ok = True
    for n in (3, 4):
        for q in (2, 3, 5):
            r = cl.check_steinberg(n, GF(q))
            reports[f"n={n},q={q}"] = {k: r[k]["status"] for k in ("SR1", "SR2", "SR3")} | {
                "conventions": r["SR3"]["conventions_holding"]}
            ok &= r["all_pass"]
    r = cl.check_steinberg(3, H, samples=200, rng=random.Random(seed))
    reports["H,n=3"] = {k: r[k]["status"] for k in ("SR1", "SR2", "SR3")} | {
        "conventions": r["SR3"]["conventions_holding"], "pairs": r["pairs"]}
    ok &= r["all_pass"] and r["pairs"] >= 200 and r["SR3"]["conventions_holding"] == ["+ab"]
    return ok, reports


def _random_transvection_H(rng, n):
    while True:
        u = [H.random(rng) for _ in range(n)]
        if H.is_zero(u[-1]):
            continue
        rho = [H.random(rng) for _ in range(n - 1)]
        acc = H.zero
        for r, x in zip(rho, u):
            acc = acc + r * x
        rho.append(-(acc * u[-1].inverse()))
        if any(rho):
            return cl.transvection(H, tuple(u), tuple(rho))


def check_dieudonne(seed=0):
    rng = random.Random(seed)
    fields = [GF(q) for q in (2, 3, 4, 5, 7, 8, 9)]
    mism = 0
    singular = 0
    for _ in range(10**4):
        F = rng.choice(fields)
        n = rng.randint(1, 4)
        M = tuple(tuple(F.random(rng) for _ in range(n)) for _ in range(n))
        d = cl.determinant(F, M)
        if d == F.zero:
            singular += 1
            try:
                cl.dieudonne_det(F, M)
                mism += 1
            except cl.ClassicalError:
                pass
        elif cl.dieudonne_det(F, M) != d:
            mism += 1
    mult_bad = 0
    done = 0
    while done < 100:
        M = tuple(tuple(H.random(rng) for _ in range(3)) for _ in range(3))
        N = tuple(tuple(H.random(rng) for _ in range(3)) for _ in range(3))
        try:
            dm, dn = cl.dieudonne_det(H, M), cl.dieudonne_det(H, N)
            dmn = cl.dieudonne_det(H, mv.mat_mul(H, M, N))
        except cl.ClassicalError:
            continue
        done += 1
        if dmn.norm() != dm.norm() * dn.norm():
            mult_bad += 1
    trans_bad = sum(
        1 for _ in range(100) if cl.dieudonne_det(H, _random_transvection_H(rng, 3)).norm() != 1
    )
    ok = mism == 0 and mult_bad == 0 and trans_bad == 0
    return ok, {"finite_mismatches": mism, "finite_singular": singular, "quaternion_norm_failures": mult_bad,
                "transvection_norm_failures": trans_bad}


def check_o5_sp4(seed=0):
    F = GF(2)
    pq = fm.o5_example(F)
    slight = pq.is_slightly_degenerate()
    red = fm.reduce_slightly_degenerate(pq)
    std = fm.symplectic_form(F, 2)
    standard = red.reduced.h.gram == std.h.gram and fm.classify_form_case(red.reduced.param).case == "Symplectic"
    iso_src, iso_red = pq.isotropic_points(), red.reduced.isotropic_points()
    images = {mv.normalize_point(F, red.project(p)) for p in iso_src}
    O = cl.build_unitary(pq, method="filter")
    S = cl.build_unitary(std, method="filter")
    GO, GS = O.point_group(), S.point_group()
    iso = pg.iso_small(GO, GS)
    verified = iso["isomorphic"] and pg.verify_isomorphism(GO, GS, iso["generators"], iso["images"])
    ok = (slight and standard and len(iso_src) == len(iso_red) == 15 and images == set(iso_red)
          and O.order() == S.order() == 720 and verified)
    return ok, {"slightly_degenerate": slight, "reduced_is_standard_symplectic": standard,
                "isotropic_points": [len(iso_src), len(iso_red)], "projection_bijective": images == set(iso_red),
                "orders": [O.order(), S.order()], "point_action_orders": [GO.order(), GS.order()],
                "isomorphic": verified}


def check_tits(seed=0):
    out = {}
    ok = True
    for n, q, cells in ((2, 2, 6), (2, 3, 6), (3, 2, 24)):
        ts = bd.extract_tits_system(n, GF(q))
        r = bd.verify_tits(ts)
        good = r["all_pass"] and r["bruhat"]["cells"] == cells
        ok &= good
        out[f"EL({n + 1},{q})"] = {k: r[k]["status"] for k in ("TS1", "TS2", "TS3", "TS4", "TS5", "bruhat", "splitting", "coxeter")} | {
            "cells": r["bruhat"]["cells"], "orders": r["orders"]}
    return ok, out


def check_axiom_suites(seed=0):
    out = {}
    ok = True
    for n, q in ((2, 2), (2, 3), (3, 2)):
        r = check_pg_axioms(build_pg(n, GF(q)).point_line())
        out[f"PG({n},{q})"] = r["all_pass"]
        ok &= r["all_pass"]
    for q in (2, 3):
        r = pol.check_polar_axioms(pol.build_polar(fm.symplectic_form(GF(q), 2)))
        out[f"Sp4({q})"] = {"all_pass": r["all_pass"], "thickness": r["thickness"]}
        ok &= r["all_pass"] and r["thickness"] == "thick"
    for label, P in (("grid", pol.grid_geometry(3, 3)), ("A32(2)", pol.build_a32(GF(2)))):
        r = pol.check_polar_axioms(P)
        two = pol.planes_per_line(P) == [2]
        out[label] = {"PS1-PS4": r["weak_polar_space"], "PS5": r["PS5"]["status"], "thickness": r["thickness"],
                      "exactly_two": two}
        ok &= r["weak_polar_space"] and r["thickness"] == "weak" and two
    iso = pol.a32_oriflamme_isomorphism(GF(2))
    out["oriflamme"] = iso
    ok &= iso["isomorphic"] and iso["chambers"] == [315, 315]
    return ok, out


def check_moufang_suite(seed=0):
    out = {}
    ok = True
    for q in (2, 3, 4, 5, 7):
        r = cl.check_moufang(cl.moufang_set_projective_line(GF(q)))
        out[f"PGL2({q})"] = {k: r[k]["status"] for k in ("MS1", "MS2", "MS3")} | {"unique": r["unique_and_equal_to_U"]}
        ok &= r["all_pass"] and (q not in (4, 5, 7) or r["unique_and_equal_to_U"])
    for q in (2, 3):
        G = cl.build_PGL(3, GF(q)).perm_group
        found = len(pg.regular_normal_subgroups(G, 0))
        out[f"PGL3({q})_regular_normal"] = found
        ok &= found == 0
        L = cl.reconstruct_lines(G)
        same = L.same_incidence(build_pg(2, GF(q)).point_line())
        out[f"reconstruct_PG(2,{q})"] = same
        ok &= same
    return ok, out


def _random_invertible(F, n, rng):
    while True:
        g = tuple(tuple(F.random(rng) for _ in range(n)) for _ in range(n))
        try:
            mv.mat_inv(F, g)
            return g
        except ValueError:
            pass


def check_witt(seed=0):
    rng = random.Random(seed)
    plan = []
    for F in (GF(2), GF(3), GF(4)):
        cases = ["Symplectic", "Orthogonal"] + (["ClassicalUnitary"] if F.k % 2 == 0 else [])
        plan.append((F, cases))
    counts = {}
    bad = []
    made = 0
    while made < 50:
        F, cases = plan[made % 3]
        case = cases[(made // 3) % len(cases)]
        n = rng.choice([2, 4]) if case == "Symplectic" else rng.randint(2, 4)
        try:
            pq = fm.random_form(F, case, n, rng)
        except fm.FormError:
            continue
        made += 1
        got = fm.classify_form_case(pq.param).case
        dec = fm.witt_decompose(pq)
        chk = dec.check()
        m = fm.witt_index(pq)
        inv = all(fm.witt_index(pq.pullback(_random_invertible(F, n, rng))) == m for _ in range(20))
        key = f"{case}/GF({F.q})"
        counts[key] = counts.get(key, 0) + 1
        if not (chk["all_pass"] and inv and dec.index == m and got == case):
            bad.append({"case": case, "q": F.q, "n": n, "check": chk, "invariant": inv, "classified": got})
    return not bad, {"forms": made, "by_case": counts, "failures": bad[:3]}


def _exhaustive_grassmannian_counts(F, n):
    """Distinct spans of all vector tuples, grown one vector at a time."""
    vecs = list(mv.enumerate_vectors(F, n))
    level = {mv.zero_subspace(F, n)}
    counts = [1]
    for k in range(1, n + 1):
        nxt = set()
        for U in level:
            for v in vecs:
                W = mv.join(U, mv.span(F, [v], n))
                if W.dim == k:
                    nxt.add(W)
        counts.append(len(nxt))
        level = nxt
    return counts


def check_oracles(seed=0):
    groups = {}
    for name in ("sym(3)", "alt(4)", "alt(5)", "alt(6)", "psl(2,2)", "psl(2,3)", "psl(2,4)", "psl(2,5)",
                 "psl(2,7)", "psl(2,9)", "psl(3,2)", "pel(3,2)", "sp(4,2)"):
        groups[name] = parse_named_group(name)[0]
    for q in (2, 3, 4, 5, 7):
        ms = cl.moufang_set_projective_line(GF(q))
        groups[f"PGL2({q}) on the line"] = ms.G
    groups["PGL3(2)"] = cl.build_PGL(3, GF(2)).perm_group
    groups["O5(2) points"] = cl.build_unitary(fm.o5_example(GF(2)), method="backtrack").point_group()
    for n, q in ((2, 2), (2, 3), (3, 2)):
        ts = bd.extract_tits_system(n, GF(q))
        for lab, G in (("B", ts.B), ("N", ts.N), ("T", ts.T), ("U", ts.U)):
            groups[f"{lab} of EL({n + 1},{q})"] = G
        if ts.G.order() <= 5000:
            groups[f"EL({n + 1},{q}) on chambers"] = ts.G
    rows = {}
    ok = True
    for name, G in groups.items():
        o = G.order()
        if o > 5000:
            continue
        b = pg.brute_force_order(G, limit=5000)
        rows[name] = [o, b]
        ok &= o == b
    grass = {}
    for n in range(1, 5):
        for q in (2, 3):
            F = GF(q)
            ex = _exhaustive_grassmannian_counts(F, n)
            enum = [len(mv.enumerate_grassmannian(n, k, F)) for k in range(n + 1)]
            formula = [mv.gaussian_binomial(n, k, q) for k in range(n + 1)]
            grass[f"n={n},q={q}"] = ex
            ok &= ex == enum == formula
    return ok, {"orders": rows, "grassmannians": grass}


CRITERIA = {
    1: ("exceptional isomorphisms", check_isomorphisms, 300),
    2: ("perfectness", check_perfectness, 30),
    3: ("Steinberg relations", check_steinberg_suite, 30),
    4: ("Dieudonne determinant", check_dieudonne, 60),
    5: ("O(5,2) and Sp(4,2)", check_o5_sp4, 120),
    6: ("Tits systems", check_tits, 180),
    7: ("axiom suites", check_axiom_suites, 120),
    8: ("Moufang sets and reconstruction", check_moufang_suite, 120),
    9: ("Witt machinery", check_witt, 120),
    10: ("oracle equivalences", check_oracles, 120),
}


def run_criterion(number, seed=0) -> dict:
    title, fn, limit = CRITERIA[number]
    t0 = time.perf_counter()
    ok, details = fn(seed=seed)
    seconds = time.perf_counter() - t0
    return {
        "criterion": number,
        "title": title,
        "checks_pass": bool(ok),
        "seconds": round(seconds, 3),
        "limit_seconds": limit,
        "passed": bool(ok) and seconds < limit,
        "details": details,
    }


def run_suite(select=None, seed=0) -> list:
    numbers = sorted(CRITERIA) if select is None else sorted(select)
    return [run_criterion(k, seed) for k in numbers]
