"""Flag complexes, apartments, Tits systems of EL_{n+1}(F), Weyl groups and
the A_n root system."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from . import budget
from . import matvec as mv
from . import permgrp as pg
from .classical import tau


class BuildingError(ValueError):
    pass


# ---------------------------------------------------------------------------
# flag complexes

class FlagComplex:
    """Typed vertices with a symmetric incidence; simplices are cliques.

    ``types[v]`` lies in ``range(rank)`` and a chamber has one vertex of
    every type.
    """

    def __init__(self, labels, types, incident, rank):
        self.labels = list(labels)
        self.types = list(types)
        self.rank = rank
        n = len(self.labels)
        self.adj = [set() for _ in range(n)]
        for a, b in incident:
            if a != b:
                self.adj[a].add(b)
                self.adj[b].add(a)
        self.index = {lab: i for i, lab in enumerate(self.labels)}
        self._chambers = None

    def __repr__(self):
        return f"FlagComplex(rank={self.rank}, vertices={len(self.labels)})"

    def vertices_of_type(self, t):
        return [v for v, s in enumerate(self.types) if s == t]

    def edges(self):
        return sorted((a, b) for a in range(len(self.labels)) for b in self.adj[a] if a < b)

    def chambers(self):
        """Sorted vertex tuples, one vertex per type, pairwise incident."""
        if self._chambers is None:
            by_type = [self.vertices_of_type(t) for t in range(self.rank)]
            meter = budget.Meter("enumeration")
            out = []

            def rec(chosen, t):
                if t == self.rank:
                    out.append(tuple(sorted(chosen)))
                    return
                for v in by_type[t]:
                    meter.step()
                    if all(v in self.adj[c] for c in chosen):
                        chosen.append(v)
                        rec(chosen, t + 1)
                        chosen.pop()

            rec([], 0)
            self._chambers = sorted(out)
        return self._chambers

    def every_simplex_in_chamber(self):
        """Every clique extends to a chamber (checked on all cliques)."""
        chambers = [frozenset(c) for c in self.chambers()]
        n = len(self.labels)

        def cliques(start, current):
            yield current
            for v in range(start, n):
                if all(v in self.adj[c] for c in current) and all(self.types[v] != self.types[c] for c in current):
                    yield from cliques(v + 1, current + [v])

        return all(any(set(s) <= c for c in chambers) for s in cliques(0, []))

    def chamber_graph(self):
        """Chambers adjacent when they share all but one vertex."""
        chambers = self.chambers()
        panels: dict = {}
        for i, c in enumerate(chambers):
            for k in range(len(c)):
                panels.setdefault(c[:k] + c[k + 1:], []).append(i)
        adj = {i: set() for i in range(len(chambers))}
        for members in panels.values():
            for a, b in itertools.combinations(members, 2):
                adj[a].add(b)
                adj[b].add(a)
        return adj

    def is_gallery_connected(self):
        adj = self.chamber_graph()
        if not adj:
            return True
        seen, stack = {0}, [0]
        while stack:
            for j in adj[stack.pop()]:
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        return len(seen) == len(adj)

    def panel_counts(self):
        """Multiset of the number of chambers on each panel."""
        panels: dict = {}
        for c in self.chambers():
            for k in range(len(c)):
                key = c[:k] + c[k + 1:]
                panels[key] = panels.get(key, 0) + 1
        return sorted(set(panels.values()))

    def is_isomorphism(self, other: "FlagComplex", vmap) -> bool:
        """``vmap`` (label -> label) is a bijection carrying incidence exactly."""
        if len(vmap) != len(self.labels) or len(other.labels) != len(self.labels):
            return False
        try:
            image = [other.index[vmap[lab]] for lab in self.labels]
        except KeyError:
            return False
        if len(set(image)) != len(image):
            return False
        mine = {(min(image[a], image[b]), max(image[a], image[b])) for a, b in self.edges()}
        return mine == set(other.edges())

    def to_edge_list(self):
        out = [f"v {i} {self.types[i]}" for i in range(len(self.labels))]
        out += [f"e {a} {b}" for a, b in self.edges()]
        return "\n".join(out) + "\n"


def _inclusion_complex(levels, contains):
    """``levels`` is a list of vertex lists by type; incidence by inclusion."""
    labels, types = [], []
    for t, vs in enumerate(levels):
        for v in vs:
            labels.append((t, v))
            types.append(t)
    start = [0]
    for vs in levels:
        start.append(start[-1] + len(vs))
    inc = []
    for s, t in itertools.combinations(range(len(levels)), 2):
        for i, a in enumerate(levels[s]):
            for j, b in enumerate(levels[t]):
                if contains(b, a):
                    inc.append((start[s] + i, start[t] + j))
    return FlagComplex(labels, types, inc, len(levels))


def flag_complex(geom) -> FlagComplex:
    """Delta of a projective geometry (vertices are subspaces of PG(V)) or of
    a polar space (vertices are its singular subspaces)."""
    from .polar import PolarSpace
    from .projgeom import ProjectiveGeometry

    if isinstance(geom, ProjectiveGeometry):
        levels = [geom.grass[k] for k in range(1, geom.n + 1)]
        return _inclusion_complex(levels, lambda big, small: small.issubspace(big))
    if isinstance(geom, PolarSpace):
        subs = geom.subspaces()
        levels = [sorted(sorted(x) for x in subs[r]) for r in range(geom.rank)]
        levels = [[tuple(x) for x in lv] for lv in levels]
        return _inclusion_complex(levels, lambda big, small: set(small) <= set(big))
    raise BuildingError(f"no flag complex for {type(geom).__name__}")


# ---------------------------------------------------------------------------
# apartments

@dataclass
class Apartment:
    frame: list
    vertices: dict
    F: object

    @property
    def n(self):
        return len(self.frame) - 1

    def chambers(self):
        """One chamber per ordering of the frame: V_{p0} < V_{p0,p1} < ..."""
        out = set()
        for perm in itertools.permutations(range(self.n + 1)):
            out.add(tuple(self.vertices[frozenset(perm[: k + 1])] for k in range(self.n)))
        return sorted(out)

    def contains_chamber(self, chamber) -> bool:
        vs = set(self.vertices.values())
        return all(U in vs for U in chamber)

    def vertex_set(self):
        return frozenset(self.vertices.values())


def apartment(F, frame) -> Apartment:
    """The apartment spanned by the points ``p_i = frame[i] D``."""
    frame = [tuple(v) for v in frame]
    n1 = len(frame)
    if mv.span(F, frame).dim != n1 or any(len(v) != n1 for v in frame):
        raise BuildingError("a frame needs n+1 vectors forming a basis")
    verts = {}
    for k in range(1, n1):
        for J in itertools.combinations(range(n1), k):
            verts[frozenset(J)] = mv.span(F, [frame[j] for j in J])
    return Apartment(frame, verts, F)


def standard_chamber(F, n1):
    e = mv.identity(F, n1)
    return tuple(mv.span(F, e[: k + 1]) for k in range(n1 - 1))


def common_frame(F, C, D):
    """A frame whose apartment contains the chambers C and D (nested flags).

    For each step C_{i-1} < C_i take the first D_j with C_i meeting D_j
    outside C_{i-1}, and pick a vector of C_i meet D_j avoiding
    C_{i-1} + (C_i meet D_{j-1}).
    """
    n1 = C[0].n
    zero = mv.zero_subspace(F, n1)
    full = mv.full_subspace(F, n1)
    Cs = [zero] + list(C) + [full]
    Ds = [zero] + list(D) + [full]
    frame = []
    for i in range(1, n1 + 1):
        for j in range(1, n1 + 1):
            X = mv.meet(Cs[i], Ds[j])
            avoid = mv.join(Cs[i - 1], mv.meet(Cs[i], Ds[j - 1]))
            if not X.issubspace(avoid):
                v = next(v for v in X.vectors() if not avoid.contains_vector(v))
                frame.append(v)
                break
    A = apartment(F, frame)
    if not (A.contains_chamber(C) and A.contains_chamber(D)):
        raise BuildingError("frame construction failed")
    return frame


def apartments_through(F, n1, chamber):
    """All apartments (unordered frames of points) containing ``chamber``."""
    pts = mv.enumerate_points(F, n1)
    budget.require("enumeration", len(pts) ** n1)
    seen = set()
    out = []
    for combo in itertools.combinations(pts, n1):
        if mv.span(F, list(combo)).dim != n1:
            continue
        A = apartment(F, combo)
        key = A.vertex_set()
        if key in seen:
            continue
        seen.add(key)
        if A.contains_chamber(chamber):
            out.append(A)
    return out


# ---------------------------------------------------------------------------
# Weyl groups

def coxeter_matrix_An(n):
    return [[1 if i == j else (3 if abs(i - j) == 1 else 2) for j in range(n)] for i in range(n)]


def coxeter_check(gens, m):
    """Check (s_i s_j)^{m_ij} = 1 on permutations and compare the order of the
    abstract Coxeter group (coset enumeration) with the permutation group."""
    from sympy.combinatorics.fp_groups import FpGroup
    from sympy.combinatorics.free_groups import free_group

    n = len(gens)
    rel_ok = True
    failures = []
    for i in range(n):
        for j in range(n):
            x = pg.compose(gens[i], gens[j])
            if not pg.is_identity(pg.power(x, m[i][j])) or (m[i][j] > 1 and pg.perm_order(x) != m[i][j]):
                rel_ok = False
                failures.append([i, j])
    free, *syms = free_group(", ".join(f"s{i}" for i in range(n)))
    rels = []
    for i in range(n):
        for j in range(i, n):
            rels.append((syms[i] * syms[j]) ** m[i][j])
    abstract = FpGroup(free, rels).order()
    concrete = pg.PermGroup(gens).order()
    return {
        "relations_hold": rel_ok,
        "failures": failures,
        "coxeter_order": int(abstract),
        "group_order": concrete,
        "presentation_ok": rel_ok and int(abstract) == concrete,
    }


def weyl_group(n):
    """Sym(n+1) generated by s_i = (i, i+1) with a Coxeter certificate."""
    gens = [pg.from_cycles(n + 1, [[i, i + 1]]) for i in range(n)]
    W = pg.PermGroup(gens, n + 1)
    return W, coxeter_check(gens, coxeter_matrix_An(n))


# ---------------------------------------------------------------------------
# Tits systems

def _monomial(F, n1, i):
    """Matrix swapping e_i and e_{i+1} with a sign so the determinant is 1."""
    M = [list(r) for r in mv.identity(F, n1)]
    M[i][i] = M[i + 1][i + 1] = F.zero
    M[i + 1][i] = F.one
    M[i][i + 1] = F.neg(F.one)
    return tuple(tuple(r) for r in M)


@dataclass
class TitsSystemData:
    n: int
    F: object
    chambers: list
    G: pg.PermGroup
    B: pg.PermGroup
    N: pg.PermGroup
    T: pg.PermGroup
    U: pg.PermGroup
    S: list          # permutations of chambers representing s_1..s_n in N
    W: pg.PermGroup  # N acting on the standard apartment
    S_W: list
    matrices: dict


def extract_tits_system(n, F) -> TitsSystemData:
    """B, N, T, U of EL_{n+1}(F) realized in the action on chambers of PG(F^{n+1})."""
    n1 = n + 1
    budget.require("group_order", mv.gl_order(n1, F.q))
    geom_levels = [mv.enumerate_grassmannian(n1, k, F) for k in range(1, n1)]
    # chambers as nested flags
    chambers = []

    def rec(flag, k):
        if k == n1 - 1:
            chambers.append(tuple(flag))
            return
        for W in geom_levels[k]:
            if not flag or flag[-1].issubspace(W):
                rec(flag + [W], k + 1)

    rec([], 0)
    budget.require("enumeration", len(chambers))
    chambers.sort()
    index = {c: i for i, c in enumerate(chambers)}

    def perm(g):
        return tuple(index[tuple(mv.apply_matrix(F, g, U) for U in c)] for c in chambers)

    basis = F.additive_basis()
    upper = [tau(F, n1, i, j, a) for i in range(n1) for j in range(i + 1, n1) for a in basis]
    lower = [tau(F, n1, j, i, a) for i in range(n1) for j in range(i + 1, n1) for a in basis]
    diag = []
    if F.q > 2:
        for i in range(n):
            d = [F.one] * n1
            d[i], d[i + 1] = F.primitive, F.inv(F.primitive)
            diag.append(mv.diagonal(F, d))
    swaps = [_monomial(F, n1, i) for i in range(n)]
    deg = len(chambers)
    G = pg.PermGroup([perm(g) for g in upper + lower], deg)
    U = pg.PermGroup([perm(g) for g in upper], deg)
    T = pg.PermGroup([perm(g) for g in diag], deg)
    B = pg.PermGroup([perm(g) for g in upper + diag], deg)
    S = [perm(s) for s in swaps]
    N = pg.PermGroup(S + [perm(g) for g in diag], deg)

    # W: N acting on the vertices of the standard apartment
    std = apartment(F, mv.identity(F, n1))
    avs = sorted(std.vertices.values())
    aidx = {U_: i for i, U_ in enumerate(avs)}

    def wperm(g):
        return tuple(aidx[mv.apply_matrix(F, g, U_)] for U_ in avs)

    S_W = [wperm(s) for s in swaps]
    W = pg.PermGroup(S_W + [wperm(g) for g in diag], len(avs))
    return TitsSystemData(
        n, F, chambers, G, B, N, T, U, S, W, S_W,
        {"upper": upper, "diag": diag, "swaps": swaps},
    )


def _intersection_order(small: pg.PermGroup, big: pg.PermGroup):
    return sum(1 for g in small.elements() if big.contains(g))


def verify_tits(ts: TitsSystemData) -> dict:
    """TS1-TS5, Bruhat decomposition on chambers, Coxeter check of W and B = T U."""
    G, B, N, T, U = ts.G, ts.B, ts.N, ts.T, ts.U
    rep = {}
    C = ts.chambers.index(standard_chamber(ts.F, ts.n + 1))
    stabC = G.stabilizer(C)
    rep["B_is_flag_stabilizer"] = B.order() == stabC.order() and B.is_subgroup_of(stabC)

    BN = pg.PermGroup(B.gens + N.gens, G.degree)
    rep["TS1"] = {"status": "pass" if BN.order() == G.order() else "fail"}

    bn = _intersection_order(N, B)
    ts2 = T.is_subgroup_of(B) and T.is_subgroup_of(N) and bn == T.order() and T.is_normal_in(N)
    rep["TS2"] = {"status": "pass" if ts2 else "fail", "order_T": T.order(), "order_B_meet_N": bn}

    sq = all(T.contains(pg.compose(s, s)) for s in ts.S)
    Wn = N.order() // T.order()
    genW = pg.PermGroup(ts.S_W, ts.W.degree).order() == ts.W.order() == Wn
    rep["TS3"] = {"status": "pass" if sq and genW else "fail", "order_W": Wn}

    # TS4: sBs != B (s is an involution modulo T, so sBs^-1 = sBs)
    ts4 = all(any(not B.contains(pg.conjugate(s, b)) for b in B.gens) for s in ts.S)
    rep["TS4"] = {"status": "pass" if ts4 else "fail", "form": "sBs != B"}

    # Bruhat cells as B-orbits of chambers; w runs through W via words in S
    orbit_of = {}
    orbits = B.orbits()
    for k, o in enumerate(orbits):
        for x in o:
            orbit_of[x] = k
    wreps = {pg.identity(ts.W.degree): pg.identity(G.degree)}
    frontier = list(wreps.items())
    while frontier:
        nxt = []
        for w, g in frontier:
            for sw, sg in zip(ts.S_W, ts.S):
                w2 = pg.compose(sw, w)
                if w2 not in wreps:
                    wreps[w2] = pg.compose(sg, g)
                    nxt.append((w2, wreps[w2]))
        frontier = nxt
    cells = {w: orbit_of[g[C]] for w, g in wreps.items()}
    distinct = len(set(cells.values())) == len(cells)
    rep["bruhat"] = {
        "cells": len(orbits),
        "order_W": len(wreps),
        "status": "pass" if distinct and len(orbits) == len(wreps) else "fail",
        "cell_sizes": sorted(len(o) * B.order() for o in orbits),
        "sizes_sum_to_order": sum(len(o) for o in orbits) * B.order() == G.order(),
    }

    ts5 = None
    for w, g in wreps.items():
        Ow = orbits[cells[w]]
        for sw, sg in zip(ts.S_W, ts.S):
            target = set(Ow) | set(orbits[cells[pg.compose(sw, w)]])
            if any(sg[x] not in target for x in Ow):
                ts5 = ts5 or {"w": list(w), "s": list(sw)}
    rep["TS5"] = {"status": "pass" if ts5 is None else "fail", "witness": ts5}

    ut = _intersection_order(T, U)
    rep["splitting"] = {
        "U_normal_in_B": U.is_normal_in(B) and U.is_subgroup_of(B),
        "U_meet_T_trivial": ut == 1,
        "order_matches": B.order() == T.order() * U.order(),
    }
    rep["splitting"]["status"] = "pass" if all(rep["splitting"].values()) else "fail"
    cox = coxeter_check(ts.S_W, coxeter_matrix_An(ts.n))
    rep["coxeter"] = dict(cox, status="pass" if cox["presentation_ok"] else "fail")
    rep["orders"] = {"G": G.order(), "B": B.order(), "N": N.order(), "T": T.order(), "U": U.order(), "chambers": len(ts.chambers)}
    keys = ("TS1", "TS2", "TS3", "TS4", "TS5", "bruhat", "splitting", "coxeter")
    rep["all_pass"] = rep["B_is_flag_stabilizer"] and all(rep[k]["status"] == "pass" for k in keys)
    return rep


# ---------------------------------------------------------------------------
# root system A_n

class RootSystemAn:
    """Roots e_i - e_j in the sum-zero hyperplane of Q^{n+1}, exact coordinates."""

    def __init__(self, n):
        if n < 1:
            raise BuildingError("A_n needs n >= 1")
        self.n = n
        self.dim = n + 1

    def root(self, i, j):
        v = [Fraction(0)] * self.dim
        v[i] += 1
        v[j] -= 1
        return tuple(v)

    def roots(self):
        return [self.root(i, j) for i in range(self.dim) for j in range(self.dim) if i != j]

    def positive(self):
        return [self.root(i, j) for i in range(self.dim) for j in range(i + 1, self.dim)]

    def fundamental(self):
        return [self.root(i, i + 1) for i in range(self.n)]

    def point(self, i):
        """Projection of e_i to the hyperplane: e_i - v/(n+1)."""
        return tuple(Fraction(int(k == i)) - Fraction(1, self.dim) for k in range(self.dim))

    @staticmethod
    def inner(x, y):
        return sum(a * b for a, b in zip(x, y))

    def reflect(self, x, i, j):
        e = self.root(i, j)
        c = self.inner(x, e)
        return tuple(a - c * b for a, b in zip(x, e))

    def fundamental_coordinates(self, x):
        """Coefficients c with x = sum c_k eps_{k,k+1}: c_k = x_0 + ... + x_k."""
        out, acc = [], Fraction(0)
        for k in range(self.n):
            acc += x[k]
            out.append(acc)
        return out

    def check(self):
        roots = self.roots()
        signs_ok = True
        for r in roots:
            c = self.fundamental_coordinates(r)
            if any(x.denominator != 1 for x in c) or not (all(x >= 0 for x in c) or all(x <= 0 for x in c)):
                signs_ok = False
        pts = [self.point(i) for i in range(self.dim)]
        perm_ok = all(
            sorted(self.reflect(p, i, j) for p in pts) == sorted(pts)
            for i in range(self.dim) for j in range(self.dim) if i != j
        )
        return {
            "roots": len(roots),
            "expected": self.n * (self.n + 1),
            "points_in_hyperplane": all(sum(p) == 0 for p in pts),
            "uniform_signs": signs_ok,
            "reflections_permute_points": perm_ok,
        }


def root_commutator_correspondence(n, F) -> dict:
    """Compare the root-sum criterion with commutators of the U_ij in EL_{n+1}(F)."""
    if n < 2:
        raise BuildingError("needs n >= 2")
    R = RootSystemAn(n)
    n1 = n + 1
    pos = [(i, j) for i in range(n1) for j in range(i + 1, n1)]
    posset = set(R.positive())
    ident = mv.identity(F, n1)
    basis = F.additive_basis()
    rows = []
    agree = True
    for (i, j), (k, l) in itertools.product(pos, repeat=2):
        a_r, b_r = R.root(i, j), R.root(k, l)
        combos = [
            (a, b) for a in range(1, 3) for b in range(1, 3)
            if tuple(a * x + b * y for x, y in zip(a_r, b_r)) in posset
        ]
        commute = all(
            mv.commutator(F, tau(F, n1, i, j, a), tau(F, n1, k, l, b)) == ident
            for a in basis for b in basis
        )
        row = {"ij": [i, j], "kl": [k, l], "root_sum": bool(combos), "commute": commute}
        if len({i, j, k, l}) == 3 and combos:
            # the predicted root group: j == k gives U_il, l == i gives U_kj
            r, s = (i, l) if j == k else (k, j)
            ok = True
            for a in F.nonzero():
                for b in F.nonzero():
                    c = mv.commutator(F, tau(F, n1, i, j, a), tau(F, n1, k, l, b))
                    expect = F.mul(a, b) if j == k else F.neg(F.mul(b, a))
                    if c != tau(F, n1, r, s, expect) or c == ident:
                        ok = False
            row["lands_in"] = [r, s]
            row["predicted_element"] = ok
            agree = agree and ok
        if commute == bool(combos):
            agree = False
        rows.append(row)
    return {"n": n, "field": F.q, "pairs": rows, "agree": agree, "root_system": R.check()}
