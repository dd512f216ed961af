"""Polar spaces: construction from pseudo-quadratic forms, the axioms PS1-PS5,
weak and thick detection, the grid, A_{3,2}(F) and the oriflamme complex."""

from __future__ import annotations

import itertools

from . import budget
from . import forms as fm
from . import matvec as mv
from .projgeom import PointLineGeometry, subspace_closure, subspace_rank


class PolarError(ValueError):
    pass


class PolarSpace:
    """A point-line geometry with its lattice of singular subspaces.

    ``form`` and ``grass`` are set for spaces built from a pseudo-quadratic
    form; abstract examples carry ``labels`` for their points instead.
    """

    def __init__(self, geometry: PointLineGeometry, form=None, grass=None, labels=None, name=""):
        self.geometry = geometry
        self.form = form
        self.grass = grass
        self.labels = labels
        self.name = name
        self._subspaces = None

    def __repr__(self):
        return f"PolarSpace({self.name or 'abstract'}: {len(self.geometry.points)} points, {len(self.geometry.lines)} lines)"

    def subspaces(self):
        """``{rank: [frozenset of point ids]}`` for all non-empty singular subspaces."""
        if self._subspaces is None:
            self._subspaces = singular_subspaces(self.geometry)
        return self._subspaces

    @property
    def rank(self):
        """Polar rank m: one more than the largest projective rank of a subspace."""
        return max(self.subspaces()) + 1

    def maximal_subspaces(self):
        return self.subspaces()[self.rank - 1]


def build_polar(pq: fm.PseudoQuadraticForm) -> PolarSpace:
    """Totally isotropic subspaces of ``pq``; points and lines form the geometry."""
    m = fm.witt_index(pq)
    if m == 0:
        raise PolarError("the form is anisotropic: no isotropic points")
    pts = pq.isotropic_points()
    budget.require("grassmannian", len(pts))
    grass = {1: [mv.span(pq.D, [p]) for p in pts]}
    for k in range(2, m + 1):
        grass[k] = fm.isotropic_grassmannian(pq, k)
    index = {U: i for i, U in enumerate(grass[1])}
    rows = {}
    for li, L in enumerate(grass.get(2, [])):
        rows[li] = sorted(index[mv.span(pq.D, [v])] for v in L.points())
    geom = PointLineGeometry.from_rows(rows, range(len(pts)))
    return PolarSpace(geom, form=pq, grass=grass, name=f"polar(n={pq.n}, q={pq.D.q})")


# ---------------------------------------------------------------------------
# the subspace lattice

def singular_subspaces(G: PointLineGeometry):
    """All non-empty subspaces whose points are pairwise collinear, by rank.

    Grown from single points: a subspace X is extended by each point
    collinear with all of X, then closed.
    """
    meter = budget.Meter("enumeration")
    level = {frozenset([p]) for p in G.points}
    by_rank = {0: sorted(level, key=sorted)}
    r = 0
    while level:
        nxt = set()
        for X in level:
            common = None
            for x in X:
                nb = G.neighbours(x)
                common = set(nb) if common is None else common & nb
            for p in sorted(common - X):
                meter.step()
                Y = subspace_closure(G, X | {p})
                if all(G.collinear(a, b) for a, b in itertools.combinations(sorted(Y), 2)):
                    nxt.add(Y)
        nxt = {Y for Y in nxt if subspace_rank(G, Y) == r + 1}
        if nxt:
            r += 1
            by_rank[r] = sorted(nxt, key=sorted)
        level = nxt
    return by_rank


# ---------------------------------------------------------------------------
# axioms

def _res(ok, witness=None, **extra):
    out = {"status": "pass" if ok else "fail", "witness": None if ok else witness}
    out.update(extra)
    return out


def check_polar_axioms(G) -> dict:
    """Exhaustive PS1-PS5 on a point-line geometry (or a PolarSpace).

    The rank m is one more than the largest projective rank of a singular
    subspace; ``max_subspace_rank`` reports that largest rank itself.  PS5
    passes when every subspace of rank m-2 lies in at least three of rank
    m-1; ``thickness`` is ``weak`` when the minimum is exactly two.
    """
    P = G if isinstance(G, PolarSpace) else PolarSpace(G)
    geo = P.geometry
    rep = {}

    w1 = None
    if len(geo.lines) < 2:
        w1 = {"reason": "fewer than two lines"}
    else:
        short = [l for l in geo.lines if len(geo.line_points[l]) < 3]
        if short:
            w1 = {"reason": "line with fewer than 3 points", "line": short[0]}
        else:
            multi = next(((p, q) for (p, q), ls in sorted(geo.joins().items()) if len(ls) > 1), None)
            if multi:
                w1 = {"reason": "two lines share two points", "points": list(multi), "lines": list(geo.lines_through(*multi))}
    rep["PS1"] = _res(w1 is None, w1)

    w2 = next((p for p in geo.points if len(geo.neighbours(p)) == len(geo.points) - 1), None)
    rep["PS2"] = _res(w2 is None, {"point": w2})

    w3 = None
    counts = set()
    for p in geo.points:
        nb = geo.neighbours(p)
        for l in geo.lines:
            row = geo.line_points[l]
            if p in row:
                continue
            c = sum(1 for x in row if x in nb)
            counts.add("all" if c == len(row) else c)
            if c != 1 and c != len(row) and w3 is None:
                w3 = {"point": p, "line": l, "collinear": c, "line_size": len(row)}
    rep["PS3"] = _res(w3 is None, w3, observed=sorted(counts, key=str))

    if w1 or w3:
        # the lattice is only meaningful once PS1-PS3 hold
        rep["PS4"] = {"status": "skipped", "witness": None}
        rep["PS5"] = {"status": "skipped", "witness": None}
        rep["thickness"] = None
    else:
        subs = P.subspaces()
        top = max(subs)
        m = top + 1
        rep["PS4"] = _res(True, rank=m, max_subspace_rank=top, rank_as_max_minus_one=top - 1)
        rep["rank"] = m
        lower = subs.get(m - 2, [frozenset()]) if m >= 2 else [frozenset()]
        upper = subs[m - 1]
        over = [sum(1 for Y in upper if X <= Y) for X in lower]
        least = min(over) if over else 0
        idx = over.index(least) if over else None
        w5 = {"subspace": sorted(lower[idx]), "contained_in": least} if over else None
        rep["PS5"] = _res(least >= 3, w5, min_containing=least, max_containing=max(over) if over else 0)
        rep["thickness"] = "thick" if least >= 3 else ("weak" if least == 2 else "degenerate")
    keys = ("PS1", "PS2", "PS3", "PS4", "PS5")
    rep["all_pass"] = all(rep[k]["status"] == "pass" for k in keys)
    rep["weak_polar_space"] = all(rep[k]["status"] == "pass" for k in keys[:4]) and rep["thickness"] in ("thick", "weak")
    return rep


# ---------------------------------------------------------------------------
# examples without forms

def grid_geometry(nx=3, ny=3) -> PolarSpace:
    """Points X x Y, lines X and Y; (x, y) lies on line x and on line y."""
    if nx < 1 or ny < 1:
        raise PolarError("grid sides must be non-empty")
    pts = {(x, y): x * ny + y for x in range(nx) for y in range(ny)}
    rows = {}
    for x in range(nx):
        rows[x] = [pts[(x, y)] for y in range(ny)]
    for y in range(ny):
        rows[nx + y] = [pts[(x, y)] for x in range(nx)]
    geom = PointLineGeometry.from_rows(rows, range(nx * ny))
    return PolarSpace(geom, labels=sorted(pts, key=pts.get), name=f"grid({nx}x{ny})")


def build_a32(F) -> PolarSpace:
    """A_{3,2}(F): points Gr_2(F^4), lines the pairs (p, A) with p in A."""
    pts = mv.enumerate_grassmannian(4, 2, F)
    Ps = mv.enumerate_grassmannian(4, 1, F)
    As = mv.enumerate_grassmannian(4, 3, F)
    budget.require("grassmannian", len(pts) + len(Ps) + len(As))
    index = {L: i for i, L in enumerate(pts)}
    rows = {}
    line_labels = []
    for p in Ps:
        for A in As:
            if p.issubspace(A):
                row = [index[L] for L in pts if p.issubspace(L) and L.issubspace(A)]
                rows[len(line_labels)] = sorted(row)
                line_labels.append((p, A))
    geom = PointLineGeometry.from_rows(rows, range(len(pts)))
    P = PolarSpace(geom, labels=pts, name=f"A32({F.q})")
    P.line_labels = line_labels
    P.F = F
    return P


def planes_per_line(P: PolarSpace):
    """Sorted set of the number of maximal subspaces on each rank m-2 subspace."""
    subs = P.subspaces()
    m = P.rank
    lower = subs.get(m - 2, [])
    return sorted({sum(1 for Y in subs[m - 1] if X <= Y) for X in lower})


# ---------------------------------------------------------------------------
# oriflamme

def maximal_classes(P: PolarSpace):
    """Split the maximal subspaces by the graph 'meet in rank m-2'.

    Returns the two classes; raises if the graph is not bipartite.
    """
    m = P.rank
    maxes = P.maximal_subspaces()
    G = P.geometry
    adj = {i: [] for i in range(len(maxes))}
    for i, j in itertools.combinations(range(len(maxes)), 2):
        meet = maxes[i] & maxes[j]
        r = subspace_rank(G, meet) if meet else -1
        if r == m - 2:
            adj[i].append(j)
            adj[j].append(i)
    colour = {}
    for s in range(len(maxes)):
        if s in colour:
            continue
        colour[s] = 0
        stack = [s]
        while stack:
            a = stack.pop()
            for b in adj[a]:
                if b not in colour:
                    colour[b] = 1 - colour[a]
                    stack.append(b)
                elif colour[b] == colour[a]:
                    raise PolarError("maximal subspaces do not split into two classes")
    classes = ([maxes[i] for i in sorted(colour) if colour[i] == 0], [maxes[i] for i in sorted(colour) if colour[i] == 1])
    return classes


def oriflamme_complex(P: PolarSpace):
    """The D_m complex of a weak polar space.

    Vertices are the subspaces of rank other than m-2 (and not empty); two
    are incident when one contains the other or they meet in rank m-2.
    Types: ranks 0..m-3, then one type per class of maximal subspaces.
    """
    from .building import FlagComplex

    rep = check_polar_axioms(P)
    if rep["thickness"] != "weak":
        raise PolarError("the oriflamme complex needs a weak polar space")
    m = P.rank
    subs = P.subspaces()
    G = P.geometry
    c0, c1 = maximal_classes(P)
    labels, types = [], []
    for r in range(m - 2):
        for X in subs[r]:
            labels.append(("sub", tuple(sorted(X))))
            types.append(r)
    for t, cls in ((m - 2, c0), (m - 1, c1)):
        for X in cls:
            labels.append(("max", tuple(sorted(X))))
            types.append(t)
    sets = [frozenset(lab[1]) for lab in labels]
    inc = []
    for a, b in itertools.combinations(range(len(labels)), 2):
        A, B = sets[a], sets[b]
        if A <= B or B <= A:
            inc.append((a, b))
        else:
            meet = A & B
            if meet and subspace_rank(G, meet) == m - 2:
                inc.append((a, b))
    K = FlagComplex(labels, types, inc, m)
    K.class_sizes = (len(c0), len(c1))
    return K


def a32_oriflamme_isomorphism(F):
    """Compare the oriflamme of A_{3,2}(F) with Delta(F^4).

    The map sends a point L of A_{3,2} to L, the maximal subspace of all
    2-spaces through a point p of PG(F^4) to p, and the one of all 2-spaces
    inside a plane A to A.
    """
    from .building import flag_complex
    from .projgeom import build_pg

    P = build_a32(F)
    K = oriflamme_complex(P)
    D = flag_complex(build_pg(3, F))
    pts = P.labels
    Ps = mv.enumerate_grassmannian(4, 1, F)
    As = mv.enumerate_grassmannian(4, 3, F)
    star = {frozenset(i for i, L in enumerate(pts) if p.issubspace(L)): p for p in Ps}
    plane = {frozenset(i for i, L in enumerate(pts) if L.issubspace(A)): A for A in As}
    vmap = {}
    for lab in K.labels:
        kind, ids = lab
        S = frozenset(ids)
        if kind == "sub":
            U = pts[ids[0]]
            vmap[lab] = (1, U)
        elif S in star:
            vmap[lab] = (0, star[S])
        elif S in plane:
            vmap[lab] = (2, plane[S])
        else:
            raise PolarError("maximal subspace of unexpected shape")
    return {
        "vertices": [len(K.labels), len(D.labels)],
        "chambers": [len(K.chambers()), len(D.chambers())],
        "class_sizes": list(K.class_sizes),
        "isomorphic": K.is_isomorphism(D, vmap),
    }
