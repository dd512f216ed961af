"""Projective geometries PG(V), abstract point-line geometries and their axioms."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import budget
from . import matvec as mv


class PointLineGeometry:
    """A finite incidence structure of points and lines.

    Ids are arbitrary sortable values (ints for everything we build).  Each
    line is stored with its sorted point row and each point with its sorted
    pencil of lines.
    """

    def __init__(self, points, lines, incidence):
        points, lines = list(points), list(lines)
        self.points = tuple(sorted(set(points)))
        self.lines = tuple(sorted(set(lines)))
        if len(self.points) != len(points) or len(self.lines) != len(lines):
            raise ValueError("repeated ids")
        pset, lset = set(self.points), set(self.lines)
        inc = set()
        for p, l in incidence:
            if p not in pset or l not in lset:
                raise ValueError(f"incidence ({p}, {l}) names an unknown id")
            inc.add((p, l))
        self.incidence = frozenset(inc)
        rows = {l: [] for l in self.lines}
        pencils = {p: [] for p in self.points}
        for p, l in sorted(inc):
            rows[l].append(p)
            pencils[p].append(l)
        self.line_points = {l: tuple(r) for l, r in rows.items()}
        self.point_lines = {p: tuple(r) for p, r in pencils.items()}
        self._joins = None
        self._neighbours = None

    @classmethod
    def from_rows(cls, rows, points=None):
        """Geometry from ``{line_id: points on it}``."""
        if points is None:
            points = sorted({p for r in rows.values() for p in r})
        inc = [(p, l) for l, r in rows.items() for p in r]
        return cls(points, list(rows), inc)

    def __repr__(self):
        return f"PointLineGeometry({len(self.points)} points, {len(self.lines)} lines)"

    def joins(self):
        """``{(p, q): lines through both}`` for p < q sharing at least one line."""
        if self._joins is None:
            joins: dict = {}
            for l in self.lines:
                row = self.line_points[l]
                for p, q in itertools.combinations(row, 2):
                    joins.setdefault((p, q), []).append(l)
            self._joins = {k: tuple(v) for k, v in joins.items()}
        return self._joins

    def lines_through(self, p, q):
        if p == q:
            return self.point_lines[p]
        key = (p, q) if p < q else (q, p)
        return self.joins().get(key, ())

    def join_line(self, p, q):
        """The unique line through p != q, or None."""
        ls = self.lines_through(p, q)
        return ls[0] if len(ls) == 1 else None

    def neighbours(self, p):
        """Points collinear with ``p`` (excluding p)."""
        if self._neighbours is None:
            nb = {x: set() for x in self.points}
            for (a, b) in self.joins():
                nb[a].add(b)
                nb[b].add(a)
            self._neighbours = {x: frozenset(s) for x, s in nb.items()}
        return self._neighbours[p]

    def collinear(self, p, q):
        return p != q and q in self.neighbours(p)

    def line_sets(self):
        return frozenset(frozenset(r) for r in self.line_points.values())

    def same_incidence(self, other) -> bool:
        """Equal point sets and equal lines as point rows (ids of lines ignored)."""
        return set(self.points) == set(other.points) and self.line_sets() == other.line_sets()

    def to_text(self):
        out = [f"p {p}" for p in self.points]
        out += [f"l {l}" for l in self.lines]
        out += [f"i {p} {l}" for p, l in sorted(self.incidence)]
        return "\n".join(out) + "\n"

    @classmethod
    def from_text(cls, text):
        points, lines, inc = [], [], []

        def ident(tok):
            return int(tok) if tok.lstrip("-").isdigit() else tok

        for lineno, raw in enumerate(text.splitlines(), 1):
            raw = raw.split("#", 1)[0].strip()
            if not raw:
                continue
            parts = raw.split()
            tag = parts[0]
            if tag == "p" and len(parts) == 2:
                points.append(ident(parts[1]))
            elif tag == "l" and len(parts) == 2:
                lines.append(ident(parts[1]))
            elif tag == "i" and len(parts) == 3:
                inc.append((ident(parts[1]), ident(parts[2])))
            else:
                raise ValueError(f"line {lineno}: cannot parse {raw!r}")
        if len(set(points)) != len(points) or len(set(lines)) != len(lines):
            raise ValueError("repeated ids")
        return cls(points, lines, inc)


# ---------------------------------------------------------------------------

class ProjectiveGeometry:
    """PG(F^(n+1)): the Grassmannians Gr_1 .. Gr_n with inclusion as incidence."""

    def __init__(self, n, F):
        if n < 1:
            raise ValueError("projective rank must be at least 1")
        total = sum(mv.gaussian_binomial(n + 1, k, F.q) for k in range(1, n + 1))
        budget.require("grassmannian", total)
        self.n = n
        self.dim = n + 1
        self.F = F
        self.grass = {k: mv.enumerate_grassmannian(n + 1, k, F) for k in range(1, n + 1)}
        self.index = {k: {U: i for i, U in enumerate(us)} for k, us in self.grass.items()}

    @property
    def points(self):
        return self.grass[1]

    def point_index(self, v):
        return self.index[1][mv.span(self.F, [v])]

    def point_line(self) -> PointLineGeometry:
        if self.n < 2:
            raise ValueError("a projective line has no line set to speak of")
        pts = self.grass[1]
        rows = {}
        for li, L in enumerate(self.grass[2]):
            rows[li] = [self.index[1][mv.span(self.F, [v])] for v in L.points()]
        return PointLineGeometry.from_rows(rows, range(len(pts)))

    def incident(self, A, B):
        return mv.incident(A, B)

    def __repr__(self):
        sizes = ", ".join(str(len(self.grass[k])) for k in sorted(self.grass))
        return f"PG({self.n}, {self.F.q}) [{sizes}]"


def build_pg(n, F) -> ProjectiveGeometry:
    return ProjectiveGeometry(n, F)


# ---------------------------------------------------------------------------
# axioms

def _result(ok, witness=None, **extra):
    out = {"status": "pass" if ok else "fail", "witness": None if ok else witness}
    out.update(extra)
    return out


def check_pg_axioms(G: PointLineGeometry) -> dict:
    """Exhaustive check of PG1-PG4; failing axioms carry the smallest witness."""
    report = {}
    short = [l for l in G.lines if len(G.line_points[l]) < 3]
    report["PG1"] = _result(
        not short,
        short and {"line": short[0], "points": list(G.line_points[short[0]])},
    )

    bad_pair = None
    for p, q in itertools.combinations(G.points, 2):
        ls = G.lines_through(p, q)
        if len(ls) != 1:
            bad_pair = {"points": [p, q], "lines": list(ls)}
            break
    report["PG2"] = _result(bad_pair is None, bad_pair)

    report["PG3"] = _result(len(G.lines) >= 2, {"lines": list(G.lines)})

    report["PG4"] = _result(*_veblen(G))
    report["all_pass"] = all(report[a]["status"] == "pass" for a in ("PG1", "PG2", "PG3", "PG4"))
    return report


def _veblen(G):
    """Veblen's axiom: a line meeting two sides of a triangle away from the
    common vertex meets the third side.

    Triangle sides are only formed where joins are unique.  The line ell must
    differ from both sides it meets; otherwise "meets in a point" is void.
    """
    best = None
    for p in G.points:
        pencil = G.point_lines[p]
        for L1, L2 in itertools.permutations(pencil, 2):
            for x in G.line_points[L1]:
                if x == p:
                    continue
                for y in G.line_points[L2]:
                    if y == p or y == x:
                        continue
                    for ell in G.lines_through(x, y):
                        if ell in (L1, L2):
                            continue
                        ell_pts = set(G.line_points[ell])
                        for q in G.line_points[L1]:
                            if q == p or G.join_line(p, q) != L1:
                                continue
                            for r in G.line_points[L2]:
                                if r == p or r == q or G.join_line(p, r) != L2:
                                    continue
                                qr = G.join_line(q, r)
                                if qr is not None and ell_pts & set(G.line_points[qr]):
                                    continue
                                w = (p, q, r, ell)
                                if best is None or w < best:
                                    best = w
    if best is None:
        return True, None
    p, q, r, ell = best
    return False, {"p": p, "q": q, "r": r, "line": ell}


def subspace_closure(G: PointLineGeometry, S) -> frozenset:
    """Smallest point set containing S that contains every line meeting it twice."""
    X = set(S)
    queue = sorted(X)
    done = []
    while queue:
        a = queue.pop()
        for b in done:
            for l in G.lines_through(a, b):
                for r in G.line_points[l]:
                    if r not in X:
                        X.add(r)
                        queue.append(r)
        done.append(a)
    return frozenset(X)


def is_subspace(G, X) -> bool:
    return subspace_closure(G, X) == frozenset(X)


def subspace_rank(G: PointLineGeometry, X) -> int:
    """Rank of a closed subspace: -1 for the empty set, then one more per generator.

    Built by a greedy chain: each step adds the smallest point outside the
    current span and closes.  In projective spaces (including every singular
    subspace of a polar space) a single point always raises the rank by one,
    so the chain length is the rank.
    """
    X = frozenset(X)
    if not is_subspace(G, X):
        raise ValueError("rank is defined for closed subspaces only")
    Y: frozenset = frozenset()
    rank = -1
    while Y != X:
        p = min(X - Y)
        Y = subspace_closure(G, Y | {p})
        rank += 1
    return rank


# ---------------------------------------------------------------------------
# polarities

@dataclass
class Polarity:
    """``U -> U^perp`` for a non-degenerate (sigma, eps)-hermitian form."""

    form: object

    def __call__(self, U):
        return self.form.perp(U)

    def is_absolute(self, U):
        return mv.incident(U, self(U))


def polarity_from_form(form) -> Polarity:
    """Accepts a pseudo-quadratic or hermitian form object with ``perp`` and ``radical``."""
    if form.radical().dim:
        raise ValueError("a degenerate form induces no polarity")
    return Polarity(form)
