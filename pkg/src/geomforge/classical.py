"""Concrete classical groups: transvections, EL/SL/GL and their projective
images, the Dieudonne determinant, Steinberg relations, isometry groups of
pseudo-quadratic forms, Moufang sets and line reconstruction."""

from __future__ import annotations

import gc
import itertools
from dataclasses import dataclass, field

from . import budget
from . import matvec as mv
from . import permgrp as pg
from .projgeom import PointLineGeometry


class ClassicalError(ValueError):
    pass


# ---------------------------------------------------------------------------
# transvections

def pairing(D, rho, u):
    """``rho(u) = sum rho_i u_i`` for a covector (row) and a vector (column)."""
    acc = D.zero
    for r, x in zip(rho, u):
        if not D.is_zero(r) and not D.is_zero(x):
            acc = D.add(acc, D.mul(r, x))
    return acc


def transvection(D, u, rho):
    """``tau = id + u rho``, i.e. ``v -> v + u rho(v)``."""
    if not D.is_zero(pairing(D, rho, u)):
        raise ClassicalError("rho(u) must vanish")
    if mv.is_zero_vec(D, u) or mv.is_zero_vec(D, rho):
        raise ClassicalError("a transvection needs u != 0 and rho != 0")
    n = len(u)
    return tuple(
        tuple(D.add(D.one if i == j else D.zero, D.mul(u[i], rho[j])) for j in range(n))
        for i in range(n)
    )


@dataclass(frozen=True)
class Transvection:
    D: object
    u: tuple
    rho: tuple

    @property
    def matrix(self):
        return transvection(self.D, self.u, self.rho)

    @property
    def center(self):
        return mv.span(self.D, [self.u])

    @property
    def axis(self):
        return mv.nullspace(self.D, [self.rho], len(self.u))


def transvections_commute_iff(t1: Transvection, t2: Transvection):
    """Return ``(commute, same_center_or_axis)``.

    The two agree when dim V <= 3.  In general the transvections
    ``id + u phi`` and ``id + v psi`` commute exactly when
    ``phi(v) = psi(u) = 0``, which in dimension 4 and up also happens for
    disjoint centers and axes, e.g. ``(e1, e2*)`` and ``(e3, e4*)``.
    """
    D = t1.D
    a, b = t1.matrix, t2.matrix
    commute = mv.mat_mul(D, a, b) == mv.mat_mul(D, b, a)
    same = t1.center == t2.center or t1.axis == t2.axis
    return commute, same


def tau(D, n, i, j, a):
    """The elementary matrix tau_ij(a) (identity plus a at (i, j))."""
    return mv.elementary(D, n, i, j, a)


# ---------------------------------------------------------------------------
# actions of matrix groups

class VectorAction:
    """Action on the nonzero vectors of F^n (faithful)."""

    def __init__(self, F, n):
        budget.require("enumeration", F.q**n)
        self.F, self.n = F, n
        self.domain = [v for v in itertools.product(range(F.q), repeat=n) if any(v)]
        self.index = {v: i for i, v in enumerate(self.domain)}

    def perm(self, g):
        F = self.F
        return tuple(self.index[mv.mat_vec(F, g, v)] for v in self.domain)


class PointAction:
    """Action on the points of PG(F^n), canonical point order."""

    def __init__(self, F, n, points=None):
        self.F, self.n = F, n
        self.domain = list(points) if points is not None else mv.enumerate_points(F, n)
        self.index = {v: i for i, v in enumerate(self.domain)}

    def perm(self, g):
        F = self.F
        return tuple(self.index[mv.normalize_point(F, mv.mat_vec(F, g, v))] for v in self.domain)


class SubspaceAction:
    """Action on Gr_k(F^n)."""

    def __init__(self, F, n, k):
        self.F, self.n, self.k = F, n, k
        self.domain = mv.enumerate_grassmannian(n, k, F)
        self.index = {U: i for i, U in enumerate(self.domain)}

    def perm(self, g):
        return tuple(self.index[mv.apply_matrix(self.F, g, U)] for U in self.domain)


@dataclass
class MatrixGroup:
    """Matrix generators together with a permutation representation."""

    name: str
    F: object
    n: int
    gens: list
    action: object
    _perm: pg.PermGroup | None = field(default=None, repr=False)

    @property
    def perm_group(self) -> pg.PermGroup:
        if self._perm is None:
            self._perm = pg.PermGroup([self.action.perm(g) for g in self.gens], len(self.action.domain))
        return self._perm

    def order(self):
        return self.perm_group.order()

    def on(self, action) -> "MatrixGroup":
        return MatrixGroup(self.name, self.F, self.n, self.gens, action)


def elementary_generators(F, n):
    return [tau(F, n, i, j, a) for i in range(n) for j in range(n) if i != j for a in F.additive_basis()]


def build_EL(n, F, action=None) -> MatrixGroup:
    """EL_n(F), generated by tau_ij(a) for a in an additive basis of F; faithful on vectors."""
    return MatrixGroup(f"EL({n},{F.q})", F, n, elementary_generators(F, n), action or VectorAction(F, n))


build_SL = build_EL  # over fields, EL = SL; compared against a det-1 count in the tests


def build_GL(n, F, action=None) -> MatrixGroup:
    gens = elementary_generators(F, n)
    if F.q > 2:
        gens.append(mv.diagonal(F, [F.primitive] + [F.one] * (n - 1)))
    return MatrixGroup(f"GL({n},{F.q})", F, n, gens, action or VectorAction(F, n))


def build_PEL(n, F) -> MatrixGroup:
    return MatrixGroup(f"PEL({n},{F.q})", F, n, elementary_generators(F, n), PointAction(F, n))


def build_PGL(n, F) -> MatrixGroup:
    G = build_GL(n, F, PointAction(F, n))
    G.name = f"PGL({n},{F.q})"
    return G


def determinant(F, M):
    """Leibniz formula over a commutative field (oracle)."""
    n = len(M)
    total = F.zero
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for a, b in itertools.combinations(range(n), 2) if perm[a] > perm[b])
        term = F.one
        for i in range(n):
            term = F.mul(term, M[i][perm[i]])
            if F.is_zero(term):
                break
        if F.is_zero(term):
            continue
        total = F.sub(total, term) if inv % 2 else F.add(total, term)
    return total


# ---------------------------------------------------------------------------
# Dieudonne determinant

def dieudonne_det(D, M):
    """Representative of the Dieudonne determinant class of an invertible M.

    Row reduction by left multiplication with transvections (determinant
    class 1) and row swaps (class -1) to upper triangular form; the class is
    the sign times the product of the pivots.  Over commutative fields the
    representative is the ordinary determinant; over H classes agree exactly
    when norms agree.
    """
    A = [list(r) for r in M]
    n = len(A)
    sign = D.one
    for c in range(n):
        piv = next((r for r in range(c, n) if not D.is_zero(A[r][c])), None)
        if piv is None:
            raise ClassicalError("singular matrix has no Dieudonne determinant")
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            sign = D.neg(sign)
        inv = D.inv(A[c][c])
        for r in range(c + 1, n):
            if not D.is_zero(A[r][c]):
                f = D.mul(A[r][c], inv)
                A[r] = [D.sub(x, D.mul(f, y)) for x, y in zip(A[r], A[c])]
    out = sign
    for i in range(n):
        out = D.mul(out, A[i][i])
    return out


def det_class_equal(D, a, b):
    if D.is_commutative:
        return a == b
    return a.norm() == b.norm()


# ---------------------------------------------------------------------------
# Steinberg relations

def _scalar_pairs(D, samples, rng):
    if D.is_finite:
        return list(itertools.product(D.elements(), repeat=2))
    out = []
    while len(out) < samples:
        a, b = D.random_nonzero(rng), D.random_nonzero(rng)
        if a * b != b * a:
            out.append((a, b))
    return out


def check_steinberg(n, D, samples=200, rng=None):
    """Verify SR1-SR3 on elementary matrices over D.

    SR2 is checked for ``j != k`` and ``i != l``, the pairs whose commutator
    must vanish.  SR3 is tested against the four candidates ``+-ab`` and
    ``+-ba``; the report lists which conventions held on every sample.
    """
    import random

    if n < 3:
        raise ClassicalError("the relations need three distinct indices, so n >= 3")
    rng = rng or random.Random(0)
    pairs = _scalar_pairs(D, samples, rng)
    idx = [(i, j) for i in range(n) for j in range(n) if i != j]
    report = {"n": n, "scalar": repr(D), "pairs": len(pairs)}
    inverses = {}

    def comm(x, y):
        for m in (x, y):
            if m not in inverses:
                inverses[m] = mv.mat_inv(D, m)
        return mv.mat_mul(D, mv.mat_mul(D, x, y), mv.mat_mul(D, inverses[x], inverses[y]))

    sr1 = None
    for (i, j) in idx:
        for a, b in pairs:
            lhs = mv.mat_mul(D, tau(D, n, i, j, a), tau(D, n, i, j, b))
            if lhs != tau(D, n, i, j, D.add(a, b)):
                sr1 = sr1 or {"i": i, "j": j, "a": D.fmt(a), "b": D.fmt(b)}
    report["SR1"] = {"status": "pass" if sr1 is None else "fail", "witness": sr1}

    ident = mv.identity(D, n)
    sr2, checked, printed = None, 0, None
    for (i, j), (k, l) in itertools.product(idx, repeat=2):
        standard = j != k and i != l
        as_printed = i != k and j != l
        if not (standard or as_printed):
            continue
        for a, b in pairs:
            if D.is_zero(a) or D.is_zero(b):
                continue
            c = comm(tau(D, n, i, j, a), tau(D, n, k, l, b))
            trivial = c == ident
            if standard:
                checked += 1
                if not trivial and sr2 is None:
                    sr2 = {"ij": [i, j], "kl": [k, l], "a": D.fmt(a), "b": D.fmt(b)}
            elif not trivial and printed is None:
                printed = {"ij": [i, j], "kl": [k, l], "a": D.fmt(a), "b": D.fmt(b)}
            if not standard:
                break
    report["SR2"] = {
        "status": "pass" if sr2 is None else "fail",
        "witness": sr2,
        "condition": "j != k and i != l",
        "checked": checked,
        # informational: i != k and j != l also admits pairs such as (01, 12)
        "printed_condition_counterexample": printed,
    }

    conventions = {"+ab": True, "-ab": True, "+ba": True, "-ba": True}
    sr3 = None
    for i, j, k in itertools.permutations(range(n), 3):
        for a, b in pairs:
            c = comm(tau(D, n, i, j, a), tau(D, n, j, k, b))
            ab, ba = D.mul(a, b), D.mul(b, a)
            cands = {"+ab": ab, "-ab": D.neg(ab), "+ba": ba, "-ba": D.neg(ba)}
            for name, val in cands.items():
                if conventions[name] and c != tau(D, n, i, k, val):
                    conventions[name] = False
            if c != tau(D, n, i, k, ab) and sr3 is None:
                sr3 = {"ijk": [i, j, k], "a": D.fmt(a), "b": D.fmt(b)}
    report["SR3"] = {
        "status": "pass" if sr3 is None else "fail",
        "witness": sr3,
        "commutator": "[x, y] = x y x^-1 y^-1",
        "conventions_holding": sorted(k for k, v in conventions.items() if v),
    }
    report["all_pass"] = all(report[k]["status"] == "pass" for k in ("SR1", "SR2", "SR3"))
    return report


# ---------------------------------------------------------------------------
# isometry groups

def _trimmed(perms, degree):
    """The group generated by ``perms``, keeping only the generators needed."""
    return pg.PermGroup(pg.PermGroup(perms, degree).small_generators(), degree)


@dataclass
class IsometryGroup:
    form: object
    matrices: list
    isotropic_points: list

    def order(self):
        return len(self.matrices)

    def point_group(self) -> pg.PermGroup:
        """Permutation action on the isotropic points (may have a kernel of scalars)."""
        act = PointAction(self.form.D, self.form.n, self.isotropic_points)
        return _trimmed([act.perm(g) for g in self.matrices], len(self.isotropic_points))

    def vector_group(self) -> pg.PermGroup:
        act = VectorAction(self.form.D, self.form.n)
        return _trimmed([act.perm(g) for g in self.matrices], len(act.domain))


FILTER_LIMIT = 10**7


def _value_tables(pq, vectors):
    qtab = {v: pq.q(v) for v in vectors}
    htab = {(u, v): pq.h(u, v) for u in vectors for v in vectors}
    return qtab, htab


def _filter(pq):
    """Test every element of GL(V) on the basis: q-values and all h-values."""
    D, n = pq.D, pq.n
    basis = mv.identity(D, n)
    Hg = pq.h.gram
    qs = [pq.q(e) for e in basis]
    out = []
    if D.q == 2:
        from . import gf2

        vecs = {c: gf2.unpack(c, n) for c in range(1 << n)}
        qtab = [pq.q(vecs[c]) for c in range(1 << n)]
        htab = [[pq.h(vecs[c], vecs[d]) for d in range(1 << n)] for c in range(1 << n)]
        pairs = [(i, j, Hg[i][j]) for i in range(n) for j in range(n) if i != j]
        diag = [(j, qs[j]) for j in range(n)]
        for cols in gf2.enumerate_gl(n):
            if all(qtab[cols[j]] == v for j, v in diag) and all(
                htab[cols[i]][cols[j]] == v for i, j, v in pairs
            ):
                out.append(mv.transpose([vecs[c] for c in cols]))
        return out
    vectors = list(mv.enumerate_vectors(D, n))
    qtab, htab = _value_tables(pq, vectors)
    for g in mv.enumerate_gl(D, n):
        cols = mv.transpose(g)
        if all(qtab[cols[j]] == qs[j] for j in range(n)) and all(
            htab[(cols[i], cols[j])] == Hg[i][j] for i in range(n) for j in range(n)
        ):
            out.append(g)
    return out


def _backtrack(pq):
    """Choose images of basis vectors one at a time, pruning on q and h."""
    D, n = pq.D, pq.n
    Hg = pq.h.gram
    basis = mv.identity(D, n)
    vectors = [v for v in mv.enumerate_vectors(D, n) if any(v)]
    qtab, htab = _value_tables(pq, vectors)
    cands = [[v for v in vectors if qtab[v] == pq.q(basis[j]) and htab[(v, v)] == Hg[j][j]] for j in range(n)]
    meter = budget.Meter("enumeration")
    out = []

    def rec(cols, spanned):
        j = len(cols)
        if j == n:
            out.append(mv.transpose(cols))
            return
        for v in cands[j]:
            if v in spanned:
                continue
            meter.step()
            if all(htab[(c, v)] == Hg[i][j] and htab[(v, c)] == Hg[j][i] for i, c in enumerate(cols)):
                new = set(spanned)
                for a in D.nonzero():
                    va = mv.vec_scale(D, v, a)
                    new |= {mv.vec_add(D, x, va) for x in spanned}
                rec(cols + [v], frozenset(new))

    rec([], frozenset({(D.zero,) * n}))
    return out


def build_unitary(pq, method="filter") -> IsometryGroup:
    """All g in GL(V) preserving h exactly and q modulo Lambda.

    Since q(x + y) = q(x) + q(y) + h(x, y) modulo Lambda, g is an isometry
    exactly when it preserves q on the basis and h on all basis pairs.
    ``filter`` runs through all of GL(V) and tests that; ``backtrack`` builds
    the columns one at a time and prunes as soon as a test fails.  Both
    refuse groups GL(V) of order above 10^7.
    """
    D, n = pq.D, pq.n
    if not D.is_finite:
        raise ClassicalError("isometry groups are enumerated over finite fields")
    size = mv.gl_order(n, D.q)
    if size > FILTER_LIMIT:
        raise ClassicalError(f"|GL({n},{D.q})| = {size} exceeds {FILTER_LIMIT}; no generating set is built here")
    budget.require("enumeration", size)
    if method == "filter":
        # millions of short-lived tuples; cyclic collection only slows this down
        enabled = gc.isenabled()
        gc.disable()
        try:
            out = _filter(pq)
        finally:
            if enabled:
                gc.enable()
    elif method == "backtrack":
        out = _backtrack(pq)
    else:
        raise ClassicalError(f"unknown method {method!r}")
    return IsometryGroup(pq, sorted(out), pq.isotropic_points())


# ---------------------------------------------------------------------------
# Moufang sets

@dataclass
class MoufangSetData:
    G: pg.PermGroup
    U: pg.PermGroup
    x: int
    labels: list


def _line_label(F, v):
    """Point of the projective line as x in F (for (x, 1)) or q for infinity."""
    if F.is_zero(v[1]):
        return F.q
    return F.mul(v[0], F.inv(v[1]))


def moufang_set_projective_line(F, level="GL") -> MoufangSetData:
    """(H, U_inf, F u {inf}) for H = PEL_2(F) or PGL_2(F); infinity has index q."""
    q = F.q
    labels = list(range(q)) + ["inf"]
    vecs = [(x, F.one) for x in range(q)] + [(F.one, F.zero)]

    def perm(g):
        return tuple(_line_label(F, mv.mat_vec(F, g, v)) for v in vecs)

    gens = elementary_generators(F, 2)
    if level.upper() == "GL" and q > 2:
        gens.append(mv.diagonal(F, [F.primitive, F.one]))
    elif level.upper() not in ("GL", "EL"):
        raise ClassicalError("level must be EL or GL")
    G = pg.PermGroup([perm(g) for g in gens], q + 1)
    U = pg.PermGroup([perm(tau(F, 2, 0, 1, t)) for t in F.additive_basis()], q + 1)
    return MoufangSetData(G, U, q, labels)


def check_moufang(ms: MoufangSetData, uniqueness=True) -> dict:
    G, U, x = ms.G, ms.U, ms.x
    n = G.degree
    rest = [p for p in range(n) if p != x]
    rep = {}
    rep["MS1"] = {"status": "pass" if n >= 3 and G.transitivity_degree() >= 2 else "fail"}
    fixes = all(g[x] == x for g in U.gens)
    regular = U.acts_regularly_on(rest)
    rep["MS2"] = {"status": "pass" if fixes and regular else "fail", "fixes_x": fixes, "regular": regular}
    Gx = G.stabilizer(x)
    rep["MS3"] = {"status": "pass" if U.is_subgroup_of(Gx) and U.is_normal_in(Gx) else "fail"}
    rep["sharply_2_transitive"] = G.order() == n * (n - 1)
    rep["stabilizer_order"] = Gx.order()
    if uniqueness:
        found = pg.regular_normal_subgroups(G, x)
        Uel = frozenset(U.elements())
        rep["regular_normal_subgroups"] = len(found)
        rep["unique_and_equal_to_U"] = len(found) == 1 and frozenset(found[0].elements()) == Uel
    rep["all_pass"] = all(rep[k]["status"] == "pass" for k in ("MS1", "MS2", "MS3"))
    return rep


# ---------------------------------------------------------------------------
# reconstruction of lines from a 2-transitive action

def reconstruct_lines(G: pg.PermGroup, p=0, q=1) -> PointLineGeometry:
    """Recover the lines of a projective space from its 2-transitive group.

    The orbits of ``H = G_{p,q}`` other than {p} and {q} are sorted by whether
    the pointwise stabilizer in H of the orbit is trivial.  The points not in
    such orbits form the line through p and q; all lines are its images.
    """
    if G.transitivity_degree() < 2:
        raise ClassicalError("the action is not 2-transitive")
    Hpq = G.pointwise_stabilizer((p, q))
    others = [o for o in Hpq.orbits() if p not in o and q not in o]
    qualifying = []
    for o in others:
        fix = Hpq.pointwise_stabilizer(sorted(o))
        if fix.order() == 1:
            qualifying.append(o)
    if not qualifying:
        raise ClassicalError("no orbit of the two-point stabilizer has trivial pointwise stabilizer")
    X = frozenset().union(*qualifying)
    line = frozenset(range(G.degree)) - X
    if len(line) < 3:
        raise ClassicalError(
            "no qualifying orbit separates a line: the candidate line has only two points, "
            "so the action does not come from a projective space of rank >= 2"
        )
    seen = {line}
    queue = [line]
    while queue:
        L = queue.pop()
        for g in G.gens:
            M = frozenset(g[i] for i in L)
            if M not in seen:
                seen.add(M)
                queue.append(M)
    rows = {i: sorted(L) for i, L in enumerate(sorted(sorted(L) for L in seen))}
    return PointLineGeometry.from_rows(rows, range(G.degree))
