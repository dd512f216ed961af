"""Matrices and subspaces over a (possibly skew) scalar structure.

Conventions: vectors are columns, matrices act from the left and scalars act
on the right, so subspaces of ``D^n`` are right vector spaces.  Covectors
(elements of the dual) are rows with scalars on the left; their spans are
left subspaces.  A matrix is a tuple of row tuples.
"""

from __future__ import annotations

import itertools
import re

from . import budget, gf2
from .scalar import FiniteField


# ---------------------------------------------------------------------------
# matrices

def identity(D, n):
    return tuple(tuple(D.one if i == j else D.zero for j in range(n)) for i in range(n))


def zeros(D, rows, cols):
    return tuple(tuple(D.zero for _ in range(cols)) for _ in range(rows))


def elementary(D, n, i, j, a):
    """The matrix tau_ij(a): identity plus ``a`` at row i, column j."""
    if i == j:
        raise ValueError("elementary matrix needs i != j")
    rows = [list(r) for r in identity(D, n)]
    rows[i][j] = a
    return tuple(tuple(r) for r in rows)


def diagonal(D, entries):
    n = len(entries)
    return tuple(tuple(entries[i] if i == j else D.zero for j in range(n)) for i in range(n))


def transpose(M):
    return tuple(zip(*M)) if M else ()


def shape(M):
    return (len(M), len(M[0]) if M else 0)


def mat_mul(D, A, B):
    add, mul = D.add, D.mul
    cols = transpose(B)
    out = []
    for row in A:
        new = []
        for col in cols:
            acc = D.zero
            for x, y in zip(row, col):
                if not D.is_zero(x) and not D.is_zero(y):
                    acc = add(acc, mul(x, y))
            new.append(acc)
        out.append(tuple(new))
    return tuple(out)


def mat_vec(D, A, v):
    add, mul = D.add, D.mul
    out = []
    for row in A:
        acc = D.zero
        for x, y in zip(row, v):
            if not D.is_zero(x) and not D.is_zero(y):
                acc = add(acc, mul(x, y))
        out.append(acc)
    return tuple(out)


def mat_add(D, A, B):
    return tuple(tuple(D.add(x, y) for x, y in zip(r, s)) for r, s in zip(A, B))


def mat_sub(D, A, B):
    return tuple(tuple(D.sub(x, y) for x, y in zip(r, s)) for r, s in zip(A, B))


def mat_scale_left(D, a, A):
    return tuple(tuple(D.mul(a, x) for x in r) for r in A)


def is_identity(D, A):
    return all(
        (x == D.one) if i == j else D.is_zero(x)
        for i, r in enumerate(A)
        for j, x in enumerate(r)
    )


def mat_inv(D, A):
    """Inverse by Gauss-Jordan; raises ``ValueError`` when singular."""
    n = len(A)
    rows = [list(A[i]) + list(identity(D, n)[i]) for i in range(n)]
    for c in range(n):
        piv = next((r for r in range(c, n) if not D.is_zero(rows[r][c])), None)
        if piv is None:
            raise ValueError("singular matrix")
        rows[c], rows[piv] = rows[piv], rows[c]
        inv = D.inv(rows[c][c])
        rows[c] = [D.mul(inv, x) for x in rows[c]]
        for r in range(n):
            if r != c and not D.is_zero(rows[r][c]):
                f = rows[r][c]
                rows[r] = [D.sub(x, D.mul(f, y)) for x, y in zip(rows[r], rows[c])]
    return tuple(tuple(r[n:]) for r in rows)


def commutator(D, x, y):
    """``[x, y] = x y x^-1 y^-1``, the convention used throughout."""
    return mat_mul(D, mat_mul(D, x, y), mat_mul(D, mat_inv(D, x), mat_inv(D, y)))


# ---------------------------------------------------------------------------
# vectors

def vec_add(D, u, v):
    return tuple(D.add(x, y) for x, y in zip(u, v))


def vec_sub(D, u, v):
    return tuple(D.sub(x, y) for x, y in zip(u, v))


def vec_scale(D, v, a):
    """Right scalar multiple ``v * a``."""
    return tuple(D.mul(x, a) for x in v)


def vec_lscale(D, a, v):
    return tuple(D.mul(a, x) for x in v)


def is_zero_vec(D, v):
    return all(D.is_zero(x) for x in v)


def first_nonzero(D, v):
    for i, x in enumerate(v):
        if not D.is_zero(x):
            return i
    return None


def normalize_point(D, v):
    """Canonical representative of the point ``v D``: first nonzero entry 1."""
    i = first_nonzero(D, v)
    if i is None:
        raise ValueError("the zero vector spans no point")
    if v[i] == D.one:
        return tuple(v)
    return vec_scale(D, v, D.inv(v[i]))


def enumerate_vectors(F, n):
    budget.require("enumeration", F.q**n)
    return itertools.product(range(F.q), repeat=n)


def enumerate_points(F, n):
    """Normalized representatives of the points of PG(F^n), deterministic order."""
    budget.require("grassmannian", (F.q**n - 1) // (F.q - 1))
    out = []
    for lead in range(n):
        for tail in itertools.product(range(F.q), repeat=n - lead - 1):
            out.append((0,) * lead + (1,) + tail)
    return out


# ---------------------------------------------------------------------------
# canonical echelon forms

def _is_gf2(D):
    return isinstance(D, FiniteField) and D.q == 2


def _canonical_basis(D, vectors, n, side):
    vectors = [tuple(v) for v in vectors]
    if _is_gf2(D):
        words = gf2.rref(gf2.pack(v) for v in vectors)
        return tuple(gf2.unpack(w, n) for w in words)
    vecs = [list(v) for v in vectors if not is_zero_vec(D, v)]
    row = 0
    for r in range(n):
        piv = next((i for i in range(row, len(vecs)) if not D.is_zero(vecs[i][r])), None)
        if piv is None:
            continue
        vecs[row], vecs[piv] = vecs[piv], vecs[row]
        v = vecs[row]
        if v[r] != D.one:
            inv = D.inv(v[r])
            v = [D.mul(x, inv) for x in v] if side == "right" else [D.mul(inv, x) for x in v]
            vecs[row] = v
        for i in range(len(vecs)):
            if i != row and not D.is_zero(vecs[i][r]):
                c = vecs[i][r]
                if side == "right":
                    vecs[i] = [D.sub(x, D.mul(y, c)) for x, y in zip(vecs[i], v)]
                else:
                    vecs[i] = [D.sub(x, D.mul(c, y)) for x, y in zip(vecs[i], v)]
        row += 1
        if row == len(vecs):
            break
    return tuple(tuple(v) for v in vecs[:row])


class Subspace:
    """A subspace of ``D^n`` held in its unique reduced echelon basis.

    Each basis vector has a pivot (its first nonzero coordinate) equal to 1,
    pivots strictly increase, and every other basis vector is zero at each
    pivot.  ``side`` is ``"right"`` for subspaces of V and ``"left"`` for
    subspaces of the dual.  Equal subspaces have identical representations,
    so instances hash and compare by value.
    """

    __slots__ = ("D", "n", "basis", "side", "pivots", "_hash")

    def __init__(self, D, n, basis, side="right", _canonical=False):
        self.D = D
        self.n = n
        self.side = side
        self.basis = tuple(basis) if _canonical else _canonical_basis(D, basis, n, side)
        self.pivots = tuple(first_nonzero(D, b) for b in self.basis)
        self._hash = hash((n, self.basis, side))

    @property
    def dim(self):
        return len(self.basis)

    def __eq__(self, other):
        return (
            isinstance(other, Subspace)
            and self._hash == other._hash
            and self.n == other.n
            and self.side == other.side
            and self.basis == other.basis
            and self.D == other.D
        )

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return (self.dim, self.pivots, self.basis) < (other.dim, other.pivots, other.basis)

    def __repr__(self):
        rows = " | ".join(" ".join(self.D.fmt(x) for x in b) for b in self.basis)
        return f"Subspace(n={self.n}, dim={self.dim}, [{rows}])"

    def residue(self, v):
        v = tuple(v)
        D = self.D
        for b, p in zip(self.basis, self.pivots):
            c = v[p]
            if not D.is_zero(c):
                if self.side == "right":
                    v = tuple(D.sub(x, D.mul(y, c)) for x, y in zip(v, b))
                else:
                    v = tuple(D.sub(x, D.mul(c, y)) for x, y in zip(v, b))
        return v

    def contains_vector(self, v):
        return is_zero_vec(self.D, self.residue(v))

    def __contains__(self, v):
        return self.contains_vector(v)

    def issubspace(self, other: "Subspace") -> bool:
        _same_ambient(self, other)
        return self.dim <= other.dim and all(other.contains_vector(b) for b in self.basis)

    def coefficient_vectors(self):
        """All coefficient tuples (finite scalars only)."""
        return itertools.product(range(self.D.q), repeat=self.dim)

    def combine(self, coeffs):
        D = self.D
        v = (D.zero,) * self.n
        for b, a in zip(self.basis, coeffs):
            if not D.is_zero(a):
                v = vec_add(D, v, vec_scale(D, b, a) if self.side == "right" else vec_lscale(D, a, b))
        return v

    def vectors(self):
        budget.require("enumeration", self.D.q**self.dim)
        return [self.combine(c) for c in self.coefficient_vectors()]

    def points(self):
        """Normalized point representatives of the points inside this subspace."""
        D = self.D
        out = []
        for lead in range(self.dim):
            for tail in itertools.product(range(D.q), repeat=self.dim - lead - 1):
                out.append(self.combine((0,) * lead + (1,) + tail))
        return out

    def to_json(self):
        return [[self.D.fmt(x) for x in b] for b in self.basis]


def _same_ambient(A, B):
    if A.n != B.n or A.D != B.D or A.side != B.side:
        raise ValueError("subspaces live in different ambient spaces")


def span(D, vectors, n=None, side="right") -> Subspace:
    vectors = [tuple(v) for v in vectors]
    if n is None:
        if not vectors:
            raise ValueError("ambient dimension needed for the empty span")
        n = len(vectors[0])
    return Subspace(D, n, vectors, side)


def echelonize(D, M):
    """Canonical subspace spanned by the columns of ``M`` and its rank."""
    U = Subspace(D, len(M), transpose(M), "right")
    return U, U.dim


def zero_subspace(D, n, side="right"):
    return Subspace(D, n, (), side, _canonical=True)


def full_subspace(D, n, side="right"):
    return Subspace(D, n, identity(D, n), side, _canonical=True)


def join(A: Subspace, B: Subspace) -> Subspace:
    _same_ambient(A, B)
    return Subspace(A.D, A.n, A.basis + B.basis, A.side)


def annihilator(U: Subspace) -> Subspace:
    """``Ann(U)``: covectors killing a right subspace, or vectors killed by a left one."""
    D, n = U.D, U.n
    pivots = set(U.pivots)
    out = []
    for f in range(n):
        if f in pivots:
            continue
        v = [D.zero] * n
        v[f] = D.one
        for b, p in zip(U.basis, U.pivots):
            v[p] = D.neg(b[f])
        out.append(tuple(v))
    side = "left" if U.side == "right" else "right"
    return Subspace(D, n, out, side)


dual_space_map = annihilator


def meet(A: Subspace, B: Subspace) -> Subspace:
    _same_ambient(A, B)
    return annihilator(join(annihilator(A), annihilator(B)))


def incident(A: Subspace, B: Subspace) -> bool:
    return A.issubspace(B) or B.issubspace(A)


def nullspace(D, rows, n) -> Subspace:
    """Right solutions ``v`` of ``R v = 0`` for the matrix with the given rows."""
    return annihilator(Subspace(D, n, rows, "left"))


def apply_matrix(D, g, U: Subspace) -> Subspace:
    return Subspace(D, U.n, [mat_vec(D, g, b) for b in U.basis], U.side)


def gaussian_binomial(n, k, q):
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def enumerate_grassmannian(n, k, F):
    """Every k-subspace of F^n exactly once, via reduced echelon pivot patterns."""
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    budget.require("grassmannian", gaussian_binomial(n, k, F.q))
    out = []
    for pivots in itertools.combinations(range(n), k):
        pivset = set(pivots)
        slots = [[j for j in range(p + 1, n) if j not in pivset] for p in pivots]
        nfree = sum(len(s) for s in slots)
        for free in itertools.product(range(F.q), repeat=nfree):
            basis = []
            it = iter(free)
            for p, s in zip(pivots, slots):
                v = [0] * n
                v[p] = 1
                for j in s:
                    v[j] = next(it)
                basis.append(tuple(v))
            out.append(Subspace(F, n, basis, "right", _canonical=True))
    return out


def enumerate_gl(F, n, accept=None):
    """Invertible n x n matrices over F, built column by column.

    ``accept(cols)`` sees the partial list of columns and may prune; with no
    predicate this is a plain enumeration of GL_n(F).
    """
    meter = budget.Meter()
    if F.q == 2:
        def acc(cols):
            meter.step()
            return accept is None or accept([gf2.unpack(c, n) for c in cols])

        for cols in gf2.enumerate_gl(n, acc):
            yield transpose([gf2.unpack(c, n) for c in cols])
        return

    nonzero = [v for v in itertools.product(range(F.q), repeat=n) if any(v)]

    def rec(cols, spanned):
        if len(cols) == n:
            yield transpose(cols)
            return
        for c in nonzero:
            if c in spanned:
                continue
            meter.step()
            cols.append(c)
            if accept is None or accept(cols):
                new = set(spanned)
                for a in range(1, F.q):
                    ca = vec_scale(F, c, a)
                    new |= {vec_add(F, x, ca) for x in spanned}
                yield from rec(cols, frozenset(new))
            cols.pop()

    yield from rec([], frozenset({(0,) * n}))


def gl_order(n, q):
    out = 1
    for i in range(n):
        out *= q**n - q**i
    return out


# ---------------------------------------------------------------------------
# text formats

def parse_matrix(D, text):
    """Rows separated by newlines or ``;``, entries by whitespace."""
    rows = [r.split() for r in re.split(r"[;\n]", text) if r.strip()]
    if not rows:
        raise ValueError("empty matrix")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValueError("ragged matrix")
    return tuple(tuple(D.parse(x) for x in r) for r in rows)


def format_matrix(D, M):
    return "\n".join(" ".join(D.fmt(x) for x in r) for r in M)
