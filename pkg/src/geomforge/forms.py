"""Sesquilinear, hermitian and pseudo-quadratic forms with form parameters.

A sigma-sesquilinear form is ``f(u, v) = sum_ij u_i^sigma G_ij v_j``, so
``f(ua, vb) = a^sigma f(u, v) b``.  Its (sigma, eps)-hermitianization is
``h_f(u, v) = f(u, v) + f(v, u)^sigma eps`` with Gram matrix
``H_ij = G_ij + (G_ji)^sigma eps``.  The pseudo-quadratic form of ``f`` relative
to a form parameter Lambda is ``q_f(v) = f(v, v) + Lambda``; values are stored
as canonical coset representatives.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction

from . import budget
from . import matvec as mv
from .scalar import (
    FiniteField,
    H,
    QuaternionAlgebra,
    Quaternion,
    Sigma,
    SigmaMismatch,
    parse_scalar_structure,
)


class FormError(ValueError):
    """Inconsistent form data or a form outside an operation's domain."""


class DegenerateForm(FormError):
    """Raised by operations that need a (slightly) non-degenerate form."""


LAMBDA_TAGS = ("zero", "trace", "fixed", "full")


def sigma_matrix(D, sigma, M):
    return tuple(tuple(sigma.apply(D, x) for x in r) for r in M)


def trace_group(D, sigma, eps):
    """``D_{sigma, eps} = {c + c^sigma eps}`` (finite D only)."""
    return frozenset(D.add(c, D.mul(sigma.apply(D, c), eps)) for c in D.elements())


def fixed_group(D, sigma, delta):
    """``D^{sigma, delta} = {c : c^sigma delta = c}``.

    With ``delta = -eps`` this is ``{c : c^sigma eps = -c}``, the kernel of the
    trace map ``c -> c + c^sigma eps``.
    """
    return frozenset(
        c for c in D.elements() if D.sub(c, D.mul(sigma.apply(D, c), delta)) == D.zero
    )


# ---------------------------------------------------------------------------

class FormParameter:
    """``(sigma, eps, Lambda)``.

    Over finite fields Lambda is always materialized as a frozenset; the tag
    (one of ``zero``, ``trace``, ``fixed``, ``full`` or ``explicit``) records how
    it was specified.  Over the quaternions only the tags are available and
    membership is decided by a predicate.
    """

    def __init__(self, D, sigma: Sigma, epsilon, lam="fixed"):
        self.D = D
        self.sigma = sigma.normalized(D)
        if D.is_zero(epsilon):
            raise FormError("epsilon must be a unit")
        self.epsilon = epsilon
        neg = D.neg(epsilon)
        if isinstance(lam, str):
            tag = lam.lower()
            if tag not in LAMBDA_TAGS:
                raise FormError(f"unknown Lambda tag {lam!r}")
            self.tag = tag
            if D.is_finite:
                self.elements = {
                    "zero": frozenset({D.zero}),
                    "trace": trace_group(D, self.sigma, neg),
                    "fixed": fixed_group(D, self.sigma, neg),
                    "full": frozenset(D.elements()),
                }[tag]
            else:
                self.elements = None
        else:
            if not D.is_finite:
                raise FormError("explicit Lambda sets need a finite scalar structure")
            self.tag = "explicit"
            self.elements = frozenset(lam)
            if D.zero not in self.elements:
                raise FormError("Lambda must contain 0")
        self._reps = None

    # -- derived groups
    def lower(self):
        """``D_{sigma, -eps}``."""
        return trace_group(self.D, self.sigma, self.D.neg(self.epsilon))

    def upper(self):
        """``D^{sigma, -eps}``."""
        return fixed_group(self.D, self.sigma, self.D.neg(self.epsilon))

    # -- membership and cosets
    def contains(self, x) -> bool:
        D = self.D
        if self.elements is not None:
            return x in self.elements
        if self.tag == "zero":
            return D.is_zero(x)
        if self.tag == "full":
            return True
        # quaternions: both trace and fixed groups equal D^{sigma,-eps} in char 0
        return D.is_zero(D.add(x, D.mul(self.sigma.apply(D, x), self.epsilon)))

    def rep(self, x):
        """Canonical representative of ``x + Lambda``."""
        D = self.D
        if self.elements is not None:
            if self._reps is None:
                reps = {}
                for c in D.elements():
                    if c not in reps:
                        coset = [D.add(c, l) for l in self.elements]
                        m = min(coset)
                        for y in coset:
                            reps[y] = m
                self._reps = reps
            return self._reps[x]
        if self.tag == "zero":
            return x
        if self.tag == "full":
            return D.zero
        # x = (x - x^sigma eps)/2 + (x + x^sigma eps)/2; the first part lies in
        # D_{sigma,-eps}, so the second part represents the coset
        t = D.mul(self.sigma.apply(D, x), self.epsilon)
        return D.mul(D.add(x, t), Quaternion(Fraction(1, 2)))

    def scaled(self, s) -> "FormParameter":
        D = self.D
        sigma2 = self.sigma.twisted(D, s)
        eps2 = D.mul(D.mul(s, D.inv(self.sigma.apply(D, s))), self.epsilon)
        if self.tag == "explicit":
            lam = frozenset(D.mul(s, l) for l in self.elements)
        else:
            lam = self.tag
        out = FormParameter(D, sigma2, eps2, lam)
        if self.tag != "explicit" and self.elements is not None:
            # tags transform correctly under scaling; keep the materialized set exact
            out.elements = frozenset(D.mul(s, l) for l in self.elements)
        return out

    def key(self):
        lam = self.tag if self.elements is None else tuple(sorted(self.elements))
        return (self.sigma, self.epsilon, lam)

    def describe_lambda(self):
        if self.elements is None:
            return self.tag
        for tag in LAMBDA_TAGS:
            if self.elements == FormParameter(self.D, self.sigma, self.epsilon, tag).elements:
                return tag
        return "explicit"

    def to_json(self):
        D = self.D
        out = {
            "scalar": repr(D),
            "sigma": self.sigma.to_json(D),
            "epsilon": D.fmt(self.epsilon),
        }
        if self.elements is None:
            out["lambda"] = self.tag
        else:
            out["lambda"] = sorted(D.fmt(x) for x in self.elements)
            out["lambda_kind"] = self.describe_lambda()
        return out

    def __repr__(self):
        return f"FormParameter({self.D!r}, {self.sigma.describe()}, eps={self.D.fmt(self.epsilon)}, {self.describe_lambda()})"


# ---------------------------------------------------------------------------

class SesquilinearForm:
    """``f(u, v) = u^(sigma T) G v``."""

    def __init__(self, D, gram, sigma: Sigma | None = None):
        self.D = D
        if sigma is None:
            if not D.is_finite:
                raise SigmaMismatch("quaternion forms need an explicit anti-automorphism")
            sigma = Sigma.identity()
        self.sigma = sigma.normalized(D)
        gram = tuple(tuple(r) for r in gram)
        if any(len(r) != len(gram) for r in gram):
            raise FormError("Gram matrix must be square")
        self.gram = gram
        self.n = len(gram)

    def __call__(self, u, v):
        D, s = self.D, self.sigma
        acc = D.zero
        for i, ui in enumerate(u):
            if D.is_zero(ui):
                continue
            row = self.gram[i]
            inner = D.zero
            for j, vj in enumerate(v):
                if not D.is_zero(vj) and not D.is_zero(row[j]):
                    inner = D.add(inner, D.mul(row[j], vj))
            if not D.is_zero(inner):
                acc = D.add(acc, D.mul(s.apply(D, ui), inner))
        return acc

    def pullback(self, g) -> "SesquilinearForm":
        """Gram matrix of ``(u, v) -> f(gu, gv)``: ``(g^sigma)^T G g``."""
        D = self.D
        left = mv.transpose(sigma_matrix(D, self.sigma, g))
        return SesquilinearForm(D, mv.mat_mul(D, left, mv.mat_mul(D, self.gram, g)), self.sigma)

    def __eq__(self, other):
        return (
            isinstance(other, SesquilinearForm)
            and self.D == other.D
            and self.sigma == other.sigma
            and self.gram == other.gram
        )

    def __hash__(self):
        return hash((self.gram, self.sigma))


def hermitian_gram(D, sigma, eps, gram):
    n = len(gram)
    return tuple(
        tuple(D.add(gram[i][j], D.mul(sigma.apply(D, gram[j][i]), eps)) for j in range(n))
        for i in range(n)
    )


def check_sigma_eps(D, sigma, eps):
    """``eps^sigma eps = 1`` and ``a^(sigma^2) = eps^-1 a eps`` (on all of D, or on 1, i, j, k)."""
    problems = []
    if D.mul(sigma.apply(D, eps), eps) != D.one:
        problems.append("eps^sigma * eps != 1")
    sample = D.elements() if D.is_finite else (D.one, D.i, D.j, D.k)
    inv = D.inv(eps)
    for a in sample:
        if sigma.apply(D, sigma.apply(D, a)) != D.mul(D.mul(inv, a), eps):
            problems.append(f"sigma^2 differs from conjugation by eps^-1 at {D.fmt(a)}")
            break
    return problems


def hermitianize(f: SesquilinearForm, param: FormParameter) -> SesquilinearForm:
    """``h_f(u, v) = f(u, v) + f(v, u)^sigma eps`` as a sesquilinear form."""
    if f.sigma != param.sigma:
        raise FormError("form and parameter use different anti-automorphisms")
    problems = check_sigma_eps(f.D, param.sigma, param.epsilon)
    if problems:
        raise FormError("; ".join(problems))
    return SesquilinearForm(f.D, hermitian_gram(f.D, f.sigma, param.epsilon, f.gram), f.sigma)


def is_hermitian(h: SesquilinearForm, eps) -> bool:
    D, s = h.D, h.sigma
    n = h.n
    return all(
        h.gram[i][j] == D.mul(s.apply(D, h.gram[j][i]), eps) for i in range(n) for j in range(n)
    )


def is_reflexive(f: SesquilinearForm, limit=10**6) -> bool:
    """``f(u, v) = 0 <=> f(v, u) = 0``, checked over every pair of vectors."""
    D = f.D
    if not D.is_finite:
        raise FormError("reflexivity is decided by enumeration over finite scalars")
    budget.require("enumeration", D.q ** (2 * f.n))
    vecs = list(itertools.product(range(D.q), repeat=f.n))
    for i, u in enumerate(vecs):
        for v in vecs[i:]:
            if D.is_zero(f(u, v)) != D.is_zero(f(v, u)):
                return False
    return True


# ---------------------------------------------------------------------------

class PseudoQuadraticForm:
    """``[f] = (q_f, h_f)`` for a sesquilinear ``f`` and form parameter."""

    def __init__(self, f: SesquilinearForm, param: FormParameter):
        if f.D != param.D:
            raise FormError("form and parameter live over different scalars")
        if f.sigma != param.sigma:
            raise FormError("form and parameter use different anti-automorphisms")
        problems = check_sigma_eps(f.D, param.sigma, param.epsilon)
        if problems:
            raise FormError("; ".join(problems))
        self.f = f
        self.param = param
        self.D = f.D
        self.n = f.n
        self.sigma = f.sigma
        self.epsilon = param.epsilon
        self.h = SesquilinearForm(self.D, hermitian_gram(self.D, self.sigma, self.epsilon, f.gram), self.sigma)

    @classmethod
    def make(cls, D, gram, sigma=None, epsilon=None, lam="fixed"):
        sigma = sigma or Sigma.identity()
        epsilon = D.one if epsilon is None else epsilon
        gram = tuple(tuple(r) for r in gram)
        return cls(SesquilinearForm(D, gram, sigma), FormParameter(D, sigma, epsilon, lam))

    def __repr__(self):
        return f"PseudoQuadraticForm(n={self.n}, {self.param!r})"

    # -- values
    def q(self, v):
        return self.param.rep(self.f(v, v))

    def q_vanishes(self, v):
        return self.param.contains(self.f(v, v))

    def hval(self, u, v):
        return self.h(u, v)

    # -- orthogonality
    def perp(self, U: mv.Subspace) -> mv.Subspace:
        """``U^perp = {v : h(u, v) = 0 for all u in U}``."""
        D, s, Hg = self.D, self.sigma, self.h.gram
        rows = []
        for u in U.basis:
            su = [s.apply(D, x) for x in u]
            row = []
            for j in range(self.n):
                acc = D.zero
                for i in range(self.n):
                    if not D.is_zero(su[i]) and not D.is_zero(Hg[i][j]):
                        acc = D.add(acc, D.mul(su[i], Hg[i][j]))
                row.append(acc)
            rows.append(tuple(row))
        return mv.nullspace(D, rows, self.n)

    def radical(self) -> mv.Subspace:
        return mv.nullspace(self.D, self.h.gram, self.n)

    def is_nondegenerate(self) -> bool:
        return self.radical().dim == 0

    def is_slightly_degenerate(self) -> bool:
        R = self.radical()
        if R.dim == 0:
            return False
        if not self.D.is_finite:
            raise FormError("slight degeneracy is decided by enumeration over finite scalars")
        return not any(self.q_vanishes(v) for v in R.points())

    def is_totally_isotropic(self, U: mv.Subspace) -> bool:
        # q(sum b_t a_t) = sum a_t^sigma q(b_t) a_t + h-cross terms modulo Lambda
        for i, b in enumerate(U.basis):
            if not self.q_vanishes(b):
                return False
            for c in U.basis[i:]:
                if not self.D.is_zero(self.h(b, c)) or not self.D.is_zero(self.h(c, b)):
                    return False
        return True

    def isotropic_points(self):
        """Normalized vectors ``v != 0`` with ``q_f(v) = 0``."""
        if not self.D.is_finite:
            raise FormError("enumeration needs a finite scalar structure")
        return [p for p in mv.enumerate_points(self.D, self.n) if self.q_vanishes(p)] if self.n else []

    # -- transformations
    def pullback(self, g) -> "PseudoQuadraticForm":
        return PseudoQuadraticForm(self.f.pullback(g), self.param)

    def scaled(self, s) -> "PseudoQuadraticForm":
        return scale_form(self, s)

    def preserved_by(self, g, vectors=None) -> bool:
        """``g`` preserves h exactly and q modulo Lambda."""
        other = self.pullback(g)
        if other.h.gram != self.h.gram:
            return False
        if vectors is None:
            vectors = mv.enumerate_vectors(self.D, self.n)
        return all(self.q(mv.mat_vec(self.D, g, v)) == self.q(v) for v in vectors)

    # -- serialization
    def to_json(self):
        D = self.D
        out = self.param.to_json()
        out["gram"] = [[D.fmt(x) for x in r] for r in self.f.gram]
        return out

    @classmethod
    def from_json(cls, data):
        if isinstance(data, str):
            data = json.loads(data)
        D = parse_scalar_structure(data["scalar"])
        sig = data.get("sigma", {"kind": "frobenius", "exponent": 0})
        if isinstance(sig, str):
            sig = {"id": {"kind": "frobenius", "exponent": 0},
                   "frobenius": {"kind": "frobenius", "exponent": 1},
                   "conj": {"kind": "conj"}}.get(sig, None)
            if sig is None:
                raise FormError(f"unknown sigma {data['sigma']!r}")
        if sig.get("kind") == "conj":
            twist = D.parse(sig["twist"]) if "twist" in sig else None
            sigma = Sigma("conj", 0, twist)
        else:
            sigma = Sigma("frobenius", int(sig.get("exponent", 0)))
        eps = D.parse(str(data.get("epsilon", "1")))
        lam = data.get("lambda", "fixed")
        if isinstance(lam, list):
            lam = [D.parse(str(x)) for x in lam]
        gram = [[D.parse(str(x)) for x in r] for r in data["gram"]]
        return cls.make(D, gram, sigma, eps, lam)


def scale_form(pq: PseudoQuadraticForm, s) -> PseudoQuadraticForm:
    """Scale by ``s``: ``G' = sG``, ``x^sigma' = s x^sigma s^-1``,
    ``eps' = s (s^sigma)^-1 eps``, ``Lambda' = s Lambda``."""
    D = pq.D
    if D.is_zero(s):
        raise FormError("cannot scale by zero")
    param = pq.param.scaled(s)
    gram = mv.mat_scale_left(D, s, pq.f.gram)
    return PseudoQuadraticForm(SesquilinearForm(D, gram, param.sigma), param)


# ---------------------------------------------------------------------------
# isotropic subspaces and the Witt index

def _extend(pq, U, iso_points):
    perp = pq.perp(U)
    return [p for p in iso_points if perp.contains_vector(p) and not U.contains_vector(p)]


def isotropic_grassmannian(pq: PseudoQuadraticForm, k: int):
    """All totally isotropic k-subspaces, sorted."""
    if k == 0:
        return [mv.zero_subspace(pq.D, pq.n)]
    pts = pq.isotropic_points()
    level = {mv.span(pq.D, [p]) for p in pts}
    meter = budget.Meter("enumeration")
    for _ in range(k - 1):
        nxt = set()
        for U in level:
            for p in _extend(pq, U, pts):
                meter.step()
                nxt.add(mv.Subspace(pq.D, pq.n, U.basis + (p,)))
        level = nxt
    return sorted(level)


@dataclass
class WittIndex:
    index: int
    witness: mv.Subspace
    visited: int


def witt_index_search(pq: PseudoQuadraticForm) -> WittIndex:
    """Depth-first extension of totally isotropic subspaces with memoization.

    The search stops as soon as a subspace of the largest dimension allowed
    by the radical, ``(n + dim rad) // 2``, is found.
    """
    D, n = pq.D, pq.n
    if not D.is_finite:
        raise FormError("the Witt index is computed by search over finite scalars")
    zero = mv.zero_subspace(D, n)
    if n == 0:
        return WittIndex(0, zero, 0)
    bound = (n + pq.radical().dim) // 2
    pts = pq.isotropic_points()
    seen = set()
    best = [zero]
    meter = budget.Meter("enumeration")

    def dfs(U):
        if U.dim > best[0].dim:
            best[0] = U
        if best[0].dim >= bound:
            return True
        for p in _extend(pq, U, pts):
            W = mv.Subspace(D, n, U.basis + (p,))
            if W in seen:
                continue
            seen.add(W)
            meter.step()
            if dfs(W):
                return True
        return False

    dfs(zero)
    return WittIndex(best[0].dim, best[0], len(seen))


def witt_index(pq: PseudoQuadraticForm) -> int:
    return witt_index_search(pq).index


@dataclass
class WittDecomposition:
    form: PseudoQuadraticForm
    hyperbolic_pairs: list
    anisotropic_basis: list
    index: int = field(init=False)

    def __post_init__(self):
        self.index = len(self.hyperbolic_pairs)

    @property
    def basis_change(self):
        cols = [v for pair in self.hyperbolic_pairs for v in pair] + list(self.anisotropic_basis)
        return mv.transpose(cols)

    def check(self) -> dict:
        """Verify every structural claim of the decomposition."""
        pq, D = self.form, self.form.D
        pairs = self.hyperbolic_pairs
        out = {}
        out["dimension"] = 2 * self.index + len(self.anisotropic_basis) == pq.n
        out["pairs_normalized"] = all(
            pq.hval(e, f) == D.one and pq.q_vanishes(e) and pq.q_vanishes(f) for e, f in pairs
        )
        vecs = [v for pair in pairs for v in pair]
        ok = True
        for a, b in itertools.combinations(range(len(pairs)), 2):
            for x in pairs[a]:
                for y in pairs[b]:
                    ok &= D.is_zero(pq.hval(x, y)) and D.is_zero(pq.hval(y, x))
        out["pairs_orthogonal"] = ok
        out["kernel_orthogonal"] = all(
            D.is_zero(pq.hval(x, y)) for x in vecs for y in self.anisotropic_basis
        )
        V0 = mv.Subspace(D, pq.n, self.anisotropic_basis) if self.anisotropic_basis else mv.zero_subspace(D, pq.n)
        out["kernel_anisotropic"] = not any(pq.q_vanishes(v) for v in V0.points())
        P = self.basis_change
        try:
            mv.mat_inv(D, P)
            out["basis"] = True
        except ValueError:
            out["basis"] = False
        out["all_pass"] = all(out.values())
        return out

    def to_json(self):
        fmt = self.form.D.fmt
        return {
            "index": self.index,
            "hyperbolic_pairs": [[[fmt(x) for x in e], [fmt(x) for x in f]] for e, f in self.hyperbolic_pairs],
            "anisotropic_basis": [[fmt(x) for x in v] for v in self.anisotropic_basis],
            "anisotropic_dim": len(self.anisotropic_basis),
        }


def witt_decompose(pq: PseudoQuadraticForm) -> WittDecomposition:
    """Split V as an orthogonal sum of hyperbolic lines and an anisotropic kernel.

    Greedy: take an isotropic ``u`` in the current complement W and any ``w``
    in W with ``t = h(u, w) != 0``; rescale ``w <- w t^-1`` so ``h(u, w) = 1``.
    Since ``q(w + u c) = q(w) + h(w, u) c = q(w) + eps c`` modulo Lambda, the
    partner ``w' = w - u eps^-1 f(w, w)`` is isotropic and still has
    ``h(u, w') = 1``.  Then W shrinks to ``W cap <u, w'>^perp``.
    """
    D, n = pq.D, pq.n
    if not D.is_finite:
        raise FormError("decomposition searches vectors over finite scalars")
    if not pq.is_nondegenerate():
        raise DegenerateForm("witt_decompose needs a non-degenerate form")
    W = mv.full_subspace(D, n)
    pairs = []
    eps_inv = D.inv(pq.epsilon)
    meter = budget.Meter("enumeration")
    while W.dim:
        u = None
        for v in W.points():
            meter.step()
            if pq.q_vanishes(v):
                u = v
                break
        if u is None:
            break
        w = next((b for b in W.basis if not D.is_zero(pq.hval(u, b))), None)
        if w is None:
            raise DegenerateForm("restriction became degenerate")  # cannot happen for nondegenerate h
        t = pq.hval(u, w)
        w = mv.vec_scale(D, w, D.inv(t))
        c = D.mul(eps_inv, pq.f(w, w))
        w = mv.vec_sub(D, w, mv.vec_scale(D, u, c))
        pairs.append((tuple(u), tuple(w)))
        W = mv.meet(W, pq.perp(mv.span(D, [u, w])))
    return WittDecomposition(pq, pairs, list(W.basis))


# ---------------------------------------------------------------------------
# slightly degenerate forms

@dataclass
class Reduction:
    """A slightly degenerate form and its non-degenerate quotient.

    ``complement`` spans a complement of the radical; a vector of V' is a
    coefficient tuple on it.  ``project`` sends a vector of V to V'.
    """

    source: PseudoQuadraticForm
    radical: mv.Subspace
    complement: list
    reduced: PseudoQuadraticForm

    def project(self, v):
        # coordinates in the basis radical + complement, then drop the radical part
        D = self.source.D
        P = mv.transpose(list(self.radical.basis) + list(self.complement))
        coords = mv.mat_vec(D, mv.mat_inv(D, P), v)
        return coords[self.radical.dim:]

    def map_subspace(self, U: mv.Subspace) -> mv.Subspace:
        D = self.source.D
        return mv.Subspace(D, len(self.complement), [self.project(b) for b in U.basis])


def reduce_slightly_degenerate(pq: PseudoQuadraticForm) -> Reduction:
    """Pass to ``V / rad`` with ``Lambda' = {c : c + Lambda in q_f(rad)}``."""
    D = pq.D
    if not pq.is_slightly_degenerate():
        raise DegenerateForm("form is not slightly degenerate")
    R = pq.radical()
    lam2 = set()
    for v in R.vectors():
        x = pq.f(v, v)
        lam2 |= {D.add(x, l) for l in pq.param.elements}
    piv = set(R.pivots)
    comp = []
    for j in range(pq.n):
        if j not in piv:
            e = [D.zero] * pq.n
            e[j] = D.one
            comp.append(tuple(e))
    gram = tuple(tuple(pq.f(a, b) for b in comp) for a in comp)
    param = FormParameter(D, pq.sigma, pq.epsilon, sorted(lam2))
    reduced = PseudoQuadraticForm(SesquilinearForm(D, gram, pq.sigma), param)
    return Reduction(pq, R, comp, reduced)


# ---------------------------------------------------------------------------
# form parameters: checks and classification

def form_parameter_check(param: FormParameter) -> dict:
    D, s, eps = param.D, param.sigma, param.epsilon
    if not D.is_finite:
        raise FormError("exhaustive parameter checks need a finite scalar structure")
    lam = param.elements
    lower, upper = param.lower(), param.upper()
    rep = {}
    rep["sigma_eps"] = check_sigma_eps(D, s, eps) == []
    rep["additive_subgroup"] = all(D.sub(a, b) in lam for a in lam for b in lam)
    rep["lower_inclusion"] = lower <= lam
    rep["upper_inclusion"] = lam <= upper
    rep["stable"] = all(
        D.mul(D.mul(s.apply(D, x), l), x) in lam for x in D.elements() for l in lam
    )
    checks = dict(rep)
    if D.char == 2 and s.is_identity(D):
        rep["square_submodule"] = all(D.mul(D.mul(x, x), l) in lam for x in D.elements() for l in lam)
    if lam == frozenset({D.zero}):
        # Lambda = 0 forces eps = 1, sigma = id and commutativity
        rep["zero_implies_orthogonal"] = eps == D.one and s.is_identity(D) and D.is_commutative
    rep["lower_size"] = len(lower)
    rep["upper_size"] = len(upper)
    rep["lambda_size"] = len(lam)
    rep["is_form_parameter"] = all(checks.values())
    rep["all_pass"] = all(v for k, v in rep.items() if isinstance(v, bool))
    return rep


CASES = ("Symplectic", "Orthogonal", "DefectiveOrthogonal", "ClassicalUnitary", "RestrictedUnitary")


@dataclass
class Classification:
    case: str | None
    scale: object
    reason: str
    param: FormParameter

    def to_json(self):
        D = self.param.D
        return {
            "case": self.case,
            "scale": D.fmt(self.scale),
            "reason": self.reason,
            "normalized": self.param.to_json(),
        }


def _classify_exact(param: FormParameter):
    D, s, eps = param.D, param.sigma, param.epsilon
    one, minus = D.one, D.neg(D.one)
    if D.is_finite:
        lam = param.elements
        is_full = lam == frozenset(D.elements())
        is_zero = lam == frozenset({D.zero})
        upper = param.upper()
    else:
        is_full = param.tag == "full"
        is_zero = param.tag == "zero"
        upper = None
    ident = s.is_identity(D)
    if ident and eps == minus and is_full:
        return "Symplectic", "(sigma, eps, Lambda) = (id, -1, D)"
    if ident and eps == one and is_zero:
        return "Orthogonal", "(sigma, eps, Lambda) = (id, 1, 0)"
    if ident and eps == one and not is_zero and not is_full:
        if D.is_finite:
            raise FormError(
                "defective orthogonal parameters need 0 != Lambda != D, which a perfect "
                "field (every finite field) does not admit"
            )
        return "DefectiveOrthogonal", "(sigma, eps) = (id, 1) and 0 != Lambda != D"
    if not ident and eps == one:
        sq_id = all(s.apply(D, s.apply(D, a)) == a for a in (D.elements() if D.is_finite else (D.one, D.i, D.j, D.k)))
        if sq_id:
            maximal = (param.elements == upper) if D.is_finite else param.tag in ("fixed", "trace")
            if maximal:
                return "ClassicalUnitary", "sigma != id = sigma^2, eps = 1, Lambda = D^{sigma,-1}"
            if D.is_finite or D.is_commutative:
                raise FormError(
                    "restricted unitary parameters need a non-commutative scalar structure "
                    "of characteristic 2"
                )
            return "RestrictedUnitary", "sigma != id = sigma^2, eps = 1, Lambda < D^{sigma,-1}"
    return None, None


def classify_form_case(param: FormParameter, normalize: bool = True) -> Classification:
    """Sort a form parameter into one of the five classical cases.

    With ``normalize`` the parameter is first tried as given, then after
    scaling by each nonzero scalar (finite D) or by 1, i, j, k, 1+i (H).
    """
    D = param.D
    if D.is_finite:
        rep = form_parameter_check(param)
        if not rep["is_form_parameter"]:
            failed = [k for k in ("sigma_eps", "additive_subgroup", "lower_inclusion", "upper_inclusion", "stable") if not rep[k]]
            raise FormError("not a form parameter: fails " + ", ".join(failed))
        scalars = list(D.nonzero())
    else:
        bad = check_sigma_eps(D, param.sigma, param.epsilon)
        if bad:
            raise FormError("; ".join(bad))
        scalars = [D.one, D.i, D.j, D.k, D.add(D.one, D.i)]
    if not normalize:
        scalars = [D.one]
    for s in scalars:
        p2 = param if s == D.one else param.scaled(s)
        case, reason = _classify_exact(p2)
        if case is not None:
            return Classification(case, s, reason, p2)
    raise FormError("parameter matches none of the five cases after scaling")


# ---------------------------------------------------------------------------
# convenient constructors

def block_diagonal(D, blocks):
    n = sum(len(b) for b in blocks)
    rows = [[D.zero] * n for _ in range(n)]
    off = 0
    for b in blocks:
        for i, r in enumerate(b):
            for j, x in enumerate(r):
                rows[off + i][off + j] = x
        off += len(b)
    return tuple(tuple(r) for r in rows)


def symplectic_form(F, m) -> PseudoQuadraticForm:
    """Standard symplectic form on F^(2m): Gram ``[[0,1],[0,0]]`` blocks, eps = -1, Lambda = D."""
    block = ((F.zero, F.one), (F.zero, F.zero))
    return PseudoQuadraticForm.make(F, block_diagonal(F, [block] * m), Sigma.identity(), F.neg(F.one), "full")


def hyperbolic_form(F, m, sigma=None, epsilon=None, lam="zero") -> PseudoQuadraticForm:
    """Hyperbolic module of rank m: Gram ``[[0, 1_m], [0, 0]]``."""
    n = 2 * m
    gram = [[F.zero] * n for _ in range(n)]
    for i in range(m):
        gram[i][m + i] = F.one
    return PseudoQuadraticForm.make(F, gram, sigma or Sigma.identity(), F.one if epsilon is None else epsilon, lam)


def orthogonal_form(F, gram) -> PseudoQuadraticForm:
    return PseudoQuadraticForm.make(F, gram, Sigma.identity(), F.one, "zero")


def unitary_form(F, gram) -> PseudoQuadraticForm:
    """``(x -> x^sqrt(q), 1, D^{sigma,-1})`` on GF(q), q a square."""
    if F.k % 2:
        raise FormError("unitary forms need a field of square order")
    return PseudoQuadraticForm.make(F, gram, Sigma.frobenius(F.k // 2), F.one, "fixed")


def o5_example(F) -> PseudoQuadraticForm:
    """The 5-dimensional form ``q(x) = x1 x2 + x3 x4 + x5^2`` in characteristic 2."""
    if F.char != 2:
        raise FormError("this example lives in characteristic 2")
    z, o = F.zero, F.one
    gram = [[z] * 5 for _ in range(5)]
    gram[0][1] = gram[2][3] = gram[4][4] = o
    return orthogonal_form(F, gram)


def random_form(F, case, n, rng, max_tries=200) -> PseudoQuadraticForm:
    """A random non-degenerate form of the requested case on F^n."""
    for _ in range(max_tries):
        G = [[F.random(rng) for _ in range(n)] for _ in range(n)]
        if case == "Symplectic":
            for i in range(n):
                for j in range(i + 1):
                    G[i][j] = F.zero
            pq = PseudoQuadraticForm.make(F, G, Sigma.identity(), F.neg(F.one), "full")
        elif case == "Orthogonal":
            for i in range(n):
                for j in range(i):
                    G[i][j] = F.zero
            pq = orthogonal_form(F, G)
        elif case == "ClassicalUnitary":
            pq = unitary_form(F, G)
        else:
            raise FormError(f"no random generator for case {case!r}")
        if pq.is_nondegenerate():
            return pq
    raise FormError(f"no non-degenerate {case} form of dimension {n} found")
