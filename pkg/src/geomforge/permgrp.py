"""Permutation groups: stabilizer chains, normal structure, isomorphism search.

A permutation of ``{0..n-1}`` is a tuple of images.  Products follow the
left-action convention of matrices: ``compose(a, b)`` applies ``b`` first,
so the permutation of a matrix product ``gh`` is ``compose(perm(g), perm(h))``.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter, deque

from . import budget


def identity(n):
    return tuple(range(n))


def compose(a, b):
    """``a o b``: first ``b``, then ``a``."""
    return tuple(map(a.__getitem__, b))


def inverse(a):
    out = [0] * len(a)
    for i, x in enumerate(a):
        out[x] = i
    return tuple(out)


def is_identity(a):
    return all(i == x for i, x in enumerate(a))


def perm_order(a):
    seen = [False] * len(a)
    order = 1
    for i in range(len(a)):
        if not seen[i]:
            length = 0
            j = i
            while not seen[j]:
                seen[j] = True
                j = a[j]
                length += 1
            order = order * length // math.gcd(order, length)
    return order


def power(a, e):
    result = identity(len(a))
    base = a
    if e < 0:
        base, e = inverse(a), -e
    while e:
        if e & 1:
            result = compose(result, base)
        base = compose(base, base)
        e >>= 1
    return result


def commutator(a, b):
    """``[a, b] = a b a^-1 b^-1``."""
    return compose(compose(a, b), compose(inverse(a), inverse(b)))


def conjugate(g, x):
    """``g x g^-1``."""
    return compose(compose(g, x), inverse(g))


def from_cycles(n, cycles):
    img = list(range(n))
    for cyc in cycles:
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            img[a] = b
    return tuple(img)


def parse_perm(text):
    """One-line images ``"0 2 1 ..."``."""
    img = tuple(int(t) for t in text.split())
    if sorted(img) != list(range(len(img))):
        raise ValueError(f"not a permutation: {text!r}")
    return img


def format_perm(a):
    return " ".join(map(str, a))


def first_moved(a):
    for i, x in enumerate(a):
        if i != x:
            return i
    return None


# ---------------------------------------------------------------------------

class PermGroup:
    """A permutation group given by generators, with a lazily built stabilizer chain.

    The chain is computed by deterministic Schreier-Sims: base points are the
    optional ``base`` prefix followed by the smallest point moved by each
    generator that fixes the current base; Schreier generators are tested
    level by level, and a tested pair is never tested again because
    transversals only grow.
    """

    def __init__(self, gens, degree=None, base=()):
        gens = [tuple(g) for g in gens]
        if degree is None:
            if not gens:
                raise ValueError("degree needed for a group without generators")
            degree = len(gens[0])
        if any(len(g) != degree for g in gens):
            raise ValueError("generators act on domains of different size")
        seen = set()
        self.gens = []
        for g in gens:
            if not is_identity(g) and g not in seen:
                seen.add(g)
                self.gens.append(g)
        self.degree = degree
        self._base_prefix = tuple(base)
        self._chain = None
        self._elements = None
        self._classes = None

    def __repr__(self):
        return f"PermGroup(degree={self.degree}, gens={len(self.gens)})"

    @property
    def identity(self):
        return identity(self.degree)

    # -- stabilizer chain
    def _build_chain(self):
        n = self.degree
        ident = identity(n)
        base, S, T, tested = [], [], [], []

        def add_level(b):
            base.append(b)
            S.append([])
            T.append({b: ident})
            tested.append(set())

        def extend_orbit(i):
            orbit = T[i]
            queue = deque(orbit)
            while queue:
                x = queue.popleft()
                ux = orbit[x]
                for s in S[i]:
                    y = s[x]
                    if y not in orbit:
                        orbit[y] = compose(s, ux)
                        queue.append(y)

        def sift(h, start):
            for l in range(start, len(base)):
                x = h[base[l]]
                u = T[l].get(x)
                if u is None:
                    return h, l
                h = compose(inverse(u), h)
            return h, len(base)

        for b in self._base_prefix:
            add_level(b)
        for g in self.gens:
            if all(g[b] == b for b in base):
                add_level(first_moved(g))
        for g in self.gens:
            for i in range(len(base)):
                S[i].append(g)
                if g[base[i]] != base[i]:
                    break
        for i in range(len(base)):
            extend_orbit(i)

        meter = budget.Meter("enumeration")
        i = len(base) - 1
        while i >= 0:
            restart = None
            for x in sorted(T[i]):
                ux = T[i][x]
                for si, s in enumerate(S[i]):
                    if (x, si) in tested[i]:
                        continue
                    meter.step()
                    h = compose(inverse(T[i][s[x]]), compose(s, ux))
                    if not is_identity(h):
                        res, j = sift(h, i + 1)
                        if not is_identity(res):
                            if j == len(base):
                                add_level(first_moved(res))
                            for l in range(i + 1, j + 1):
                                S[l].append(res)
                                extend_orbit(l)
                            restart = j
                            break
                    tested[i].add((x, si))
                if restart is not None:
                    break
            if restart is not None:
                i = restart
            else:
                i -= 1
        self._chain = (base, S, T)
        order = 1
        for t in T:
            order *= len(t)
        budget.require("group_order", order)
        self._order = order

    @property
    def chain(self):
        if self._chain is None:
            self._build_chain()
        return self._chain

    @property
    def base(self):
        return tuple(self.chain[0])

    def order(self) -> int:
        self.chain
        return self._order

    def contains(self, g) -> bool:
        base, S, T = self.chain
        g = tuple(g)
        for l, b in enumerate(base):
            u = T[l].get(g[b])
            if u is None:
                return False
            g = compose(inverse(u), g)
        return is_identity(g)

    __contains__ = contains

    def elements(self):
        """Every element, as products of transversal representatives."""
        if self._elements is None:
            base, S, T = self.chain
            budget.require("enumeration", self.order())
            out = [self.identity]
            for t in reversed(T):
                reps = [t[x] for x in sorted(t)]
                out = [compose(u, g) for u in reps for g in out]
            self._elements = out
        return self._elements

    # -- orbits and stabilizers
    def orbit(self, x):
        seen = {x}
        queue = [x]
        while queue:
            y = queue.pop()
            for g in self.gens:
                z = g[y]
                if z not in seen:
                    seen.add(z)
                    queue.append(z)
        return frozenset(seen)

    def orbits(self, points=None):
        points = range(self.degree) if points is None else points
        out, seen = [], set()
        for x in sorted(points):
            if x not in seen:
                o = self.orbit(x)
                seen |= o
                out.append(o)
        return out

    def is_transitive(self, points=None):
        points = set(range(self.degree) if points is None else points)
        if not points:
            return True
        return self.orbit(min(points)) >= points

    def pointwise_stabilizer(self, points) -> "PermGroup":
        points = tuple(points)
        G = PermGroup(self.gens, self.degree, base=points)
        base, S, T = G.chain
        return PermGroup(S[len(points)] if len(points) < len(base) else [], self.degree)

    def stabilizer(self, x) -> "PermGroup":
        return self.pointwise_stabilizer((x,))

    def setwise_stabilizer(self, points) -> "PermGroup":
        """By filtering elements (desk scale only)."""
        pts = frozenset(points)
        return PermGroup([g for g in self.elements() if frozenset(g[p] for p in pts) == pts], self.degree)

    def transitivity_degree(self) -> int:
        """Largest t such that the group is t-transitive (0 if intransitive)."""
        n = self.degree
        if not self.is_transitive():
            return 0
        t = 1
        while t < n:
            H = self.pointwise_stabilizer(range(t))
            if not H.is_transitive(range(t, n)):
                return t
            t += 1
        return n

    # -- subgroups and normal structure
    def subgroup(self, gens) -> "PermGroup":
        return PermGroup(gens, self.degree)

    def is_subgroup_of(self, other) -> bool:
        return all(other.contains(g) for g in self.gens)

    def normal_closure(self, gens) -> "PermGroup":
        """Smallest normal subgroup of self containing ``gens``."""
        N = PermGroup(list(gens), self.degree)
        changed = True
        while changed:
            changed = False
            for g in self.gens:
                for x in list(N.gens):
                    c = conjugate(g, x)
                    if not N.contains(c):
                        N = PermGroup(N.gens + [c], self.degree)
                        changed = True
        return N

    def is_normal_in(self, G) -> bool:
        return all(self.contains(conjugate(g, x)) for g in G.gens for x in self.gens)

    def derived_subgroup(self) -> "PermGroup":
        comms = [commutator(a, b) for a, b in itertools.combinations(self.gens, 2)]
        return self.normal_closure(comms)

    def is_perfect(self) -> bool:
        return self.derived_subgroup().order() == self.order()

    def derived_series(self):
        out = [self]
        while True:
            D = out[-1].derived_subgroup()
            if D.order() == out[-1].order():
                return out
            out.append(D)

    def small_generators(self):
        """A subset of the generators that still generates the group."""
        kept = []
        H = PermGroup([], self.degree)
        for g in self.gens:
            if not H.contains(g):
                kept.append(g)
                H = PermGroup(kept, self.degree)
                if H.order() == self.order():
                    break
        return kept

    def conjugacy_classes(self):
        """Classes as sorted lists, ordered by their smallest element."""
        if self._classes is None:
            gens = self.small_generators()
            ginv = [inverse(g) for g in gens]
            seen = set()
            classes = []
            for e in sorted(self.elements()):
                if e in seen:
                    continue
                cls = {e}
                queue = [e]
                while queue:
                    x = queue.pop()
                    for g, gi in zip(gens, ginv):
                        y = compose(compose(g, x), gi)
                        if y not in cls:
                            cls.add(y)
                            queue.append(y)
                seen |= cls
                classes.append(sorted(cls))
            self._classes = classes
        return self._classes

    def class_representatives(self):
        return [c[0] for c in self.conjugacy_classes()]

    def class_invariant(self):
        """Multiset of (element order, class size)."""
        return sorted(Counter((perm_order(c[0]), len(c)) for c in self.conjugacy_classes()).items())

    def is_simple(self) -> bool:
        if self.order() == 1:
            return False
        for rep in self.class_representatives():
            if is_identity(rep):
                continue
            if self.normal_closure([rep]).order() != self.order():
                return False
        return True

    def normal_subgroups(self):
        """All normal subgroups: closures of class representatives and their joins."""
        found = {}

        def key(N):
            return frozenset(N.elements())

        for rep in self.class_representatives():
            N = self.normal_closure([rep]) if not is_identity(rep) else PermGroup([], self.degree)
            found.setdefault(key(N), N)
        changed = True
        while changed:
            changed = False
            items = list(found.values())
            for A, B in itertools.combinations(items, 2):
                J = PermGroup(A.gens + B.gens, self.degree)
                k = key(J)
                if k not in found:
                    found[k] = J
                    changed = True
        return sorted(found.values(), key=lambda N: (N.order(), sorted(N.elements())))

    def acts_regularly_on(self, points) -> bool:
        points = set(points)
        if self.order() != len(points):
            return False
        if any(g[p] not in points for g in self.gens for p in points):
            return False
        return self.is_transitive(points)


def regular_normal_subgroups(G: PermGroup, x):
    """Normal subgroups of ``G_x`` acting regularly on the other points."""
    Gx = G.stabilizer(x)
    rest = [p for p in range(G.degree) if p != x]
    return [N for N in Gx.normal_subgroups() if N.acts_regularly_on(rest)]


def brute_force_order(G: PermGroup, limit=10**6) -> int:
    """Size of the closure of the generators under multiplication (oracle)."""
    budget.require("enumeration", limit)
    seen = {G.identity}
    frontier = [G.identity]
    while frontier:
        nxt = []
        for e in frontier:
            for g in G.gens:
                y = compose(g, e)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
                    if len(seen) > limit:
                        raise budget.BudgetExceeded("enumeration", len(seen), limit)
        frontier = nxt
    return len(seen)


# ---------------------------------------------------------------------------
# named families

def symmetric_group(n) -> PermGroup:
    if n < 2:
        return PermGroup([], max(n, 1))
    gens = [from_cycles(n, [[0, 1]])]
    if n > 2:
        gens.append(from_cycles(n, [list(range(n))]))
    return PermGroup(gens, n)


def alternating_group(n) -> PermGroup:
    if n < 3:
        return PermGroup([], max(n, 1))
    return PermGroup([from_cycles(n, [[0, 1, i]]) for i in range(2, n)], n)


# ---------------------------------------------------------------------------
# isomorphism testing

def _words(k, max_len):
    """Words in generators 0..k-1 and inverses (encoded -1..-k), shortest first."""
    letters = list(range(k)) + [-(i + 1) for i in range(k)]
    out = []
    for length in range(1, max_len + 1):
        for w in itertools.product(letters, repeat=length):
            # skip words with an immediate cancellation
            if any(a == -(b + 1) or b == -(a + 1) for a, b in zip(w, w[1:])):
                continue
            out.append(w)
    return out


def _eval(word, gens, invs, n):
    g = identity(n)
    for a in word:
        g = compose(g, gens[a] if a >= 0 else invs[-a - 1])
    return g


def _signature(gens, words, n):
    invs = [inverse(g) for g in gens]
    return tuple(perm_order(_eval(w, gens, invs, n)) for w in words)


def extend_to_homomorphism(G: PermGroup, gens, images, degree_h):
    """Extend ``gens[i] -> images[i]`` along the Cayley graph of G.

    Returns the element map when it is well defined (hence a homomorphism),
    otherwise None.
    """
    ident_g = G.identity
    phi = {ident_g: identity(degree_h)}
    queue = deque([ident_g])
    while queue:
        g = queue.popleft()
        pg = phi[g]
        for s, t in zip(gens, images):
            y = compose(g, s)
            py = compose(pg, t)
            old = phi.get(y)
            if old is None:
                phi[y] = py
                queue.append(y)
            elif old != py:
                return None
    return phi


def _generating_tuple(G: PermGroup):
    """Two elements generating G when possible, found deterministically; else small generators.

    Candidates pair a class representative with members of other classes.
    """
    order = G.order()
    if order == 1:
        return []
    classes = sorted(G.conjugacy_classes(), key=lambda c: (len(c), c[0]))
    for c in classes:
        if perm_order(c[0]) == order:
            return [c[0]]
    # large element orders first for a, small classes first for b (fewer image candidates)
    reps = sorted((c[0] for c in classes if not is_identity(c[0])), key=lambda x: (-perm_order(x), x))
    for a in reps:
        for cb in classes:
            if is_identity(cb[0]):
                continue
            for b in cb:
                if PermGroup([a, b], G.degree).order() == order:
                    return [a, b]
    return G.small_generators()


def iso_small(G: PermGroup, H: PermGroup, word_len=4):
    """Decide isomorphism of two small groups.

    Returns a dict: ``isomorphic`` (bool), and either ``invariant`` (a
    distinguishing invariant with both values) or ``generators`` with
    ``images`` (an isomorphism certificate, verified by extension along the
    Cayley graph and by bijectivity).
    """
    if G.order() != H.order():
        return {"isomorphic": False, "invariant": "order", "values": [G.order(), H.order()]}
    ig, ih = G.class_invariant(), H.class_invariant()
    if ig != ih:
        return {"isomorphic": False, "invariant": "class_orders_and_sizes", "values": [ig, ih]}
    dg = [K.order() for K in G.derived_series()]
    dh = [K.order() for K in H.derived_series()]
    if dg != dh:
        return {"isomorphic": False, "invariant": "derived_series", "values": [dg, dh]}

    gens = _generating_tuple(G)
    n_g, n_h = G.degree, H.degree
    if not gens:
        return {"isomorphic": True, "generators": [], "images": []}
    words = _words(len(gens), word_len)
    target = _signature(gens, words, n_g)

    def class_key(K, x):
        for c in K.conjugacy_classes():
            if x in set(c):
                return perm_order(c[0]), len(c)
        raise AssertionError("element outside its group")

    h_classes = H.conjugacy_classes()
    cand = []
    for idx, g in enumerate(gens):
        key = class_key(G, g)
        match = [c for c in h_classes if (perm_order(c[0]), len(c)) == key]
        if idx == 0:
            # inner automorphisms let the first image be a class representative
            cand.append([c[0] for c in match])
        else:
            cand.append([x for c in match for x in c])

    meter = budget.Meter("enumeration")
    for images in itertools.product(*cand):
        meter.step()
        if _signature(list(images), words, n_h) != target:
            continue
        phi = extend_to_homomorphism(G, gens, list(images), n_h)
        if phi is None:
            continue
        if len(set(phi.values())) == H.order():
            return {
                "isomorphic": True,
                "generators": [list(g) for g in gens],
                "images": [list(x) for x in images],
            }
    return {"isomorphic": False, "invariant": "exhaustive_generator_search", "values": None}


def verify_isomorphism(G, H, gens, images) -> bool:
    """Independent check of an isomorphism certificate."""
    if PermGroup(gens, G.degree).order() != G.order():
        return False
    if any(not H.contains(x) for x in images):
        return False
    phi = extend_to_homomorphism(G, [tuple(g) for g in gens], [tuple(x) for x in images], H.degree)
    return phi is not None and len(set(phi.values())) == H.order() == G.order()
