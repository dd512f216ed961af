"""Named groups such as ``psl(2,7)`` or ``sp(4,2)`` as permutation groups."""

from __future__ import annotations

import re

from . import classical as cl
from . import forms as fm
from . import matvec as mv
from . import permgrp as pg
from .scalar import GF

_SPEC = re.compile(r"^\s*([a-z]+)\s*\(\s*(\d+)\s*(?:,\s*(\d+)\s*)?\)\s*$")

FAMILIES = ("sym", "alt", "psl", "pel", "pgl", "el", "sl", "gl", "sp", "o", "u")


class NamedGroupError(ValueError):
    pass


def symplectic_generators(pq):
    """Symplectic transvections ``x -> x + u a h(u, x)`` for every point u and
    a in an additive basis."""
    D, n = pq.D, pq.n
    Hg = pq.h.gram
    gens = []
    for u in mv.enumerate_points(D, n):
        row = tuple(
            _dot(D, u, [Hg[i][j] for i in range(n)]) for j in range(n)
        )
        for a in D.additive_basis():
            gens.append(cl.transvection(D, u, tuple(D.mul(a, x) for x in row)))
    return gens


def _dot(D, u, col):
    acc = D.zero
    for x, y in zip(u, col):
        acc = D.add(acc, D.mul(x, y))
    return acc


def orthogonal_standard(F, n):
    """``x1 x2 + ... + x_{2m-1} x_{2m}`` plus ``x_n^2`` when n is odd."""
    gram = [[F.zero] * n for _ in range(n)]
    for i in range(0, n - 1, 2):
        gram[i][i + 1] = F.one
    if n % 2:
        gram[n - 1][n - 1] = F.one
    return fm.orthogonal_form(F, gram)


def parse_named_group(spec: str) -> tuple[pg.PermGroup, str]:
    """Return the group and a description of the action it is given on."""
    m = _SPEC.match(spec.lower())
    if not m:
        raise NamedGroupError(f"cannot parse {spec!r}; expected name(n) or name(n,q)")
    name, a, b = m.group(1), int(m.group(2)), m.group(3)
    if name not in FAMILIES:
        raise NamedGroupError(f"unknown family {name!r}; known: {', '.join(FAMILIES)}")
    if name in ("sym", "alt"):
        if b is not None or a < 1:
            raise NamedGroupError(f"{name} takes one positive parameter")
        G = pg.symmetric_group(a) if name == "sym" else pg.alternating_group(a)
        return G, f"natural action on {a} points"
    if b is None:
        raise NamedGroupError(f"{name} takes two parameters (n, q)")
    n, q = a, int(b)
    if n < 1:
        raise NamedGroupError("dimension must be positive")
    try:
        F = GF(q)
    except ValueError as exc:
        raise NamedGroupError(str(exc)) from None
    if name in ("psl", "pel"):
        return cl.build_PEL(n, F).perm_group, "action on the points of PG"
    if name == "pgl":
        return cl.build_PGL(n, F).perm_group, "action on the points of PG"
    if name in ("el", "sl"):
        return cl.build_EL(n, F).perm_group, "action on nonzero vectors"
    if name == "gl":
        return cl.build_GL(n, F).perm_group, "action on nonzero vectors"
    if name == "sp":
        if n % 2:
            raise NamedGroupError("sp needs an even dimension")
        pq = fm.symplectic_form(F, n // 2)
        act = cl.VectorAction(F, n)
        return pg.PermGroup([act.perm(g) for g in symplectic_generators(pq)], len(act.domain)), "action on nonzero vectors"
    if name == "o":
        iso = cl.build_unitary(orthogonal_standard(F, n), method="backtrack")
        return iso.vector_group(), "isometries of the standard quadratic form, action on nonzero vectors"
    # unitary: the form lives over GF(q^2); a + a^sigma = 1 makes h the identity
    F2 = GF(q * q)
    a = next(x for x in F2.elements() if F2.add(x, F2.frobenius(x, F2.k // 2)) == F2.one)
    iso = cl.build_unitary(fm.unitary_form(F2, mv.diagonal(F2, [a] * n)), method="backtrack")
    return iso.vector_group(), "isometries of the standard hermitian form over GF(q^2), action on nonzero vectors"
