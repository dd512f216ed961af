import itertools

import pytest
from hypothesis import given, strategies as st

from geomforge import classical as cl
from geomforge import permgrp as pg
from geomforge.named import parse_named_group
from geomforge.scalar import GF

perms6 = st.permutations(list(range(6))).map(tuple)


def affine_line(p):
    """AGL_1(p) on p points."""
    shift = tuple((x + 1) % p for x in range(p))
    scale = tuple((GF(p).primitive * x) % p for x in range(p))
    return pg.PermGroup([shift, scale], p), pg.PermGroup([shift], p)


@given(perms6, perms6, perms6)
def test_composition_associative_with_exact_inverses(a, b, c):
    assert pg.compose(pg.compose(a, b), c) == pg.compose(a, pg.compose(b, c))
    assert pg.is_identity(pg.compose(a, pg.inverse(a)))
    # compose applies the right factor first
    assert pg.compose(a, b)[0] == a[b[0]]


@given(st.lists(perms6, min_size=1, max_size=3))
def test_order_matches_brute_force(gens):
    G = pg.PermGroup(gens, 6)
    assert G.order() == pg.brute_force_order(G, limit=720)
    assert all(G.contains(g) for g in gens)
    # a second chain with a different base agrees
    assert pg.PermGroup(gens, 6, base=(5, 4)).order() == G.order()


@given(st.lists(perms6, min_size=1, max_size=3))
def test_derived_subgroup_is_normal(gens):
    G = pg.PermGroup(gens, 6)
    D = G.derived_subgroup()
    assert all(D.contains(pg.conjugate(g, x)) for g in G.gens for x in D.gens)
    assert G.order() % D.order() == 0


def test_trivial_group():
    G = pg.PermGroup([], 4)
    assert G.order() == 1
    assert G.orbit(2) == {2}


def test_small_orders():
    assert pg.symmetric_group(3).order() == 6
    assert parse_named_group("psl(2,7)")[0].order() == 168


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_symmetric_groups_are_fully_transitive(n):
    assert pg.symmetric_group(n).transitivity_degree() == n
    assert pg.alternating_group(n).order() == pg.symmetric_group(n).order() // 2


def test_pel3_2_is_two_transitive():
    assert cl.build_PEL(3, GF(2)).perm_group.transitivity_degree() == 2


def test_lines_of_pg3_2_are_not_two_transitive():
    G = cl.build_EL(4, GF(2)).on(cl.SubspaceAction(GF(2), 4, 2)).perm_group
    assert G.degree == 35 and G.transitivity_degree() == 1
    stab = G.stabilizer(0)
    # the other lines split into those meeting line 0 and those skew to it
    assert sorted(len(o) for o in stab.orbits(range(1, 35))) == [16, 18]


def test_perfectness():
    assert not parse_named_group("psl(2,2)")[0].is_perfect()
    assert not parse_named_group("psl(2,3)")[0].is_perfect()
    G = parse_named_group("psl(2,5)")[0]
    assert G.is_perfect() and G.derived_subgroup().order() == 60


def test_simplicity():
    assert parse_named_group("psl(3,2)")[0].is_simple()
    assert not parse_named_group("psl(2,3)")[0].is_simple()
    assert pg.alternating_group(5).is_simple()
    assert not pg.symmetric_group(4).is_simple()


def test_normal_subgroups_of_sym4():
    orders = [N.order() for N in pg.symmetric_group(4).normal_subgroups()]
    assert orders == [1, 4, 12, 24]


def test_regular_normal_subgroups():
    ms = cl.moufang_set_projective_line(GF(5))
    found = pg.regular_normal_subgroups(ms.G, ms.x)
    assert len(found) == 1 and found[0].order() == 5
    G = cl.build_PGL(3, GF(2)).perm_group
    assert pg.regular_normal_subgroups(G, 0) == []


def test_affine_line_translations():
    G, T = affine_line(5)
    assert G.order() == 20 and G.transitivity_degree() == 2
    regular = [N for N in G.normal_subgroups() if N.acts_regularly_on(range(5))]
    assert len(regular) == 1
    assert set(regular[0].elements()) == set(T.elements())
    # the point stabilizer is itself regular on the remaining points
    assert [N.order() for N in pg.regular_normal_subgroups(G, 0)] == [4]


@pytest.mark.parametrize("a,b", [("psl(2,7)", "psl(3,2)"), ("psl(2,9)", "alt(6)"), ("psl(2,4)", "alt(5)")])
def test_isomorphic_pairs(a, b):
    G, H = parse_named_group(a)[0], parse_named_group(b)[0]
    r = pg.iso_small(G, H)
    assert r["isomorphic"]
    gens = [tuple(g) for g in r["generators"]]
    imgs = [tuple(x) for x in r["images"]]
    assert pg.verify_isomorphism(G, H, gens, imgs)
    # products of length up to 3 keep their orders
    for word in itertools.product(range(len(gens)), repeat=3):
        g = h = None
        for k in word:
            g = gens[k] if g is None else pg.compose(g, gens[k])
            h = imgs[k] if h is None else pg.compose(h, imgs[k])
        assert pg.perm_order(g) == pg.perm_order(h)


def test_equal_order_non_isomorphic():
    G, H = parse_named_group("psl(3,4)")[0], parse_named_group("psl(4,2)")[0]
    assert G.order() == H.order() == 20160
    r = pg.iso_small(G, H)
    assert not r["isomorphic"]
    assert r["invariant"] != "order"


def test_bogus_certificate_rejected():
    G = pg.symmetric_group(3)
    gens = G.gens
    assert not pg.verify_isomorphism(G, G, gens, [gens[0]] * len(gens))


def test_perm_text():
    assert pg.parse_perm("0 2 1") == (0, 2, 1)
    assert pg.format_perm((1, 0)) == "1 0"
    with pytest.raises(ValueError):
        pg.parse_perm("0 0 1")


@pytest.mark.parametrize("name", ["psl(2,7)", "psl(2,8)", "pel(3,3)", "sp(4,2)", "o(3,3)", "sym(7)"])
def test_order_matches_sympy(name):
    # independent Schreier-Sims implementation as an oracle
    from sympy.combinatorics import Permutation, PermutationGroup

    G = parse_named_group(name)[0]
    S = PermutationGroup([Permutation(list(g)) for g in G.gens])
    assert G.order() == S.order()
    assert G.is_transitive() == S.is_transitive()
