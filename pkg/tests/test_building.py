import itertools
import math
import random

import pytest

from geomforge import building as bd
from geomforge import matvec as mv
from geomforge import permgrp as pg
from geomforge import polar as pol
from geomforge import forms as fm
from geomforge.projgeom import build_pg
from geomforge.scalar import GF


@pytest.fixture(scope="module")
def delta_pg3_2():
    return bd.flag_complex(build_pg(3, GF(2)))


# -- flag complexes

def test_chamber_counts(delta_pg3_2):
    assert len(bd.flag_complex(build_pg(2, GF(2))).chambers()) == 21
    assert len(delta_pg3_2.chambers()) == 315
    K = bd.flag_complex(build_pg(1, GF(3)))
    assert len(K.chambers()) == len(K.labels) == 4


def test_chambers_have_full_rank_and_contain_every_simplex():
    K = bd.flag_complex(build_pg(2, GF(3)))
    assert {len(c) for c in K.chambers()} == {2}
    assert K.every_simplex_in_chamber()
    assert K.is_gallery_connected()
    assert K.panel_counts() == [4]


def test_panels_are_thick(delta_pg3_2):
    assert delta_pg3_2.panel_counts() == [3]
    assert delta_pg3_2.is_gallery_connected()


def test_polar_flag_complex():
    K = bd.flag_complex(pol.build_polar(fm.symplectic_form(GF(2), 2)))
    assert len(K.labels) == 30 and len(K.chambers()) == 45
    assert K.panel_counts() == [3]


def test_edge_list_export():
    K = bd.flag_complex(build_pg(2, GF(2)))
    lines = K.to_edge_list().splitlines()
    assert sum(1 for l in lines if l.startswith("v ")) == 14
    assert sum(1 for l in lines if l.startswith("e ")) == 21


# -- apartments

@pytest.mark.parametrize("n,verts,chambers", [(2, 6, 6), (3, 14, 24)])
def test_apartment_sizes(n, verts, chambers):
    F = GF(2)
    A = bd.apartment(F, mv.identity(F, n + 1))
    assert len(A.vertices) == verts == 2 ** (n + 1) - 2
    assert len(A.chambers()) == chambers == math.factorial(n + 1)
    every = set(build_pg(n, F).grass[1]) | set(build_pg(n, F).grass[n])
    assert all(U.D == F for U in A.vertex_set())
    assert {U for U in A.vertex_set() if U.dim in (1, n)} <= every


def test_frame_must_be_a_basis():
    F = GF(2)
    with pytest.raises(bd.BuildingError):
        bd.apartment(F, [(1, 0, 0), (0, 1, 0), (1, 1, 0)])


@pytest.mark.parametrize("n", [2, 3])
def test_apartment_chamber_graph_is_a_cayley_graph(n):
    F = GF(3)
    n1 = n + 1
    A = bd.apartment(F, mv.identity(F, n1))

    def chamber(perm):
        return tuple(A.vertices[frozenset(perm[: k + 1])] for k in range(n))

    perms = list(itertools.permutations(range(n1)))
    image = {p: chamber(p) for p in perms}
    assert len(set(image.values())) == len(perms) == len(A.chambers())
    for p, r in itertools.combinations(perms, 2):
        shared = sum(1 for x, y in zip(image[p], image[r]) if x == y)
        adjacent = shared == n - 1
        # right multiplication by an adjacent transposition swaps two neighbouring positions
        cayley = any(p[:k] + (p[k + 1], p[k]) + p[k + 2:] == r for k in range(n))
        assert adjacent == cayley


@pytest.mark.parametrize("n,q", [(2, 2), (2, 3), (3, 2)])
def test_two_chambers_lie_in_an_apartment(n, q):
    F = GF(q)
    K = bd.flag_complex(build_pg(n, F))
    chambers = K.chambers()
    rng = random.Random(n * 10 + q)
    for _ in range(40):
        C = tuple(K.labels[v][1] for v in rng.choice(chambers))
        D = tuple(K.labels[v][1] for v in rng.choice(chambers))
        frame = bd.common_frame(F, C, D)
        A = bd.apartment(F, frame)
        assert A.contains_chamber(C) and A.contains_chamber(D)


def test_apartments_through_the_standard_chamber():
    F = GF(2)
    C = bd.standard_chamber(F, 3)
    assert len(bd.apartments_through(F, 3, C)) == 8


# -- Weyl groups and Tits systems

def test_weyl_groups():
    W, cert = bd.weyl_group(1)
    assert W.order() == 2 and cert["presentation_ok"]
    W, cert = bd.weyl_group(2)
    s1, s2 = W.gens
    assert W.order() == 6 and pg.perm_order(pg.compose(s1, s2)) == 3
    W, cert = bd.weyl_group(3)
    s1, _, s3 = sorted(W.gens)
    assert W.order() == 24 and cert["coxeter_order"] == 24
    assert pg.perm_order(pg.compose(s1, s3)) == 2


def test_coxeter_check_detects_wrong_relations():
    gens = [pg.from_cycles(3, [[0, 1]]), pg.from_cycles(3, [[1, 2]])]
    cert = bd.coxeter_check(gens, [[1, 2], [2, 1]])
    assert not cert["presentation_ok"]


def test_tits_system_el3_2():
    r = bd.verify_tits(bd.extract_tits_system(2, GF(2)))
    assert r["all_pass"]
    assert r["orders"]["B"] == 8 and r["orders"]["chambers"] == 21 == r["orders"]["G"] // 8
    assert r["bruhat"]["cells"] == 6 and r["bruhat"]["sizes_sum_to_order"]


def test_tits_system_el3_3():
    r = bd.verify_tits(bd.extract_tits_system(2, GF(3)))
    assert r["all_pass"] and r["bruhat"]["cells"] == 6 and r["TS3"]["order_W"] == 6


def test_tits_system_el4_2():
    ts = bd.extract_tits_system(3, GF(2))
    r = bd.verify_tits(ts)
    assert r["all_pass"] and r["bruhat"]["cells"] == 24
    assert sum(r["bruhat"]["cell_sizes"]) == ts.G.order()


# -- roots

@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_root_system(n):
    R = bd.RootSystemAn(n)
    rep = R.check()
    assert rep["roots"] == rep["expected"] == n * (n + 1)
    assert rep["points_in_hyperplane"] and rep["uniform_signs"] and rep["reflections_permute_points"]


def test_root_sum():
    R = bd.RootSystemAn(2)
    assert tuple(a + b for a, b in zip(R.root(0, 1), R.root(1, 2))) == R.root(0, 2)


def test_root_groups_a2():
    rep = bd.root_commutator_correspondence(2, GF(2))
    assert rep["agree"]
    row = next(r for r in rep["pairs"] if r["ij"] == [0, 1] and r["kl"] == [1, 2])
    assert row["root_sum"] and not row["commute"]
    assert row["lands_in"] == [0, 2] and row["predicted_element"]


def test_root_groups_a3():
    rep = bd.root_commutator_correspondence(3, GF(3))
    assert rep["agree"]
    row = next(r for r in rep["pairs"] if r["ij"] == [0, 1] and r["kl"] == [2, 3])
    assert row["commute"] and not row["root_sum"]
