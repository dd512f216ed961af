import itertools
import random

import pytest
from hypothesis import given, strategies as st

from geomforge import classical as cl
from geomforge import forms as fm
from geomforge import matvec as mv
from geomforge import permgrp as pg
from geomforge.named import orthogonal_standard
from geomforge.projgeom import build_pg
from geomforge.scalar import GF, H, Quaternion

FIELDS = [GF(2), GF(3), GF(4), GF(5)]


def random_transvection(D, n, rng):
    """A random nontrivial transvection over a finite field or H."""
    while True:
        u = [D.random(rng) for _ in range(n)]
        if D.is_zero(u[-1]):
            continue
        rho = [D.random(rng) for _ in range(n - 1)]
        acc = cl.pairing(D, rho, u[:-1])
        rho.append(D.neg(D.mul(acc, D.inv(u[-1]))))
        if any(not D.is_zero(x) for x in rho):
            return cl.Transvection(D, tuple(u), tuple(rho))


def all_transvections(F, n):
    covectors = [r for r in mv.enumerate_vectors(F, n) if any(r)]
    out = []
    for u in mv.enumerate_points(F, n):
        for rho in covectors:
            if cl.pairing(F, rho, u) == F.zero:
                out.append(cl.Transvection(F, u, rho))
    return out


# -- transvections

def test_elementary_matrix_as_transvection():
    F = GF(2)
    assert cl.transvection(F, (1, 0), (0, 1)) == mv.elementary(F, 2, 0, 1, 1)


def test_transvection_rejects_bad_input():
    F = GF(3)
    with pytest.raises(cl.ClassicalError):
        cl.transvection(F, (1, 0), (1, 0))
    with pytest.raises(cl.ClassicalError):
        cl.transvection(F, (0, 0), (0, 1))


@given(st.integers(0, 2**32))
def test_transvections_are_additive_in_the_scalar(seed):
    rng = random.Random(seed)
    F = GF(5)
    t = random_transvection(F, 3, rng)
    a, b = F.random(rng), F.random(rng)
    scaled = [tuple(F.mul(c, x) for x in t.rho) for c in (a, b, F.add(a, b))]
    mats = [mv.identity(F, 3) if not any(r) else cl.transvection(F, t.u, r) for r in scaled]
    assert mv.mat_mul(F, mats[0], mats[1]) == mats[2]


@given(st.sampled_from(FIELDS + [H]), st.integers(2, 4), st.integers(0, 2**32))
def test_transvection_structure(D, n, seed):
    t = random_transvection(D, n, random.Random(seed))
    M = t.matrix
    I = mv.identity(D, n)
    inv = cl.transvection(D, t.u, tuple(D.neg(x) for x in t.rho))
    assert mv.mat_mul(D, M, inv) == I
    N = mv.mat_sub(D, M, I)
    assert mv.mat_mul(D, N, N) == mv.zeros(D, n, n)
    assert t.center == mv.span(D, [t.u])
    assert t.axis.dim == n - 1
    assert all(mv.mat_vec(D, M, v) == v for v in t.axis.basis)


def test_commuting_examples():
    F = GF(3)
    same_center = (cl.Transvection(F, (1, 0, 0), (0, 1, 0)), cl.Transvection(F, (1, 0, 0), (0, 0, 1)))
    assert cl.transvections_commute_iff(*same_center) == (True, True)
    F2 = GF(2)
    generic = (cl.Transvection(F2, (1, 0, 0), (0, 1, 0)), cl.Transvection(F2, (0, 1, 0), (0, 0, 1)))
    assert cl.transvections_commute_iff(*generic) == (False, False)
    t = cl.Transvection(F2, (1, 0, 0), (0, 0, 1))
    assert cl.transvections_commute_iff(t, t) == (True, True)


@pytest.mark.parametrize("q", [2, 3])
def test_commuting_iff_shared_center_or_axis_in_dimension_3(q):
    ts = all_transvections(GF(q), 3)
    for a, b in itertools.product(ts, repeat=2):
        commute, same = cl.transvections_commute_iff(a, b)
        assert commute == same


@pytest.mark.parametrize("n", [3, 4])
def test_commuting_iff_mutual_annihilation(n):
    F = GF(2)
    ts = all_transvections(F, n)
    for a, b in itertools.product(ts, repeat=2):
        commute, _ = cl.transvections_commute_iff(a, b)
        assert commute == (cl.pairing(F, a.rho, b.u) == 0 and cl.pairing(F, b.rho, a.u) == 0)


def test_disjoint_transvections_commute_in_dimension_4():
    F = GF(2)
    a = cl.Transvection(F, (1, 0, 0, 0), (0, 1, 0, 0))
    b = cl.Transvection(F, (0, 0, 1, 0), (0, 0, 0, 1))
    assert cl.transvections_commute_iff(a, b) == (True, False)


# -- groups

def test_group_orders():
    assert cl.build_EL(2, GF(2)).order() == cl.build_GL(2, GF(2)).order() == 6
    assert cl.build_PEL(3, GF(2)).order() == 168
    assert cl.build_GL(2, GF(5)).order() == 480
    assert cl.build_PGL(2, GF(5)).order() == 120


def test_el_equals_sl_over_gf3():
    F = GF(3)
    sl = sum(1 for g in mv.enumerate_gl(F, 3) if cl.determinant(F, g) == 1)
    assert cl.build_EL(3, F).order() == sl == 5616


@pytest.mark.parametrize("n,q", [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3)])
def test_el_is_two_transitive_on_points_and_hyperplanes(n, q):
    F = GF(q)
    G = cl.build_EL(n, F)
    assert G.on(cl.PointAction(F, n)).perm_group.transitivity_degree() >= 2
    assert G.on(cl.SubspaceAction(F, n, n - 1)).perm_group.transitivity_degree() >= 2


@pytest.mark.parametrize("n,q,perfect", [(2, 2, False), (2, 3, False), (2, 4, True), (2, 5, True),
                                         (3, 2, True), (3, 3, True), (4, 2, True)])
def test_perfectness_of_el(n, q, perfect):
    assert cl.build_EL(n, GF(q)).perm_group.is_perfect() == perfect


# -- determinants

def test_determinant_examples():
    F = GF(7)
    assert cl.dieudonne_det(F, mv.identity(F, 3)) == 1
    for a in F.nonzero():
        assert cl.dieudonne_det(F, mv.diagonal(F, [a, 1, 1])) == a
    i = Quaternion(0, 1)
    assert cl.dieudonne_det(H, mv.diagonal(H, [i, H.one])) == i
    with pytest.raises(cl.ClassicalError):
        cl.dieudonne_det(F, mv.zeros(F, 2, 2))


@given(st.sampled_from(FIELDS + [GF(9)]), st.integers(1, 4), st.integers(0, 2**32))
def test_determinant_agrees_with_leibniz_and_is_multiplicative(F, n, seed):
    rng = random.Random(seed)
    A = tuple(tuple(F.random(rng) for _ in range(n)) for _ in range(n))
    B = tuple(tuple(F.random(rng) for _ in range(n)) for _ in range(n))
    da, db = cl.determinant(F, A), cl.determinant(F, B)
    assert cl.determinant(F, mv.mat_mul(F, A, B)) == F.mul(da, db)
    if da != 0:
        assert cl.dieudonne_det(F, A) == da


@given(st.integers(0, 2**32))
def test_quaternion_determinant_norms(seed):
    rng = random.Random(seed)
    A = tuple(tuple(H.random(rng) for _ in range(3)) for _ in range(3))
    B = tuple(tuple(H.random(rng) for _ in range(3)) for _ in range(3))
    try:
        da, db = cl.dieudonne_det(H, A), cl.dieudonne_det(H, B)
    except cl.ClassicalError:
        return
    assert cl.dieudonne_det(H, mv.mat_mul(H, A, B)).norm() == da.norm() * db.norm()
    assert cl.dieudonne_det(H, random_transvection(H, 3, rng).matrix).norm() == 1


def test_quaternion_commutators_have_norm_one():
    i, j = Quaternion(0, 1), Quaternion(0, 0, 1)
    c = i * j * i.inverse() * j.inverse()
    assert c.norm() == 1 and c != H.one
    assert cl.det_class_equal(H, c, H.one)


# -- Steinberg relations

def test_steinberg_gf2_exhaustive():
    r = cl.check_steinberg(3, GF(2))
    assert r["all_pass"]
    assert r["SR3"]["conventions_holding"] == ["+ab", "+ba", "-ab", "-ba"]


def test_steinberg_gf5_n4():
    r = cl.check_steinberg(4, GF(5))
    assert r["all_pass"]
    assert r["SR3"]["conventions_holding"] == ["+ab", "+ba"]


def test_steinberg_quaternions():
    r = cl.check_steinberg(3, H, samples=200, rng=random.Random(0))
    assert r["all_pass"] and r["pairs"] == 200
    # with non-commuting samples only one ordering survives
    assert r["SR3"]["conventions_holding"] == ["+ab"]


def test_steinberg_reports_the_wider_index_condition():
    r = cl.check_steinberg(3, GF(3))
    ce = r["SR2"]["printed_condition_counterexample"]
    i, j = ce["ij"]
    k, l = ce["kl"]
    assert i != k and j != l and (j == k or i == l)


def test_steinberg_needs_three_indices():
    with pytest.raises(cl.ClassicalError):
        cl.check_steinberg(2, GF(2))


# -- isometry groups

def test_symplectic_isometries():
    iso = cl.build_unitary(fm.symplectic_form(GF(2), 2))
    assert iso.order() == 720
    assert len(iso.isotropic_points) == 15


def test_orthogonal_gf3():
    pq = fm.orthogonal_form(GF(3), mv.identity(GF(3), 3))
    iso = cl.build_unitary(pq)
    assert iso.order() == 48
    assert all(pq.preserved_by(g) for g in iso.matrices)


@pytest.mark.parametrize("pq", [
    fm.symplectic_form(GF(3), 1),
    orthogonal_standard(GF(3), 3),
    orthogonal_standard(GF(2), 4),
    fm.unitary_form(GF(4), mv.diagonal(GF(4), [2, 2])),
    fm.o5_example(GF(2)),
])
def test_filter_and_backtrack_agree(pq):
    a = cl.build_unitary(pq, method="filter")
    b = cl.build_unitary(pq, method="backtrack")
    assert a.matrices == b.matrices
    vectors = list(mv.enumerate_vectors(pq.D, pq.n))
    assert all(pq.preserved_by(g, vectors) for g in a.matrices)


def test_isometry_enumeration_refuses_large_groups():
    with pytest.raises(cl.ClassicalError):
        cl.build_unitary(fm.symplectic_form(GF(3), 3))


# -- Moufang sets

def test_moufang_gf4():
    r = cl.check_moufang(cl.moufang_set_projective_line(GF(4)))
    assert r["all_pass"] and r["unique_and_equal_to_U"]


def test_moufang_gf5_uniqueness():
    r = cl.check_moufang(cl.moufang_set_projective_line(GF(5)))
    assert r["regular_normal_subgroups"] == 1 and r["unique_and_equal_to_U"]


def test_moufang_gf2_sharply_two_transitive():
    ms = cl.moufang_set_projective_line(GF(2))
    r = cl.check_moufang(ms)
    assert r["all_pass"] and r["sharply_2_transitive"]
    assert ms.G.order() == 6
    assert set(ms.G.stabilizer(ms.x).elements()) == set(ms.U.elements())


@pytest.mark.parametrize("q", [3, 4, 5, 7])
def test_moufang_el_level(q):
    r = cl.check_moufang(cl.moufang_set_projective_line(GF(q), "EL"), uniqueness=False)
    assert r["all_pass"]


# -- reconstruction

@pytest.mark.parametrize("q,builder", [(2, cl.build_PEL), (3, cl.build_PGL), (3, cl.build_PEL), (4, cl.build_PEL)])
def test_reconstruct_projective_planes(q, builder):
    G = builder(3, GF(q)).perm_group
    L = cl.reconstruct_lines(G)
    assert L.same_incidence(build_pg(2, GF(q)).point_line())


def test_reconstruct_pg3_2():
    G = cl.build_PEL(4, GF(2)).perm_group
    assert cl.reconstruct_lines(G).same_incidence(build_pg(3, GF(2)).point_line())


def test_reconstruct_rejects_sym5():
    with pytest.raises(cl.ClassicalError):
        cl.reconstruct_lines(pg.symmetric_group(5))
