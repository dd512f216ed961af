import itertools
import json
import random

import pytest
from hypothesis import given, strategies as st

from geomforge import forms as fm
from geomforge import matvec as mv
from geomforge.scalar import GF, H, Quaternion, Sigma

CASES_BY_FIELD = [(GF(2), "Symplectic"), (GF(3), "Symplectic"), (GF(2), "Orthogonal"), (GF(3), "Orthogonal"),
                  (GF(5), "Orthogonal"), (GF(4), "ClassicalUnitary"), (GF(9), "ClassicalUnitary"),
                  (GF(4), "Symplectic")]


def rand_invertible(F, n, rng):
    while True:
        g = tuple(tuple(F.random(rng) for _ in range(n)) for _ in range(n))
        try:
            mv.mat_inv(F, g)
            return g
        except ValueError:
            pass


def random_case_form(draw_seed, F, case):
    rng = random.Random(draw_seed)
    # h is alternating for orthogonal forms in characteristic 2, so odd n is degenerate
    even = case == "Symplectic" or (case == "Orthogonal" and F.char == 2)
    n = rng.choice([2, 4]) if even else rng.randint(1, 4)
    return fm.random_form(F, case, n, rng), rng


# -- hermitian forms

def test_alternating_h_from_upper_triangular_f():
    F = GF(5)
    pq = fm.PseudoQuadraticForm.make(F, ((0, 1), (0, 0)), Sigma.identity(), F.neg(1), "full")
    assert pq.h.gram == ((0, 1), (4, 0))


def test_symmetric_f_gives_twice_f_in_odd_characteristic():
    F = GF(3)
    G = ((1, 2, 0), (2, 0, 1), (0, 1, 2))
    pq = fm.orthogonal_form(F, G)
    assert pq.h.gram == tuple(tuple(F.add(x, x) for x in r) for r in G)


def test_unitary_diagonal_is_the_trace():
    F = GF(4)
    s = Sigma.frobenius(1)
    for a in F.elements():
        pq = fm.unitary_form(F, ((a,),))
        assert pq.h.gram == ((F.add(a, F.frobenius(a)),),)
    assert fm.unitary_form(F, ((1,),)).h.gram == ((0,),)
    assert s.apply(F, 2) == 3


def test_reflexivity():
    F = GF(2)
    assert fm.is_reflexive(fm.symplectic_form(F, 1).h)
    assert not fm.is_reflexive(fm.SesquilinearForm(F, ((0, 1), (0, 0))))
    assert fm.is_reflexive(fm.SesquilinearForm(F, ((0, 0), (0, 0))))


@given(st.sampled_from(CASES_BY_FIELD), st.integers(0, 2**32))
def test_h_is_hermitian(fc, seed):
    pq, _ = random_case_form(seed, *fc)
    assert fm.is_hermitian(pq.h, pq.epsilon)
    assert fm.is_reflexive(pq.h)


@given(st.sampled_from(CASES_BY_FIELD), st.integers(0, 2**32))
def test_q_is_sigma_quadratic_modulo_lambda(fc, seed):
    pq, rng = random_case_form(seed, *fc)
    F, s = pq.D, pq.sigma
    for _ in range(10):
        v = tuple(F.random(rng) for _ in range(pq.n))
        a = F.random(rng)
        lhs = pq.q(mv.vec_scale(F, v, a))
        rhs = pq.param.rep(F.mul(F.mul(s.apply(F, a), pq.f(v, v)), a))
        assert lhs == rhs
        # q(v) determines h(v, v) through the trace map
        t = pq.f(v, v)
        assert pq.hval(v, v) == F.add(t, F.mul(s.apply(F, t), pq.epsilon))


def test_quaternion_form_values():
    pq = fm.hyperbolic_form(H, 1, Sigma.conjugation(), H.neg(H.one), "trace")
    e, f = (H.one, H.zero), (H.zero, H.one)
    assert pq.hval(e, f) == H.one
    assert pq.hval(f, e) == H.neg(H.one)
    v = (Quaternion(1, 2), Quaternion(0, 0, 3))
    a = Quaternion(1, 1, 1, 0)
    lhs = pq.q(mv.vec_scale(H, v, a))
    rhs = pq.param.rep(a.conj() * pq.f(v, v) * a)
    assert lhs == rhs


# -- scaling

def test_scaling_by_one_changes_nothing():
    pq = fm.unitary_form(GF(9), mv.diagonal(GF(9), [1, 2]))
    sc = fm.scale_form(pq, 1)
    assert sc.f.gram == pq.f.gram and sc.epsilon == pq.epsilon and sc.param.elements == pq.param.elements


def test_scaling_commutative_identity_sigma():
    F = GF(5)
    pq = fm.symplectic_form(F, 1)
    sc = fm.scale_form(pq, 3)
    assert sc.sigma == pq.sigma and sc.epsilon == pq.epsilon
    assert sc.param.elements == frozenset(F.mul(3, x) for x in pq.param.elements)


def test_scaling_gf9_hermitian():
    F = GF(9)
    pq = fm.unitary_form(F, mv.diagonal(F, [1, 1]))
    norm_one = [s for s in F.nonzero() if F.mul(s, F.frobenius(s)) == 1]
    for s in norm_one:
        sc = fm.scale_form(pq, s)
        expect = F.mul(s, F.inv(F.frobenius(s)))
        assert sc.epsilon == expect
        assert F.mul(sc.sigma.apply(F, sc.epsilon), sc.epsilon) == 1
        assert fm.is_hermitian(sc.h, sc.epsilon)
        assert fm.classify_form_case(sc.param).case == "ClassicalUnitary"
    for s in (1, 2):  # the fixed field GF(3) leaves eps alone
        assert fm.scale_form(pq, s).epsilon == 1


@given(st.sampled_from(CASES_BY_FIELD), st.integers(0, 2**32))
def test_witt_index_invariant_under_scaling_and_base_change(fc, seed):
    pq, rng = random_case_form(seed, *fc)
    m = fm.witt_index(pq)
    F = pq.D
    for s in F.nonzero():
        assert fm.witt_index(fm.scale_form(pq, s)) == m
    for _ in range(3):
        assert fm.witt_index(pq.pullback(rand_invertible(F, pq.n, rng))) == m


# -- radicals and reduction

def test_radicals():
    F = GF(5)
    assert fm.symplectic_form(F, 1).radical().dim == 0
    o5 = fm.o5_example(GF(2))
    assert o5.radical() == mv.span(GF(2), [(0, 0, 0, 0, 1)])
    assert o5.is_slightly_degenerate()
    zero = fm.orthogonal_form(F, mv.zeros(F, 2, 2))
    assert zero.radical() == mv.full_subspace(F, 2)
    assert not zero.is_slightly_degenerate()
    with pytest.raises(fm.DegenerateForm):
        fm.reduce_slightly_degenerate(zero)


@pytest.mark.parametrize("q", [2, 4])
def test_reduction_of_the_five_dimensional_form(q):
    F = GF(q)
    pq = fm.o5_example(F)
    red = fm.reduce_slightly_degenerate(pq)
    assert red.reduced.n == 4
    assert red.reduced.h.gram == fm.symplectic_form(F, 2).h.gram
    assert fm.classify_form_case(red.reduced.param).case == "Symplectic"
    src, dst = pq.isotropic_points(), red.reduced.isotropic_points()
    assert len(src) == len(dst) == (q**4 - 1) // (q - 1)
    assert {mv.normalize_point(F, red.project(p)) for p in src} == set(dst)
    for k in range(fm.witt_index(red.reduced) + 1):
        assert len(fm.isotropic_grassmannian(pq, k)) == len(fm.isotropic_grassmannian(red.reduced, k))


# -- Witt index and decomposition

def test_witt_index_examples():
    F = GF(2)
    assert fm.witt_index(fm.symplectic_form(F, 2)) == 2
    # x^2 + xy + y^2 on the first two coordinates, a hyperbolic pair on the last two
    G = ((1, 1, 0, 0), (0, 1, 0, 0), (0, 0, 0, 1), (0, 0, 0, 0))
    pq = fm.orthogonal_form(F, G)
    assert fm.witt_index(pq) == 1
    dec = fm.witt_decompose(pq)
    assert len(dec.anisotropic_basis) == 2 and dec.check()["all_pass"]
    assert fm.witt_index(fm.orthogonal_form(F, ())) == 0


def test_witt_decomposition_examples():
    F = GF(3)
    hyp = fm.hyperbolic_form(F, 2)
    dec = fm.witt_decompose(hyp)
    assert dec.index == 2 and dec.anisotropic_basis == []
    diag = fm.orthogonal_form(F, mv.identity(F, 3))
    dec = fm.witt_decompose(diag)
    assert dec.index == 1 and len(dec.anisotropic_basis) == 1
    aniso = fm.orthogonal_form(GF(2), ((1, 1), (0, 1)))
    dec = fm.witt_decompose(aniso)
    assert dec.index == 0 and len(dec.anisotropic_basis) == 2


@given(st.sampled_from(CASES_BY_FIELD), st.integers(0, 2**32))
def test_witt_decomposition_reassembles(fc, seed):
    pq, _ = random_case_form(seed, *fc)
    F = pq.D
    dec = fm.witt_decompose(pq)
    assert dec.check()["all_pass"]
    assert dec.index == fm.witt_index(pq)
    P = dec.basis_change
    Hp = pq.pullback(P).h.gram
    m = dec.index
    for i, j in itertools.product(range(pq.n), repeat=2):
        if i < 2 * m or j < 2 * m:
            if i // 2 == j // 2 and i < 2 * m and j < 2 * m and i != j:
                expect = F.one if i < j else pq.epsilon
            else:
                expect = F.zero
            assert Hp[i][j] == expect


# -- form parameters

def test_classification_examples():
    assert fm.classify_form_case(fm.symplectic_form(GF(5), 1).param).case == "Symplectic"
    assert fm.classify_form_case(fm.orthogonal_form(GF(3), mv.identity(GF(3), 2)).param).case == "Orthogonal"
    c = fm.classify_form_case(fm.unitary_form(GF(4), ((1,),)).param)
    assert c.case == "ClassicalUnitary"
    assert c.param.elements == frozenset({0, 1})


def test_classification_after_normalization():
    F = GF(5)
    # (id, 1, D) has no direct match; scaling by s keeps eps = 1, so it fails
    with pytest.raises(fm.FormError):
        fm.classify_form_case(fm.FormParameter(F, Sigma.identity(), 1, "full"))
    # the unitary parameter over GF(9) with eps = -1 is a scalar multiple of the standard one
    F9 = GF(9)
    p = fm.FormParameter(F9, Sigma.frobenius(1), F9.neg(1), "fixed")
    c = fm.classify_form_case(p)
    assert c.case == "ClassicalUnitary" and c.scale != 1


def test_finite_fields_admit_neither_defective_nor_restricted_cases():
    F = GF(4)
    p = fm.FormParameter(F, Sigma.identity(), 1, [0, 1])
    with pytest.raises(fm.FormError):
        fm.classify_form_case(p, normalize=False)


def test_lambda_zero_forces_orthogonal_shape():
    for F in (GF(2), GF(3), GF(4), GF(5), GF(9)):
        for e in range(F.k):
            for eps in F.nonzero():
                sigma = Sigma.frobenius(e)
                if fm.check_sigma_eps(F, sigma.normalized(F), eps):
                    continue
                rep = fm.form_parameter_check(fm.FormParameter(F, sigma, eps, "zero"))
                if rep["is_form_parameter"]:
                    assert rep["zero_implies_orthogonal"]
                    assert eps == 1 and e == 0


def test_unitary_trace_and_fixed_groups_agree():
    F = GF(4)
    s = Sigma.frobenius(1)
    assert fm.trace_group(F, s, F.neg(1)) == fm.fixed_group(F, s, F.neg(1)) == frozenset({0, 1})


def test_valid_lambdas_over_gf2():
    F = GF(2)
    valid = []
    for lam in ([0], [0, 1]):
        if fm.form_parameter_check(fm.FormParameter(F, Sigma.identity(), 1, lam))["is_form_parameter"]:
            valid.append(frozenset(lam))
    assert valid == [frozenset({0}), frozenset({0, 1})]


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8, 9])
def test_every_parameter_on_small_fields(q):
    F = GF(q)
    found = 0
    for e in range(F.k):
        for eps in F.nonzero():
            sigma = Sigma.frobenius(e)
            for tag in ("zero", "trace", "fixed", "full"):
                try:
                    p = fm.FormParameter(F, sigma, eps, tag)
                except fm.FormError:
                    continue
                rep = fm.form_parameter_check(p)
                if rep["is_form_parameter"]:
                    found += 1
                    assert p.lower() <= p.elements <= p.upper()
    assert found > 0


def test_bad_parameters_rejected():
    F = GF(3)
    with pytest.raises(fm.FormError):
        fm.FormParameter(F, Sigma.identity(), 0)
    with pytest.raises(fm.FormError):
        fm.FormParameter(F, Sigma.identity(), 1, "nonsense")
    with pytest.raises(fm.FormError):
        fm.PseudoQuadraticForm.make(F, ((1, 2),), Sigma.identity(), 1, "zero")


def test_json_round_trip():
    for pq in (fm.symplectic_form(GF(3), 2), fm.unitary_form(GF(4), mv.diagonal(GF(4), [2, 2])),
               fm.o5_example(GF(2)), fm.hyperbolic_form(H, 1, Sigma.conjugation(), H.neg(H.one), "trace")):
        back = fm.PseudoQuadraticForm.from_json(json.dumps(pq.to_json()))
        assert back.f.gram == pq.f.gram and back.sigma == pq.sigma and back.epsilon == pq.epsilon
        assert back.param.elements == pq.param.elements
