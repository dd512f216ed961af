import itertools

from hypothesis import given, strategies as st

from geomforge import gf2
from geomforge import matvec as mv
from geomforge.scalar import GF

words = st.lists(st.integers(0, 31), max_size=6)


def test_pack_round_trip():
    for v in itertools.product((0, 1), repeat=4):
        assert gf2.unpack(gf2.pack(v), 4) == v


@given(words)
def test_rank_matches_generic_elimination(ws):
    F = GF(2)
    vecs = [gf2.unpack(w, 5) for w in ws]
    expect = mv.span(F, vecs, 5).dim if vecs else 0
    assert gf2.rank(ws) == expect
    assert len(gf2.span(ws)) == 2 ** expect


@given(words, st.integers(0, 31))
def test_reduce_detects_membership(ws, w):
    basis = gf2.rref(ws)
    assert (gf2.reduce(w, basis) == 0) == (w in gf2.span(ws))


def test_enumerate_gl_counts():
    assert sum(1 for _ in gf2.enumerate_gl(0)) == 1
    for n in (1, 2, 3):
        assert sum(1 for _ in gf2.enumerate_gl(n)) == mv.gl_order(n, 2)
