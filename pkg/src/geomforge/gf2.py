"""Bit-packed linear algebra over GF(2).

A vector of length n is an int whose bit i is coordinate i.  Elimination
works on whole words: adding a row is a single XOR.
"""

from __future__ import annotations


def pack(vec) -> int:
    word = 0
    for i, x in enumerate(vec):
        if x:
            word |= 1 << i
    return word


def unpack(word: int, n: int) -> tuple:
    return tuple((word >> i) & 1 for i in range(n))


def low_bit(word: int) -> int:
    return (word & -word).bit_length() - 1


def rref(words) -> list[int]:
    """Canonical basis of the span: pivot = lowest set bit, pivots cleared elsewhere.

    Sorted by pivot position, which matches the generic canonical form in
    :mod:`geomforge.matvec`.
    """
    basis: dict[int, int] = {}
    for w in words:
        for piv, b in basis.items():
            if (w >> piv) & 1:
                w ^= b
        if not w:
            continue
        piv = low_bit(w)
        for other, b in list(basis.items()):
            if (b >> piv) & 1:
                basis[other] = b ^ w
        basis[piv] = w
    return [basis[p] for p in sorted(basis)]


def rank(words) -> int:
    return len(rref(words))


def reduce(word: int, basis) -> int:
    """Residue of ``word`` modulo a basis in :func:`rref` form."""
    for b in basis:
        if (word >> low_bit(b)) & 1:
            word ^= b
    return word


def span(words) -> set[int]:
    out = {0}
    for w in rref(words):
        out |= {x ^ w for x in out}
    return out


def mat_vec(cols, word: int) -> int:
    """Apply the matrix with packed columns ``cols`` to a packed vector."""
    out = 0
    i = 0
    while word:
        if word & 1:
            out ^= cols[i]
        word >>= 1
        i += 1
    return out


def enumerate_gl(n: int, accept=None):
    """All invertible n x n matrices over GF(2) as tuples of packed columns.

    ``accept(cols)`` may prune a partial column list.
    """
    full = 1 << n

    def rec(cols, spanned):
        last = len(cols) == n - 1
        for c in range(1, full):
            if c in spanned:
                continue
            cols.append(c)
            if accept is None or accept(cols):
                if last:
                    yield tuple(cols)
                else:
                    yield from rec(cols, spanned | {x ^ c for x in spanned})
            cols.pop()

    if n == 0:
        yield ()
        return
    yield from rec([], frozenset({0}))
