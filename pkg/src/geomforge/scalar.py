"""Exact coefficient structures.

Two kinds of scalar structure are supported:

* :class:`FiniteField` ``GF(p^k)``; elements are integer codes, the
  coefficient vector of the residue polynomial evaluated at ``p``.  For
  ``p = 2`` the code is the bit-packed coefficient word.
* :class:`QuaternionAlgebra`, Hamilton's quaternions over the rationals,
  the one non-commutative skew field we compute with.  Elements are
  :class:`Quaternion` values with :class:`fractions.Fraction` components.

Both expose the same small structure protocol (``zero``, ``one``, ``add``,
``sub``, ``neg``, ``mul``, ``inv``, ``is_zero``, ``parse``, ``fmt``) so the
linear algebra in :mod:`geomforge.matvec` can be written once.
"""

from __future__ import annotations

import functools
import itertools
import re
from dataclasses import dataclass
from fractions import Fraction

from . import budget


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


# ---------------------------------------------------------------------------
# polynomials over GF(p), coefficient tuples low degree first

def _poly_trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return c


def _poly_mod(a, m, p):
    a = _poly_trim(a)
    m = _poly_trim(m)
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) >= len(m):
        factor = a[-1] * inv_lead % p
        shift = len(a) - len(m)
        for i, c in enumerate(m):
            a[shift + i] = (a[shift + i] - factor * c) % p
        a = _poly_trim(a)
    return a


def _monic_polys(p, d):
    """Monic degree-d polynomials in lexicographic order of (c0, ..., c_{d-1})."""
    for lower in itertools.product(range(p), repeat=d):
        yield tuple(lower) + (1,)


def is_irreducible(poly, p) -> bool:
    """Trial division by every monic polynomial of degree <= deg/2."""
    poly = tuple(_poly_trim(poly))
    deg = len(poly) - 1
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        for g in _monic_polys(p, d):
            if not _poly_mod(poly, g, p):
                return False
    return True


def smallest_irreducible(p, k):
    for poly in _monic_polys(p, k):
        if is_irreducible(poly, p):
            return poly
    raise AssertionError("an irreducible polynomial exists in every degree")


# ---------------------------------------------------------------------------

class FiniteField:
    """The Galois field GF(p^k) with a deterministic modulus.

    The modulus is the lexicographically smallest monic irreducible polynomial
    of degree ``k`` (coefficients compared low degree first), so element codes
    are stable across runs.  Use :func:`field_make` rather than the constructor
    to share the cached instance.
    """

    is_finite = True
    is_commutative = True
    zero = 0
    one = 1

    def __init__(self, p: int, k: int = 1):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        if k < 1:
            raise ValueError("extension degree must be at least 1")
        budget.require("field_size", p**k)
        self.p = p
        self.k = k
        self.q = p**k
        self.char = p
        # for prime fields the modulus x is never used in reduction
        self.modulus = (0, 1) if k == 1 else smallest_irreducible(p, k)
        self._build_tables()

    # -- construction helpers
    def coeffs(self, a):
        out = []
        for _ in range(self.k):
            a, r = divmod(a, self.p)
            out.append(r)
        return tuple(out)

    def from_coeffs(self, coeffs):
        code = 0
        for c in reversed(tuple(coeffs)):
            code = code * self.p + c % self.p
        return code

    def _poly_mul_code(self, a, b):
        p = self.p
        ca, cb = self.coeffs(a), self.coeffs(b)
        prod = [0] * (2 * self.k)
        for i, x in enumerate(ca):
            if x:
                for j, y in enumerate(cb):
                    prod[i + j] = (prod[i + j] + x * y) % p
        if self.k > 1:
            prod = _poly_mod(prod, self.modulus, p)
        prod = list(prod) + [0] * self.k
        return self.from_coeffs(prod[: self.k])

    def _build_tables(self):
        q, p = self.q, self.p
        # primitive element: smallest code of multiplicative order q-1
        for g in range(2 if q > 2 else 1, q):
            x = g
            order = 1
            while x != 1:
                x = self._poly_mul_code(x, g)
                order += 1
            if order == q - 1:
                break
        self.primitive = g
        exp = [0] * (2 * (q - 1))
        log = [0] * q
        x = 1
        for i in range(q - 1):
            exp[i] = x
            log[x] = i
            x = self._poly_mul_code(x, g)
        for i in range(q - 1, 2 * (q - 1)):
            exp[i] = exp[i - (q - 1)]
        self._exp = exp
        self._log = log
        if p == 2:
            self._add_table = None
        elif q <= 256:
            self._add_table = [[self._add_digits(a, b) for b in range(q)] for a in range(q)]
        else:
            self._add_table = None
        self._neg = [self._neg_digits(a) for a in range(q)]

    def _add_digits(self, a, b):
        p = self.p
        code, place = 0, 1
        while a or b:
            a, ra = divmod(a, p)
            b, rb = divmod(b, p)
            code += ((ra + rb) % p) * place
            place *= p
        return code

    def _neg_digits(self, a):
        p = self.p
        code, place = 0, 1
        while a:
            a, r = divmod(a, p)
            code += ((-r) % p) * place
            place *= p
        return code

    # -- arithmetic
    def add(self, a, b):
        if self.p == 2:
            return a ^ b
        if self._add_table is not None:
            return self._add_table[a][b]
        return self._add_digits(a, b)

    def neg(self, a):
        return self._neg[a]

    def sub(self, a, b):
        return self.add(a, self._neg[b])

    def mul(self, a, b):
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero in " + repr(self))
        return self._exp[(self.q - 1 - self._log[a]) % (self.q - 1)]

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, e):
        if a == 0:
            if e < 0:
                raise ZeroDivisionError("0 has no inverse")
            return 1 if e == 0 else 0
        return self._exp[(self._log[a] * e) % (self.q - 1)]

    def is_zero(self, a):
        return a == 0

    def eq(self, a, b):
        return a == b

    def frobenius(self, a, e=1):
        """``a -> a^(p^e)``."""
        return self.pow(a, self.p ** (e % self.k))

    def log(self, a):
        return self._log[a]

    def exp(self, i):
        return self._exp[i % (self.q - 1)]

    # -- enumeration and literals
    def elements(self):
        return range(self.q)

    def nonzero(self):
        return range(1, self.q)

    def additive_basis(self):
        """The codes ``p^i`` (monomials x^i), an F_p-basis of (D, +)."""
        return [self.p**i for i in range(self.k)]

    def random(self, rng):
        return rng.randrange(self.q)

    def random_nonzero(self, rng):
        return rng.randrange(1, self.q)

    def parse(self, text):
        value = int(str(text).strip())
        if self.k == 1:
            return value % self.p
        if not 0 <= value < self.q:
            raise ValueError(f"{value} is not an element code of {self!r}")
        return value

    def fmt(self, a):
        return str(a)

    def to_json(self):
        return {"field": "GF", "p": self.p, "k": self.k}

    def __repr__(self):
        return f"GF({self.q})"

    def __eq__(self, other):
        return isinstance(other, FiniteField) and (self.p, self.k) == (other.p, other.k)

    def __hash__(self):
        return hash(("GF", self.p, self.k))

    def __reduce__(self):
        return (field_make, (self.p, self.k))


@functools.lru_cache(maxsize=None)
def _cached_field(p, k):
    return FiniteField(p, k)


def field_make(p: int, k: int = 1) -> FiniteField:
    """Return GF(p^k), validating ``p``, ``k`` and the field-size budget."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if k < 1:
        raise ValueError("extension degree must be at least 1")
    budget.require("field_size", p**k)
    return _cached_field(p, k)


def field_of_order(q: int) -> FiniteField:
    for p in range(2, q + 1):
        if q % p == 0:
            k = 0
            r = q
            while r % p == 0:
                r //= p
                k += 1
            if r != 1:
                break
            return field_make(p, k)
    raise ValueError(f"{q} is not a prime power")


def GF(q: int, k: int | None = None) -> FiniteField:
    """``GF(9)`` by order, or ``GF(3, 2)`` by characteristic and degree."""
    return field_of_order(q) if k is None else field_make(q, k)


@dataclass(frozen=True)
class FieldAuto:
    """The automorphism ``x -> x^(p^exponent)`` of a finite field."""

    base: FiniteField
    exponent: int = 1

    def __post_init__(self):
        object.__setattr__(self, "exponent", self.exponent % self.base.k)

    def __call__(self, a):
        return self.base.frobenius(a, self.exponent)

    def compose(self, other: "FieldAuto") -> "FieldAuto":
        return FieldAuto(self.base, self.exponent + other.exponent)

    def inverse(self) -> "FieldAuto":
        return FieldAuto(self.base, -self.exponent)

    @property
    def order(self) -> int:
        k = self.base.k
        e = self.exponent
        return k // _gcd(k, e) if e else 1

    @property
    def is_identity(self) -> bool:
        return self.exponent == 0


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


# ---------------------------------------------------------------------------
# rational quaternions

@dataclass(frozen=True)
class Quaternion:
    """``a + b i + c j + d k`` with ``i^2 = j^2 = -1``, ``k = ij = -ji``."""

    a: Fraction = Fraction(0)
    b: Fraction = Fraction(0)
    c: Fraction = Fraction(0)
    d: Fraction = Fraction(0)

    def __post_init__(self):
        for name in "abcd":
            value = getattr(self, name)
            if not isinstance(value, Fraction):
                object.__setattr__(self, name, Fraction(value))

    @classmethod
    def coerce(cls, x):
        if isinstance(x, Quaternion):
            return x
        return cls(Fraction(x))

    def __add__(self, o):
        o = Quaternion.coerce(o)
        return Quaternion(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)

    __radd__ = __add__

    def __neg__(self):
        return Quaternion(-self.a, -self.b, -self.c, -self.d)

    def __sub__(self, o):
        return self + (-Quaternion.coerce(o))

    def __rsub__(self, o):
        return Quaternion.coerce(o) - self

    def __mul__(self, o):
        o = Quaternion.coerce(o)
        a1, b1, c1, d1 = self.a, self.b, self.c, self.d
        a2, b2, c2, d2 = o.a, o.b, o.c, o.d
        return Quaternion(
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        )

    def __rmul__(self, o):
        return Quaternion.coerce(o) * self

    def conj(self):
        return Quaternion(self.a, -self.b, -self.c, -self.d)

    def norm(self) -> Fraction:
        return self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d

    def inverse(self):
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("quaternion 0 has no inverse")
        c = self.conj()
        return Quaternion(c.a / n, c.b / n, c.c / n, c.d / n)

    def __truediv__(self, o):
        return self * Quaternion.coerce(o).inverse()

    def __bool__(self):
        return bool(self.a or self.b or self.c or self.d)

    def __str__(self):
        return format_quaternion(self)


def quat_norm(x: Quaternion) -> Fraction:
    """N(a + bi + cj + dk) = a^2 + b^2 + c^2 + d^2."""
    return x.norm()


_QTERM = re.compile(r"([+-]?)\s*(\d+(?:/\d+)?)?\s*\*?\s*([ijk]?)")


def parse_quaternion(text: str) -> Quaternion:
    """Parse ``"a+bi+cj+dk"`` with rational components ``n/m``."""
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty quaternion literal")
    parts = {"": Fraction(0), "i": Fraction(0), "j": Fraction(0), "k": Fraction(0)}
    pos = 0
    while pos < len(s):
        m = _QTERM.match(s, pos)
        if not m or m.end() == pos or (not m.group(2) and not m.group(3)):
            raise ValueError(f"bad quaternion literal {text!r}")
        sign, coeff, unit = m.groups()
        value = Fraction(coeff) if coeff else Fraction(1)
        if sign == "-":
            value = -value
        parts[unit] += value
        pos = m.end()
    return Quaternion(parts[""], parts["i"], parts["j"], parts["k"])


def format_quaternion(x: Quaternion) -> str:
    out = []
    for value, unit in ((x.a, ""), (x.b, "i"), (x.c, "j"), (x.d, "k")):
        if value == 0:
            continue
        mag = abs(value)
        text = "" if (mag == 1 and unit) else str(mag)
        sign = "-" if value < 0 else "+"
        out.append(sign + text + unit)
    if not out:
        return "0"
    s = "".join(out)
    return s[1:] if s[0] == "+" else s


class QuaternionAlgebra:
    """Structure object for Hamilton's quaternions over Q."""

    is_finite = False
    is_commutative = False
    char = 0
    zero = Quaternion()
    one = Quaternion(1)
    i = Quaternion(0, 1)
    j = Quaternion(0, 0, 1)
    k = Quaternion(0, 0, 0, 1)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        # elementary matrices are mostly ones; skip the Fraction arithmetic
        if a == self.one:
            return b
        if b == self.one:
            return a
        return a * b

    def inv(self, a):
        return a.inverse()

    def div(self, a, b):
        return a * b.inverse()

    def is_zero(self, a):
        return not a

    def eq(self, a, b):
        return a == b

    def random(self, rng, height=5):
        def r():
            return Fraction(rng.randint(-height, height), rng.randint(1, height))

        return Quaternion(r(), r(), r(), r())

    def random_nonzero(self, rng, height=5):
        while True:
            x = self.random(rng, height)
            if x:
                return x

    def parse(self, text):
        if isinstance(text, Quaternion):
            return text
        return parse_quaternion(str(text))

    def fmt(self, a):
        return format_quaternion(a)

    def to_json(self):
        return {"field": "H"}

    def __repr__(self):
        return "H(Q)"

    def __eq__(self, other):
        return isinstance(other, QuaternionAlgebra)

    def __hash__(self):
        return hash("H(Q)")


H = QuaternionAlgebra()


# ---------------------------------------------------------------------------
# (anti-)automorphism descriptors

class SigmaMismatch(ValueError):
    """A sigma descriptor does not fit the scalar structure."""


@dataclass(frozen=True)
class Sigma:
    """An anti-automorphism of the scalar structure, possibly twisted.

    ``kind`` is ``"frobenius"`` (finite fields, ``x -> x^(p^exponent)``; the
    identity is exponent 0) or ``"conj"`` (quaternion conjugation).  A twist
    ``s`` turns the base map into ``x -> s * x^base * s^-1``; scaling a form by
    ``s`` produces exactly such a twist.  Over commutative structures the
    twist is trivial and is dropped.
    """

    kind: str = "frobenius"
    exponent: int = 0
    twist: object = None

    @classmethod
    def identity(cls):
        return cls("frobenius", 0)

    @classmethod
    def frobenius(cls, exponent=1):
        return cls("frobenius", exponent)

    @classmethod
    def conjugation(cls):
        return cls("conj", 0)

    def validate(self, D):
        if self.kind == "frobenius":
            if not isinstance(D, FiniteField):
                raise SigmaMismatch(
                    f"{self.describe()} is not an anti-automorphism of {D!r}"
                )
        elif self.kind == "conj":
            if not isinstance(D, QuaternionAlgebra):
                raise SigmaMismatch(f"quaternion conjugation does not act on {D!r}")
        else:
            raise SigmaMismatch(f"unknown sigma kind {self.kind!r}")
        if self.twist is not None and D.is_zero(self.twist):
            raise SigmaMismatch("twist must be nonzero")
        return self

    def normalized(self, D):
        """Canonical descriptor: exponent reduced mod k, trivial twists dropped."""
        self.validate(D)
        exponent = self.exponent % D.k if self.kind == "frobenius" else 0
        twist = None if D.is_commutative else self.twist
        if twist is not None and twist == D.one:
            twist = None
        return Sigma(self.kind, exponent, twist)

    def apply(self, D, a):
        if self.kind == "frobenius":
            if not isinstance(D, FiniteField):
                raise SigmaMismatch(f"{self.describe()} does not act on {D!r}")
            return D.frobenius(a, self.exponent) if self.exponent % D.k else a
        if self.kind == "conj":
            if not isinstance(D, QuaternionAlgebra):
                raise SigmaMismatch(f"quaternion conjugation does not act on {D!r}")
            x = a.conj()
            if self.twist is not None:
                x = self.twist * x * self.twist.inverse()
            return x
        raise SigmaMismatch(f"unknown sigma kind {self.kind!r}")

    def twisted(self, D, s):
        """The map ``x -> s * x^self * s^-1``."""
        if D.is_zero(s):
            raise ValueError("cannot twist by zero")
        if D.is_commutative:
            return self.normalized(D)
        t = s if self.twist is None else D.mul(s, self.twist)
        return Sigma(self.kind, self.exponent, t).normalized(D)

    def is_identity(self, D) -> bool:
        if self.kind == "frobenius":
            return self.exponent % D.k == 0
        return False

    def describe(self):
        if self.kind == "frobenius":
            base = "id" if self.exponent == 0 else f"frob^{self.exponent}"
        else:
            base = "conj"
        if self.twist is not None:
            base += f"[twist {self.twist}]"
        return base

    def to_json(self, D=None):
        if self.kind == "conj":
            out = {"kind": "conj"}
            if self.twist is not None:
                out["twist"] = format_quaternion(self.twist)
            return out
        return {"kind": "frobenius", "exponent": self.exponent}


def apply_sigma(a, sigma: Sigma, D):
    """Apply the anti-automorphism ``sigma`` of ``D`` to ``a``."""
    return sigma.apply(D, a)


def parse_scalar_structure(text):
    """``"GF(9)"``, ``"GF(3^2)"``, ``"9"`` or ``"H"``."""
    s = str(text).strip().replace(" ", "")
    if s.upper() in ("H", "HQ", "H(Q)", "QUATERNIONS"):
        return H
    m = re.fullmatch(r"(?:GF|F)?\(?(\d+)(?:\^(\d+))?\)?", s, flags=re.I)
    if not m:
        raise ValueError(f"unknown scalar structure {text!r}")
    base = int(m.group(1))
    if m.group(2):
        return field_make(base, int(m.group(2)))
    return field_of_order(base)
