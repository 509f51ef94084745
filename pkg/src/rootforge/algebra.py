"""Exact ring backends and the alternative-ring identity toolkit.

Backends share one element wrapper and differ in the payload format:
integers (int), modular (int mod n), polynomial (sorted Laurent term
tuples), matrix (nested tuples), zorn (vector-matrix quadruples),
cayley_dickson (pairs over a base algebra), product (tuples).  Payloads
are canonical so equality and hashing are exact and decidable.

The identity suites implement the standard alternative-ring laws:
Moufang-type identities, associator symmetries, nucleus slides, and the
inversion lemma for elements 1 + xy.  Reports carry explicit witnesses
so a corrupted multiplication table fails loudly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dataclass_field
from itertools import product as iter_product
from math import gcd
from typing import Callable, Iterator, Sequence

__all__ = [
    "AlgebraElement",
    "Ring",
    "NotInvertible",
    "IdentityReport",
    "integers",
    "zmod",
    "polynomial_ring",
    "matrix_ring",
    "zorn",
    "cayley_dickson_double",
    "product_ring",
    "associator",
    "nucleus_member",
    "try_invert",
    "alternative_identity_suite",
    "inv_alter_check",
    "split_octonion_iso",
    "zorn_basis",
    "CompositionIso",
]


class NotInvertible(ArithmeticError):
    """Certified inversion failure; `witness` explains why."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class AlgebraElement:
    """An immutable element of one backend; all arithmetic is exact."""

    __slots__ = ("ring", "payload")

    def __init__(self, ring: "Ring", payload):
        self.ring = ring
        self.payload = payload

    def _coerce(self, other) -> "AlgebraElement":
        if isinstance(other, AlgebraElement):
            if other.ring is not self.ring:
                raise ValueError(
                    f"descriptor mismatch: {self.ring.kind} vs {other.ring.kind}"
                )
            return other
        if isinstance(other, int):
            return self.ring.from_int(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return AlgebraElement(self.ring, self.ring._add(self.payload, other.payload))

    __radd__ = __add__

    def __neg__(self):
        return AlgebraElement(self.ring, self.ring._neg(self.payload))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return AlgebraElement(
            self.ring, self.ring._add(self.payload, self.ring._neg(other.payload))
        )

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return AlgebraElement(self.ring, self.ring._mul(self.payload, other.payload))

    def __rmul__(self, other):
        if isinstance(other, int):
            return self.ring.from_int(other) * self
        return NotImplemented

    def __pow__(self, exponent: int):
        if exponent < 0:
            inverse = try_invert(self)
            if isinstance(inverse, NotInvertible):
                raise inverse
            return inverse ** (-exponent)
        result = self.ring.one
        base = self
        for _ in range(exponent):
            result = result * base
        return result

    def star(self) -> "AlgebraElement":
        return AlgebraElement(self.ring, self.ring._star(self.payload))

    def norm(self) -> "AlgebraElement":
        """x x* (a central scalar in composition backends)."""
        return self * self.star()

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, AlgebraElement)
            and self.ring is other.ring
            and self.payload == other.payload
        )

    def __hash__(self) -> int:
        return hash((id(self.ring), self.payload))

    def __bool__(self) -> bool:
        return self.payload != self.ring._zero()

    def __repr__(self) -> str:
        return self.ring._format(self.payload)


class Ring:
    """Shared descriptor behaviour; concrete backends fill in payload ops."""

    kind = "abstract"
    size: int | None = None

    def element(self, payload) -> AlgebraElement:
        return AlgebraElement(self, self._canon(payload))

    @property
    def zero(self) -> AlgebraElement:
        return AlgebraElement(self, self._zero())

    @property
    def one(self) -> AlgebraElement:
        return AlgebraElement(self, self._one())

    def from_int(self, n: int) -> AlgebraElement:
        out = self._zero()
        step = self._one() if n >= 0 else self._neg(self._one())
        for _ in range(abs(n)):
            out = self._add(out, step)
        return AlgebraElement(self, out)

    def elements(self) -> Iterator[AlgebraElement] | None:
        """Iterate every element, or None for infinite backends."""
        return None

    def sample(self, rng: random.Random) -> AlgebraElement:
        raise NotImplementedError

    def _canon(self, payload):
        return payload

    def _zero(self):
        raise NotImplementedError

    def _one(self):
        raise NotImplementedError

    def _add(self, p, q):
        raise NotImplementedError

    def _neg(self, p):
        raise NotImplementedError

    def _mul(self, p, q):
        raise NotImplementedError

    def _star(self, p):
        return p  # trivial involution unless overridden

    def _invert(self, p):
        raise NotImplementedError

    def _format(self, p) -> str:
        return repr(p)

    def __repr__(self) -> str:
        return f"<ring {self.kind}>"


# ---------------------------------------------------------------------------
# Commutative scalar backends
# ---------------------------------------------------------------------------


class _Integers(Ring):
    kind = "integers"

    def from_int(self, n: int) -> AlgebraElement:
        return AlgebraElement(self, n)

    def sample(self, rng: random.Random) -> AlgebraElement:
        return AlgebraElement(self, rng.randint(-9, 9))

    def _zero(self):
        return 0

    def _one(self):
        return 1

    def _add(self, p, q):
        return p + q

    def _neg(self, p):
        return -p

    def _mul(self, p, q):
        return p * q

    def _invert(self, p):
        if p in (1, -1):
            return p
        return NotInvertible(f"{p} has no integer inverse", witness=p)

    def _format(self, p):
        return str(p)


_THE_INTEGERS = _Integers()


def integers() -> Ring:
    """The ring of integers."""
    return _THE_INTEGERS


class _ZMod(Ring):
    kind = "modular"

    def __init__(self, n: int):
        if n < 2:
            raise ValueError("modulus must be at least 2")
        self.n = n
        self.size = n
        self.kind = f"z{n}"

    def from_int(self, n: int) -> AlgebraElement:
        return AlgebraElement(self, n % self.n)

    def elements(self):
        return (AlgebraElement(self, i) for i in range(self.n))

    def sample(self, rng):
        return AlgebraElement(self, rng.randrange(self.n))

    def _canon(self, p):
        return int(p) % self.n

    def _zero(self):
        return 0

    def _one(self):
        return 1 % self.n

    def _add(self, p, q):
        return (p + q) % self.n

    def _neg(self, p):
        return (-p) % self.n

    def _mul(self, p, q):
        return (p * q) % self.n

    def _invert(self, p):
        g = gcd(p, self.n)
        if g != 1:
            return NotInvertible(
                f"{p} is a zero divisor mod {self.n}", witness=self.n // g
            )
        return pow(p, -1, self.n)

    def _format(self, p):
        return f"{p}₍{self.n}₎"

    def __repr__(self):
        return f"<ring Z/{self.n}>"


_ZMODS: dict[int, _ZMod] = {}


def zmod(n: int) -> Ring:
    """The modular ring Z/n (cached per modulus)."""
    ring = _ZMODS.get(n)
    if ring is None:
        ring = _ZMod(n)
        _ZMODS[n] = ring
    return ring


class _Laurent(Ring):
    """Univariate Laurent polynomials; the involution inverts the variable."""

    kind = "polynomial"

    def __init__(self, base: Ring, variable: str):
        self.base = base
        self.variable = variable

    def variable_power(self, exponent: int, coeff: int = 1) -> AlgebraElement:
        c = self.base.from_int(coeff).payload
        if c == self.base._zero():
            return self.zero
        return AlgebraElement(self, ((exponent, c),))

    def from_int(self, n: int) -> AlgebraElement:
        return self.variable_power(0, n)

    def sample(self, rng):
        terms = {}
        for _ in range(rng.randrange(3)):
            terms[rng.randint(-2, 2)] = self.base.sample(rng).payload
        return self.element(tuple(terms.items()))

    def _canon(self, p):
        collected: dict[int, object] = {}
        for exponent, coeff in p:
            cur = collected.get(exponent, self.base._zero())
            collected[exponent] = self.base._add(cur, self.base._canon(coeff))
        return tuple(
            (e, c) for e, c in sorted(collected.items()) if c != self.base._zero()
        )

    def _zero(self):
        return ()

    def _one(self):
        return ((0, self.base._one()),)

    def _add(self, p, q):
        return self._canon(p + q)

    def _neg(self, p):
        return tuple((e, self.base._neg(c)) for e, c in p)

    def _mul(self, p, q):
        out: dict[int, object] = {}
        for e1, c1 in p:
            for e2, c2 in q:
                cur = out.get(e1 + e2, self.base._zero())
                out[e1 + e2] = self.base._add(cur, self.base._mul(c1, c2))
        return tuple((e, c) for e, c in sorted(out.items()) if c != self.base._zero())

    def _star(self, p):
        return tuple(sorted((-e, self.base._star(c)) for e, c in p))

    def _invert(self, p):
        if len(p) != 1:
            return NotInvertible("only monomials are invertible", witness=p)
        e, c = p[0]
        cinv = self.base._invert(c)
        if isinstance(cinv, NotInvertible):
            return cinv
        return ((-e, cinv),)

    def _format(self, p):
        if not p:
            return "0"
        v = self.variable
        parts = []
        for e, c in p:
            if e == 0:
                parts.append(f"{self.base._format(c)}")
            else:
                suffix = v if e == 1 else f"{v}^{e}"
                parts.append(f"{self.base._format(c)}·{suffix}")
        return " + ".join(parts)


_LAURENTS: dict[tuple[int, str], _Laurent] = {}


def polynomial_ring(base: Ring, variable: str = "l") -> Ring:
    """Laurent polynomials over a commutative base; star inverts the variable."""
    key = (id(base), variable)
    ring = _LAURENTS.get(key)
    if ring is None:
        ring = _Laurent(base, variable)
        _LAURENTS[key] = ring
    return ring


# ---------------------------------------------------------------------------
# Matrix, Zorn and Cayley-Dickson backends
# ---------------------------------------------------------------------------


class _Matrix(Ring):
    kind = "matrix"

    def __init__(self, base: Ring, n: int):
        self.base = base
        self.n = n
        if base.size is not None:
            self.size = base.size ** (n * n)

    def from_int(self, n: int) -> AlgebraElement:
        c = self.base.from_int(n).payload
        z = self.base._zero()
        return AlgebraElement(
            self,
            tuple(
                tuple(c if i == j else z for j in range(self.n))
                for i in range(self.n)
            ),
        )

    def from_rows(self, rows) -> AlgebraElement:
        return self.element(
            tuple(tuple(self.base._canon(x) for x in row) for row in rows)
        )

    def elements(self):
        base_all = [e.payload for e in self.base.elements()]
        n = self.n
        return (
            AlgebraElement(
                self, tuple(tuple(flat[i * n + j] for j in range(n)) for i in range(n))
            )
            for flat in iter_product(base_all, repeat=n * n)
        )

    def sample(self, rng):
        return AlgebraElement(
            self,
            tuple(
                tuple(self.base.sample(rng).payload for _ in range(self.n))
                for _ in range(self.n)
            ),
        )

    def _canon(self, p):
        return tuple(tuple(self.base._canon(x) for x in row) for row in p)

    def _zero(self):
        z = self.base._zero()
        return tuple(tuple(z for _ in range(self.n)) for _ in range(self.n))

    def _one(self):
        return self.from_int(1).payload

    def _add(self, p, q):
        return tuple(
            tuple(self.base._add(a, b) for a, b in zip(pr, qr))
            for pr, qr in zip(p, q)
        )

    def _neg(self, p):
        return tuple(tuple(self.base._neg(x) for x in row) for row in p)

    def _mul(self, p, q):
        n = self.n
        badd, bmul, bzero = self.base._add, self.base._mul, self.base._zero()
        out = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = bzero
                for k in range(n):
                    acc = badd(acc, bmul(p[i][k], q[k][j]))
                row.append(acc)
            out.append(tuple(row))
        return tuple(out)

    def _star(self, p):
        return tuple(
            tuple(self.base._star(p[j][i]) for j in range(self.n))
            for i in range(self.n)
        )

    def _invert(self, p):
        n = self.n
        base = self.base
        aug = [list(p[i]) + list(self._one()[i]) for i in range(n)]
        for col in range(n):
            pivot_inv = None
            for r in range(col, n):
                cand = base._invert(aug[r][col])
                if not isinstance(cand, NotInvertible):
                    aug[col], aug[r] = aug[r], aug[col]
                    pivot_inv = cand
                    break
            if pivot_inv is None:
                return NotInvertible(
                    f"no unit pivot in column {col}", witness=("column", col)
                )
            aug[col] = [base._mul(pivot_inv, x) for x in aug[col]]
            for r in range(n):
                if r != col and aug[r][col] != base._zero():
                    f = aug[r][col]
                    aug[r] = [
                        base._add(x, base._neg(base._mul(f, y)))
                        for x, y in zip(aug[r], aug[col])
                    ]
        return tuple(tuple(row[n:]) for row in aug)

    def _format(self, p):
        rows = "; ".join(
            " ".join(self.base._format(x) for x in row) for row in p
        )
        return f"[{rows}]"


_MATRICES: dict[tuple[int, int], _Matrix] = {}


def matrix_ring(base: Ring, n: int) -> Ring:
    """n-by-n matrices over a base ring; star is the transpose."""
    key = (id(base), n)
    ring = _MATRICES.get(key)
    if ring is None:
        ring = _Matrix(base, n)
        _MATRICES[key] = ring
    return ring


def _dot3(base: Ring, u, v):
    acc = base._zero()
    for a, b in zip(u, v):
        acc = base._add(acc, base._mul(a, b))
    return acc


def _cross3(base: Ring, u, v):
    def term(i, j, k):
        return base._add(
            base._mul(u[j], v[k]), base._neg(base._mul(u[k], v[j]))
        )

    return (term(0, 1, 2), term(1, 2, 0), term(2, 0, 1))


class _Zorn(Ring):
    """Zorn vector matrices [[a, v], [w, b]]: the split octonions."""

    kind = "zorn"

    def __init__(self, base: Ring):
        self.base = base
        if base.size is not None:
            self.size = base.size ** 8

    def from_parts(self, a, v, w, b) -> AlgebraElement:
        return self.element((a, tuple(v), tuple(w), b))

    def from_int(self, n: int) -> AlgebraElement:
        c = self.base.from_int(n).payload
        z = self.base._zero()
        return AlgebraElement(self, (c, (z, z, z), (z, z, z), c))

    def coords(self, x: AlgebraElement) -> tuple:
        a, v, w, b = x.payload
        return (a,) + v + w + (b,)

    def from_coords(self, flat: Sequence) -> AlgebraElement:
        return self.element((flat[0], tuple(flat[1:4]), tuple(flat[4:7]), flat[7]))

    def elements(self):
        base_all = [e.payload for e in self.base.elements()]
        return (
            self.from_coords(flat) for flat in iter_product(base_all, repeat=8)
        )

    def sample(self, rng):
        return self.from_coords([self.base.sample(rng).payload for _ in range(8)])

    def _canon(self, p):
        a, v, w, b = p
        c = self.base._canon
        return (c(a), tuple(c(x) for x in v), tuple(c(x) for x in w), c(b))

    def _zero(self):
        z = self.base._zero()
        return (z, (z, z, z), (z, z, z), z)

    def _one(self):
        o, z = self.base._one(), self.base._zero()
        return (o, (z, z, z), (z, z, z), o)

    def _add(self, p, q):
        badd = self.base._add
        return (
            badd(p[0], q[0]),
            tuple(badd(x, y) for x, y in zip(p[1], q[1])),
            tuple(badd(x, y) for x, y in zip(p[2], q[2])),
            badd(p[3], q[3]),
        )

    def _neg(self, p):
        bneg = self.base._neg
        return (
            bneg(p[0]),
            tuple(bneg(x) for x in p[1]),
            tuple(bneg(x) for x in p[2]),
            bneg(p[3]),
        )

    def _mul(self, p, q):
        base = self.base
        a, v, w, b = p
        a2, v2, w2, b2 = q
        badd, bmul, bneg = base._add, base._mul, base._neg

        def scl(c, vec):
            return tuple(bmul(c, x) for x in vec)

        def vadd(u1, u2):
            return tuple(badd(x, y) for x, y in zip(u1, u2))

        new_a = badd(bmul(a, a2), _dot3(base, v, w2))
        new_v = vadd(
            vadd(scl(a, v2), scl(b2, v)),
            tuple(bneg(x) for x in _cross3(base, w, w2)),
        )
        new_w = vadd(vadd(scl(a2, w), scl(b, w2)), _cross3(base, v, v2))
        new_b = badd(bmul(b, b2), _dot3(base, w, v2))
        return (new_a, new_v, new_w, new_b)

    def _star(self, p):
        a, v, w, b = p
        bneg = self.base._neg
        return (b, tuple(bneg(x) for x in v), tuple(bneg(x) for x in w), a)

    def scalar_norm(self, x: AlgebraElement):
        """The norm ab - v.w as a base ring element."""
        a, v, w, b = x.payload
        return AlgebraElement(
            self.base,
            self.base._add(
                self.base._mul(a, b), self.base._neg(_dot3(self.base, v, w))
            ),
        )

    def _invert(self, p):
        a, v, w, b = p
        n = self.base._add(
            self.base._mul(a, b), self.base._neg(_dot3(self.base, v, w))
        )
        ninv = self.base._invert(n)
        if isinstance(ninv, NotInvertible):
            return NotInvertible("norm is not invertible", witness=n)
        conj = self._star(p)
        bmul = self.base._mul
        inv = (
            bmul(ninv, conj[0]),
            tuple(bmul(ninv, x) for x in conj[1]),
            tuple(bmul(ninv, x) for x in conj[2]),
            bmul(ninv, conj[3]),
        )
        if self._mul(p, inv) != self._one():  # pragma: no cover - sanity
            raise AssertionError("Zorn inverse failed verification")
        return inv

    def _format(self, p):
        a, v, w, b = p
        f = self.base._format
        return (
            f"[[{f(a)}, ({', '.join(map(f, v))})], "
            f"[({', '.join(map(f, w))}), {f(b)}]]"
        )


_ZORNS: dict[int, _Zorn] = {}


def zorn(base: Ring) -> Ring:
    """Split octonions over a commutative base, as Zorn vector matrices."""
    ring = _ZORNS.get(id(base))
    if ring is None:
        ring = _Zorn(base)
        _ZORNS[id(base)] = ring
    return ring


def zorn_basis(ring: Ring) -> list[AlgebraElement]:
    """The standard basis e, f, u1, u2, u3, v1, v2, v3 of a Zorn backend."""
    base = ring.base
    o, z = base._one(), base._zero()
    out = [
        ring.element((o, (z, z, z), (z, z, z), z)),
        ring.element((z, (z, z, z), (z, z, z), o)),
    ]
    for i in range(3):
        vec = tuple(o if j == i else z for j in range(3))
        out.append(ring.element((z, vec, (z, z, z), z)))
    for i in range(3):
        vec = tuple(o if j == i else z for j in range(3))
        out.append(ring.element((z, (z, z, z), vec, z)))
    return out


class _CayleyDickson(Ring):
    kind = "cayley_dickson"

    def __init__(self, base: Ring, mu):
        self.base = base
        self.mu = mu  # base payload
        if base.size is not None:
            self.size = base.size ** 2

    def from_pair(self, x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
        return AlgebraElement(self, (x.payload, y.payload))

    def from_int(self, n: int) -> AlgebraElement:
        return AlgebraElement(self, (self.base.from_int(n).payload, self.base._zero()))

    def elements(self):
        return (
            AlgebraElement(self, (x.payload, y.payload))
            for x in self.base.elements()
            for y in self.base.elements()
        )

    def sample(self, rng):
        return AlgebraElement(
            self, (self.base.sample(rng).payload, self.base.sample(rng).payload)
        )

    def _canon(self, p):
        return (self.base._canon(p[0]), self.base._canon(p[1]))

    def _zero(self):
        return (self.base._zero(), self.base._zero())

    def _one(self):
        return (self.base._one(), self.base._zero())

    def _add(self, p, q):
        return (self.base._add(p[0], q[0]), self.base._add(p[1], q[1]))

    def _neg(self, p):
        return (self.base._neg(p[0]), self.base._neg(p[1]))

    def _mul(self, p, q):
        a, b = p
        c, d = q
        base = self.base
        first = base._add(
            base._mul(a, c), base._mul(self.mu, base._mul(base._star(d), b))
        )
        second = base._add(base._mul(d, a), base._mul(b, base._star(c)))
        return (first, second)

    def _star(self, p):
        return (self.base._star(p[0]), self.base._neg(p[1]))

    def _invert(self, p):
        # n(x) = x x* is central scalar (n, 0); invert through it
        n_payload = self._mul(p, self._star(p))
        scalar, residue = n_payload
        if residue != self.base._zero():
            return NotInvertible("norm is not scalar", witness=n_payload)
        sinv = self.base._invert(scalar)
        if isinstance(sinv, NotInvertible):
            return NotInvertible("norm is not invertible", witness=scalar)
        conj = self._star(p)
        inv = (self.base._mul(sinv, conj[0]), self.base._mul(sinv, conj[1]))
        if self._mul(p, inv) != self._one():
            return NotInvertible("element is not invertible", witness=n_payload)
        return inv

    def _format(self, p):
        return f"({self.base._format(p[0])}, {self.base._format(p[1])})"


def cayley_dickson_double(base: Ring, scalar) -> Ring:
    """The Cayley-Dickson double of a unital algebra with involution.

    (a,b)(c,d) = (ac + mu d* b, da + b c*) and (a,b)* = (a*, -b); with
    split parameter mu = 1 the double of the double of K x K is a split
    octonion algebra.
    """
    if isinstance(scalar, AlgebraElement):
        mu = scalar.payload
    else:
        mu = base.from_int(scalar).payload
    return _CayleyDickson(base, mu)


class _Product(Ring):
    kind = "product"

    def __init__(self, factors: Sequence[Ring]):
        self.factors = tuple(factors)
        sizes = [f.size for f in self.factors]
        if all(s is not None for s in sizes):
            total = 1
            for s in sizes:
                total *= s
            self.size = total

    def from_int(self, n: int) -> AlgebraElement:
        return AlgebraElement(
            self, tuple(f.from_int(n).payload for f in self.factors)
        )

    def elements(self):
        pools = [[e.payload for e in f.elements()] for f in self.factors]
        return (AlgebraElement(self, combo) for combo in iter_product(*pools))

    def sample(self, rng):
        return AlgebraElement(
            self, tuple(f.sample(rng).payload for f in self.factors)
        )

    def _canon(self, p):
        return tuple(f._canon(x) for f, x in zip(self.factors, p))

    def _zero(self):
        return tuple(f._zero() for f in self.factors)

    def _one(self):
        return tuple(f._one() for f in self.factors)

    def _add(self, p, q):
        return tuple(f._add(x, y) for f, x, y in zip(self.factors, p, q))

    def _neg(self, p):
        return tuple(f._neg(x) for f, x in zip(self.factors, p))

    def _mul(self, p, q):
        return tuple(f._mul(x, y) for f, x, y in zip(self.factors, p, q))

    def _star(self, p):
        return tuple(f._star(x) for f, x in zip(self.factors, p))

    def _invert(self, p):
        out = []
        for i, (f, x) in enumerate(zip(self.factors, p)):
            inv = f._invert(x)
            if isinstance(inv, NotInvertible):
                return NotInvertible(f"factor {i} not invertible", witness=(i, x))
            out.append(inv)
        return tuple(out)

    def _format(self, p):
        return "(" + ", ".join(f._format(x) for f, x in zip(self.factors, p)) + ")"


def product_ring(factors: Sequence[Ring]) -> Ring:
    return _Product(factors)


# ---------------------------------------------------------------------------
# Identity toolkit
# ---------------------------------------------------------------------------


def associator(x: AlgebraElement, y: AlgebraElement, z: AlgebraElement) -> AlgebraElement:
    """[x, y, z] = (xy)z - x(yz)."""
    if y.ring is not x.ring or z.ring is not x.ring:
        raise ValueError("associator arguments must share one backend")
    return (x * y) * z - x * (y * z)


def try_invert(x: AlgebraElement):
    """A two-sided inverse, or a NotInvertible value with a witness."""
    result = x.ring._invert(x.payload)
    if isinstance(result, NotInvertible):
        return result
    return AlgebraElement(x.ring, result)


def _probe_elements(ring: Ring, count: int, rng: random.Random) -> list[AlgebraElement]:
    if ring.size is not None and ring.size <= count:
        return list(ring.elements())
    return [ring.sample(rng) for _ in range(count)]


def _probe_tuples(
    ring: Ring, arity: int, budget: int, rng: random.Random
) -> tuple[list[tuple], bool]:
    """Argument tuples: exhaustive when the full power fits in the budget."""
    if ring.size is not None and ring.size ** arity <= budget:
        pool = list(ring.elements())
        return list(iter_product(pool, repeat=arity)), True
    pool_size = max(4, round(budget ** (1 / arity)))
    pool = _probe_elements(ring, pool_size, rng)
    tuples = [tuple(rng.choice(pool) for _ in range(arity)) for _ in range(budget)]
    return tuples, False


def nucleus_member(ring: Ring, nu: AlgebraElement, budget: int = 4096, seed: int = 0) -> bool:
    """Whether [nu,x,y] = [x,nu,y] = [x,y,nu] = 0 over the probe set."""
    rng = random.Random(seed)
    pairs, _ = _probe_tuples(ring, 2, budget, rng)
    zero = ring.zero
    for x, y in pairs:
        if (
            associator(nu, x, y) != zero
            or associator(x, nu, y) != zero
            or associator(x, y, nu) != zero
        ):
            return False
    return True


@dataclass
class IdentityReport:
    """Outcome of an identity batch; failures carry printable witnesses."""

    backend: str
    checked: int = 0
    exhaustive: bool = False
    failures: list = dataclass_field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def record(self, name: str, witness) -> None:
        if len(self.failures) < 20:
            self.failures.append({"identity": name, "witness": witness})

    def to_dict(self) -> dict:
        return {
            "backend": self.backend,
            "checked": self.checked,
            "exhaustive": self.exhaustive,
            "ok": self.ok,
            "failures": self.failures,
        }


def _alternative_identities() -> list[tuple[str, Callable]]:
    def a(x, y, z):
        return associator(x, y, z)

    return [
        ("x(y(xz)) = (xyx)z", lambda x, y, z: x * (y * (x * z)) - ((x * y) * x) * z),
        ("((yx)z)x = y(xzx)", lambda x, y, z: ((y * x) * z) * x - y * ((x * z) * x)),
        ("(xy)(zx) = x(yz)x", lambda x, y, z: (x * y) * (z * x) - (x * (y * z)) * x),
        ("[x,y,zx] = x[y,z,x]", lambda x, y, z: a(x, y, z * x) - x * a(y, z, x)),
        ("[xy,z,x] = [x,y,z]x", lambda x, y, z: a(x * y, z, x) - a(x, y, z) * x),
        (
            "[y,x²,z] = x[y,x,z] + [y,x,z]x",
            lambda x, y, z: a(y, x * x, z) - x * a(y, x, z) - a(y, x, z) * x,
        ),
        (
            "x(y(zx)y) = (xy)z(xy)",
            lambda x, y, z: x * ((y * (z * x)) * y) - ((x * y) * z) * (x * y),
        ),
        (
            "(x(yz)x)y = (xy)z(xy)",
            lambda x, y, z: ((x * (y * z)) * x) * y - ((x * y) * z) * (x * y),
        ),
        (
            "x(y(xzx)y)x = (xyx)z(xyx)",
            lambda x, y, z: (x * ((y * ((x * z) * x)) * y)) * x
            - (((x * y) * x) * z) * ((x * y) * x),
        ),
    ]


_SIGNED_PERMS = [
    ((0, 1, 2), 1), ((1, 2, 0), 1), ((2, 0, 1), 1),
    ((1, 0, 2), -1), ((0, 2, 1), -1), ((2, 1, 0), -1),
]


def alternative_identity_suite(ring: Ring, budget: int = 10000, seed: int = 0) -> IdentityReport:
    """Check alternativity, the nine product identities and skew-symmetry."""
    rng = random.Random(seed)
    report = IdentityReport(backend=repr(ring))
    triples, report.exhaustive = _probe_tuples(ring, 3, budget, rng)
    identities = _alternative_identities()
    zero = ring.zero
    for x, y, z in triples:
        report.checked += 1
        if associator(x, x, y) != zero or associator(x, y, x) != zero or associator(y, x, x) != zero:
            report.record("alternativity", repr((x, y)))
        base = associator(x, y, z)
        args = (x, y, z)
        for perm, sign in _SIGNED_PERMS[1:]:
            if associator(*(args[i] for i in perm)) != sign * base:
                report.record("associator skew-symmetry", repr(args))
                break
        for name, delta in identities:
            if delta(x, y, z) != zero:
                report.record(name, repr(args))
    return report


def inv_alter_check(x: AlgebraElement, y: AlgebraElement, budget: int = 64, seed: int = 0) -> IdentityReport:
    """Verify the inversion lemma for 1 + xy: the inverse of 1 + yx and
    the four hatted identities x(ŷz) = x̂(yz), y(x̂z) = ŷ(xz),
    (zx̂)y = (zx)ŷ, (zŷ)x = (zy)x̂ over probe z's."""
    ring = x.ring
    report = IdentityReport(backend=repr(ring))
    one = ring.one
    u = one + x * y
    u_inv = try_invert(u)
    if isinstance(u_inv, NotInvertible):
        report.record("precondition: 1 + xy invertible", repr(u))
        return report
    v = one + y * x
    v_formula = one - (y * u_inv) * x
    if v * v_formula != one or v_formula * v != one:
        report.record("(1+yx)⁻¹ = 1 - y(1+xy)⁻¹x", repr((x, y)))
        return report
    v_inv = v_formula
    y_hat = y * u_inv
    x_hat = x * v_inv
    if y_hat != v_inv * y:
        report.record("ŷ = y(1+xy)⁻¹ = (1+yx)⁻¹y", repr((x, y)))
    if x_hat != u_inv * x:
        report.record("x̂ = x(1+yx)⁻¹ = (1+xy)⁻¹x", repr((x, y)))
    rng = random.Random(seed)
    probes = _probe_elements(ring, budget, rng)
    for z in probes:
        report.checked += 1
        if x * (y_hat * z) != x_hat * (y * z):
            report.record("x(ŷz) = x̂(yz)", repr(z))
        if y * (x_hat * z) != y_hat * (x * z):
            report.record("y(x̂z) = ŷ(xz)", repr(z))
        if (z * x_hat) * y != (z * x) * y_hat:
            report.record("(zx̂)y = (zx)ŷ", repr(z))
        if (z * y_hat) * x != (z * y) * x_hat:
            report.record("(zŷ)x = (zy)x̂", repr(z))
    return report


# ---------------------------------------------------------------------------
# Recognizing a split octonion algebra from its multiplication table
# ---------------------------------------------------------------------------


def _field_solve(field: Ring, rows: list[list], rhs: list) -> list | None:
    """One solution of (rows)x = rhs over a finite field, or None."""
    m, n = len(rows), len(rows[0]) if rows else 0
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    pivots = []
    rank = 0
    for col in range(n):
        pivot = None
        for r in range(rank, m):
            if aug[r][col] != field._zero():
                pivot = r
                break
        if pivot is None:
            continue
        aug[rank], aug[pivot] = aug[pivot], aug[rank]
        inv = field._invert(aug[rank][col])
        if isinstance(inv, NotInvertible):
            return None
        aug[rank] = [field._mul(inv, x) for x in aug[rank]]
        for r in range(m):
            if r != rank and aug[r][col] != field._zero():
                f = aug[r][col]
                aug[r] = [
                    field._add(a, field._neg(field._mul(f, b)))
                    for a, b in zip(aug[r], aug[rank])
                ]
        pivots.append(col)
        rank += 1
    for r in range(rank, m):
        if aug[r][n] != field._zero():
            return None
    out = [field._zero()] * n
    for r, col in enumerate(pivots):
        out[col] = aug[r][n]
    return out


def _field_nullspace(field: Ring, rows: list[list]) -> list[list]:
    m, n = len(rows), len(rows[0])
    aug = [list(r) for r in rows]
    pivots: list[int] = []
    rank = 0
    for col in range(n):
        pivot = None
        for r in range(rank, m):
            if aug[r][col] != field._zero():
                pivot = r
                break
        if pivot is None:
            continue
        aug[rank], aug[pivot] = aug[pivot], aug[rank]
        inv = field._invert(aug[rank][col])
        aug[rank] = [field._mul(inv, x) for x in aug[rank]]
        for r in range(m):
            if r != rank and aug[r][col] != field._zero():
                f = aug[r][col]
                aug[r] = [
                    field._add(a, field._neg(field._mul(f, b)))
                    for a, b in zip(aug[r], aug[rank])
                ]
        pivots.append(col)
        rank += 1
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        vec = [field._zero()] * n
        vec[fc] = field._one()
        for r, col in enumerate(pivots):
            vec[col] = field._neg(aug[r][fc])
        basis.append(vec)
    return basis


@dataclass
class CompositionIso:
    """An isomorphism from an 8-dimensional split algebra onto Zorn matrices."""

    field: Ring
    zorn: Ring
    to_zorn_matrix: list[list]  # algebra coordinates -> Zorn coordinates
    from_zorn_matrix: list[list]

    def to_zorn(self, coords: Sequence) -> AlgebraElement:
        flat = [
            _dot_row(self.field, self.to_zorn_matrix[i], coords) for i in range(8)
        ]
        return self.zorn.from_coords(flat)

    def from_zorn(self, element: AlgebraElement) -> tuple:
        coords = self.zorn.coords(element)
        return tuple(
            _dot_row(self.field, self.from_zorn_matrix[i], coords) for i in range(8)
        )


def _dot_row(field: Ring, row: Sequence, vec: Sequence):
    acc = field._zero()
    for a, b in zip(row, vec):
        acc = field._add(acc, field._mul(a, b))
    return acc


def split_octonion_iso(
    field: Ring,
    one_coords: Sequence,
    mul: Callable[[Sequence, Sequence], Sequence],
) -> CompositionIso:
    """Recognize a split octonion algebra given coordinatewise multiplication.

    The algebra is presented by an 8-dimensional coordinate space over a
    finite field, its unit vector, and a bilinear product on coordinate
    vectors.  Returns an isomorphism onto the Zorn backend, verified on
    the full 8x8 basis multiplication table.
    """
    zero = field._zero()
    one = field._one()
    unit = list(one_coords)

    def smul(c, vec):
        return [field._mul(c, x) for x in vec]

    def vadd(u, v):
        return [field._add(a, b) for a, b in zip(u, v)]

    def vneg(u):
        return [field._neg(x) for x in u]

    # 1. find a split idempotent e with 0 != e != 1
    idem = None
    scalars = [e.payload for e in field.elements()]
    candidates = []
    for i in range(8):
        for j in range(8):
            for c in scalars:
                if c == zero:
                    continue
                vec = [zero] * 8
                vec[i] = one
                if i != j:
                    vec[j] = c
                candidates.append(vec)
    for x in candidates:
        x2 = mul(x, x)
        sol = _field_solve(
            field,
            [[unit[k], x[k]] for k in range(8)],
            list(x2),
        )
        if sol is None:
            continue
        n_val, t_val = field._neg(sol[0]), sol[1]
        roots = [
            r
            for r in scalars
            if field._add(
                field._add(field._mul(r, r), field._neg(field._mul(t_val, r))), n_val
            )
            == zero
        ]
        if len(roots) == 2:
            r1, r2 = roots
            dinv = field._invert(field._add(r1, field._neg(r2)))
            e = smul(dinv, vadd(x, vneg(smul(r2, unit))))
            if list(mul(e, e)) == list(e) and e != unit and any(c != zero for c in e):
                idem = e
                break
    if idem is None:
        raise ValueError("no split idempotent found; algebra is not split")

    f_vec = vadd(unit, vneg(idem))
    deltas = [[one if k == i else zero for k in range(8)] for i in range(8)]
    left_e = [mul(idem, d) for d in deltas]   # columns
    right_e = [mul(d, idem) for d in deltas]

    def peirce(left_coeff, right_coeff):
        # solve e z = left_coeff z and z e = right_coeff z
        rows = []
        for k in range(8):
            rows.append(
                [
                    field._add(
                        left_e[c][k],
                        field._neg(field._mul(left_coeff, deltas[c][k])),
                    )
                    for c in range(8)
                ]
            )
        for k in range(8):
            rows.append(
                [
                    field._add(
                        right_e[c][k],
                        field._neg(field._mul(right_coeff, deltas[c][k])),
                    )
                    for c in range(8)
                ]
            )
        return _field_nullspace(field, rows)

    u_space = peirce(one, zero)
    v_space = peirce(zero, one)
    if len(u_space) != 3 or len(v_space) != 3:
        raise ValueError("Peirce decomposition does not have shape (1,3,3,1)")

    u1, u2 = u_space[0], u_space[1]
    v3 = mul(u1, u2)
    # u3 solves u3 * v3 = e inside the U space
    cols = [mul(u, v3) for u in u_space]
    sol = _field_solve(
        field, [[cols[c][k] for c in range(3)] for k in range(8)], list(idem)
    )
    if sol is None:
        raise ValueError("cannot normalize the third hyperbolic pair")
    u3 = [zero] * 8
    for c, coeff in enumerate(sol):
        u3 = vadd(u3, smul(coeff, u_space[c]))
    v1 = mul(u2, u3)
    v2 = mul(u3, u1)

    basis = [idem, f_vec, u1, u2, u3, v1, v2, v3]
    # coefficients over `basis`: solve P c = delta_i for each unit vector
    basis_rows = [[basis[c][k] for c in range(8)] for k in range(8)]
    coeff_cols = []
    for i in range(8):
        rhs = [one if k == i else zero for k in range(8)]
        col = _field_solve(field, basis_rows, rhs)
        if col is None:
            raise ValueError("recognized basis is not a basis")
        coeff_cols.append(col)

    zring = zorn(field)
    zbasis = zorn_basis(zring)
    zcoords = [zring.coords(zb) for zb in zbasis]
    # to_zorn = (Zorn coords of basis) . (coefficients over basis)
    to_rows = [
        [
            _dot_row(field, [zcoords[b][i] for b in range(8)],
                     [coeff_cols[k][b] for b in range(8)])
            for k in range(8)
        ]
        for i in range(8)
    ]
    # from_zorn = basis matrix . (coefficients over the Zorn basis)
    zbasis_rows = [[zcoords[b][i] for b in range(8)] for i in range(8)]
    zcoeff_cols = []
    for i in range(8):
        rhs = [one if k == i else zero for k in range(8)]
        col = _field_solve(field, zbasis_rows, rhs)
        zcoeff_cols.append(col)
    from_rows = [
        [
            _dot_row(field, [basis[b][k] for b in range(8)],
                     [zcoeff_cols[i2][b] for b in range(8)])
            for i2 in range(8)
        ]
        for k in range(8)
    ]
    iso = CompositionIso(
        field=field,
        zorn=zring,
        to_zorn_matrix=to_rows,
        from_zorn_matrix=from_rows,
    )
    # full table verification against the Zorn backend
    for i in range(8):
        for j in range(8):
            prod = mul(basis[i], basis[j])
            expected = zbasis[i] * zbasis[j]
            got = iso.to_zorn(prod)
            if got != expected:
                raise AssertionError(
                    f"basis product {i},{j} disagrees with the Zorn table"
                )
    return iso
