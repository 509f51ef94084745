"""Coordinatising ring structures for root-graded groups of types B and F.

Three families of descriptors live here, all built on the exact backends
from `algebra`:

* `BBRing` — one alternative unital ring with an anti-automorphism, a
  twisting unit lambda, and a form group Delta carrying phi, a pairing
  into the nucleus, a norm-like map rho, and a right ring action;
* `BARing` — the sign-indexed view with four carriers R_pq and two form
  groups, obtained from a BBRing by lambda-twisting;
* `F4Ring` — a pair of alternative rings exchanging trace-like phi maps
  and norm-like rho maps.

Every family ships a named axiom checker that exhausts small carriers
(or samples larger ones) and reports witnesses; the worked example
constructors (orthogonal, symplectic, split-octonion, and the free
initial objects); the overlap data tying together the two coordinate
systems on a rank-two corner; and the nilpotent series extension
R + R*e + R*e^2 used by the existence machinery.

Delta groups need not be abelian, so they are handled through explicit
`delta_*` methods on opaque payloads and printed with the visible sum
symbol; the ring parts always use wrapped `AlgebraElement` values.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dataclass_field
from itertools import product as iter_product
from typing import Callable, Mapping

from .algebra import (
    AlgebraElement,
    NotInvertible,
    Ring,
    associator,
    integers,
    polynomial_ring,
    try_invert,
    zorn,
)

__all__ = [
    "AxiomCheck",
    "AxiomReport",
    "BBRing",
    "BARing",
    "F4Ring",
    "F4OverlapData",
    "TruncatedBBRing",
    "TruncatedF4Ring",
    "TruncatedSeriesRing",
    "bb_orthogonal",
    "bb_symplectic",
    "bb_octonion",
    "bb_free",
    "bb_from_f4",
    "ba_from_bb",
    "f4_chevalley",
    "f4_free",
    "f4_octonion",
    "mirror_f4",
    "overlap_from_f4",
    "truncate_series",
    "check_bb_axioms",
    "check_ba_axioms",
    "check_f4_axioms",
    "check_f4_overlap",
]

_SUBGROUP_CAP = 1 << 17


# ---------------------------------------------------------------------------
# Axiom reports
# ---------------------------------------------------------------------------


@dataclass
class AxiomCheck:
    """One named law, how many tuples it saw, and a witness if it failed."""

    name: str
    checked: int
    exhaustive: bool
    witness: dict | None = None

    @property
    def status(self) -> str:
        return "pass" if self.witness is None else "fail"

    def to_dict(self) -> dict:
        out = {"axiom_name": self.name, "status": self.status, "checked": self.checked}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass
class AxiomReport:
    """A full suite run over one descriptor."""

    structure: str
    backend: str
    budget: int
    seed: int
    checks: list[AxiomCheck] = dataclass_field(default_factory=list)
    notes: dict = dataclass_field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c.witness is None for c in self.checks)

    @property
    def exhaustive(self) -> bool:
        return all(c.exhaustive for c in self.checks)

    def failures(self) -> list[AxiomCheck]:
        return [c for c in self.checks if c.witness is not None]

    def to_dict(self) -> dict:
        return {
            "structure": self.structure,
            "backend": self.backend,
            "budget": self.budget,
            "seed": self.seed,
            "ok": self.ok,
            "exhaustive": self.exhaustive,
            "notes": self.notes,
            "checks": [c.to_dict() for c in self.checks],
        }


_ARG_NAMES = {
    "r": "xyzt",
    "d": "uvws",
    "p": "xyzt",
    "q": "uvws",
    "x": "xyzt",
    "u": "uvws",
}


class _Runner:
    """Iterates argument tuples from per-sort pools and records checks.

    A check is exhaustive when every pool it draws from covers its whole
    carrier and the full product fits in the budget; otherwise the product
    is either enumerated (if small enough) or sampled.
    """

    def __init__(self, report, pools, formats, budget, rng):
        self.report = report
        self.pools = pools  # sort char -> (items, covers_whole_carrier)
        self.formats = formats  # sort char -> item formatter
        self.budget = budget
        self.rng = rng

    def check(self, name: str, sorts: str, fn: Callable) -> None:
        items = [self.pools[c][0] for c in sorts]
        covered = all(self.pools[c][1] for c in sorts)
        total = 1
        for pool in items:
            total *= len(pool)
        if total <= self.budget:
            tuples = iter_product(*items)
            exhaustive = covered
        else:
            tuples = (
                tuple(pool[self.rng.randrange(len(pool))] for pool in items)
                for _ in range(self.budget)
            )
            exhaustive = False
        checked = 0
        witness = None
        for args in tuples:
            checked += 1
            extra = fn(*args)
            if extra is not None:
                named = {}
                counters: dict[str, int] = {}
                for sort, value in zip(sorts, args):
                    idx = counters.get(sort, 0)
                    counters[sort] = idx + 1
                    label = _ARG_NAMES[sort][idx % 4]
                    named[label] = self.formats[sort](value)
                witness = {"arguments": named, **extra}
                break
        self.report.checks.append(AxiomCheck(name, checked, exhaustive, witness))


def _element_pool(ring, cap, rng, extras=()):
    if ring.size is not None and ring.size <= cap:
        return list(ring.elements()), True
    out, seen = [], set()
    for e in list(extras) + [ring.sample(rng) for _ in range(cap)]:
        if e.payload not in seen:
            seen.add(e.payload)
            out.append(e)
    return out, False


def _pool_cap(budget: int) -> int:
    return max(4, int(round(budget ** (1.0 / 3.0))))


# ---------------------------------------------------------------------------
# BBRing: one ring, one form group
# ---------------------------------------------------------------------------


class BBRing:
    """An alternative unital ring with anti-automorphism plus a form group.

    Concrete subclasses set `ring`, the unit `lambda_element`, and the
    form-group operations.  Delta payloads are opaque exact data; the
    printable form keeps the non-commutative sum explicit.
    """

    name = "bb"
    associative = True
    ring: Ring

    def __init__(self):
        self._herm_set: set | None = None
        self._phi_set: set | None = None

    # -- ring side ----------------------------------------------------------

    @property
    def lambda_element(self) -> AlgebraElement:
        return self._lam

    def star(self, x: AlgebraElement) -> AlgebraElement:
        return x.star()

    # -- form group ---------------------------------------------------------

    def delta_zero(self):
        raise NotImplementedError

    def delta_add(self, u, v):
        raise NotImplementedError

    def delta_neg(self, u):
        raise NotImplementedError

    def delta_sub(self, u, v):
        return self.delta_add(u, self.delta_neg(v))

    def delta_equal(self, u, v) -> bool:
        return u == v

    def delta_power(self, u, k: int):
        out = self.delta_zero()
        step = u if k >= 0 else self.delta_neg(u)
        for _ in range(abs(k)):
            out = self.delta_add(out, step)
        return out

    @property
    def iota(self):
        raise NotImplementedError

    def phi(self, x: AlgebraElement):
        raise NotImplementedError

    def pair(self, u, v) -> AlgebraElement:
        raise NotImplementedError

    def rho(self, u) -> AlgebraElement:
        raise NotImplementedError

    def act(self, u, x: AlgebraElement):
        raise NotImplementedError

    def delta_elements(self) -> list | None:
        return None

    def delta_sample(self, rng: random.Random):
        raise NotImplementedError

    def delta_format(self, u) -> str:
        return repr(u)

    # -- quotient normalisation hooks (used by the series truncation) -------

    def _hermitian_subgroup(self) -> set:
        if self._herm_set is None:
            if self.ring.size is None or self.ring.size > _SUBGROUP_CAP:
                raise NotImplementedError(
                    f"{self.name}: cannot enumerate the lambda-hermitian subgroup"
                )
            lam = self.lambda_element
            self._herm_set = {
                (y + self.star(y) * lam).payload for y in self.ring.elements()
            }
        return self._herm_set

    def normalize_mod_hermitian(self, x: AlgebraElement) -> AlgebraElement:
        """Canonical representative of x modulo the subgroup {y + y* lambda}."""
        sub = self._hermitian_subgroup()
        best = min(self.ring._add(x.payload, s) for s in sub)
        return AlgebraElement(self.ring, best)

    def _phi_image_subgroup(self) -> set:
        if self._phi_set is None:
            if self.ring.size is None or self.ring.size > _SUBGROUP_CAP:
                raise NotImplementedError(
                    f"{self.name}: cannot enumerate the image of phi"
                )
            self._phi_set = {self.phi(y) for y in self.ring.elements()}
        return self._phi_set

    def normalize_mod_phi(self, u):
        """Canonical representative of u modulo the image of phi."""
        return min(self.delta_add(u, p) for p in self._phi_image_subgroup())

    def __repr__(self) -> str:
        return f"<bb-ring {self.name}>"


class _FieldDeltaBB(BBRing):
    """Shared plumbing for structures whose Delta is a base commutative ring."""

    def __init__(self, scalars: Ring):
        super().__init__()
        self.scalars = scalars

    def delta_zero(self):
        return self.scalars._zero()

    def delta_add(self, u, v):
        return self.scalars._add(u, v)

    def delta_neg(self, u):
        return self.scalars._neg(u)

    @property
    def iota(self):
        return self.scalars._one()

    def delta_elements(self):
        if self.scalars.size is None:
            return None
        return [e.payload for e in self.scalars.elements()]

    def delta_sample(self, rng):
        return self.scalars.sample(rng).payload

    def delta_format(self, u):
        return self.scalars._format(u)


class _OrthogonalBB(_FieldDeltaBB):
    """lambda = 1, phi = 0, <u,v> = -2uv, rho(u) = u^2, u.x = ux."""

    def __init__(self, field: Ring):
        super().__init__(field)
        self.ring = field
        self.name = f"orthogonal({field.kind})"
        self._lam = field.one

    def phi(self, x):
        return self.scalars._zero()

    def pair(self, u, v):
        return self.ring.from_int(-2) * self.ring.element(u) * self.ring.element(v)

    def rho(self, u):
        e = self.ring.element(u)
        return e * e

    def act(self, u, x):
        return (self.ring.element(u) * x).payload


class _SymplecticBB(_FieldDeltaBB):
    """lambda = -1, phi(x) = 2x, <u,v> = 0, rho(u) = u, u.x = ux^2."""

    def __init__(self, field: Ring):
        super().__init__(field)
        self.ring = field
        self.name = f"symplectic({field.kind})"
        self._lam = field.from_int(-1)

    def phi(self, x):
        return (x + x).payload

    def pair(self, u, v):
        return self.ring.zero

    def rho(self, u):
        return self.ring.element(u)

    def act(self, u, x):
        return (self.ring.element(u) * (x * x)).payload


class _OctonionBB(_FieldDeltaBB):
    """R = split octonions, Delta = the scalar field embedded by rho.

    lambda = -1, phi(x) = x + x* (a scalar), the pairing vanishes, and
    u.x = u n(x) for the multiplicative norm n.
    """

    def __init__(self, field: Ring):
        super().__init__(field)
        self.field = field
        self.ring = zorn(field)
        self.name = f"octonion({field.kind})"
        self.associative = False
        self._lam = self.ring.from_int(-1)

    def phi(self, x):
        return (x + x.star()).payload[0]

    def pair(self, u, v):
        return self.ring.zero

    def rho(self, u):
        z = self.field._zero()
        return self.ring.element((u, (z, z, z), (z, z, z), u))

    def act(self, u, x):
        return (self.field.element(u) * self.ring.scalar_norm(x)).payload


class _FreeBB(BBRing):
    """The initial structure with no generators.

    R is the ring of exact Laurent polynomials Z[l^(+-1)] whose star
    inverts the variable, so lambda is the variable itself.  A Delta
    payload is a pair (phi_part, powers): phi_part is a Laurent payload
    supported on exponents <= 0, and powers is an ascending tuple of
    (exponent, multiplicity) pairs recording a product of generators
    iota*l^m.  The group law follows mechanically from the commutation
    defect u + v = v + u - phi<u, v>, whose corrections are central.
    """

    def __init__(self):
        super().__init__()
        self.ring = polynomial_ring(integers(), "l")
        self.name = "free-bb"
        self._lam = self.ring.variable_power(1)

    # -- payload helpers ------------------------------------------------

    def _phi_payload(self, x: AlgebraElement):
        """phi of a ring element: fold every exponent >= 1 down via
        phi(l^j) = -phi(l^(1-j))."""
        acc: dict[int, int] = {}
        for e, c in x.payload:
            if e >= 1:
                acc[1 - e] = acc.get(1 - e, 0) - c
            else:
                acc[e] = acc.get(e, 0) + c
        return tuple(sorted((e, c) for e, c in acc.items() if c != 0))

    def _merge_phi(self, *parts):
        acc: dict[int, int] = {}
        for part in parts:
            for e, c in part:
                acc[e] = acc.get(e, 0) + c
        return tuple(sorted((e, c) for e, c in acc.items() if c != 0))

    def _merge_powers(self, s, t):
        acc: dict[int, int] = {}
        for m, k in s:
            acc[m] = acc.get(m, 0) + k
        for m, k in t:
            acc[m] = acc.get(m, 0) + k
        return tuple(sorted((m, k) for m, k in acc.items() if k != 0))

    def _pair_gen(self, a: int, b: int) -> AlgebraElement:
        """<iota*l^a, iota*l^b> = l^(b-a) (-1 - l)."""
        vp = self.ring.variable_power
        return -vp(b - a) - vp(b - a + 1)

    def _swap_correction(self, s, t) -> AlgebraElement:
        """Sum over a > b of s_a t_b <iota*l^a, iota*l^b>."""
        total = self.ring.zero
        for a, sa in s:
            for b, tb in t:
                if a > b:
                    total = total + (sa * tb) * self._pair_gen(a, b)
        return total

    # -- group law --------------------------------------------------------

    def delta_zero(self):
        return ((), ())

    def delta_add(self, u, v):
        (p, s), (q, t) = u, v
        corr = self._phi_payload(-self._swap_correction(s, t))
        return (self._merge_phi(p, q, corr), self._merge_powers(s, t))

    def delta_neg(self, u):
        p, s = u
        c = self._phi_payload(self._swap_correction(s, s))
        neg_p = tuple((e, -k) for e, k in self._merge_phi(p, c))
        return (neg_p, tuple((m, -k) for m, k in s))

    @property
    def iota(self):
        return ((), ((0, 1),))

    # -- form maps ---------------------------------------------------------

    def phi(self, x):
        return (self._phi_payload(x), ())

    def pair(self, u, v):
        total = self.ring.zero
        for a, sa in u[1]:
            for b, tb in v[1]:
                total = total + (sa * tb) * self._pair_gen(a, b)
        return total

    def rho(self, u):
        p, s = u
        pe = self.ring.element(p)
        out = pe - pe.star() * self._lam
        one_plus_lam = self.ring.one + self._lam
        for m, k in s:
            out = out + self.ring.from_int(k) + (k * (k - 1) // 2) * one_plus_lam
        blocks = list(s)
        for i in range(len(blocks)):
            for j in range(i + 1, len(blocks)):
                a, ka = blocks[i]
                b, kb = blocks[j]
                out = out - (ka * kb) * self._pair_gen(a, b)
        return out

    def _act_generator(self, m: int, x: AlgebraElement):
        """(iota*l^m).x by folding the monomials of x left to right with
        u.(y + z) = u.y + phi(z* rho(u) y) + u.z and rho(iota*l^m) = 1."""
        terms = list(x.payload)
        out = self.delta_zero()
        for i, (e, c) in enumerate(terms):
            corr = c * (c - 1) // 2
            php = self._phi_payload(self.ring.from_int(corr)) if corr else ()
            out = self.delta_add(out, (php, ((m + e, c),)))
            rest = tuple(terms[i + 1 :])
            if rest:
                mono = self.ring.element(((e, c),))
                out = self.delta_add(
                    out, self.phi(self.ring.element(rest).star() * mono)
                )
        return out

    def act(self, u, x):
        p, s = u
        pe = self.ring.element(p)
        out = (self._phi_payload((x.star() * pe) * x), ())
        for m, k in s:
            out = self.delta_add(out, self.delta_power(self._act_generator(m, x), k))
        return out

    # -- enumeration and printing ------------------------------------------

    def delta_sample(self, rng):
        php: dict[int, int] = {}
        for _ in range(rng.randrange(3)):
            php[rng.randint(-2, 0)] = rng.randint(-2, 2)
        powers: dict[int, int] = {}
        for _ in range(rng.randrange(3)):
            powers[rng.randint(-2, 2)] = rng.randint(-2, 2)
        return (
            tuple(sorted((e, c) for e, c in php.items() if c != 0)),
            tuple(sorted((m, k) for m, k in powers.items() if k != 0)),
        )

    def delta_format(self, u):
        p, s = u
        bits = []
        if p:
            bits.append(f"phi({self.ring._format(p)})")
        bits.extend(f"(iota*l^{m})^{k}" for m, k in s)
        return " + ".join(bits) if bits else "0."

    def normalize_mod_hermitian(self, x):
        return self.ring.element(self._phi_payload(x))

    def normalize_mod_phi(self, u):
        return ((), u[1])


def bb_orthogonal(field: Ring) -> BBRing:
    """The form ring of odd orthogonal groups over a commutative ring."""
    return _OrthogonalBB(field)


def bb_symplectic(field: Ring) -> BBRing:
    """The form ring of symplectic groups over a commutative ring."""
    return _SymplecticBB(field)


def bb_octonion(field: Ring) -> BBRing:
    """The split-octonion form ring with scalar Delta."""
    return _OctonionBB(field)


def bb_free() -> BBRing:
    """The initial structure on no generators, with exact Laurent carrier."""
    return _FreeBB()


# ---------------------------------------------------------------------------
# The BB axiom suite
# ---------------------------------------------------------------------------


def check_bb_axioms(ring: BBRing, budget: int = 10000, seed: int = 0) -> AxiomReport:
    """Run every named law of a BBRing over exhausted or sampled tuples."""
    bb = ring
    rng = random.Random(seed)
    cap = _pool_cap(budget)
    lam = bb.lambda_element
    lam_star = bb.star(lam)
    one = bb.ring.one
    rpool = _element_pool(bb.ring, cap, rng, extras=[bb.ring.zero, one, lam, lam_star])
    delta_all = bb.delta_elements()
    if delta_all is not None and len(delta_all) <= cap:
        dpool = (list(delta_all), True)
    else:
        extras = [bb.delta_zero(), bb.iota, bb.phi(one)]
        out, seen = [], set()
        for u in extras + [bb.delta_sample(rng) for _ in range(cap)]:
            if u not in seen:
                seen.add(u)
                out.append(u)
        dpool = (out, False)

    report = AxiomReport("bb", bb.name, budget, seed)
    run = _Runner(
        report,
        pools={"r": rpool, "d": dpool},
        formats={"r": repr, "d": bb.delta_format},
        budget=budget,
        rng=rng,
    )
    fmt_d = bb.delta_format

    def ne(a: AlgebraElement, b: AlgebraElement):
        if a == b:
            return None
        return {"lhs": repr(a), "rhs": repr(b)}

    def dne(a, b):
        if bb.delta_equal(a, b):
            return None
        return {"lhs": fmt_d(a), "rhs": fmt_d(b)}

    zero = bb.ring.zero

    run.check(
        "lambda is invertible with inverse lambda star",
        "",
        lambda: ne(lam * lam_star, one) or ne(lam_star * lam, one),
    )
    run.check("star is additive", "rr", lambda x, y: ne((x + y).star(), x.star() + y.star()))
    run.check(
        "star reverses multiplication",
        "rr",
        lambda x, y: ne((x * y).star(), y.star() * x.star()),
    )
    run.check(
        "double star is conjugation by lambda",
        "r",
        lambda x: ne(x.star().star(), lam * x * lam_star),
    )
    run.check(
        "lambda is nuclear",
        "rr",
        lambda x, y: ne(associator(lam, x, y), zero)
        or ne(associator(x, lam, y), zero)
        or ne(associator(x, y, lam), zero),
    )
    run.check(
        "ring is alternative",
        "rr",
        lambda x, y: ne(associator(x, x, y), zero) or ne(associator(y, x, x), zero),
    )
    run.check(
        "starred element associates with itself",
        "rr",
        lambda x, y: ne(associator(x.star(), x, y), zero),
    )
    run.check(
        "associator of a starred argument",
        "rrr",
        lambda x, y, z: ne(associator(x.star(), y, z), -associator(x, y, z)),
    )
    run.check(
        "associator star twist",
        "rrr",
        lambda x, y, z: ne(associator(x, y, z).star(), -associator(x, y, z)),
    )

    def lambda_scalar_law(x, y, z):
        a = associator(x, y, z)
        for zeta in (lam, lam_star):
            for moved in (
                associator(zeta * x, y, z),
                associator(x * zeta, y, z),
                associator(x, zeta * y, z),
                associator(x, y, z * zeta),
                zeta * a,
                a * zeta,
            ):
                bad = ne(moved, -a)
                if bad is not None:
                    return bad
        return None

    run.check("lambda scalars negate associators", "rrr", lambda_scalar_law)
    run.check(
        "one plus lambda kills associators",
        "rrr",
        lambda x, y, z: ne((one + lam) * associator(x, y, z), zero),
    )

    dz = bb.delta_zero()
    run.check(
        "delta addition is associative",
        "ddd",
        lambda u, v, w: dne(
            bb.delta_add(bb.delta_add(u, v), w), bb.delta_add(u, bb.delta_add(v, w))
        ),
    )
    run.check(
        "delta negation inverts",
        "d",
        lambda u: dne(bb.delta_add(u, bb.delta_neg(u)), dz)
        or dne(bb.delta_add(bb.delta_neg(u), u), dz),
    )
    run.check(
        "phi is additive",
        "rr",
        lambda x, y: dne(bb.phi(x + y), bb.delta_add(bb.phi(x), bb.phi(y))),
    )
    run.check(
        "phi image is central in delta",
        "rd",
        lambda x, u: dne(bb.delta_add(bb.phi(x), u), bb.delta_add(u, bb.phi(x))),
    )
    run.check(
        "phi kills x plus x-star lambda",
        "r",
        lambda x: dne(bb.phi(x + x.star() * lam), dz),
    )
    run.check(
        "pairing is biadditive",
        "ddd",
        lambda u, v, w: ne(bb.pair(bb.delta_add(u, v), w), bb.pair(u, w) + bb.pair(v, w))
        or ne(bb.pair(w, bb.delta_add(u, v)), bb.pair(w, u) + bb.pair(w, v)),
    )
    run.check(
        "pairing flips through star lambda",
        "dd",
        lambda u, v: ne(bb.pair(v, u), bb.pair(u, v).star() * lam),
    )
    run.check(
        "pairing lands in the nucleus",
        "ddrr",
        lambda u, v, x, y: (
            lambda c: ne(associator(c, x, y), zero)
            or ne(associator(x, c, y), zero)
            or ne(associator(x, y, c), zero)
        )(bb.pair(u, v)),
    )
    run.check(
        "rho lands in the nucleus",
        "drr",
        lambda u, x, y: (
            lambda c: ne(associator(c, x, y), zero)
            or ne(associator(x, c, y), zero)
            or ne(associator(x, y, c), zero)
        )(bb.rho(u)),
    )
    run.check(
        "rho of a sum",
        "dd",
        lambda u, v: ne(bb.rho(bb.delta_add(u, v)), bb.rho(u) - bb.pair(u, v) + bb.rho(v)),
    )
    run.check(
        "rho hermitian defect",
        "d",
        lambda u: ne(bb.rho(u) + bb.pair(u, u) + bb.rho(u).star() * lam, zero),
    )
    run.check("rho at iota", "", lambda: ne(bb.rho(bb.iota), one))
    run.check(
        "rho of a negation",
        "d",
        lambda u: ne(bb.rho(bb.delta_neg(u)), bb.rho(u).star() * lam),
    )
    run.check(
        "iota against itself", "", lambda: ne(bb.pair(bb.iota, bb.iota), -one - lam)
    )
    run.check(
        "action distributes over form sums",
        "ddr",
        lambda u, v, x: dne(
            bb.act(bb.delta_add(u, v), x), bb.delta_add(bb.act(u, x), bb.act(v, x))
        ),
    )
    run.check(
        "action on a ring sum",
        "drr",
        lambda u, x, y: dne(
            bb.act(u, x + y),
            bb.delta_add(
                bb.delta_add(bb.act(u, x), bb.phi(y.star() * (bb.rho(u) * x))),
                bb.act(u, y),
            ),
        ),
    )
    run.check(
        "form commutation defect",
        "dd",
        lambda u, v: dne(
            bb.delta_add(u, v),
            bb.delta_sub(bb.delta_add(v, u), bb.phi(bb.pair(u, v))),
        ),
    )
    run.check("action by the unit", "d", lambda u: dne(bb.act(u, one), u))
    run.check(
        "phi ignores association",
        "rrr",
        lambda x, y, z: dne(bb.phi((x * y) * z), bb.phi(x * (y * z))),
    )
    run.check(
        "action is multiplicative",
        "drr",
        lambda u, x, y: dne(bb.act(bb.act(u, x), y), bb.act(u, x * y)),
    )
    run.check(
        "pairing kills phi",
        "dr",
        lambda u, x: ne(bb.pair(u, bb.phi(x)), zero) or ne(bb.pair(bb.phi(x), u), zero),
    )
    run.check(
        "action ignores association",
        "drrr",
        lambda u, x, y, z: dne(bb.act(u, (x * y) * z), bb.act(u, x * (y * z))),
    )
    run.check(
        "rho of phi",
        "r",
        lambda x: ne(bb.rho(bb.phi(x)), x - x.star() * lam),
    )
    run.check(
        "pairing moves through the action",
        "ddr",
        lambda u, v, x: ne(bb.pair(u, bb.act(v, x)), bb.pair(u, v) * x),
    )
    run.check(
        "rho sandwich from the right",
        "drr",
        lambda u, x, y: ne(
            x * ((y.star() * bb.rho(u)) * y), ((x * y.star()) * bb.rho(u)) * y
        ),
    )
    run.check(
        "pairing twists by the action on the left",
        "ddr",
        lambda u, v, x: ne(bb.pair(bb.act(u, x), v), x.star() * bb.pair(u, v)),
    )
    run.check(
        "rho sandwich from the left",
        "drr",
        lambda u, x, y: ne(
            ((x.star() * bb.rho(u)) * x) * y, (x.star() * bb.rho(u)) * (x * y)
        ),
    )
    run.check(
        "phi conjugation action",
        "rr",
        lambda x, y: dne(bb.act(bb.phi(x), y), bb.phi((y.star() * x) * y)),
    )
    run.check(
        "rho respects the action",
        "dr",
        lambda u, x: ne(bb.rho(bb.act(u, x)), x.star() * (bb.rho(u) * x)),
    )
    if bb.associative:
        run.check(
            "multiplication is associative",
            "rrr",
            lambda x, y, z: ne((x * y) * z, x * (y * z)),
        )
    return report


# ---------------------------------------------------------------------------
# BARing: the sign-indexed twisted view
# ---------------------------------------------------------------------------


class BARing:
    """Four carriers R_pq (p, q in {+1, -1}) and two form groups.

    This view is produced from a BBRing by twisting with powers of
    lambda; all four carriers coincide with the source ring and both
    form groups coincide with the source Delta, but the involution,
    units, phi, circle pairing, rho-hat, and action carry sign-dependent
    lambda factors.
    """

    def __init__(self, bb: BBRing, rank: int):
        if rank < 3:
            raise ValueError("the sign-indexed view needs rank at least 3")
        if rank >= 4 and not bb.associative:
            raise ValueError(
                "rank >= 4 requires an associative ring; "
                f"{bb.name} is not associative"
            )
        self.bb = bb
        self.rank = rank
        self.ring = bb.ring
        self.associative = rank >= 4
        self.name = f"ba({bb.name}, rank={rank})"
        lam = bb.lambda_element
        self._lampow = {-1: bb.star(lam), 0: bb.ring.one, 1: lam}

    def bar(self, p: int, q: int, x: AlgebraElement) -> AlgebraElement:
        """The involution R_pq -> R_{-q,-p}."""
        return self._lampow[(q - 1) // 2] * x.star() * self._lampow[(1 - p) // 2]

    def unit(self, p: int) -> AlgebraElement:
        return self.ring.one

    def phi(self, p: int, x: AlgebraElement):
        return self.bb.phi(self._lampow[(1 - p) // 2] * x)

    def circ(self, p: int, q: int, u, v) -> AlgebraElement:
        return self._lampow[(p - 1) // 2] * self.bb.pair(u, v)

    def rhohat(self, p: int, u) -> AlgebraElement:
        return self._lampow[(p - 1) // 2] * self.bb.rho(u)

    def act(self, u, x: AlgebraElement):
        return self.bb.act(u, x)

    def __repr__(self) -> str:
        return f"<ba-ring {self.name}>"


def ba_from_bb(bb: BBRing, rank: int) -> BARing:
    """The sign-indexed view of a BBRing for the given rank."""
    return BARing(bb, rank)


_SIGNS = (1, -1)


def check_ba_axioms(ring: BARing, budget: int = 10000, seed: int = 0) -> AxiomReport:
    """Run the sign-quantified axiom list of a BARing."""
    ba = ring
    bb = ba.bb
    rng = random.Random(seed)
    cap = _pool_cap(budget)
    lam = bb.lambda_element
    rpool = _element_pool(
        ba.ring, cap, rng, extras=[ba.ring.zero, ba.ring.one, lam, bb.star(lam)]
    )
    delta_all = bb.delta_elements()
    if delta_all is not None and len(delta_all) <= cap:
        dpool = (list(delta_all), True)
    else:
        out, seen = [], set()
        for u in [bb.delta_zero(), bb.iota] + [bb.delta_sample(rng) for _ in range(cap)]:
            if u not in seen:
                seen.add(u)
                out.append(u)
        dpool = (out, False)

    report = AxiomReport("ba", ba.name, budget, seed)
    run = _Runner(
        report,
        pools={"r": rpool, "d": dpool},
        formats={"r": repr, "d": bb.delta_format},
        budget=budget,
        rng=rng,
    )
    fmt_d = bb.delta_format
    zero = ba.ring.zero
    dz = bb.delta_zero()

    def signed(patterns, body):
        """Check `body` under every sign pattern; witnesses carry the signs."""

        def fn(*args):
            for pattern in patterns:
                failure = body(pattern, *args)
                if failure is not None:
                    failure["signs"] = str(pattern)
                    return failure
            return None

        return fn

    def ne(a, b):
        if a == b:
            return None
        return {"lhs": repr(a), "rhs": repr(b)}

    def dne(a, b):
        if bb.delta_equal(a, b):
            return None
        return {"lhs": fmt_d(a), "rhs": fmt_d(b)}

    s2 = list(iter_product(_SIGNS, repeat=2))
    s3 = list(iter_product(_SIGNS, repeat=3))
    s1 = [(p,) for p in _SIGNS]

    run.check(
        "involution is involutive",
        "r",
        signed(s2, lambda pq, x: ne(ba.bar(-pq[1], -pq[0], ba.bar(*pq, x)), x)),
    )
    run.check(
        "involution is additive",
        "rr",
        signed(
            s2,
            lambda pq, x, y: ne(ba.bar(*pq, x + y), ba.bar(*pq, x) + ba.bar(*pq, y)),
        ),
    )
    run.check(
        "involution reverses products",
        "rr",
        signed(
            s3,
            lambda ijk, x, y: ne(
                ba.bar(ijk[0], ijk[2], x * y),
                ba.bar(ijk[1], ijk[2], y) * ba.bar(ijk[0], ijk[1], x),
            ),
        ),
    )
    run.check(
        "units are two-sided",
        "r",
        signed(
            s2,
            lambda pq, x: ne(ba.unit(pq[0]) * x, x) or ne(x * ba.unit(pq[1]), x),
        ),
    )
    run.check(
        "units conjugate to opposite units",
        "",
        signed(
            s1, lambda p: ne(ba.bar(p[0], p[0], ba.unit(p[0])), ba.unit(-p[0]))
        ),
    )
    run.check(
        "phi is additive with central image",
        "rrd",
        signed(
            s1,
            lambda p, x, y, u: dne(
                ba.phi(p[0], x + y), bb.delta_add(ba.phi(p[0], x), ba.phi(p[0], y))
            )
            or dne(
                bb.delta_add(ba.phi(p[0], x), u), bb.delta_add(u, ba.phi(p[0], x))
            ),
        ),
    )
    run.check(
        "phi kills symmetrised elements",
        "r",
        signed(
            s1, lambda p, x: dne(ba.phi(p[0], x + ba.bar(-p[0], p[0], x)), dz)
        ),
    )
    run.check(
        "circle pairing is biadditive",
        "ddd",
        signed(
            s2,
            lambda pq, u, v, w: ne(
                ba.circ(*pq, bb.delta_add(u, v), w),
                ba.circ(*pq, u, w) + ba.circ(*pq, v, w),
            )
            or ne(
                ba.circ(*pq, w, bb.delta_add(u, v)),
                ba.circ(*pq, w, u) + ba.circ(*pq, w, v),
            ),
        ),
    )
    run.check(
        "circle pairing flips under the involution",
        "dd",
        signed(
            s2,
            lambda pq, u, v: ne(
                ba.bar(-pq[0], pq[1], ba.circ(*pq, u, v)), ba.circ(pq[1], pq[0], v, u)
            ),
        ),
    )
    run.check(
        "rhohat of a sum",
        "dd",
        signed(
            s1,
            lambda p, u, v: ne(
                ba.rhohat(p[0], bb.delta_add(u, v)),
                ba.rhohat(p[0], u) - ba.circ(p[0], p[0], u, v) + ba.rhohat(p[0], v),
            ),
        ),
    )
    run.check(
        "rhohat hermitian defect",
        "d",
        signed(
            s1,
            lambda p, u: ne(
                ba.rhohat(p[0], u)
                + ba.circ(p[0], p[0], u, u)
                + ba.bar(-p[0], p[0], ba.rhohat(p[0], u)),
                zero,
            ),
        ),
    )
    run.check(
        "action distributes over form sums",
        "ddr",
        lambda u, v, x: dne(
            ba.act(bb.delta_add(u, v), x), bb.delta_add(ba.act(u, x), ba.act(v, x))
        ),
    )
    run.check(
        "action on a ring sum",
        "drr",
        signed(
            s2,
            lambda pq, u, x, y: dne(
                ba.act(u, x + y),
                bb.delta_add(
                    bb.delta_add(
                        ba.act(u, x),
                        ba.phi(
                            pq[1],
                            ba.bar(*pq, y) * (ba.rhohat(pq[0], u) * x),
                        ),
                    ),
                    ba.act(u, y),
                ),
            ),
        ),
    )
    run.check(
        "form commutation defect",
        "dd",
        signed(
            s1,
            lambda p, u, v: dne(
                bb.delta_add(u, v),
                bb.delta_sub(
                    bb.delta_add(v, u), ba.phi(p[0], ba.circ(p[0], p[0], u, v))
                ),
            ),
        ),
    )
    run.check(
        "phi twists along the action",
        "rrr",
        signed(
            s3,
            lambda pqk, x, y, z: dne(
                ba.act(ba.phi(pqk[0], x * y), z),
                ba.phi(
                    pqk[2],
                    (ba.bar(pqk[0], pqk[2], z) * x) * (y * z),
                ),
            ),
        ),
    )
    run.check(
        "phi ignores association",
        "rrr",
        signed(
            s1, lambda p, x, y, z: dne(ba.phi(p[0], (x * y) * z), ba.phi(p[0], x * (y * z)))
        ),
    )
    run.check(
        "rhohat action expansion",
        "drr",
        signed(
            s2,
            lambda pq, u, x, y: ne(
                ba.rhohat(pq[1], ba.act(u, x)) * y,
                (ba.bar(*pq, x) * ba.rhohat(pq[0], u)) * (x * y),
            ),
        ),
    )
    run.check(
        "circle pairing kills phi",
        "dr",
        signed(
            s2,
            lambda pq, u, x: ne(
                ba.circ(pq[0], pq[1], u, ba.phi(pq[1], x)), zero
            )
            or ne(ba.circ(pq[1], pq[0], ba.phi(pq[1], x), u), zero),
        ),
    )
    run.check(
        "circle pairing slides along the action",
        "ddr",
        signed(
            s3,
            lambda pqk, u, v, x: ne(
                ba.circ(pqk[0], pqk[2], u, ba.act(v, x)),
                ba.circ(pqk[0], pqk[1], u, v) * x,
            ),
        ),
    )
    run.check(
        "rhohat of a phi value",
        "rrr",
        signed(
            s2,
            lambda pq, x, y, z: ne(
                ba.rhohat(pq[0], ba.phi(pq[0], x * y)) * z,
                x * (y * z)
                - ba.bar(pq[1], pq[0], y) * (ba.bar(-pq[0], pq[1], x) * z),
            ),
        ),
    )
    run.check(
        "action is multiplicative",
        "drr",
        lambda u, x, y: dne(ba.act(ba.act(u, x), y), ba.act(u, x * y)),
    )
    run.check(
        "rhohat values slide in products",
        "drr",
        signed(
            s1,
            lambda p, u, x, y: ne(
                (ba.rhohat(p[0], u) * x) * y, ba.rhohat(p[0], u) * (x * y)
            ),
        ),
    )
    run.check(
        "action fixes units",
        "d",
        signed(s1, lambda p, u: dne(ba.act(u, ba.unit(p[0])), u)),
    )
    run.check(
        "action conjugation consequence",
        "drr",
        signed(
            s2,
            lambda pq, u, x, y: ne(
                ba.rhohat(pq[1], ba.act(u, x)) * y,
                ba.bar(*pq, x) * (ba.rhohat(pq[0], u) * (x * y)),
            ),
        ),
    )
    if ba.associative:
        run.check(
            "multiplication is associative",
            "rrr",
            lambda x, y, z: ne((x * y) * z, x * (y * z)),
        )
    return report


# ---------------------------------------------------------------------------
# F4Ring: two rings exchanging phi and rho
# ---------------------------------------------------------------------------


class F4Ring:
    """A pair of alternative unital rings R, S with proper involutions,
    central-valued trace maps phi in both directions, and multiplicative
    norm-like maps rho in both directions."""

    name = "f4"
    associative_r = True
    associative_s = True
    ring_r: Ring
    ring_s: Ring

    def __init__(self):
        self._kernel_sets: dict[str, set] = {}
        self._phi_sets: dict[str, set] = {}

    def star_r(self, x: AlgebraElement) -> AlgebraElement:
        return x.star()

    def star_s(self, u: AlgebraElement) -> AlgebraElement:
        return u.star()

    def phi_rs(self, x: AlgebraElement) -> AlgebraElement:
        raise NotImplementedError

    def phi_sr(self, u: AlgebraElement) -> AlgebraElement:
        raise NotImplementedError

    def rho_rs(self, x: AlgebraElement) -> AlgebraElement:
        raise NotImplementedError

    def rho_sr(self, u: AlgebraElement) -> AlgebraElement:
        raise NotImplementedError

    @property
    def lambda_r(self) -> AlgebraElement:
        return self.rho_sr(self.ring_s.from_int(-1))

    @property
    def lambda_s(self) -> AlgebraElement:
        return self.rho_rs(self.ring_r.from_int(-1))

    # -- quotient normalisation hooks (used by the series truncation) -------

    def _kernel_subgroup(self, side: str) -> set:
        """The subgroup {y - y*} + {y + lambda y} of the named ring."""
        cached = self._kernel_sets.get(side)
        if cached is None:
            ring = self.ring_r if side == "r" else self.ring_s
            star = self.star_r if side == "r" else self.star_s
            lam = self.lambda_r if side == "r" else self.lambda_s
            if ring.size is None or ring.size > 4096:
                raise NotImplementedError(
                    f"{self.name}: cannot enumerate the phi-kernel subgroup"
                )
            skews = {(y - star(y)).payload for y in ring.elements()}
            traces = {(y + lam * y).payload for y in ring.elements()}
            cached = {ring._add(p, q) for p in skews for q in traces}
            self._kernel_sets[side] = cached
        return cached

    def _phi_image(self, side: str) -> set:
        """The image of phi inside the named ring."""
        cached = self._phi_sets.get(side)
        if cached is None:
            source = self.ring_s if side == "r" else self.ring_r
            phi = self.phi_sr if side == "r" else self.phi_rs
            if source.size is None or source.size > 4096:
                raise NotImplementedError(
                    f"{self.name}: cannot enumerate the image of phi"
                )
            cached = {phi(y).payload for y in source.elements()}
            self._phi_sets[side] = cached
        return cached

    def normalize_r_mod_kernel(self, x: AlgebraElement) -> AlgebraElement:
        sub = self._kernel_subgroup("r")
        return AlgebraElement(self.ring_r, min(self.ring_r._add(x.payload, s) for s in sub))

    def normalize_s_mod_kernel(self, u: AlgebraElement) -> AlgebraElement:
        sub = self._kernel_subgroup("s")
        return AlgebraElement(self.ring_s, min(self.ring_s._add(u.payload, s) for s in sub))

    def normalize_s_mod_phi(self, u: AlgebraElement) -> AlgebraElement:
        sub = self._phi_image("s")
        return AlgebraElement(self.ring_s, min(self.ring_s._add(u.payload, s) for s in sub))

    def normalize_r_mod_phi(self, x: AlgebraElement) -> AlgebraElement:
        sub = self._phi_image("r")
        return AlgebraElement(self.ring_r, min(self.ring_r._add(x.payload, s) for s in sub))

    def __repr__(self) -> str:
        return f"<f4-ring {self.name}>"


class _ZLambda(Ring):
    """The group ring of a two-element group over the integers.

    Payloads are pairs (a, b) standing for a + b*l with l*l = 1 and the
    trivial involution; the units are exactly 1, -1, l, -l, each its own
    inverse.
    """

    kind = "z-lambda"

    def sample(self, rng: random.Random) -> AlgebraElement:
        return AlgebraElement(self, (rng.randint(-4, 4), rng.randint(-4, 4)))

    def _zero(self):
        return (0, 0)

    def _one(self):
        return (1, 0)

    def _add(self, p, q):
        return (p[0] + q[0], p[1] + q[1])

    def _neg(self, p):
        return (-p[0], -p[1])

    def _mul(self, p, q):
        a, b = p
        c, d = q
        return (a * c + b * d, a * d + b * c)

    def _invert(self, p):
        a, b = p
        if abs(a + b) == 1 and abs(a - b) == 1:
            return p
        return NotInvertible(f"{self._format(p)} is not a unit", witness=p)

    def _format(self, p):
        a, b = p
        if b == 0:
            return str(a)
        if a == 0:
            return f"{b}*l"
        return f"{a}{b:+d}*l"


_THE_Z_LAMBDA = _ZLambda()


class _ChevalleyF4(F4Ring):
    """Both sides one commutative ring with trivial involution; phi and
    rho are trivial in one direction and doubling/squaring in the other."""

    def __init__(self, field: Ring):
        super().__init__()
        self.ring_r = self.ring_s = field
        self.name = f"f4-chevalley({field.kind})"

    def phi_rs(self, x):
        return self.ring_s.zero

    def rho_rs(self, x):
        return x

    def phi_sr(self, u):
        return u + u

    def rho_sr(self, u):
        return u * u


class _OctonionF4(F4Ring):
    """R a commutative ring, S its split octonions; phi one way is zero
    and the other way is the trace, rho is the scalar embedding and the
    norm."""

    def __init__(self, field: Ring):
        super().__init__()
        self.field = field
        self.ring_r = field
        self.ring_s = zorn(field)
        self.associative_s = False
        self.name = f"f4-octonion({field.kind})"

    def phi_rs(self, x):
        return self.ring_s.zero

    def rho_rs(self, x):
        z = self.field._zero()
        return self.ring_s.element((x.payload, (z, z, z), (z, z, z), x.payload))

    def phi_sr(self, u):
        return self.field.element((u + u.star()).payload[0])

    def rho_sr(self, u):
        return self.ring_s.scalar_norm(u)


class _FreeF4(F4Ring):
    """The initial pair: both sides Z + Z*l with the displayed phi and rho."""

    def __init__(self):
        super().__init__()
        self.ring_r = self.ring_s = _THE_Z_LAMBDA
        self.name = "free-f4"

    def _phi(self, x):
        a, b = x.payload
        return AlgebraElement(_THE_Z_LAMBDA, (a - b, a - b))

    def _rho(self, x):
        a, b = x.payload
        d = a - b
        return AlgebraElement(_THE_Z_LAMBDA, ((d * d + a + b) // 2, (d * d - a - b) // 2))

    phi_rs = _phi
    phi_sr = _phi
    rho_rs = _rho
    rho_sr = _rho

    def _norm(self, x):
        a, b = x.payload
        return AlgebraElement(_THE_Z_LAMBDA, (a - b, 0))

    normalize_r_mod_kernel = _norm
    normalize_s_mod_kernel = _norm
    normalize_r_mod_phi = _norm
    normalize_s_mod_phi = _norm


class _MirrorF4(F4Ring):
    """The same pair with the two sides exchanged."""

    def __init__(self, base: F4Ring):
        super().__init__()
        self.base = base
        self.ring_r = base.ring_s
        self.ring_s = base.ring_r
        self.associative_r = base.associative_s
        self.associative_s = base.associative_r
        self.name = f"mirror({base.name})"

    def star_r(self, x):
        return self.base.star_s(x)

    def star_s(self, u):
        return self.base.star_r(u)

    def phi_rs(self, x):
        return self.base.phi_sr(x)

    def phi_sr(self, u):
        return self.base.phi_rs(u)

    def rho_rs(self, x):
        return self.base.rho_sr(x)

    def rho_sr(self, u):
        return self.base.rho_rs(u)

    def normalize_r_mod_kernel(self, x):
        return self.base.normalize_s_mod_kernel(x)

    def normalize_s_mod_kernel(self, u):
        return self.base.normalize_r_mod_kernel(u)

    def normalize_s_mod_phi(self, u):
        return self.base.normalize_r_mod_phi(u)

    def normalize_r_mod_phi(self, x):
        return self.base.normalize_s_mod_phi(x)


def f4_chevalley(field: Ring) -> F4Ring:
    """The pair coordinatising split simply-laced quotients: both sides
    the given commutative ring."""
    return _ChevalleyF4(field)


def f4_free() -> F4Ring:
    """The initial pair on no generators."""
    return _FreeF4()


def f4_octonion(field: Ring) -> F4Ring:
    """The pair (scalars, split octonions) over a commutative ring."""
    return _OctonionF4(field)


def mirror_f4(f4: F4Ring) -> F4Ring:
    """Exchange the two sides of a pair."""
    if isinstance(f4, _MirrorF4):
        return f4.base
    return _MirrorF4(f4)


class _SliceBB(BBRing):
    """One side of an F4 pair as a BBRing whose Delta is the other ring.

    With P the carrier and Q the partner ring: lambda = rho(-1_Q),
    phi is the P->Q trace, <u, v> = -phi(u* v) back into P, rho is the
    Q->P norm map, and u.x = rho(x) u inside Q.
    """

    def __init__(self, f4: F4Ring, side: str):
        super().__init__()
        if side not in ("R", "S"):
            raise ValueError("side must be 'R' or 'S'")
        self.f4 = f4
        self.side = side
        if side == "R":
            self.ring, self.other = f4.ring_r, f4.ring_s
            self._star_p, self._star_q = f4.star_r, f4.star_s
            self._phi_pq, self._phi_qp = f4.phi_rs, f4.phi_sr
            self._rho_pq, self._rho_qp = f4.rho_rs, f4.rho_sr
            self.associative = f4.associative_r
        else:
            self.ring, self.other = f4.ring_s, f4.ring_r
            self._star_p, self._star_q = f4.star_s, f4.star_r
            self._phi_pq, self._phi_qp = f4.phi_sr, f4.phi_rs
            self._rho_pq, self._rho_qp = f4.rho_sr, f4.rho_rs
            self.associative = f4.associative_s
        self.name = f"{f4.name}[{side}]"
        self._lam = self._rho_qp(self.other.from_int(-1))

    def star(self, x):
        return self._star_p(x)

    def delta_zero(self):
        return self.other._zero()

    def delta_add(self, u, v):
        return self.other._add(u, v)

    def delta_neg(self, u):
        return self.other._neg(u)

    @property
    def iota(self):
        return self.other._one()

    def phi(self, x):
        return self._phi_pq(x).payload

    def pair(self, u, v):
        qu = AlgebraElement(self.other, u)
        qv = AlgebraElement(self.other, v)
        return -self._phi_qp(self._star_q(qu) * qv)

    def rho(self, u):
        return self._rho_qp(AlgebraElement(self.other, u))

    def act(self, u, x):
        return (self._rho_pq(x) * AlgebraElement(self.other, u)).payload

    def delta_elements(self):
        if self.other.size is None:
            return None
        return [e.payload for e in self.other.elements()]

    def delta_sample(self, rng):
        return self.other.sample(rng).payload

    def delta_format(self, u):
        return self.other._format(u)


def bb_from_f4(f4: F4Ring, side: str = "R") -> BBRing:
    """View one side of an F4 pair as a BBRing."""
    return _SliceBB(f4, side)


def check_f4_axioms(ring: F4Ring, budget: int = 10000, seed: int = 0) -> AxiomReport:
    """Run the paired-ring axiom list in both orientations."""
    f4 = ring
    rng = random.Random(seed)
    cap = _pool_cap(budget)
    report = AxiomReport("f4", f4.name, budget, seed)

    orientations = [
        (
            "R",
            f4.ring_r,
            f4.ring_s,
            f4.star_r,
            f4.star_s,
            f4.phi_rs,
            f4.phi_sr,
            f4.rho_rs,
            f4.rho_sr,
        ),
        (
            "S",
            f4.ring_s,
            f4.ring_r,
            f4.star_s,
            f4.star_r,
            f4.phi_sr,
            f4.phi_rs,
            f4.rho_sr,
            f4.rho_rs,
        ),
    ]
    for side, P, Q, star_p, star_q, phi_pq, phi_qp, rho_pq, rho_qp in orientations:
        ppool = _element_pool(P, cap, rng, extras=[P.zero, P.one, P.from_int(-1)])
        qpool = _element_pool(Q, cap, rng, extras=[Q.zero, Q.one, Q.from_int(-1)])
        run = _Runner(
            report,
            pools={"p": ppool, "q": qpool},
            formats={"p": repr, "q": repr},
            budget=budget,
            rng=rng,
        )

        def ne(a, b):
            if a == b:
                return None
            return {"lhs": repr(a), "rhs": repr(b)}

        zp, zq = P.zero, Q.zero

        def central(c, w1, w2):
            return (
                ne(c * w1, w1 * c)
                or ne(associator(c, w1, w2), zq)
                or ne(associator(w1, c, w2), zq)
                or ne(associator(w1, w2, c), zq)
            )

        tag = f" ({side} side)"
        run.check(
            "ring is alternative" + tag,
            "pp",
            lambda x, y: ne(associator(x, x, y), zp) or ne(associator(y, x, x), zp),
        )
        run.check(
            "involution is a proper anti-automorphism" + tag,
            "pp",
            lambda x, y: ne(star_p(star_p(x)), x)
            or ne(star_p(x * y), star_p(y) * star_p(x))
            or ne(star_p(x + y), star_p(x) + star_p(y)),
        )
        run.check(
            "starred associator flips sign" + tag,
            "ppp",
            lambda x, y, z: ne(associator(star_p(x), y, z), -associator(x, y, z)),
        )
        run.check(
            "associator star" + tag,
            "ppp",
            lambda x, y, z: ne(star_p(associator(x, y, z)), -associator(x, y, z)),
        )
        run.check(
            "phi is additive" + tag,
            "pp",
            lambda x, y: ne(phi_pq(x + y), phi_pq(x) + phi_pq(y)),
        )
        run.check(
            "phi lands in the centre" + tag,
            "pqq",
            lambda x, u, v: central(phi_pq(x), u, v),
        )
        run.check(
            "phi of a product commutes" + tag,
            "pp",
            lambda x, y: ne(phi_pq(x * y), phi_pq(y * x)),
        )
        run.check(
            "phi ignores association" + tag,
            "ppp",
            lambda x, y, z: ne(phi_pq((x * y) * z), phi_pq(x * (y * z))),
        )
        run.check(
            "phi fixed by stars" + tag,
            "p",
            lambda x: ne(phi_pq(star_p(x)), phi_pq(x))
            or ne(star_q(phi_pq(x)), phi_pq(x)),
        )
        run.check(
            "phi of phi vanishes" + tag,
            "p",
            lambda x: ne(phi_qp(phi_pq(x)), zp),
        )
        run.check(
            "phi slides through rho" + tag,
            "pq",
            lambda x, u: ne(u * phi_pq(x), phi_pq(rho_qp(u) * x)),
        )
        run.check(
            "rho lands in the centre" + tag,
            "pqq",
            lambda x, u, v: central(rho_pq(x), u, v),
        )
        run.check("rho is unital" + tag, "", lambda: ne(rho_pq(P.one), Q.one))
        run.check(
            "rho is multiplicative" + tag,
            "pp",
            lambda x, y: ne(rho_pq(x) * rho_pq(y), rho_pq(x * y)),
        )
        run.check(
            "rho of a sum" + tag,
            "pp",
            lambda x, y: ne(rho_pq(x + y), rho_pq(x) + phi_pq(star_p(x) * y) + rho_pq(y)),
        )
        run.check(
            "rho fixed by stars" + tag,
            "p",
            lambda x: ne(rho_pq(star_p(x)), rho_pq(x))
            or ne(star_q(rho_pq(x)), rho_pq(x)),
        )
        run.check(
            "rho of rho is the norm" + tag,
            "p",
            lambda x: ne(rho_qp(rho_pq(x)), star_p(x) * x),
        )
        run.check(
            "rho phi trace identity" + tag,
            "p",
            lambda x: ne(rho_qp(phi_pq(x)) + phi_qp(rho_pq(x)), x + star_p(x)),
        )

        def transfer(x):
            left = try_invert(x)
            right = try_invert(rho_pq(x))
            if isinstance(left, NotInvertible) != isinstance(right, NotInvertible):
                return {
                    "element": repr(x),
                    "element_invertible": not isinstance(left, NotInvertible),
                    "rho_invertible": not isinstance(right, NotInvertible),
                }
            return None

        run.check("invertibility transfers through rho" + tag, "p", transfer)
    return report


# ---------------------------------------------------------------------------
# Overlap data for the rank-two corner
# ---------------------------------------------------------------------------


@dataclass
class F4OverlapData:
    """Eight correspondence maps between two BB coordinate systems.

    `bb_r` carries (R, Delta) and `bb_s` carries (S, Theta).  The H maps
    send Delta into S (keyed 1, 2, -1, -2) and the F maps send R into
    Theta payloads (keyed by index pairs), normalised so that H_1 sends
    iota to 1 and F_12 sends 1 to iota.
    """

    name: str
    bb_r: BBRing
    bb_s: BBRing
    h: Mapping[int, Callable]
    f: Mapping[tuple[int, int], Callable]


def overlap_from_f4(f4: F4Ring) -> F4OverlapData:
    """The canonical identity overlap of the two slices of an F4 pair."""
    bb_r = bb_from_f4(f4, "R")
    bb_s = bb_from_f4(f4, "S")
    S = f4.ring_s
    lam_s = bb_s.lambda_element
    lam_r = bb_r.lambda_element
    h = {
        1: lambda u: AlgebraElement(S, u),
        2: lambda u: lam_s * AlgebraElement(S, u),
        -1: lambda u: AlgebraElement(S, u) * lam_s,
        -2: lambda u: AlgebraElement(S, u) * lam_s,
    }
    f = {
        (1, 2): lambda x: x.payload,
        (-1, 2): lambda x: (lam_r * x).payload,
        (1, -2): lambda x: (x * lam_r).payload,
        (-1, -2): lambda x: (x * lam_r).payload,
    }
    return F4OverlapData(f"overlap({f4.name})", bb_r, bb_s, h, f)


def check_f4_overlap(
    overlap: F4OverlapData, budget: int = 10000, seed: int = 0
) -> AxiomReport:
    """Verify the full two-column identity list of an overlap, its
    well-definedness collapses, and the reduced list; the notes record
    whether the long and reduced groups agree."""
    rng = random.Random(seed)
    cap = _pool_cap(budget)
    br, bs = overlap.bb_r, overlap.bb_s
    R = br.ring
    lam_r = br.lambda_element
    lam_r_star = br.star(lam_r)
    lam_s = bs.lambda_element
    lam_s_star = bs.star(lam_s)
    h1, h2, hm1, hm2 = overlap.h[1], overlap.h[2], overlap.h[-1], overlap.h[-2]
    f12 = overlap.f[(1, 2)]
    fm12 = overlap.f[(-1, 2)]
    f1m2 = overlap.f[(1, -2)]
    fm1m2 = overlap.f[(-1, -2)]

    xpool = _element_pool(R, cap, rng, extras=[R.zero, R.one, lam_r])
    delta_all = br.delta_elements()
    if delta_all is not None and len(delta_all) <= cap:
        upool = (list(delta_all), True)
    else:
        out, seen = [], set()
        for u in [br.delta_zero(), br.iota] + [br.delta_sample(rng) for _ in range(cap)]:
            if u not in seen:
                seen.add(u)
                out.append(u)
        upool = (out, False)

    report = AxiomReport("f4-overlap", overlap.name, budget, seed)
    run = _Runner(
        report,
        pools={"x": xpool, "u": upool},
        formats={"x": repr, "u": br.delta_format},
        budget=budget,
        rng=rng,
    )

    def ne(a, b):
        if a == b:
            return None
        return {"lhs": repr(a), "rhs": repr(b)}

    def tne(a, b):
        if bs.delta_equal(a, b):
            return None
        return {"lhs": bs.delta_format(a), "rhs": bs.delta_format(b)}

    def dne(a, b):
        if br.delta_equal(a, b):
            return None
        return {"lhs": br.delta_format(a), "rhs": br.delta_format(b)}

    rho_s = bs.rho  # Theta -> nucleus of S
    rho_r = br.rho  # Delta -> nucleus of R
    phi_r = br.phi  # R -> Delta
    phi_s = bs.phi  # S -> Theta
    act_r = br.act  # Delta x R -> Delta
    act_s = bs.act  # Theta x S -> Theta
    star_s = bs.star

    run.check(
        "normalisation: H_1 sends iota to one",
        "",
        lambda: ne(h1(br.iota), bs.ring.one),
    )
    run.check(
        "normalisation: F_12 sends one to iota",
        "",
        lambda: tne(f12(R.one), bs.iota),
    )

    long_rows = [
        (
            "long 1a: H_1(u.l*x*l) = l* rho(F_-1-2(x)) H_2(u)",
            lambda u, x: ne(
                h1(act_r(u, (lam_r_star * x.star()) * lam_r)),
                (lam_s_star * rho_s(fm1m2(x))) * h2(u),
            ),
        ),
        (
            "long 1b: F_-12(x).l*H_-1(u)*l = F_12(l* rho(u) x)",
            lambda u, x: tne(
                act_s(fm12(x), (lam_s_star * star_s(hm1(u))) * lam_s),
                f12((lam_r_star * rho_r(u)) * x),
            ),
        ),
        (
            "long 2a: H_1(u.x*l) = H_-2(u) rho(F_-12(x))* l",
            lambda u, x: ne(
                h1(act_r(u, x.star() * lam_r)),
                (hm2(u) * star_s(rho_s(fm12(x)))) * lam_s,
            ),
        ),
        (
            "long 2b: F_1-2(x).H_2(u)*l = F_12(x rho(u)* l)",
            lambda u, x: tne(
                act_s(f1m2(x), star_s(h2(u)) * lam_s),
                f12((x * br.star(rho_r(u))) * lam_r),
            ),
        ),
        (
            "long 3a: H_2(u.x) = H_-1(u) rho(F_-12(x))",
            lambda u, x: ne(h2(act_r(u, x)), hm1(u) * rho_s(fm12(x))),
        ),
        (
            "long 3b: F_-1-2(x).H_2(u) = F_-12(x rho(u))",
            lambda u, x: tne(act_s(fm1m2(x), h2(u)), fm12(x * rho_r(u))),
        ),
        (
            "long 4a: H_2(u.x) = rho(F_12(x))* l H_1(u)",
            lambda u, x: ne(
                h2(act_r(u, x)), (star_s(rho_s(f12(x))) * lam_s) * h1(u)
            ),
        ),
        (
            "long 4b: F_12(x).H_1(u) = F_-12(rho(u)* l x)",
            lambda u, x: tne(
                act_s(f12(x), h1(u)), fm12((br.star(rho_r(u)) * lam_r) * x)
            ),
        ),
        (
            "long 5a: H_-1(u.x*) = rho(F_12(x)) H_-2(u)",
            lambda u, x: ne(hm1(act_r(u, x.star())), rho_s(f12(x)) * hm2(u)),
        ),
        (
            "long 5b: F_1-2(x).H_1(u)* = F_-1-2(rho(u) x)",
            lambda u, x: tne(
                act_s(f1m2(x), star_s(h1(u))), fm1m2(rho_r(u) * x)
            ),
        ),
        (
            "long 6a: H_-1(u.l*x*) = H_2(u) l* rho(F_1-2(x))* l",
            lambda u, x: ne(
                hm1(act_r(u, lam_r_star * x.star())),
                ((h2(u) * lam_s_star) * star_s(rho_s(f1m2(x)))) * lam_s,
            ),
        ),
        (
            "long 6b: F_-12(x).l*H_-2(u)* = F_-1-2(x l* rho(u)* l)",
            lambda u, x: tne(
                act_s(fm12(x), lam_s_star * star_s(hm2(u))),
                fm1m2(((x * lam_r_star) * br.star(rho_r(u))) * lam_r),
            ),
        ),
        (
            "long 7a: H_-2(u.x) = H_1(u) l* rho(F_1-2(x))",
            lambda u, x: ne(
                hm2(act_r(u, x)), (h1(u) * lam_s_star) * rho_s(f1m2(x))
            ),
        ),
        (
            "long 7b: F_12(x).H_-2(u) = F_1-2(x l* rho(u))",
            lambda u, x: tne(
                act_s(f12(x), hm2(u)), f1m2((x * lam_r_star) * rho_r(u))
            ),
        ),
        (
            "long 8a: H_-2(u.x) = l* rho(F_-1-2(x))* l H_-1(u)",
            lambda u, x: ne(
                hm2(act_r(u, x)),
                ((lam_s_star * star_s(rho_s(fm1m2(x)))) * lam_s) * hm1(u),
            ),
        ),
        (
            "long 8b: F_-1-2(x).H_-1(u) = F_1-2(l* rho(u)* l x)",
            lambda u, x: tne(
                act_s(fm1m2(x), hm1(u)),
                f1m2(((lam_r_star * br.star(rho_r(u))) * lam_r) * x),
            ),
        ),
    ]
    for name, fn in long_rows:
        run.check(name, "ux", fn)

    long_pair_rows = [
        (
            "long 9a: l*<F_-1-2(x),F_-12(y)> = H_1(phi(x y* l))",
            "xx",
            lambda x, y: ne(
                lam_s_star * bs.pair(fm1m2(x), fm12(y)),
                h1(phi_r((x * y.star()) * lam_r)),
            ),
        ),
        (
            "long 9b: F_12(l*<u,v>) = phi(H_-1(u) H_2(v)* l)",
            "uu",
            lambda u, v: tne(
                f12(lam_r_star * br.pair(u, v)),
                phi_s((hm1(u) * star_s(h2(v))) * lam_s),
            ),
        ),
        (
            "long 10a: <F_12(x),F_-12(y)> = H_2(phi(x* y))",
            "xx",
            lambda x, y: ne(bs.pair(f12(x), fm12(y)), h2(phi_r(x.star() * y))),
        ),
        (
            "long 10b: F_-12(<u,v>) = phi(H_1(u)* H_2(v))",
            "uu",
            lambda u, v: tne(fm12(br.pair(u, v)), phi_s(star_s(h1(u)) * h2(v))),
        ),
        (
            "long 11a: <F_12(x),F_1-2(y)> = H_-1(phi(l x l* y*))",
            "xx",
            lambda x, y: ne(
                bs.pair(f12(x), f1m2(y)),
                hm1(phi_r(((lam_r * x) * lam_r_star) * y.star())),
            ),
        ),
        (
            "long 11b: F_-1-2(<u,v>) = phi(l H_1(u) l* H_-2(v)*)",
            "uu",
            lambda u, v: tne(
                fm1m2(br.pair(u, v)),
                phi_s(((lam_s * h1(u)) * lam_s_star) * star_s(hm2(v))),
            ),
        ),
        (
            "long 12a: l*<F_-1-2(x),F_1-2(y)> = H_-2(phi(x* l y))",
            "xx",
            lambda x, y: ne(
                lam_s_star * bs.pair(fm1m2(x), f1m2(y)),
                hm2(phi_r((x.star() * lam_r) * y)),
            ),
        ),
        (
            "long 12b: F_1-2(l*<u,v>) = phi(H_-1(u)* l H_-2(v))",
            "uu",
            lambda u, v: tne(
                f1m2(lam_r_star * br.pair(u, v)),
                phi_s((star_s(hm1(u)) * lam_s) * hm2(v)),
            ),
        ),
    ]
    for name, sorts, fn in long_pair_rows:
        run.check(name, sorts, fn)

    run.check(
        "welldef: H agrees across its four components",
        "u",
        lambda u: ne(h1(u), lam_s_star * h2(u))
        or ne(h1(u), hm1(u) * lam_s)
        or ne(h1(u), hm2(u) * lam_s),
    )
    run.check(
        "welldef: F agrees across its four components",
        "x",
        lambda x: tne(f12(x), fm12(lam_r * x))
        or tne(f12(x), f1m2(x * lam_r_star))
        or tne(f12(x), fm1m2(x * lam_r_star)),
    )

    def H(u):
        return h1(u)

    def F(x):
        return f12(x)

    reduced_rows = [
        ("reduced 1a: lambda_S squared is one", "", lambda: ne(lam_s * lam_s, bs.ring.one)),
        ("reduced 1b: lambda_R squared is one", "", lambda: ne(lam_r * lam_r, R.one)),
        (
            "reduced 2a: lambda_S commutes with H values",
            "u",
            lambda u: ne(lam_s * H(u), H(u) * lam_s),
        ),
        ("reduced 2b: lambda_R is central", "x", lambda x: ne(lam_r * x, x * lam_r)),
        (
            "reduced 3a: rho of F values is star-fixed",
            "x",
            lambda x: ne(star_s(rho_s(F(x))), rho_s(F(x))),
        ),
        (
            "reduced 3b: rho of Delta is star-fixed",
            "u",
            lambda u: ne(br.star(rho_r(u)), rho_r(u)),
        ),
        (
            "reduced 4a: H values commute with rho of F values",
            "ux",
            lambda u, x: ne(H(u) * rho_s(F(x)), rho_s(F(x)) * H(u)),
        ),
        (
            "reduced 4b: rho values are central in R",
            "ux",
            lambda u, x: ne(x * rho_r(u), rho_r(u) * x),
        ),
        (
            "reduced 5a: H intertwines the action",
            "ux",
            lambda u, x: ne(H(act_r(u, x)), rho_s(F(x)) * H(u)),
        ),
        (
            "reduced 5b: F intertwines the action",
            "ux",
            lambda u, x: tne(act_s(F(x), H(u)), F(rho_r(u) * x)),
        ),
        (
            "reduced 6a: the action ignores stars",
            "ux",
            lambda u, x: dne(act_r(u, x.star()), act_r(u, x)),
        ),
        (
            "reduced 6b: the partner action ignores stars",
            "ux",
            lambda u, x: tne(act_s(F(x), star_s(H(u))), act_s(F(x), H(u))),
        ),
        ("reduced 7a: lambda acts trivially", "u", lambda u: dne(act_r(u, lam_r), u)),
        (
            "reduced 7b: lambda_S acts trivially",
            "x",
            lambda x: tne(act_s(F(x), lam_s), F(x)),
        ),
        (
            "reduced 8a: phi ignores stars and flips lambda",
            "x",
            lambda x: dne(phi_r(x.star()), phi_r(x))
            or dne(phi_r(x), br.delta_neg(phi_r(x * lam_r))),
        ),
        (
            "reduced 8b: partner phi ignores stars and flips lambda",
            "u",
            lambda u: tne(phi_s(star_s(H(u))), phi_s(H(u)))
            or tne(phi_s(H(u)), bs.delta_neg(phi_s(H(u) * lam_s))),
        ),
        (
            "reduced 9a: phi of a product commutes",
            "xx",
            lambda x, y: dne(phi_r(x * y), phi_r(y * x)),
        ),
        (
            "reduced 9b: partner phi of a product commutes",
            "uu",
            lambda u, v: tne(phi_s(H(u) * H(v)), phi_s(H(v) * H(u))),
        ),
        (
            "reduced 10a: pairing of F values",
            "xx",
            lambda x, y: ne(bs.pair(F(x), F(y)), H(phi_r(-(x.star() * y)))),
        ),
        (
            "reduced 10b: F of a pairing",
            "uu",
            lambda u, v: tne(F(br.pair(u, v)), phi_s(-(star_s(H(u)) * H(v)))),
        ),
    ]
    for name, sorts, fn in reduced_rows:
        run.check(name, sorts, fn)

    long_ok = all(
        c.witness is None for c in report.checks if c.name.startswith("long")
    )
    welldef_ok = all(
        c.witness is None for c in report.checks if c.name.startswith("welldef")
    )
    reduced_ok = all(
        c.witness is None for c in report.checks if c.name.startswith("reduced")
    )
    report.notes.update(
        {
            "long_list_ok": long_ok,
            "well_definedness_ok": welldef_ok,
            "reduced_list_ok": reduced_ok,
            "lists_agree": long_ok == reduced_ok,
        }
    )
    return report


# ---------------------------------------------------------------------------
# Series truncation: R + R e + R e^2 with e^3 = 0
# ---------------------------------------------------------------------------


class _TruncatedRing(Ring):
    """base + base*e + base*e^2 with e^3 = 0; payloads are layer triples."""

    def __init__(self, base: Ring):
        self.base = base
        self.kind = f"{base.kind}[e]/(e3)"
        self.size = base.size ** 3 if base.size is not None else None

    def _canon(self, payload):
        p0, p1, p2 = payload
        return (self.base._canon(p0), self.base._canon(p1), self.base._canon(p2))

    def embed(self, x: AlgebraElement, layer: int = 0) -> AlgebraElement:
        z = self.base._zero()
        parts = [z, z, z]
        parts[layer] = x.payload
        return AlgebraElement(self, tuple(parts))

    def layer(self, x: AlgebraElement, index: int) -> AlgebraElement:
        return AlgebraElement(self.base, x.payload[index])

    def from_int(self, n: int) -> AlgebraElement:
        z = self.base._zero()
        return AlgebraElement(self, (self.base.from_int(n).payload, z, z))

    def elements(self):
        if self.base.size is None:
            return None
        pool = [e.payload for e in self.base.elements()]
        return (
            AlgebraElement(self, triple) for triple in iter_product(pool, repeat=3)
        )

    def sample(self, rng):
        return AlgebraElement(
            self,
            (
                self.base.sample(rng).payload,
                self.base.sample(rng).payload,
                self.base.sample(rng).payload,
            ),
        )

    def _zero(self):
        z = self.base._zero()
        return (z, z, z)

    def _one(self):
        z = self.base._zero()
        return (self.base._one(), z, z)

    def _add(self, p, q):
        add = self.base._add
        return (add(p[0], q[0]), add(p[1], q[1]), add(p[2], q[2]))

    def _neg(self, p):
        neg = self.base._neg
        return (neg(p[0]), neg(p[1]), neg(p[2]))

    def _mul(self, p, q):
        mul, add = self.base._mul, self.base._add
        return (
            mul(p[0], q[0]),
            add(mul(p[0], q[1]), mul(p[1], q[0])),
            add(add(mul(p[0], q[2]), mul(p[1], q[1])), mul(p[2], q[0])),
        )

    def _star(self, p):
        st = self.base._star
        return (st(p[0]), st(p[1]), st(p[2]))

    def _invert(self, p):
        head = self.base._invert(p[0])
        if isinstance(head, NotInvertible):
            return NotInvertible(
                "constant layer is not invertible", witness=head.witness
            )
        mul, add, neg = self.base._mul, self.base._add, self.base._neg
        c0 = head
        c1 = neg(mul(head, mul(p[1], c0)))
        c2 = neg(mul(head, add(mul(p[1], c1), mul(p[2], c0))))
        cand = (c0, c1, c2)
        if self._mul(p, cand) != self._one() or self._mul(cand, p) != self._one():
            return NotInvertible("no two-sided inverse in the truncation", witness=p)
        return cand

    def _format(self, p):
        fmt = self.base._format
        bits = []
        if p[0] != self.base._zero():
            bits.append(fmt(p[0]))
        if p[1] != self.base._zero():
            bits.append(f"({fmt(p[1])})*e")
        if p[2] != self.base._zero():
            bits.append(f"({fmt(p[2])})*e2")
        return " + ".join(bits) if bits else fmt(p[0])


_TRUNCATED_DELTA_CAP = 1 << 16


class TruncatedBBRing(BBRing):
    """The nilpotent series extension of a BBRing.

    The ring becomes base + base*e + base*e^2.  A form payload is a
    quadruple (u0, x, u1, u2): a base form element, a phi-layer ring
    element stored modulo {y + y* lambda}, a base form element at level
    e, and a base form element at level e^2 stored modulo the image of
    phi.  The layer rules are phi(x e^2) = phi(x) e, rho(u e) = rho(u) e^2,
    <u e^a, v e^b> = <u, v> e^(a+b), and (u e^a).(x e^b) = (u.x) e^(a+b).
    """

    def __init__(self, base: BBRing):
        super().__init__()
        self.base = base
        self.ring = _TruncatedRing(base.ring)
        self.name = f"series({base.name})"
        self.associative = base.associative
        z = base.ring._zero()
        self._lam = AlgebraElement(self.ring, (base.lambda_element.payload, z, z))
        self._zero_x = self._norm_x(base.ring.zero)
        self._zero_u2 = self._norm_u2(base.delta_zero())

    def _norm_x(self, x: AlgebraElement):
        return self.base.normalize_mod_hermitian(x).payload

    def _norm_u2(self, u):
        return self.base.normalize_mod_phi(u)

    def _xel(self, payload) -> AlgebraElement:
        return AlgebraElement(self.base.ring, payload)

    def delta_zero(self):
        dz = self.base.delta_zero()
        return (dz, self._zero_x, dz, self._zero_u2)

    def delta_add(self, a, b):
        B = self.base
        a0, ax, a1, a2 = a
        b0, bx, b1, b2 = b
        x = self._xel(ax) + self._xel(bx) - B.pair(a1, b0)
        u1 = B.delta_add(B.delta_add(a1, b1), B.phi(-B.pair(a2, b0)))
        return (
            B.delta_add(a0, b0),
            self._norm_x(x),
            u1,
            self._norm_u2(B.delta_add(a2, b2)),
        )

    def delta_neg(self, a):
        B = self.base
        a0, ax, a1, a2 = a
        x = -self._xel(ax) - B.pair(a1, a0)
        c1 = B.delta_add(B.delta_neg(a1), B.phi(-B.pair(a2, a0)))
        return (B.delta_neg(a0), self._norm_x(x), c1, self._norm_u2(B.delta_neg(a2)))

    def delta_equal(self, a, b):
        B = self.base
        return (
            B.delta_equal(a[0], b[0])
            and a[1] == b[1]
            and B.delta_equal(a[2], b[2])
            and B.delta_equal(a[3], b[3])
        )

    @property
    def iota(self):
        dz = self.base.delta_zero()
        return (self.base.iota, self._zero_x, dz, self._zero_u2)

    def phi(self, x):
        B = self.base
        x0, x1, x2 = x.payload
        return (
            B.phi(self._xel(x0)),
            self._norm_x(self._xel(x1)),
            B.phi(self._xel(x2)),
            self._zero_u2,
        )

    def pair(self, a, b):
        B = self.base
        a0, _, a1, a2 = a
        b0, _, b1, b2 = b
        p0 = B.pair(a0, b0)
        p1 = B.pair(a0, b1) + B.pair(a1, b0)
        p2 = B.pair(a0, b2) + B.pair(a1, b1) + B.pair(a2, b0)
        return AlgebraElement(self.ring, (p0.payload, p1.payload, p2.payload))

    def rho(self, a):
        B = self.base
        a0, ax, a1, a2 = a
        xe = self._xel(ax)
        r0 = B.rho(a0)
        r1 = xe - xe.star() * B.lambda_element - B.pair(a0, a1)
        r2 = B.rho(a1) - B.pair(a0, a2)
        return AlgebraElement(self.ring, (r0.payload, r1.payload, r2.payload))

    def act(self, a, x):
        B = self.base
        a0, ax, a1, a2 = a
        x0, x1, x2 = (self._xel(c) for c in x.payload)
        dz = B.delta_zero()
        rho0 = B.rho(a0)
        zero_r = B.ring._zero()
        pieces = [
            (B.act(a0, x0), self._zero_x, dz, self._zero_u2),
            self.phi(
                AlgebraElement(
                    self.ring,
                    (
                        zero_r,
                        (x1.star() * (rho0 * x0)).payload,
                        (x2.star() * (rho0 * x0)).payload,
                    ),
                )
            ),
            (dz, self._zero_x, B.act(a0, x1), self._zero_u2),
            (dz, self._zero_x, dz, self._norm_u2(B.act(a0, x2))),
            self.phi((x.star() * AlgebraElement(self.ring, (zero_r, ax, zero_r))) * x),
            (dz, self._zero_x, B.act(a1, x0), self._norm_u2(B.act(a1, x1))),
            (dz, self._zero_x, dz, self._norm_u2(B.act(a2, x0))),
        ]
        out = self.delta_zero()
        for piece in pieces:
            out = self.delta_add(out, piece)
        return out

    def delta_elements(self):
        B = self.base
        du = B.delta_elements()
        if du is None or B.ring.size is None:
            return None
        xreps = sorted({self._norm_x(e) for e in B.ring.elements()})
        ureps = sorted({self._norm_u2(u) for u in du})
        if len(du) * len(du) * len(xreps) * len(ureps) > _TRUNCATED_DELTA_CAP:
            return None
        return [
            (u0, xr, u1, u2)
            for u0 in du
            for xr in xreps
            for u1 in du
            for u2 in ureps
        ]

    def delta_sample(self, rng):
        B = self.base
        return (
            B.delta_sample(rng),
            self._norm_x(B.ring.sample(rng)),
            B.delta_sample(rng),
            self._norm_u2(B.delta_sample(rng)),
        )

    def delta_format(self, a):
        B = self.base
        bits = []
        if not B.delta_equal(a[0], B.delta_zero()):
            bits.append(B.delta_format(a[0]))
        if a[1] != self._zero_x:
            bits.append(f"phi(({B.ring._format(a[1])})*e)")
        if not B.delta_equal(a[2], B.delta_zero()):
            bits.append(f"({B.delta_format(a[2])})*e")
        if not B.delta_equal(a[3], self._zero_u2):
            bits.append(f"({B.delta_format(a[3])})*e2")
        return " + ".join(bits) if bits else "0."


class _TruncatedSRing(Ring):
    """The second component of a truncated F4 pair.

    Payloads are quadruples (s0, r, s1, s2): a partner-ring element, a
    carrier-ring element stored modulo the phi-kernel subgroup, and two
    more partner-ring elements at levels e and e^2, the last stored
    modulo the image of phi.
    """

    def __init__(self, f4: F4Ring):
        self.f4 = f4
        self.S = f4.ring_s
        self.R = f4.ring_r
        self.kind = f"form-series({self.S.kind})"
        self.size = None
        if self.S.size is not None and self.R.size is not None:
            try:
                nx = len({f4.normalize_r_mod_kernel(e).payload for e in self.R.elements()})
                nu = len({f4.normalize_s_mod_phi(e).payload for e in self.S.elements()})
                self.size = self.S.size * nx * self.S.size * nu
            except NotImplementedError:
                self.size = None

    def _norm_r(self, x: AlgebraElement):
        return self.f4.normalize_r_mod_kernel(x).payload

    def _norm_s(self, u: AlgebraElement):
        return self.f4.normalize_s_mod_phi(u).payload

    def _canon(self, payload):
        s0, r, s1, s2 = payload
        return (
            self.S._canon(s0),
            self._norm_r(AlgebraElement(self.R, self.R._canon(r))),
            self.S._canon(s1),
            self._norm_s(AlgebraElement(self.S, self.S._canon(s2))),
        )

    def elements(self):
        if self.size is None:
            return None
        s_all = [e.payload for e in self.S.elements()]
        xreps = sorted({self._norm_r(e) for e in self.R.elements()})
        ureps = sorted({self._norm_s(e) for e in self.S.elements()})
        return (
            AlgebraElement(self, (s0, r, s1, s2))
            for s0 in s_all
            for r in xreps
            for s1 in s_all
            for s2 in ureps
        )

    def sample(self, rng):
        return AlgebraElement(
            self,
            (
                self.S.sample(rng).payload,
                self._norm_r(self.R.sample(rng)),
                self.S.sample(rng).payload,
                self._norm_s(self.S.sample(rng)),
            ),
        )

    def _zero(self):
        z = self.S._zero()
        return (z, self._norm_r(self.R.zero), z, self._norm_s(self.S.zero))

    def _one(self):
        z = self.S._zero()
        return (self.S._one(), self._norm_r(self.R.zero), z, self._norm_s(self.S.zero))

    def _add(self, p, q):
        S, R = self.S, self.R
        return (
            S._add(p[0], q[0]),
            self._norm_r(AlgebraElement(R, R._add(p[1], q[1]))),
            S._add(p[2], q[2]),
            self._norm_s(AlgebraElement(S, S._add(p[3], q[3]))),
        )

    def _neg(self, p):
        S, R = self.S, self.R
        return (
            S._neg(p[0]),
            self._norm_r(AlgebraElement(R, R._neg(p[1]))),
            S._neg(p[2]),
            self._norm_s(AlgebraElement(S, S._neg(p[3]))),
        )

    def _trace_defect(self, r: AlgebraElement) -> AlgebraElement:
        """r + r* - phi(rho(r)): the value of rho on the phi layer."""
        f4 = self.f4
        return r + f4.star_r(r) - f4.phi_sr(f4.rho_rs(r))

    def _mul(self, p, q):
        f4 = self.f4
        S, R = self.S, self.R
        a0, ar, a1, a2 = (
            AlgebraElement(S, p[0]),
            AlgebraElement(R, p[1]),
            AlgebraElement(S, p[2]),
            AlgebraElement(S, p[3]),
        )
        b0, br, b1, b2 = (
            AlgebraElement(S, q[0]),
            AlgebraElement(R, q[1]),
            AlgebraElement(S, q[2]),
            AlgebraElement(S, q[3]),
        )
        s0 = a0 * b0
        r = f4.rho_sr(a0) * br + f4.rho_sr(b0) * ar
        s1 = a0 * b1 + a1 * b0 + f4.phi_rs(self._trace_defect(ar) * br)
        s2 = a0 * b2 + a1 * b1 + a2 * b0
        return (s0.payload, self._norm_r(r), s1.payload, self._norm_s(s2))

    def _star(self, p):
        st = self.f4.star_s
        S = self.S
        return (
            st(AlgebraElement(S, p[0])).payload,
            p[1],
            st(AlgebraElement(S, p[2])).payload,
            self._norm_s(st(AlgebraElement(S, p[3]))),
        )

    def _invert(self, p):
        f4 = self.f4
        S, R = self.S, self.R
        a0 = AlgebraElement(S, p[0])
        ar = AlgebraElement(R, p[1])
        a1 = AlgebraElement(S, p[2])
        a2 = AlgebraElement(S, p[3])
        head = try_invert(a0)
        if isinstance(head, NotInvertible):
            return NotInvertible("constant layer is not invertible", witness=p[0])
        rho_head = try_invert(f4.rho_sr(a0))
        if isinstance(rho_head, NotInvertible):
            return NotInvertible("norm of the constant layer is not invertible", witness=p[0])
        c0 = head
        cr = -(rho_head * (f4.rho_sr(c0) * ar))
        c1 = -(head * (a1 * c0 + f4.phi_rs(self._trace_defect(ar) * cr)))
        c2 = -(head * (a1 * c1 + a2 * c0))
        cand = (c0.payload, self._norm_r(cr), c1.payload, self._norm_s(c2))
        if self._mul(p, cand) != self._one() or self._mul(cand, p) != self._one():
            return NotInvertible("no two-sided inverse in the truncation", witness=p)
        return cand

    def _format(self, p):
        S, R = self.S, self.R
        bits = []
        if p[0] != S._zero():
            bits.append(S._format(p[0]))
        if p[1] != self._norm_r(R.zero):
            bits.append(f"phi(({R._format(p[1])})*e)")
        if p[2] != S._zero():
            bits.append(f"({S._format(p[2])})*e")
        if p[3] != self._norm_s(S.zero):
            bits.append(f"({S._format(p[3])})*e2")
        return " + ".join(bits) if bits else S._format(p[0])


class TruncatedF4Ring(F4Ring):
    """The nilpotent series extension of an F4 pair.

    The first ring extends plainly to three layers; the second becomes
    the four-layer form series.  The grading rules are asymmetric: rho
    towards the form side is layer-linear while rho back doubles the
    layer, matching phi(x e^2) = phi(x) e on the form side.
    """

    def __init__(self, base: F4Ring):
        super().__init__()
        self.base = base
        self.ring_r = _TruncatedRing(base.ring_r)
        self.ring_s = _TruncatedSRing(base)
        self.associative_r = base.associative_r
        self.associative_s = base.associative_s
        self.name = f"series({base.name})"

    def star_r(self, x):
        st = self.base.star_r
        R = self.base.ring_r
        return AlgebraElement(
            self.ring_r,
            tuple(st(AlgebraElement(R, c)).payload for c in x.payload),
        )

    def star_s(self, u):
        return AlgebraElement(self.ring_s, self.ring_s._star(u.payload))

    def phi_rs(self, x):
        base = self.base
        R = base.ring_r
        x0, x1, x2 = (AlgebraElement(R, c) for c in x.payload)
        return AlgebraElement(
            self.ring_s,
            (
                base.phi_rs(x0).payload,
                self.ring_s._norm_r(x1),
                base.phi_rs(x2).payload,
                self.ring_s._norm_s(base.ring_s.zero),
            ),
        )

    def phi_sr(self, u):
        base = self.base
        S = base.ring_s
        s0, _, s1, s2 = u.payload
        return AlgebraElement(
            self.ring_r,
            (
                base.phi_sr(AlgebraElement(S, s0)).payload,
                base.phi_sr(AlgebraElement(S, s1)).payload,
                base.phi_sr(AlgebraElement(S, s2)).payload,
            ),
        )

    def rho_rs(self, x):
        base = self.base
        R = base.ring_r
        x0, x1, x2 = (AlgebraElement(R, c) for c in x.payload)
        return AlgebraElement(
            self.ring_s,
            (
                base.rho_rs(x0).payload,
                self.ring_s._norm_r(base.star_r(x0) * x1),
                (base.rho_rs(x1) + base.phi_rs(base.star_r(x0) * x2)).payload,
                self.ring_s._norm_s(base.rho_rs(x2)),
            ),
        )

    def rho_sr(self, u):
        base = self.base
        S = base.ring_s
        R = base.ring_r
        s0 = AlgebraElement(S, u.payload[0])
        r = AlgebraElement(R, u.payload[1])
        s1 = AlgebraElement(S, u.payload[2])
        s2 = AlgebraElement(S, u.payload[3])
        layer1 = self.ring_s._trace_defect(r) + base.phi_sr(base.star_s(s0) * s1)
        layer2 = base.rho_sr(s1) + base.phi_sr(base.star_s(s0) * s2)
        return AlgebraElement(
            self.ring_r,
            (base.rho_sr(s0).payload, layer1.payload, layer2.payload),
        )


TruncatedSeriesRing = TruncatedBBRing | TruncatedF4Ring


def truncate_series(base) -> TruncatedBBRing | TruncatedF4Ring:
    """The three-layer nilpotent series extension of a BBRing or F4 pair."""
    if isinstance(base, BBRing):
        return TruncatedBBRing(base)
    if isinstance(base, F4Ring):
        return TruncatedF4Ring(base)
    raise TypeError(f"cannot truncate {type(base).__name__}")
