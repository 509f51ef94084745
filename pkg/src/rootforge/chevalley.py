"""Integral structure constants for Chevalley commutator presentations.

The magnitude of N_{alpha beta} is forced by the root strings; the signs
are a basis choice.  We normalize the way Carter does: positive roots are
ordered by (height, coordinates), the extraspecial pair (r, s) of each
composite positive root gets N_{rs} = +(p+1), and every other value is
propagated through the Jacobi identity.  The table is "correct" in the
only sense the mathematics pins down: the induced commutator presentation
satisfies the group axioms, which the steinberg module checks over probe
rings.

Weyl signs d_{alpha beta} are read off from the adjoint representation:
n_alpha = t_alpha(1) t_{-alpha}(-1) t_alpha(1) acts as
exp(ad e_a) exp(-ad e_{-a}) exp(ad e_a), which sends e_beta to
d_{alpha beta} e_{s_alpha(beta)}.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from typing import Iterable, Iterator, Mapping, Sequence

from .roots import (
    Q,
    Root,
    RootSystem,
    UnsupportedRootSystemError,
    coroot_coords,
    dot,
)

__all__ = [
    "StructureConstants",
    "TorusElement",
    "compute_structure_constants",
    "chevalley_commutator",
    "torus_conjugate",
    "bracket_vec",
]

# Sparse Lie algebra vectors: keys ("e", root) and ("h", simple index).
LieVec = dict[tuple, Q]


def _ipow(value, exponent: int):
    """value**exponent, tolerating negative exponents for integer signs."""
    if exponent >= 0:
        return value ** exponent
    if isinstance(value, int):
        if value in (1, -1):
            return value ** (-exponent)
        raise ArithmeticError(f"cannot invert the integer {value}")
    return value ** exponent


class StructureConstants:
    """The signed integer tables behind a Chevalley presentation."""

    __slots__ = (
        "system",
        "N",
        "d",
        "basis_choice",
        "_carter",
        "_n11",
        "_extraspecial",
        "_pair_terms",
        "_hcoeffs",
    )

    def __init__(self, system: RootSystem):
        if system.family == "BC":
            raise UnsupportedRootSystemError(
                "non-reduced BC systems carry no Chevalley constants"
            )
        if system.rank < 2:
            raise UnsupportedRootSystemError("structure constants need rank >= 2")
        self.system = system
        self._carter = {r: i for i, r in enumerate(system.positive)}
        self._n11: dict[tuple[Root, Root], int] = {}
        self._extraspecial: dict[Root, tuple[Root, Root]] = {}
        self._pair_terms: dict[tuple[Root, Root], tuple] = {}
        self._hcoeffs: dict[Root, tuple[int, ...]] = {}
        self.basis_choice = {
            "positive_order": "(height, coords) ascending",
            "extraspecial_sign": "+(p+1)",
            "opposite_bracket": "[e_a, e_-a] = coroot(a)",
            "weyl_element": "t_a(1) t_-a(-1) t_a(1)",
        }
        n_table: dict[tuple[Root, Root, int, int], int] = {}
        for alpha in system.roots:
            for beta in system.roots:
                if alpha is beta or alpha.coords == tuple(-c for c in beta.coords):
                    continue
                for gamma, i, j, value in self.pair_terms(alpha, beta):
                    n_table[(alpha, beta, i, j)] = value
        self.N: dict[tuple[Root, Root, int, int], int] = n_table
        self.d = _WeylSigns(self)

    def __repr__(self) -> str:
        return f"StructureConstants({self.system.label})"

    # -- N table ------------------------------------------------------

    def extraspecial_pair(self, gamma: Root) -> tuple[Root, Root]:
        """The (height, coords)-minimal decomposition of a composite positive root."""
        pair = self._extraspecial.get(gamma)
        if pair is None:
            for r in self.system.positive:
                rest = self.system.root_or_none(
                    tuple(g - c for g, c in zip(gamma.coords, r.coords))
                )
                if rest is not None and self.system.is_positive(rest):
                    pair = (r, rest)
                    break
            else:
                raise ValueError(f"{gamma} is not a composite positive root")
            self._extraspecial[gamma] = pair
        return pair

    def chain_down(self, alpha: Root, beta: Root) -> int:
        """p = max{k : beta - k alpha is a root}."""
        p = 0
        coords = beta.coords
        while True:
            coords = tuple(c - a for c, a in zip(coords, alpha.coords))
            if self.system.root_or_none(coords) is None:
                return p
            p += 1

    def n11(self, alpha: Root, beta: Root) -> int:
        """N_{alpha beta} for roots with alpha + beta a root."""
        key = (alpha, beta)
        value = self._n11.get(key)
        if value is None:
            value = self._compute_n11(alpha, beta)
            self._n11[key] = value
        return value

    def _compute_n11(self, alpha: Root, beta: Root) -> int:
        system = self.system
        gamma = system.sum_root(alpha, beta)
        if gamma is None:
            raise ValueError(f"{alpha} + {beta} is not a root")
        pos_a = system.is_positive(alpha)
        pos_b = system.is_positive(beta)
        if pos_a and not pos_b:
            if system.is_positive(gamma):
                # relate through the positive pair (-beta, gamma) with sum alpha
                num = gamma.norm2 * self.n11(-beta, gamma)
                den = alpha.norm2
            else:
                num = gamma.norm2 * self.n11(alpha, -gamma)
                den = beta.norm2
            if num % den:
                raise AssertionError("non-integral structure constant")
            return -num // den
        if not pos_a:
            if not pos_b:
                return -self.n11(-alpha, -beta)
            return -self.n11(beta, alpha)
        # both positive, in Carter order
        if self._carter[alpha] > self._carter[beta]:
            return -self.n11(beta, alpha)
        r, s = self.extraspecial_pair(gamma)
        if r is alpha:
            return self.chain_down(alpha, beta) + 1
        # special pair: expand the Jacobi identity for (e_{-alpha}, e_r, e_s)
        acc = 0
        r_minus_a = system.root_or_none(
            tuple(x - y for x, y in zip(r.coords, alpha.coords))
        )
        if r_minus_a is not None:
            acc += self.n11(-alpha, r) * self.n11(r_minus_a, s)
        s_minus_a = system.root_or_none(
            tuple(x - y for x, y in zip(s.coords, alpha.coords))
        )
        if s_minus_a is not None:
            acc += self.n11(-alpha, s) * self.n11(r, s_minus_a)
        num = gamma.norm2 * acc
        den = beta.norm2 * self.n11(r, s)
        if acc == 0 or num % den:
            raise AssertionError("Jacobi expansion failed for a special pair")
        return num // den

    def pair_terms(self, alpha: Root, beta: Root) -> tuple[tuple[Root, int, int, int], ...]:
        """All (gamma, i, j, N_{alpha beta i j}) with gamma = i alpha + j beta.

        Ordered by increasing angle from alpha, i.e. 2a+b before a+b
        before a+2b.  Empty when alpha + beta is not a root.
        """
        key = (alpha, beta)
        terms = self._pair_terms.get(key)
        if terms is None:
            if alpha is beta or alpha.coords == tuple(-c for c in beta.coords):
                raise ValueError("commutator terms need alpha != +-beta")
            system = self.system
            ab = system.sum_root(alpha, beta)
            if ab is None:
                terms = ()
            else:
                n = self.n11(alpha, beta)
                listed = []
                aab = system.sum_root(alpha, ab)
                if aab is not None:
                    num = n * self.n11(alpha, ab)
                    if num % 2:
                        raise AssertionError("half-integral N_{a b 2 1}")
                    listed.append((aab, 2, 1, num // 2))
                listed.append((ab, 1, 1, n))
                abb = system.sum_root(beta, ab)
                if abb is not None:
                    num = n * self.n11(beta, ab)
                    if num % 2:
                        raise AssertionError("half-integral N_{a b 1 2}")
                    listed.append((abb, 1, 2, num // 2))
                terms = tuple(listed)
            self._pair_terms[key] = terms
        return terms

    # -- adjoint representation ----------------------------------------

    def coroot_coefficients(self, alpha: Root) -> tuple[int, ...]:
        """alpha's coroot written over the simple coroots."""
        coeffs = self._hcoeffs.get(alpha)
        if coeffs is None:
            base_cr = [coroot_coords(b) for b in self.system.base]
            target = coroot_coords(alpha)
            gram = [[dot(a, b) for b in base_cr] for a in base_cr]
            rhs = [dot(b, target) for b in base_cr]
            sol = _solve_exact(gram, rhs)
            recon = [
                sum(s * b[k] for s, b in zip(sol, base_cr))
                for k in range(self.system.dim)
            ]
            if recon != list(target) or any(s.denominator != 1 for s in sol):
                raise AssertionError("coroot is not integral over the simple coroots")
            coeffs = tuple(int(s) for s in sol)
            self._hcoeffs[alpha] = coeffs
        return coeffs

    def basis_bracket(self, left: tuple, right: tuple) -> LieVec:
        """Bracket of two Chevalley basis elements as a sparse vector."""
        if left[0] == "h" and right[0] == "h":
            return {}
        if left[0] == "h":
            flipped = self.basis_bracket(right, left)
            return {k: -v for k, v in flipped.items()}
        if right[0] == "h":
            coeff = -left[1].cartan(self.system.base[right[1]])
            return {left: Q(coeff)} if coeff else {}
        alpha, beta = left[1], right[1]
        total = tuple(a + b for a, b in zip(alpha.coords, beta.coords))
        if not any(total):
            return {
                ("h", i): Q(c)
                for i, c in enumerate(self.coroot_coefficients(alpha))
                if c
            }
        if self.system.root_or_none(total) is None:
            return {}
        return {("e", self.system.root(total)): Q(self.n11(alpha, beta))}

    def _exp_ad(self, alpha: Root, scale: int, vec: LieVec) -> LieVec:
        """exp(ad(scale * e_alpha)) applied to a sparse vector."""
        out = dict(vec)
        term = vec
        for k in range(1, 7):
            nxt: LieVec = {}
            for key, val in term.items():
                for k2, v2 in self.basis_bracket(("e", alpha), key).items():
                    nxt[k2] = nxt.get(k2, Q(0)) + val * v2
            term = {k2: v * scale / k for k2, v in nxt.items() if v}
            if not term:
                return {k2: v for k2, v in out.items() if v}
            for k2, v in term.items():
                out[k2] = out.get(k2, Q(0)) + v
        raise AssertionError("ad-nilpotency bound exceeded")

    def weyl_action(self, alpha: Root, beta: Root) -> tuple[Root, int]:
        """(s_alpha(beta), d_{alpha beta}) from the adjoint action of n_alpha."""
        vec: LieVec = {("e", beta): Q(1)}
        vec = self._exp_ad(alpha, 1, vec)
        vec = self._exp_ad(-alpha, -1, vec)
        vec = self._exp_ad(alpha, 1, vec)
        if len(vec) != 1:
            raise AssertionError("Weyl action did not map a root vector to one")
        (kind, image), value = next(iter(vec.items()))
        if kind != "e" or image != self.system.reflect(alpha, beta) or value not in (1, -1):
            raise AssertionError("Weyl action produced an unexpected vector")
        return image, int(value)


class _WeylSigns(Mapping):
    """Lazy map (alpha, beta) -> d_{alpha beta} in {-1, +1}."""

    def __init__(self, constants: StructureConstants):
        self._constants = constants
        self._cache: dict[tuple[Root, Root], int] = {}

    def __getitem__(self, pair: tuple[Root, Root]) -> int:
        value = self._cache.get(pair)
        if value is None:
            _, value = self._constants.weyl_action(*pair)
            self._cache[pair] = value
        return value

    def __iter__(self) -> Iterator[tuple[Root, Root]]:
        roots = self._constants.system.roots
        return iter(product(roots, roots))

    def __len__(self) -> int:
        return len(self._constants.system.roots) ** 2


def _solve_exact(matrix: Sequence[Sequence[int]], rhs: Sequence[int]) -> list[Q]:
    n = len(rhs)
    aug = [[Q(matrix[i][j]) for j in range(n)] + [Q(rhs[i])] for i in range(n)]
    for col in range(n):
        pivot = next(r for r in range(col, n) if aug[r][col])
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [aug[i][n] for i in range(n)]


def bracket_vec(constants: StructureConstants, left: LieVec, right: LieVec) -> LieVec:
    """Bilinear extension of the basis bracket to sparse vectors."""
    out: LieVec = {}
    for k1, v1 in left.items():
        for k2, v2 in right.items():
            for key, val in constants.basis_bracket(k1, k2).items():
                out[key] = out.get(key, Q(0)) + v1 * v2 * val
    return {k: v for k, v in out.items() if v}


_CONSTANTS: dict[str, StructureConstants] = {}


def compute_structure_constants(system: RootSystem) -> StructureConstants:
    """Build (or fetch) the structure constant tables of a reduced system."""
    constants = _CONSTANTS.get(system.label)
    if constants is None:
        constants = StructureConstants(system)
        _CONSTANTS[system.label] = constants
    return constants


def chevalley_commutator(
    constants: StructureConstants, alpha: Root, beta: Root, x, y
) -> list[tuple[Root, object]]:
    """[t_alpha(x), t_beta(y)] as the ordered word of interval factors.

    Works over any commutative coefficient ring whose elements support
    +, * and integer powers; the integer constants act by scaling.
    """
    word = []
    for gamma, i, j, n in constants.pair_terms(alpha, beta):
        word.append((gamma, n * (x ** i) * (y ** j)))
    return word


class TorusElement:
    """Invertible scalars a_alpha with a_{alpha+beta} = a_alpha a_beta.

    Determined by the values on the simple roots; negative base
    coefficients require invertible values (integer entries must be +-1).
    """

    __slots__ = ("system", "entries")

    def __init__(self, system: RootSystem, base_values: Sequence):
        if len(base_values) != system.rank:
            raise ValueError("need one value per simple root")
        self.system = system
        self.entries: dict[Root, object] = {}
        for root in system.roots:
            coeffs = system.coefficients(root)
            value = _ipow(base_values[0], coeffs[0])
            for v, c in zip(base_values[1:], coeffs[1:]):
                value = value * _ipow(v, c)
            self.entries[root] = value

    @classmethod
    def identity(cls, system: RootSystem) -> "TorusElement":
        return cls(system, [1] * system.rank)

    def __repr__(self) -> str:
        shown = {r.coords: v for r, v in list(self.entries.items())[:3]}
        return f"TorusElement({self.system.label}, {shown}...)"


def torus_conjugate(torus: TorusElement, alpha: Root, x) -> tuple[Root, object]:
    """Conjugating t_alpha(x) by the torus element scales x by a_alpha."""
    return alpha, torus.entries[alpha] * x
