"""Exact combinatorics of finite crystallographic root systems.

Root coordinates are stored as 2x the usual Bourbaki values so that the
half-sum roots of the E and F families have integer entries.  Everything
downstream is exact: dot products and reflections stay in the integers,
while cone membership and convexity questions are settled by a small
phase-1 simplex over `fractions.Fraction`.

Quantities defined through ratios of dot products (Cartan integers,
reflection coefficients, interval coordinates) are unaffected by the
doubling, so callers may treat `Root.dot` as an honest inner product.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, product
from typing import Iterable, Iterator, Mapping, Sequence

Q = Fraction
Coords = tuple[int, ...]

__all__ = [
    "Root",
    "RootSystem",
    "ClosedSubset",
    "RootOrder",
    "FoldMap",
    "UnsupportedRootSystemError",
    "build_root_system",
    "parse_label",
    "reflect",
    "interval",
    "height",
    "weyl_orbit",
    "highest_root",
    "extreme_roots",
    "is_special_closed",
    "right_extreme_order",
    "is_right_extreme",
    "fold_map",
    "coroot_coords",
    "f4_duality",
]


class UnsupportedRootSystemError(ValueError):
    """Raised for (type, rank) pairs outside the supported families."""


def dot(u: Coords, v: Coords) -> int:
    """Integer dot product of two doubled coordinate vectors."""
    return sum(a * b for a, b in zip(u, v, strict=True))


def _dependent(u: Coords, v: Coords) -> bool:
    """True iff u and v are linearly dependent (all 2x2 minors vanish)."""
    n = len(u)
    return all(u[i] * v[j] == u[j] * v[i] for i in range(n) for j in range(i + 1, n))


def _codirectional(u: Coords, v: Coords) -> bool:
    """True iff u and v point in the same direction."""
    return _dependent(u, v) and dot(u, v) > 0


class Root:
    """One root: an immutable integer vector tied to its owning system."""

    __slots__ = ("coords", "system", "_hash")

    def __init__(self, coords: Coords, system: "RootSystem"):
        self.coords = coords
        self.system = system
        self._hash = hash(coords)

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        return (
            isinstance(other, Root)
            and self.coords == other.coords
            and self.system is other.system
        )

    def __lt__(self, other: "Root") -> bool:
        return self.coords < other.coords

    def __neg__(self) -> "Root":
        return self.system.root(tuple(-c for c in self.coords))

    def __repr__(self) -> str:
        return f"Root({self.coords}, {self.system.label})"

    def dot(self, other: "Root") -> int:
        return dot(self.coords, other.coords)

    @property
    def norm2(self) -> int:
        return dot(self.coords, self.coords)

    def cartan(self, other: "Root") -> int:
        """The Cartan integer 2(self . other)/(other . other)."""
        num = 2 * self.dot(other)
        den = other.norm2
        if num % den:
            raise ArithmeticError(f"non-integral Cartan number for {self}, {other}")
        return num // den

    @property
    def height(self) -> int:
        return self.system.height(self)

    @property
    def is_long(self) -> bool:
        return self.norm2 == self.system.long_norm2

    @property
    def is_short(self) -> bool:
        return self.norm2 == self.system.short_norm2

    def is_orthogonal(self, other: "Root") -> bool:
        return self.dot(other) == 0


# ---------------------------------------------------------------------------
# Root lists, doubled coordinates
# ---------------------------------------------------------------------------


def _axis_roots(dim: int, upto: int, scale: int) -> list[Coords]:
    out: list[Coords] = []
    for i in range(upto):
        for s in (scale, -scale):
            v = [0] * dim
            v[i] = s
            out.append(tuple(v))
    return out


def _two_index_roots(dim: int, upto: int) -> list[Coords]:
    out: list[Coords] = []
    for i, j in combinations(range(upto), 2):
        for si in (2, -2):
            for sj in (2, -2):
                v = [0] * dim
                v[i], v[j] = si, sj
                out.append(tuple(v))
    return out


def _roots_a(rank: int) -> list[Coords]:
    dim = rank + 1
    out: list[Coords] = []
    for i in range(dim):
        for j in range(dim):
            if i != j:
                v = [0] * dim
                v[i], v[j] = 2, -2
                out.append(tuple(v))
    return out


def _roots_e8() -> list[Coords]:
    out = _two_index_roots(8, 8)
    for signs in product((1, -1), repeat=8):
        if sum(signs) % 4 == 0:
            out.append(signs)
    return out


def _roots_e7() -> list[Coords]:
    out = _two_index_roots(8, 6)
    out.append((0, 0, 0, 0, 0, 0, 2, -2))
    out.append((0, 0, 0, 0, 0, 0, -2, 2))
    for signs in product((1, -1), repeat=6):
        if sum(signs) % 4 == 0:
            out.append(signs + (1, -1))
            out.append(tuple(-s for s in signs) + (-1, 1))
    return out


def _roots_e6() -> list[Coords]:
    out = _two_index_roots(8, 5)
    for signs in product((1, -1), repeat=5):
        if sum(signs) % 4 == 3:
            out.append(signs + (1, 1, -1))
            out.append(tuple(-s for s in signs) + (-1, -1, 1))
    return out


def _root_coords(family: str, rank: int) -> list[Coords]:
    if family == "A":
        return _roots_a(rank)
    if family == "B":
        return _two_index_roots(rank, rank) + _axis_roots(rank, rank, 2)
    if family == "C":
        return _two_index_roots(rank, rank) + _axis_roots(rank, rank, 4)
    if family == "BC":
        return (
            _two_index_roots(rank, rank)
            + _axis_roots(rank, rank, 2)
            + _axis_roots(rank, rank, 4)
        )
    if family == "D":
        return _two_index_roots(rank, rank)
    if family == "E":
        return {6: _roots_e6, 7: _roots_e7, 8: _roots_e8}[rank]()
    if family == "F":
        return (
            _axis_roots(4, 4, 2)
            + _two_index_roots(4, 4)
            + [signs for signs in product((1, -1), repeat=4)]
        )
    raise UnsupportedRootSystemError(f"unknown family {family!r}")


_E_SIMPLE: tuple[Coords, ...] = (
    (1, -1, -1, -1, -1, -1, -1, 1),
    (2, 2, 0, 0, 0, 0, 0, 0),
    (-2, 2, 0, 0, 0, 0, 0, 0),
    (0, -2, 2, 0, 0, 0, 0, 0),
    (0, 0, -2, 2, 0, 0, 0, 0),
    (0, 0, 0, -2, 2, 0, 0, 0),
    (0, 0, 0, 0, -2, 2, 0, 0),
    (0, 0, 0, 0, 0, -2, 2, 0),
)


def _chain(dim: int, i: int) -> Coords:
    v = [0] * dim
    v[i], v[i + 1] = 2, -2
    return tuple(v)


def _simple_coords(family: str, rank: int, dim: int) -> tuple[Coords, ...]:
    if family == "A":
        return tuple(_chain(dim, i) for i in range(rank))
    if family in ("B", "BC"):
        last = [0] * dim
        last[rank - 1] = 2
        return tuple(_chain(dim, i) for i in range(rank - 1)) + (tuple(last),)
    if family == "C":
        last = [0] * dim
        last[rank - 1] = 4
        return tuple(_chain(dim, i) for i in range(rank - 1)) + (tuple(last),)
    if family == "D":
        last = [0] * dim
        last[rank - 2], last[rank - 1] = 2, 2
        return tuple(_chain(dim, i) for i in range(rank - 1)) + (tuple(last),)
    if family == "E":
        return _E_SIMPLE[:rank]
    if family == "F":
        return ((0, 2, -2, 0), (0, 0, 2, -2), (0, 0, 0, 2), (1, -1, -1, -1))
    raise UnsupportedRootSystemError(f"unknown family {family!r}")


_LEGAL = {
    "A": lambda r: r >= 1,
    "B": lambda r: r >= 2,
    "C": lambda r: r >= 2,
    "BC": lambda r: r >= 1,
    "D": lambda r: r >= 4,
    "E": lambda r: r in (6, 7, 8),
    "F": lambda r: r == 4,
}


def parse_label(label: str) -> tuple[str, int]:
    """Split a label like "B3", "BC2" or "E7" into (family, rank)."""
    head = label.rstrip("0123456789")
    tail = label[len(head):]
    if head not in _LEGAL or not tail:
        raise UnsupportedRootSystemError(f"cannot parse root system label {label!r}")
    return head, int(tail)


# ---------------------------------------------------------------------------
# Exact linear algebra over the rationals
# ---------------------------------------------------------------------------


def _solve_square(matrix: Sequence[Sequence[int]], rhs: Sequence[int]) -> list[Q]:
    """Solve an invertible integer system exactly by Gaussian elimination."""
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


def _solve_nonneg(cols: Sequence[Coords], target: Sequence[int]) -> list[Q] | None:
    """Find x >= 0 with sum_j x_j cols[j] = target, or None if infeasible.

    Phase-1 simplex with Bland's rule; exact rational arithmetic.
    """
    n = len(cols)
    m = len(target)
    rows: list[list[Q]] = []
    for i in range(m):
        row = [Q(c[i]) for c in cols] + [Q(target[i])]
        if row[-1] < 0:
            row = [-x for x in row]
        rows.append(row)
    basis = [n + i for i in range(m)]  # start from the all-artificial basis
    for _ in range(10000):
        artificial = [i for i in range(m) if basis[i] >= n]
        if not artificial:
            break
        entering = -1
        for j in range(n):
            if sum(rows[i][j] for i in artificial) > 0:
                entering = j
                break
        if entering < 0:
            break
        leaving = -1
        best: Q | None = None
        for i in range(m):
            coeff = rows[i][entering]
            if coeff > 0:
                ratio = rows[i][n] / coeff
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leaving]):
                    best = ratio
                    leaving = i
        if leaving < 0:
            break
        piv = rows[leaving][entering]
        rows[leaving] = [x / piv for x in rows[leaving]]
        for i in range(m):
            if i != leaving and rows[i][entering]:
                f = rows[i][entering]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[leaving])]
        basis[leaving] = entering
    else:  # pragma: no cover - Bland's rule terminates
        raise RuntimeError("simplex failed to terminate")
    if any(rows[i][n] != 0 for i in range(m) if basis[i] >= n):
        return None
    x = [Q(0)] * n
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = rows[i][n]
    return x


def _in_cone(generators: Sequence[Coords], target: Coords) -> bool:
    """True iff target is a nonnegative combination of the generators."""
    return _solve_nonneg(generators, target) is not None


def _in_open_halfspace(vectors: Sequence[Coords]) -> bool:
    """True iff some linear functional is strictly positive on every vector.

    By Gordan's theorem this fails exactly when 0 is a nontrivial
    nonnegative combination of the vectors.
    """
    if not vectors:
        return True
    dim = len(vectors[0])
    cols = [v + (1,) for v in vectors]
    return _solve_nonneg(cols, (0,) * dim + (1,)) is None


def _span_rank(vectors: Sequence[Coords]) -> int:
    if not vectors:
        return 0
    rows = [[Q(c) for c in v] for v in vectors]
    width = len(rows[0])
    rank = 0
    for col in range(width):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][col]), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = 1 / rows[rank][col]
        rows[rank] = [x * inv for x in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][col]:
                f = rows[r][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[rank])]
        rank += 1
    return rank


# ---------------------------------------------------------------------------
# RootSystem
# ---------------------------------------------------------------------------


class RootSystem:
    """All roots of one crystallographic type, with base, heights and orders.

    Instances are immutable after construction and interned per
    (family, rank), so roots obtained from any accessor compare by
    identity.  Use :func:`build_root_system` instead of the constructor.
    """

    __slots__ = (
        "family",
        "rank",
        "type_tag",
        "label",
        "dim",
        "roots",
        "lookup",
        "base",
        "positive",
        "short_norm2",
        "long_norm2",
        "highest_root",
        "_coeffs",
        "_heights",
    )

    def __init__(self, family: str, rank: int):
        legal = _LEGAL.get(family)
        if legal is None or not legal(rank):
            raise UnsupportedRootSystemError(
                f"no root system of type {family} and rank {rank}"
            )
        self.family = family
        self.rank = rank
        self.label = f"{family}{rank}"
        self.type_tag = self.label if family in ("E", "F") else family

        coords = sorted(set(_root_coords(family, rank)))
        self.dim = len(coords[0])
        self.roots: tuple[Root, ...] = tuple(Root(c, self) for c in coords)
        self.lookup: dict[Coords, int] = {c: i for i, c in enumerate(coords)}

        base_coords = _simple_coords(family, rank, self.dim)
        self.base: tuple[Root, ...] = tuple(self.root(c) for c in base_coords)

        gram = [[dot(a, b) for b in base_coords] for a in base_coords]
        self._coeffs: dict[Coords, tuple[int, ...]] = {}
        self._heights: dict[Coords, int] = {}
        for c in coords:
            rhs = [dot(b, c) for b in base_coords]
            sol = _solve_square(gram, rhs)
            recon = [
                sum(s * b[k] for s, b in zip(sol, base_coords)) for k in range(self.dim)
            ]
            if recon != list(c) or any(s.denominator != 1 for s in sol):
                raise AssertionError(f"root {c} is not an integral base combination")
            ints = tuple(int(s) for s in sol)
            if not (all(v >= 0 for v in ints) or all(v <= 0 for v in ints)):
                raise AssertionError(f"root {c} has mixed-sign base coefficients")
            self._coeffs[c] = ints
            self._heights[c] = sum(ints)

        self.positive: tuple[Root, ...] = tuple(
            sorted(
                (r for r in self.roots if self._heights[r.coords] > 0),
                key=lambda r: (self._heights[r.coords], r.coords),
            )
        )
        norms = {dot(c, c) for c in coords}
        self.short_norm2 = min(norms)
        self.long_norm2 = max(norms)

        top = self.positive[-1]
        if len(self.positive) > 1 and self.positive[-2].height == top.height:
            raise AssertionError("highest root is not unique")
        self.highest_root: Root = top

    def __repr__(self) -> str:
        return f"RootSystem({self.label}, {len(self.roots)} roots)"

    def __iter__(self) -> Iterator[Root]:
        return iter(self.roots)

    def __len__(self) -> int:
        return len(self.roots)

    def __contains__(self, item: object) -> bool:
        if isinstance(item, Root):
            return item.system is self and item.coords in self.lookup
        if isinstance(item, tuple):
            return item in self.lookup
        return False

    def root(self, coords: Iterable[int]) -> Root:
        """The interned Root with the given doubled coordinates."""
        key = tuple(coords)
        idx = self.lookup.get(key)
        if idx is None:
            raise ValueError(f"{key} is not a root of {self.label}")
        return self.roots[idx]

    def root_or_none(self, coords: Iterable[int]) -> Root | None:
        idx = self.lookup.get(tuple(coords))
        return None if idx is None else self.roots[idx]

    def index(self, root: Root) -> int:
        return self.lookup[root.coords]

    def height(self, root: Root) -> int:
        return self._heights[root.coords]

    def coefficients(self, root: Root) -> tuple[int, ...]:
        """Integer coordinates of the root over the simple base."""
        return self._coeffs[root.coords]

    def is_positive(self, root: Root) -> bool:
        return self._heights[root.coords] > 0

    def reflect(self, alpha: Root, beta: Root) -> Root:
        """s_alpha(beta) = beta - 2(beta.alpha)/(alpha.alpha) alpha."""
        k = beta.cartan(alpha)
        return self.root(tuple(b - k * a for a, b in zip(alpha.coords, beta.coords)))

    def sum_root(self, alpha: Root, beta: Root) -> Root | None:
        """alpha + beta if it is again a root, else None."""
        return self.root_or_none(tuple(a + b for a, b in zip(alpha.coords, beta.coords)))

    def weyl_orbit(self, root: Root) -> tuple[Root, ...]:
        """The orbit of a root under the Weyl group, sorted by coordinates."""
        seen = {root}
        queue = [root]
        while queue:
            current = queue.pop()
            for alpha in self.base:
                image = self.reflect(alpha, current)
                if image not in seen:
                    seen.add(image)
                    queue.append(image)
        return tuple(sorted(seen))

    def interval(self, alpha: Root, beta: Root) -> tuple[Root, ...]:
        """Roots strictly inside the open cone spanned by alpha and beta.

        Sorted by increasing angle from alpha; ties between codirectional
        roots (BC only) are broken by increasing length.
        """
        a11 = alpha.norm2
        a12 = alpha.dot(beta)
        a22 = beta.norm2
        det = a11 * a22 - a12 * a12
        if det == 0:
            raise ValueError("interval endpoints must be linearly independent")
        found: list[tuple[Q, int, Root]] = []
        for gamma in self.roots:
            b1 = gamma.dot(alpha)
            b2 = gamma.dot(beta)
            a = Q(a22 * b1 - a12 * b2, det)
            b = Q(a11 * b2 - a12 * b1, det)
            if a > 0 and b > 0 and all(
                a * x + b * y == g
                for x, y, g in zip(alpha.coords, beta.coords, gamma.coords)
            ):
                found.append((b / a, gamma.norm2, gamma))
        found.sort(key=lambda t: (t[0], t[1]))
        return tuple(g for _, _, g in found)

    def cone_coefficients(self, alpha: Root, beta: Root, gamma: Root) -> tuple[Q, Q] | None:
        """(a, b) with gamma = a alpha + b beta, if gamma lies in their span."""
        a11 = alpha.norm2
        a12 = alpha.dot(beta)
        a22 = beta.norm2
        det = a11 * a22 - a12 * a12
        if det == 0:
            raise ValueError("need linearly independent roots")
        b1 = gamma.dot(alpha)
        b2 = gamma.dot(beta)
        a = Q(a22 * b1 - a12 * b2, det)
        b = Q(a11 * b2 - a12 * b1, det)
        if all(
            a * x + b * y == g
            for x, y, g in zip(alpha.coords, beta.coords, gamma.coords)
        ):
            return a, b
        return None

    def to_json(self) -> dict:
        """Plain-data description: {type, rank, roots, long}."""
        return {
            "type": self.type_tag,
            "rank": self.rank,
            "roots": [list(r.coords) for r in self.roots],
            "long": [r.is_long for r in self.roots],
        }


_SYSTEMS: dict[tuple[str, int], RootSystem] = {}


def build_root_system(type_tag: str, rank: int | None = None) -> RootSystem:
    """Construct (or fetch from cache) the root system of the given type.

    Accepts either a bare family tag plus rank ("B", 3) or a full label
    ("B3", "E7", "F4"); when both are given they must agree.
    """
    head = type_tag.rstrip("0123456789")
    tail = type_tag[len(head):]
    if head not in _LEGAL:
        raise UnsupportedRootSystemError(f"unknown root system type {type_tag!r}")
    if tail:
        if rank is not None and rank != int(tail):
            raise UnsupportedRootSystemError(
                f"rank {rank} contradicts label {type_tag!r}"
            )
        rank = int(tail)
    if rank is None:
        raise UnsupportedRootSystemError(f"no rank given for type {type_tag!r}")
    key = (head, rank)
    system = _SYSTEMS.get(key)
    if system is None:
        system = RootSystem(head, rank)
        _SYSTEMS[key] = system
    return system


def reflect(system: RootSystem, alpha: Root, beta: Root) -> Root:
    """s_alpha(beta) in the given system."""
    return system.reflect(alpha, beta)


def interval(system: RootSystem, alpha: Root, beta: Root) -> tuple[Root, ...]:
    """The open interval of roots between alpha and beta."""
    return system.interval(alpha, beta)


def height(root: Root) -> int:
    """Sum of the base coefficients of a root."""
    return root.system.height(root)


def weyl_orbit(system: RootSystem, root: Root) -> tuple[Root, ...]:
    return system.weyl_orbit(root)


def highest_root(system: RootSystem) -> Root:
    return system.highest_root


def coroot_coords(root: Root) -> Coords:
    """Doubled coordinates of the coroot 2a/(a.a)."""
    n2 = root.norm2
    out = []
    for c in root.coords:
        num = 8 * c
        if num % n2:
            raise ArithmeticError(f"coroot of {root} has non-integral doubled coords")
        out.append(num // n2)
    return tuple(out)


# ---------------------------------------------------------------------------
# Closed subsets, extreme roots, right extreme orders
# ---------------------------------------------------------------------------


class ClosedSubset:
    """A finite set of roots of one system, kept in a deterministic order."""

    __slots__ = ("system", "roots", "_set", "_special")

    def __init__(self, system: RootSystem, roots: Iterable[Root], _special: bool | None = None):
        self.system = system
        self.roots: tuple[Root, ...] = tuple(sorted(set(roots)))
        self._set = frozenset(self.roots)
        self._special = _special

    @classmethod
    def from_cone(cls, system: RootSystem, generators: Sequence[Root]) -> "ClosedSubset":
        """All roots inside the closed cone spanned by the generators.

        The generators must lie in an open half-space (equivalently the
        cone must contain no opposite pair), which makes the result
        special closed by construction: its conical hull equals the
        generators' cone, so no further validation is needed.
        """
        gens = sorted({g.coords for g in generators})
        if not _in_open_halfspace(gens):
            raise ValueError("cone generators do not lie in an open half-space")
        members: list[Root] = []
        if len(gens) == 2 and not _dependent(gens[0], gens[1]):
            alpha = system.root(gens[0])
            beta = system.root(gens[1])
            for gamma in system.roots:
                ab = system.cone_coefficients(alpha, beta, gamma)
                if ab is not None and ab[0] >= 0 and ab[1] >= 0:
                    members.append(gamma)
        else:
            for gamma in system.roots:
                if _in_cone(gens, gamma.coords):
                    members.append(gamma)
        return cls(system, members, _special=True)

    def __iter__(self) -> Iterator[Root]:
        return iter(self.roots)

    def __len__(self) -> int:
        return len(self.roots)

    def __contains__(self, root: object) -> bool:
        return root in self._set

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, ClosedSubset)
            and self.system is other.system
            and self.roots == other.roots
        )

    def __hash__(self) -> int:
        return hash((id(self.system), self.roots))

    def __repr__(self) -> str:
        return f"ClosedSubset({self.system.label}, {len(self.roots)} roots)"

    def without(self, root: Root) -> "ClosedSubset":
        return ClosedSubset(self.system, (r for r in self.roots if r != root))

    def is_special_closed(self) -> bool:
        """Whether this set is the intersection of the system with a pointed cone."""
        if self._special is None:
            self._special = _special_closed(self.system, self.roots)
        return self._special


def _special_closed(system: RootSystem, roots: Sequence[Root]) -> bool:
    coords = [r.coords for r in roots]
    if not _in_open_halfspace(coords):
        return False
    member = set(coords)
    return not any(
        gamma.coords not in member and _in_cone(coords, gamma.coords)
        for gamma in system.roots
    )


def is_special_closed(subset: ClosedSubset) -> bool:
    return subset.is_special_closed()


def _is_extreme(sigma: Root, members: Sequence[Root]) -> bool:
    rest = [m.coords for m in members if not _codirectional(m.coords, sigma.coords)]
    if not rest:
        return True
    return not _in_cone(rest, sigma.coords)


def extreme_roots(subset: ClosedSubset) -> tuple[Root, ...]:
    """Roots not in the conical hull of the others (ignoring codirectionals)."""
    return tuple(r for r in subset.roots if _is_extreme(r, subset.roots))


class RootOrder:
    """A linear order on a closed subset, from least to greatest."""

    __slots__ = ("subset", "sequence", "_pos")

    def __init__(self, subset: ClosedSubset, sequence: Sequence[Root]):
        self.subset = subset
        self.sequence: tuple[Root, ...] = tuple(sequence)
        self._pos: dict[Root, int] = {r: i for i, r in enumerate(self.sequence)}
        if len(self._pos) != len(subset.roots) or any(r not in subset for r in sequence):
            raise ValueError("sequence is not a permutation of the subset")

    def position(self, root: Root) -> int:
        return self._pos[root]

    def precedes(self, a: Root, b: Root) -> bool:
        return self._pos[a] < self._pos[b]

    def __iter__(self) -> Iterator[Root]:
        return iter(self.sequence)

    def __len__(self) -> int:
        return len(self.sequence)

    def __getitem__(self, i: int) -> Root:
        return self.sequence[i]

    def __repr__(self) -> str:
        return f"RootOrder({[r.coords for r in self.sequence]})"


def right_extreme_order(subset: ClosedSubset) -> RootOrder:
    """A deterministic right extreme order on a special closed subset.

    Built from the right: at each step the lexicographically largest
    extreme root of the remainder becomes the next-largest element.
    """
    if not subset.is_special_closed():
        raise ValueError("subset is not special closed")
    remaining = list(subset.roots)
    tail: list[Root] = []
    while remaining:
        candidates = [r for r in remaining if _is_extreme(r, remaining)]
        if not candidates:
            raise AssertionError("special closed subset lost all extreme roots")
        pick = max(candidates)
        tail.append(pick)
        remaining.remove(pick)
    return RootOrder(subset, tuple(reversed(tail)))


def is_right_extreme(subset: ClosedSubset, sequence: Sequence[Root]) -> bool:
    """Validate a candidate right extreme order on a subset."""
    seq = list(sequence)
    if set(seq) != set(subset.roots) or len(seq) != len(subset.roots):
        return False
    while seq:
        if not _is_extreme(seq[-1], seq):
            return False
        seq.pop()
    return True


# ---------------------------------------------------------------------------
# Folding maps onto smaller systems
# ---------------------------------------------------------------------------


_FOLD_E7_C3 = (
    (0, 0, 0, 0, 1, 1, 0, 0),
    (0, 0, 0, 0, 1, -1, 0, 0),
    (0, 0, 0, 0, 0, 0, 1, -1),
)

_FOLD_E_F4 = (
    (1, 0, 0, 0, 0, 0, 0, 0),
    (0, 1, 0, 0, 0, 0, 0, 0),
    (0, 0, 1, 0, 0, 0, 0, 0),
    (0, 0, 0, 1, 0, 0, 0, 0),
)


class FoldMap:
    """A surjective linear map from a large root system onto a smaller one.

    `image(root)` is the target root or None (for kernel roots); `fiber`
    lists the source roots over one target root; `weyl_family` picks the
    lexicographically least maximal pairwise-orthogonal family in a
    fiber, which is the family whose Weyl elements multiply to a Weyl
    element of the folded root.
    """

    __slots__ = ("source", "target", "matrix", "fiber_table", "kernel", "kernel_type")

    def __init__(self, source: RootSystem, target: RootSystem, matrix: tuple[Coords, ...]):
        self.source = source
        self.target = target
        self.matrix = matrix
        fibers: dict[Root, list[Root]] = {t: [] for t in target.roots}
        kernel: list[Root] = []
        for r in source.roots:
            image = self.image(r)
            if image is None:
                kernel.append(r)
            else:
                fibers[image].append(r)
        if any(not f for f in fibers.values()):
            raise AssertionError("fold map is not surjective onto the target roots")
        self.fiber_table: dict[Root, tuple[Root, ...]] = {
            t: tuple(sorted(f)) for t, f in fibers.items()
        }
        self.kernel: tuple[Root, ...] = tuple(sorted(kernel))
        self.kernel_type = _classify_kernel(self.kernel)

    def image(self, root: Root) -> Root | None:
        coords = tuple(dot(row, root.coords) for row in self.matrix)
        if not any(coords):
            return None
        image = self.target.root_or_none(coords)
        if image is None:
            raise AssertionError(f"fold image {coords} is neither zero nor a root")
        return image

    def fiber(self, target_root: Root) -> tuple[Root, ...]:
        return self.fiber_table[target_root]

    def weyl_family(self, target_root: Root) -> tuple[Root, ...]:
        size = 1 if target_root.is_long else 2
        fiber = self.fiber_table[target_root]
        for family in combinations(fiber, size):
            if all(a.is_orthogonal(b) for a, b in combinations(family, 2)):
                return family
        raise AssertionError(f"no orthogonal family of size {size} over {target_root}")

    def __repr__(self) -> str:
        return f"FoldMap({self.source.label} -> {self.target.label})"


def _classify_kernel(kernel: Sequence[Root]) -> str:
    if not kernel:
        return "empty"
    coords = [r.coords for r in kernel]
    if all(
        dot(a, b) == 0 or _dependent(a, b)
        for a, b in combinations(coords, 2)
    ):
        return f"{len(kernel) // 2}A1"
    norms = {dot(c, c) for c in coords}
    if len(kernel) == 24 and len(norms) == 1 and _span_rank(coords) == 4:
        return "D4"
    raise AssertionError("kernel is not a recognized subsystem")


_FOLDS: dict[tuple[str, str], FoldMap] = {}

_FOLD_SPECS = {
    ("E7", "C3"): _FOLD_E7_C3,
    ("E8", "F4"): _FOLD_E_F4,
    ("E7", "F4"): _FOLD_E_F4,
    ("E6", "F4"): _FOLD_E_F4,
}


def fold_map(source_type: str, target_type: str) -> FoldMap:
    """The folding map for one of the supported (source, target) pairs."""
    key = (source_type, target_type)
    if key not in _FOLD_SPECS:
        raise UnsupportedRootSystemError(f"no folding map {source_type} -> {target_type}")
    fold = _FOLDS.get(key)
    if fold is None:
        source = build_root_system(*parse_label(source_type))
        target = build_root_system(*parse_label(target_type))
        fold = FoldMap(source, target, _FOLD_SPECS[key])
        _FOLDS[key] = fold
    return fold


# ---------------------------------------------------------------------------
# The length-swapping duality of F4
# ---------------------------------------------------------------------------


def f4_duality(system: RootSystem) -> dict[Root, Root]:
    """The involution of F4 that reverses the diagram and swaps root lengths.

    Determined by sending the i-th simple root to the (5-i)-th and
    intertwining the corresponding simple reflections; the result is
    path-independent because it is induced by a linear map on coroots.
    """
    if system.label != "F4":
        raise UnsupportedRootSystemError("duality map requires F4")
    base = system.base
    tau: dict[Root, Root] = {base[i]: base[3 - i] for i in range(4)}
    queue = list(tau)
    while queue:
        beta = queue.pop()
        for i, alpha in enumerate(base):
            gamma = system.reflect(alpha, beta)
            if gamma not in tau:
                tau[gamma] = system.reflect(base[3 - i], tau[beta])
                queue.append(gamma)
    if len(tau) != len(system.roots):
        raise AssertionError("duality did not reach every root")
    for beta in system.roots:
        for i, alpha in enumerate(base):
            if tau[system.reflect(alpha, beta)] != system.reflect(base[3 - i], tau[beta]):
                raise AssertionError("duality is not reflection-equivariant")
    return tau
