"""Based root data, weights, pairings and Weyl reflections, all in exact
rational arithmetic.

A RootDatum is given by simple roots (vectors in the character lattice) and
simple coroots (vectors in the cocharacter lattice), written in dual bases so
that the pairing of a weight with a coroot is the dot product.  Weights are
vectors of Fractions.  The positive-root closure is generated from the simple
roots and is required to be finite (finite Cartan type).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

__all__ = ["Weight", "RootDatum", "builtin_root_datum", "BUILTIN_ROOT_DATA"]

Vector = Tuple[int, ...]


@dataclass(frozen=True)
class Weight:
    """Point of the rational weight space, in coordinates dual to the coroot basis."""

    coords: Tuple[Fraction, ...]

    @classmethod
    def make(cls, values: Sequence) -> "Weight":
        return cls(tuple(Fraction(v) for v in values))

    @classmethod
    def zero(cls, rank: int) -> "Weight":
        return cls(tuple(Fraction(0) for _ in range(rank)))

    def __add__(self, other: "Weight") -> "Weight":
        return Weight(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "Weight") -> "Weight":
        return Weight(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "Weight":
        return Weight(tuple(-a for a in self.coords))

    def scale(self, c) -> "Weight":
        c = Fraction(c)
        return Weight(tuple(c * a for a in self.coords))

    def is_lattice(self) -> bool:
        return all(c.denominator == 1 for c in self.coords)

    def key(self) -> Tuple[Fraction, ...]:
        return self.coords

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self.coords) + ")"


class RootDatum:
    """Based root datum with exact pairing and positive-root closure."""

    def __init__(
        self,
        simple_roots: Sequence[Sequence[int]],
        simple_coroots: Sequence[Sequence[int]],
        name: str = "",
    ):
        if len(simple_roots) != len(simple_coroots):
            raise ValueError("need equally many simple roots and coroots")
        if not simple_roots:
            raise ValueError("rank-0 data are not supported")
        rank = len(simple_roots[0])
        for v in list(simple_roots) + list(simple_coroots):
            if len(v) != rank:
                raise ValueError("all root/coroot vectors must have equal length")
        self.rank = rank
        self.name = name
        self.simple_roots: List[Vector] = [tuple(int(x) for x in v) for v in simple_roots]
        self.simple_coroots: List[Vector] = [tuple(int(x) for x in v) for v in simple_coroots]
        self.n_simple = len(self.simple_roots)
        self.cartan = [
            [self._dot(a, ac) for ac in self.simple_coroots] for a in self.simple_roots
        ]
        self._check_cartan()
        self._positive: List[Tuple[Vector, Vector]] = self._closure()
        self._root_set = {r for r, _ in self._positive} | {
            tuple(-x for x in r) for r, _ in self._positive
        }
        self._coroot_of = {r: c for r, c in self._positive}
        self._coroot_of.update(
            {tuple(-x for x in r): tuple(-x for x in c) for r, c in self._positive}
        )

    # -- construction helpers ----------------------------------------------

    @staticmethod
    def _dot(a: Sequence[int], b: Sequence[int]) -> int:
        return sum(int(x) * int(y) for x, y in zip(a, b))

    def _check_cartan(self) -> None:
        n = self.n_simple
        for i in range(n):
            if self.cartan[i][i] != 2:
                raise ValueError(f"pairing <alpha_{i}, coroot_{i}> must be 2")
            for j in range(n):
                if i != j:
                    cij, cji = self.cartan[i][j], self.cartan[j][i]
                    if cij > 0 or cji > 0:
                        raise ValueError("off-diagonal Cartan entries must be <= 0")
                    if (cij == 0) != (cji == 0):
                        raise ValueError("Cartan matrix zero pattern must be symmetric")
                    if cij * cji > 3:
                        raise ValueError("Cartan matrix is not of finite type")

    def _closure(self) -> List[Tuple[Vector, Vector]]:
        """All positive roots with matched coroots, by reflection closure.

        Orders the result by height (sum of simple-root coefficients), then
        lexicographically; aborts if the closure exceeds a generous bound,
        which signals a non-finite input.
        """
        seen: Dict[Vector, Vector] = {
            r: c for r, c in zip(self.simple_roots, self.simple_coroots)
        }
        frontier = list(seen)
        bound = 4 * self.n_simple * self.n_simple * (self.rank + 4) + 64
        while frontier:
            new: List[Vector] = []
            for root in frontier:
                coroot = seen[root]
                for a, ac in zip(self.simple_roots, self.simple_coroots):
                    k = self._dot(root, ac)
                    refl = tuple(x - k * y for x, y in zip(root, a))
                    kc = self._dot(a, coroot)
                    refl_co = tuple(x - kc * y for x, y in zip(coroot, ac))
                    if refl not in seen and tuple(-x for x in refl) not in seen:
                        seen[refl] = refl_co
                        new.append(refl)
            frontier = new
            if len(seen) > bound:
                raise ValueError("positive-root closure does not terminate")
        positives = []
        for root, coroot in seen.items():
            h = self._height(root)
            if h is None:
                # negative of an already-seen positive; skip
                continue
            positives.append((h, root, coroot))
        positives.sort(key=lambda t: (t[0], t[1]))
        return [(r, c) for _h, r, c in positives]

    def _height(self, root: Vector):
        """Sum of simple-root coefficients when they are all nonnegative, else None."""
        coeffs = self.root_coefficients(root)
        if coeffs is None:
            return None
        if all(c >= 0 for c in coeffs):
            return sum(coeffs)
        return None

    def root_coefficients(self, root: Sequence):
        """Exact simple-root coordinates of a vector in the root span, or None."""
        cols = self.simple_roots
        target = [Fraction(x) for x in root]
        # solve sum_j c_j * cols[j] = target by Gaussian elimination
        n = self.n_simple
        rows = [[Fraction(cols[j][i]) for j in range(n)] + [target[i]] for i in range(self.rank)]
        piv: Dict[int, List[Fraction]] = {}
        for row in rows:
            v = list(row)
            for col, prow in piv.items():
                if v[col]:
                    f = v[col]
                    v = [a - f * b for a, b in zip(v, prow)]
            nz = [i for i in range(n) if v[i]]
            if nz:
                col = nz[0]
                inv = Fraction(1) / v[col]
                piv[col] = [a * inv for a in v]
            elif v[n] != 0:
                return None
        if len(piv) < n:
            # underdetermined only if simple roots are dependent; reject
            return None
        coeffs = [Fraction(0)] * n
        for col in sorted(piv, reverse=True):
            prow = piv[col]
            coeffs[col] = prow[n] - sum(prow[k] * coeffs[k] for k in range(col + 1, n))
        return coeffs

    # -- queries -------------------------------------------------------------

    def pair(self, lam: Weight, coroot: Sequence[int]) -> Fraction:
        """Exact pairing of a weight with a cocharacter vector."""
        if len(lam.coords) != self.rank or len(coroot) != self.rank:
            raise ValueError("dimension mismatch in pairing")
        return sum((c * int(v) for c, v in zip(lam.coords, coroot)), Fraction(0))

    def is_root(self, root: Sequence[int]) -> bool:
        return tuple(int(x) for x in root) in self._root_set

    def coroot(self, root: Sequence[int]) -> Vector:
        key = tuple(int(x) for x in root)
        if key not in self._coroot_of:
            raise ValueError(f"{key} is not a root")
        return self._coroot_of[key]

    def is_integral(self, lam: Weight, root: Sequence[int]) -> bool:
        """Whether the pairing of lam with the coroot of root is an integer."""
        return self.pair(lam, self.coroot(root)).denominator == 1

    def reflect(self, simple_index: int, lam: Weight) -> Weight:
        """Simple reflection acting on a weight."""
        if not 0 <= simple_index < self.n_simple:
            raise ValueError(f"no simple root with index {simple_index}")
        k = self.pair(lam, self.simple_coroots[simple_index])
        alpha = self.simple_roots[simple_index]
        return Weight(tuple(c - k * a for c, a in zip(lam.coords, alpha)))

    def reflect_vector(self, simple_index: int, vec: Sequence[int]) -> Vector:
        """Simple reflection acting on a character-lattice vector."""
        alpha = self.simple_roots[simple_index]
        acheck = self.simple_coroots[simple_index]
        k = self._dot(vec, acheck)
        return tuple(int(x) - k * a for x, a in zip(vec, alpha))

    def reflect_covector(self, simple_index: int, vec: Sequence[int]) -> Vector:
        """Simple reflection acting on a cocharacter-lattice vector."""
        alpha = self.simple_roots[simple_index]
        acheck = self.simple_coroots[simple_index]
        k = self._dot(alpha, vec)
        return tuple(int(x) - k * a for x, a in zip(vec, acheck))

    def reflection_matrix(self, simple_index: int) -> List[List[int]]:
        """Matrix of the simple reflection on the character lattice (columns = images)."""
        cols = []
        for i in range(self.rank):
            e = [0] * self.rank
            e[i] = 1
            cols.append(self.reflect_vector(simple_index, e))
        return [[cols[j][i] for j in range(self.rank)] for i in range(self.rank)]

    def positive_roots(self) -> List[Tuple[Vector, Vector]]:
        """All positive (root, coroot) pairs, ordered by height then lex."""
        return list(self._positive)

    def rho(self) -> Weight:
        half = Fraction(1, 2)
        total = [Fraction(0)] * self.rank
        for root, _ in self._positive:
            for i, x in enumerate(root):
                total[i] += x
        return Weight(tuple(half * t for t in total))

    def floor_pair(self, lam: Weight, coroot: Sequence[int]) -> int:
        """Floor (toward minus infinity) of the pairing with a coroot."""
        return math.floor(self.pair(lam, coroot))

    # -- serialization -------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "simple_roots": [list(r) for r in self.simple_roots],
            "simple_coroots": [list(c) for c in self.simple_coroots],
        }

    @classmethod
    def from_json(cls, data: dict, name: str = "") -> "RootDatum":
        return cls(data["simple_roots"], data["simple_coroots"], name=name)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RootDatum):
            return NotImplemented
        return (
            self.simple_roots == other.simple_roots
            and self.simple_coroots == other.simple_coroots
        )

    def __repr__(self) -> str:
        return f"RootDatum({self.name or self.to_json()})"


def _sl2() -> RootDatum:
    # character lattice Z in the fundamental-weight basis: alpha = 2*omega
    return RootDatum([[2]], [[1]], name="SL2")


def _pgl2() -> RootDatum:
    # adjoint rank-one datum: character lattice = root lattice
    return RootDatum([[1]], [[2]], name="PGL2")


def _sl3() -> RootDatum:
    return RootDatum([[2, -1], [-1, 2]], [[1, 0], [0, 1]], name="SL3")


def _sp4() -> RootDatum:
    # type C2 with the long simple root second
    return RootDatum([[2, -1], [-2, 2]], [[1, 0], [0, 1]], name="Sp4")


def _sl2xsl2() -> RootDatum:
    return RootDatum([[2, 0], [0, 2]], [[1, 0], [0, 1]], name="SL2xSL2")


BUILTIN_ROOT_DATA = {
    "SL2": _sl2,
    "PGL2": _pgl2,
    "SL3": _sl3,
    "Sp4": _sp4,
    "SL2xSL2": _sl2xsl2,
}


def builtin_root_datum(name: str) -> RootDatum:
    try:
        return BUILTIN_ROOT_DATA[name]()
    except KeyError:
        raise ValueError(
            f"unknown root datum {name!r}; built-ins: {sorted(BUILTIN_ROOT_DATA)}"
        ) from None


def double_datum(rd: RootDatum) -> RootDatum:
    """Root datum of the product group G x G (used for complexifications)."""
    n = rd.rank
    roots = []
    coroots = []
    for r, c in zip(rd.simple_roots, rd.simple_coroots):
        roots.append(list(r) + [0] * n)
        coroots.append(list(c) + [0] * n)
    for r, c in zip(rd.simple_roots, rd.simple_coroots):
        roots.append([0] * n + list(r))
        coroots.append([0] * n + list(c))
    return RootDatum(roots, coroots, name=f"{rd.name}x{rd.name}" if rd.name else "")
