"""Blocks of twisted local-system parameters on K-orbits.

A block packages:

  * a root datum and a base weight lambda,
  * the list of twist weights (the Weyl translates of lambda the moves reach),
  * an orbit table: per orbit an involution theta of the character lattice
    and a compact/noncompact grading of its positive imaginary roots,
  * the parameters (orbit, twist, sign character) with cached length data,
  * per (parameter, simple root) edge records carrying one of eleven case
    labels and the move targets (cross actions, Cayley transforms, and the
    real non-integral partner map).

Sign characters are modelled as covectors over GF(2): the character value on
the order-two element cut out by a coroot is (-1) to the pairing with the
covector.  A parameter exists at (orbit, twist) exactly when the twist pairs
integrally with every cocharacter fixed by the orbit involution, and its sign
covector is constrained to match the twist's parity on those cocharacters.
Covectors are stored modulo the subspace that evaluates trivially on all
theta-fixed cocharacters mod 2, so parameter identity is well defined.

Blocks are immutable after validation; all queries are pure.  Builders are
single threaded.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from ._linalg import (
    gf2_kernel,
    gf2_reduce_vector,
    gf2_row_reduce,
    gf2_solve,
    in_integer_image,
    integer_kernel,
)
from .rootdata import RootDatum, Weight, builtin_root_datum, double_datum

__all__ = [
    "CASE_LABELS",
    "OrbitDatum",
    "SignCharacter",
    "Parameter",
    "EdgeRecord",
    "Block",
    "BlockError",
    "ValidationFailure",
    "build_sl2r",
    "build_pgl2r",
    "build_sl2c",
    "build_su21",
    "build_complex_group",
    "build_sl2r_x_sl2r",
    "build_group",
    "load_block",
    "save_block",
    "block_to_json",
    "block_from_json",
    "validate",
]

CASE_LABELS = (
    "ci",
    "C+",
    "C-",
    "r-I",
    "r-II",
    "r-nonparity",
    "nci-I",
    "nci-II",
    "r-nonint",
    "C+-nonint",
    "C--nonint",
)

# number of stored targets per case label
CASE_ARITY = {
    "ci": 0,
    "C+": 1,
    "C-": 1,
    "r-I": 2,
    "r-II": 2,
    "r-nonparity": 0,
    "nci-I": 2,
    "nci-II": 2,
    "r-nonint": 1,
    "C+-nonint": 1,
    "C--nonint": 1,
}

Matrix = Tuple[Tuple[int, ...], ...]


class BlockError(Exception):
    """Raised when block data is structurally unusable."""


class ValidationFailure(Exception):
    """Raised by validate() when a block violates its invariants."""

    def __init__(self, violations: List[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


# ---------------------------------------------------------------------------
# small integer-matrix helpers
# ---------------------------------------------------------------------------


def _mat(rows: Sequence[Sequence[int]]) -> Matrix:
    return tuple(tuple(int(x) for x in r) for r in rows)


def _identity(n: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def _mat_vec(m: Matrix, v: Sequence[int]) -> Tuple[int, ...]:
    return tuple(sum(m[i][j] * int(v[j]) for j in range(len(v))) for i in range(len(m)))


def _mat_mul(a: Matrix, b: Matrix) -> Matrix:
    n = len(a)
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n))
        for i in range(n)
    )


def _transpose(m: Matrix) -> Matrix:
    n = len(m)
    return tuple(tuple(m[j][i] for j in range(n)) for i in range(n))


def _gf2_span(basis: Sequence[Sequence[int]]) -> FrozenSet[Tuple[int, ...]]:
    """All elements of the GF(2) span of the given vectors (small spaces only)."""
    if not basis:
        return frozenset()
    n = len(basis[0])
    if len(basis) > 12:
        raise BlockError("GF(2) span too large to enumerate")
    out = {tuple(0 for _ in range(n))}
    for b in basis:
        bt = tuple(x & 1 for x in b)
        out |= {tuple(x ^ y for x, y in zip(v, bt)) for v in out}
    return frozenset(out)


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OrbitDatum:
    """Involution and imaginary-root grading attached to one K-orbit."""

    id: str
    theta: Matrix
    grading: Tuple[Tuple[Tuple[int, ...], str], ...]  # (positive imaginary root, "c"/"n")
    dimH: int

    def grading_map(self) -> Dict[Tuple[int, ...], str]:
        return dict(self.grading)

    @classmethod
    def make(cls, oid: str, theta: Sequence[Sequence[int]], grading: Dict, dimH: int):
        items = tuple(sorted((tuple(int(x) for x in k), v) for k, v in grading.items()))
        return cls(oid, _mat(theta), items, dimH)


@dataclass(frozen=True)
class SignCharacter:
    """GF(2) covector; evaluates on a coroot as (-1)^<mu2, coroot>."""

    mu2: Tuple[int, ...]

    def eval_coroot(self, coroot: Sequence[int]) -> int:
        """Character value on the order-two element of the coroot: +1 or -1."""
        s = sum(int(b) * int(c) for b, c in zip(self.mu2, coroot))
        return -1 if s % 2 else 1

    def bits(self) -> str:
        return "".join(str(b) for b in self.mu2)


@dataclass(frozen=True)
class Parameter:
    """A twisted local system: orbit, twist index, sign character, lengths."""

    id: str
    orbit: str
    twist: int
    sign: SignCharacter
    ell: int
    ell_I: Fraction
    ell_o: Fraction
    ell_H: Fraction

    def key(self) -> Tuple[str, int, Tuple[int, ...]]:
        return (self.orbit, self.twist, self.sign.mu2)


@dataclass(frozen=True)
class EdgeRecord:
    case: str
    targets: Tuple[str, ...]  # parameter ids


# ---------------------------------------------------------------------------
# orbit-level computations
# ---------------------------------------------------------------------------


def root_status(orbit: OrbitDatum, root: Sequence[int]) -> str:
    """One of "real", "imaginary", "complex" for a root at this orbit."""
    img = _mat_vec(orbit.theta, root)
    r = tuple(int(x) for x in root)
    if img == r:
        return "imaginary"
    if img == tuple(-x for x in r):
        return "real"
    return "complex"


def _theta_check(orbit: OrbitDatum) -> Matrix:
    """Action of the involution on the cocharacter lattice (the transpose)."""
    return _transpose(orbit.theta)


def _fixed_cochar_lattice(orbit: OrbitDatum) -> List[Tuple[int, ...]]:
    """Basis of the theta-fixed cocharacter lattice."""
    n = len(orbit.theta)
    tc = _theta_check(orbit)
    m = [[tc[i][j] - (1 if i == j else 0) for j in range(n)] for i in range(n)]
    return integer_kernel(m)


def _mod2_fixed_cochar(orbit: OrbitDatum) -> List[Tuple[int, ...]]:
    """Basis of ker(theta_check - 1) over GF(2)."""
    n = len(orbit.theta)
    tc = _theta_check(orbit)
    m = [[(tc[i][j] - (1 if i == j else 0)) % 2 for j in range(n)] for i in range(n)]
    return gf2_kernel(m)


class _OrbitCache:
    """Derived per-orbit data shared by classification and length formulas."""

    def __init__(self, rd: RootDatum, orbit: OrbitDatum):
        n = rd.rank
        if len(orbit.theta) != n:
            raise BlockError(f"orbit {orbit.id}: theta has wrong size")
        self.orbit = orbit
        self.fixed_lattice = _fixed_cochar_lattice(orbit)
        k2 = _mod2_fixed_cochar(orbit)
        self.k2_basis = k2
        # identification subspace: covectors trivial on every mod-2 fixed cochar
        self.ident_basis = gf2_row_reduce(gf2_kernel([list(v) for v in k2]) if k2 else [tuple(1 if i == j else 0 for j in range(n)) for i in range(n)])
        self.constraint_vectors = [tuple(b % 2 for b in v) for v in self.fixed_lattice]
        positive = rd.positive_roots()
        self.status = {r: root_status(orbit, r) for r, _ in positive}
        self.real_pos = [r for r, _ in positive if self.status[r] == "real"]
        self.imag_pos = [r for r, _ in positive if self.status[r] == "imaginary"]
        self.complex_pos_theta_pos = [
            r
            for r, _ in positive
            if self.status[r] == "complex"
            and _mat_vec(orbit.theta, r) in {p for p, _ in positive}
        ]
        grading = orbit.grading_map()
        if set(grading) != set(self.imag_pos):
            raise BlockError(
                f"orbit {orbit.id}: grading must be defined exactly on the positive "
                f"imaginary roots (have {sorted(grading)}, need {sorted(self.imag_pos)})"
            )
        if not all(v in ("c", "n") for v in grading.values()):
            raise BlockError(f"orbit {orbit.id}: grading values must be 'c' or 'n'")
        half = Fraction(1, 2)
        self.rho_real = Weight(
            tuple(
                sum((Fraction(r[i]) for r in self.real_pos), Fraction(0)) * half
                for i in range(n)
            )
        )
        dim = (
            Fraction(len(positive))
            - sum(1 for r in self.imag_pos if grading[r] == "n")
            - Fraction(len(self.complex_pos_theta_pos), 2)
        )
        if dim.denominator != 1:
            raise BlockError(f"orbit {orbit.id}: non-integer dimension {dim}")
        self.dim = int(dim)

    def canonical_mu2(self, bits: Sequence[int]) -> Tuple[int, ...]:
        return gf2_reduce_vector(bits, self.ident_basis)


# ---------------------------------------------------------------------------
# parameter enumeration and length formulas
# ---------------------------------------------------------------------------


def _twist_ok(rd: RootDatum, cache: _OrbitCache, lam: Weight) -> bool:
    """Whether lambda pairs integrally with every theta-fixed cocharacter."""
    return all(
        rd.pair(lam, v).denominator == 1 for v in cache.fixed_lattice
    )


def _valid_mu2(rd: RootDatum, cache: _OrbitCache, lam: Weight) -> List[Tuple[int, ...]]:
    """Canonical sign covectors of the parameters at (orbit, lam); [] if none."""
    if not _twist_ok(rd, cache, lam):
        return []
    n = rd.rank
    rows = [list(v) for v in cache.constraint_vectors]
    rhs = [int(rd.pair(lam, v)) % 2 for v in cache.fixed_lattice]
    if rows:
        particular = gf2_solve(rows, rhs)
        if particular is None:
            return []
        freedom = gf2_kernel(rows)
    else:
        particular = tuple(0 for _ in range(n))
        freedom = [tuple(1 if i == j else 0 for j in range(n)) for i in range(n)]
    seen = {}
    base = list(particular)
    # enumerate the affine solution space, collapsing identified covectors
    k = len(freedom)
    if k > 16:
        raise BlockError("sign-character solution space too large")
    for mask in range(1 << k):
        v = list(base)
        for i in range(k):
            if mask >> i & 1:
                v = [a ^ b for a, b in zip(v, freedom[i])]
        canon = cache.canonical_mu2(v)
        seen[canon] = True
    return sorted(seen)


def _lengths(
    rd: RootDatum, cache: _OrbitCache, lam: Weight, sign: SignCharacter
) -> Tuple[int, Fraction, Fraction, Fraction]:
    """(length, integral length, orientation number, Hodge shift)."""
    grading = cache.orbit.grading_map()
    positive = rd.positive_roots()
    n_pos = len(positive)
    integral = {r for r, c in positive if rd.pair(lam, c).denominator == 1}
    n_nci = sum(1 for r in cache.imag_pos if grading[r] == "n")
    ell = Fraction(n_pos) - n_nci - Fraction(len(cache.complex_pos_theta_pos), 2)
    if ell.denominator != 1:
        raise BlockError(f"orbit {cache.orbit.id}: non-integer length {ell}")
    ell_i = (
        Fraction(len(integral))
        - n_nci
        - Fraction(sum(1 for r in cache.complex_pos_theta_pos if r in integral), 2)
    )
    lam_rho = lam + cache.rho_real
    orient = Fraction(0)
    hodge = Fraction(0)
    for r, c in positive:
        st = cache.status[r]
        if st == "real" and r not in integral:
            floor_sign = -1 if rd.floor_pair(lam_rho, c) % 2 else 1
            eps = sign.eval_coroot(c)
            if floor_sign == eps:
                orient += 1
            hodge += Fraction(floor_sign * eps, 2)
        elif st == "complex" and r not in integral:
            if _mat_vec(cache.orbit.theta, r) not in {p for p, _ in positive}:
                orient += Fraction(1, 2)
    return int(ell), ell_i, orient, hodge


# ---------------------------------------------------------------------------
# Block
# ---------------------------------------------------------------------------


class Block:
    """A validated parameter graph over a root datum.

    Construction happens through the builders or through block_from_json;
    after validate() the object is treated as immutable.
    """

    def __init__(
        self,
        rd: RootDatum,
        group: str,
        base_lambda: Weight,
        twists: List[Weight],
        orbits: Dict[str, OrbitDatum],
        parameters: List[Parameter],
        edges: Dict[Tuple[str, int], EdgeRecord],
        dimH: int,
    ):
        self.rd = rd
        self.group = group
        self.base_lambda = base_lambda
        self.twists = twists
        self.orbits = orbits
        self.parameters = parameters
        self.edges = edges
        self.dimH = dimH
        self._caches = {oid: _OrbitCache(rd, o) for oid, o in orbits.items()}
        self._by_id = {p.id: p for p in parameters}
        self._by_key = {p.key(): p for p in parameters}
        self._twist_index = {w.key(): i for i, w in enumerate(twists)}
        self._pos_set = {r for r, _ in rd.positive_roots()}
        self._closure: Optional[Dict[str, FrozenSet[str]]] = None

    # -- basic lookups -----------------------------------------------------

    def param(self, pid: str) -> Parameter:
        return self._by_id[pid]

    def param_by_key(self, orbit: str, twist: int, mu2: Sequence[int]) -> Parameter:
        canon = self._caches[orbit].canonical_mu2(mu2)
        return self._by_key[(orbit, twist, canon)]

    def has_param(self, orbit: str, twist: int, mu2: Sequence[int]) -> bool:
        canon = self._caches[orbit].canonical_mu2(mu2)
        return (orbit, twist, canon) in self._by_key

    def twist_weight(self, index: int) -> Weight:
        return self.twists[index]

    def twist_index_of(self, w: Weight) -> int:
        key = w.key()
        if key not in self._twist_index:
            raise BlockError(f"twist {w} is not part of the block")
        return self._twist_index[key]

    def reflected_twist(self, i: int, root_index: int) -> int:
        return self.twist_index_of(self.rd.reflect(root_index, self.twists[i]))

    def params_at(self, twist: int) -> List[Parameter]:
        return [p for p in self.parameters if p.twist == twist]

    def edge(self, pid: str, root_index: int) -> EdgeRecord:
        return self.edges[(pid, root_index)]

    def orbit_cache(self, oid: str) -> _OrbitCache:
        return self._caches[oid]

    def orbit_dim(self, oid: str) -> int:
        return self._caches[oid].dim

    # -- per-parameter statistics (recomputed from data) --------------------

    def length(self, p: Parameter) -> int:
        return _lengths(self.rd, self._caches[p.orbit], self.twists[p.twist], p.sign)[0]

    def integral_length(self, p: Parameter) -> Fraction:
        return _lengths(self.rd, self._caches[p.orbit], self.twists[p.twist], p.sign)[1]

    def orientation_number(self, p: Parameter) -> Fraction:
        return _lengths(self.rd, self._caches[p.orbit], self.twists[p.twist], p.sign)[2]

    def hodge_shift(self, p: Parameter) -> Fraction:
        return _lengths(self.rd, self._caches[p.orbit], self.twists[p.twist], p.sign)[3]

    def nonintegral_positive_count(self, twist: int) -> int:
        lam = self.twists[twist]
        return sum(
            1 for _r, c in self.rd.positive_roots() if self.rd.pair(lam, c).denominator != 1
        )

    # -- root classification -------------------------------------------------

    def parity(self, p: Parameter, root_index: int) -> bool:
        """Whether the sign character matches the twist parity at a real
        integral simple root."""
        alpha = self.rd.simple_roots[root_index]
        acheck = self.rd.simple_coroots[root_index]
        orbit = self.orbits[p.orbit]
        if root_status(orbit, alpha) != "real":
            raise BlockError(f"root {root_index} is not real for orbit {p.orbit}")
        lam = self.twists[p.twist]
        val = self.rd.pair(lam, acheck)
        if val.denominator != 1:
            raise BlockError(f"root {root_index} is not integral at twist {p.twist}")
        lam_sign = -1 if int(val) % 2 else 1
        return p.sign.eval_coroot(acheck) == lam_sign

    def real_type(self, orbit_id: str, root_index: int) -> str:
        """Type "I" or "II" of a real simple root: type I when the root lies
        in the image of (theta - 1) on the character lattice."""
        orbit = self.orbits[orbit_id]
        alpha = self.rd.simple_roots[root_index]
        if root_status(orbit, alpha) != "real":
            raise BlockError(f"root {root_index} is not real for orbit {orbit_id}")
        n = self.rd.rank
        m = [[orbit.theta[i][j] - (1 if i == j else 0) for j in range(n)] for i in range(n)]
        return "I" if in_integer_image(m, alpha) else "II"

    def classify_root(self, orbit_id: str, root_index: int, twist: int, sign: SignCharacter) -> str:
        """The case label of (parameter, simple root); one of CASE_LABELS."""
        orbit = self.orbits[orbit_id]
        rd = self.rd
        alpha = rd.simple_roots[root_index]
        acheck = rd.simple_coroots[root_index]
        lam = self.twists[twist]
        status = root_status(orbit, alpha)
        integral = rd.pair(lam, acheck).denominator == 1
        if status == "imaginary":
            g = orbit.grading_map().get(tuple(alpha))
            if g is None:
                raise BlockError(f"orbit {orbit_id}: missing grading at root {root_index}")
            if not integral:
                raise BlockError(
                    f"orbit {orbit_id}: imaginary root {root_index} non-integral at a "
                    "twist carrying parameters"
                )
            if g == "c":
                return "ci"
            theta_up = _mat_mul(orbit.theta, _mat(rd.reflection_matrix(root_index)))
            n = rd.rank
            m = [[theta_up[i][j] - (1 if i == j else 0) for j in range(n)] for i in range(n)]
            return "nci-I" if in_integer_image(m, alpha) else "nci-II"
        if status == "complex":
            timg = _mat_vec(orbit.theta, alpha)
            ascent = timg in self._pos_set
            if integral:
                return "C+" if ascent else "C-"
            return "C+-nonint" if ascent else "C--nonint"
        # real
        if not integral:
            return "r-nonint"
        lam_sign = -1 if int(rd.pair(lam, acheck)) % 2 else 1
        if sign.eval_coroot(acheck) != lam_sign:
            return "r-nonparity"
        return f"r-{self.real_type(orbit_id, root_index)}"

    # -- moves ---------------------------------------------------------------

    def translate(self, p: Parameter, mu: Weight) -> Parameter:
        """Relabel a parameter along tensoring by the lattice weight mu."""
        if not mu.is_lattice():
            raise BlockError(f"translation weight {mu} is not a lattice weight")
        target = self.twists[p.twist] + mu
        key = target.key()
        if key not in self._twist_index:
            raise BlockError(f"translated twist {target} is not in the block")
        bits = tuple(
            (b + int(c)) % 2 for b, c in zip(p.sign.mu2, mu.coords)
        )
        return self.param_by_key(p.orbit, self._twist_index[key], bits)

    def translate_between(self, p: Parameter, target_twist: int) -> Parameter:
        diff = self.twists[target_twist] - self.twists[p.twist]
        return self.translate(p, diff)

    def cross_action(self, p: Parameter, root_index: int) -> Parameter:
        rec = self.edges[(p.id, root_index)]
        if rec.case not in ("C+", "C-", "C+-nonint", "C--nonint"):
            raise BlockError(
                f"cross action needs a complex root; ({p.id}, {root_index}) is {rec.case}"
            )
        return self._by_id[rec.targets[0]]

    def cayley(self, p: Parameter, root_index: int) -> List[Parameter]:
        rec = self.edges[(p.id, root_index)]
        if rec.case == "r-I":
            return [self._by_id[t] for t in rec.targets]
        if rec.case == "r-II":
            return [self._by_id[rec.targets[0]]]
        if rec.case == "nci-I":
            return [self._by_id[rec.targets[0]]]
        if rec.case == "nci-II":
            return [self._by_id[t] for t in rec.targets]
        raise BlockError(
            f"Cayley transform needs a parity real or noncompact imaginary root; "
            f"({p.id}, {root_index}) is {rec.case}"
        )

    # -- closure order ---------------------------------------------------------

    def _family_max(self) -> Dict[Tuple[str, int], str]:
        """Per (orbit, root): the largest orbit in that root's line family.

        Read off the edge records; the family maximum is the orbit itself for
        descents, compact and real roots, the cross image for complex
        ascents, and the Cayley image for noncompact imaginary roots.
        """
        m: Dict[Tuple[str, int], str] = {}
        for (pid, i), rec in self.edges.items():
            src = self._by_id[pid]
            if rec.case in ("C+", "C+-nonint"):
                top = self._by_id[rec.targets[0]].orbit
            elif rec.case in ("nci-I", "nci-II"):
                top = self._by_id[rec.targets[0]].orbit
            else:
                top = src.orbit
            key = (src.orbit, i)
            if key in m and m[key] != top:
                raise BlockError(
                    f"inconsistent line family at orbit {src.orbit}, root {i}"
                )
            m[key] = top
        return m

    def closure_below(self) -> Dict[str, FrozenSet[str]]:
        """Map orbit id -> set of orbit ids strictly below it in closure order.

        Generated from the move graph: every edge target on an orbit of
        smaller dimension is declared below the source orbit; the relation is
        then closed under transitivity and under monotonicity of the per-root
        family-maximum maps (if v < w then the family maxima of v and w along
        any root stay related).  Raises on a cycle.
        """
        if self._closure is not None:
            return self._closure
        below: Dict[str, set] = {oid: set() for oid in self.orbits}
        for (pid, _ri), rec in self.edges.items():
            src = self._by_id[pid]
            for tid in rec.targets:
                tgt = self._by_id[tid]
                ds, dt = self._caches[src.orbit].dim, self._caches[tgt.orbit].dim
                if dt < ds:
                    below[src.orbit].add(tgt.orbit)
                elif ds < dt:
                    below[tgt.orbit].add(src.orbit)
        fam = self._family_max()
        changed = True
        while changed:
            changed = False
            # transitive closure
            for oid in below:
                extra = set()
                for lower in below[oid]:
                    extra |= below[lower]
                if not extra <= below[oid]:
                    below[oid] |= extra
                    changed = True
            # monotone closure under the family-maximum maps
            for oid in list(below):
                for lower in list(below[oid]):
                    for i in range(self.rd.n_simple):
                        mv = fam.get((lower, i))
                        mw = fam.get((oid, i))
                        if mv is None or mw is None or mv == mw:
                            continue
                        dv, dw = self._caches[mv].dim, self._caches[mw].dim
                        if dv >= dw:
                            raise BlockError(
                                f"family maxima of {lower} < {oid} at root {i} "
                                "are not ordered; invalid block"
                            )
                        if mv not in below[mw]:
                            below[mw].add(mv)
                            changed = True
        for oid in below:
            if oid in below[oid]:
                raise BlockError(f"closure order has a cycle through orbit {oid}")
        self._closure = {oid: frozenset(s) for oid, s in below.items()}
        return self._closure

    def leq(self, a: Parameter, b: Parameter) -> bool:
        """Closure partial order on parameters (within a twist)."""
        if a.id == b.id:
            return True
        if a.twist != b.twist:
            return False
        return a.orbit in self.closure_below()[b.orbit]

    def sorted_params(self) -> List[Parameter]:
        """Canonical parameter order: twist, then length, then id."""
        return sorted(self.parameters, key=lambda p: (p.twist, p.ell, p.orbit, p.sign.mu2))


# ---------------------------------------------------------------------------
# construction engine
# ---------------------------------------------------------------------------


def _generate_twists(rd: RootDatum, lam: Weight, limit: int = 4096) -> List[Weight]:
    seen = {lam.key(): lam}
    frontier = [lam]
    while frontier:
        new = []
        for w in frontier:
            for i in range(rd.n_simple):
                r = rd.reflect(i, w)
                if r.key() not in seen:
                    seen[r.key()] = r
                    new.append(r)
        frontier = new
        if len(seen) > limit:
            raise BlockError("twist orbit exceeds the supported size")
    return [seen[k] for k in sorted(seen)]


def _param_id(orbit: str, twist: int, mu2: Sequence[int]) -> str:
    bits = "".join(str(b) for b in mu2)
    return f"{orbit}@{twist}:{bits}"


class _Builder:
    """Generates parameters and edges over a fixed orbit table."""

    def __init__(self, rd: RootDatum, group: str, orbits: List[OrbitDatum], lam: Weight):
        self.rd = rd
        self.group = group
        self.lam = lam
        self.orbit_list = sorted(orbits, key=lambda o: o.id)
        self.orbits = {o.id: o for o in self.orbit_list}
        if len(self.orbits) != len(orbits):
            raise BlockError("duplicate orbit ids")
        self.caches = {o.id: _OrbitCache(rd, o) for o in self.orbit_list}
        self.twists = _generate_twists(rd, lam)
        self.twist_index = {w.key(): i for i, w in enumerate(self.twists)}
        self.pos_set = {r for r, _ in rd.positive_roots()}

    def build(self) -> Block:
        raw_params: Dict[Tuple[str, int, Tuple[int, ...]], bool] = {}
        for ti in range(len(self.twists)):
            lam = self.twists[ti]
            for o in self.orbit_list:
                for mu2 in _valid_mu2(self.rd, self.caches[o.id], lam):
                    raw_params[(o.id, ti, mu2)] = True
        params: List[Parameter] = []
        for (oid, ti, mu2) in sorted(raw_params):
            sign = SignCharacter(mu2)
            ell, ell_i, ell_o, ell_h = _lengths(
                self.rd, self.caches[oid], self.twists[ti], sign
            )
            params.append(
                Parameter(
                    id=_param_id(oid, ti, mu2),
                    orbit=oid,
                    twist=ti,
                    sign=sign,
                    ell=ell,
                    ell_I=ell_i,
                    ell_o=ell_o,
                    ell_H=ell_h,
                )
            )
        block = Block(
            self.rd,
            self.group,
            self.lam,
            self.twists,
            self.orbits,
            params,
            edges={},
            dimH=self.rd.rank,
        )
        edges: Dict[Tuple[str, int], EdgeRecord] = {}
        for p in params:
            for i in range(self.rd.n_simple):
                edges[(p.id, i)] = self._edge_for(block, p, i)
        block.edges = edges
        return block

    # -- move target resolution ---------------------------------------------

    def _edge_for(self, block: Block, p: Parameter, i: int) -> EdgeRecord:
        case = block.classify_root(p.orbit, i, p.twist, p.sign)
        rd = self.rd
        target_twist = block.reflected_twist(p.twist, i)
        if case in ("ci", "r-nonparity"):
            return EdgeRecord(case, ())
        if case in ("C+", "C-", "C+-nonint", "C--nonint"):
            tgt = self._cross_target(block, p, i, target_twist)
            return EdgeRecord(case, (tgt.id,))
        if case == "r-nonint":
            alpha = rd.simple_roots[i]
            bits = rd.reflect_vector(i, p.sign.mu2)
            bits = tuple((int(b) + int(a)) % 2 for b, a in zip(bits, alpha))
            tgt = block.param_by_key(p.orbit, target_twist, bits)
            return EdgeRecord(case, (tgt.id,))
        if case in ("r-I", "r-II"):
            downs = self._cayley_down_targets(block, p, i, target_twist)
            if case == "r-I":
                if len(downs) != 2:
                    raise BlockError(
                        f"type I real root {i} at {p.id}: expected 2 Cayley images, "
                        f"found {[d.id for d in downs]}"
                    )
                return EdgeRecord(case, tuple(d.id for d in downs))
            if len(downs) != 1:
                raise BlockError(
                    f"type II real root {i} at {p.id}: expected 1 Cayley image, "
                    f"found {[d.id for d in downs]}"
                )
            partner = self._real_ii_partner(block, p, i, downs[0])
            return EdgeRecord(case, (downs[0].id, partner.id))
        if case in ("nci-I", "nci-II"):
            ups = self._cayley_up_targets(block, p, i, target_twist)
            if case == "nci-II":
                if len(ups) != 2:
                    raise BlockError(
                        f"type II noncompact root {i} at {p.id}: expected 2 Cayley "
                        f"images, found {[x.id for x in ups]}"
                    )
                return EdgeRecord(case, tuple(x.id for x in ups))
            if len(ups) != 1:
                raise BlockError(
                    f"type I noncompact root {i} at {p.id}: expected 1 Cayley image, "
                    f"found {[x.id for x in ups]}"
                )
            up = ups[0]
            downs = self._cayley_down_targets(block, up, i, p.twist)
            others = [d for d in downs if d.id != p.id]
            if len(downs) != 2 or len(others) != 1:
                raise BlockError(
                    f"type I noncompact root {i} at {p.id}: cross partner not resolved"
                )
            return EdgeRecord(case, (up.id, others[0].id))
        raise BlockError(f"unhandled case label {case}")

    def _cross_target(self, block: Block, p: Parameter, i: int, target_twist: int) -> Parameter:
        rd = self.rd
        s = _mat(rd.reflection_matrix(i))
        theta_new = _mat_mul(s, _mat_mul(self.orbits[p.orbit].theta, s))
        src_grading = self.orbits[p.orbit].grading_map()
        grading_new = {}
        for r in self._imag_pos_of(theta_new):
            pre = _mat_vec(s, r)
            if pre not in self.pos_set:
                pre = tuple(-x for x in pre)
            grading_new[r] = src_grading[pre]
        oid = self._match_orbit(theta_new, grading_new, exact=True)
        bits = rd.reflect_vector(i, p.sign.mu2)
        return block.param_by_key(oid, target_twist, bits)

    def _imag_pos_of(self, theta: Matrix) -> List[Tuple[int, ...]]:
        return [r for r in self.pos_set if _mat_vec(theta, r) == r]

    def _match_orbit(self, theta: Matrix, grading: Dict, exact: bool) -> str:
        hits = []
        for o in self.orbit_list:
            if o.theta != theta:
                continue
            g = o.grading_map()
            if exact:
                if g == grading:
                    hits.append(o.id)
            else:
                if all(g.get(k) == v for k, v in grading.items()):
                    hits.append(o.id)
        if len(hits) != 1:
            raise BlockError(
                f"orbit resolution failed: {len(hits)} orbits match theta/grading"
            )
        return hits[0]

    def _cayley_candidate_orbits(self, src_orbit: str, i: int) -> List[str]:
        """Orbits that can sit at the other end of a Cayley move along root i.

        The target involution is theta * s_i; the moved root must be graded
        noncompact there if imaginary, and gradings must agree on roots
        imaginary on both sides.
        """
        rd = self.rd
        s = _mat(rd.reflection_matrix(i))
        theta_src = self.orbits[src_orbit].theta
        theta_new = _mat_mul(theta_src, s)
        alpha = tuple(rd.simple_roots[i])
        src_grading = self.orbits[src_orbit].grading_map()
        out = []
        for o in self.orbit_list:
            if o.theta != theta_new:
                continue
            g = o.grading_map()
            if alpha in g and g[alpha] != "n":
                continue
            shared_ok = True
            for r, v in g.items():
                if r in src_grading and src_grading[r] != v:
                    shared_ok = False
                    break
            if shared_ok:
                out.append(o.id)
        return out

    def _signs_match_across_cayley(
        self, orbit_a: str, orbit_b: str, i: int, mu2_a, mu2_b
    ) -> bool:
        """Whether two sign covectors restrict to the same character of the
        subgroup shared by the two ends of a Cayley move along root i.

        The shared two-torsion is cut out by cocharacters fixed mod 2 by both
        involutions and pairing evenly with the moved root.
        """
        alpha = self.rd.simple_roots[i]
        span_a = _gf2_span(self.caches[orbit_a].k2_basis)
        span_b = _gf2_span(self.caches[orbit_b].k2_basis)
        diff = tuple((int(x) - int(y)) % 2 for x, y in zip(mu2_a, mu2_b))
        for v in span_a & span_b:
            if sum(int(a) * b for a, b in zip(alpha, v)) % 2:
                continue
            if sum(d * b for d, b in zip(diff, v)) % 2:
                return False
        return True

    def _cayley_down_targets(
        self, block: Block, p: Parameter, i: int, target_twist: int
    ) -> List[Parameter]:
        lam = self.twists[target_twist]
        out = []
        for oid in self._cayley_candidate_orbits(p.orbit, i):
            for mu2 in _valid_mu2(self.rd, self.caches[oid], lam):
                if not self._signs_match_across_cayley(p.orbit, oid, i, p.sign.mu2, mu2):
                    continue
                cand = block.param_by_key(oid, target_twist, mu2)
                if cand.ell == p.ell - 1:
                    out.append(cand)
        return sorted(out, key=lambda q: q.id)

    def _cayley_up_targets(
        self, block: Block, p: Parameter, i: int, target_twist: int
    ) -> List[Parameter]:
        lam = self.twists[target_twist]
        out = []
        for oid in self._cayley_candidate_orbits(p.orbit, i):
            for mu2 in _valid_mu2(self.rd, self.caches[oid], lam):
                if not self._signs_match_across_cayley(p.orbit, oid, i, p.sign.mu2, mu2):
                    continue
                cand = block.param_by_key(oid, target_twist, mu2)
                if cand.ell == p.ell + 1:
                    out.append(cand)
        return sorted(out, key=lambda q: q.id)

    def _real_ii_partner(self, block: Block, p: Parameter, i: int, down: Parameter) -> Parameter:
        ups = self._cayley_up_targets(block, down, i, p.twist)
        others = [q for q in ups if q.id != p.id]
        if len(ups) != 2 or len(others) != 1:
            raise BlockError(
                f"type II real root {i} at {p.id}: partner not resolved"
            )
        return others[0]


def build_group(
    rd: RootDatum,
    group: str,
    orbits: List[OrbitDatum],
    lam: Weight,
) -> Block:
    """Assemble and validate a block over an explicit orbit table."""
    block = _Builder(rd, group, orbits, lam).build()
    validate(block)
    return block


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------


def _sl2r_orbits(rd: RootDatum) -> List[OrbitDatum]:
    alpha = tuple(rd.simple_roots[0])
    return [
        OrbitDatum.make("c0", [[1]], {alpha: "n"}, rd.rank),
        OrbitDatum.make("cinf", [[1]], {alpha: "n"}, rd.rank),
        OrbitDatum.make("open", [[-1]], {}, rd.rank),
    ]


def build_sl2r(lam) -> Block:
    """Block of the rank-one split form: two closed orbits and one open orbit."""
    rd = builtin_root_datum("SL2")
    w = Weight.make([lam]) if not isinstance(lam, Weight) else lam
    return build_group(rd, "sl2r", _sl2r_orbits(rd), w)


def build_pgl2r(lam) -> Block:
    """Block of the adjoint rank-one split form.

    The root is primitive in the character lattice, so its real type is II:
    one closed orbit (a two-point set) and an open orbit carrying two
    characters that are Cayley partners of each other.
    """
    rd = builtin_root_datum("PGL2")
    alpha = tuple(rd.simple_roots[0])
    orbits = [
        OrbitDatum.make("closed", [[1]], {alpha: "n"}, rd.rank),
        OrbitDatum.make("open", [[-1]], {}, rd.rank),
    ]
    w = Weight.make([lam]) if not isinstance(lam, Weight) else lam
    return build_group(rd, "pgl2r", orbits, w)


def _complex_orbits(rd_single: RootDatum, rd_double: RootDatum) -> List[OrbitDatum]:
    """Orbit table of a complexified group: one orbit per Weyl element."""
    n = rd_single.rank
    words = {_identity(n): ""}
    queue = [_identity(n)]
    while queue:
        new = []
        for m in queue:
            for i in range(rd_single.n_simple):
                s = _mat(rd_single.reflection_matrix(i))
                prod = _mat_mul(s, m)
                if prod not in words:
                    words[prod] = f"s{i}." + words[m] if words[m] else f"s{i}"
                    new.append(prod)
        queue = new
    orbits = []
    for m, word in sorted(words.items(), key=lambda kv: (len(kv[1]), kv[1])):
        minv = next(mm for mm in words if _mat_mul(mm, m) == _identity(n))
        theta = []
        for r in range(2 * n):
            row = []
            for c in range(2 * n):
                if r < n and c >= n:
                    row.append(m[r][c - n])
                elif r >= n and c < n:
                    row.append(minv[r - n][c])
                else:
                    row.append(0)
            theta.append(row)
        oid = "w." + (word if word else "e")
        orbits.append(OrbitDatum.make(oid, theta, {}, rd_double.rank))
    return orbits


def build_complex_group(rd_or_name, lam) -> Block:
    """Block of a complex reductive group viewed as a real group.

    The underlying datum is the double G x G with the factor-swapping family
    of involutions; orbits correspond to Weyl group elements.  The base twist
    is (lambda, -lambda).
    """
    rd_single = (
        builtin_root_datum(rd_or_name) if isinstance(rd_or_name, str) else rd_or_name
    )
    rd = double_datum(rd_single)
    lam_w = Weight.make(lam) if not isinstance(lam, Weight) else lam
    if len(lam_w.coords) != rd_single.rank:
        raise BlockError(
            f"lambda for a complex group has rank {rd_single.rank}, got {len(lam_w.coords)}"
        )
    base = Weight(tuple(lam_w.coords) + tuple(-c for c in lam_w.coords))
    name = rd_single.name.lower() if rd_single.name else "complex"
    return build_group(rd, f"complex:{name}", _complex_orbits(rd_single, rd), base)


def build_sl2c(lam) -> Block:
    """The complexification of the rank-one group (two orbits, classical case)."""
    rd_single = builtin_root_datum("SL2")
    rd = double_datum(rd_single)
    lam_w = Weight.make([lam]) if not isinstance(lam, Weight) else lam
    base = Weight(tuple(lam_w.coords) + tuple(-c for c in lam_w.coords))
    return build_group(rd, "sl2c", _complex_orbits(rd_single, rd), base)


def _su21_orbits(rd: RootDatum) -> List[OrbitDatum]:
    a1 = tuple(rd.simple_roots[0])
    a2 = tuple(rd.simple_roots[1])
    a12 = tuple(x + y for x, y in zip(a1, a2))
    ident = [[1, 0], [0, 1]]
    s1 = rd.reflection_matrix(0)
    s2 = rd.reflection_matrix(1)
    s12 = [[0, -1], [-1, 0]]  # reflection in a1 + a2
    return [
        OrbitDatum.make("cA", ident, {a1: "c", a2: "n", a12: "n"}, rd.rank),
        OrbitDatum.make("cB", ident, {a1: "n", a2: "n", a12: "c"}, rd.rank),
        OrbitDatum.make("cC", ident, {a1: "n", a2: "c", a12: "n"}, rd.rank),
        OrbitDatum.make("m1", s1, {}, rd.rank),
        OrbitDatum.make("m2", s2, {}, rd.rank),
        OrbitDatum.make("open", s12, {}, rd.rank),
    ]


def build_su21(lam) -> Block:
    """Block of the rank-two unitary form: three closed orbits, two middle
    orbits with a real simple root, and the open orbit."""
    rd = builtin_root_datum("SL3")
    w = Weight.make(lam) if not isinstance(lam, Weight) else lam
    if len(w.coords) != 2:
        raise BlockError("su21 needs a rank-2 lambda")
    return build_group(rd, "su21", _su21_orbits(rd), w)


def block_product(b1: Block, b2: Block, group: str) -> Block:
    """Product of two blocks on the direct-sum root datum.

    Orbits, twists, parameters and sign covectors are pairs; a simple root of
    one factor moves the corresponding components and fixes the other factor.
    Products are assembled directly (not through the orbit-table resolver)
    because distinct sibling orbits with identical involution data, such as
    the two closed orbits of the rank-one split form, cannot be told apart by
    table lookup once they appear as a passive factor.
    """
    rd1, rd2 = b1.rd, b2.rd
    n1, n2 = rd1.rank, rd2.rank
    roots = [list(r) + [0] * n2 for r in rd1.simple_roots] + [
        [0] * n1 + list(r) for r in rd2.simple_roots
    ]
    coroots = [list(c) + [0] * n2 for c in rd1.simple_coroots] + [
        [0] * n1 + list(c) for c in rd2.simple_coroots
    ]
    rd = RootDatum(roots, coroots, name=f"{rd1.name}x{rd2.name}")
    orbits: Dict[str, OrbitDatum] = {}
    for o1 in b1.orbits.values():
        for o2 in b2.orbits.values():
            theta = [
                [o1.theta[i][j] if j < n1 else 0 for j in range(n1 + n2)]
                if i < n1
                else [0] * n1 + list(o2.theta[i - n1])
                for i in range(n1 + n2)
            ]
            grading = {}
            for r, g in o1.grading:
                grading[tuple(r) + (0,) * n2] = g
            for r, g in o2.grading:
                grading[(0,) * n1 + tuple(r)] = g
            orbits[f"{o1.id}*{o2.id}"] = OrbitDatum.make(
                f"{o1.id}*{o2.id}", theta, grading, rd.rank
            )
    twists: List[Weight] = []
    twist_of: Dict[Tuple[int, int], int] = {}
    pairs = sorted(
        ((w1.key() + w2.key(), i, j)
         for i, w1 in enumerate(b1.twists)
         for j, w2 in enumerate(b2.twists))
    )
    for key, i, j in pairs:
        twist_of[(i, j)] = len(twists)
        twists.append(Weight.make(key))
    caches = {oid: _OrbitCache(rd, o) for oid, o in orbits.items()}

    def product_pid(p1: Parameter, p2: Parameter) -> Tuple[str, int, Tuple[int, ...]]:
        oid = f"{p1.orbit}*{p2.orbit}"
        ti = twist_of[(p1.twist, p2.twist)]
        mu2 = tuple(p1.sign.mu2) + tuple(p2.sign.mu2)
        return oid, ti, mu2

    params: List[Parameter] = []
    id_of: Dict[Tuple[str, str], str] = {}
    for p1 in b1.parameters:
        for p2 in b2.parameters:
            oid, ti, mu2 = product_pid(p1, p2)
            sign = SignCharacter(caches[oid].canonical_mu2(mu2))
            pid = _param_id(oid, ti, sign.mu2)
            id_of[(p1.id, p2.id)] = pid
            ell, ell_i, ell_o, ell_h = _lengths(rd, caches[oid], twists[ti], sign)
            params.append(Parameter(pid, oid, ti, sign, ell, ell_i, ell_o, ell_h))
    params.sort(key=lambda p: p.id)
    edges: Dict[Tuple[str, int], EdgeRecord] = {}
    for p1 in b1.parameters:
        for p2 in b2.parameters:
            pid = id_of[(p1.id, p2.id)]
            for i in range(rd1.n_simple):
                rec = b1.edges[(p1.id, i)]
                targets = tuple(
                    id_of[(t, p2.id)] for t in rec.targets
                )
                edges[(pid, i)] = EdgeRecord(rec.case, targets)
            for j in range(rd2.n_simple):
                rec = b2.edges[(p2.id, j)]
                targets = tuple(
                    id_of[(p1.id, t)] for t in rec.targets
                )
                edges[(pid, rd1.n_simple + j)] = EdgeRecord(rec.case, targets)
    base = Weight(tuple(b1.base_lambda.coords) + tuple(b2.base_lambda.coords))
    block = Block(rd, group, base, twists, orbits, params, edges, rd.rank)
    validate(block)
    return block


def build_sl2r_x_sl2r(lam1, lam2) -> Block:
    """Product of two rank-one split blocks on the rank-two datum.

    This is the minimal group with two orthogonal real roots, so mixed
    integral/non-integral twists exercise the Hodge-shift bookkeeping of the
    real Cayley cases nontrivially.
    """
    return block_product(build_sl2r(lam1), build_sl2r(lam2), "sl2rxsl2r")


BUILDERS = {
    "sl2r": lambda coords: build_sl2r(coords[0]),
    "pgl2r": lambda coords: build_pgl2r(coords[0]),
    "sl2c": lambda coords: build_sl2c(coords[0]),
    "su21": lambda coords: build_su21(coords),
    "sl2rxsl2r": lambda coords: build_sl2r_x_sl2r(coords[0], coords[1]),
}


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


def validate(block: Block, raise_on_failure: bool = True) -> List[str]:
    """Check every structural invariant; returns the list of violations."""
    v: List[str] = []
    rd = block.rd
    n = rd.rank
    ident = _identity(n)
    pos = rd.positive_roots()
    pos_set = {r for r, _ in pos}
    # orbit data
    for oid, o in sorted(block.orbits.items()):
        if _mat_mul(o.theta, o.theta) != ident:
            v.append(f"orbit {oid}: theta is not an involution")
            continue
        for r, _c in pos:
            img = _mat_vec(o.theta, r)
            if img not in pos_set and tuple(-x for x in img) not in pos_set:
                v.append(f"orbit {oid}: theta does not permute the roots (image of {r})")
        imag = {r for r, _ in pos if _mat_vec(o.theta, r) == r}
        if set(o.grading_map()) != imag:
            v.append(f"orbit {oid}: grading support differs from positive imaginary roots")
    # parameters
    key_seen = {}
    for p in block.parameters:
        cache = block.orbit_cache(p.orbit)
        lam = block.twists[p.twist]
        if cache.canonical_mu2(p.sign.mu2) != p.sign.mu2:
            v.append(f"param {p.id}: sign covector is not in canonical form")
        valid = _valid_mu2(rd, cache, lam)
        if p.sign.mu2 not in valid:
            v.append(f"param {p.id}: sign character violates the twist constraints")
        if p.key() in key_seen:
            v.append(f"param {p.id}: duplicate (orbit, twist, sign)")
        key_seen[p.key()] = True
        ell, ell_i, ell_o, ell_h = _lengths(rd, cache, lam, p.sign)
        if (p.ell, p.ell_I, p.ell_o, p.ell_H) != (ell, ell_i, ell_o, ell_h):
            v.append(f"param {p.id}: cached lengths disagree with recomputation")
        nonint = block.nonintegral_positive_count(p.twist)
        if ell_h != ell_o + ell_i - ell + Fraction(nonint, 2):
            v.append(f"param {p.id}: length statistics violate the four-term identity")
    # completeness of the parameter list
    for ti in range(len(block.twists)):
        lam = block.twists[ti]
        for oid in block.orbits:
            for mu2 in _valid_mu2(rd, block.orbit_cache(oid), lam):
                if (oid, ti, mu2) not in key_seen:
                    v.append(f"missing parameter at orbit {oid}, twist {ti}, sign {mu2}")
    # edges
    by_id = {p.id: p for p in block.parameters}
    for p in block.parameters:
        for i in range(rd.n_simple):
            if (p.id, i) not in block.edges:
                v.append(f"param {p.id}: missing edge for root {i}")
    for (pid, i), rec in sorted(block.edges.items()):
        if pid not in by_id:
            v.append(f"edge ({pid}, {i}): unknown parameter")
            continue
        p = by_id[pid]
        if rec.case not in CASE_LABELS:
            v.append(f"edge ({pid}, {i}): unknown case {rec.case}")
            continue
        try:
            expected = block.classify_root(p.orbit, i, p.twist, p.sign)
        except BlockError as e:
            v.append(f"edge ({pid}, {i}): classification failed: {e}")
            continue
        if rec.case != expected:
            v.append(f"edge ({pid}, {i}): case {rec.case} but classification {expected}")
            continue
        if len(rec.targets) != CASE_ARITY[rec.case]:
            v.append(f"edge ({pid}, {i}): case {rec.case} needs {CASE_ARITY[rec.case]} targets")
            continue
        if any(t not in by_id for t in rec.targets):
            v.append(f"edge ({pid}, {i}): unknown target id")
            continue
        tw = block.reflected_twist(p.twist, i)
        tgts = [by_id[t] for t in rec.targets]
        if rec.case in ("C+", "C-", "C+-nonint", "C--nonint", "r-nonint"):
            t = tgts[0]
            if t.twist != tw:
                v.append(f"edge ({pid}, {i}): target twist mismatch")
            back = block.edges.get((t.id, i))
            if not back or back.targets[:1] != (p.id,):
                v.append(f"edge ({pid}, {i}): move is not involutive")
            dl = {"C+": 1, "C-": -1, "C+-nonint": 1, "C--nonint": -1, "r-nonint": 0}[rec.case]
            if t.ell != p.ell + dl:
                v.append(f"edge ({pid}, {i}): length change {t.ell - p.ell}, expected {dl}")
        elif rec.case == "r-I":
            a, b = tgts
            if a.id == b.id or a.orbit == b.orbit:
                v.append(f"edge ({pid}, {i}): type I images must be on distinct orbits")
            for t in tgts:
                if t.twist != tw or t.ell != p.ell - 1:
                    v.append(f"edge ({pid}, {i}): bad Cayley image {t.id}")
                back = block.edges.get((t.id, i))
                if not back or back.case != "nci-I" or back.targets[0] != p.id:
                    v.append(f"edge ({pid}, {i}): image {t.id} does not point back")
        elif rec.case == "r-II":
            down, partner = tgts
            if down.twist != tw or down.ell != p.ell - 1:
                v.append(f"edge ({pid}, {i}): bad Cayley image {down.id}")
            if partner.orbit != p.orbit or partner.twist != p.twist or partner.id == p.id:
                v.append(f"edge ({pid}, {i}): bad type II partner {partner.id}")
            back = block.edges.get((down.id, i))
            if not back or back.case != "nci-II" or p.id not in back.targets:
                v.append(f"edge ({pid}, {i}): image {down.id} does not point back")
            pe = block.edges.get((partner.id, i))
            if not pe or pe.case != "r-II" or pe.targets != (down.id, p.id):
                v.append(f"edge ({pid}, {i}): partner edge inconsistent")
        elif rec.case == "nci-I":
            up, cross = tgts
            if up.twist != tw or up.ell != p.ell + 1:
                v.append(f"edge ({pid}, {i}): bad Cayley image {up.id}")
            if cross.twist != p.twist or cross.orbit == p.orbit or cross.ell != p.ell:
                v.append(f"edge ({pid}, {i}): bad type I cross partner {cross.id}")
            back = block.edges.get((up.id, i))
            if not back or back.case != "r-I" or set(back.targets) != {p.id, cross.id}:
                v.append(f"edge ({pid}, {i}): up edge of {up.id} inconsistent")
        elif rec.case == "nci-II":
            u1, u2 = tgts
            if u1.id == u2.id:
                v.append(f"edge ({pid}, {i}): type II images must be distinct characters")
            for t in tgts:
                if t.twist != tw or t.ell != p.ell + 1:
                    v.append(f"edge ({pid}, {i}): bad Cayley image {t.id}")
                back = block.edges.get((t.id, i))
                if not back or back.case != "r-II" or back.targets[0] != p.id:
                    v.append(f"edge ({pid}, {i}): image {t.id} does not point back")
            if u1.orbit != u2.orbit:
                v.append(f"edge ({pid}, {i}): type II images must share an orbit")
    # closure order must be acyclic and length-monotone
    try:
        below = block.closure_below()
        for oid, lower in below.items():
            for l in lower:
                if block.orbit_dim(l) >= block.orbit_dim(oid):
                    v.append(f"closure order violates dimensions: {l} < {oid}")
    except BlockError as e:
        v.append(str(e))
    if v and raise_on_failure:
        raise ValidationFailure(v)
    return v


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def _frac_str(f: Fraction) -> str:
    return str(f)


def _weight_json(w: Weight) -> List[str]:
    return [_frac_str(c) for c in w.coords]


def _weight_from_json(vals: Sequence[str]) -> Weight:
    return Weight.make([Fraction(v) for v in vals])


def block_to_json(block: Block) -> dict:
    orbits = []
    for oid in sorted(block.orbits):
        o = block.orbits[oid]
        orbits.append(
            {
                "id": oid,
                "theta": [list(r) for r in o.theta],
                "grading": [
                    {"root": list(r), "g": g} for r, g in o.grading
                ],
            }
        )
    params = []
    for p in sorted(block.parameters, key=lambda q: q.id):
        params.append(
            {
                "id": p.id,
                "orbit": p.orbit,
                "twist": p.twist,
                "mu2": p.sign.bits(),
            }
        )
    edges = []
    for (pid, i) in sorted(block.edges):
        rec = block.edges[(pid, i)]
        edges.append(
            {
                "param": pid,
                "root": i,
                "case": rec.case,
                "targets": list(rec.targets),
            }
        )
    return {
        "version": 1,
        "group": block.group,
        "root_datum": block.rd.to_json(),
        "base_lambda": _weight_json(block.base_lambda),
        "dimH": block.dimH,
        "twists": [_weight_json(w) for w in block.twists],
        "orbits": orbits,
        "parameters": params,
        "edges": edges,
    }


class SchemaError(Exception):
    """Raised when a block file does not match the expected JSON shape."""


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise SchemaError(msg)


def block_from_json(data: dict) -> Block:
    _require(isinstance(data, dict), "top level must be an object")
    _require(data.get("version") == 1, "unsupported or missing version")
    for field in ("root_datum", "base_lambda", "dimH", "twists", "orbits", "parameters", "edges"):
        _require(field in data, f"missing field {field}")
    rdj = data["root_datum"]
    _require(
        isinstance(rdj, dict) and "simple_roots" in rdj and "simple_coroots" in rdj,
        "root_datum must carry simple_roots and simple_coroots",
    )
    try:
        rd = RootDatum.from_json(rdj)
    except (ValueError, KeyError, TypeError) as e:
        raise SchemaError(f"bad root datum: {e}") from None
    try:
        base = _weight_from_json(data["base_lambda"])
        twists = [_weight_from_json(t) for t in data["twists"]]
    except (ValueError, TypeError) as e:
        raise SchemaError(f"bad weight: {e}") from None
    dimH = data["dimH"]
    _require(isinstance(dimH, int) and dimH >= 0, "dimH must be a nonnegative integer")
    orbits = {}
    _require(isinstance(data["orbits"], list), "orbits must be a list")
    for oj in data["orbits"]:
        _require(
            isinstance(oj, dict) and {"id", "theta", "grading"} <= set(oj),
            "orbit entries need id, theta, grading",
        )
        grading = {}
        for gj in oj["grading"]:
            _require(
                isinstance(gj, dict) and "root" in gj and gj.get("g") in ("c", "n"),
                "grading entries need root and g in {c, n}",
            )
            grading[tuple(int(x) for x in gj["root"])] = gj["g"]
        try:
            orbits[oj["id"]] = OrbitDatum.make(oj["id"], oj["theta"], grading, dimH)
        except (ValueError, TypeError) as e:
            raise SchemaError(f"bad orbit {oj.get('id')}: {e}") from None
    params = []
    _require(isinstance(data["parameters"], list), "parameters must be a list")
    twist_count = len(twists)
    for pj in data["parameters"]:
        _require(
            isinstance(pj, dict) and {"id", "orbit", "twist", "mu2"} <= set(pj),
            "parameter entries need id, orbit, twist, mu2",
        )
        _require(pj["orbit"] in orbits, f"parameter {pj['id']}: unknown orbit")
        _require(
            isinstance(pj["twist"], int) and 0 <= pj["twist"] < twist_count,
            f"parameter {pj['id']}: twist out of range",
        )
        _require(
            isinstance(pj["mu2"], str) and set(pj["mu2"]) <= {"0", "1"},
            f"parameter {pj['id']}: mu2 must be a bit string",
        )
        bits = tuple(int(b) for b in pj["mu2"])
        _require(len(bits) == rd.rank, f"parameter {pj['id']}: mu2 has wrong length")
        sign = SignCharacter(bits)
        cache = _OrbitCache(rd, orbits[pj["orbit"]])
        ell, ell_i, ell_o, ell_h = _lengths(rd, cache, twists[pj["twist"]], sign)
        params.append(
            Parameter(pj["id"], pj["orbit"], pj["twist"], sign, ell, ell_i, ell_o, ell_h)
        )
    ids = {p.id for p in params}
    _require(len(ids) == len(params), "duplicate parameter ids")
    edges = {}
    _require(isinstance(data["edges"], list), "edges must be a list")
    for ej in data["edges"]:
        _require(
            isinstance(ej, dict) and {"param", "root", "case", "targets"} <= set(ej),
            "edge entries need param, root, case, targets",
        )
        _require(ej["param"] in ids, f"edge for unknown parameter {ej['param']}")
        _require(
            isinstance(ej["root"], int) and 0 <= ej["root"] < rd.n_simple,
            "edge root index out of range",
        )
        _require(ej["case"] in CASE_LABELS, f"unknown case label {ej['case']}")
        _require(
            isinstance(ej["targets"], list) and all(t in ids for t in ej["targets"]),
            f"edge ({ej['param']}, {ej['root']}): bad target list",
        )
        key = (ej["param"], ej["root"])
        _require(key not in edges, f"duplicate edge {key}")
        edges[key] = EdgeRecord(ej["case"], tuple(ej["targets"]))
    return Block(
        rd,
        data.get("group", ""),
        base,
        twists,
        orbits,
        params,
        edges,
        dimH,
    )


def save_block(block: Block, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(block_to_json(block), fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_block(path: str) -> Block:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as e:
            raise SchemaError(f"not valid JSON: {e}") from None
    return block_from_json(data)
