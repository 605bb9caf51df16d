"""Hecke operators on the free module spanned by standard classes.

For each simple root the operator maps the span of the standard basis at one
twist to the span at the reflected twist.  Its matrix is assembled from the
block's edge records according to the case label of each (parameter, root)
pair; coefficients live in the two-variable quarter-exponent Laurent ring,
with u = t1*t2.

The module also provides the normalized matrices used by the duality and
Kazhdan-Lusztig layers: conjugating by the diagonal monomials

    u^((ellI - ell - dimH)/2) * (t1 t2^(-1))^(ellH / 2)

per basis vector must land every entry in Z[u^(1/2), u^(-1/2)]; this exact
integrality is one of the engine's acceptance checks.

Operator matrices are cached per (root, twist) after first use; the cache is
filled under a lock and read-only afterwards.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .block import Block, BlockError, Parameter
from .poly import QuarterLaurent, SignedULaurent

__all__ = ["HeckeElement", "HeckeContext", "RelationReport", "check_relations"]

QL = QuarterLaurent

ColumnMatrix = Dict[str, Dict[str, QuarterLaurent]]  # column pid -> row pid -> coeff


@dataclass(frozen=True)
class HeckeElement:
    """Finite formal sum of parameters at one twist with Laurent coefficients."""

    twist: int
    coeffs: Tuple[Tuple[str, QuarterLaurent], ...]

    @classmethod
    def make(cls, twist: int, coeffs: Dict[str, QuarterLaurent]) -> "HeckeElement":
        items = tuple(sorted((k, v) for k, v in coeffs.items() if not v.is_zero()))
        return cls(twist, items)

    @classmethod
    def basis(cls, block: Block, pid: str) -> "HeckeElement":
        return cls.make(block.param(pid).twist, {pid: QL.one()})

    def as_dict(self) -> Dict[str, QuarterLaurent]:
        return dict(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "HeckeElement") -> "HeckeElement":
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if self.twist != other.twist:
            raise BlockError("cannot add elements at different twists")
        out = self.as_dict()
        for k, v in other.coeffs:
            s = out.get(k, QL.zero()) + v
            if s.is_zero():
                out.pop(k, None)
            else:
                out[k] = s
        return HeckeElement.make(self.twist, out)

    def scale(self, c: QuarterLaurent) -> "HeckeElement":
        return HeckeElement.make(self.twist, {k: v * c for k, v in self.coeffs})


@dataclass
class RelationCheck:
    kind: str  # "quadratic" or "braid"
    roots: Tuple[int, ...]
    twist: int
    param: str
    ok: bool
    difference: Dict[str, QuarterLaurent] = field(default_factory=dict)


@dataclass
class RelationReport:
    checks: List[RelationCheck]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failures(self) -> List[RelationCheck]:
        return [c for c in self.checks if not c.ok]


class HeckeContext:
    """Cached Hecke operator matrices for one validated block."""

    def __init__(self, block: Block):
        self.block = block
        self._lock = threading.Lock()
        self._matrices: Dict[Tuple[int, int], ColumnMatrix] = {}
        self._normalized: Dict[Tuple[int, int], Dict[str, Dict[str, SignedULaurent]]] = {}

    # -- diagonal normalization --------------------------------------------

    def weight_factor(self, p: Parameter) -> QuarterLaurent:
        """Monomial u^((ellI - ell - dimH)/2) (t1/t2)^(ellH/2) for one parameter."""
        ue = Fraction(p.ell_I - p.ell - self.block.dimH, 2)
        he = Fraction(p.ell_H, 2)
        return QL.u_power(ue) * QL.t1_over_t2_power(he)

    def _factor_parts(self, p: Parameter) -> Tuple[int, int]:
        f = self.weight_factor(p)
        ((p4, q4), c) = next(iter(f.terms.items()))
        if c != 1:
            raise BlockError("weight factor must be a unit monomial")
        return p4, q4

    # -- matrices ------------------------------------------------------------

    def matrix(self, root: int, twist: int) -> ColumnMatrix:
        """Operator matrix for one simple root at one input twist.

        Columns are indexed by parameters at the input twist, rows by
        parameters at the reflected twist.
        """
        key = (root, twist)
        with self._lock:
            if key in self._matrices:
                return self._matrices[key]
        cols = self._build_matrix(root, twist)
        with self._lock:
            self._matrices.setdefault(key, cols)
            return self._matrices[key]

    def _build_matrix(self, root: int, twist: int) -> ColumnMatrix:
        block = self.block
        rd = block.rd
        out_twist = block.reflected_twist(twist, root)
        u = QL.u()
        one = QL.one()
        cols: ColumnMatrix = {}
        for p in block.params_at(twist):
            rec = block.edge(p.id, root)
            col: Dict[str, QuarterLaurent] = {}

            def put(pid: str, c: QuarterLaurent) -> None:
                s = col.get(pid, QL.zero()) + c
                if s.is_zero():
                    col.pop(pid, None)
                else:
                    col[pid] = s

            tbar = lambda q: block.translate_between(q, out_twist).id
            case = rec.case
            if case == "ci" or case == "r-nonparity":
                put(tbar(p), -u)
            elif case == "C+" or case == "C+-nonint":
                put(rec.targets[0], one)
            elif case == "C-":
                put(tbar(p), one - u)
                put(rec.targets[0], u)
            elif case == "C--nonint":
                put(rec.targets[0], u)
            elif case == "r-I":
                put(tbar(p), 2 - u)
                put(rec.targets[0], u - one)
                put(rec.targets[1], u - one)
            elif case == "nci-I":
                up, partner = rec.targets
                put(up, one)
                put(tbar(block.param(partner)), -one)
            elif case == "r-II":
                down, partner = rec.targets
                put(tbar(p), one - u)
                put(tbar(block.param(partner)), one)
                put(down, u - one)
            elif case == "nci-II":
                up1, up2 = rec.targets
                put(up1, one)
                put(up2, one)
                put(tbar(p), -one)
            elif case == "r-nonint":
                lam = block.twists[twist]
                acheck = rd.simple_coroots[root]
                fl = rd.floor_pair(lam, acheck)
                eps = p.sign.eval_coroot(acheck)
                sign = (-1 if fl % 2 else 1) * eps
                put(rec.targets[0], QL.t1() if sign == 1 else QL.t2())
            else:
                raise BlockError(f"unknown case label {case}")
            cols[p.id] = col
        return cols

    def normalized_matrix(self, root: int, twist: int) -> Dict[str, Dict[str, SignedULaurent]]:
        """The operator in the normalized basis, with entries in Z[u^(1/2), u^(-1/2)].

        Raises if any conjugated entry fails to be symmetric in t1, t2; that
        integrality is the computational content of the Hodge-shift theorem.
        """
        key = (root, twist)
        with self._lock:
            if key in self._normalized:
                return self._normalized[key]
        block = self.block
        raw = self.matrix(root, twist)
        cols: Dict[str, Dict[str, SignedULaurent]] = {}
        for cid, col in raw.items():
            pc4, qc4 = self._factor_parts(block.param(cid))
            ncol: Dict[str, SignedULaurent] = {}
            for rid, entry in col.items():
                pr4, qr4 = self._factor_parts(block.param(rid))
                shifted = entry * QL.monomial(pc4 - pr4, qc4 - qr4)
                if not shifted.is_symmetric_u_laurent():
                    raise BlockError(
                        f"normalized Hecke entry at ({rid}, {cid}) is not a "
                        f"u-Laurent polynomial: {shifted}"
                    )
                ncol[rid] = shifted.to_mixed()
            cols[cid] = ncol
        with self._lock:
            self._normalized.setdefault(key, cols)
            return self._normalized[key]

    def translation_permutation(self, twist_from: int, twist_to: int) -> Dict[str, str]:
        """Parameter relabeling along the translation between two twists."""
        block = self.block
        return {
            p.id: block.translate_between(p, twist_to).id
            for p in block.params_at(twist_from)
        }

    # -- application ---------------------------------------------------------

    def apply_T(self, root: int, x: HeckeElement) -> HeckeElement:
        """Apply the operator of a simple root to an element (linear over the ring)."""
        block = self.block
        mat = self.matrix(root, x.twist)
        out_twist = block.reflected_twist(x.twist, root)
        acc: Dict[str, QuarterLaurent] = {}
        for pid, c in x.coeffs:
            if pid not in mat:
                raise BlockError(f"no edge record for parameter {pid}")
            for rid, entry in mat[pid].items():
                s = acc.get(rid, QL.zero()) + entry * c
                if s.is_zero():
                    acc.pop(rid, None)
                else:
                    acc[rid] = s
        return HeckeElement.make(out_twist, acc)

    def compose_word(self, word: List[int], start_twist: int) -> ColumnMatrix:
        """Matrix of T_{word[0]} ... T_{word[-1]} (rightmost factor first)."""
        block = self.block
        twist = start_twist
        mats: List[ColumnMatrix] = []
        for root in reversed(word):
            mats.append(self.matrix(root, twist))
            twist = block.reflected_twist(twist, root)
        result: Optional[ColumnMatrix] = None
        for m in mats:
            result = m if result is None else _compose(m, result)
        return result if result is not None else {}


def _compose(second: ColumnMatrix, first: ColumnMatrix) -> ColumnMatrix:
    """Matrix of (second after first), in column form."""
    out: ColumnMatrix = {}
    for cid, col in first.items():
        acc: Dict[str, QuarterLaurent] = {}
        for mid, c in col.items():
            for rid, d in second.get(mid, {}).items():
                s = acc.get(rid, QL.zero()) + d * c
                if s.is_zero():
                    acc.pop(rid, None)
                else:
                    acc[rid] = s
        out[cid] = acc
    return out


def _braid_order(cartan_ij: int, cartan_ji: int) -> int:
    prod = cartan_ij * cartan_ji
    return {0: 2, 1: 3, 2: 4, 3: 6}[prod]


def check_relations(block: Block, ctx: Optional[HeckeContext] = None) -> RelationReport:
    """Verify the quadratic and braid relations on every basis vector.

    The quadratic relation composes the operator with itself across the twist
    reflection and compares with u plus the translated operator term when the
    root is integral, or with plain u otherwise.  Braid relations compare the
    two alternating words of the appropriate length for every root pair.
    """
    ctx = ctx or HeckeContext(block)
    rd = block.rd
    u = QL.u()
    one = QL.one()
    checks: List[RelationCheck] = []
    for twist in range(len(block.twists)):
        params = block.params_at(twist)
        if not params:
            continue
        lam = block.twists[twist]
        for i in range(rd.n_simple):
            t2mat = ctx.compose_word([i, i], twist)
            integral = rd.pair(lam, rd.simple_coroots[i]).denominator == 1
            if integral:
                refl = block.reflected_twist(twist, i)
                tmat = ctx.matrix(i, twist)
                back = ctx.translation_permutation(refl, twist)
                expected: ColumnMatrix = {}
                for p in params:
                    col: Dict[str, QuarterLaurent] = {p.id: u}
                    for rid, entry in tmat[p.id].items():
                        key = back[rid]
                        s = col.get(key, QL.zero()) + (one - u) * entry
                        if s.is_zero():
                            col.pop(key, None)
                        else:
                            col[key] = s
                    expected[p.id] = col
            else:
                expected = {p.id: {p.id: u} for p in params}
            for p in params:
                diff = _col_diff(t2mat.get(p.id, {}), expected.get(p.id, {}))
                checks.append(
                    RelationCheck("quadratic", (i,), twist, p.id, not diff, diff)
                )
        for i in range(rd.n_simple):
            for j in range(i + 1, rd.n_simple):
                m = _braid_order(rd.cartan[i][j], rd.cartan[j][i])
                word_a: List[int] = [(i if k % 2 == 0 else j) for k in range(m)]
                word_b: List[int] = [(j if k % 2 == 0 else i) for k in range(m)]
                lhs = ctx.compose_word(word_a, twist)
                rhs = ctx.compose_word(word_b, twist)
                for p in params:
                    diff = _col_diff(lhs.get(p.id, {}), rhs.get(p.id, {}))
                    checks.append(
                        RelationCheck("braid", (i, j), twist, p.id, not diff, diff)
                    )
    return RelationReport(checks)


def _col_diff(a: Dict[str, QuarterLaurent], b: Dict[str, QuarterLaurent]) -> Dict[str, QuarterLaurent]:
    out = {}
    for key in set(a) | set(b):
        d = a.get(key, QL.zero()) - b.get(key, QL.zero())
        if not d.is_zero():
            out[key] = d
    return out
