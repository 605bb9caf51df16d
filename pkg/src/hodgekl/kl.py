"""The Kazhdan-Lusztig step: self-dual basis and multiplicity polynomials.

Given the duality matrix, each column of the multiplicity matrix is found by
the classical splitting trick: writing the self-duality condition for the
unknown basis vector produces, entry by entry, an identity

    u^m * (entry with u inverted)  -  entry  =  known combination

whose two sides have disjoint exponent supports once the entry is constrained
to degree at most (m - 1)/2, where m is the integral-length difference.  The
split is therefore unique, and failure to split exactly signals an error in
the duality matrix, never a tolerance.

Entries are u-polynomials with integer coefficients; the matrix is
unitriangular with respect to the closure order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .block import Block, Parameter
from .duality import RMatrix
from .poly import QuarterLaurent, SignedULaurent

__all__ = ["MultiplicityMatrix", "KLError", "compute_lvm", "c_basis_coords",
           "verify_selfdual", "verify_roundtrip"]

UL = SignedULaurent

MATRIX_KINDS = ("lvm", "mixed", "hodge", "signature")


class KLError(Exception):
    """Raised when the multiplicity computation cannot complete exactly."""


@dataclass
class MultiplicityMatrix:
    """Triangular matrix of multiplicity polynomials.

    kind selects the coefficient ring: "lvm" and "mixed" entries are
    SignedULaurent without zeta, "hodge" entries are QuarterLaurent, and
    "signature" entries are full SignedULaurent.  Entries are stored sparsely
    with rows and columns indexed by parameter ids in the canonical order.
    """

    kind: str
    order: Tuple[str, ...]
    entries: Dict[Tuple[str, str], object]
    lengths: Dict[str, Dict[str, Fraction]]
    advisory: Dict[str, bool] = field(default_factory=dict)

    def entry(self, row: str, col: str):
        zero = QuarterLaurent.zero() if self.kind == "hodge" else UL.zero()
        return self.entries.get((row, col), zero)

    def column(self, col: str) -> Dict[str, object]:
        return {r: v for (r, c), v in self.entries.items() if c == col}


def _length_table(block: Block) -> Dict[str, Dict[str, Fraction]]:
    return {
        p.id: {
            "ell": Fraction(p.ell),
            "ell_I": p.ell_I,
            "ell_o": p.ell_o,
            "ell_H": p.ell_H,
        }
        for p in block.parameters
    }


def compute_lvm(block: Block, rmat: RMatrix) -> MultiplicityMatrix:
    """Multiplicity polynomials of the standard basis in the self-dual basis."""
    params = block.sorted_params()
    order = tuple(p.id for p in params)
    by_id = {p.id: p for p in params}
    entries: Dict[Tuple[str, str], UL] = {}

    def pval(rid: str, cid: str) -> UL:
        if rid == cid:
            return UL.one()
        return entries.get((rid, cid), UL.zero())

    for c in params:
        entries[(c.id, c.id)] = UL.one()
        rows = [
            q for q in block.params_at(c.twist)
            if q.id != c.id and block.leq(q, c)
        ]
        # increasing-length rows only need previously finished columns
        for q in sorted(rows, key=lambda x: (-x.ell, x.id)):
            m = c.ell_I - q.ell_I
            if m.denominator != 1:
                raise KLError(
                    f"integral-length difference {m} at ({q.id}, {c.id}) is not "
                    "an integer"
                )
            m = int(m)
            known = UL.zero()
            for d in params:
                if d.twist != c.twist or d.id == c.id:
                    continue
                if not (block.leq(q, d) and block.leq(d, c)):
                    continue
                rv = rmat.entry(d.id, c.id)
                if rv.is_zero():
                    continue
                known = known + rv * pval(q.id, d.id)
            if known.is_zero():
                continue
            # split known = u^m * dual(P) - P with deg P <= (m-1)/2
            bound = Fraction(m - 1, 2)
            low = UL.zero()
            high = UL.zero()
            for (uh, zb), coeff in known.terms.items():
                if zb:
                    raise KLError(f"unexpected zeta term at ({q.id}, {c.id})")
                if Fraction(uh, 2) <= bound:
                    low = low + UL.monomial(uh, 0, coeff)
                else:
                    high = high + UL.monomial(uh, 0, coeff)
            p_entry = -low
            if UL.u_power(m) * p_entry.u_inverse() - p_entry != known:
                raise KLError(
                    f"self-duality split failed at ({q.id}, {c.id}); "
                    "the duality matrix is inconsistent"
                )
            if not p_entry.is_zero():
                if not p_entry.is_u_polynomial():
                    raise KLError(
                        f"multiplicity entry at ({q.id}, {c.id}) = {p_entry} "
                        "is not a u-polynomial"
                    )
                entries[(q.id, c.id)] = p_entry
    return MultiplicityMatrix("lvm", order, entries, _length_table(block))


def c_basis_coords(block: Block, lvm: MultiplicityMatrix) -> Dict[str, Dict[str, UL]]:
    """Coordinates of each self-dual basis vector in the normalized basis.

    Requires the matrix to be triangular with respect to the canonical order;
    a forward reference means the input is not a valid multiplicity matrix.
    """
    coords: Dict[str, Dict[str, UL]] = {}
    for cid in lvm.order:
        col: Dict[str, UL] = {cid: UL.one()}
        for (rid, c2), val in lvm.entries.items():
            if c2 != cid or rid == cid:
                continue
            if rid not in coords:
                raise KLError(
                    f"entry ({rid}, {cid}) refers to a later column; "
                    "matrix is not triangular"
                )
            for base, base_val in coords[rid].items():
                s = col.get(base, UL.zero()) - val * base_val
                if s.is_zero():
                    col.pop(base, None)
                else:
                    col[base] = s
        coords[cid] = col
    return coords


def verify_selfdual(block: Block, rmat: RMatrix, lvm: MultiplicityMatrix) -> List[str]:
    """Check that every basis vector built from the multiplicity matrix is
    fixed by the duality map up to its normalization monomial."""
    problems: List[str] = []
    try:
        coords = c_basis_coords(block, lvm)
    except KLError as e:
        return [str(e)]
    for cid in lvm.order:
        p = block.param(cid)
        image = rmat.dual_coords(coords[cid])
        shift = UL.u_power(-p.ell_I)
        expected = {k: shift * v for k, v in coords[cid].items()}
        if image != expected:
            problems.append(f"basis vector of {cid} is not self-dual")
    return problems


def verify_roundtrip(block: Block, lvm: MultiplicityMatrix) -> List[str]:
    """Check that the standard basis is reproduced from the self-dual one."""
    problems: List[str] = []
    try:
        coords = c_basis_coords(block, lvm)
    except KLError as e:
        return [str(e)]
    for cid in lvm.order:
        acc: Dict[str, UL] = {}
        for rid in lvm.order:
            val = lvm.entry(rid, cid) if rid != cid else UL.one()
            if isinstance(val, UL) and val.is_zero():
                continue
            for base, base_val in coords[rid].items():
                s = acc.get(base, UL.zero()) + val * base_val
                if s.is_zero():
                    acc.pop(base, None)
                else:
                    acc[base] = s
        if acc != {cid: UL.one()}:
            problems.append(f"round trip failed at column {cid}")
    return problems


def lvm_degree_violations(block: Block, lvm: MultiplicityMatrix) -> List[str]:
    """Degree and ring checks for the multiplicity matrix."""
    problems: List[str] = []
    for (rid, cid), val in lvm.entries.items():
        if rid == cid:
            if val != UL.one():
                problems.append(f"diagonal entry at {cid} is not 1")
            continue
        q, c = block.param(rid), block.param(cid)
        if not block.leq(q, c):
            problems.append(f"entry ({rid}, {cid}) violates the closure order")
        if val.is_zero():
            continue
        if not val.is_u_polynomial():
            problems.append(f"entry ({rid}, {cid}) is not a u-polynomial")
            continue
        bound = Fraction(c.ell_I - q.ell_I - 1, 2)
        if val.u_degree() > bound:
            problems.append(
                f"entry ({rid}, {cid}) of degree {val.u_degree()} exceeds {bound}"
            )
    return problems
