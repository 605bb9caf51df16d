"""Closed-form conversions between the four multiplicity matrices.

Starting from the plain multiplicity polynomials, the chain

    lvm  ->  mixed  ->  hodge  ->  signature

applies, entrywise, a monomial rescale by the integral-length defect, the
two-variable substitution with the Hodge-shift prefactor, and the signature
substitution introducing the order-two sign variable.  An independent
shortcut computes the signature matrix directly from the plain one using
orientation numbers; agreement of the two routes is an exact acceptance
check, not a tolerance.

Sign-variable exponents must reduce to integers; a failure is reported with
the offending entry and never rounded.  The regularity hypothesis under
which the signature matrices carry their representation-theoretic meaning is
not evaluated here; signature outputs carry an advisory flag saying so.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .block import Block
from .hecke import HeckeContext
from .kl import KLError, MultiplicityMatrix
from .poly import QuarterLaurent, SignedULaurent

__all__ = [
    "ParityError",
    "mixed_from_lvm",
    "hodge_from_mixed",
    "signature_from_hodge",
    "signature_altv",
    "check_hodge_rescaling",
    "check_signature_specialization",
]

UL = SignedULaurent
QL = QuarterLaurent


class ParityError(Exception):
    """A sign-variable exponent failed to reduce to an integer."""


def _thread_count() -> int:
    raw = os.environ.get("LVH_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        n = 1
    return max(1, n)


def _map_entries(entries: Dict, fn) -> Dict:
    items = sorted(entries.items())
    workers = _thread_count()
    if workers == 1 or len(items) < 8:
        results = [fn(k, v) for k, v in items]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda kv: fn(kv[0], kv[1]), items))
    return {k: v for (k, _), v in zip(items, results) if v is not None}


def mixed_from_lvm(block: Block, lvm: MultiplicityMatrix) -> MultiplicityMatrix:
    """Rescale each entry by u to the half-difference of integral-length
    defects between row and column."""
    if lvm.kind != "lvm":
        raise KLError(f"expected an lvm matrix, got {lvm.kind}")

    def convert(key: Tuple[str, str], val: UL):
        rid, cid = key
        r, c = block.param(rid), block.param(cid)
        expo = Fraction((r.ell_I - r.ell) - (c.ell_I - c.ell), 2)
        if (2 * expo).denominator != 1:
            raise KLError(f"mixed rescale exponent {expo} at ({rid}, {cid}) "
                          "is not a half-integer")
        return UL.u_power(expo) * val

    entries = _map_entries(lvm.entries, convert)
    return MultiplicityMatrix("mixed", lvm.order, entries, lvm.lengths)


def hodge_from_mixed(block: Block, mixed: MultiplicityMatrix) -> MultiplicityMatrix:
    """Substitute u by the product of the two Hodge variables and multiply by
    the Hodge-shift prefactor."""
    if mixed.kind != "mixed":
        raise KLError(f"expected a mixed matrix, got {mixed.kind}")

    def convert(key: Tuple[str, str], val: UL):
        rid, cid = key
        r, c = block.param(rid), block.param(cid)
        if not val.is_zeta_free():
            raise KLError(f"mixed entry at ({rid}, {cid}) involves zeta")
        prefactor = QL.t1_over_t2_power(Fraction(r.ell_H - c.ell_H, 2))
        return prefactor * val.to_quarter()

    entries = _map_entries(mixed.entries, convert)
    return MultiplicityMatrix("hodge", mixed.order, entries, mixed.lengths)


def signature_from_hodge(block: Block, hodge: MultiplicityMatrix) -> MultiplicityMatrix:
    """Signature matrix through the Hodge route.

    Each two-variable term maps to u raised to half the total exponent times
    the sign variable raised to the second exponent; the second exponent must
    be an integer and the total exponent even in quarter-units.
    """
    if hodge.kind != "hodge":
        raise KLError(f"expected a hodge matrix, got {hodge.kind}")

    def convert(key: Tuple[str, str], val: QL):
        rid, cid = key
        r, c = block.param(rid), block.param(cid)
        acc: Dict[Tuple[int, int], int] = {}
        for (p4, q4), coeff in val.terms.items():
            if q4 % 4 != 0:
                raise ParityError(
                    f"entry ({rid}, {cid}): sign exponent {Fraction(q4, 4)} "
                    "is not an integer"
                )
            if (p4 + q4) % 4 != 0:
                raise ParityError(
                    f"entry ({rid}, {cid}): u-exponent {Fraction(p4 + q4, 8)} "
                    "is not a half-integer"
                )
            zbit = (q4 // 4) % 2
            uhalf = (p4 + q4) // 4
            k = (uhalf, zbit)
            s = acc.get(k, 0) + coeff
            if s:
                acc[k] = s
            else:
                acc.pop(k, None)
        shift = Fraction((r.ell - r.ell_I) - (c.ell - c.ell_I), 2)
        if (2 * shift).denominator != 1:
            raise ParityError(
                f"entry ({rid}, {cid}): length shift {shift} is not a half-integer"
            )
        return UL.u_power(shift) * UL(acc)

    entries = _map_entries(hodge.entries, convert)
    return MultiplicityMatrix(
        "signature", hodge.order, entries, hodge.lengths,
        advisory={"regularity_unchecked": True},
    )


def signature_altv(block: Block, lvm: MultiplicityMatrix) -> MultiplicityMatrix:
    """Signature matrix computed directly from the plain multiplicity
    polynomials and orientation numbers."""
    if lvm.kind != "lvm":
        raise KLError(f"expected an lvm matrix, got {lvm.kind}")

    def convert(key: Tuple[str, str], val: UL):
        rid, cid = key
        r, c = block.param(rid), block.param(cid)
        if val.is_zero():
            return None
        zexp = Fraction(c.ell_o - r.ell_o, 2)
        if zexp.denominator != 1:
            raise ParityError(
                f"entry ({rid}, {cid}): sign exponent {zexp} is not an integer"
            )
        zbit0 = int(zexp) % 2
        acc: Dict[Tuple[int, int], int] = {}
        for (uh, zb), coeff in val.terms.items():
            if zb:
                raise KLError(f"lvm entry at ({rid}, {cid}) involves zeta")
            if uh % 2:
                raise KLError(f"lvm entry at ({rid}, {cid}) has fractional degree")
            k = (uh, (zbit0 + uh // 2) % 2)
            acc[k] = acc.get(k, 0) + coeff
        return UL(acc)

    entries = _map_entries(lvm.entries, convert)
    return MultiplicityMatrix(
        "signature", lvm.order, entries, lvm.lengths,
        advisory={"regularity_unchecked": True},
    )


def check_hodge_rescaling(block: Block, ctx: Optional[HeckeContext] = None) -> List[str]:
    """Exact integrality of every Hecke matrix conjugated by the Hodge-shift
    diagonal: all entries must land in the u-Laurent ring."""
    ctx = ctx or HeckeContext(block)
    problems: List[str] = []
    for twist in range(len(block.twists)):
        if not block.params_at(twist):
            continue
        for i in range(block.rd.n_simple):
            try:
                ctx.normalized_matrix(i, twist)
            except Exception as e:  # noqa: BLE001 - collected into the report
                problems.append(f"root {i}, twist {twist}: {e}")
    return problems


def check_signature_specialization(
    block: Block, lvm: MultiplicityMatrix, sig: MultiplicityMatrix
) -> List[str]:
    """Setting the sign variable to 1 in the signature matrix must recover the
    plain multiplicity matrix exactly."""
    problems: List[str] = []
    keys = set(lvm.entries) | set(sig.entries)
    for key in sorted(keys):
        lv = lvm.entry(*key)
        sv = sig.entry(*key).zeta_to_one()
        if lv != sv:
            problems.append(f"specialization mismatch at {key}: {sv} vs {lv}")
    return problems
