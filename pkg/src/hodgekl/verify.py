"""The verification battery: every exact identity the engine promises.

Each check returns a record with a name, a pass/fail status and a witness
string describing the first failure.  The battery never weakens a failing
identity into a tolerance; everything is exact polynomial equality.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional

from .block import Block, validate
from .duality import (
    RMatrix,
    compute_duality,
    compute_duality_oracle,
    verify_duality,
)
from .hecke import HeckeContext, check_relations
from .hodgepoly import (
    check_hodge_rescaling,
    check_signature_specialization,
    hodge_from_mixed,
    mixed_from_lvm,
    signature_altv,
    signature_from_hodge,
)
from .kl import compute_lvm, lvm_degree_violations, verify_roundtrip, verify_selfdual

__all__ = ["CheckResult", "run_verification"]


@dataclass
class CheckResult:
    name: str
    status: str  # "pass" or "fail"
    witness: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "pass"

    def to_json(self) -> dict:
        return {"name": self.name, "status": self.status, "witness": self.witness}


def _result(name: str, problems: List[str]) -> CheckResult:
    if problems:
        return CheckResult(name, "fail", problems[0])
    return CheckResult(name, "pass")


def run_verification(block: Block, with_oracle: bool = False) -> List[CheckResult]:
    results: List[CheckResult] = []
    violations = validate(block, raise_on_failure=False)
    results.append(_result("block-invariants", violations))
    if violations:
        # later checks assume a structurally valid block
        return results

    ctx = HeckeContext(block)
    rescale = check_hodge_rescaling(block, ctx)
    results.append(_result("hodge-rescaling-integrality", rescale))
    if rescale:
        return results

    report = check_relations(block, ctx)
    quad = [c for c in report.failures() if c.kind == "quadratic"]
    braid = [c for c in report.failures() if c.kind == "braid"]
    results.append(
        _result(
            "hecke-quadratic-relations",
            [f"root {c.roots[0]} at {c.param}" for c in quad],
        )
    )
    results.append(
        _result(
            "hecke-braid-relations",
            [f"roots {c.roots} at {c.param}" for c in braid],
        )
    )

    try:
        rmat = compute_duality(block, ctx)
    except Exception as e:  # noqa: BLE001 - reported, not raised
        results.append(CheckResult("duality-recursion", "fail", str(e)))
        return results
    results.append(CheckResult("duality-recursion", "pass"))
    results.append(_result("duality-properties", verify_duality(block, rmat, ctx)))

    if with_oracle:
        try:
            oracle = compute_duality_oracle(block, ctx)
            if oracle.entries != rmat.entries:
                diff = sorted(
                    set(oracle.entries.items()) ^ set(rmat.entries.items())
                )
                results.append(
                    CheckResult(
                        "duality-oracle-equality",
                        "fail",
                        f"first difference at {diff[0][0]}",
                    )
                )
            else:
                results.append(CheckResult("duality-oracle-equality", "pass"))
        except Exception as e:  # noqa: BLE001
            results.append(CheckResult("duality-oracle-equality", "fail", str(e)))

    try:
        lvm = compute_lvm(block, rmat)
    except Exception as e:  # noqa: BLE001
        results.append(CheckResult("kl-computation", "fail", str(e)))
        return results
    results.append(CheckResult("kl-computation", "pass"))
    results.append(_result("kl-degree-bounds", lvm_degree_violations(block, lvm)))
    results.append(_result("kl-self-duality", verify_selfdual(block, rmat, lvm)))
    results.append(_result("kl-round-trip", verify_roundtrip(block, lvm)))

    try:
        mixed = mixed_from_lvm(block, lvm)
        hodge = hodge_from_mixed(block, mixed)
        sig_h = signature_from_hodge(block, hodge)
        sig_a = signature_altv(block, lvm)
    except Exception as e:  # noqa: BLE001
        results.append(CheckResult("signature-conversions", "fail", str(e)))
        return results
    results.append(CheckResult("signature-conversions", "pass"))
    if sig_h.entries != sig_a.entries:
        diff = sorted(set(sig_h.entries) ^ set(sig_a.entries))
        key = diff[0] if diff else sorted(
            k for k in sig_h.entries if sig_h.entries[k] != sig_a.entries.get(k)
        )[0]
        results.append(
            CheckResult("signature-route-equality", "fail", f"entry {key} differs")
        )
    else:
        results.append(CheckResult("signature-route-equality", "pass"))
    results.append(
        _result(
            "signature-specialization",
            check_signature_specialization(block, lvm, sig_a),
        )
    )
    return results
