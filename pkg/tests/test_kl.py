"""Multiplicity polynomials: frozen values, axioms, classical cross-check."""

from fractions import Fraction

import pytest

from hodgekl.block import Block, build_complex_group, build_sl2r
from hodgekl.duality import RMatrix, compute_duality
from hodgekl.kl import (
    KLError,
    MultiplicityMatrix,
    compute_lvm,
    lvm_degree_violations,
    verify_roundtrip,
    verify_selfdual,
)
from hodgekl.kl_classical import WeylGroup, kl_polynomial
from hodgekl.poly import SignedULaurent
from hodgekl.rootdata import RootDatum, builtin_root_datum

UL = SignedULaurent
F = Fraction


class TestFrozenValues:
    def test_sl2r_integral(self, pipelines):
        lvm = pipelines["sl2r:0"].lvm
        off = {k: v for k, v in lvm.entries.items() if k[0] != k[1]}
        assert off == {
            ("c0@0:0", "open@0:0"): UL.one(),
            ("cinf@0:0", "open@0:0"): UL.one(),
        }

    def test_sl2r_nonintegral_identity(self, pipelines):
        lvm = pipelines["sl2r:1/2"].lvm
        assert all(k[0] == k[1] for k in lvm.entries)

    def test_su21_composition_series(self, pipelines):
        # the open-orbit standard has exactly four factors: itself, the two
        # middle parameters and the shared closed parameter
        lvm = pipelines["su21:0,0"].lvm
        col = {r: v for (r, c), v in lvm.entries.items() if c == "open@0:00"}
        assert col == {
            "open@0:00": UL.one(),
            "m1@0:00": UL.one(),
            "m2@0:00": UL.one(),
            "cB@0:00": UL.one(),
        }
        middle = {r: v for (r, c), v in lvm.entries.items() if c == "m1@0:00"}
        assert middle == {
            "m1@0:00": UL.one(),
            "cB@0:00": UL.one(),
            "cC@0:00": UL.one(),
        }

    def test_pgl2r_type_two_columns(self, pipelines):
        lvm = pipelines["pgl2r:0"].lvm
        for col in ("open@0:0", "open@0:1"):
            entries = {r: v for (r, c), v in lvm.entries.items() if c == col}
            assert entries == {col: UL.one(), "closed@0:0": UL.one()}


class TestAxioms:
    def test_unitriangular_and_degrees(self, pipelines):
        for name, p in pipelines.items():
            assert lvm_degree_violations(p.block, p.lvm) == [], name

    def test_selfdual_basis(self, pipelines):
        for name, p in pipelines.items():
            assert verify_selfdual(p.block, p.rmat, p.lvm) == [], name

    def test_roundtrip(self, pipelines):
        for name, p in pipelines.items():
            assert verify_roundtrip(p.block, p.lvm) == [], name

    def test_entries_integer_u_polynomials(self, pipelines):
        for name, p in pipelines.items():
            for val in p.lvm.entries.values():
                assert val.is_u_polynomial(), name


class TestNegativeControls:
    def test_identity_lvm_with_nontrivial_duality_fails(self, pipelines):
        p = pipelines["sl2r:0"]
        order = p.lvm.order
        fake = MultiplicityMatrix(
            "lvm",
            order,
            {(pid, pid): UL.one() for pid in order},
            p.lvm.lengths,
        )
        assert verify_selfdual(p.block, p.rmat, fake)

    def test_transposed_lvm_fails(self, pipelines):
        p = pipelines["su21:0,0"]
        flipped = {(c, r): v for (r, c), v in p.lvm.entries.items()}
        fake = MultiplicityMatrix("lvm", p.lvm.order, flipped, p.lvm.lengths)
        assert verify_selfdual(p.block, p.rmat, fake)

    def test_corrupted_duality_matrix_fails_split(self, pipelines):
        p = pipelines["sl2r:0"]
        bad_entries = dict(p.rmat.entries)
        bad_entries[("c0@0:0", "open@0:0")] = UL.u()  # breaks the exponent split
        bad = RMatrix(p.block, p.rmat.order, bad_entries)
        with pytest.raises(KLError):
            compute_lvm(p.block, bad)


def _classical_expectation(rd_single, block, lvm):
    """Compare against the inverse-matrix convention: the multiplicity of the
    row parameter in the column standard equals the classical polynomial at
    the longest-element-twisted pair."""
    W = WeylGroup(rd_single)
    n = rd_single.rank
    w0 = max(W.elements, key=lambda w: W.length[w])
    w_of = {
        oid: tuple(tuple(o.theta[i][n + j] for j in range(n)) for i in range(n))
        for oid, o in block.orbits.items()
    }
    mismatches = []
    for pc in block.sorted_params():
        for pr in block.sorted_params():
            wc, wr = w_of[pc.orbit], w_of[pr.orbit]
            poly = kl_polynomial(W, W._mul(w0, wc), W._mul(w0, wr))
            expect = UL({(2 * k, 0): v for k, v in poly.items()})
            got = lvm.entry(pr.id, pc.id) if pr.id != pc.id else UL.one()
            if got != expect:
                mismatches.append((pr.id, pc.id, str(got), str(expect)))
            bruhat = W.bruhat_leq(wr, wc)
            closure = block.leq(pr, pc)
            if bruhat != closure:
                mismatches.append((pr.id, pc.id, "order mismatch"))
    return mismatches


class TestClassicalComparison:
    @pytest.mark.parametrize("name", ["SL2", "SL3", "Sp4", "SL2xSL2"])
    def test_builtin_complex_groups(self, pipelines, name):
        key = f"complex:{name}:0"
        p = pipelines[key]
        rd = builtin_root_datum(name)
        assert _classical_expectation(rd, p.block, p.lvm) == []

    def test_rank_three_with_nontrivial_polynomials(self):
        rd = RootDatum(
            [[2, -1, 0], [-1, 2, -1], [0, -1, 2]],
            [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
            name="SL4",
        )
        block = build_complex_group(rd, [0, 0, 0])
        rmat = compute_duality(block)
        lvm = compute_lvm(block, rmat)
        assert _classical_expectation(rd, block, lvm) == []
        # rank three is the first place the polynomials are not all constant
        nontrivial = [
            v for v in lvm.entries.values()
            if not v.is_zero() and v.u_degree() > 0
        ]
        assert len(nontrivial) == 6


class TestOutputInvariance:
    def test_swapping_paired_targets_changes_nothing(self, pipelines):
        # the labeling of the two type I images and the two type II characters
        # is a free choice; outputs must not depend on it
        for name in ("sl2r:0", "pgl2r:0", "su21:0,0"):
            source = pipelines[name].block
            edges = {}
            for key, rec in source.edges.items():
                if rec.case in ("r-I", "nci-II"):
                    edges[key] = type(rec)(rec.case, tuple(reversed(rec.targets)))
                else:
                    edges[key] = rec
            swapped = Block(
                source.rd,
                source.group,
                source.base_lambda,
                source.twists,
                source.orbits,
                source.parameters,
                edges,
                source.dimH,
            )
            rmat = compute_duality(swapped)
            assert rmat.entries == pipelines[name].rmat.entries
            lvm = compute_lvm(swapped, rmat)
            assert lvm.entries == pipelines[name].lvm.entries

    def test_weight_normalization_metadata_cancels(self, pipelines):
        # the torus-dimension offset in the normalization must not affect any
        # output: rebuild with a shifted value and compare
        source = pipelines["su21:0,0"].block
        shifted = Block(
            source.rd,
            source.group,
            source.base_lambda,
            source.twists,
            source.orbits,
            source.parameters,
            dict(source.edges),
            source.dimH + 4,
        )
        rmat = compute_duality(shifted)
        assert rmat.entries == pipelines["su21:0,0"].rmat.entries
        lvm = compute_lvm(shifted, rmat)
        assert lvm.entries == pipelines["su21:0,0"].lvm.entries
