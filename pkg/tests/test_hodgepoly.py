"""Conversion chain between the four multiplicity matrices."""

from fractions import Fraction

import pytest

from hodgekl.hodgepoly import (
    ParityError,
    check_hodge_rescaling,
    check_signature_specialization,
    hodge_from_mixed,
    mixed_from_lvm,
    signature_altv,
    signature_from_hodge,
)
from hodgekl.kl import KLError, MultiplicityMatrix
from hodgekl.poly import QuarterLaurent, SignedULaurent

QL = QuarterLaurent
UL = SignedULaurent
F = Fraction


class TestMixed:
    def test_integral_twist_is_identity_rescale(self, pipelines):
        for name in ("sl2r:0", "su21:0,0", "complex:SL3:0", "pgl2r:0"):
            p = pipelines[name]
            assert p.mixed.entries == p.lvm.entries, name

    def test_diagonal_never_rescales(self, pipelines):
        for name, p in pipelines.items():
            for pid in p.lvm.order:
                assert p.mixed.entry(pid, pid) == UL.one(), name

    def test_nonintegral_identity(self, pipelines):
        p = pipelines["sl2r:1/2"]
        assert all(k[0] == k[1] for k in p.mixed.entries)

    def test_kind_guard(self, pipelines):
        p = pipelines["sl2r:0"]
        with pytest.raises(KLError):
            mixed_from_lvm(p.block, p.mixed)


class TestHodge:
    def test_integral_twist_substitution_only(self, pipelines):
        # with vanishing shifts the two-variable table is the plain one at u = t1 t2
        p = pipelines["sl2r:0"]
        for key, val in p.lvm.entries.items():
            assert p.hodge.entries[key] == val.to_quarter()

    def test_diagonal_prefactor_is_one(self, pipelines):
        for name, p in pipelines.items():
            for pid in p.hodge.order:
                assert p.hodge.entry(pid, pid) == QL.one(), name

    def test_sl2r_integral_offdiagonal_is_one(self, pipelines):
        p = pipelines["sl2r:0"]
        assert p.hodge.entry("c0@0:0", "open@0:0") == QL.one()
        assert p.hodge.entry("cinf@0:0", "open@0:0") == QL.one()


class TestSignature:
    def test_diagonal_is_one(self, pipelines):
        for name, p in pipelines.items():
            for pid in p.sig_hodge.order:
                assert p.sig_hodge.entry(pid, pid) == UL.one(), name

    def test_sl2r_integral_closed_entries(self, pipelines):
        p = pipelines["sl2r:0"]
        assert p.sig_hodge.entry("c0@0:0", "open@0:0") == UL.one()

    def test_routes_agree_everywhere(self, pipelines):
        for name, p in pipelines.items():
            assert p.sig_hodge.entries == p.sig_altv.entries, name

    def test_integral_twist_altv_is_substitution(self, pipelines):
        # with vanishing orientation numbers the signature table is the plain
        # one with u replaced by zeta u
        p = pipelines["su21:0,0"]
        for key, val in p.lvm.entries.items():
            expected = UL(
                {(uh, (uh // 2) % 2): c for (uh, _zb), c in val.terms.items()}
            )
            assert p.sig_altv.entries[key] == expected

    def test_specialization_recovers_lvm(self, pipelines):
        for name, p in pipelines.items():
            assert check_signature_specialization(p.block, p.lvm, p.sig_altv) == []
            assert check_signature_specialization(p.block, p.lvm, p.sig_hodge) == []

    def test_advisory_flag_attached(self, pipelines):
        p = pipelines["sl2r:0"]
        assert p.sig_hodge.advisory == {"regularity_unchecked": True}
        assert p.sig_altv.advisory == {"regularity_unchecked": True}

    def test_parity_failure_is_reported(self, pipelines):
        p = pipelines["sl2r:0"]
        # fabricate a two-variable table with a lone quarter exponent
        bad = MultiplicityMatrix(
            "hodge",
            p.hodge.order,
            {(p.hodge.order[0], p.hodge.order[0]): QL.monomial(1, 1)},
            p.hodge.lengths,
        )
        with pytest.raises(ParityError):
            signature_from_hodge(p.block, bad)


class TestRescaling:
    def test_conjugated_hecke_matrices_are_u_laurent(self, pipelines):
        for name, p in pipelines.items():
            assert check_hodge_rescaling(p.block, p.ctx) == [], name

    def test_product_block_exercises_nonzero_shifts(self, pipelines):
        # the mixed-twist product has parameters with opposite half-integer
        # shifts linked by an integral real root, the rank-two configuration
        b = pipelines["sl2rxsl2r:0,1/2"].block
        shifts = {p.ell_H for p in b.parameters}
        assert shifts == {F(1, 2), F(-1, 2)}
        linked = [
            (p, b.param(b.edge(p.id, 0).targets[0]))
            for p in b.parameters
            if b.edge(p.id, 0).case == "r-I"
        ]
        assert linked
        for src, tgt in linked:
            assert src.ell_H == tgt.ell_H != 0
