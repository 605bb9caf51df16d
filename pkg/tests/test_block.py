"""Block construction, classification, moves, statistics and file format."""

import json
from fractions import Fraction

import pytest

from hodgekl.block import (
    Block,
    BlockError,
    EdgeRecord,
    SchemaError,
    ValidationFailure,
    block_from_json,
    block_to_json,
    build_complex_group,
    build_pgl2r,
    build_sl2c,
    build_sl2r,
    build_sl2r_x_sl2r,
    build_su21,
    load_block,
    save_block,
    validate,
)
from hodgekl.rootdata import Weight

F = Fraction


class TestSl2rStructure:
    def test_integral_zero_has_four_parameters(self, blocks):
        b = blocks["sl2r:0"]
        assert len(b.parameters) == 4
        assert len(b.twists) == 1
        cases = {pid: b.edge(pid, 0).case for pid in (p.id for p in b.parameters)}
        assert sorted(cases.values()) == ["nci-I", "nci-I", "r-I", "r-nonparity"]

    def test_half_twist_has_two_parameters_per_twist(self, blocks):
        b = blocks["sl2r:1/2"]
        assert len(b.twists) == 2
        base = b.twist_index_of(b.base_lambda)
        assert len(b.params_at(base)) == 2
        assert all(p.orbit == "open" for p in b.parameters)
        assert all(b.edge(p.id, 0).case == "r-nonint" for p in b.parameters)

    def test_lengths(self, blocks):
        b = blocks["sl2r:0"]
        by_orbit = {}
        for p in b.parameters:
            by_orbit.setdefault(p.orbit, p.ell)
        assert by_orbit == {"c0": 0, "cinf": 0, "open": 1}

    def test_integral_length_equals_length_at_integral_twist(self, blocks):
        for name in ("sl2r:0", "sl2r:1", "su21:0,0", "complex:SL3:0"):
            for p in blocks[name].parameters:
                assert p.ell_I == p.ell

    def test_nonintegral_open_orbit_integral_length(self, blocks):
        for p in blocks["sl2r:1/2"].parameters:
            assert p.ell_I == 0


class TestClassification:
    def test_noncompact_closed_orbit(self, blocks):
        b = blocks["sl2r:0"]
        p = b.param("c0@0:0")
        assert b.classify_root("c0", 0, p.twist, p.sign) == "nci-I"

    def test_real_parity_open_orbit(self, blocks):
        b = blocks["sl2r:0"]
        p = b.param("open@0:0")
        assert b.classify_root("open", 0, p.twist, p.sign) == "r-I"

    def test_compact_imaginary(self, blocks):
        b = blocks["su21:0,0"]
        p = b.param("cA@0:00")
        assert b.classify_root("cA", 0, p.twist, p.sign) == "ci"

    def test_complex_cases(self, blocks):
        b = blocks["sl2c:0"]
        closed = next(p for p in b.parameters if p.orbit == "w.e")
        opened = next(p for p in b.parameters if p.orbit == "w.s0")
        assert b.edge(closed.id, 0).case == "C+"
        assert b.edge(opened.id, 0).case == "C-"
        b2 = blocks["sl2c:1/2"]
        assert {e.case for e in b2.edges.values()} == {"C+-nonint", "C--nonint"}

    def test_type_two_cases(self, blocks):
        b = blocks["pgl2r:0"]
        cases = sorted(e.case for e in b.edges.values())
        assert cases == ["nci-II", "r-II", "r-II"]


class TestParity:
    def test_zero_pairing_trivial_sign(self, blocks):
        b = blocks["sl2r:0"]
        assert b.parity(b.param("open@0:0"), 0) is True
        assert b.parity(b.param("open@0:1"), 0) is False

    def test_odd_pairing(self, blocks):
        b = blocks["sl2r:1"]
        for p in b.parameters:
            if p.orbit != "open":
                continue
            eps = p.sign.eval_coroot(b.rd.simple_coroots[0])
            assert b.parity(p, 0) == (eps == -1)

    def test_parity_requires_real_integral(self, blocks):
        b = blocks["sl2r:1/2"]
        with pytest.raises(BlockError):
            b.parity(b.parameters[0], 0)
        b2 = blocks["su21:0,0"]
        with pytest.raises(BlockError):
            b2.parity(b2.param("cA@0:00"), 0)


class TestLengthStatistics:
    def test_sl2c_closed_orbit_length(self, blocks):
        b = blocks["sl2c:0"]
        closed = next(p for p in b.parameters if p.orbit == "w.e")
        assert closed.ell == 1

    def test_orientation_number_nonintegral(self, blocks):
        b = blocks["sl2r:1/2"]
        base = b.twist_index_of(Weight.make([F(1, 2)]))
        plus = b.param_by_key("open", base, (0,))
        minus = b.param_by_key("open", base, (1,))
        assert plus.ell_o == 0 and minus.ell_o == 1

    def test_hodge_shift_nonintegral(self, blocks):
        b = blocks["sl2r:1/2"]
        base = b.twist_index_of(Weight.make([F(1, 2)]))
        plus = b.param_by_key("open", base, (0,))
        minus = b.param_by_key("open", base, (1,))
        assert plus.ell_H == F(-1, 2) and minus.ell_H == F(1, 2)

    def test_integral_twist_kills_orientation_and_shift(self, blocks):
        for name in ("sl2r:0", "su21:0,0", "complex:Sp4:0"):
            for p in blocks[name].parameters:
                assert p.ell_o == 0 and p.ell_H == 0

    def test_four_statistic_identity(self, blocks):
        # the Hodge shift equals orientation + integral length - length
        # + half the non-integral positive count, exactly, everywhere
        for b in blocks.values():
            for p in b.parameters:
                nonint = b.nonintegral_positive_count(p.twist)
                assert p.ell_H == p.ell_o + p.ell_I - p.ell + F(nonint, 2)


class TestMoves:
    def test_cross_action_involution_and_length(self, blocks):
        b = blocks["sl2c:0"]
        closed = next(p for p in b.parameters if p.orbit == "w.e")
        image = b.cross_action(closed, 0)
        assert image.orbit == "w.s0"
        assert image.ell == closed.ell + 1
        assert b.cross_action(image, 0).id == closed.id

    def test_cayley_down_pair(self, blocks):
        b = blocks["sl2r:0"]
        downs = b.cayley(b.param("open@0:0"), 0)
        assert {d.orbit for d in downs} == {"c0", "cinf"}
        assert all(d.ell == 0 for d in downs)

    def test_cayley_up_from_closed(self, blocks):
        b = blocks["sl2r:0"]
        ups = b.cayley(b.param("c0@0:0"), 0)
        assert [u.id for u in ups] == ["open@0:0"]

    def test_cayley_rejects_nonparity(self, blocks):
        b = blocks["sl2r:0"]
        with pytest.raises(BlockError):
            b.cayley(b.param("open@0:1"), 0)

    def test_cayley_type_two(self, blocks):
        b = blocks["pgl2r:0"]
        closed = b.param("closed@0:0")
        ups = b.cayley(closed, 0)
        assert len(ups) == 2 and len({u.sign.mu2 for u in ups}) == 2

    def test_translate_round_trip(self, blocks):
        b = blocks["sl2r:1"]
        p = b.params_at(0)[0]
        mu = b.twists[1] - b.twists[0]
        q = b.translate(p, mu)
        assert q.twist == 1
        assert b.translate(q, -mu).id == p.id

    def test_translate_by_even_weight_fixes_sign(self, blocks):
        b = blocks["sl2r:1"]
        # alpha has even coordinates in this lattice, so signs are unchanged
        low = b.twist_index_of(Weight.make([-1]))
        for p in b.params_at(low):
            q = b.translate(p, Weight.make([2]))
            assert q.sign.mu2 == p.sign.mu2

    def test_translate_requires_lattice_weight(self, blocks):
        b = blocks["sl2r:0"]
        with pytest.raises(BlockError):
            b.translate(b.parameters[0], Weight.make([F(1, 2)]))


class TestClosureOrder:
    def test_sl2r_closed_below_open(self, blocks):
        b = blocks["sl2r:0"]
        below = b.closure_below()
        assert below["open"] == {"c0", "cinf"}
        assert below["c0"] == set()

    def test_sl2c_diagonal_below_open(self, blocks):
        b = blocks["sl2c:0"]
        below = b.closure_below()
        assert below["w.s0"] == {"w.e"}

    def test_singleton_per_twist_has_no_comparable_pairs(self, blocks):
        b = blocks["su21:1/2,1/2"]
        for t in range(len(b.twists)):
            assert len(b.params_at(t)) == 1
        for p in b.parameters:
            for q in b.parameters:
                if p.id != q.id:
                    assert not b.leq(p, q)

    def test_generic_twist_order_runs_through_other_twists(self):
        # at a generic non-integral twist both orbits appear, at different twists
        b = build_complex_group("SL2", [F(1, 3)])
        assert b.closure_below()["w.s0"] == {"w.e"}
        assert len(b.parameters) == 4 and len(b.twists) == 4

    def test_su21_order(self, blocks):
        b = blocks["su21:0,0"]
        below = b.closure_below()
        assert below["open"] == {"cA", "cB", "cC", "m1", "m2"}
        assert below["m1"] == {"cB", "cC"}
        assert below["m2"] == {"cA", "cB"}


class TestValidation:
    def test_all_battery_blocks_validate(self, blocks):
        for b in blocks.values():
            assert validate(b, raise_on_failure=False) == []

    def test_flipped_grading_rejected(self, blocks):
        data = block_to_json(blocks["sl2r:0"])
        mutated = json.loads(json.dumps(data))
        for orbit in mutated["orbits"]:
            if orbit["id"] == "c0":
                orbit["grading"][0]["g"] = "c"
        blk = block_from_json(mutated)
        violations = validate(blk, raise_on_failure=False)
        assert violations
        with pytest.raises(ValidationFailure):
            validate(blk)

    def test_dropped_edge_rejected(self, blocks):
        data = block_to_json(blocks["sl2r:0"])
        mutated = json.loads(json.dumps(data))
        mutated["edges"] = mutated["edges"][1:]
        blk = block_from_json(mutated)
        assert validate(blk, raise_on_failure=False)

    def test_swapped_case_rejected(self, blocks):
        data = block_to_json(blocks["sl2r:0"])
        mutated = json.loads(json.dumps(data))
        for edge in mutated["edges"]:
            if edge["case"] == "r-nonparity":
                edge["case"] = "ci"
        blk = block_from_json(mutated)
        assert validate(blk, raise_on_failure=False)


class TestSerialization:
    def test_roundtrip_bit_exact(self, tmp_path, blocks):
        for name, b in blocks.items():
            path = tmp_path / f"{name.replace(':', '_').replace('/', '_')}.json"
            save_block(b, str(path))
            again = load_block(str(path))
            path2 = tmp_path / "again.json"
            save_block(again, str(path2))
            assert path.read_bytes() == path2.read_bytes()

    def test_roundtrip_preserves_structure(self, tmp_path, blocks):
        b = blocks["su21:0,0"]
        path = tmp_path / "block.json"
        save_block(b, str(path))
        again = load_block(str(path))
        assert {p.id for p in again.parameters} == {p.id for p in b.parameters}
        assert again.edges == b.edges
        assert validate(again, raise_on_failure=False) == []

    def test_schema_rejects_garbage(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{\"version\": 9}")
        with pytest.raises(SchemaError):
            load_block(str(path))
        path.write_text("not json at all")
        with pytest.raises(SchemaError):
            load_block(str(path))

    def test_schema_rejects_unknown_case(self, tmp_path, blocks):
        data = block_to_json(blocks["sl2r:0"])
        data["edges"][0]["case"] = "bogus"
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(data))
        with pytest.raises(SchemaError):
            load_block(str(path))


class TestBuilders:
    def test_complex_group_parameter_count(self, blocks):
        assert len(blocks["complex:SL3:0"].parameters) == 6
        assert len(blocks["complex:Sp4:0"].parameters) == 8
        assert len(blocks["complex:SL2xSL2:0"].parameters) == 4

    def test_su21_parameter_count(self, blocks):
        assert len(blocks["su21:0,0"].parameters) == 6

    def test_pgl2r_counts(self, blocks):
        assert len(blocks["pgl2r:0"].parameters) == 3
        assert len(blocks["pgl2r:1/4"].parameters) == 4

    def test_product_block(self, blocks):
        b = blocks["sl2rxsl2r:0,1/2"]
        assert len(b.parameters) == 16
        real_cases = {b.edge(p.id, 1).case for p in b.parameters}
        assert real_cases == {"r-nonint"}
        mixed_cases = {b.edge(p.id, 0).case for p in b.parameters}
        assert mixed_cases == {"r-I", "nci-I", "r-nonparity"}

    def test_nonintegral_imaginary_excludes_parameters(self, blocks):
        # closed orbits carry no parameters at a non-integral twist
        b = blocks["sl2r:1/2"]
        assert all(p.orbit == "open" for p in b.parameters)
