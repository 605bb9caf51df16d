"""Shared fixtures: the battery of built-in blocks and cached pipelines."""

from __future__ import annotations

from fractions import Fraction

import pytest

from hodgekl.block import (
    Block,
    build_complex_group,
    build_pgl2r,
    build_sl2c,
    build_sl2r,
    build_sl2r_x_sl2r,
    build_su21,
)
from hodgekl.duality import compute_duality
from hodgekl.hecke import HeckeContext
from hodgekl.hodgepoly import (
    hodge_from_mixed,
    mixed_from_lvm,
    signature_altv,
    signature_from_hodge,
)
from hodgekl.kl import compute_lvm

F = Fraction

# name -> zero-argument builder; the standard battery used across the suite
BLOCK_BUILDERS = {
    "sl2r:0": lambda: build_sl2r(0),
    "sl2r:1/2": lambda: build_sl2r(F(1, 2)),
    "sl2r:1": lambda: build_sl2r(1),
    "sl2r:3/2": lambda: build_sl2r(F(3, 2)),
    "sl2r:-1/2": lambda: build_sl2r(F(-1, 2)),
    "pgl2r:0": lambda: build_pgl2r(0),
    "pgl2r:1/4": lambda: build_pgl2r(F(1, 4)),
    "sl2c:0": lambda: build_sl2c(0),
    "sl2c:1/2": lambda: build_sl2c(F(1, 2)),
    "su21:0,0": lambda: build_su21([0, 0]),
    "su21:1/2,1/2": lambda: build_su21([F(1, 2), F(1, 2)]),
    "su21:0,1/2": lambda: build_su21([0, F(1, 2)]),
    "sl2rxsl2r:0,0": lambda: build_sl2r_x_sl2r(0, 0),
    "sl2rxsl2r:0,1/2": lambda: build_sl2r_x_sl2r(0, F(1, 2)),
    "complex:SL2:0": lambda: build_complex_group("SL2", [0]),
    "complex:SL3:0": lambda: build_complex_group("SL3", [0, 0]),
    "complex:Sp4:0": lambda: build_complex_group("Sp4", [0, 0]),
    "complex:SL2xSL2:0": lambda: build_complex_group("SL2xSL2", [0, 0]),
}

BLOCK_NAMES = sorted(BLOCK_BUILDERS)


class Pipeline:
    """One block with lazily computed derived data, shared across tests."""

    def __init__(self, block: Block):
        self.block = block
        self._ctx = None
        self._rmat = None
        self._lvm = None
        self._mixed = None
        self._hodge = None
        self._sig_h = None
        self._sig_a = None

    @property
    def ctx(self):
        if self._ctx is None:
            self._ctx = HeckeContext(self.block)
        return self._ctx

    @property
    def rmat(self):
        if self._rmat is None:
            self._rmat = compute_duality(self.block, self.ctx)
        return self._rmat

    @property
    def lvm(self):
        if self._lvm is None:
            self._lvm = compute_lvm(self.block, self.rmat)
        return self._lvm

    @property
    def mixed(self):
        if self._mixed is None:
            self._mixed = mixed_from_lvm(self.block, self.lvm)
        return self._mixed

    @property
    def hodge(self):
        if self._hodge is None:
            self._hodge = hodge_from_mixed(self.block, self.mixed)
        return self._hodge

    @property
    def sig_hodge(self):
        if self._sig_h is None:
            self._sig_h = signature_from_hodge(self.block, self.hodge)
        return self._sig_h

    @property
    def sig_altv(self):
        if self._sig_a is None:
            self._sig_a = signature_altv(self.block, self.lvm)
        return self._sig_a


@pytest.fixture(scope="session")
def pipelines():
    return {name: Pipeline(mk()) for name, mk in BLOCK_BUILDERS.items()}


@pytest.fixture(scope="session")
def blocks(pipelines):
    return {name: p.block for name, p in pipelines.items()}
