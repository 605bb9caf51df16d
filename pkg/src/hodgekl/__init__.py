"""Exact computation of twisted multiplicity polynomials for K-orbit blocks.

The package computes, in exact integer/rational arithmetic, the change of
basis between standard and irreducible classes for blocks of twisted
local-system parameters on flag-variety orbits, together with its Hodge
two-variable refinement and the signature refinement with an order-two sign
variable.  See README.md for the CLI and the verification battery.
"""

from .block import (
    Block,
    BlockError,
    EdgeRecord,
    OrbitDatum,
    Parameter,
    SchemaError,
    SignCharacter,
    ValidationFailure,
    block_from_json,
    block_product,
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
from .duality import RMatrix, compute_duality, compute_duality_oracle, verify_duality
from .hecke import HeckeContext, HeckeElement, check_relations
from .hodgepoly import (
    ParityError,
    hodge_from_mixed,
    mixed_from_lvm,
    signature_altv,
    signature_from_hodge,
)
from .kl import KLError, MultiplicityMatrix, compute_lvm, verify_selfdual
from .poly import QuarterLaurent, SignedULaurent
from .rootdata import RootDatum, Weight, builtin_root_datum
from .verify import run_verification

__version__ = "0.1.0"
