"""Exact polynomial algebra over the rationals."""

from .ideal import Ideal, codim, division, groebner_basis, minors_ideal, normal_form, saturate
from .matrix import (
    Matrix,
    NotInModule,
    images_equal,
    image_contains,
    lift,
    rank_fraction_field,
    solve_fraction_free,
    syzygies,
)
from .orders import DEGREVLEX, LEX, ModuleOrder, MonomialOrder, block_order, elimination
from .ring import ParseError, Polynomial, Ring, RingMismatch, parse_polynomial

__all__ = [
    "Ideal", "codim", "division", "groebner_basis", "minors_ideal", "normal_form", "saturate",
    "Matrix", "NotInModule", "images_equal", "image_contains", "lift", "rank_fraction_field",
    "solve_fraction_free", "syzygies", "DEGREVLEX", "LEX", "ModuleOrder", "MonomialOrder",
    "block_order", "elimination", "ParseError", "Polynomial", "Ring", "RingMismatch",
    "parse_polynomial",
]
