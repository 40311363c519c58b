"""Supersingular elliptic curves over F_{p^2}: enumeration, counts, Brandt matrices."""

from .brandt import (
    BrandtMatrix,
    SupersingularData,
    atkin_lehner_on_h1,
    brandt,
    counts,
    cyclic_subgroups,
    hasse_polynomial,
    hecke_on_char_X0p,
    supersingular_js,
    x0p_gamma_basis,
    x0p_graph,
)
from .fp2 import Fp2, Fp2Element, field, is_prime, legendre
from .modpoly import SUPPORTED, ModularPolynomial, modular_polynomial
from .velu import (
    curve_for_j,
    is_supersingular,
    j_invariant,
    point_count,
    supersingular_by_counting,
    velu_isogenies,
    velu_isogeny_oracle,
)

__all__ = [
    "BrandtMatrix",
    "SupersingularData",
    "atkin_lehner_on_h1",
    "brandt",
    "counts",
    "cyclic_subgroups",
    "hasse_polynomial",
    "hecke_on_char_X0p",
    "supersingular_js",
    "x0p_gamma_basis",
    "x0p_graph",
    "Fp2",
    "Fp2Element",
    "field",
    "is_prime",
    "legendre",
    "SUPPORTED",
    "ModularPolynomial",
    "modular_polynomial",
    "curve_for_j",
    "is_supersingular",
    "j_invariant",
    "point_count",
    "supersingular_by_counting",
    "velu_isogenies",
    "velu_isogeny_oracle",
]
