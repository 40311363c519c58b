"""Short Weierstrass curves over F_{p^2} and Velu's formulas for l = 2, 3.

Only x-coordinates of kernel points are used, so a kernel point whose y lies
in a quadratic extension is still handled.  These routines serve as an
oracle independent of the modular polynomials.
"""

from __future__ import annotations

from .fp2 import Fp2Element, field
from .kernels import char_sum, poly_roots

__all__ = ["curve_for_j", "j_invariant", "velu_isogenies", "velu_isogeny_oracle", "point_count", "is_supersingular", "supersingular_by_counting"]


def curve_for_j(j: Fp2Element) -> tuple[Fp2Element, Fp2Element]:
    """(a, b) with y^2 = x^3 + a x + b having j-invariant j."""
    F = j.field
    if j.is_zero():
        return F.zero, F.one
    if j == 1728:
        return F.one, F.zero
    t = 1728 - j
    return 3 * j * t, 2 * j * t * t


def j_invariant(a: Fp2Element, b: Fp2Element) -> Fp2Element:
    disc = 4 * a ** 3 + 27 * b * b
    if disc.is_zero():
        raise ValueError("singular curve")
    return 1728 * 4 * a ** 3 / disc


def _roots(coeffs: list[Fp2Element]) -> list[Fp2Element]:
    F = coeffs[0].field
    return [F(u, v) for u, v in poly_roots(F.p, F.s, [c.u for c in coeffs], [c.v for c in coeffs])]


def velu_isogenies(a: Fp2Element, b: Fp2Element, ell: int) -> list[tuple[Fp2Element, Fp2Element]]:
    """All (kernel x-coordinate, quotient j-invariant) for order-l subgroups."""
    F = a.field
    if (4 * a ** 3 + 27 * b * b).is_zero():
        raise ValueError("singular curve")
    if ell == 2:
        xs = _roots([b, a, F.zero, F.one])
    elif ell == 3:
        xs = _roots([-(a * a), 12 * b, 6 * a, F.zero, F(3)])
    else:
        raise ValueError("Velu oracle supports l = 2, 3 only")
    if len(xs) != ell + 1:
        raise ValueError(f"only {len(xs)} of the {ell + 1} kernels have x defined over F_p^2")
    out = []
    for x in xs:
        gx = 3 * x * x + a
        vq = gx if ell == 2 else 2 * gx
        uq = 4 * (x ** 3 + a * x + b)
        w = uq + x * vq
        out.append((x, j_invariant(a - 5 * vq, b - 7 * w)))
    return out


def point_count(a: Fp2Element, b: Fp2Element) -> int:
    """#E(F_{p^2}) by summing the quadratic character."""
    F = a.field
    return F.p ** 2 + 1 + char_sum(F.p, F.s, a.key, b.key)


def is_supersingular(j: Fp2Element) -> bool:
    a, b = curve_for_j(j)
    return (point_count(a, b) - 1) % j.field.p == 0


def supersingular_by_counting(p: int) -> list[Fp2Element]:
    """Exhaustive oracle: every j in F_{p^2} whose curve has trace 0 mod p."""
    F = field(p)
    return sorted(j for j in F.elements() if is_supersingular(j))


velu_isogeny_oracle = velu_isogenies
