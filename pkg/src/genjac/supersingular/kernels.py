"""Pick the compiled F_{p^2} kernels when built, else the numpy ones.

Setting GENJAC_PURE_KERNELS=1 forces the fallback.
"""

from __future__ import annotations

import os

from . import _pykernels

MAX_P = 1 << 20

if os.environ.get("GENJAC_PURE_KERNELS") == "1":
    _impl = _pykernels
    BACKEND = "numpy"
else:
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
        BACKEND = "numpy"


def _check(p: int) -> None:
    if not 2 < p < MAX_P:
        raise ValueError(f"kernels need an odd prime below {MAX_P}, got {p}")


def poly_roots(p: int, s: int, cu, cv=None) -> list[tuple[int, int]]:
    """Roots in F_{p^2} = F_p[w]/(w^2 - s) of a polynomial given low to high."""
    _check(p)
    cu = [int(x) for x in cu]
    cv = [0] * len(cu) if cv is None else [int(x) for x in cv]
    return sorted(_impl.poly_roots(p, s, cu, cv))


def char_sum(p: int, s: int, a: tuple[int, int], b: tuple[int, int]) -> int:
    """Sum of the quadratic character of x^3 + a x + b over F_{p^2}."""
    _check(p)
    return int(_impl.char_sum(p, s, a[0], a[1], b[0], b[1]))
