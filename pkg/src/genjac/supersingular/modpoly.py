"""Classical modular polynomials Phi_l(X, Y) for l in {2, 3, 5, 7}.

The coefficients ship in ``data/modular_polynomials.txt`` as lines
``l i k c`` (coefficient c of X^i Y^k, i >= k; the transpose is implied).
:func:`compute` rebuilds them from the q-expansion of j and is what produced
the file.
"""

from __future__ import annotations

from functools import lru_cache
from importlib import resources

SUPPORTED = (2, 3, 5, 7)

__all__ = ["SUPPORTED", "ModularPolynomial", "modular_polynomial", "compute", "j_coefficients"]


class ModularPolynomial:
    """Symmetric bivariate integer polynomial stored as {(i, k): c}."""

    def __init__(self, ell: int, coeffs: dict[tuple[int, int], int]):
        self.ell = ell
        self.coeffs = {ik: c for ik, c in coeffs.items() if c}

    def coefficient(self, i: int, k: int) -> int:
        return self.coeffs.get((i, k), 0)

    @property
    def degree(self) -> int:
        return self.ell + 1

    def is_symmetric(self) -> bool:
        return all(self.coefficient(k, i) == c for (i, k), c in self.coeffs.items())

    def kronecker_congruence(self) -> bool:
        """Phi_l(X, Y) == (X^l - Y)(X - Y^l) mod l."""
        l = self.ell
        ref = {(l + 1, 0): 1, (l, l): -1, (1, 1): -1, (0, l + 1): 1}
        keys = set(self.coeffs) | set(ref)
        return all((self.coefficient(*ik) - ref.get(ik, 0)) % l == 0 for ik in keys)

    def specialize_y(self, y, add, mul, zero, one) -> list:
        """Coefficients (low to high in X) of Phi(X, y) over any ring."""
        powers = [one]
        for _ in range(self.degree):
            powers.append(mul(powers[-1], y))
        out = [zero] * (self.degree + 1)
        for (i, k), c in self.coeffs.items():
            out[i] = add(out[i], mul(c, powers[k]))
        return out

    def __call__(self, x: int, y: int) -> int:
        return sum(c * x ** i * y ** k for (i, k), c in self.coeffs.items())

    def to_lines(self) -> list[str]:
        return [f"{self.ell} {i} {k} {c}" for (i, k), c in sorted(self.coeffs.items()) if i >= k]


def _load_all() -> dict[int, dict[tuple[int, int], int]]:
    text = resources.files("genjac").joinpath("data/modular_polynomials.txt").read_text()
    table: dict[int, dict[tuple[int, int], int]] = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        l, i, k, c = (int(x) for x in line.split())
        if i < k:
            raise ValueError(f"data line with i < k: {line}")
        d = table.setdefault(l, {})
        d[(i, k)] = c
        d[(k, i)] = c
    return table


@lru_cache(maxsize=None)
def modular_polynomial(ell: int) -> ModularPolynomial:
    """Load Phi_l from the shipped table and self-check it."""
    if ell not in SUPPORTED:
        raise ValueError(f"unsupported ell {ell}; available: {SUPPORTED}")
    P = ModularPolynomial(ell, _load_all()[ell])
    if not P.is_symmetric():
        raise ValueError(f"stored Phi_{ell} is not symmetric")
    if not P.kronecker_congruence():
        raise ValueError(f"stored Phi_{ell} fails the Kronecker congruence")
    if P.coefficient(ell + 1, 0) != 1:
        raise ValueError(f"stored Phi_{ell} is not monic")
    return P


# --- generation from q-expansions -------------------------------------------

def _sigma3(n: int) -> int:
    return sum(d ** 3 for d in range(1, n + 1) if n % d == 0)


def _mul(a: list[int], b: list[int], n: int) -> list[int]:
    out = [0] * n
    for i, x in enumerate(a[:n]):
        if x:
            for k, y in enumerate(b[:n - i]):
                out[i + k] += x * y
    return out


def j_coefficients(n: int) -> list[int]:
    """c(-1), c(0), ..., c(n-2) of j = q^-1 + 744 + 196884 q + ..."""
    e4 = [1] + [240 * _sigma3(k) for k in range(1, n)]
    # Delta/q = prod (1 - q^k)^24
    eta = [1] + [0] * (n - 1)
    for k in range(1, n):
        for _ in range(24):
            for t in range(n - 1, k - 1, -1):
                eta[t] -= eta[t - k]
    inv = [0] * n
    inv[0] = 1
    for t in range(1, n):
        inv[t] = -sum(eta[s] * inv[t - s] for s in range(1, t + 1))
    return _mul(_mul(_mul(e4, e4, n), e4, n), inv, n)


def compute(ell: int) -> ModularPolynomial:
    """Phi_l from power sums of the l+1 roots j(q^l), j(zeta^k q^(1/l))."""
    top = ell * (ell + 1)
    jc = j_coefficients(2 * top + 3)        # index t <-> q^(t-1)
    # powers of j: jpow[m][t] is the coefficient of q^(t-m), kept to q^top
    jpow = [[1] + [0] * top]
    for m in range(1, top + 1):
        prev = jpow[-1]
        cur = [0] * (m + top + 1)
        for a, x in enumerate(prev):
            if x:
                for b in range(0, m + top + 1 - a):
                    cur[a + b] += x * jc[b]
        jpow.append(cur)

    def to_poly_in_j(series: dict[int, int], deg: int) -> list[int]:
        series = dict(series)
        poly = [0] * (deg + 1)
        for k in range(deg, -1, -1):
            c = series.get(-k, 0)
            if c:
                poly[k] = c
                for t, x in enumerate(jpow[k][:k + 1]):
                    series[t - k] = series.get(t - k, 0) - c * x
        if any(v for e, v in series.items() if e <= 0):
            raise ArithmeticError("power sum is not a polynomial in j")
        return poly

    power_sums = []
    for m in range(1, ell + 2):
        series: dict[int, int] = {}
        for t, x in enumerate(jpow[m][:m + 1]):     # j(q^l)^m: q^(l(t-m))
            series[ell * (t - m)] = series.get(ell * (t - m), 0) + x
        for t, x in enumerate(jpow[m][:m + 1]):     # other roots: l * c_n q^(n/l), l | n
            e = t - m
            if e % ell == 0:
                series[e // ell] = series.get(e // ell, 0) + ell * x
        power_sums.append(to_poly_in_j(series, ell * m))

    def padd(a, b):
        n = max(len(a), len(b))
        return [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)]

    def pmul(a, b):
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            for k, y in enumerate(b):
                out[i + k] += x * y
        return out

    elem = [[1]]
    for m in range(1, ell + 2):
        acc = [0]
        for i in range(1, m + 1):
            term = pmul(elem[m - i], power_sums[i - 1])
            acc = padd(acc, term if i % 2 else [-x for x in term])
        if any(x % m for x in acc):
            raise ArithmeticError("Newton identity division not exact")
        elem.append([x // m for x in acc])
    coeffs: dict[tuple[int, int], int] = {}
    for m, e in enumerate(elem):
        sign = -1 if m % 2 else 1
        for k, c in enumerate(e):
            if c:
                coeffs[(ell + 1 - m, k)] = sign * c
    return ModularPolynomial(ell, coeffs)
