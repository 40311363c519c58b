"""The field F_{p^2} = F_p[w]/(w^2 - s), s the least quadratic non-residue."""

from __future__ import annotations

from functools import lru_cache


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


class Fp2Element:
    __slots__ = ("field", "u", "v")

    def __init__(self, field: "Fp2", u: int, v: int = 0):
        self.field = field
        self.u = u % field.p
        self.v = v % field.p

    def _coerce(self, other) -> "Fp2Element":
        if isinstance(other, Fp2Element):
            if other.field.p != self.field.p:
                raise ValueError("elements of different fields")
            return other
        return Fp2Element(self.field, int(other))

    def __add__(self, other):
        o = self._coerce(other)
        return Fp2Element(self.field, self.u + o.u, self.v + o.v)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return Fp2Element(self.field, self.u - o.u, self.v - o.v)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return Fp2Element(self.field, -self.u, -self.v)

    def __mul__(self, other):
        o = self._coerce(other)
        s = self.field.s
        return Fp2Element(self.field, self.u * o.u + s * self.v * o.v, self.u * o.v + self.v * o.u)

    __rmul__ = __mul__

    def norm(self) -> int:
        p = self.field.p
        return (self.u * self.u - self.field.s * self.v * self.v) % p

    def inverse(self) -> "Fp2Element":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero in F_p^2")
        ninv = pow(n, -1, self.field.p)
        return Fp2Element(self.field, self.u * ninv, -self.v * ninv)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = self.field.one
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def frobenius(self) -> "Fp2Element":
        """x -> x^p, i.e. w -> -w."""
        return Fp2Element(self.field, self.u, -self.v)

    def is_zero(self) -> bool:
        return self.u == 0 and self.v == 0

    def in_prime_field(self) -> bool:
        return self.v == 0

    def is_square(self) -> bool:
        return legendre(self.norm(), self.field.p) >= 0

    @property
    def key(self) -> tuple[int, int]:
        return (self.u, self.v)

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = Fp2Element(self.field, other)
        return isinstance(other, Fp2Element) and other.field.p == self.field.p and self.key == other.key

    def __hash__(self) -> int:
        return hash((self.field.p, self.u, self.v))

    def __lt__(self, other: "Fp2Element") -> bool:
        return self.key < other.key

    def __repr__(self) -> str:
        if self.v == 0:
            return str(self.u)
        return f"{self.u}+{self.v}w" if self.u else f"{self.v}w"


class Fp2:
    def __init__(self, p: int):
        if not is_prime(p) or p == 2:
            raise ValueError(f"{p} is not an odd prime")
        self.p = p
        self.s = next(a for a in range(2, p) if legendre(a, p) == -1)

    def __call__(self, u: int, v: int = 0) -> Fp2Element:
        return Fp2Element(self, u, v)

    @property
    def zero(self) -> Fp2Element:
        return Fp2Element(self, 0)

    @property
    def one(self) -> Fp2Element:
        return Fp2Element(self, 1)

    def elements(self):
        for u in range(self.p):
            for v in range(self.p):
                yield Fp2Element(self, u, v)

    def __eq__(self, other) -> bool:
        return isinstance(other, Fp2) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("Fp2", self.p))

    def __repr__(self) -> str:
        return f"Fp2({self.p}; w^2={self.s})"


@lru_cache(maxsize=None)
def field(p: int) -> Fp2:
    return Fp2(p)


# --- dense polynomials over F_{p^2}, coefficients low to high ---------------

def poly_trim(a: list[Fp2Element]) -> list[Fp2Element]:
    a = list(a)
    while a and a[-1].is_zero():
        a.pop()
    return a


def poly_eval(a: list[Fp2Element], x: Fp2Element) -> Fp2Element:
    acc = x.field.zero
    for c in reversed(a):
        acc = acc * x + c
    return acc


def poly_divide_linear(a: list[Fp2Element], r: Fp2Element) -> tuple[list[Fp2Element], Fp2Element]:
    """Quotient and remainder of a(X) by (X - r)."""
    if not a:
        return [], r.field.zero
    out = [r.field.zero] * (len(a) - 1)
    acc = r.field.zero
    for i in range(len(a) - 1, -1, -1):
        acc = acc * r + a[i]
        if i:
            out[i - 1] = acc
    return out, acc


def root_multiplicity(a: list[Fp2Element], r: Fp2Element) -> int:
    a = poly_trim(a)
    if not a:
        raise ValueError("zero polynomial")
    m = 0
    while len(a) > 1:
        q, rem = poly_divide_linear(a, r)
        if not rem.is_zero():
            break
        a = q
        m += 1
    return m
