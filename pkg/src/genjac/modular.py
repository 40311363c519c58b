"""Cusps and Hecke operators for X_0(N); special fibres of X_0(pM) and X_0(p^2).

A geometric cusp of X_0(N) is recorded as (d, c) with d | N and c a unit class
modulo m_d = gcd(d, N/d): the pair (N_d, C_zeta) with zeta = zeta_N^t has
c = t mod m_d.  Galois acts by c -> s*c, and the cusps over one divisor d form
a single closed point z_d with residue field Q(mu_{m_d}).
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping, NamedTuple, Sequence

from .abelian import FGAbGroup, IntMatrix, cokernel_presentation, extend_through_finite_index
from .graphs import ExtendedGraph, GraphWithModulus
from .neron import (
    JmResult,
    ModulusIncidence,
    SpecialFibre,
    component_group_J,
    component_group_Jm,
    tori_phi_maps,
    validate_fibre,
    FibreError,
)
from .supersingular.fp2 import is_prime

__all__ = [
    "GeometricCusp",
    "CuspidalDivisor",
    "FibreRecipe",
    "X0pMFibre",
    "X0p2Fibre",
    "divisors",
    "euler_phi",
    "cusps",
    "all_cusps",
    "hecke_constants",
    "hecke_transpose_cusps",
    "hecke_matrix",
    "atkin_lehner_cusps",
    "degeneracy_u",
    "degeneracy_v",
    "henselian_point",
    "x0pM_fibre",
    "x0p2_fibre",
    "x0p2_parameters",
    "closed_form_X0pM",
    "closed_form_phiJ",
    "x0p2_closed_form",
    "cuspidal_splitting",
    "hecke_on_phi",
    "hecke_on_phi_data",
]


def divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def euler_phi(n: int) -> int:
    return sum(1 for t in range(1, n + 1) if gcd(t, n) == 1)


def _valuation(n: int, ell: int) -> int:
    k = 0
    while n % ell == 0:
        n //= ell
        k += 1
    return k


def _m(N: int, d: int) -> int:
    return gcd(d, N // d)


@dataclass(frozen=True, order=True)
class GeometricCusp:
    N: int
    d: int
    c: int = 1

    def __post_init__(self):
        if self.N < 1 or self.d < 1 or self.N % self.d:
            raise ValueError(f"d = {self.d} does not divide N = {self.N}")
        m = self.m
        c = self.c % m if m > 1 else 1
        if m > 1 and gcd(c, m) != 1:
            raise ValueError(f"class {self.c} is not a unit mod {m}")
        object.__setattr__(self, "c", c)

    @property
    def m(self) -> int:
        return _m(self.N, self.d)

    @property
    def t(self) -> int:
        """Least t > 0 with t = c mod m and gcd(t, N) = 1, so zeta = zeta_N^t."""
        return next(t for t in range(self.c, self.c + self.N * self.m + 1, self.m) if gcd(t, self.N) == 1)

    def galois(self, s: int) -> "GeometricCusp":
        """Image under zeta -> zeta^s."""
        return GeometricCusp(self.N, self.d, self.c * s)

    def is_rational(self) -> bool:
        return euler_phi(self.m) == 1

    def label(self) -> str:
        if self.d == 1:
            return "inf"
        if self.d == self.N:
            return "0"
        return f"{self.d}:{self.c}" if self.m > 2 else str(self.d)

    def __repr__(self) -> str:
        return f"({self.d},{self.c})"


def cusps(N: int) -> list[list[GeometricCusp]]:
    """Galois orbits of geometric cusps, one per divisor d of N."""
    if N < 1:
        raise ValueError("N must be positive")
    out = []
    for d in divisors(N):
        m = _m(N, d)
        out.append([GeometricCusp(N, d, c) for c in range(1, m + 1) if gcd(c, m) == 1] if m > 1
                   else [GeometricCusp(N, d, 1)])
    return out


def all_cusps(N: int) -> list[GeometricCusp]:
    return [z for orbit in cusps(N) for z in orbit]


class CuspidalDivisor:
    """Finite formal sum of geometric cusps of X_0(N)."""

    def __init__(self, N: int, terms: Mapping[GeometricCusp, int] | Iterable[tuple[GeometricCusp, int]] = ()):
        self.N = N
        acc: dict[GeometricCusp, int] = defaultdict(int)
        items = terms.items() if isinstance(terms, Mapping) else terms
        for z, k in items:
            if z.N != N:
                raise ValueError(f"cusp of level {z.N} in a divisor of level {N}")
            acc[z] += int(k)
        self.terms = {z: k for z, k in sorted(acc.items()) if k}

    @classmethod
    def of(cls, N: int, d: int, c: int = 1, coeff: int = 1) -> "CuspidalDivisor":
        return cls(N, {GeometricCusp(N, d, c): coeff})

    @classmethod
    def orbit_sum(cls, N: int, d: int, coeff: int = 1) -> "CuspidalDivisor":
        orbit = next(o for o in cusps(N) if o[0].d == d)
        return cls(N, {z: coeff for z in orbit})

    def degree(self) -> int:
        return sum(self.terms.values())

    def __add__(self, other: "CuspidalDivisor") -> "CuspidalDivisor":
        self._same(other)
        return CuspidalDivisor(self.N, list(self.terms.items()) + list(other.terms.items()))

    def __sub__(self, other: "CuspidalDivisor") -> "CuspidalDivisor":
        return self + other.scale(-1)

    def scale(self, k: int) -> "CuspidalDivisor":
        return CuspidalDivisor(self.N, {z: k * v for z, v in self.terms.items()})

    def __rmul__(self, k: int) -> "CuspidalDivisor":
        return self.scale(k)

    def galois(self, s: int) -> "CuspidalDivisor":
        return CuspidalDivisor(self.N, [(z.galois(s), k) for z, k in self.terms.items()])

    def _same(self, other: "CuspidalDivisor") -> None:
        if other.N != self.N:
            raise ValueError("divisors of different levels")

    def __eq__(self, other) -> bool:
        return isinstance(other, CuspidalDivisor) and self.N == other.N and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.N, tuple(self.terms.items())))

    def vector(self) -> list[int]:
        return [self.terms.get(z, 0) for z in all_cusps(self.N)]

    def to_json(self) -> dict:
        return {"N": self.N, "terms": [{"d": z.d, "c": z.c, "coeff": k} for z, k in self.terms.items()]}

    @classmethod
    def from_json(cls, data: dict | str) -> "CuspidalDivisor":
        if isinstance(data, str):
            data = json.loads(data)
        N = int(data["N"])
        return cls(N, [(GeometricCusp(N, int(t["d"]), int(t.get("c", 1))), int(t["coeff"])) for t in data["terms"]])

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"{k}*{z!r}" for z, k in self.terms.items())


class HeckeConstants(NamedTuple):
    M: int
    k: int
    a: int
    b: int
    q: int


def hecke_constants(N: int, ell: int) -> HeckeConstants:
    """a = 1 mod l^k with a*l + b*M = 1, and q = a^-1 mod N (least positive)."""
    k = _valuation(N, ell)
    M = N // ell ** k
    lk = ell ** k
    # CRT: a = 1 mod l^k, a = l^-1 mod M
    inv_l = pow(ell, -1, M) if M > 1 else 0
    a = next(x for x in range(1, N + 1) if x % lk == 1 % lk and (M == 1 or x % M == inv_l))
    if (a * ell - 1) % M:
        raise ArithmeticError("bad CRT lift")
    b = (1 - a * ell) // M
    q = pow(a, -1, N) if N > 1 else 1
    return HeckeConstants(M, k, a, b, q)


def _gamma(e0: int, ell: int, k: int, i: int) -> list[int]:
    """Units s mod e0*l^(k+1-i) with s = 1 mod e0*l^(k-i)."""
    big = e0 * ell ** (k + 1 - i)
    small = e0 * ell ** (k - i)
    return [s for s in (1 + small * t for t in range(ell)) if gcd(s, big) == 1]


def _tT_on_cusp(z: GeometricCusp, ell: int, hc: HeckeConstants) -> list[tuple[GeometricCusp, int]]:
    N, d, t = z.N, z.d, z.t
    if hc.k == 0:
        return [(GeometricCusp(N, d, ell * t), 1), (GeometricCusp(N, d, hc.a * t), ell)]
    k, M = hc.k, hc.M
    i = _valuation(d, ell)
    d0 = d // ell ** i
    e0 = gcd(d0, M // d0)
    if i == 0:
        return [(GeometricCusp(N, d, hc.a * t), ell)]
    if 2 * i < k + 1:
        return [(GeometricCusp(N, d // ell, t), ell)]
    out = [(GeometricCusp(N, d // ell, s * t), 1) for s in _gamma(e0, ell, k, i)]
    if i == k:
        out.append((GeometricCusp(N, d, hc.q * t), 1))
    return out


def hecke_transpose_cusps(N: int, ell: int, D: CuspidalDivisor) -> CuspidalDivisor:
    """tT_l on cuspidal divisors of X_0(N)."""
    if not is_prime(ell):
        raise ValueError(f"ell = {ell} is not prime")
    if D.N != N:
        raise ValueError("divisor has the wrong level")
    hc = hecke_constants(N, ell)
    terms: list[tuple[GeometricCusp, int]] = []
    for z, k in D.terms.items():
        terms.extend((w, k * r) for w, r in _tT_on_cusp(z, ell, hc))
    return CuspidalDivisor(N, terms)


def hecke_matrix(N: int, ell: int) -> IntMatrix:
    """Matrix of tT_l on Z[cusps]; column j is the image of the j-th cusp."""
    cs = all_cusps(N)
    cols = [hecke_transpose_cusps(N, ell, CuspidalDivisor(N, {z: 1})).vector() for z in cs]
    return IntMatrix.from_columns(cols, len(cs))


def atkin_lehner_cusps(N: int, D: CuspidalDivisor) -> CuspidalDivisor:
    """W_p swaps inf and 0 for N = p or p^2 (rational cusps only)."""
    p = next((q for q in range(2, N + 1) if N % q == 0), None)
    if p is None or not (N == p or N == p * p) or not is_prime(p):
        raise ValueError(f"Atkin-Lehner on cusps is only implemented for N = p, p^2 (got {N})")
    if D.N != N:
        raise ValueError("divisor has the wrong level")
    swap = {1: N, N: 1}
    out = []
    for z, k in D.terms.items():
        if z.d not in swap:
            raise ValueError("support must be on the rational cusps inf and 0")
        out.append((GeometricCusp(N, swap[z.d]), k))
    return CuspidalDivisor(N, out)


# --- degeneracy maps X_0(N l) -> X_0(N) on cusps ---------------------------

def degeneracy_u(N: int, ell: int, z: GeometricCusp) -> tuple[GeometricCusp, int]:
    """u(E, C) = (E, lC) on a cusp of level N*l, with its ramification index."""
    if z.N != N * ell:
        raise ValueError("cusp must have level N*l")
    hc = hecke_constants(N, ell)
    i = _valuation(z.d, ell)
    img = GeometricCusp(N, z.d, hc.a * z.c) if i == 0 else GeometricCusp(N, z.d // ell, z.c)
    return img, (1 if 2 * i <= hc.k + 1 else ell)


def degeneracy_v(N: int, ell: int, z: GeometricCusp) -> tuple[GeometricCusp, int]:
    """v(E, C) = (E/NC, C/NC) on a cusp of level N*l, with its ramification index."""
    if z.N != N * ell:
        raise ValueError("cusp must have level N*l")
    hc = hecke_constants(N, ell)
    i = _valuation(z.d, ell)
    img = GeometricCusp(N, z.d, z.c) if N % z.d == 0 else GeometricCusp(N, z.d // ell, hc.a * z.c)
    return img, (1 if 2 * i >= hc.k + 1 else ell)


def henselian_point(z: GeometricCusp, p: int) -> tuple[tuple[int, int], int]:
    """The point over the strict henselisation at p containing z, and its e."""
    m = z.m
    pm = p ** _valuation(m, p)
    mp = m // pm
    return (z.d, z.c % mp if mp > 1 else 0), euler_phi(pm)


# --- special fibres ---------------------------------------------------------

@dataclass(frozen=True)
class FibreRecipe:
    model: str
    p: int
    M: int
    params: tuple[int, ...]


class X0pMFibre(NamedTuple):
    fibre: SpecialFibre
    modulus: ModulusIncidence
    graph: GraphWithModulus
    recipe: FibreRecipe


class X0p2Fibre(NamedTuple):
    fibre: SpecialFibre
    modulus_full: ModulusIncidence
    modulus_prime: ModulusIncidence
    recipe: FibreRecipe


def _check_p(p: int) -> None:
    if not is_prime(p) or p <= 3:
        raise ValueError(f"p must be a prime > 3, got {p}")


def x0pM_fibre(p: int, M: int, counts: Sequence[int]) -> X0pMFibre:
    """Regular model of X_0(pM) at p with the modulus (inf) + (0)."""
    _check_p(p)
    if M < 1 or gcd(p, M) != 1:
        raise ValueError("need gcd(p, M) = 1")
    n, e2, e3 = (int(x) for x in counts)
    if min(n, e2, e3) < 0 or n < e2 + e3:
        raise ValueError(f"inconsistent counts {(n, e2, e3)}")
    labels = ["Zinf", "Z0"] + [f"E{i}" for i in range(1, e2 + 1)]
    for i in range(1, e3 + 1):
        labels += [f"Finf{i}", f"F0{i}"]
    idx = {x: t for t, x in enumerate(labels)}
    c = len(labels)
    I = [[0] * c for _ in range(c)]

    def meet(x, y, v=1):
        I[idx[x]][idx[y]] = v
        I[idx[y]][idx[x]] = v

    I[0][0] = I[1][1] = -n
    meet("Zinf", "Z0", n - e2 - e3)
    for i in range(1, e2 + 1):
        I[idx[f"E{i}"]][idx[f"E{i}"]] = -2
        meet(f"E{i}", "Zinf")
        meet(f"E{i}", "Z0")
    for i in range(1, e3 + 1):
        for a in (f"Finf{i}", f"F0{i}"):
            I[idx[a]][idx[a]] = -2
        meet(f"Finf{i}", "Zinf")
        meet(f"F0{i}", "Z0")
        meet(f"Finf{i}", f"F0{i}")
    fibre = SpecialFibre(p, tuple(labels), (1,) * c, (0,) * c, IntMatrix.from_rows(I, c))
    h = IntMatrix.from_rows([[1 if x == "Zinf" else 0 for x in labels], [1 if x == "Z0" else 0 for x in labels]], c)
    modulus = ModulusIncidence(("inf", "0"), (1, 1), h)
    report = validate_fibre(fibre, modulus)
    if report:
        raise FibreError(report)
    # one node per unit of intersection between distinct components
    nodes, branches = [], []
    for s in range(c):
        for t in range(s + 1, c):
            for r in range(I[s][t]):
                a = f"P{s:02d}{t:02d}{r:03d}"
                nodes.append(a)
                branches.append((a + "_" + labels[s], a, labels[s]))
                branches.append((a + "_" + labels[t], a, labels[t]))
    graph = GraphWithModulus(ExtendedGraph.from_branches(nodes, labels, branches), {}, {"cinf": "Zinf", "c0": "Z0"})
    return X0pMFibre(fibre, modulus, graph, FibreRecipe("x0pM", p, M, (n, e2, e3)))


def x0p2_parameters(p: int) -> tuple[int, int, int, int]:
    """(k, a, b, Mt) with p = 12k + 1 + 4a + 6b and Mt = (p^2 - 1)/12 - k."""
    _check_p(p)
    r = (p - 1) % 12
    a, b = {0: (0, 0), 4: (1, 0), 6: (0, 1), 10: (1, 1)}[r]
    k = (p - 1 - 4 * a - 6 * b) // 12
    return k, a, b, (p * p - 1) // 12 - k


def x0p2_fibre(p: int) -> X0p2Fibre:
    """Regular model of X_0(p^2) at p with the full cuspidal modulus and (inf)+(0)."""
    k, a, b, Mt = x0p2_parameters(p)
    labels = ("Z0", "Z1", "Z2", "E", "F")
    I = [
        [-Mt, k, k, b, a],
        [k, -1, k, 1, 1],
        [k, k, -Mt, b, a],
        [b, 1, b, -2, 0],
        [a, 1, a, 0, -3],
    ]
    d = (1, p - 1, 1, (p - 1 + 2 * b) // 2, (p - 1 + 2 * a) // 3)
    fibre = SpecialFibre(p, labels, d, (0,) * 5, IntMatrix.from_rows(I, 5))
    h = IntMatrix.from_rows([[1, 0, 0, 0, 0], [0, 1, 0, 0, 0], [0, 0, 1, 0, 0]], 5)
    full = ModulusIncidence(("z1", "zp", "zp2"), (1, p - 1, 1), h)
    prime = full.restrict(("z1", "zp2"))
    for m in (full, prime):
        report = validate_fibre(fibre, m)
        if report:
            raise FibreError(report)
    return X0p2Fibre(fibre, full, prime, FibreRecipe("x0p2", p, 1, (k, a, b, Mt)))


# --- closed forms -------------------------------------------------------------

def closed_form_X0pM(p: int, M: int, counts: Sequence[int]) -> tuple[FGAbGroup, int]:
    """Phi(J_m) for m = (inf)+(0) and the free coordinate of the torus generator."""
    n, e2, e3 = counts
    group = FGAbGroup.from_cyclic_orders([2] * max(e2 - 1, 0) + [3] * max(e3 - 1, 0), 1)
    if e2 == 0 and e3 == 0:
        image = n
    elif e3 == 0:
        image = 2 * n - e2
    elif e2 == 0:
        image = 3 * n - 2 * e3
    else:
        image = 6 * n - 3 * e2 - 4 * e3
    return group, image


def closed_form_phiJ(p: int, M: int, counts: Sequence[int]) -> FGAbGroup:
    n, e2, e3 = counts
    P = 2 ** min(e2, 2) * 3 ** min(e3, 2) * (Fraction(n) - Fraction(e2, 2) - Fraction(2 * e3, 3))
    if P.denominator != 1 or P <= 0:
        raise ValueError(f"P = {P} is not a positive integer; counts {tuple(counts)} are inconsistent")
    return FGAbGroup.from_cyclic_orders([int(P)] + [2] * max(e2 - 2, 0) + [3] * max(e3 - 2, 0))


class X0p2ClosedForm(NamedTuple):
    group: FGAbGroup
    V0: tuple[int, int]
    V1: tuple[int, int]
    group_prime: FGAbGroup
    V0_prime: int
    phi_J_order: int


def x0p2_closed_form(p: int) -> X0p2ClosedForm:
    k, a, b, Mt = x0p2_parameters(p)
    v0 = (Mt + (3 * b - 2 * a) * k - a + b, -6 * k - 2 * a - 3 * b)
    v1 = (-k - b, 1)
    order = (p * p - 1) // 24
    return X0p2ClosedForm(FGAbGroup.free(2), v0, v1, FGAbGroup.free(1), order, order)


# --- general cuspidal moduli on X_0(pM) --------------------------------------

class Splitting(NamedTuple):
    case: str
    predicted: FGAbGroup
    direct: FGAbGroup


def cuspidal_splitting(fibre: SpecialFibre, assignment: Mapping[str, str]) -> Splitting:
    """Phi(J_m) for a cuspidal modulus whose points meet Zinf or Z0.

    ``assignment`` maps cusp labels to the component their closure meets.
    """
    if not assignment:
        raise ValueError("modulus must be nonempty")
    comps = set(assignment.values())
    if not comps <= {"Zinf", "Z0"}:
        raise ValueError("cusps must meet Zinf or Z0")
    labels = tuple(sorted(assignment))

    def incidence(pts):
        rows = [[int(x == assignment[z]) for x in fibre.labels] for z in pts]
        return ModulusIncidence(tuple(pts), (1,) * len(pts), IntMatrix.from_rows(rows, fibre.size))

    direct = component_group_Jm(fibre, incidence(labels)).group
    k = len(labels)
    if len(comps) == 1:
        predicted = component_group_J(fibre).group.direct_sum(FGAbGroup.free(k - 1))
        case = "one-component"
    else:
        x_inf = next(z for z in labels if assignment[z] == "Zinf")
        x_0 = next(z for z in labels if assignment[z] == "Z0")
        base = component_group_Jm(fibre, incidence((x_inf, x_0))).group
        predicted = base.direct_sum(FGAbGroup.free(k - 2))
        case = "two-component"
    return Splitting(case, predicted, direct)


# --- Hecke on component groups ------------------------------------------------

class HeckeOnPhi(NamedTuple):
    scalar: int | None
    on_torus: IntMatrix
    on_free_part: IntMatrix


def hecke_on_phi(p: int, M: int, ell: int, counts: Sequence[int] | None = None) -> int:
    """The scalar by which T_l acts on Phi(J_m) of X_0(pM), m = (inf)+(0)."""
    data = hecke_on_phi_data(p, M, ell, counts)
    if data.scalar is None:
        raise ArithmeticError(f"T_{ell} is not scalar on Phi(J_m)")
    return data.scalar


def hecke_on_phi_data(p: int, M: int, ell: int, counts: Sequence[int] | None = None) -> HeckeOnPhi:
    """T_l = v_* u^* on Phi(T_m), extended to the free part of Phi(J_m).

    The torus part has finite index in the free quotient, so the extension is
    unique if it exists; failure raises ValueError.
    """
    _check_p(p)
    if not is_prime(ell):
        raise ValueError(f"ell = {ell} is not prime")
    N = p * M
    if counts is None:
        from .supersingular import counts as ss_counts
        counts = ss_counts(p, M)
    data = x0pM_fibre(p, M, counts)
    jm = component_group_Jm(data.fibre, data.modulus)
    pts = [GeometricCusp(N, 1), GeometricCusp(N, N)]
    return _hecke_via_tori(N, p, ell, pts, ["inf", "0"], jm)


def _hecke_via_tori(N: int, p: int, ell: int, pts: list[GeometricCusp], names: list[str], jm: JmResult) -> HeckeOnPhi:
    support = set(pts)
    # Henselian points of the modulus, in the order of ``names``
    hens = {}
    for z, name in zip(pts, names):
        key, e = henselian_point(z, p)
        if key in hens:
            raise ValueError("modulus points must be distinct henselian points")
        hens[key] = (name, e)
    e_map = {name: e for name, e in hens.values()}
    upper = [w for w in all_cusps(N * ell) if degeneracy_v(N, ell, w)[0] in support]
    e_prime: dict[str, int] = {}
    u_map: dict[str, str] = {}
    v_map: dict[str, str] = {}
    r_v: dict[str, int] = {}
    for w in upper:
        key, e = henselian_point(w, p)
        name = f"{key[0]}:{key[1]}"
        uz, _ = degeneracy_u(N, ell, w)
        vz, rv = degeneracy_v(N, ell, w)
        if uz not in support:
            raise ValueError("modulus is not stable under T_l")
        ukey = hens[henselian_point(uz, p)[0]][0]
        vkey = hens[henselian_point(vz, p)[0]][0]
        if name in e_prime and (u_map[name], v_map[name], r_v[name]) != (ukey, vkey, rv):
            raise ArithmeticError("degeneracy maps do not respect henselian points")
        e_prime[name], u_map[name], v_map[name], r_v[name] = e, ukey, vkey, rv
    u_pull, _ = tori_phi_maps(u_map, e_map, e_prime, {x: 1 for x in e_prime}, require_surjective=False)
    _, v_push = tori_phi_maps(v_map, e_map, e_prime, r_v)
    T = u_pull.compose(v_push)
    torus = cokernel_presentation(T.src_relations)
    if torus.group.invariant_factors:
        raise ValueError("torus component group has torsion; not supported")
    endo = T.on_generators()
    # torus generators inside Phi(J_m), projected to the free quotient
    gen_images = jm.torus_images @ torus.section
    ntors = len(jm.group.invariant_factors)
    incl = gen_images.submatrix(range(ntors, jm.group.ngens), None)
    F = extend_through_finite_index(incl, endo)
    r = F.rows
    scalar = F[0, 0] if r and F == IntMatrix.identity(r).scale(F[0, 0]) else None
    return HeckeOnPhi(scalar, endo, F)
