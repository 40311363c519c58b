"""Supersingular j-invariants, level-M counts and Brandt matrices."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, gcd

from ..abelian import IntMatrix, kernel_basis, solve_integer
from ..graphs import ExtendedGraph, GraphWithModulus, boundary_matrix
from .fp2 import Fp2Element, field, is_prime, root_multiplicity
from .kernels import poly_roots
from .modpoly import SUPPORTED, modular_polynomial

__all__ = [
    "SupersingularData",
    "BrandtMatrix",
    "supersingular_js",
    "hasse_polynomial",
    "counts",
    "cyclic_subgroups",
    "brandt",
    "hecke_on_char_X0p",
    "x0p_graph",
    "x0p_gamma_basis",
    "atkin_lehner_on_h1",
]


def _check_p(p: int) -> None:
    if not is_prime(p) or p <= 3:
        raise ValueError(f"p must be a prime > 3, got {p}")


@dataclass(frozen=True)
class SupersingularData:
    p: int
    js: tuple[Fp2Element, ...]
    weights: tuple[int, ...]

    @property
    def h(self) -> int:
        return len(self.js)

    def mass(self) -> Fraction:
        return sum((Fraction(1, 2 * w) for w in self.weights), Fraction(0))

    def index(self, j: Fp2Element) -> int:
        return self.js.index(j)

    def frobenius_permutation(self) -> list[int]:
        return [self.index(j.frobenius()) for j in self.js]

    def contains(self, j: int) -> bool:
        return field(self.p)(j) in self.js


def hasse_polynomial(p: int) -> list[int]:
    """Coefficients (low to high) of sum_i C(m, i)^2 t^i mod p, m = (p-1)/2."""
    m = (p - 1) // 2
    return [comb(m, i) ** 2 % p for i in range(m + 1)]


def _weight(j: Fp2Element) -> int:
    if j.is_zero():
        return 3
    if j == 1728:
        return 2
    return 1


@lru_cache(maxsize=None)
def supersingular_js(p: int) -> SupersingularData:
    """Supersingular j-invariants via Legendre lambda roots of the Hasse polynomial."""
    _check_p(p)
    F = field(p)
    found = set()
    for u, v in poly_roots(p, F.s, hasse_polynomial(p)):
        lam = F(u, v)
        found.add(256 * (lam * lam - lam + 1) ** 3 / (lam * lam * (lam - 1) ** 2))
    js = tuple(sorted(found))
    data = SupersingularData(p, js, tuple(_weight(j) for j in js))
    if data.mass() != Fraction(p - 1, 24):
        raise ArithmeticError(f"mass formula fails for p = {p}")
    if {j.frobenius() for j in js} != found:
        raise ArithmeticError("supersingular set not Frobenius stable")
    return data


def cyclic_subgroups(M: int) -> list[frozenset[tuple[int, int]]]:
    """Cyclic subgroups of order M in (Z/M)^2, sorted."""
    subs = set()
    for x in range(M):
        for y in range(M):
            if gcd(gcd(x, y), M) == 1:
                subs.add(frozenset(((k * x) % M, (k * y) % M) for k in range(M)))
    return sorted(subs, key=sorted)


def _act(g: tuple[tuple[int, int], tuple[int, int]], H: frozenset, M: int) -> frozenset:
    (a, b), (c, d) = g
    return frozenset(((a * x + b * y) % M, (c * x + d * y) % M) for x, y in H)


def _orbits_and_fixed(g, M: int) -> tuple[int, int]:
    subs = cyclic_subgroups(M)
    seen: set = set()
    orbits = fixed = 0
    for H in subs:
        if _act(g, H, M) == H:
            fixed += 1
        if H in seen:
            continue
        orbits += 1
        K = H
        while K not in seen:
            seen.add(K)
            K = _act(g, K, M)
    return orbits, fixed


@lru_cache(maxsize=None)
def counts(p: int, M: int) -> tuple[int, int, int]:
    """(n, e2, e3): supersingular points of X_0(M) mod p, and those with extra automorphisms.

    Aut(E) acts on cyclic M-subgroups through t^2+1 at j = 1728 and t^2-t+1 at
    j = 0 (companion matrices); -1 acts trivially.
    """
    _check_p(p)
    if M < 1 or gcd(p, M) != 1:
        raise ValueError(f"need gcd(p, M) = 1 with M >= 1, got M = {M}")
    data = supersingular_js(p)
    F = field(p)
    n = e2 = e3 = 0
    identity = ((1, 0), (0, 1))
    for j in data.js:
        if j.is_zero():
            orb, fix = _orbits_and_fixed(((0, M - 1), (1, 1 % M)), M)
            e3 = fix
        elif j == F(1728):
            orb, fix = _orbits_and_fixed(((0, M - 1), (1, 0)), M)
            e2 = fix
        else:
            orb, _ = _orbits_and_fixed(identity, M)
        n += orb
    return n, e2, e3


@dataclass(frozen=True)
class BrandtMatrix:
    p: int
    ell: int
    js: tuple[Fp2Element, ...]
    weights: tuple[int, ...]
    matrix: IntMatrix


def brandt(p: int, ell: int) -> BrandtMatrix:
    """B(l)_ij = multiplicity of j_j among roots of Phi_l(j_i, X); B(p) is Frobenius."""
    data = supersingular_js(p)
    if not is_prime(ell):
        raise ValueError(f"ell must be prime, got {ell}")
    js = data.js
    h = data.h
    if ell == p:
        perm = data.frobenius_permutation()
        rows = [[int(perm[i] == k) for k in range(h)] for i in range(h)]
    elif ell in SUPPORTED:
        P = modular_polynomial(ell)
        F = field(p)
        rows = []
        for ji in js:
            poly = P.specialize_y(ji, lambda x, y: x + y, lambda c, y: c * y, F.zero, F.one)
            row = [root_multiplicity(poly, jk) for jk in js]
            if sum(row) != ell + 1:
                raise ArithmeticError(f"Phi_{ell}({ji}, X) has roots outside the supersingular set")
            rows.append(row)
    else:
        raise ValueError(f"unsupported ell {ell}")
    return BrandtMatrix(p, ell, js, data.weights, IntMatrix.from_rows(rows, h))


# --- the X_0(p) graph and the Atkin-Lehner involution ------------------------

def _elabel(i: int) -> str:
    return f"E{i:03d}"


def x0p_graph(p: int) -> GraphWithModulus:
    """Two components Zinf, Z0 crossing at the supersingular points, cusps inf, 0."""
    h = supersingular_js(p).h
    branches = []
    for i in range(h):
        branches.append((f"b{i:03d}_0", _elabel(i), "Z0"))
        branches.append((f"b{i:03d}_inf", _elabel(i), "Zinf"))
    base = ExtendedGraph.from_branches([_elabel(i) for i in range(h)], ["Z0", "Zinf"], branches)
    return GraphWithModulus(base, {}, {"c0": "Z0", "cinf": "Zinf"})


def x0p_gamma_basis(p: int) -> IntMatrix:
    """Columns gamma_i = (0) - b_{i,0} + b_{i,inf} - (inf) in edge coordinates."""
    g = x0p_graph(p)
    edges = g.edges()
    cols = []
    for i in range(supersingular_js(p).h):
        coeff = {"c0": 1, f"b{i:03d}_0": -1, f"b{i:03d}_inf": 1, "cinf": -1}
        cols.append([coeff.get(e, 0) for e in edges])
    return IntMatrix.from_columns(cols, len(edges))


def atkin_lehner_on_h1(p: int) -> IntMatrix:
    """Matrix of W_p on H_1 of the X_0(p) graph in the gamma basis.

    W_p swaps Z0 and Zinf, swaps the cusps and moves E_i to E_i^(p).
    """
    g = x0p_graph(p)
    d, _, edges = boundary_matrix(g)
    perm = supersingular_js(p).frobenius_permutation()
    image = {"c0": "cinf", "cinf": "c0"}
    for i, k in enumerate(perm):
        image[f"b{i:03d}_0"] = f"b{k:03d}_inf"
        image[f"b{i:03d}_inf"] = f"b{k:03d}_0"
    W = IntMatrix.from_rows([[int(image[x] == y) for x in edges] for y in edges], len(edges))
    Gam = x0p_gamma_basis(p)
    if not (d @ Gam).is_zero():
        raise ArithmeticError("gamma_i are not cycles")
    K = kernel_basis(d)
    if solve_integer(Gam, K) is None or K.cols != Gam.cols:
        raise ArithmeticError("gamma_i do not form a basis of H_1")
    X = solve_integer(Gam, W @ Gam)
    if X is None:
        raise ArithmeticError("W_p does not preserve H_1")
    return X


def hecke_on_char_X0p(p: int, ell: int) -> IntMatrix:
    """tT_l on the character group of J_m for X_0(p), m = (inf)+(0), in the gamma basis."""
    if ell != p and ell not in SUPPORTED:
        raise ValueError(f"unsupported ell {ell}")
    B = brandt(p, ell).matrix.T
    if ell == p:
        graph_side = -atkin_lehner_on_h1(p)
        if graph_side != B:
            raise ArithmeticError("T_p = -W_p disagrees with the transposed Brandt matrix")
    return B
