import json
import random
from math import gcd

import pytest

from genjac.abelian import IntMatrix, cokernel_presentation, smith_normal_form
from genjac.graphs import h1
from genjac.neron import component_group_J, component_group_Jm, validate_fibre
from genjac.modular import (
    CuspidalDivisor,
    GeometricCusp,
    all_cusps,
    atkin_lehner_cusps,
    closed_form_X0pM,
    closed_form_phiJ,
    cuspidal_splitting,
    cusps,
    degeneracy_u,
    degeneracy_v,
    euler_phi,
    hecke_constants,
    hecke_matrix,
    hecke_on_phi,
    hecke_on_phi_data,
    hecke_transpose_cusps,
    x0p2_closed_form,
    x0p2_fibre,
    x0p2_parameters,
    x0pM_fibre,
)
from genjac.supersingular import counts

PRIMES = [5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97]


def D(N, *terms):
    return CuspidalDivisor(N, [(GeometricCusp(N, d, c), k) for d, c, k in terms])


def random_divisor(rng, N):
    cs = all_cusps(N)
    return CuspidalDivisor(N, [(rng.choice(cs), rng.randint(-5, 5)) for _ in range(4)])


# --- cusps ---------------------------------------------------------------------

def test_cusp_counts():
    orbits = cusps(11)
    assert [[z.label() for z in o] for o in orbits] == [["inf"], ["0"]]
    assert all(z.is_rational() for o in orbits for z in o)
    orbits = cusps(49)
    assert [len(o) for o in orbits] == [1, 6, 1]
    assert [o[0].is_rational() for o in orbits] == [True, False, True]
    assert len(all_cusps(6)) == 4 and all(z.is_rational() for z in all_cusps(6))
    for N in range(1, 80):
        assert len(all_cusps(N)) == sum(euler_phi(gcd(d, N // d)) for d in range(1, N + 1) if N % d == 0)


def test_cusp_normal_form():
    assert GeometricCusp(49, 7, 9) == GeometricCusp(49, 7, 2)
    assert GeometricCusp(12, 2, 5).c == 1  # m = 2
    with pytest.raises(ValueError):
        GeometricCusp(49, 7, 14)
    with pytest.raises(ValueError):
        GeometricCusp(10, 3)
    z = GeometricCusp(6, 2, 1)
    assert gcd(z.t, 6) == 1 and (z.t - z.c) % z.m == 0


def test_divisor_arithmetic_and_json():
    x = D(49, (1, 1, 2), (7, 3, -1))
    assert x.degree() == 1
    assert (x - x).terms == {}
    assert 3 * x == x + x + x
    assert CuspidalDivisor.orbit_sum(49, 7).degree() == 6
    assert CuspidalDivisor.from_json(json.dumps(x.to_json())) == x
    with pytest.raises(ValueError):
        x + D(11, (1, 1, 1))


# --- Hecke on cusps ----------------------------------------------------------

def test_hecke_examples_prime_level():
    d = D(11, (11, 1, 1), (1, 1, -1))
    assert hecke_transpose_cusps(11, 2, d) == 3 * d
    for p in (11, 13, 37):
        d = D(p, (p, 1, 1), (1, 1, -1))
        assert hecke_transpose_cusps(p, p, d) == d
    with pytest.raises(ValueError, match="prime"):
        hecke_transpose_cusps(11, 4, d)


@pytest.mark.parametrize("p", [5, 7, 11])
def test_hecke_examples_square_level(p):
    N = p * p
    inf, zero = D(N, (1, 1, 1)), D(N, (N, 1, 1))
    expected = CuspidalDivisor.orbit_sum(N, p) + zero - p * inf
    assert hecke_transpose_cusps(N, p, zero - inf) == expected
    for c in range(1, p):
        assert hecke_transpose_cusps(N, p, D(N, (p, c, 1)) - inf).terms == {}


def test_hecke_constants():
    for N in (11, 12, 49, 60, 98):
        for ell in (2, 3, 5, 7):
            M, k, a, b, q = hecke_constants(N, ell)
            assert N == M * ell ** k and a * ell + b * M == 1
            assert (a - 1) % ell ** k == 0 and (a * q - 1) % N == 0


@pytest.mark.parametrize("N", [11, 12, 18, 25, 49, 50, 54, 60, 72])
def test_hecke_degree(N):
    rng = random.Random(N)
    for ell in (2, 3, 5, 7):
        for _ in range(5):
            x = random_divisor(rng, N)
            factor = ell if N % ell == 0 else ell + 1
            assert hecke_transpose_cusps(N, ell, x).degree() == factor * x.degree()


@pytest.mark.parametrize("N", [25, 49, 63, 72, 121])
def test_hecke_commutes_with_galois(N):
    rng = random.Random(N)
    units = [s for s in range(1, N) if gcd(s, N) == 1]
    for ell in (2, 3, 5, 7):
        for _ in range(4):
            x, s = random_divisor(rng, N), rng.choice(units)
            assert hecke_transpose_cusps(N, ell, x.galois(s)) == hecke_transpose_cusps(N, ell, x).galois(s)


@pytest.mark.parametrize("p", [5, 7, 11, 13])
def test_square_level_sublattice(p):
    N = p * p
    gens = [D(N, (1, 1, 1)), D(N, (N, 1, 1)), CuspidalDivisor.orbit_sum(N, p)]
    for ell in (2, 3, 5, 7, 11):
        if ell == p:
            continue
        for g in gens:
            img = hecke_transpose_cusps(N, ell, g)
            orbit = {k for z, k in img.terms.items() if z.d == p}
            assert len(orbit) <= 1
            if orbit:
                assert sum(1 for z in img.terms if z.d == p) == p - 1


def oracle(N, ell, z):
    """u_* v^* computed from the degeneracy maps at level N*l."""
    out = []
    for w in all_cusps(N * ell):
        vz, r = degeneracy_v(N, ell, w)
        if vz == z:
            out.append((degeneracy_u(N, ell, w)[0], r))
    return CuspidalDivisor(N, out)


@pytest.mark.parametrize("N", [11, 12, 25, 36, 49, 54, 72, 100])
def test_hecke_agrees_with_degeneracy_oracle(N):
    for ell in (2, 3, 5, 7):
        for z in all_cusps(N):
            assert hecke_transpose_cusps(N, ell, CuspidalDivisor(N, {z: 1})) == oracle(N, ell, z)


def test_hecke_matrix_columns():
    H = hecke_matrix(49, 2)
    assert H.shape == (8, 8)
    assert all(sum(c) == 3 for c in H.columns())


def test_atkin_lehner():
    inf, zero = D(11, (1, 1, 1)), D(11, (11, 1, 1))
    assert atkin_lehner_cusps(11, inf) == zero
    x = 2 * inf - zero
    assert atkin_lehner_cusps(11, atkin_lehner_cusps(11, x)) == x
    pair = D(49, (1, 1, 1), (49, 1, 1))
    assert atkin_lehner_cusps(49, pair) == pair
    with pytest.raises(ValueError, match="support"):
        atkin_lehner_cusps(49, D(49, (7, 1, 1)))
    with pytest.raises(ValueError):
        atkin_lehner_cusps(6, D(6, (1, 1, 1)))


# --- X_0(pM) ----------------------------------------------------------------

def test_x0pM_examples():
    f = x0pM_fibre(11, 1, (2, 1, 1))
    assert f.fibre.size == 5
    assert component_group_Jm(f.fibre, f.modulus).group.to_dict() == {"invariant_factors": [], "free_rank": 1}
    f = x0pM_fibre(37, 1, (3, 0, 0))
    assert f.fibre.size == 2
    assert component_group_J(f.fibre).group.invariant_factors == (3,)
    assert f.recipe.params == (3, 0, 0)


def test_x0pM_validation():
    with pytest.raises(ValueError, match="prime"):
        x0pM_fibre(3, 1, (1, 0, 0))
    with pytest.raises(ValueError):
        x0pM_fibre(11, 11, (2, 1, 1))
    with pytest.raises(ValueError, match="inconsistent"):
        x0pM_fibre(11, 1, (1, 1, 1))


CASES = [(p, M) for p in PRIMES for M in (1, 2, 3, 4, 6) if gcd(p, M) == 1 and p * M < 300]


@pytest.mark.parametrize("p,M", CASES)
def test_x0pM_closed_forms(p, M):
    c = counts(p, M)
    f = x0pM_fibre(p, M, c)
    assert validate_fibre(f.fibre, f.modulus) == []
    fib = f.fibre
    for col in range(fib.size):
        assert sum(fib.d[j] * fib.intersection[j, col] for j in range(fib.size)) == 0
    jm = component_group_Jm(fib, f.modulus)
    group, image = closed_form_X0pM(p, M, c)
    assert jm.group == group
    # the torus is Z, generated by the class of the first unit vector
    tor = jm.torus_images.column(0)
    assert abs(tor[-1]) == image
    assert jm.group.quotient(jm.torus_images) == closed_form_phiJ(p, M, c)
    assert component_group_J(fib).group == closed_form_phiJ(p, M, c)
    assert set(f.graph.base.C) == set(fib.labels)
    assert h1(f.graph).rank == c[0]


@pytest.mark.parametrize("p", PRIMES)
def test_phiJ_of_x0p(p):
    num = (p - 1) // gcd(p - 1, 12)
    assert closed_form_phiJ(p, 1, counts(p, 1)).to_dict() == {"invariant_factors": [num] if num > 1 else [], "free_rank": 0}


def test_closed_form_examples():
    assert closed_form_X0pM(11, 1, (2, 1, 1))[1] == 5
    assert closed_form_X0pM(37, 1, (3, 0, 0))[1] == 3
    assert closed_form_X0pM(23, 1, (3, 1, 1))[1] == 11
    assert closed_form_phiJ(23, 1, (3, 1, 1)).invariant_factors == (11,)
    with pytest.raises(ValueError, match="integer"):
        closed_form_phiJ(11, 1, (1, 1, 1))


# --- X_0(p^2) ---------------------------------------------------------------

def test_x0p2_parameters():
    assert x0p2_parameters(13) == (1, 0, 0, 13)
    assert x0p2_parameters(11) == (0, 1, 1, 10)
    with pytest.raises(ValueError):
        x0p2_parameters(9)


def test_x0p2_closed_form_examples():
    cf = x0p2_closed_form(13)
    assert (cf.V0, cf.V1, cf.V0_prime) == ((13, -6), (-1, 1), 7)
    cf = x0p2_closed_form(11)
    assert (cf.V0, cf.V1, cf.V0_prime) == ((10, -5), (-1, 1), 5)
    assert x0p2_closed_form(5).V0_prime == 1


@pytest.mark.parametrize("p", PRIMES)
def test_x0p2_fibre(p):
    f = x0p2_fibre(p)
    fib = f.fibre
    assert validate_fibre(fib, f.modulus_full) == [] and validate_fibre(fib, f.modulus_prime) == []
    for col in range(5):
        assert sum(fib.d[j] * fib.intersection[j, col] for j in range(5)) == 0
    order = (p * p - 1) // 24
    cf = x0p2_closed_form(p)
    full = component_group_Jm(fib, f.modulus_full)
    assert full.group == cf.group
    # torus generators: classes of the first two unit vectors of coker(1, p-1, 1)
    sec = cokernel_presentation(IntMatrix.from_columns([f.modulus_full.e], 3)).section
    direct = full.torus_images @ sec
    predicted = IntMatrix.from_columns([cf.V0, cf.V1], 2)
    assert smith_normal_form(direct).diagonal() == smith_normal_form(predicted).diagonal() == (1, order)
    prime = component_group_Jm(fib, f.modulus_prime)
    assert prime.group == cf.group_prime
    assert smith_normal_form(prime.torus_images).diagonal() == (order,)
    assert component_group_J(fib).group.torsion_order == cf.phi_J_order


# --- general cuspidal moduli ------------------------------------------------

@pytest.mark.parametrize("p,M", [(11, 1), (13, 1), (37, 1), (23, 2), (13, 6)])
def test_cuspidal_splitting(p, M):
    fib = x0pM_fibre(p, M, counts(p, M)).fibre
    s = cuspidal_splitting(fib, {"inf": "Zinf", "x": "Zinf", "y": "Zinf"})
    assert s.case == "one-component" and s.predicted == s.direct
    s = cuspidal_splitting(fib, {"inf": "Zinf", "0": "Z0", "x": "Zinf"})
    assert s.case == "two-component" and s.predicted == s.direct
    assert s.direct.free_rank == 2
    s = cuspidal_splitting(fib, {"inf": "Zinf", "0": "Z0"})
    assert s.direct == closed_form_X0pM(p, M, counts(p, M))[0]
    with pytest.raises(ValueError):
        cuspidal_splitting(fib, {"inf": "E1"})


# --- Hecke on component groups ---------------------------------------------

def test_hecke_on_phi_examples():
    assert hecke_on_phi(11, 1, 2) == 3
    assert hecke_on_phi(11, 1, 3) == 4
    assert hecke_on_phi(11, 1, 11) == 1


@pytest.mark.parametrize("p,M", [(5, 1), (13, 1), (37, 1), (11, 2), (13, 3), (7, 6), (5, 7)])
def test_hecke_on_phi_is_l_plus_one(p, M):
    for ell in (2, 3, 5, 7, 11, 13):
        if (p * M) % ell:
            data = hecke_on_phi_data(p, M, ell)
            assert data.scalar == ell + 1
            assert data.on_torus == IntMatrix.from_rows([[ell + 1]])


def test_hecke_on_phi_rejects():
    with pytest.raises(ValueError, match="stable"):
        hecke_on_phi(11, 2, 2)
    with pytest.raises(ValueError, match="prime"):
        hecke_on_phi(11, 1, 4)
