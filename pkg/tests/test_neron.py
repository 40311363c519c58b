import json

import pytest
from _fibres import fifty_fibres

from genjac.abelian import FGAbGroup, IntMatrix, determinant, kernel_basis, smith_normal_form, solve_integer
from genjac.graphs import ExtendedGraph, GraphWithModulus, ReducedGraph, char_group_matrix, h1
from genjac.modular import x0p2_fibre, x0pM_fibre
from genjac.neron import (
    FibreError,
    GraphMorphismData,
    ModulusIncidence,
    SpecialFibre,
    char_pullback,
    char_pushforward,
    character_group_Jm,
    component_group_J,
    component_group_Jm,
    duality_check,
    fibre_from_reduced_graph,
    raynaud_maps,
    semistable_component_group,
    tori_component_group,
    tori_phi_maps,
    validate_fibre,
)
from genjac.supersingular import counts, x0p_graph


def one_component(points=2):
    f = SpecialFibre(1, ("Y",), (1,), (0,), IntMatrix.from_rows([[0]]))
    m = ModulusIncidence(tuple(f"x{i}" for i in range(points)), (1,) * points,
                         IntMatrix.from_rows([[1]] * points, 1))
    return f, m


def x0_11():
    return x0pM_fibre(11, 1, counts(11, 1))


# --- validation -------------------------------------------------------------

def test_builders_validate():
    assert validate_fibre(x0p2_fibre(13).fibre, x0p2_fibre(13).modulus_full) == []
    assert validate_fibre(*x0_11()[:2]) == []


def test_perturbed_entry_is_reported():
    f = x0p2_fibre(13).fibre
    rows = f.intersection.to_lists()
    rows[0][0] -= 1
    bad = SpecialFibre(f.p, f.labels, f.d, f.n, IntMatrix.from_rows(rows))
    report = validate_fibre(bad)
    assert report == ["fibre divisor has nonzero degree on Z0"]
    with pytest.raises(FibreError) as err:
        component_group_J(bad)
    assert err.value.report == report


def test_wrong_h_is_reported():
    f, m = x0_11()[:2]
    rows = m.h.to_lists()
    rows[0][1] = 1
    bad = ModulusIncidence(m.labels, m.e, IntMatrix.from_rows(rows))
    report = validate_fibre(f, bad)
    assert len(report) == 1 and "inf" in report[0] and "e = 1" in report[0]


def test_delta_prime_to_p_required():
    f = SpecialFibre(2, ("Y",), (2,), (0,), IntMatrix.from_rows([[0]]))
    with pytest.raises(FibreError, match="not prime to p"):
        component_group_J(f)


def test_raynaud_complex_is_a_complex():
    for f in (x0_11().fibre, x0p2_fibre(17).fibre, x0pM_fibre(13, 6, counts(13, 6)).fibre):
        i, a, b = raynaud_maps(f)
        assert (a @ i).is_zero() and (b @ a).is_zero()


def test_json_round_trips():
    f, m = x0p2_fibre(11).fibre, x0p2_fibre(11).modulus_full
    assert SpecialFibre.from_json(json.dumps(f.to_json())) == f
    assert ModulusIncidence.from_json(json.dumps(m.to_json())) == m


# --- component groups -------------------------------------------------------

def test_component_group_J_examples():
    f, _ = one_component()
    assert component_group_J(f).group.is_trivial()
    assert component_group_J(x0_11().fibre).group == FGAbGroup((5,), 0)
    assert component_group_J(x0p2_fibre(13).fibre).group == FGAbGroup((7,), 0)


def test_component_group_Jm_examples():
    jm = component_group_Jm(*x0_11()[:2])
    assert jm.group == FGAbGroup.free(1)
    assert smith_normal_form(jm.torus_images).diagonal() == (5,)
    assert jm.phi_J() == FGAbGroup((5,), 0)
    f, m = one_component()
    assert component_group_Jm(f, m).group == FGAbGroup.free(1)
    assert component_group_Jm(f, m).phi_J().is_trivial()


def test_x0_169_images_up_to_gl2():
    X = x0p2_fibre(13)
    jm = component_group_Jm(X.fibre, X.modulus_full)
    assert jm.group == FGAbGroup.free(2)
    src = jm.torus_images.submatrix(None, [0, 1])
    target = IntMatrix.from_columns([[13, -6], [-1, 1]])
    U = solve_integer(src.T, target.T)
    assert U is not None and abs(determinant(U)) == 1


def test_quotient_by_torus_is_phi_J():
    for f, m in (x0_11()[:2], (x0p2_fibre(7).fibre, x0p2_fibre(7).modulus_full)):
        assert component_group_Jm(f, m).phi_J() == component_group_J(f).group


def test_empty_modulus_rejected():
    f, _ = one_component()
    with pytest.raises(ValueError):
        component_group_Jm(f, ModulusIncidence((), (), IntMatrix(0, 1)))


# --- tori ------------------------------------------------------------------

def test_tori_component_group():
    assert tori_component_group([1, 1]) == FGAbGroup.free(1)
    assert tori_component_group([1, 12, 1]) == FGAbGroup.free(2)
    assert tori_component_group([2, 4]) == FGAbGroup((2,), 1)


def test_tori_phi_maps():
    pull, push = tori_phi_maps({"a": "a", "b": "b"}, {"a": 1, "b": 1}, {"a": 1, "b": 1}, {"a": 1, "b": 1})
    assert pull.is_multiplication_by(1) and push.is_multiplication_by(1)
    # two points over one, r = (1, l)
    ell = 5
    pull, push = tori_phi_maps({"u": "x", "w": "x"}, {"x": 1}, {"u": 1, "w": ell}, {"u": 1, "w": ell})
    assert push.matrix.to_lists() == [[1, ell]]
    # T_l on X_0(p): each of inf, 0 has two preimages with r = 1 and r = l
    f = {"inf1": "inf", "infl": "inf", "01": "0", "0l": "0"}
    e = {"inf": 1, "0": 1}
    ep = dict.fromkeys(f, 1)
    u_pull, _ = tori_phi_maps(f, e, ep, dict.fromkeys(f, 1))
    _, v_push = tori_phi_maps(f, e, ep, {"inf1": ell, "infl": 1, "01": ell, "0l": 1})
    assert u_pull.compose(v_push).is_multiplication_by(ell + 1)
    with pytest.raises(ValueError, match="divide"):
        tori_phi_maps({"u": "x"}, {"x": 2}, {"u": 3}, {"u": 1})


# --- character groups ---------------------------------------------------------

def test_character_group_examples():
    assert character_group_Jm(x0p_graph(11)).rank == 2
    tree = GraphWithModulus(ExtendedGraph.from_branches(["P"], ["X", "Y"], [("b1", "P", "X"), ("b2", "P", "Y")]))
    assert character_group_Jm(tree).rank == 0
    for p, M in ((11, 1), (13, 2), (7, 6)):
        c = counts(p, M)
        X = x0pM_fibre(p, M, c)
        assert character_group_Jm(X.graph, X.fibre).rank == c[0]
    fat = SpecialFibre(1, ("Y",), (2,), (0,), IntMatrix.from_rows([[0]]))
    with pytest.raises(ValueError, match="d = 1"):
        character_group_Jm(tree, fat)


# --- semistable shortcut and duality --------------------------------------------

def test_semistable_examples():
    for n in (1, 2, 5):
        g = ReducedGraph(("X", "Y"), tuple((f"e{i}", "X", "Y") for i in range(n)), (("zx", "X"), ("zy", "Y")))
        assert semistable_component_group(g) == FGAbGroup.free(1)
        f, m = fibre_from_reduced_graph(g)
        assert component_group_Jm(f, m).phi_J() == FGAbGroup.from_cyclic_orders([n])
    loop = ReducedGraph(("X",), (("e", "X", "X"),), (("z", "X"),))
    assert semistable_component_group(loop).is_trivial()
    with pytest.raises(ValueError):
        semistable_component_group(loop, d=[2])


@pytest.mark.parametrize("g", fifty_fibres()[:15], ids=lambda g: f"{len(g.vertices)}c{len(g.edges)}e")
def test_random_semistable_agreement(g):
    f, m = fibre_from_reduced_graph(g)
    direct = component_group_Jm(f, m).group
    assert semistable_component_group(g) == direct
    assert duality_check(f, m) == direct


def test_duality_examples():
    f, m = x0_11()[:2]
    assert duality_check(f, m) == FGAbGroup.free(1)
    assert duality_check(*one_component()) == FGAbGroup.free(1)
    X = x0p2_fibre(13)
    with pytest.raises(ValueError, match="delta|rational"):
        duality_check(X.fibre, X.modulus_full)


# --- functoriality ----------------------------------------------------------

def banana(n, prefix, comps, modulus):
    X, Y = comps
    branches = []
    for i in range(n):
        branches += [(f"{prefix}{i}x", f"{prefix.upper()}{i}", X), (f"{prefix}{i}y", f"{prefix.upper()}{i}", Y)]
    base = ExtendedGraph.from_branches([f"{prefix.upper()}{i}" for i in range(n)], [X, Y], branches)
    return GraphWithModulus(base, {}, modulus)


def double_cover(with_modulus=True):
    base = banana(2, "b", ("X", "Y"), {"zx": "X", "zy": "Y"} if with_modulus else {})
    cover = banana(4, "q", ("X2", "Y2"), {"wx": "X2", "wy": "Y2"} if with_modulus else {})
    fA = {f"Q{i}": f"B{i % 2}" for i in range(4)}
    fB = {f"q{i}{s}": f"b{i % 2}{s}" for i in range(4) for s in "xy"}
    fS = {"wx": "zx", "wy": "zy"} if with_modulus else {}
    ram = {"wx": 2, "wy": 2} if with_modulus else {}
    return GraphMorphismData(cover, base, fA, fB, {"X2": "X", "Y2": "Y"}, fS, ram, {"X2": 2, "Y2": 2})


def identity_morphism(g):
    base = g.base
    return GraphMorphismData(g, g, {a: a for a in base.A}, {b: b for b in base.B},
                             {c: c for c in base.C}, {z: z for z in g.sigma_reg})


def test_identity_morphism():
    g = x0p_graph(23)
    m = identity_morphism(g)
    r = h1(g).rank
    assert char_pullback(m) == IntMatrix.identity(r)
    assert char_pushforward(m) == IntMatrix.identity(r)


def test_double_cover_ranks_without_modulus():
    m = double_cover(with_modulus=False)
    P = char_pullback(m)
    assert P.shape == (1, 3)
    assert char_pushforward(m).shape == (3, 1)


def test_double_cover_functoriality():
    m = double_cover()
    assert m.degree == 2
    P = char_pullback(m)       # X' -> X
    Q = char_pushforward(m)    # X -> X'
    assert P.shape == (2, 4) and Q.shape == (4, 2)
    assert P @ Q == IntMatrix.identity(2).scale(2)


def test_collapsed_cycle_maps_to_zero():
    m = double_cover(with_modulus=False)
    Kp = kernel_basis(char_group_matrix(m.cover))
    # Q0 -> X2 -> Q2 -> Y2 -> Q0 lies over the degenerate loop b0 -> b0
    edges = m.cover.edges()
    cyc = dict.fromkeys(edges, 0)
    cyc.update({"q0x": 1, "q2x": -1, "q2y": 1, "q0y": -1})
    coords = solve_integer(Kp, tuple(cyc[e] for e in edges))
    assert coords is not None
    assert char_pullback(m) @ coords == (0,)
    assert smith_normal_form(char_pullback(m)).rank == 1


def test_bad_morphisms_rejected():
    m = double_cover()
    with pytest.raises(ValueError, match="ramification"):
        GraphMorphismData(m.cover, m.base, m.fA, m.fB, m.fC, m.fS, {"wx": 1, "wy": 2}, m.res_deg)
    bad_fB = dict(m.fB)
    bad_fB["q0x"] = "b1x"
    with pytest.raises(ValueError, match="phi"):
        GraphMorphismData(m.cover, m.base, m.fA, bad_fB, m.fC, m.fS, m.ram, m.res_deg)
