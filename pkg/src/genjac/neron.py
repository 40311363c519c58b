"""Component and character groups of Neron models from special-fibre data.

A regular model is described by its special fibre (components with
multiplicities and the intersection matrix) together with the way the
closures of the modulus points meet the components.  The component group of
the Jacobian is ker(b)/im(a) for

    Z --i--> Z[C] --a--> Z^C --b--> Z

with i(1) = sum d_j (j), a(l)_j = (Y_j.Y_l)/p^{n_j} and b(m) = sum delta_j m_j,
where delta_j = d_j p^{n_j}.  With a modulus the middle term grows by the
torus part Z^I/eZ and a picks up the incidence map h.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import gcd
from typing import Mapping, NamedTuple, Sequence

from .abelian import (
    FGAbGroup,
    Homology,
    IntMatrix,
    PresentedGroupMap,
    cokernel,
    homology,
    kernel_basis,
    solve_integer,
)
from .graphs import GraphWithModulus, H1, ReducedGraph, char_group_matrix, h1, laplacian

__all__ = [
    "FibreError",
    "SpecialFibre",
    "ModulusIncidence",
    "GraphMorphismData",
    "JmResult",
    "validate_fibre",
    "raynaud_maps",
    "component_group_J",
    "component_group_Jm",
    "character_group_Jm",
    "semistable_component_group",
    "fibre_from_reduced_graph",
    "tori_component_group",
    "tori_phi_maps",
    "char_pullback",
    "char_pushforward",
    "duality_check",
]


class FibreError(ValueError):
    """Invalid fibre or modulus data; ``report`` lists every violation."""

    def __init__(self, report: Sequence[str]):
        self.report = list(report)
        super().__init__("; ".join(self.report))


@dataclass(frozen=True)
class SpecialFibre:
    p: int
    labels: tuple[str, ...]
    d: tuple[int, ...]
    n: tuple[int, ...]
    intersection: IntMatrix

    def __post_init__(self):
        for name in ("labels", "d", "n"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if not isinstance(self.intersection, IntMatrix):
            object.__setattr__(self, "intersection", IntMatrix.from_rows(self.intersection, len(self.labels)))
        if not (len(self.labels) == len(self.d) == len(self.n)):
            raise ValueError("labels, d and n must have equal length")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("duplicate component labels")
        if self.p < 1:
            raise ValueError("characteristic exponent must be >= 1")

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def delta(self) -> tuple[int, ...]:
        return tuple(dj * self.p ** nj for dj, nj in zip(self.d, self.n))

    @property
    def gcd_d(self) -> int:
        return gcd(*self.d) if self.d else 0

    @property
    def gcd_delta(self) -> int:
        return gcd(*self.delta) if self.d else 0

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "components": [{"label": l, "d": d, "n": n} for l, d, n in zip(self.labels, self.d, self.n)],
            "intersection": self.intersection.to_lists(),
        }

    @classmethod
    def from_json(cls, data: dict | str) -> "SpecialFibre":
        if isinstance(data, str):
            data = json.loads(data)
        comps = data["components"]
        return cls(
            int(data["p"]),
            tuple(str(c["label"]) for c in comps),
            tuple(int(c.get("d", 1)) for c in comps),
            tuple(int(c.get("n", 0)) for c in comps),
            IntMatrix.from_rows(data["intersection"], len(comps)),
        )


@dataclass(frozen=True)
class ModulusIncidence:
    """Points x_i with ramification e_i; h[i][j] = deg of g_i^* Y_j."""

    labels: tuple[str, ...]
    e: tuple[int, ...]
    h: IntMatrix

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "e", tuple(self.e))
        if not isinstance(self.h, IntMatrix):
            rows = [list(r) for r in self.h]
            object.__setattr__(self, "h", IntMatrix.from_rows(rows, len(rows[0]) if rows else 0))
        if len(self.labels) != len(self.e) or self.h.rows != len(self.e):
            raise ValueError("labels, e and rows of h must agree")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("duplicate point labels")

    @property
    def size(self) -> int:
        return len(self.labels)

    def restrict(self, keep: Sequence[str]) -> "ModulusIncidence":
        idx = [self.labels.index(x) for x in keep]
        return ModulusIncidence(tuple(keep), tuple(self.e[i] for i in idx), self.h.submatrix(idx, None))

    def to_json(self) -> dict:
        return {"points": [{"label": l, "e": e} for l, e in zip(self.labels, self.e)], "h": self.h.to_lists()}

    @classmethod
    def from_json(cls, data: dict | str, n_components: int | None = None) -> "ModulusIncidence":
        if isinstance(data, str):
            data = json.loads(data)
        pts = data["points"]
        rows = data["h"]
        cols = len(rows[0]) if rows else (n_components or 0)
        return cls(tuple(str(x["label"]) for x in pts), tuple(int(x.get("e", 1)) for x in pts),
                   IntMatrix.from_rows(rows, cols))


def validate_fibre(f: SpecialFibre, m: ModulusIncidence | None = None) -> list[str]:
    """Every violated invariant, one message each; empty means valid."""
    out: list[str] = []
    c = f.size
    M = f.intersection
    if M.shape != (c, c):
        return [f"intersection matrix has shape {M.shape}, expected {(c, c)}"]
    for j, (dj, nj) in enumerate(zip(f.d, f.n)):
        if dj < 1:
            out.append(f"multiplicity d of {f.labels[j]} must be positive")
        if nj < 0:
            out.append(f"exponent n of {f.labels[j]} must be nonnegative")
        if nj > 0 and f.p == 1:
            out.append(f"component {f.labels[j]} has n > 0 but p = 1")
    if out:
        return out
    for j in range(c):
        for l in range(j + 1, c):
            if M[j, l] != M[l, j]:
                out.append(f"intersection not symmetric at ({f.labels[j]}, {f.labels[l]})")
            if M[j, l] < 0 or M[l, j] < 0:
                out.append(f"negative intersection ({f.labels[j]}.{f.labels[l]})")
    if c > 1:
        for j in range(c):
            if M[j, j] >= 0:
                out.append(f"self-intersection of {f.labels[j]} is not negative")
    for l in range(c):
        if sum(f.d[j] * M[j, l] for j in range(c)):
            out.append(f"fibre divisor has nonzero degree on {f.labels[l]}")
    for j in range(c):
        q = f.p ** f.n[j]
        if q > 1 and any(M[j, l] % q for l in range(c)):
            out.append(f"row of {f.labels[j]} not divisible by p^n (a is not integral)")
    if m is not None:
        if m.h.cols != c:
            out.append(f"h has {m.h.cols} columns, expected {c}")
            return out
        delta = f.delta
        for i, lab in enumerate(m.labels):
            if m.e[i] < 1:
                out.append(f"ramification index of {lab} must be positive")
            if any(x < 0 for x in m.h.row(i)):
                out.append(f"negative incidence for point {lab}")
            s = sum(delta[j] * m.h[i, j] for j in range(c))
            if s != m.e[i]:
                out.append(f"point {lab}: sum delta_j h_ij = {s} but e = {m.e[i]}")
    return out


def _require(f: SpecialFibre, m: ModulusIncidence | None = None) -> None:
    report = validate_fibre(f, m)
    if report:
        raise FibreError(report)
    if f.p > 1 and gcd(f.gcd_delta, f.p) != 1:
        raise FibreError([f"gcd of delta_j is {f.gcd_delta}, not prime to p = {f.p}"])


class RaynaudMaps(NamedTuple):
    i: IntMatrix
    a: IntMatrix
    b: IntMatrix


def raynaud_maps(f: SpecialFibre) -> RaynaudMaps:
    c = f.size
    M = f.intersection
    i = IntMatrix.from_columns([list(f.d)], c)
    a = IntMatrix.from_rows([[M[j, l] // f.p ** f.n[j] for l in range(c)] for j in range(c)], c)
    b = IntMatrix.from_rows([list(f.delta)], c)
    return RaynaudMaps(i, a, b)


def component_group_J(f: SpecialFibre) -> Homology:
    """ker(b)/im(a) with a coordinate map on Z^C."""
    _require(f)
    _, a, b = raynaud_maps(f)
    return homology(a, b)


class JmResult(NamedTuple):
    """The component group, the images of the torus generators V_i (as
    columns of group coordinates) and the underlying homology data."""

    group: FGAbGroup
    torus_images: IntMatrix
    homology: Homology

    def phi_J(self) -> FGAbGroup:
        """Quotient by the torus part."""
        return self.group.quotient(self.torus_images)


def component_group_Jm(f: SpecialFibre, m: ModulusIncidence) -> JmResult:
    if m.size == 0:
        raise ValueError("modulus must be nonempty")
    _require(f, m)
    _, a, b = raynaud_maps(f)
    c, k = f.size, m.size
    e_col = IntMatrix.from_columns([list(m.e)], k)
    A = IntMatrix.block([[a, IntMatrix(c, 1)], [m.h, e_col]])
    B = b.hstack(IntMatrix(1, k))
    H = homology(A, B)
    images = [H.coordinates([0] * c + [int(t == i) for t in range(k)]) for i in range(k)]
    return JmResult(H.group, IntMatrix.from_columns(images, H.group.ngens), H)


def character_group_Jm(g: GraphWithModulus, fibre: SpecialFibre | None = None) -> H1:
    """First homology of the extended graph with modulus vertex."""
    if fibre is not None and fibre.gcd_d != 1:
        raise ValueError(f"character group needs d = 1, got d = {fibre.gcd_d}")
    return h1(g)


def semistable_component_group(g: ReducedGraph, e: Sequence[int] | None = None,
                               d: Sequence[int] | None = None) -> FGAbGroup:
    """coker((Laplacian, theta^*)) into Z[C]^0 + Z^I/Z.

    Z[C]^0 is coordinatised by the basis eps_j - eps_last, i.e. the last row
    of the Laplacian is dropped.
    """
    if d is not None and any(x != 1 for x in d):
        raise ValueError("semistable shortcut needs all multiplicities equal to 1")
    if e is not None and any(x != 1 for x in e):
        raise ValueError("semistable shortcut needs rational points (e = 1)")
    if not g.modulus:
        raise ValueError("modulus must be nonempty")
    C = g.vertices
    L = laplacian(g)
    top = L.submatrix(range(len(C) - 1), None)
    pts = [z for z, _ in g.modulus]
    theta = IntMatrix.from_rows([[int(v == Z) for Z in C] for _, v in g.modulus], len(C))
    ones = IntMatrix.from_columns([[1] * len(pts)], len(pts))
    return cokernel(IntMatrix.block([[top, IntMatrix(len(C) - 1, 1)], [theta, ones]]))


def fibre_from_reduced_graph(g: ReducedGraph, p: int = 1) -> tuple[SpecialFibre, ModulusIncidence]:
    """Semistable fibre whose dual graph is g: intersection = -Laplacian."""
    L = laplacian(g)
    C = g.vertices
    f = SpecialFibre(p, C, (1,) * len(C), (0,) * len(C), -L)
    h = IntMatrix.from_rows([[int(v == Z) for Z in C] for _, v in g.modulus], len(C))
    m = ModulusIncidence(tuple(z for z, _ in g.modulus), (1,) * len(g.modulus), h)
    return f, m


def tori_component_group(e: Sequence[int]) -> FGAbGroup:
    """coker(e: Z -> Z^I)."""
    if not e:
        raise ValueError("index set must be nonempty")
    if any(x < 1 for x in e):
        raise ValueError("ramification indices must be positive")
    return cokernel(IntMatrix.from_columns([list(e)], len(e)))


def tori_phi_maps(f: Mapping[str, str], e: Mapping[str, int], e_prime: Mapping[str, int],
                  r: Mapping[str, int], require_surjective: bool = True,
                  ) -> tuple[PresentedGroupMap, PresentedGroupMap | None]:
    """Phi(f^*): Z^I/e -> Z^I'/e' and Phi(f_*): Z^I'/e' -> Z^I/e.

    Index orders follow the insertion order of ``e`` and ``e_prime``.  A
    correspondence leg may only map I' into I; pass ``require_surjective=False``
    and no pushforward is built.
    """
    I, Ip = list(e), list(e_prime)
    if set(f) != set(Ip) or set(r) != set(Ip):
        raise ValueError("f and r must be defined on all of I'")
    if not set(f.values()) <= set(I):
        raise ValueError("f must map I' into I")
    if require_surjective and set(f.values()) != set(I):
        raise ValueError("f must be surjective onto I")
    up = [[0] * len(I) for _ in Ip]
    down = [[0] * len(Ip) for _ in I]
    for jj, j in enumerate(Ip):
        i = f[j]
        ii = I.index(i)
        if e_prime[j] % e[i]:
            raise ValueError(f"e_{i} = {e[i]} does not divide e'_{j} = {e_prime[j]}")
        up[jj][ii] = e_prime[j] // e[i]
        down[ii][jj] = r[j]
    rel = IntMatrix.from_columns([[e[i] for i in I]], len(I))
    rel_p = IntMatrix.from_columns([[e_prime[j] for j in Ip]], len(Ip))
    pull = PresentedGroupMap(rel, rel_p, IntMatrix.from_rows(up, len(I)))
    if not require_surjective:
        return pull, None
    push = PresentedGroupMap(rel_p, rel, IntMatrix.from_rows(down, len(Ip)))
    return pull, push


@dataclass(frozen=True)
class GraphMorphismData:
    """A finite map of curves Y' -> Y seen on extended graphs.

    ``cover`` is the graph of Y', ``base`` that of Y.  The maps fA, fB, fC, fS
    go from the cover's labels to the base's; ``ram`` gives r_{z'/z} on the
    cover's modulus points and ``res_deg`` gives [k(Z'):k(Z)] on its
    components.  Singular modulus points are not supported.
    """

    cover: GraphWithModulus
    base: GraphWithModulus
    fA: Mapping[str, str]
    fB: Mapping[str, str]
    fC: Mapping[str, str]
    fS: Mapping[str, str]
    ram: Mapping[str, int] = field(default_factory=dict)
    res_deg: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        for name in ("fA", "fB", "fC", "fS", "ram", "res_deg"):
            object.__setattr__(self, name, dict(getattr(self, name)))
        if self.cover.lam or self.base.lam:
            raise ValueError("singular modulus points are not supported")
        Yp, Y = self.cover.base, self.base.base
        ram = {z: self.ram.get(z, 1) for z in self.cover.theta}
        deg = {Z: self.res_deg.get(Z, 1) for Z in Yp.C}
        object.__setattr__(self, "ram", ram)
        object.__setattr__(self, "res_deg", deg)
        checks = [(self.fA, Yp.A, Y.A, "A"), (self.fB, Yp.B, Y.B, "B"),
                  (self.fC, Yp.C, Y.C, "C"), (self.fS, self.cover.sigma_reg, self.base.sigma_reg, "Sigma")]
        for fmap, src, tgt, name in checks:
            if set(fmap) != set(src):
                raise ValueError(f"map on {name} is not defined on exactly the cover's {name}")
            if not set(fmap.values()) <= set(tgt):
                raise ValueError(f"map on {name} lands outside the base's {name}")
            if set(fmap.values()) != set(tgt):
                raise ValueError(f"map on {name} is not surjective")
        for b in Yp.B:
            if self.fA[Yp.phi[b]] != Y.phi[self.fB[b]]:
                raise ValueError(f"f o phi' != phi o f at branch {b}")
            if self.fC[Yp.psi[b]] != Y.psi[self.fB[b]]:
                raise ValueError(f"f o psi' != psi o f at branch {b}")
        for z in self.cover.sigma_reg:
            if self.fC[self.cover.theta[z]] != self.base.theta[self.fS[z]]:
                raise ValueError(f"f o theta' != theta o f at {z}")
        for b in Y.B:
            for Zp in Yp.C:
                if self.fC[Zp] != Y.psi[b]:
                    continue
                over = sum(1 for bp in Yp.B if self.fB[bp] == b and Yp.psi[bp] == Zp)
                if over != deg[Zp]:
                    raise ValueError(f"{over} branches of {Zp} over {b}, expected {deg[Zp]}")
        for z in self.base.sigma_reg:
            for Zp in Yp.C:
                if self.fC[Zp] != self.base.theta[z]:
                    continue
                tot = sum(ram[zp] for zp in self.cover.sigma_reg
                          if self.fS[zp] == z and self.cover.theta[zp] == Zp)
                if tot != deg[Zp]:
                    raise ValueError(f"ramification over {z} on {Zp} sums to {tot}, expected {deg[Zp]}")

    def _edge_map(self) -> tuple[dict[str, str], tuple[str, ...], tuple[str, ...]]:
        fe = {**self.fB, **self.fS}
        return fe, self.cover.edges(), self.base.edges()

    def pushforward_matrix(self) -> IntMatrix:
        """f on Z[B'] + Z[S'] -> Z[B] + Z[S]."""
        fe, src, tgt = self._edge_map()
        return IntMatrix.from_rows([[int(fe[x] == y) for x in src] for y in tgt], len(src))

    def pullback_matrix(self) -> IntMatrix:
        """f^* on Z[B] + Z[S] -> Z[B'] + Z[S'], with ramification on S."""
        fe, src, tgt = self._edge_map()
        return IntMatrix.from_rows(
            [[(self.ram.get(x, 1) if fe[x] == y else 0) for y in tgt] for x in src], len(tgt))

    def vertex_pullback_matrix(self) -> IntMatrix:
        """f^* on Z[C] + Z[A] -> Z[C'] + Z[A']."""
        Yp, Y = self.cover.base, self.base.base
        src = Y.C + Y.A
        rows = []
        for Zp in Yp.C:
            rows.append([self.res_deg[Zp] if self.fC[Zp] == Z else 0 for Z in Y.C] + [0] * len(Y.A))
        for ap in Yp.A:
            rows.append([0] * len(Y.C) + [int(self.fA[ap] == a) for a in Y.A])
        return IntMatrix.from_rows(rows, len(src))

    @property
    def degree(self) -> int | None:
        """Total degree over each base component when constant, else None."""
        Y = self.base.base
        degs = {sum(self.res_deg[Zp] for Zp in self.cover.base.C if self.fC[Zp] == Z) for Z in Y.C}
        return degs.pop() if len(degs) == 1 else None


def char_pullback(m: GraphMorphismData) -> IntMatrix:
    """X(f^*): X' -> X in the kernel bases of the two graphs."""
    Kp = kernel_basis(char_group_matrix(m.cover))
    K = kernel_basis(char_group_matrix(m.base))
    image = m.pushforward_matrix() @ Kp
    X = solve_integer(K, image)
    if X is None:
        raise ValueError("pushforward does not carry cycles to cycles")
    return X


def char_pushforward(m: GraphMorphismData) -> IntMatrix:
    """X(f_*): X -> X' in the kernel bases of the two graphs."""
    Mp = char_group_matrix(m.cover)
    M = char_group_matrix(m.base)
    G = m.pullback_matrix()
    if m.vertex_pullback_matrix() @ M != Mp @ G:
        raise ValueError("pullback square does not commute")
    Kp = kernel_basis(Mp)
    K = kernel_basis(M)
    X = solve_integer(Kp, G @ K)
    if X is None:
        raise ValueError("pullback does not carry cycles to cycles")
    return X


def duality_check(f: SpecialFibre, m: ModulusIncidence) -> FGAbGroup:
    """Homology of the transpose of Z -> Z[C] + Z[I]^0 -> Z^C -> Z."""
    if any(f.n):
        raise ValueError("duality check needs all n_j = 0")
    if f.gcd_delta != 1:
        raise ValueError("duality check needs delta = 1")
    if any(x != 1 for x in m.e):
        raise ValueError("duality check needs rational points (e = 1)")
    if m.size == 0:
        raise ValueError("modulus must be nonempty")
    _require(f, m)
    i, a, b = raynaud_maps(f)
    c, k = f.size, m.size
    # basis (x_t) - (x_last) of Z[I]^0
    K = IntMatrix.from_rows([[1 if r == t else (-1 if r == k - 1 else 0) for t in range(k - 1)]
                             for r in range(k)], k - 1)
    first = i.vstack(IntMatrix(k - 1, 1))
    second = a.hstack(m.h.T @ K)
    if not (second @ first).is_zero() or not (b @ second).is_zero():
        raise FibreError(["dual complex is not a complex"])
    return homology(second.T, first.T).group
