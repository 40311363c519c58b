"""Extended and reduced dual graphs, their homology and Laplacians.

An extended graph has a vertex for every singular point (the set A), a vertex
for every component of the normalisation (C) and an edge for every branch (B),
running from the singular point phi(b) to the component psi(b).  A modulus adds
one extra vertex ``v0`` with an edge to lambda(z) for each singular modulus
point and to theta(z) for each regular one.

All index orders are lexicographic in the string labels.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple, Sequence

from .abelian import IntMatrix, kernel_basis

__all__ = [
    "V0",
    "ExtendedGraph",
    "GraphWithModulus",
    "ReducedGraph",
    "H1",
    "char_group_matrix",
    "boundary_matrix",
    "h1",
    "laplacian",
    "reduce_extended",
]

V0 = "v0"


def _check_unique(labels: Sequence[str], what: str) -> None:
    if len(set(labels)) != len(labels):
        raise ValueError(f"duplicate {what} labels")


@dataclass(frozen=True)
class ExtendedGraph:
    A: tuple[str, ...]
    C: tuple[str, ...]
    phi: Mapping[str, str]
    psi: Mapping[str, str]

    def __post_init__(self):
        object.__setattr__(self, "A", tuple(sorted(self.A)))
        object.__setattr__(self, "C", tuple(sorted(self.C)))
        object.__setattr__(self, "phi", dict(self.phi))
        object.__setattr__(self, "psi", dict(self.psi))
        _check_unique(self.A, "A")
        _check_unique(self.C, "C")
        if set(self.A) & set(self.C):
            raise ValueError("A and C must be disjoint")
        if V0 in self.A or V0 in self.C:
            raise ValueError(f"label {V0!r} is reserved for the modulus vertex")
        if set(self.phi) != set(self.psi):
            raise ValueError("phi and psi must have the same domain B")
        for b in self.phi:
            if self.phi[b] not in self.A:
                raise ValueError(f"branch {b} maps to unknown singular point {self.phi[b]}")
            if self.psi[b] not in self.C:
                raise ValueError(f"branch {b} maps to unknown component {self.psi[b]}")

    @property
    def B(self) -> tuple[str, ...]:
        return tuple(sorted(self.phi))

    @classmethod
    def from_branches(cls, A: Sequence[str], C: Sequence[str],
                      branches: Sequence[tuple[str, str, str]]) -> "ExtendedGraph":
        """Branches given as (id, phi, psi) triples."""
        ids = [b for b, _, _ in branches]
        _check_unique(ids, "B")
        return cls(tuple(A), tuple(C), {b: a for b, a, _ in branches}, {b: c for b, _, c in branches})

    def degree(self, a: str) -> int:
        return sum(1 for b in self.phi if self.phi[b] == a)


@dataclass(frozen=True)
class GraphWithModulus:
    base: ExtendedGraph
    lam: Mapping[str, str] = field(default_factory=dict)
    theta: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "lam", dict(self.lam))
        object.__setattr__(self, "theta", dict(self.theta))
        if set(self.lam) & set(self.theta):
            raise ValueError("a modulus point cannot be both singular and regular")
        for z, a in self.lam.items():
            if a not in self.base.A:
                raise ValueError(f"singular modulus point {z} maps to unknown {a}")
        for z, c in self.theta.items():
            if c not in self.base.C:
                raise ValueError(f"regular modulus point {z} maps to unknown {c}")
        if set(self.lam) & set(self.base.phi) or set(self.theta) & set(self.base.phi):
            raise ValueError("modulus labels clash with branch labels")

    @property
    def sigma_sing(self) -> tuple[str, ...]:
        return tuple(sorted(self.lam))

    @property
    def sigma_reg(self) -> tuple[str, ...]:
        return tuple(sorted(self.theta))

    @property
    def has_modulus(self) -> bool:
        return bool(self.lam or self.theta)

    def edges(self) -> tuple[str, ...]:
        return self.base.B + self.sigma_sing + self.sigma_reg

    def vertices(self) -> tuple[str, ...]:
        return self.base.C + self.base.A + ((V0,) if self.has_modulus else ())

    def to_json(self) -> dict:
        g = self.base
        return {
            "A": list(g.A),
            "C": list(g.C),
            "B": [{"id": b, "phi": g.phi[b], "psi": g.psi[b]} for b in g.B],
            "sigma_sing": [{"id": z, "lambda": self.lam[z]} for z in self.sigma_sing],
            "sigma_reg": [{"id": z, "theta": self.theta[z]} for z in self.sigma_reg],
        }

    @classmethod
    def from_json(cls, data: dict | str) -> "GraphWithModulus":
        if isinstance(data, str):
            data = json.loads(data)
        base = ExtendedGraph.from_branches(data.get("A", []), data.get("C", []),
                                           [(b["id"], b["phi"], b["psi"]) for b in data.get("B", [])])
        sing = data.get("sigma_sing", [])
        reg = data.get("sigma_reg", [])
        _check_unique([z["id"] for z in sing] + [z["id"] for z in reg], "modulus")
        return cls(base, {z["id"]: z["lambda"] for z in sing}, {z["id"]: z["theta"] for z in reg})


@dataclass(frozen=True)
class ReducedGraph:
    """Vertices with labelled undirected edges (u, v); loops and multi-edges allowed.

    ``modulus`` lists (label, vertex) pairs; each becomes an edge from ``v0``.
    """

    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str, str], ...]
    modulus: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(sorted(self.vertices)))
        object.__setattr__(self, "edges", tuple(sorted(tuple(e) for e in self.edges)))
        object.__setattr__(self, "modulus", tuple(sorted(tuple(z) for z in self.modulus)))
        _check_unique(self.vertices, "vertex")
        if V0 in self.vertices:
            raise ValueError(f"label {V0!r} is reserved")
        _check_unique([e[0] for e in self.edges] + [z[0] for z in self.modulus], "edge")
        vs = set(self.vertices)
        for e, u, v in self.edges:
            if u not in vs or v not in vs:
                raise ValueError(f"edge {e} has an unknown endpoint")
        for z, v in self.modulus:
            if v not in vs:
                raise ValueError(f"modulus point {z} on unknown vertex {v}")


def _index(labels: Sequence[str]) -> dict[str, int]:
    return {x: i for i, x in enumerate(labels)}


def char_group_matrix(g: GraphWithModulus) -> IntMatrix:
    """The block map Z[B] + Z[S_sing] + Z[S_reg] -> Z[C] + Z[A].

    Rows are C then A, columns B, S_sing, S_reg; the blocks are
    [[psi, 0, theta], [phi, lambda, 0]] with unsigned incidences.
    """
    base = g.base
    rows = _index(base.C + base.A)
    cols = g.edges()
    M = [[0] * len(cols) for _ in rows]
    for j, e in enumerate(cols):
        if e in base.phi:
            M[rows[base.psi[e]]][j] += 1
            M[rows[base.phi[e]]][j] += 1
        elif e in g.lam:
            M[rows[g.lam[e]]][j] += 1
        else:
            M[rows[g.theta[e]]][j] += 1
    return IntMatrix.from_rows(M, len(cols))


def boundary_matrix(g: GraphWithModulus | ExtendedGraph | ReducedGraph) -> tuple[IntMatrix, tuple[str, ...], tuple[str, ...]]:
    """Signed boundary (head minus tail) with its row and column labels."""
    if isinstance(g, ExtendedGraph):
        g = GraphWithModulus(g)
    if isinstance(g, ReducedGraph):
        verts = g.vertices + ((V0,) if g.modulus else ())
        ends = [(e, u, v) for e, u, v in g.edges] + [(z, V0, v) for z, v in g.modulus]
    else:
        verts = g.vertices()
        base = g.base
        ends = ([(b, base.phi[b], base.psi[b]) for b in base.B]
                + [(z, V0, g.lam[z]) for z in g.sigma_sing]
                + [(z, V0, g.theta[z]) for z in g.sigma_reg])
    idx = _index(verts)
    M = [[0] * len(ends) for _ in verts]
    for j, (_, tail, head) in enumerate(ends):
        M[idx[head]][j] += 1
        M[idx[tail]][j] -= 1
    return IntMatrix.from_rows(M, len(ends)), tuple(verts), tuple(e for e, _, _ in ends)


class H1(NamedTuple):
    rank: int
    basis: IntMatrix
    edges: tuple[str, ...]

    def cycles(self) -> list[dict[str, int]]:
        """Basis cycles as {edge label: coefficient}."""
        return [{e: c for e, c in zip(self.edges, col) if c} for col in self.basis.columns()]


def h1(g: GraphWithModulus | ExtendedGraph | ReducedGraph) -> H1:
    """First homology: kernel of the boundary map on edges."""
    d, _, edges = boundary_matrix(g)
    K = kernel_basis(d)
    return H1(K.cols, K, edges)


def laplacian(g: ReducedGraph) -> IntMatrix:
    """Degree minus adjacency; loops contribute nothing, modulus edges are ignored."""
    idx = _index(g.vertices)
    n = len(idx)
    L = [[0] * n for _ in range(n)]
    for _, u, v in g.edges:
        if u == v:
            continue
        i, j = idx[u], idx[v]
        L[i][i] += 1
        L[j][j] += 1
        L[i][j] -= 1
        L[j][i] -= 1
    return IntMatrix.from_rows(L, n)


def reduce_extended(g: ExtendedGraph | GraphWithModulus) -> ReducedGraph:
    """Contract every (degree 2) singular-point vertex to a single edge."""
    if isinstance(g, ExtendedGraph):
        g = GraphWithModulus(g)
    if g.lam:
        raise ValueError("reduction needs the modulus to avoid singular points")
    base = g.base
    branches: dict[str, list[str]] = {a: [] for a in base.A}
    for b in base.B:
        branches[base.phi[b]].append(b)
    edges = []
    for a in base.A:
        bs = branches[a]
        if len(bs) != 2:
            raise ValueError(f"singular point {a} has {len(bs)} branches; only ordinary double points reduce")
        edges.append((a, base.psi[bs[0]], base.psi[bs[1]]))
    return ReducedGraph(base.C, tuple(edges), tuple((z, g.theta[z]) for z in g.sigma_reg))
