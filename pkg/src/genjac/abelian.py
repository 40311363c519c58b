"""Exact integer linear algebra and finitely generated abelian groups.

Everything here works on Python ints, so entries never overflow.  Matrices
may be empty in either direction; an empty complex has trivial homology.

>>> M = IntMatrix.from_rows([[2, 4], [6, 8]])
>>> smith_normal_form(M).diagonal()
(2, 4)
>>> cokernel(M)
FGAbGroup(invariant_factors=(2, 4), free_rank=0)
>>> str(cokernel(IntMatrix.from_rows([[1], [4], [1]])))
'Z^2'
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, prod
from typing import Iterable, NamedTuple, Sequence

__all__ = [
    "IntMatrix",
    "SNFDecomposition",
    "FGAbGroup",
    "Homology",
    "Cokernel",
    "PresentedGroupMap",
    "smith_normal_form",
    "hermite_normal_form",
    "kernel_basis",
    "cokernel",
    "cokernel_presentation",
    "homology",
    "solve_integer",
    "integer_left_inverse",
    "extend_through_finite_index",
    "determinant",
]


class IntMatrix:
    """Immutable integer matrix stored row-major."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Iterable[int] = ()):
        entries = tuple(int(x) for x in entries)
        if rows < 0 or cols < 0:
            raise ValueError("negative dimension")
        if not entries and rows * cols:
            entries = (0,) * (rows * cols)
        if len(entries) != rows * cols:
            raise ValueError(f"expected {rows * cols} entries, got {len(entries)}")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "entries", entries)

    def __setattr__(self, name, value):
        raise AttributeError("IntMatrix is immutable")

    # constructors
    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> "IntMatrix":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != cols:
                raise ValueError("ragged rows")
        return cls(len(rows), cols, [x for r in rows for x in r])

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: int | None = None) -> "IntMatrix":
        columns = [list(c) for c in columns]
        if rows is None:
            rows = len(columns[0]) if columns else 0
        if any(len(c) != rows for c in columns):
            raise ValueError("ragged columns")
        return cls(rows, len(columns), [columns[j][i] for i in range(rows) for j in range(len(columns))])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, [1 if i == j else 0 for i in range(n) for j in range(n)])

    @classmethod
    def diag(cls, values: Sequence[int], rows: int | None = None, cols: int | None = None) -> "IntMatrix":
        values = list(values)
        rows = len(values) if rows is None else rows
        cols = len(values) if cols is None else cols
        out = [[0] * cols for _ in range(rows)]
        for i, v in enumerate(values):
            out[i][i] = v
        return cls.from_rows(out, cols)

    @classmethod
    def block(cls, blocks: Sequence[Sequence["IntMatrix"]]) -> "IntMatrix":
        """Assemble a block matrix; block heights/widths must line up."""
        out: list[list[int]] = []
        for brow in blocks:
            height = brow[0].rows
            if any(b.rows != height for b in brow):
                raise ValueError("block heights differ")
            lists = [b.to_lists() for b in brow]
            for i in range(height):
                out.append([x for blk in lists for x in blk[i]])
        cols = sum(b.cols for b in blocks[0]) if blocks else 0
        return cls.from_rows(out, cols)

    def hstack(self, *others: "IntMatrix") -> "IntMatrix":
        return IntMatrix.block([[self, *others]])

    def vstack(self, *others: "IntMatrix") -> "IntMatrix":
        return IntMatrix.block([[m] for m in (self, *others)])

    # access
    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(ij)
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def to_lists(self) -> list[list[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def columns(self) -> list[tuple[int, ...]]:
        return [self.column(j) for j in range(self.cols)]

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def T(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows,
                         [self.entries[i * self.cols + j] for j in range(self.cols) for i in range(self.rows)])

    def submatrix(self, rows: Sequence[int] | None = None, cols: Sequence[int] | None = None) -> "IntMatrix":
        rows = range(self.rows) if rows is None else rows
        cols = range(self.cols) if cols is None else cols
        return IntMatrix.from_rows([[self[i, j] for j in cols] for i in rows], len(cols))

    def is_zero(self) -> bool:
        return not any(self.entries)

    # arithmetic
    def __matmul__(self, other):
        if isinstance(other, IntMatrix):
            if self.cols != other.rows:
                raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
            ocols = other.columns()
            return IntMatrix(self.rows, other.cols,
                             [sum(a * b for a, b in zip(self.row(i), c)) for i in range(self.rows) for c in ocols])
        vec = list(other)
        if len(vec) != self.cols:
            raise ValueError("vector length mismatch")
        return tuple(sum(a * b for a, b in zip(self.row(i), vec)) for i in range(self.rows))

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return IntMatrix(self.rows, self.cols, [a + b for a, b in zip(self.entries, other.entries)])

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return IntMatrix(self.rows, self.cols, [a - b for a, b in zip(self.entries, other.entries)])

    def __neg__(self) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, [-a for a in self.entries])

    def scale(self, k: int) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, [k * a for a in self.entries])

    def __eq__(self, other) -> bool:
        return isinstance(other, IntMatrix) and self.shape == other.shape and self.entries == other.entries

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.entries))

    def __repr__(self) -> str:
        return f"IntMatrix.from_rows({self.to_lists()!r}, {self.cols})"

    def __str__(self) -> str:
        if not self.rows or not self.cols:
            return f"[{self.rows}x{self.cols} empty]"
        w = max(len(str(x)) for x in self.entries)
        return "\n".join("[" + " ".join(str(x).rjust(w) for x in self.row(i)) + "]" for i in range(self.rows))


def _as_lists(M: IntMatrix) -> list[list[int]]:
    return M.to_lists()


def _identity_lists(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def determinant(M: IntMatrix) -> int:
    """Exact determinant via fraction-free Bareiss elimination."""
    n = M.rows
    if n != M.cols:
        raise ValueError("determinant of non-square matrix")
    if n == 0:
        return 1
    A = _as_lists(M)
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if A[i][k]), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


class SNFDecomposition(NamedTuple):
    U: IntMatrix
    D: IntMatrix
    V: IntMatrix

    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.D[i, i] for i in range(min(self.D.rows, self.D.cols)))

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal() if d)


def smith_normal_form(M: IntMatrix) -> SNFDecomposition:
    """Return unimodular U, V and diagonal D with U*M*V = D.

    The pivot is always an entry of least nonzero absolute value in the
    remaining block, ties going to the lowest (row, column).  Diagonal entries
    end up nonnegative and each divides the next.
    """
    m, n = M.rows, M.cols
    A = _as_lists(M)
    U = _identity_lists(m)
    V = _identity_lists(n)

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                Ai = A[i]
                for j in range(t, n):
                    x = Ai[j]
                    if x and (best is None or abs(x) < best[0]):
                        best = (abs(x), i, j)
                        if best[0] == 1:
                            break
                if best is not None and best[0] == 1:
                    break
            if best is None:
                return _finish(A, U, V, m, n)
            _, pi, pj = best
            if pi != t:
                A[t], A[pi] = A[pi], A[t]
                U[t], U[pi] = U[pi], U[t]
            if pj != t:
                for row in A:
                    row[t], row[pj] = row[pj], row[t]
                for row in V:
                    row[t], row[pj] = row[pj], row[t]
            piv = A[t][t]
            clean = True
            At, Ut = A[t], U[t]
            for i in range(t + 1, m):
                x = A[i][t]
                if x:
                    q = x // piv
                    if q:
                        Ai, Ui = A[i], U[i]
                        for j in range(t, n):
                            Ai[j] -= q * At[j]
                        for j in range(m):
                            Ui[j] -= q * Ut[j]
                    if A[i][t]:
                        clean = False
            for j in range(t + 1, n):
                x = At[j]
                if x:
                    q = x // piv
                    if q:
                        for row in A:
                            row[j] -= q * row[t]
                        for row in V:
                            row[j] -= q * row[t]
                    if At[j]:
                        clean = False
            if not clean:
                continue
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if A[i][j] % piv:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            Ab, Ub = A[bad], U[bad]
            for j in range(t, n):
                At[j] += Ab[j]
            for j in range(m):
                Ut[j] += Ub[j]
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
    return _finish(A, U, V, m, n)


def _finish(A, U, V, m, n) -> SNFDecomposition:
    for t in range(min(m, n)):
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
    return SNFDecomposition(IntMatrix.from_rows(U, m), IntMatrix.from_rows(A, n), IntMatrix.from_rows(V, n))


def hermite_normal_form(M: IntMatrix) -> IntMatrix:
    """Row-style Hermite normal form with zero rows removed.

    The result depends only on the row lattice of M.
    """
    A = [r for r in _as_lists(M) if any(r)]
    n = M.cols
    r = 0
    for c in range(n):
        if r >= len(A):
            break
        for i in range(r + 1, len(A)):
            if A[i][c] == 0:
                continue
            a, b = A[r][c], A[i][c]
            g, x, y = _xgcd(a, b)
            ua, ub = a // g, b // g
            Ar, Ai = A[r], A[i]
            A[r] = [x * p + y * q for p, q in zip(Ar, Ai)]
            A[i] = [ua * q - ub * p for p, q in zip(Ar, Ai)]
        if A[r][c] == 0:
            continue
        if A[r][c] < 0:
            A[r] = [-x for x in A[r]]
        piv = A[r][c]
        for i in range(r):
            q = A[i][c] // piv
            if q:
                A[i] = [p - q * s for p, s in zip(A[i], A[r])]
        r += 1
    return IntMatrix.from_rows([row for row in A if any(row)], n)


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a - (a // b) * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def kernel_basis(M: IntMatrix) -> IntMatrix:
    """Columns form a canonical (Hermite-reduced) basis of {x : Mx = 0}."""
    snf = smith_normal_form(M)
    r = snf.rank
    K = snf.V.submatrix(None, range(r, M.cols))
    if K.cols == 0:
        return IntMatrix(M.cols, 0)
    return hermite_normal_form(K.T).T


@dataclass(frozen=True)
class FGAbGroup:
    """Z/d_1 + ... + Z/d_k + Z^r with d_i >= 2 and d_i | d_{i+1}."""

    invariant_factors: tuple[int, ...] = ()
    free_rank: int = 0

    def __post_init__(self):
        facs = tuple(int(d) for d in self.invariant_factors)
        object.__setattr__(self, "invariant_factors", facs)
        if self.free_rank < 0:
            raise ValueError("negative free rank")
        for d in facs:
            if d < 2:
                raise ValueError(f"invariant factor {d} < 2")
        for a, b in zip(facs, facs[1:]):
            if b % a:
                raise ValueError(f"{a} does not divide {b}")

    @classmethod
    def from_cyclic_orders(cls, orders: Iterable[int], free_rank: int = 0) -> "FGAbGroup":
        """Canonical form of a direct sum of cyclic groups; order 0 means Z."""
        orders = list(orders)
        free = free_rank + sum(1 for o in orders if o == 0)
        fin = [abs(o) for o in orders if o not in (0, 1, -1)]
        g = cokernel(IntMatrix.diag(fin))
        return cls(g.invariant_factors, free)

    @classmethod
    def free(cls, rank: int) -> "FGAbGroup":
        return cls((), rank)

    @property
    def torsion_order(self) -> int:
        return prod(self.invariant_factors)

    @property
    def order(self) -> int | None:
        """Group order, or None for infinite groups."""
        return None if self.free_rank else self.torsion_order

    @property
    def ngens(self) -> int:
        return len(self.invariant_factors) + self.free_rank

    @property
    def moduli(self) -> tuple[int, ...]:
        """Per-coordinate modulus; 0 marks a free coordinate."""
        return self.invariant_factors + (0,) * self.free_rank

    def is_trivial(self) -> bool:
        return self.ngens == 0

    def is_cyclic(self) -> bool:
        return self.ngens <= 1

    def reduce(self, coords: Sequence[int]) -> tuple[int, ...]:
        if len(coords) != self.ngens:
            raise ValueError("wrong number of coordinates")
        return tuple(c % m if m else c for c, m in zip(coords, self.moduli))

    def torsion_subgroup(self) -> "FGAbGroup":
        return FGAbGroup(self.invariant_factors, 0)

    def relation_matrix(self) -> IntMatrix:
        """Square relation matrix of the canonical presentation."""
        return IntMatrix.diag(self.moduli)

    def quotient(self, gens: IntMatrix) -> "FGAbGroup":
        """Quotient by the subgroup generated by the columns of ``gens``."""
        if gens.rows != self.ngens:
            raise ValueError("generators have the wrong number of coordinates")
        return cokernel(self.relation_matrix().hstack(gens))

    def direct_sum(self, other: "FGAbGroup") -> "FGAbGroup":
        return FGAbGroup.from_cyclic_orders(self.invariant_factors + other.invariant_factors,
                                            self.free_rank + other.free_rank)

    def __str__(self) -> str:
        parts = [f"Z/{d}" for d in self.invariant_factors]
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        return " x ".join(parts) if parts else "0"

    def to_dict(self) -> dict:
        return {"invariant_factors": list(self.invariant_factors), "free_rank": self.free_rank}

    @classmethod
    def from_dict(cls, data: dict) -> "FGAbGroup":
        return cls(tuple(data["invariant_factors"]), int(data["free_rank"]))


class Cokernel(NamedTuple):
    """Z^m / im(M) with coordinates and a section back to Z^m.

    ``coords`` sends an ambient vector to group coordinates (reduce with
    ``group.reduce``); column t of ``section`` lifts generator t.
    """

    group: FGAbGroup
    coords: IntMatrix
    section: IntMatrix

    def coordinates(self, x: Sequence[int]) -> tuple[int, ...]:
        return self.group.reduce(self.coords @ x)


def cokernel_presentation(M: IntMatrix) -> Cokernel:
    m = M.rows
    U, D, _ = smith_normal_form(M)
    diag = [D[i, i] for i in range(min(D.rows, D.cols))]
    r = sum(1 for d in diag if d)
    keep = [t for t in range(r) if diag[t] != 1] + list(range(r, m))
    facs = tuple(diag[t] for t in range(r) if diag[t] != 1)
    group = FGAbGroup(facs, m - r)
    coords = U.submatrix(keep, None) if m else IntMatrix(0, 0)
    Uinv = _unimodular_inverse(U)
    section = Uinv.submatrix(None, keep) if m else IntMatrix(0, 0)
    return Cokernel(group, coords, section)


def cokernel(M: IntMatrix) -> FGAbGroup:
    """Structure of Z^rows / image(M)."""
    return cokernel_presentation(M).group


def _unimodular_inverse(U: IntMatrix) -> IntMatrix:
    n = U.rows
    if n == 0:
        return U
    X = solve_integer(U, IntMatrix.identity(n))
    if X is None:
        raise ValueError("matrix is not unimodular")
    return X


def solve_integer(A: IntMatrix, b) -> IntMatrix | tuple[int, ...] | None:
    """Some integer x with A x = b, or None.  b may be a vector or a matrix."""
    as_vector = not isinstance(b, IntMatrix)
    B = IntMatrix.from_columns([list(b)], A.rows) if as_vector else b
    if B.rows != A.rows:
        raise ValueError("right-hand side has wrong height")
    U, D, V = smith_normal_form(A)
    Y = U @ B
    diag = [D[i, i] for i in range(min(D.rows, D.cols))]
    Z = [[0] * B.cols for _ in range(A.cols)]
    for i in range(A.rows):
        for k in range(B.cols):
            y = Y[i, k]
            d = diag[i] if i < len(diag) else 0
            if d == 0:
                if y:
                    return None
            else:
                if y % d:
                    return None
                Z[i][k] = y // d
    X = V @ IntMatrix.from_rows(Z, B.cols)
    return X.column(0) if as_vector else X


def integer_left_inverse(K: IntMatrix) -> IntMatrix:
    """L with L*K = I for a basis K of a saturated sublattice."""
    k = K.cols
    U, D, V = smith_normal_form(K)
    if any(D[i, i] != 1 for i in range(k)):
        raise ValueError("columns do not span a saturated sublattice")
    return V @ U.submatrix(range(k), None)


class Homology(NamedTuple):
    """ker(B)/im(A) with a matrix sending ker(B) vectors to coordinates."""

    group: FGAbGroup
    coordinate_map: IntMatrix
    kernel: IntMatrix
    section: IntMatrix

    def coordinates(self, x: Sequence[int]) -> tuple[int, ...]:
        return self.group.reduce(self.coordinate_map @ x)


def homology(A: IntMatrix, B: IntMatrix) -> Homology:
    """Homology at the middle of Z^a --A--> Z^m --B--> Z^b.

    ``section`` columns are ambient representatives of the generators.
    """
    if A.rows != B.cols:
        raise ValueError(f"A has {A.rows} rows but B has {B.cols} columns")
    if not (B @ A).is_zero():
        raise ValueError("B*A != 0: not a complex")
    m = A.rows
    K = kernel_basis(B)
    if K.cols == 0:
        return Homology(FGAbGroup(), IntMatrix(0, m), K, IntMatrix(m, 0))
    L = integer_left_inverse(K)
    cok = cokernel_presentation(L @ A)
    return Homology(cok.group, cok.coords @ L, K, K @ cok.section)


class PresentedGroupMap:
    """Homomorphism coker(R_src) -> coker(R_tgt) induced by an ambient matrix."""

    def __init__(self, src_relations: IntMatrix, tgt_relations: IntMatrix, matrix: IntMatrix):
        if matrix.rows != tgt_relations.rows or matrix.cols != src_relations.rows:
            raise ValueError("ambient matrix has the wrong shape")
        if solve_integer(tgt_relations, matrix @ src_relations) is None:
            raise ValueError("map does not send relations into relations")
        self.src_relations = src_relations
        self.tgt_relations = tgt_relations
        self.matrix = matrix
        self._src = cokernel_presentation(src_relations)
        self._tgt = cokernel_presentation(tgt_relations)

    @property
    def source(self) -> FGAbGroup:
        return self._src.group

    @property
    def target(self) -> FGAbGroup:
        return self._tgt.group

    def apply(self, x: Sequence[int]) -> tuple[int, ...]:
        """Image of an ambient source vector, in target group coordinates."""
        return self._tgt.coordinates(self.matrix @ x)

    def on_generators(self) -> IntMatrix:
        """Matrix from source group coordinates to target group coordinates."""
        return self._tgt.coords @ self.matrix @ self._src.section

    def compose(self, after: "PresentedGroupMap") -> "PresentedGroupMap":
        """after o self"""
        return PresentedGroupMap(self.src_relations, after.tgt_relations, after.matrix @ self.matrix)

    def is_multiplication_by(self, k: int) -> bool:
        if self.src_relations.rows != self.tgt_relations.rows:
            return False
        diff = self.matrix - IntMatrix.identity(self.matrix.rows).scale(k)
        return solve_integer(self.tgt_relations, diff) is not None


def extend_through_finite_index(incl: IntMatrix, endo_on_sub: IntMatrix) -> IntMatrix:
    """Extend an endomorphism of a finite-index free subgroup H of G.

    ``incl`` has the coordinates in G of a basis of H as columns and
    ``endo_on_sub`` is the endomorphism of H in that basis.  Returns F with
    F * incl = incl * endo_on_sub, provided F is integral.
    """
    n = incl.rows
    if incl.cols != n:
        raise ValueError(f"rank mismatch: subgroup of rank {incl.cols} in group of rank {n}")
    if endo_on_sub.shape != (n, n):
        raise ValueError("endomorphism has the wrong shape")
    if n == 0:
        return IntMatrix(0, 0)
    if determinant(incl) == 0:
        raise ValueError("subgroup does not have finite index")
    # F = incl * E * incl^-1 over Q
    target = incl @ endo_on_sub
    inv = _rational_inverse(incl)
    F = [[sum(target[i, k] * inv[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    if any(x.denominator != 1 for row in F for x in row):
        raise ValueError("endomorphism does not extend integrally")
    return IntMatrix.from_rows([[int(x) for x in row] for row in F], n)


def _rational_inverse(M: IntMatrix) -> list[list[Fraction]]:
    n = M.rows
    A = [[Fraction(x) for x in M.row(i)] + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for c in range(n):
        p = next(i for i in range(c, n) if A[i][c] != 0)
        A[c], A[p] = A[p], A[c]
        pv = A[c][c]
        A[c] = [x / pv for x in A[c]]
        for i in range(n):
            if i != c and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[c])]
    return [row[n:] for row in A]
