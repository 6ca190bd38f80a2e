"""Exact integer matrices, Smith normal form and finitely presented abelian groups.

The Smith decomposition keeps the elementary row and column operations it
performed instead of dense transform matrices.  ``U x`` and ``V y`` are
computed by replaying the logs, which is much cheaper than materializing
U and V for the large sparse relation matrices produced by the K-theory
pipeline.  U and V are still available as matrices on request.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

__all__ = [
    "IntMatrix",
    "SmithForm",
    "AbelianPresentation",
    "smith_normal_form",
    "invariant_factors",
    "kernel_lattice",
    "solve",
    "determinant",
]


class IntMatrix:
    """Rectangular matrix of Python ints."""

    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows: Iterable[Iterable[int]], ncols: int | None = None):
        self.rows = tuple(tuple(int(x) for x in r) for r in rows)
        self.nrows = len(self.rows)
        if ncols is None:
            if not self.rows:
                raise ValueError("ncols is required for a matrix with no rows")
            ncols = len(self.rows[0])
        self.ncols = ncols
        if any(len(r) != ncols for r in self.rows):
            raise ValueError("ragged matrix")

    @classmethod
    def zeros(cls, m: int, n: int) -> IntMatrix:
        return cls([[0] * n for _ in range(m)], ncols=n)

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls([[int(i == j) for j in range(n)] for i in range(n)], ncols=n)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], nrows: int) -> IntMatrix:
        return cls([[c[i] for c in columns] for i in range(nrows)], ncols=len(columns))

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.rows[i][j]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self.rows)

    def columns(self) -> list[tuple[int, ...]]:
        return [self.column(j) for j in range(self.ncols)]

    def transpose(self) -> IntMatrix:
        return IntMatrix(self.columns(), ncols=self.nrows)

    def __matmul__(self, other):
        if isinstance(other, IntMatrix):
            if self.ncols != other.nrows:
                raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
            cols = other.columns()
            return IntMatrix([[sum(a * b for a, b in zip(r, c)) for c in cols] for r in self.rows],
                             ncols=other.ncols)
        vec = tuple(other)
        if len(vec) != self.ncols:
            raise ValueError(f"shape mismatch {self.shape} @ vector of length {len(vec)}")
        return tuple(sum(a * b for a, b in zip(r, vec) if a) for r in self.rows)

    def hstack(self, other: IntMatrix) -> IntMatrix:
        if self.nrows != other.nrows:
            raise ValueError("row counts differ")
        return IntMatrix([a + b for a, b in zip(self.rows, other.rows)], ncols=self.ncols + other.ncols)

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    def __hash__(self) -> int:
        return hash((self.shape, self.rows))

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.rows]

    def __repr__(self) -> str:
        return f"IntMatrix({self.tolist()})"

    def is_zero(self) -> bool:
        return not any(any(r) for r in self.rows)


# Operation logs.  Row ops act on rows of A (left multiplication), column
# ops on columns (right multiplication):
#   ("swap", i, j)        exchange i and j
#   ("add", i, j, q)      line_i += q * line_j
#   ("neg", i)            line_i = -line_i


def _apply_row_ops(ops, vec: list[int]) -> list[int]:
    for op in ops:
        if op[0] == "add":
            _, i, j, q = op
            if vec[j]:
                vec[i] += q * vec[j]
        elif op[0] == "swap":
            _, i, j = op
            vec[i], vec[j] = vec[j], vec[i]
        else:
            vec[op[1]] = -vec[op[1]]
    return vec


def _apply_col_ops_to_vector(ops, vec: list[int]) -> list[int]:
    # V = E_1 E_2 ... E_k, so V y applies E_k first.  For col_i += q col_j,
    # E = I + q e_j e_i^T and (E y)_j += q y_i.
    for op in reversed(ops):
        if op[0] == "add":
            _, i, j, q = op
            if vec[i]:
                vec[j] += q * vec[i]
        elif op[0] == "swap":
            _, i, j = op
            vec[i], vec[j] = vec[j], vec[i]
        else:
            vec[op[1]] = -vec[op[1]]
    return vec


@dataclass
class SmithForm:
    """U A V = D with U, V unimodular and D diagonal with d_1 | d_2 | ...

    ``invariant_factors`` has min(m, n) entries, zeros included.
    """

    shape: tuple[int, int]
    invariant_factors: list[int]
    left_ops: list = field(default_factory=list, repr=False)
    right_ops: list = field(default_factory=list, repr=False)

    @property
    def rank(self) -> int:
        return sum(1 for x in self.invariant_factors if x)

    @property
    def D(self) -> IntMatrix:
        m, n = self.shape
        rows = [[0] * n for _ in range(m)]
        for i, x in enumerate(self.invariant_factors):
            rows[i][i] = x
        return IntMatrix(rows, ncols=n)

    @property
    def U(self) -> IntMatrix:
        m = self.shape[0]
        rows = [[int(i == j) for j in range(m)] for i in range(m)]
        for op in self.left_ops:
            if op[0] == "add":
                _, i, j, q = op
                rows[i] = [a + q * b for a, b in zip(rows[i], rows[j])]
            elif op[0] == "swap":
                _, i, j = op
                rows[i], rows[j] = rows[j], rows[i]
            else:
                rows[op[1]] = [-a for a in rows[op[1]]]
        return IntMatrix(rows, ncols=m)

    @property
    def V(self) -> IntMatrix:
        n = self.shape[1]
        cols = [self.apply_V(e) for e in IntMatrix.identity(n).rows]
        return IntMatrix.from_columns(cols, n)

    def apply_U(self, x: Sequence[int]) -> list[int]:
        if len(x) != self.shape[0]:
            raise ValueError(f"vector of length {len(x)} does not match {self.shape[0]} rows")
        return _apply_row_ops(self.left_ops, list(x))

    def apply_V(self, y: Sequence[int]) -> list[int]:
        if len(y) != self.shape[1]:
            raise ValueError(f"vector of length {len(y)} does not match {self.shape[1]} columns")
        return _apply_col_ops_to_vector(self.right_ops, list(y))

    def kernel_basis(self) -> list[list[int]]:
        n = self.shape[1]
        return [self.apply_V([int(i == j) for i in range(n)]) for j in range(self.rank, n)]

    def to_dict(self) -> dict:
        return {"shape": list(self.shape), "invariant_factors": self.invariant_factors,
                "left_ops": [list(op) for op in self.left_ops],
                "right_ops": [list(op) for op in self.right_ops]}

    @classmethod
    def from_dict(cls, obj: dict) -> SmithForm:
        return cls(tuple(obj["shape"]), list(obj["invariant_factors"]),
                   [tuple(op) for op in obj["left_ops"]], [tuple(op) for op in obj["right_ops"]])


def _find_pivot(a, t: int, m: int, n: int):
    best = None
    for i in range(t, m):
        row = a[i]
        for j in range(t, n):
            x = row[j]
            if x and (best is None or abs(x) < best[0]):
                best = (abs(x), i, j)
                if best[0] == 1:
                    return best
    return best


def smith_normal_form(A: IntMatrix, *, track: bool = True) -> SmithForm:
    """Smith normal form with the smallest-magnitude pivot rule.

    Ties are broken by row-major position.  With ``track=False`` only the
    invariant factors are computed.
    """
    m, n = A.shape
    a = [list(r) for r in A.rows]
    L: list = []
    R: list = []

    def row_swap(i, j):
        if i != j:
            a[i], a[j] = a[j], a[i]
            if track:
                L.append(("swap", i, j))

    def col_swap(i, j):
        if i != j:
            for r in a:
                r[i], r[j] = r[j], r[i]
            if track:
                R.append(("swap", i, j))

    t = 0
    while t < min(m, n):
        piv = _find_pivot(a, t, m, n)
        if piv is None:
            break
        _, i0, j0 = piv
        row_swap(t, i0)
        col_swap(t, j0)
        while True:
            p = a[t][t]
            # clear column t below the pivot
            rest = None
            rt = a[t]
            for i in range(t + 1, m):
                x = a[i][t]
                if x:
                    q = x // p
                    ri = a[i]
                    ri[t:] = [u - q * v for u, v in zip(ri[t:], rt[t:])]
                    if track:
                        L.append(("add", i, t, -q))
                    if ri[t] and (rest is None or abs(ri[t]) < abs(a[rest][t])):
                        rest = i
            if rest is not None:
                row_swap(t, rest)
                continue
            # column t is now zero below the pivot, so column ops touch row t only
            rest = None
            for j in range(t + 1, n):
                x = rt[j]
                if x:
                    q = x // p
                    rt[j] = x - q * p
                    if track:
                        R.append(("add", j, t, -q))
                    if rt[j] and (rest is None or abs(rt[j]) < abs(rt[rest])):
                        rest = j
            if rest is not None:
                col_swap(t, rest)
                continue
            if abs(p) != 1:
                bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                            if a[i][j] % p), None)
                if bad is not None:
                    i = bad[0]
                    a[t] = [u + v for u, v in zip(a[t], a[i])]
                    if track:
                        L.append(("add", t, i, 1))
                    continue
            break
        if a[t][t] < 0:
            a[t] = [-u for u in a[t]]
            if track:
                L.append(("neg", t))
        t += 1
    factors = [a[i][i] for i in range(t)] + [0] * (min(m, n) - t)
    return SmithForm((m, n), factors, L, R)


def invariant_factors(A: IntMatrix) -> list[int]:
    return smith_normal_form(A, track=False).invariant_factors


def kernel_lattice(A: IntMatrix, snf: SmithForm | None = None) -> IntMatrix:
    """Matrix whose columns are a Z-basis of {v : A v = 0}."""
    snf = snf or smith_normal_form(A)
    return IntMatrix.from_columns(snf.kernel_basis(), A.ncols)


def solve(A: IntMatrix, b: Sequence[int], snf: SmithForm | None = None) -> list[int] | None:
    """An integer solution of A x = b, or None when b is not in the column lattice."""
    snf = snf or smith_normal_form(A)
    y = snf.apply_U(b)
    z = [0] * A.ncols
    for i, yi in enumerate(y):
        di = snf.invariant_factors[i] if i < len(snf.invariant_factors) else 0
        if di == 0:
            if yi:
                return None
        elif yi % di:
            return None
        else:
            z[i] = yi // di
    return snf.apply_V(z)


def determinant(A: IntMatrix) -> int:
    """Fraction-free Gaussian elimination (Bareiss)."""
    n = A.nrows
    if n != A.ncols:
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return 1
    a = [list(r) for r in A.rows]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k]), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


class AbelianPresentation:
    """The group Z^m / R Z^k for an m x k relation matrix R.

    Elements are reported in normal-form coordinates: first the free
    coordinates, then one residue per torsion factor.
    """

    def __init__(self, relations: IntMatrix, marked: dict[str, Sequence[int]] | None = None,
                 snf: SmithForm | None = None):
        self.relations = relations
        self.snf = snf or smith_normal_form(relations)
        m = relations.nrows
        factors = self.snf.invariant_factors
        self.ambient_rank = m
        self._torsion_idx = [i for i, x in enumerate(factors) if x > 1]
        self._free_idx = [i for i in range(m) if i >= len(factors) or factors[i] == 0]
        self.torsion_factors = [factors[i] for i in self._torsion_idx]
        self.free_rank = len(self._free_idx)
        self.marked: dict[str, tuple[int, ...]] = {}
        self.marked_vectors: dict[str, tuple[int, ...]] = {}
        for name, vec in (marked or {}).items():
            self.mark(name, vec)

    def __repr__(self) -> str:
        parts = ["Z"] * self.free_rank + [f"Z/{t}" for t in self.torsion_factors]
        return f"AbelianPresentation({' + '.join(parts) or '0'})"

    def mark(self, name: str, vec: Sequence[int]) -> tuple[int, ...]:
        self.marked_vectors[name] = tuple(vec)
        self.marked[name] = self.coords(vec)
        return self.marked[name]

    def coords(self, vec: Sequence[int]) -> tuple[int, ...]:
        y = self.snf.apply_U(vec)
        free = [y[i] for i in self._free_idx]
        tors = [y[i] % self.snf.invariant_factors[i] for i in self._torsion_idx]
        return tuple(free + tors)

    def is_zero(self, vec: Sequence[int]) -> bool:
        return not any(self.coords(vec))

    def order(self, vec: Sequence[int]) -> int | None:
        """Order of the class of vec; None when it has infinite order."""
        c = self.coords(vec)
        if any(c[: self.free_rank]):
            return None
        out = 1
        for r, t in zip(c[self.free_rank:], self.torsion_factors):
            out = math.lcm(out, t // math.gcd(r, t))
        return out

    def in_basis(self, vec: Sequence[int], basis: Sequence[Sequence[int]]) -> tuple[int, ...] | None:
        """Coordinates of vec's class in the given classes, if they form a Z-basis.

        Only meaningful for free groups; returns None when the group has
        torsion or the classes are not a basis.
        """
        if self.torsion_factors or len(basis) != self.free_rank:
            return None
        B = IntMatrix.from_columns([self.coords(b) for b in basis], self.free_rank) \
            if basis else IntMatrix.zeros(0, 0)
        if abs(determinant(B)) != 1:
            return None
        sol = solve(B, self.coords(vec)) if basis else []
        return tuple(sol)

    def is_basis(self, basis: Sequence[Sequence[int]]) -> bool:
        if self.torsion_factors or len(basis) != self.free_rank:
            return False
        if not basis:
            return True
        B = IntMatrix.from_columns([self.coords(b) for b in basis], self.free_rank)
        return abs(determinant(B)) == 1
