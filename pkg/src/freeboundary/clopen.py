"""Locally constant integer-valued functions on the boundary of F_d.

A :class:`LevelFunction` of level n assigns an integer to every cylinder
set ``{x : x_1 ... x_n = w}`` with ``|w| = n``.  Coefficients are kept in a
tuple indexed by the length-lexicographic position of ``w`` (letter order
a < A < b < B < ...), so the 2d-1 children of a cylinder occupy a
contiguous block one level down.  That makes refinement a repeat and
minimization a block comparison.
"""
from __future__ import annotations

import json
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .boundary import BoundaryPoint
from .words import (
    RankMismatchError,
    ReducedWord,
    _concat,
    _inv,
    all_words,
    letter_key,
    word_text,
)

__all__ = [
    "LevelFunction",
    "cylinder_count",
    "cylinder_words",
    "cylinder_index",
    "constant",
    "cylinder_p",
    "cylinder_q",
    "refine",
    "translate",
    "translation_map",
    "evaluate",
    "is_R_invariant",
    "invariant_components",
    "invariant_basis",
    "parse_function",
]


def cylinder_count(d: int, n: int) -> int:
    """N_n = 2d (2d-1)^(n-1), the number of reduced words of length n."""
    return 2 * d * (2 * d - 1) ** (n - 1)


@lru_cache(maxsize=None)
def cylinder_words(d: int, n: int) -> tuple[tuple[int, ...], ...]:
    return tuple(all_words(d, n))


def cylinder_index(d: int, w: Sequence[int]) -> int:
    """Position of the reduced word w among the words of length |w|."""
    if not w:
        raise ValueError("the empty word is not a cylinder label")
    idx = letter_key(w[0])
    for prev, x in zip(w, w[1:]):
        k = letter_key(x)
        if k > letter_key(-prev):
            k -= 1
        idx = idx * (2 * d - 1) + k
    return idx


class LevelFunction:
    """Integer combination of the level-n cylinder indicators.

    Equality is equality of functions on the boundary: operands of
    different level are compared after refining to the common level.
    """

    __slots__ = ("d", "level", "coeffs")

    def __init__(self, d: int, level: int, coeffs: Iterable[int]):
        coeffs = tuple(int(c) for c in coeffs)
        if level < 1:
            raise ValueError("level must be at least 1")
        if len(coeffs) != cylinder_count(d, level):
            raise ValueError(
                f"level-{level} function on F_{d} needs {cylinder_count(d, level)} "
                f"coefficients, got {len(coeffs)}")
        self.d = d
        self.level = level
        self.coeffs = coeffs

    @classmethod
    def from_mapping(cls, d: int, level: int, values: Mapping) -> LevelFunction:
        """Build from {word: coefficient}; words may be ReducedWord, text or tuples."""
        coeffs = [0] * cylinder_count(d, level)
        for key, c in values.items():
            if isinstance(key, ReducedWord):
                w = key.letters
            elif isinstance(key, str):
                w = ReducedWord.parse(key, d).letters
            else:
                w = tuple(key)
            if len(w) != level:
                raise ValueError(f"word {word_text(w)} does not have length {level}")
            coeffs[cylinder_index(d, w)] = c
        return cls(d, level, coeffs)

    def __repr__(self) -> str:
        nz = {word_text(w): c for w, c in self.items() if c}
        return f"LevelFunction(d={self.d}, level={self.level}, {nz})"

    def items(self):
        return zip(cylinder_words(self.d, self.level), self.coeffs)

    def __getitem__(self, w) -> int:
        """Coefficient of the cylinder labelled by w (at the function's level)."""
        if isinstance(w, ReducedWord):
            w = w.letters
        elif isinstance(w, str):
            w = ReducedWord.parse(w, self.d).letters
        if len(w) != self.level:
            raise ValueError(f"cylinder {word_text(w)} is not at level {self.level}")
        return self.coeffs[cylinder_index(self.d, w)]

    def refine(self, m: int) -> LevelFunction:
        if m < self.level:
            raise ValueError(f"cannot refine level {self.level} down to {m}")
        if m == self.level:
            return self
        rep = (2 * self.d - 1) ** (m - self.level)
        return LevelFunction(self.d, m, (c for c in self.coeffs for _ in range(rep)))

    def minimized(self) -> LevelFunction:
        """Same function at the lowest level that still represents it."""
        coeffs, level, b = self.coeffs, self.level, 2 * self.d - 1
        while level > 1:
            blocks = [coeffs[i:i + b] for i in range(0, len(coeffs), b)]
            if any(len(set(block)) > 1 for block in blocks):
                break
            coeffs = tuple(block[0] for block in blocks)
            level -= 1
        if level == self.level:
            return self
        return LevelFunction(self.d, level, coeffs)

    def _aligned(self, other: LevelFunction) -> tuple[tuple[int, ...], tuple[int, ...], int]:
        if self.d != other.d:
            raise RankMismatchError(f"rank mismatch: F_{self.d} vs F_{other.d}")
        m = max(self.level, other.level)
        return self.refine(m).coeffs, other.refine(m).coeffs, m

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = constant(self.d, other)
        if not isinstance(other, LevelFunction):
            return NotImplemented
        if self.d != other.d:
            return False
        a, b, _ = self._aligned(other)
        return a == b

    def __hash__(self) -> int:
        f = self.minimized()
        return hash((f.d, f.level, f.coeffs))

    def __add__(self, other) -> LevelFunction:
        if isinstance(other, int):
            other = constant(self.d, other)
        a, b, m = self._aligned(other)
        return LevelFunction(self.d, m, (x + y for x, y in zip(a, b)))

    __radd__ = __add__

    def __neg__(self) -> LevelFunction:
        return LevelFunction(self.d, self.level, (-c for c in self.coeffs))

    def __sub__(self, other) -> LevelFunction:
        if isinstance(other, int):
            other = constant(self.d, other)
        return self + (-other)

    def __rsub__(self, other) -> LevelFunction:
        return (-self) + other

    def __mul__(self, k: int) -> LevelFunction:
        if not isinstance(k, int):
            return NotImplemented
        return LevelFunction(self.d, self.level, (k * c for c in self.coeffs))

    __rmul__ = __mul__

    def total(self) -> int:
        """Sum of coefficients at the stored level."""
        return sum(self.coeffs)

    def to_json(self) -> str:
        coeffs = {word_text(w): c for w, c in self.items()}
        return json.dumps({"d": self.d, "level": self.level, "coeffs": coeffs})

    @classmethod
    def from_json(cls, text: str) -> LevelFunction:
        obj = json.loads(text)
        return cls.from_mapping(obj["d"], obj["level"], obj["coeffs"])


def constant(d: int, c: int = 1) -> LevelFunction:
    return LevelFunction(d, 1, [c] * (2 * d))


def cylinder_p(w: ReducedWord) -> LevelFunction:
    """Indicator of the cylinder of boundary points starting with w."""
    if w.is_identity:
        raise ValueError("p[e] is the constant function; use constant()")
    coeffs = [0] * cylinder_count(w.d, len(w))
    coeffs[cylinder_index(w.d, w.letters)] = 1
    return LevelFunction(w.d, len(w), coeffs)


def cylinder_q(w: ReducedWord) -> LevelFunction:
    """p[w] + p[w^-1]."""
    return cylinder_p(w) + cylinder_p(w.inverse())


def refine(f: LevelFunction, m: int) -> LevelFunction:
    return f.refine(m)


def translate(g: ReducedWord, f: LevelFunction) -> LevelFunction:
    """(g f)(x) = f(g^-1 x), returned in minimal-level form."""
    if g.d != f.d:
        raise RankMismatchError(f"rank mismatch: F_{g.d} vs F_{f.d}")
    if g.is_identity:
        return f.minimized()
    index_map = translation_map(f.d, g.letters, f.level)
    c = f.coeffs
    return LevelFunction(f.d, f.level + len(g), [c[i] for i in index_map]).minimized()


@lru_cache(maxsize=1024)
def translation_map(d: int, g: tuple[int, ...], n: int) -> tuple[int, ...]:
    """For each cylinder z of level n + |g|, the level-n cylinder containing g^-1 z.

    Cancellation eats at most |g| letters of z, so g^-1 z keeps n letters.
    """
    ginv = _inv(g)
    return tuple(cylinder_index(d, _concat(ginv, z)[:n]) for z in cylinder_words(d, n + len(g)))


def evaluate(f: LevelFunction, x: BoundaryPoint) -> int:
    if f.d != x.d:
        raise RankMismatchError(f"rank mismatch: F_{f.d} vs F_{x.d}")
    return f.coeffs[cylinder_index(f.d, x.head(f.level))]


def _relation(W, d: int):
    from .quotient import RelationSpec

    if isinstance(W, RelationSpec):
        if W.d != d:
            raise RankMismatchError(f"rank mismatch: F_{d} vs F_{W.d}")
        return W
    return RelationSpec(d, tuple(W))


def is_R_invariant(f: LevelFunction, W) -> bool:
    """Whether f is constant on every class of the relation R_W."""
    from .quotient import constraint_pairs

    spec = _relation(W, f.d)
    c = f.coeffs
    return all(c[i] == c[j] for i, j in constraint_pairs(spec, f.level))


@lru_cache(maxsize=256)
def _components(spec, n: int) -> tuple[tuple[int, ...], ...]:
    from .quotient import constraint_pairs

    size = cylinder_count(spec.d, n)
    parent = list(range(size))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in constraint_pairs(spec, n):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)
    groups: dict[int, list[int]] = {}
    for i in range(size):
        groups.setdefault(find(i), []).append(i)
    return tuple(tuple(g) for g in sorted(groups.values()))


def invariant_components(d: int, n: int, W) -> tuple[tuple[int, ...], ...]:
    """Level-n cylinders grouped into the classes forced equal by R_W.

    Groups are ordered by their smallest cylinder index.
    """
    return _components(_relation(W, d), n)


def invariant_basis(d: int, n: int, W) -> list[LevelFunction]:
    """Z-basis of the level-n functions that are constant on R_W classes.

    The invariance constraints are equalities between pairs of cylinder
    coefficients, so the solution lattice is spanned by the indicators of
    the connected components of the constraint graph.
    """
    size = cylinder_count(d, n)
    basis = []
    for comp in invariant_components(d, n, W):
        coeffs = [0] * size
        for i in comp:
            coeffs[i] = 1
        basis.append(LevelFunction(d, n, coeffs))
    return basis


def parse_function(text: str, d: int) -> LevelFunction:
    """Parse ``p[w]``, ``q[w]`` or an integer constant."""
    text = text.strip()
    if text[:2] in ("p[", "q[") and text.endswith("]"):
        w = ReducedWord.parse(text[2:-1], d)
        return cylinder_p(w) if text[0] == "p" else cylinder_q(w)
    try:
        return constant(d, int(text))
    except ValueError:
        raise ValueError(f"cannot parse function {text!r}; expected p[w], q[w] or an integer") from None

