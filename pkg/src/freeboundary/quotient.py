"""The glued relations R_W on the boundary of F_d.

R_W identifies g w^{+inf} with g w^{-inf} for every g in F_d and w in
W u W^-1.  Each class has one or two points.  A two-point class is the pair
of ends of the axis of g w g^-1, so it is described by the projection h of
the identity onto that axis together with the period r read along the axis
from h:  the points are h r^{+inf} and h r^{-inf}, and both share exactly
|h| leading letters.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .boundary import BoundaryPoint, act, limit_point
from .words import (
    Letter,
    RankMismatchError,
    ReducedWord,
    _cyclic_split,
    _inv,
    _least_rotation,
    _primitive_root,
    all_words,
    generators,
    is_geodesic_concat,
    letter_key,
)

__all__ = [
    "RelationSpec",
    "ClassRep",
    "decompose",
    "related",
    "class_of",
    "classes_meeting_level",
    "constraint_pairs",
    "density_witness",
    "separating_element",
    "period_key",
]


def period_key(period: tuple[int, ...]) -> tuple[int, ...]:
    """Conjugacy key of a cyclically reduced primitive period, symmetrized under inversion."""
    k1 = _least_rotation(period)
    k2 = _least_rotation(_inv(period))
    return min(k1, k2, key=lambda r: [letter_key(x) for x in r])


@dataclass(frozen=True)
class RelationSpec:
    d: int
    words: tuple[ReducedWord, ...] = ()

    def __post_init__(self):
        words = tuple(self.words)
        for w in words:
            if w.d != self.d:
                raise RankMismatchError(f"relation word {w} is not in F_{self.d}")
            if w.is_identity:
                raise ValueError("the identity cannot be a relation word")
        # sorted and deduplicated, so equal relations hash equally
        object.__setattr__(self, "words", tuple(sorted(set(words), key=ReducedWord.sort_key)))

    @classmethod
    def parse(cls, text: str, d: int) -> RelationSpec:
        """Comma-separated words; ``S`` expands to the generators, ``none`` is empty."""
        text = text.strip()
        if text.lower() in ("none", ""):
            return cls(d, ())
        words: list[ReducedWord] = []
        for token in text.split(","):
            token = token.strip()
            if token == "S":
                words.extend(generators(d))
            else:
                words.append(ReducedWord.parse(token, d))
        return cls(d, tuple(words))

    @classmethod
    def generators(cls, d: int) -> RelationSpec:
        return cls(d, tuple(generators(d)))

    def __str__(self) -> str:
        return ",".join(map(str, self.words)) if self.words else "none"

    def __len__(self) -> int:
        return len(self.words)

    def with_inverses(self) -> list[ReducedWord]:
        out = []
        for w in self.words:
            out.extend([w, w.inverse()])
        return out

    def periods(self) -> list[tuple[int, ...]]:
        """Primitive periods of the relation words, one per conjugacy-up-to-inversion class."""
        seen = {}
        for w in self.words:
            _, c = _cyclic_split(w.letters)
            p, _ = _primitive_root(c)
            seen.setdefault(period_key(p), p)
        return [seen[k] for k in sorted(seen, key=lambda r: (len(r), [letter_key(x) for x in r]))]


@dataclass(frozen=True)
class ClassRep:
    points: tuple[BoundaryPoint, ...]

    def __post_init__(self):
        pts = tuple(sorted(set(self.points), key=str))
        if not 1 <= len(pts) <= 2:
            raise ValueError("an R_W class has one or two points")
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return len(self.points)

    def __contains__(self, x) -> bool:
        return x in self.points

    def __str__(self) -> str:
        return "{" + ", ".join(map(str, self.points)) + "}"

    def sort_key(self) -> tuple[str, ...]:
        return tuple(map(str, self.points))


def _check(x: BoundaryPoint, spec: RelationSpec):
    if x.d != spec.d:
        raise RankMismatchError(f"rank mismatch: F_{x.d} vs F_{spec.d}")


def decompose(x: BoundaryPoint, spec: RelationSpec) -> tuple[ReducedWord, ReducedWord] | None:
    """Find (g, w) with w in W u W^-1 and x = g w^{+inf}, or None.

    The candidate g is read off the canonical forms and then checked by
    acting, so a returned pair is always a verified decomposition.
    """
    _check(x, spec)
    u, v = x.preperiod, x.period
    n = len(v)
    for w in spec.with_inverses():
        a, c = _cyclic_split(w.letters)
        p, _ = _primitive_root(c)
        if len(p) != n:
            continue
        for k in range(n):
            if p[k:] + p[:k] == v:
                # v^inf = p[:k]^-1 p^inf and p^inf = a^-1 w^inf
                g = ReducedWord.reduce(spec.d, u + _inv(p[:k]) + _inv(a))
                if act(g, limit_point(w, +1)) != x:
                    raise AssertionError(f"decomposition of {x} via {w} failed verification")
                return g, w
    return None


def class_of(x: BoundaryPoint, spec: RelationSpec) -> ClassRep:
    found = decompose(x, spec)
    if found is None:
        return ClassRep((x,))
    g, w = found
    return ClassRep((x, act(g, limit_point(w, -1))))


def related(x: BoundaryPoint, y: BoundaryPoint, spec: RelationSpec) -> bool:
    _check(y, spec)
    return x == y or y in class_of(x, spec)


@lru_cache(maxsize=256)
def _classes_meeting_level(spec: RelationSpec, n: int) -> tuple[ClassRep, ...]:
    d = spec.d
    heads = [h for k in range(n) for h in all_words(d, k)]
    out = set()
    for p in spec.periods():
        for k in range(len(p)):
            r = p[k:] + p[:k]
            rinv = _inv(r)
            for h in heads:
                if h and (h[-1] == -r[0] or h[-1] == r[-1]):
                    continue
                # h is the projection of e onto the axis, so both forms are canonical
                out.add(ClassRep((BoundaryPoint(d, h, r), BoundaryPoint(d, h, rinv))))
    return tuple(sorted(out, key=ClassRep.sort_key))


def classes_meeting_level(n: int, spec: RelationSpec) -> list[ClassRep]:
    """Every two-point class whose points differ within their first n letters."""
    if n < 1:
        raise ValueError("level must be at least 1")
    return list(_classes_meeting_level(spec, n))


@lru_cache(maxsize=256)
def constraint_pairs(spec: RelationSpec, n: int) -> tuple[tuple[int, int], ...]:
    """Cylinder index pairs whose coefficients must agree for R_W-invariance at level n."""
    from .clopen import cylinder_index

    pairs = []
    for cls in _classes_meeting_level(spec, n):
        x, y = cls.points
        pairs.append((cylinder_index(spec.d, x.head(n)), cylinder_index(spec.d, y.head(n))))
    return tuple(pairs)


def density_witness(x: ReducedWord, y: ReducedWord) -> ReducedWord:
    """h = x w y^-1 with h^{+inf} starting with x and h^{-inf} starting with y.

    w is the first word in length-lexicographic order (length at least one)
    for which the concatenation is geodesic.
    """
    if x.d != y.d:
        raise RankMismatchError(f"rank mismatch: F_{x.d} vs F_{y.d}")
    if len(x) != len(y) or x == y or x.is_identity:
        raise ValueError("density witness needs distinct nontrivial words of equal length")
    d = x.d
    for n in (1, 2):
        for letters in all_words(d, n):
            w = ReducedWord(d, letters)
            if not is_geodesic_concat(x, w, y):
                continue
            h = x * w * y.inverse()
            plus, minus = limit_point(h, +1), limit_point(h, -1)
            if plus.head(len(x)) != x.letters or minus.head(len(y)) != y.letters:
                raise AssertionError(f"witness {h} for ({x}, {y}) has the wrong prefixes")
            return h
    raise AssertionError("no geodesic filler of length at most 2")


def _single_letter_form(x: BoundaryPoint):
    """(z, s) with x = z s^{+inf} and s a letter, or None."""
    if len(x.period) == 1:
        return x.preperiod, x.period[0]
    return None


def separating_element(x: BoundaryPoint, y: BoundaryPoint) -> tuple[ReducedWord, Letter]:
    """(g, s) such that the function g q[s] separates x from y.

    Follows the two cases of the argument that the translates of the q[s]
    separate points of the quotient by R_S: either one point is not of the
    form z s^{+inf}, and a run of equal letters after the first disagreement
    locates the separator, or both are, and the longer head does.
    """
    from .clopen import cylinder_q, evaluate, translate

    if x.d != y.d:
        raise RankMismatchError(f"rank mismatch: F_{x.d} vs F_{y.d}")
    d = x.d
    if related(x, y, RelationSpec.generators(d)):
        raise ValueError(f"{x} and {y} are identified by R_S and cannot be separated")
    fx, fy = _single_letter_form(x), _single_letter_form(y)
    if fx is not None and fy is None:
        x, y, fx, fy = y, x, fy, fx
    if fx is None:
        # first disagreement n, then the end m of the run x_n = ... = x_{m-1}
        limit = len(x.preperiod) + len(y.preperiod) + 2 * len(x.period) * len(y.period) + 2
        hx, hy = x.head(limit), y.head(limit)
        n = next(i for i in range(limit) if hx[i] != hy[i])
        hx = x.head(n + len(x.preperiod) + 2 * len(x.period) + 2)
        m = next(i for i in range(n + 1, len(hx)) if hx[i] != hx[n])
        g, s = ReducedWord(d, hx[:m]), hx[m]
    else:
        (z, s), (w, t) = fx, fy
        if len(z) < len(w):
            x, y, z, s = y, x, w, t
        g = ReducedWord(d, z)
    letter = Letter(abs(s))
    sep = translate(g, cylinder_q(ReducedWord(d, (abs(s),))))
    if evaluate(sep, x) == evaluate(sep, y):
        raise AssertionError(f"{g} q[{letter}] does not separate {x} and {y}")
    return g, letter

