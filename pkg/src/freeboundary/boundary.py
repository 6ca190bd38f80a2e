"""Eventually periodic points of the boundary of F_d.

A point is stored as ``u . v v v ...`` with the preperiod ``u`` as short as
possible and the period ``v`` primitive.  Those two conditions make the
representation unique, so dataclass equality is equality of points.
"""
from __future__ import annotations

from dataclasses import dataclass

from .words import (
    NotReducedError,
    ReducedWord,
    RankMismatchError,
    _concat,
    _cyclic_split,
    _inv,
    _primitive_root,
    word_text,
)

__all__ = [
    "BoundaryPoint",
    "canonicalize",
    "limit_point",
    "act",
    "prefix",
    "fixed_points",
    "is_fixed",
]


def _canonical(u: tuple[int, ...], v: tuple[int, ...]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Canonical (preperiod, period) of the infinite word u v v v ...

    u must be reduced and v a nontrivial reduced word; the concatenation
    itself may cancel.
    """
    a, c = _cyclic_split(v)
    # v^n = a c^n a^-1, so v^inf = a c^inf
    u = _concat(u, a)
    p, _ = _primitive_root(c)
    # cancellation of u against the head of p^inf rotates the period
    while u and u[-1] == -p[0]:
        u = u[:-1]
        p = p[1:] + p[:1]
    # shorten the preperiod while its last letter equals the period's last letter
    while u and u[-1] == p[-1]:
        u = u[:-1]
        p = p[-1:] + p[:-1]
    return u, p


@dataclass(frozen=True)
class BoundaryPoint:
    d: int
    preperiod: tuple[int, ...]
    period: tuple[int, ...]

    @classmethod
    def make(cls, u: ReducedWord, v: ReducedWord) -> BoundaryPoint:
        """The point u v^inf, canonicalized; any cancellation is performed."""
        if u.d != v.d:
            raise RankMismatchError(f"rank mismatch: F_{u.d} vs F_{v.d}")
        if v.is_identity:
            raise ValueError("period must be nontrivial")
        return cls(u.d, *_canonical(u.letters, v.letters))

    @classmethod
    def parse(cls, text: str, d: int) -> BoundaryPoint:
        try:
            left, right = text.strip().split("|")
        except ValueError:
            raise ValueError(f"boundary point {text!r} must have the form 'u|v'") from None
        u = ReducedWord.parse(left, d)
        v = ReducedWord.parse(right, d)
        if v.is_identity:
            raise ValueError(f"boundary point {text!r} has trivial period")
        body = u.letters + v.letters + v.letters
        for x, y in zip(body, body[1:]):
            if x == -y:
                raise NotReducedError(f"{text!r} does not describe a reduced infinite word")
        return cls(d, *_canonical(u.letters, v.letters))

    @property
    def u(self) -> ReducedWord:
        return ReducedWord(self.d, self.preperiod)

    @property
    def v(self) -> ReducedWord:
        return ReducedWord(self.d, self.period)

    def __str__(self) -> str:
        return f"{word_text(self.preperiod)}|{word_text(self.period)}"

    def __repr__(self) -> str:
        return f"BoundaryPoint({self.d}, {str(self)!r})"

    def head(self, n: int) -> tuple[int, ...]:
        """First n letters as a raw letter tuple."""
        u, v = self.preperiod, self.period
        if n <= len(u):
            return u[:n]
        reps = (n - len(u)) // len(v) + 1
        return (u + v * reps)[:n]


def canonicalize(u: ReducedWord, v: ReducedWord) -> BoundaryPoint:
    return BoundaryPoint.make(u, v)


def limit_point(w: ReducedWord, sign: int = +1) -> BoundaryPoint:
    """w^{+inf} for sign > 0 and w^{-inf} for sign < 0."""
    if w.is_identity:
        raise ValueError("the identity has no limit points")
    letters = w.letters if sign > 0 else _inv(w.letters)
    return BoundaryPoint(w.d, *_canonical((), letters))


def act(g: ReducedWord, x: BoundaryPoint) -> BoundaryPoint:
    """Left translation g . x."""
    if g.d != x.d:
        raise RankMismatchError(f"rank mismatch: F_{g.d} vs F_{x.d}")
    u = _concat(g.letters, x.preperiod)
    return BoundaryPoint(x.d, *_canonical(u, x.period))


def prefix(x: BoundaryPoint, n: int) -> ReducedWord:
    if n < 0:
        raise ValueError("prefix length must be nonnegative")
    return ReducedWord(x.d, x.head(n))


def fixed_points(g: ReducedWord) -> tuple[BoundaryPoint, BoundaryPoint]:
    return limit_point(g, +1), limit_point(g, -1)


def is_fixed(g: ReducedWord, x: BoundaryPoint) -> bool:
    if g.is_identity:
        raise ValueError("every point is fixed by the identity")
    return act(g, x) == x
