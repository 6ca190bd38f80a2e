"""Orbit data behind the continuous orbit equivalence invariant.

X is the set of classes with a nontrivial stabilizer and Y the set of
classes glued by R_F, that is the classes of g w^{+inf} with w in F.  The
number of F_d-orbits in Y recovers the size of F.  Orbits of Y-points are
told apart by the period of the point up to rotation and inversion; when
two keys agree a translating element is built and checked by acting.
"""
from __future__ import annotations

from dataclasses import dataclass

from .boundary import BoundaryPoint, act, limit_point
from .quotient import RelationSpec, class_of, period_key
from .words import Letter, RankMismatchError, ReducedWord, _concat, _inv, all_words, letter_key, word_text

__all__ = [
    "OrbitKey",
    "orbit_key",
    "in_X",
    "stabilizer_witness",
    "in_Y",
    "same_orbit",
    "orbit_translator",
    "orbit_representatives",
    "orbit_count",
]


@dataclass(frozen=True, order=True)
class OrbitKey:
    """Least rotation of the period or of its inverse, whichever comes first."""
    letters: tuple[int, ...]

    def sort_key(self):
        return (len(self.letters), [letter_key(x) for x in self.letters])

    def __str__(self) -> str:
        return word_text(self.letters)


def orbit_key(x: BoundaryPoint) -> OrbitKey:
    return OrbitKey(period_key(x.period))


def _spec(F, d: int) -> RelationSpec:
    if isinstance(F, RelationSpec):
        if F.d != d:
            raise RankMismatchError(f"rank mismatch: F_{d} vs F_{F.d}")
        spec = F
    else:
        words = []
        for s in F:
            if isinstance(s, Letter):
                s = int(s)
            words.append(s if isinstance(s, ReducedWord) else ReducedWord(d, (s,)))
        spec = RelationSpec(d, tuple(words))
    if not spec.words:
        raise ValueError("F must be nonempty")
    return spec


def stabilizer_witness(x: BoundaryPoint) -> ReducedWord:
    """g = u v u^-1 for x = u v^{+inf}; canonical form makes it reduced and g x = x."""
    u, v = x.preperiod, x.period
    g = ReducedWord(x.d, u + v + _inv(u))
    if act(g, x) != x:
        raise AssertionError(f"{g} does not fix {x}")
    return g


def in_X(x: BoundaryPoint, W=None) -> bool:
    """Whether some g != e fixes the class of x.

    Every eventually periodic point is fixed by a conjugate of its period,
    so this holds for all representable points; the witness is checked.
    """
    if W is not None:
        _spec(W, x.d)
    return not stabilizer_witness(x).is_identity


def in_Y(x: BoundaryPoint, F) -> bool:
    """Whether x is g w^{+-inf} for some w in F, i.e. its class is glued by R_F."""
    spec = _spec(F, x.d)
    key = period_key(x.period)
    return any(period_key(p) == key for p in spec.periods())


def orbit_translator(x: BoundaryPoint, y: BoundaryPoint, F) -> ReducedWord | None:
    """g with g [x] = [y] in the quotient by R_F, or None when the orbits differ."""
    spec = _spec(F, x.d)
    if x.d != y.d:
        raise RankMismatchError(f"rank mismatch: F_{x.d} vs F_{y.d}")
    for p in (x, y):
        if not in_Y(p, spec):
            raise ValueError(f"{p} is not in Y for F = {spec}")
    if orbit_key(x) != orbit_key(y):
        return None
    target = y.period
    for xs in class_of(x, spec).points:
        v = xs.period
        for k in range(len(v)):
            if v[k:] + v[:k] != target:
                continue
            # xs = u v[:k] (v[k:] v[:k])^inf, so u_y (u v[:k])^-1 moves it onto y
            g = ReducedWord(x.d, _concat(y.preperiod, _inv(_concat(xs.preperiod, v[:k]))))
            if act(g, xs) == y:
                return g
            raise AssertionError(f"translator {g} fails to move {xs} onto {y}")
    raise AssertionError(f"orbit keys of {x} and {y} agree but no translator was found")


def same_orbit(x: BoundaryPoint, y: BoundaryPoint, F) -> bool:
    return orbit_translator(x, y, F) is not None


def orbit_representatives(F, d: int, check_bound: int = 4) -> list[BoundaryPoint]:
    """One point w^{+inf} per F_d-orbit of Y, w running over F.

    Every translate g w^{+inf} with |g| <= check_bound is checked to fall
    into a counted orbit, with the translator verified by acting.
    """
    spec = _spec(F, d)
    starts = [limit_point(w, +1) for w in spec.words]
    reps: list[BoundaryPoint] = []
    for x in starts:
        if not any(same_orbit(x, r, spec) for r in reps):
            reps.append(x)
    for n in range(check_bound + 1):
        for letters in all_words(d, n):
            g = ReducedWord(d, letters)
            for x in starts:
                y = act(g, x)
                if not any(same_orbit(y, r, spec) for r in reps):
                    raise AssertionError(f"{y} lies in none of the counted orbits")
    return reps


def orbit_count(F, d: int | None = None, check_bound: int = 4) -> int:
    """Number of F_d-orbits in Y."""
    if d is None:
        if not isinstance(F, RelationSpec):
            raise ValueError("d is required unless F is a RelationSpec")
        d = F.d
    return len(orbit_representatives(F, d, check_bound))
