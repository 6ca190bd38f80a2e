"""Reduced words in the free group F_d.

Letters are stored internally as signed integers: ``+i`` is the i-th
generator (1-based) and ``-i`` its inverse.  The text format uses ``a``,
``b``, ``c``, ... for generators, the uppercase letter for the inverse and
``1`` for the identity.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

__all__ = [
    "Letter",
    "ReducedWord",
    "RankMismatchError",
    "NotReducedError",
    "letter_key",
    "letter_char",
    "parse_letter",
    "word_text",
    "identity",
    "generators",
    "multiply",
    "inverse",
    "gromov_product",
    "is_geodesic_concat",
    "cyclic_reduce",
    "primitive_root",
    "conjugacy_key",
    "all_words",
]

ALPHABET = "abcdefghijklmnopqrstuvwxyz"


class RankMismatchError(ValueError):
    pass


class NotReducedError(ValueError):
    pass


def letter_key(x: int) -> int:
    """Position of a signed letter in the fixed order a < A < b < B < ..."""
    return 2 * (abs(x) - 1) + (x < 0)


def letter_char(x: int) -> str:
    c = ALPHABET[abs(x) - 1]
    return c.upper() if x < 0 else c


def parse_letter(c: str, d: int) -> int:
    i = ALPHABET.find(c.lower()) + 1
    if i == 0 or i > d:
        raise ValueError(f"letter {c!r} is not a generator of F_{d}")
    return -i if c.isupper() else i


def word_text(letters: Sequence[int]) -> str:
    return "".join(map(letter_char, letters)) if letters else "1"


def _is_reduced(letters: Sequence[int]) -> bool:
    return all(x != -y for x, y in zip(letters, letters[1:]))


def _free_reduce(letters: Iterable[int]) -> tuple[int, ...]:
    out: list[int] = []
    for x in letters:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def _concat(x: Sequence[int], y: Sequence[int]) -> tuple[int, ...]:
    """Reduced product of two reduced letter tuples."""
    k = 0
    n = min(len(x), len(y))
    while k < n and x[len(x) - 1 - k] == -y[k]:
        k += 1
    return tuple(x[: len(x) - k]) + tuple(y[k:])


def _inv(x: Sequence[int]) -> tuple[int, ...]:
    return tuple(-l for l in reversed(x))


@dataclass(frozen=True)
class Letter:
    generator_index: int
    inverted: bool = False

    def __post_init__(self):
        if self.generator_index < 1:
            raise ValueError("generator_index starts at 1")

    @classmethod
    def from_int(cls, x: int) -> Letter:
        return cls(abs(x), x < 0)

    def __int__(self) -> int:
        return -self.generator_index if self.inverted else self.generator_index

    def inverse(self) -> Letter:
        return Letter(self.generator_index, not self.inverted)

    def __str__(self) -> str:
        return letter_char(int(self))


@dataclass(frozen=True)
class ReducedWord:
    """An element of F_d, stored as its reduced letter sequence."""

    d: int
    letters: tuple[int, ...] = ()

    def __post_init__(self):
        if self.d < 2:
            raise ValueError(f"rank must be at least 2, got {self.d}")
        letters = tuple(self.letters)
        object.__setattr__(self, "letters", letters)
        for x in letters:
            if x == 0 or abs(x) > self.d:
                raise ValueError(f"letter {x} out of range for rank {self.d}")
        if not _is_reduced(letters):
            raise NotReducedError(f"{word_text(letters)} is not reduced")

    @classmethod
    def reduce(cls, d: int, letters: Iterable[int]) -> ReducedWord:
        """Free reduction of an arbitrary letter sequence."""
        return cls(d, _free_reduce(letters))

    @classmethod
    def parse(cls, text: str, d: int) -> ReducedWord:
        text = text.strip()
        if text == "1":
            return cls(d, ())
        if not text:
            raise ValueError("empty word; use '1' for the identity")
        letters = tuple(parse_letter(c, d) for c in text)
        for i, (x, y) in enumerate(zip(letters, letters[1:])):
            if x == -y:
                raise NotReducedError(
                    f"{text!r} is not reduced: {text[i:i + 2]!r} cancels at position {i}")
        return cls(d, letters)

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return word_text(self.letters)

    def __repr__(self) -> str:
        return f"ReducedWord({self.d}, {str(self)!r})"

    def __mul__(self, other: ReducedWord) -> ReducedWord:
        return multiply(self, other)

    def __pow__(self, k: int) -> ReducedWord:
        base = self if k >= 0 else self.inverse()
        out = identity(self.d)
        for _ in range(abs(k)):
            out = out * base
        return out

    def inverse(self) -> ReducedWord:
        return ReducedWord(self.d, _inv(self.letters))

    @property
    def is_identity(self) -> bool:
        return not self.letters

    def letter(self, i: int) -> Letter:
        return Letter.from_int(self.letters[i])

    def sort_key(self) -> tuple:
        return (len(self.letters), tuple(letter_key(x) for x in self.letters))


def identity(d: int) -> ReducedWord:
    return ReducedWord(d, ())


def generators(d: int) -> list[ReducedWord]:
    return [ReducedWord(d, (i,)) for i in range(1, d + 1)]


def _check_rank(*words: ReducedWord) -> int:
    d = words[0].d
    for w in words[1:]:
        if w.d != d:
            raise RankMismatchError(f"rank mismatch: F_{d} vs F_{w.d}")
    return d


def multiply(x: ReducedWord, y: ReducedWord) -> ReducedWord:
    d = _check_rank(x, y)
    return ReducedWord(d, _concat(x.letters, y.letters))


def inverse(x: ReducedWord) -> ReducedWord:
    return x.inverse()


def gromov_product(y: ReducedWord, z: ReducedWord, base: ReducedWord) -> Fraction:
    """(d(y, base) + d(z, base) - d(y, z)) / 2 for the word metric."""
    _check_rank(y, z, base)
    binv = base.inverse()
    total = len(binv * y) + len(binv * z) - len(y.inverse() * z)
    return Fraction(total, 2)


def is_geodesic_concat(x: ReducedWord, w: ReducedWord, y: ReducedWord) -> bool:
    """True when |x w y^-1| = |x| + |w| + |y|."""
    _check_rank(x, w, y)
    yinv = y.inverse()
    if w.is_identity:
        return not (x.letters and yinv.letters and x.letters[-1] == -yinv.letters[0])
    if x.letters and x.letters[-1] == -w.letters[0]:
        return False
    if yinv.letters and w.letters[-1] == -yinv.letters[0]:
        return False
    return True


def _cyclic_split(letters: tuple[int, ...]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    k = 0
    n = len(letters)
    while 2 * k + 1 < n and letters[k] == -letters[n - 1 - k]:
        k += 1
    return letters[:k], letters[k:n - k]


def cyclic_reduce(w: ReducedWord) -> tuple[ReducedWord, ReducedWord]:
    """Split w = a c a^-1 with c cyclically reduced and a as long as possible."""
    if w.is_identity:
        raise ValueError("the identity has no cyclic reduction")
    a, c = _cyclic_split(w.letters)
    return ReducedWord(w.d, a), ReducedWord(w.d, c)


def _is_cyclically_reduced(letters: Sequence[int]) -> bool:
    return len(letters) > 0 and letters[0] != -letters[-1]


def _primitive_root(letters: tuple[int, ...]) -> tuple[tuple[int, ...], int]:
    n = len(letters)
    for p in range(1, n + 1):
        if n % p == 0 and letters[:p] * (n // p) == letters:
            return letters[:p], n // p
    raise AssertionError("unreachable")


def primitive_root(w: ReducedWord) -> tuple[ReducedWord, int]:
    if not _is_cyclically_reduced(w.letters):
        raise ValueError(f"{w} is not a nontrivial cyclically reduced word")
    u, k = _primitive_root(w.letters)
    return ReducedWord(w.d, u), k


def _least_rotation(letters: tuple[int, ...]) -> tuple[int, ...]:
    rotations = (letters[i:] + letters[:i] for i in range(len(letters)))
    return min(rotations, key=lambda r: [letter_key(x) for x in r])


def conjugacy_key(w: ReducedWord) -> ReducedWord:
    """Least rotation of a cyclically reduced word under a < A < b < B < ..."""
    if not _is_cyclically_reduced(w.letters):
        raise ValueError(f"{w} is not a nontrivial cyclically reduced word")
    return ReducedWord(w.d, _least_rotation(w.letters))


def all_words(d: int, n: int) -> list[tuple[int, ...]]:
    """All reduced letter tuples of length exactly n, in length-lexicographic order."""
    letters = sorted([i for i in range(1, d + 1)] + [-i for i in range(1, d + 1)], key=letter_key)
    level: list[tuple[int, ...]] = [()]
    for _ in range(n):
        level = [w + (x,) for w in level for x in letters if not (w and w[-1] == -x)]
    return level
