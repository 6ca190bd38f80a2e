"""Shared helpers and independent brute-force oracles.

The oracles work on plain strings ("aBc") so they share no code with the
package's integer-letter internals.
"""
import functools
import random
import string

import pytest
from hypothesis import settings
from hypothesis import strategies as st

from freeboundary.boundary import BoundaryPoint
from freeboundary.words import ReducedWord

# exact computations have no meaningful per-example time limit
settings.register_profile("exact", deadline=None)
settings.load_profile("exact")


def W(text, d=2):
    return ReducedWord.parse(text, d)


def P(text, d=2):
    return BoundaryPoint.parse(text, d)


def alphabet(d):
    low = string.ascii_lowercase[:d]
    return low + low.upper()


def string_reduce(s):
    """Free reduction by repeatedly deleting adjacent 'xX' / 'Xx' pairs."""
    s = "" if s == "1" else s
    changed = True
    while changed:
        changed = False
        for i in range(len(s) - 1):
            if s[i] != s[i + 1] and s[i].lower() == s[i + 1].lower():
                s = s[:i] + s[i + 2:]
                changed = True
                break
    return s


def string_inverse(s):
    return "".join(c.swapcase() for c in reversed(s))


def reduced_strings(d, n):
    """All reduced strings of length n, by filtering all strings."""
    out = [""]
    for _ in range(n):
        out = [w + c for w in out for c in alphabet(d)]
    return [w for w in out if string_reduce(w) == w]


def expand(x, n):
    """First n letters of a point, read as a string from its text form."""
    u, v = str(x).split("|")
    u = "" if u == "1" else u
    while len(u) < n:
        u += v
    return u[:n]


def point_from_strings(u, v, d, n=60):
    """First n letters of the infinite reduced word u v v v ..., by brute reduction."""
    reps = n // len(v) + len(u) + 4
    return string_reduce(u + v * reps)[:n]


def random_reduced(rng, d, n):
    letters = alphabet(d)
    s = ""
    while len(s) < n:
        c = rng.choice(letters)
        if s and c != s[-1] and c.lower() == s[-1].lower():
            continue
        s += c
    return s


def random_point(rng, d, max_u=4, max_v=4):
    """A random eventually periodic point given as reduced (u, v) strings."""
    while True:
        u = random_reduced(rng, d, rng.randint(0, max_u))
        v = random_reduced(rng, d, rng.randint(1, max_v))
        body = u + v + v
        if string_reduce(body) == body:
            return P(f"{u or '1'}|{v}", d)


def words_st(d, max_len=6, min_len=0):
    def build(chars):
        s = ""
        for c in chars:
            if s and c != s[-1] and c.lower() == s[-1].lower():
                continue
            s += c
        return s
    return st.lists(st.sampled_from(alphabet(d)), min_size=min_len, max_size=max_len).map(build).filter(
        lambda s: len(s) >= min_len).map(lambda s: ReducedWord.parse(s or "1", d))


def points_st(d, max_u=4, max_v=4):
    return st.integers(0, 2 ** 32 - 1).map(lambda seed: random_point(random.Random(seed), d, max_u, max_v))


@pytest.fixture
def rng():
    return random.Random(20240917)


@functools.lru_cache(maxsize=None)
def _enumerated_heads(words, d, n, max_g):
    gs = [s for k in range(max_g + 1) for s in reduced_strings(d, k)]
    return frozenset(_glued_pair(g, w, n) for w in words for g in gs)


def _glued_pair(g, w, n):
    plus = string_reduce(g + w * (n + len(g) + 2))[:n]
    minus = string_reduce(g + string_inverse(w) * (n + len(g) + 2))[:n]
    return plus, minus


def glued_heads(words, d, n, max_g, sample_g=None, rng=None, samples=0):
    """Pairs of length-n heads of g w^{+inf}, g w^{-inf} for w in words (strings).

    Every g with |g| <= max_g is enumerated; optionally ``samples`` random g
    with max_g < |g| <= sample_g are added.
    """
    pairs = set(_enumerated_heads(tuple(words), d, n, max_g))
    if samples and rng is not None:
        for _ in range(samples):
            g = random_reduced(rng, d, rng.randint(max_g + 1, sample_g))
            pairs.update(_glued_pair(g, w, n) for w in words)
    return pairs


def brute_invariant(f, words, max_g=None, rng=None, samples=0):
    """R_W-invariance of a LevelFunction by checking enumerated glued pairs."""
    n = f.level
    max_g = n + 3 if max_g is None else max_g
    return all(f[x] == f[y] for x, y in glued_heads(words, f.d, n, max_g, n + 6, rng, samples))


def smith_problems(A, snf):
    """List of violated Smith-form postconditions (empty when all hold)."""
    from freeboundary.linalg import determinant

    problems = []
    U, D, V = snf.U, snf.D, snf.V
    if U @ A @ V != D:
        problems.append("UAV != D")
    if abs(determinant(U)) != 1:
        problems.append("U not unimodular")
    if abs(determinant(V)) != 1:
        problems.append("V not unimodular")
    f = snf.invariant_factors
    if any(x < 0 for x in f):
        problems.append("negative factor")
    for a, b in zip(f, f[1:]):
        if (a == 0 and b != 0) or (a != 0 and b % a):
            problems.append("divisibility chain broken")
            break
    K = snf.kernel_basis()
    if any(any(A @ k) for k in K):
        problems.append("kernel vector not annihilated")
    if len(K) != A.ncols - snf.rank:
        problems.append("kernel rank mismatch")
    return problems


def random_matrix(rng, max_dim=8, max_entry=50):
    from freeboundary.linalg import IntMatrix

    m, n = rng.randint(1, max_dim), rng.randint(1, max_dim)
    density = rng.random()
    rows = [[rng.randint(-max_entry, max_entry) if rng.random() < density else 0 for _ in range(n)]
            for _ in range(m)]
    return IntMatrix(rows, ncols=n)
