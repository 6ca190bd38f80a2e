"""K-theory of the crossed products C(dF_d / R_W) x F_d.

The Pimsner-Voiculescu sequence reduces everything to the additive map

    eta((f_s)_{s in S}) = sum_s (f_s - s.f_s)

on integer cylinder functions, and to its restriction tau to R_W-invariant
functions.  K_0 is the cokernel of tau and K_1 its kernel.  Both are
computed level by level.  The invariant level-N functions modulo tau of
invariant level-(N-1) tuples keep spurious generators at every finite
level (cylinders whose reduction needs relations from deeper levels), so
the reported group is the subgroup generated there by low-level classes,
which does settle down.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Sequence

from .clopen import (
    LevelFunction,
    constant,
    cylinder_count,
    cylinder_p,
    cylinder_q,
    invariant_components,
    translate,
    translation_map,
)
from .linalg import (
    AbelianPresentation,
    IntMatrix,
    SmithForm,
    smith_normal_form,
    solve,
)
from .quotient import RelationSpec
from .words import Letter, ReducedWord, word_text

__all__ = [
    "InvarianceError",
    "SmithCache",
    "KGroups",
    "eta_matrix",
    "eta_apply",
    "eta_smith",
    "tau_matrix",
    "invariant_coords",
    "split_tuple",
    "flatten_tuple",
    "membership_in_image",
    "explicit_preimage",
    "sigma_residue",
    "verify_recurrence",
    "refinement_matrix",
    "pv_k_groups",
]


class InvarianceError(RuntimeError):
    """eta of an invariant tuple was not invariant; always an implementation bug."""


class SmithCache:
    """On-disk cache of Smith decompositions keyed by role and matrix content."""

    def __init__(self, directory):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self.hits = 0
        self.misses = 0

    def key(self, role: str, d: int, relation: str, level: int, matrix: IntMatrix) -> str:
        payload = json.dumps([d, relation, level, role, list(matrix.shape), matrix.tolist()],
                             separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()

    def smith(self, matrix: IntMatrix, *, role: str, d: int, relation: str, level: int) -> SmithForm:
        path = self.directory / f"{self.key(role, d, relation, level, matrix)}.json"
        if path.exists():
            self.hits += 1
            return SmithForm.from_dict(json.loads(path.read_text()))
        self.misses += 1
        snf = smith_normal_form(matrix)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(snf.to_dict(), separators=(",", ":")))
        tmp.replace(path)
        return snf


def _gen(d: int, s: int) -> ReducedWord:
    return ReducedWord(d, (s,))


@lru_cache(maxsize=32)
def eta_matrix(d: int, n: int) -> IntMatrix:
    """Matrix of eta from (level-n functions)^d to level-(n+1) functions.

    Column ``(s - 1) * N_n + i`` is the tuple with p[w_i] in slot s.
    """
    if d < 2 or n < 1:
        raise ValueError("eta needs d >= 2 and n >= 1")
    N, M, b = cylinder_count(d, n), cylinder_count(d, n + 1), 2 * d - 1
    rows = [[0] * (d * N) for _ in range(M)]
    for s in range(1, d + 1):
        # (s.f)(z) = f(s^-1 z), read through the translation index map
        tmap = translation_map(d, (s,), n)
        off = (s - 1) * N
        for z in range(M):
            rows[z][off + z // b] += 1
            rows[z][off + tmap[z]] -= 1
    return IntMatrix(rows, ncols=d * N)


@lru_cache(maxsize=32)
def eta_smith(d: int, n: int) -> SmithForm:
    return smith_normal_form(eta_matrix(d, n))


def eta_apply(fs: Sequence[LevelFunction]) -> LevelFunction:
    """sum_s (f_s - s.f_s), straight from the definition."""
    d = fs[0].d
    if len(fs) != d:
        raise ValueError(f"eta takes one function per generator ({d}), got {len(fs)}")
    out = constant(d, 0)
    for s, f in enumerate(fs, start=1):
        out = out + f - translate(_gen(d, s), f)
    return out.minimized()


def split_tuple(vec: Sequence[int], d: int, n: int) -> list[LevelFunction]:
    N = cylinder_count(d, n)
    if len(vec) != d * N:
        raise ValueError(f"expected {d * N} entries, got {len(vec)}")
    return [LevelFunction(d, n, vec[i * N:(i + 1) * N]) for i in range(d)]


def flatten_tuple(fs: Sequence[LevelFunction], n: int) -> list[int]:
    out: list[int] = []
    for f in fs:
        out.extend(f.refine(n).coeffs)
    return out


def _component_ids(d: int, n: int, spec: RelationSpec) -> tuple[list[int], tuple[tuple[int, ...], ...]]:
    comps = invariant_components(d, n, spec)
    ids = [0] * cylinder_count(d, n)
    for k, comp in enumerate(comps):
        for i in comp:
            ids[i] = k
    return ids, comps


def invariant_coords(f: LevelFunction, level: int, spec: RelationSpec) -> list[int]:
    """Coordinates of an invariant function in the level's component basis."""
    coeffs = f.refine(level).coeffs
    out = []
    for comp in invariant_components(spec.d, level, spec):
        v = coeffs[comp[0]]
        if any(coeffs[i] != v for i in comp):
            raise ValueError(f"function is not R_W-invariant at level {level}")
        out.append(v)
    return out


@lru_cache(maxsize=64)
def tau_matrix(d: int, n: int, spec: RelationSpec) -> IntMatrix:
    """eta restricted to invariant tuples, in component coordinates.

    Domain: d copies of the invariant level-n lattice (slot-major).
    Codomain: the invariant level-(n+1) lattice.
    """
    if spec.d != d:
        raise ValueError(f"relation lives in F_{spec.d}, not F_{d}")
    src_ids, src = _component_ids(d, n, spec)
    _, dst = _component_ids(d, n + 1, spec)
    b = 2 * d - 1
    r = len(src)
    columns = []
    for s in range(1, d + 1):
        tmap = translation_map(d, (s,), n)
        cols = [dict() for _ in range(r)]
        for z in range(cylinder_count(d, n + 1)):
            a, c = src_ids[z // b], src_ids[tmap[z]]
            if a != c:
                cols[a][z] = cols[a].get(z, 0) + 1
                cols[c][z] = cols[c].get(z, 0) - 1
        for k, col in enumerate(cols):
            vec = []
            for comp in dst:
                v = col.get(comp[0], 0)
                if any(col.get(i, 0) != v for i in comp):
                    raise InvarianceError(
                        f"eta of invariant basis tuple (slot {word_text((s,))}, component {k}) "
                        f"at level {n} is not invariant at level {n + 1}")
                vec.append(v)
            columns.append(vec)
    return IntMatrix.from_columns(columns, len(dst))


def refinement_matrix(d: int, n: int, spec: RelationSpec) -> IntMatrix:
    """Inclusion of invariant level-n functions into invariant level-(n+1) functions."""
    _, src = _component_ids(d, n, spec)
    dst_ids, dst = _component_ids(d, n + 1, spec)
    b = 2 * d - 1
    rows = [[0] * len(src) for _ in dst]
    for k, comp in enumerate(src):
        for i in comp:
            for j in range(b):
                rows[dst_ids[i * b + j]][k] = 1
    return IntMatrix(rows, ncols=len(src))


def _level_of_rows(d: int, nrows: int) -> int:
    n = 1
    while cylinder_count(d, n) < nrows:
        n += 1
    if cylinder_count(d, n) != nrows:
        raise ValueError(f"{nrows} rows is not a cylinder count for F_{d}")
    return n


def membership_in_image(f, A: IntMatrix, snf: SmithForm | None = None) -> tuple[bool, list[int] | None]:
    """Exact test of f in the column lattice of A, with a preimage when it is.

    f may be a coefficient vector in A's row indexing or a LevelFunction,
    which is refined to the level whose cylinder count is A's row count.
    """
    if isinstance(f, LevelFunction):
        level = _level_of_rows(f.d, A.nrows)
        if f.level > level:
            raise ValueError(f"function of level {f.level} does not fit {A.nrows} rows")
        vec = list(f.refine(level).coeffs)
    else:
        vec = list(f)
    if len(vec) != A.nrows:
        raise ValueError(f"vector of length {len(vec)} does not match {A.nrows} rows")
    x = solve(A, vec, snf)
    return x is not None, x


def explicit_preimage(coeffs: Sequence[int]) -> list[LevelFunction]:
    """The tuple g_s = (n(s) - m) p[s^-1] with eta(g) = sum_s n(s) q[s].

    Requires sum n(s) = (d - 1) m.
    """
    d = len(coeffs)
    total = sum(coeffs)
    if total % (d - 1):
        raise ValueError(f"sum of coefficients {total} is not divisible by d - 1 = {d - 1}")
    m = total // (d - 1)
    return [(c - m) * cylinder_p(ReducedWord(d, (-s,))) for s, c in enumerate(coeffs, start=1)]


def q_combination(coeffs: Sequence[int]) -> LevelFunction:
    d = len(coeffs)
    out = constant(d, 0)
    for s, c in enumerate(coeffs, start=1):
        out = out + c * cylinder_q(_gen(d, s))
    return out


def sigma_residue(f: LevelFunction) -> int:
    """Total coefficient sum mod (d - 1); independent of the level since 2d - 1 = 1 mod (d - 1)."""
    if f.d == 2:
        return 0
    return f.total() % (f.d - 1)


def verify_recurrence(d: int, s, k: int) -> bool:
    """Check q[s^2] = s q[s] + s^-1 q[s] + q[s] - 2 (k = 2) or
    q[s^k] = s q[s^(k-1)] + s^-1 q[s^(k-1)] - q[s^(k-2)] (k > 2)
    as exact equalities of functions."""
    if k < 2:
        raise ValueError("the recurrences start at k = 2")
    if isinstance(s, Letter):
        s = int(s)
    g = s if isinstance(s, ReducedWord) else ReducedWord(d, (s,))
    if len(g) != 1:
        raise ValueError("s must be a single letter")
    q = lambda j: cylinder_q(g ** j)  # noqa: E731
    ginv = g.inverse()
    shifted = translate(g, q(k - 1)) + translate(ginv, q(k - 1))
    rhs = shifted + q(1) - 2 if k == 2 else shifted - q(k - 2)
    return q(k) == rhs


def _marks(d: int, spec: RelationSpec) -> dict[str, LevelFunction]:
    marks = {"unit": constant(d, 1)}
    gens = _generator_set(spec)
    for s in range(1, d + 1):
        marks[f"q[{word_text((s,))}]"] = cylinder_q(_gen(d, s))
    if gens is None or len(gens) < d:
        for s in range(1, d + 1):
            if gens is not None and s in gens:
                continue
            marks[f"p[{word_text((s,))}]"] = cylinder_p(_gen(d, s))
    return marks


def _generator_set(spec: RelationSpec) -> set[int] | None:
    """The generators glued by a relation made of single letters, else None."""
    if any(len(w) != 1 for w in spec.words):
        return None
    return {abs(w.letters[0]) for w in spec.words}


def marked_basis(d: int, spec: RelationSpec) -> list[str] | None:
    """Names of the classes expected to form a basis of K_0.

    All q[s] when every generator is glued; for a nonempty proper set F of
    glued generators, the unit, p[s] for s outside F and q[t] for t in F
    except its last generator.
    """
    gens = _generator_set(spec)
    if not gens:
        return None
    name = lambda kind, s: f"{kind}[{word_text((s,))}]"  # noqa: E731
    if len(gens) == d:
        return [name("q", s) for s in range(1, d + 1)]
    last = max(gens)
    return (["unit"]
            + [name("p", s) for s in range(1, d + 1) if s not in gens]
            + [name("q", t) for t in sorted(gens) if t != last])


@dataclass
class LevelData:
    """Everything computed at level M.

    ``ambient`` is the invariant level-M lattice modulo tau of the invariant
    level-(M-1) tuples.  ``image`` is the subgroup of ``ambient`` generated by
    the base-level classes, presented on the base-level component basis.
    """
    level: int
    ambient: AbelianPresentation
    tau: IntMatrix
    image: AbelianPresentation
    iso_from_previous: bool | None = None
    generates: bool | None = None

    @property
    def presentation(self) -> AbelianPresentation:
        return self.image


@dataclass
class KGroups:
    d: int
    relation: RelationSpec
    K0: AbelianPresentation
    K1_rank: int
    K1_basis: list[list[int]]
    stabilized: bool
    level_used: int
    basis: list[str] | None
    levels: list[LevelData] = field(default_factory=list, repr=False)

    def coordinates(self, name: str) -> tuple[int, ...]:
        """Marked class in the marked basis when there is one, else in normal-form coordinates."""
        vec = self.K0.marked_vectors[name]
        if self.basis is not None:
            basis_vecs = [self.K0.marked_vectors[b] for b in self.basis]
            coords = self.K0.in_basis(vec, basis_vecs)
            if coords is not None:
                return coords
        return self.K0.marked[name]

    @property
    def basis_valid(self) -> bool:
        if self.basis is None:
            return False
        return self.K0.is_basis([self.K0.marked_vectors[b] for b in self.basis])

    def unit_order(self) -> int | None:
        return self.K0.order(self.K0.marked_vectors["unit"])

    def report(self) -> dict:
        names = [n for n in self.K0.marked if n != "unit"]
        return {
            "d": self.d,
            "relation": [str(w) for w in self.relation.words] if self.relation.words else "none",
            "level_used": self.level_used,
            "stabilized": self.stabilized,
            "K0": {"free_rank": self.K0.free_rank, "torsion": list(self.K0.torsion_factors)},
            "unit": list(self.coordinates("unit")),
            "marked": {n: list(self.coordinates(n)) for n in names},
            "K1": {"free_rank": self.K1_rank},
            "basis": self.basis if self.basis_valid else "normal_form",
            "unit_order": self.unit_order(),
        }


def pv_k_groups(d: int, W: RelationSpec | None = None, max_level: int = 4,
                cache: SmithCache | None = None, base_level: int = 1) -> KGroups:
    """K_0 (with marked classes) and K_1 of C(dF_d / R_W) x F_d.

    For each level M = base_level + 1 .. max_level the cokernel of tau into
    level M is formed, and inside it the subgroup generated by the invariant
    base-level classes.  Refinement induces surjections between consecutive
    subgroups; such a map is an isomorphism exactly when no new relation
    among the base-level classes appears.  A level counts as stable when that
    holds and, in addition, every invariant class one level above the base
    already lies in the subgroup.  ``stabilized`` means the last two levels
    were stable; the computation stops there.
    """
    if d < 2:
        raise ValueError("rank must be at least 2")
    if base_level < 1:
        raise ValueError("base_level must be at least 1")
    if max_level < base_level + 1:
        raise ValueError(f"max_level must be at least {base_level + 1}")
    spec = W if W is not None else RelationSpec(d, ())
    if spec.d != d:
        raise ValueError(f"relation lives in F_{spec.d}, not F_{d}")
    marks = {}
    for name, f in _marks(d, spec).items():
        try:
            marks[name] = invariant_coords(f, base_level, spec)
        except ValueError:
            continue
    base = _indicators(d, base_level, spec)
    above = _indicators(d, base_level + 1, spec)
    levels: list[LevelData] = []
    stabilized = False
    for M in range(base_level + 1, max_level + 1):
        T = tau_matrix(d, M - 1, spec)
        if cache is not None:
            snf = cache.smith(T, role="tau", d=d, relation=str(spec), level=M)
        else:
            snf = smith_normal_form(T)
        ambient = AbelianPresentation(T, snf=snf)
        B = _image_matrix(ambient, [invariant_coords(f, M, spec) for f in base])
        B_snf = smith_normal_form(B)
        r = len(base)
        kernel = [v[:r] for v in B_snf.kernel_basis()]
        rel = IntMatrix.from_columns(kernel, r) if kernel else IntMatrix.zeros(r, 0)
        image = AbelianPresentation(rel, marked=marks)
        data = LevelData(M, ambient, T, image)
        if levels:
            prev = levels[-1].image
            data.iso_from_previous = all(prev.is_zero(col) for col in rel.columns())
            data.generates = all(
                solve(B, ambient.coords(invariant_coords(f, M, spec)), B_snf) is not None
                for f in above) if B.nrows else True
        levels.append(data)
        flags = [lv.iso_from_previous and lv.generates for lv in levels[1:]]
        if len(flags) >= 2 and flags[-1] and flags[-2]:
            stabilized = True
            break
    top = levels[-1]
    k1 = top.ambient.snf.kernel_basis()
    return KGroups(d, spec, top.image, len(k1), k1, stabilized, top.level,
                   marked_basis(d, spec), levels)


def _indicators(d: int, n: int, spec: RelationSpec) -> list[LevelFunction]:
    out = []
    for comp in invariant_components(d, n, spec):
        coeffs = [0] * cylinder_count(d, n)
        for i in comp:
            coeffs[i] = 1
        out.append(LevelFunction(d, n, coeffs))
    return out


def _image_matrix(ambient: AbelianPresentation, vectors: list[list[int]]) -> IntMatrix:
    """[C | 0 ; C_tors | diag(torsion)]: its kernel, cut to the first block,
    is the lattice of relations among the given classes."""
    coords = [ambient.coords(v) for v in vectors]
    f, tors = ambient.free_rank, ambient.torsion_factors
    rows = []
    for i in range(f + len(tors)):
        row = [c[i] for c in coords] + [0] * len(tors)
        if i >= f:
            row[len(vectors) + i - f] = tors[i - f]
        rows.append(row)
    return IntMatrix(rows, ncols=len(vectors) + len(tors))
