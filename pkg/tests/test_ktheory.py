import itertools

import pytest

from conftest import P, W
from freeboundary.clopen import (
    LevelFunction,
    constant,
    cylinder_count,
    cylinder_p,
    cylinder_q,
    evaluate,
    invariant_basis,
    refine,
    translate,
)
from freeboundary.ktheory import (
    SmithCache,
    eta_apply,
    eta_matrix,
    eta_smith,
    flatten_tuple,
    invariant_coords,
    marked_basis,
    membership_in_image,
    explicit_preimage,
    pv_k_groups,
    q_combination,
    sigma_residue,
    split_tuple,
    tau_matrix,
    verify_recurrence,
)
from freeboundary.linalg import kernel_lattice
from freeboundary.quotient import RelationSpec


def S(d):
    return RelationSpec.generators(d)


def test_eta_matrix_shape_and_constants():
    assert eta_matrix(2, 1).shape == (12, 8)
    zero = constant(2, 0)
    assert eta_apply([constant(2, 1), zero]) == 0
    ones = [1] * 4 + [0] * 4
    assert not any(eta_matrix(2, 1) @ ones)


@pytest.mark.parametrize("d,n", [(2, 1), (2, 2), (3, 1)])
def test_eta_matrix_columns_match_direct_formula(d, n):
    A = eta_matrix(d, n)
    N = cylinder_count(d, n)
    for j in range(d * N):
        vec = [0] * (d * N)
        vec[j] = 1
        direct = eta_apply(split_tuple(vec, d, n))
        assert LevelFunction(d, n + 1, A.column(j)) == direct


@pytest.mark.parametrize("d", [2, 3])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_kernel_of_eta_is_constant_tuples(d, n):
    K = kernel_lattice(eta_matrix(d, n), eta_smith(d, n))
    assert K.ncols == d
    N = cylinder_count(d, n)
    for col in K.columns():
        for f in split_tuple(list(col), d, n):
            assert len(set(f.coeffs)) == 1
    # the constant tuples are a basis: the slot values form a unimodular matrix
    from freeboundary.linalg import IntMatrix, determinant
    slots = IntMatrix([[col[s * N] for col in K.columns()] for s in range(d)])
    assert abs(determinant(slots)) == 1


def test_explicit_preimage_identity():
    for d in (2, 3, 4):
        for coeffs in itertools.product(range(-2, 3), repeat=d):
            if d > 2 and sum(coeffs) % (d - 1):
                with pytest.raises(ValueError):
                    explicit_preimage(coeffs)
                continue
            assert eta_apply(explicit_preimage(coeffs)) == q_combination(coeffs)


def test_tau_examples():
    T = tau_matrix(2, 1, S(2))
    assert T.ncols == 4
    # tau of (q[a], 0) is q[a] - a.q[a] read in level-2 invariant coordinates
    qa = cylinder_q(W("a"))
    expected = invariant_coords(qa - translate(W("a"), qa), 2, S(2))
    assert list(T @ [1, 0, 0, 0]) == expected
    assert not any(T @ [1, 1, 1, 1])


@pytest.mark.parametrize("rel", ["a", "a,b", "ab", "none"])
def test_tau_agrees_with_eta_on_invariant_tuples(rel):
    d = 2
    spec = RelationSpec.parse(rel, d)
    basis = invariant_basis(d, 2, spec)
    T = tau_matrix(d, 2, spec)
    r = len(basis)
    for s in range(d):
        for k, f in enumerate(basis):
            fs = [constant(d, 0)] * d
            fs[s] = f
            vec = [0] * (d * r)
            vec[s * r + k] = 1
            assert list(T @ vec) == invariant_coords(eta_apply(fs), 3, spec)


def test_verify_recurrence_examples():
    assert verify_recurrence(2, 1, 2)
    assert verify_recurrence(2, 1, 3)
    q = lambda k: cylinder_q(W("a") ** k)  # noqa: E731
    lhs = q(2)
    terms = [translate(W("a"), q(1)), translate(W("A"), q(1)), q(1)]
    at = P("1|a")
    assert evaluate(lhs, at) == 1
    assert [evaluate(t, at) for t in terms] == [1, 1, 1]
    at = P("1|b")
    assert evaluate(lhs, at) == 0
    assert [evaluate(t, at) for t in terms] == [1, 1, 0]


def test_verify_recurrence_rejects_bad_k():
    with pytest.raises(ValueError):
        verify_recurrence(2, 1, 1)


def test_membership_examples():
    qa = cylinder_q(W("a", 3))
    for n in (1, 2):
        assert not membership_in_image(qa, eta_matrix(3, n))[0]
    r = cylinder_q(W("a", 3)) + cylinder_q(W("b", 3))
    member, x = membership_in_image(r, eta_matrix(3, 1))
    assert member
    assert eta_apply(split_tuple(x, 3, 1)) == r
    g = explicit_preimage([1, 1, 0])
    assert g[2] == -cylinder_p(W("C", 3))
    assert list(eta_matrix(3, 1) @ flatten_tuple(g, 1)) == list(refine(r, 2).coeffs)
    member, x = membership_in_image(constant(3, 0), eta_matrix(3, 1))
    assert member and not any(x)
    with pytest.raises(ValueError):
        membership_in_image([1, 2, 3], eta_matrix(3, 1))


def test_sigma_examples():
    assert sigma_residue(cylinder_q(W("a", 3))) == 0
    assert sigma_residue(cylinder_p(W("a", 3))) == 1
    f = 2 * cylinder_p(W("ab", 3)) - cylinder_p(W("c", 3))
    assert all(sigma_residue(refine(f, m)) == sigma_residue(f) for m in (2, 3, 4))
    for col in eta_matrix(3, 1).columns():
        assert sigma_residue(LevelFunction(3, 2, col)) == 0


def test_membership_consistent_with_sigma_exhaustive():
    A = eta_matrix(3, 1)
    snf = eta_smith(3, 1)
    for coeffs in itertools.product(range(-2, 3), repeat=6):
        f = LevelFunction(3, 1, coeffs)
        member, _ = membership_in_image(f, A, snf)
        if member:
            assert sigma_residue(f) == 0


def test_pv_all_generators():
    K = pv_k_groups(2, S(2), 4)
    rep = K.report()
    assert rep["stabilized"] and rep["level_used"] <= 4
    assert rep["K0"] == {"free_rank": 2, "torsion": []}
    assert rep["unit"] == [1, 1]
    assert rep["K1"] == {"free_rank": 2}
    assert marked_basis(2, S(2)) == ["q[a]", "q[b]"]
    assert K.basis_valid


def test_pv_single_generator():
    K = pv_k_groups(2, RelationSpec.parse("a", 2), 4)
    rep = K.report()
    assert rep["K0"] == {"free_rank": 2, "torsion": []}
    assert rep["unit"] == [1, 0]
    assert K.basis == ["unit", "p[b]"]


def test_pv_full_boundary_unit_has_finite_order():
    K = pv_k_groups(3, RelationSpec(3, ()), 4)
    assert K.stabilized
    assert K.unit_order() == 2
    assert K.report()["K0"] == {"free_rank": 3, "torsion": [2]}


def test_pv_unit_relation_d3():
    for rel in ("a", "b", "c", "a,b", "a,c", "b,c"):
        spec = RelationSpec.parse(rel, 3)
        K = pv_k_groups(3, spec, 4)
        G = K.K0
        k = 3 - len(spec) - 1
        vec = [k * x for x in G.marked_vectors["unit"]]
        for w in spec.words:
            vec = [a + b for a, b in zip(vec, G.marked_vectors[f"q[{w}]"])]
        assert G.is_zero(vec)


def test_pv_preconditions():
    with pytest.raises(ValueError):
        pv_k_groups(2, S(2), 1)
    with pytest.raises(ValueError):
        pv_k_groups(1, None, 3)


def test_pv_unstable_when_levels_too_few():
    K = pv_k_groups(2, S(2), 2)
    assert not K.stabilized and K.level_used == 2


def test_pv_records_level_history():
    K = pv_k_groups(2, RelationSpec.parse("ab", 2), 4)
    assert [lv.level for lv in K.levels] == [2, 3, 4]
    assert all(lv.iso_from_previous and lv.generates for lv in K.levels[1:])


def test_smith_cache_round_trip(tmp_path):
    cache = SmithCache(tmp_path)
    first = pv_k_groups(2, RelationSpec.parse("a", 2), 4, cache=cache).report()
    assert cache.misses == 3 and cache.hits == 0
    again = SmithCache(tmp_path)
    second = pv_k_groups(2, RelationSpec.parse("a", 2), 4, cache=again).report()
    assert again.hits == 3 and again.misses == 0
    assert first == second


def test_refinement_matrix_matches_invariant_coords():
    from freeboundary.ktheory import refinement_matrix

    for rel in ("a", "a,b", "ab"):
        spec = RelationSpec.parse(rel, 2)
        R = refinement_matrix(2, 2, spec)
        for k, f in enumerate(invariant_basis(2, 2, spec)):
            assert list(R.column(k)) == invariant_coords(f, 3, spec)
