import math
import random

import pytest

from conftest import assert_sound
from rsrepair.fields import FieldError, make_tower
from rsrepair.linalg import enumerate_subspaces, intersect_dim, scale, span
from rsrepair.repair import SideInfo, bandwidth
from rsrepair.rs import encode, eval_poly, make_code
from rsrepair.schemes import (
    DimensionProfile,
    build_greedy_W,
    build_greedy_scheme,
    build_scheme,
    build_subfield_scheme,
    greedy_condition_holds,
    intersection_bandwidth,
    majorization_compare,
    optimize_exhaustive,
    subfield_subspace,
    subspace_poly,
)


def side_of(tower, codes):
    return SideInfo(tuple(tower.element(c) for c in codes))


def test_subspace_poly_classics(t16):
    zero = span(t16, [])
    assert [c.code for c in subspace_poly(zero)] == [0, 1]  # L_0 = x
    fq = subfield_subspace(t16, 1)
    assert [c.code for c in subspace_poly(fq)] == [0, 1, 1]  # x^q - x in char 2


def test_subspace_poly_linearized(t81):
    rng = random.Random(31)
    w_space = span(t81, [t81.element(5), t81.element(17)])
    lw = subspace_poly(w_space)
    for _ in range(30):
        u = t81.element(rng.randrange(81))
        v = t81.element(rng.randrange(81))
        assert eval_poly(lw, u + v) == eval_poly(lw, u) + eval_poly(lw, v)
        c = t81.element(rng.randrange(1, 3))  # scalar from F_3
        assert eval_poly(lw, c * u) == c * eval_poly(lw, u)
    # kernel is exactly W
    roots = {u.code for u in t81.elements() if eval_poly(lw, u).code == 0}
    assert roots == {e.code for e in w_space.elements()}


def test_build_scheme_naive_w_zero(code16, t16):
    # W = {0} gives the constant-check scheme: bandwidth (n-1)(ell-s).
    side = side_of(t16, [1, 2])
    zero = span(t16, [])
    built = build_scheme(code16, 0, side, zero, subfield_subspace(t16, 2))
    assert built.measured_bw == built.predicted_bw == 15 * 2
    assert_sound(built)


def test_build_scheme_rescales_delta(code16, t16):
    # S and T' both the F_4 image: delta = 1 cannot complete the basis.
    f4 = subfield_subspace(t16, 2)
    side = SideInfo(tuple(f4.basis))
    built = build_scheme(code16, 0, side, span(t16, []), f4)
    assert built.delta.code not in {e.code for e in t16.subfield_elements(2)}
    assert built.measured_bw == built.predicted_bw == bandwidth(built.scheme).total


def test_build_scheme_degree_guard(code16, t16):
    w_big = span(t16, [t16.element(1), t16.element(2), t16.element(4)])
    with pytest.raises(FieldError, match="degree infeasible"):
        build_scheme(code16, 0, side_of(t16, [1, 2]), w_big, subfield_subspace(t16, 2))


def test_build_scheme_dimension_guard(code16, t16):
    with pytest.raises(FieldError, match="dimension"):
        build_scheme(
            code16, 0, side_of(t16, [1]), span(t16, []), subfield_subspace(t16, 2)
        )


def test_scheme_repairs_correctly(code16, t16):
    rng = random.Random(33)
    from rsrepair.repair import answers_from_symbols, execute_repair, query_plan

    side = side_of(t16, [1, 2])
    built = build_greedy_scheme(code16, 4, side, 2)
    plan = query_plan(built.scheme)
    for _ in range(10):
        msg = [t16.element(rng.randrange(16)) for _ in range(12)]
        cw = encode(code16, msg)
        erased = cw.symbols[4]
        values = [(b * erased).trace() for b in side.elements]
        answers = answers_from_symbols(
            plan, {j: cw.symbols[j] for j in built.scheme.helper_indices()}
        )
        assert execute_repair(built.scheme, answers, values, plan=plan) == erased


@pytest.mark.parametrize(
    "tower_params,k,trials",
    [((2, 1, 4), 12, 20), ((3, 1, 4), 72, 20)],
)
def test_intersection_formula_matches_measured(tower_params, k, trials):
    tower = make_tower(*tower_params)
    spec = make_code(tower, tower.order, k)
    rng = random.Random(34)
    max_m = max(d for d in range(tower.ell + 1) if tower.q**d <= spec.r)
    for _ in range(trials):
        s = rng.randrange(tower.ell)
        side_elems = []
        while len(side_elems) < s:
            cand = tower.element(rng.randrange(1, tower.order))
            probe = span(tower, side_elems + [cand])
            if probe.dim == len(side_elems) + 1:
                side_elems.append(cand)
        side = SideInfo(tuple(side_elems))
        w_dim = rng.randrange(max_m + 1)
        w_space = span(
            tower, [tower.element(rng.randrange(1, tower.order)) for _ in range(w_dim)]
        )
        while True:
            t_prime = span(
                tower,
                [
                    tower.element(rng.randrange(1, tower.order))
                    for _ in range(tower.ell - s)
                ],
            )
            if t_prime.dim == tower.ell - s:
                break
        star = rng.randrange(spec.n)
        built = build_scheme(spec, star, side, w_space, t_prime)
        formula = intersection_bandwidth(
            spec, star, s, span(tower, list(built.t_basis)), w_space
        )
        assert formula == built.measured_bw
        assert_sound(built)


def test_optimizer_full_instance(code16, t16):
    side = side_of(t16, [1, 2])
    res = optimize_exhaustive(code16, 0, side, 2)
    assert res.t_count == 16 and res.w_count == 35
    assert res.intersection_sum == 9
    assert res.bandwidth == 21
    built = build_scheme(code16, 0, side, res.w_space, res.t_space, "exhaustive")
    assert built.measured_bw == 21
    assert_sound(built)


def test_optimizer_coset_mode_agrees(code16, t16):
    side = side_of(t16, [1, 2])
    full = optimize_exhaustive(code16, 0, side, 2)
    coset = optimize_exhaustive(code16, 0, side, 2, coset_targets=True)
    assert coset.bandwidth == full.bandwidth == 21


def test_optimizer_m_zero(code16, t16):
    side = side_of(t16, [1, 2])
    res = optimize_exhaustive(code16, 0, side, 0)
    assert res.w_count == 1 and res.bandwidth == 15 * 2


def test_optimizer_deterministic_across_workers(code16, t16):
    side = side_of(t16, [1, 2])
    results = [
        optimize_exhaustive(code16, 0, side, 2, workers=w) for w in (1, 2, 4)
    ]
    first = results[0]
    for res in results[1:]:
        assert res.t_space == first.t_space
        assert res.w_space == first.w_space
        assert res.bandwidth == first.bandwidth


def test_subfield_scheme_instances():
    t64 = make_tower(2, 1, 6)
    spec64 = make_code(t64, 64, 56)
    side4 = SideInfo(tuple(t64.element(1 << i) for i in range(4)))
    built = build_subfield_scheme(spec64, 0, side4, 3)
    assert built.measured_bw == 105
    assert_sound(built)

    t16 = make_tower(2, 1, 4)
    spec16 = make_code(t16, 16, 12)
    side3 = SideInfo(tuple(t16.element(1 << i) for i in range(3)))
    case1 = build_subfield_scheme(spec16, 0, side3, 2)
    assert case1.measured_bw == 12
    assert_sound(case1)


def test_subfield_scheme_precondition_errors(code16, t16):
    side2 = side_of(t16, [1, 2])
    with pytest.raises(FieldError, match="coprimality"):
        build_subfield_scheme(code16, 0, side2, 2)
    side1 = side_of(t16, [1])
    with pytest.raises(FieldError, match="divide"):
        build_subfield_scheme(code16, 0, side1, 2)
    short = make_code(t16, 15, 11)
    with pytest.raises(FieldError, match="full-length"):
        build_subfield_scheme(short, 0, side2, 2)


def test_subfield_scheme_coset_variant(code16, t16):
    side3 = SideInfo(tuple(t16.element(1 << i) for i in range(3)))
    plain = build_subfield_scheme(code16, 0, side3, 2)
    for scale_code in (3, 7, 11):
        coset = build_subfield_scheme(
            code16, 0, side3, 2, w_scale=t16.element(scale_code)
        )
        assert coset.measured_bw == plain.measured_bw


def test_greedy_W_properties(t16):
    assert greedy_condition_holds(2, 4, 2, 2)  # 16 > C(2,2)*9 + 1 = 10
    w_space = build_greedy_W(t16, 2, 2)
    f4 = subfield_subspace(t16, 2)
    total = 0
    for gc in range(1, 16):
        d = intersect_dim(scale(t16.element(gc), f4), w_space)
        assert d <= 1
        total += d
    assert total == 9  # (q^a - 1)(q^m - 1)/(q - 1)


def test_greedy_W_m1_trivial(t16):
    w_space = build_greedy_W(t16, 2, 1)
    assert w_space.dim == 1 and w_space.codes == (1,)


def test_greedy_condition_error(t16):
    # a = 4, m = 2: 16 is not > C(2,2) * 225 + 1.
    with pytest.raises(FieldError, match="greedy condition"):
        build_greedy_W(t16, 4, 2)


def test_greedy_scheme_matches_closed_form_and_exhaustive(code16, t16):
    side = side_of(t16, [1, 2])
    built = build_greedy_scheme(code16, 0, side, 2)
    assert built.measured_bw == built.predicted_bw == 21
    res = optimize_exhaustive(code16, 0, side, 2)
    assert res.bandwidth == built.measured_bw
    assert_sound(built)


def test_greedy_scheme_divisibility_error(t16):
    spec = make_code(t16, 16, 12)
    side = SideInfo(tuple(t16.element(1 << i) for i in range(1)))  # ell - s = 3
    with pytest.raises(FieldError, match="divide"):
        build_greedy_scheme(spec, 0, side, 1)


def test_coset_dimension_repetition(t16):
    # Every gamma' in gamma * F_4^* sees the same intersection dimension.
    f4 = subfield_subspace(t16, 2)
    w_space = build_greedy_W(t16, 2, 2)
    nonzero_sub = [e for e in t16.subfield_elements(2) if e.code]
    for gc in range(1, 16):
        gamma = t16.element(gc)
        base = intersect_dim(scale(gamma, f4), w_space)
        for u in nonzero_sub:
            assert intersect_dim(scale(gamma * u, f4), w_space) == base


def test_dimension_profiles_and_majorization(t16):
    q, a = 2, 2
    coset_count = (16 - 1) // (2**a - 1)
    greedy = DimensionProfile.of_subspace(t16, a, build_greedy_W(t16, 2, 2))
    assert len(greedy.dims) == coset_count
    f4 = subfield_subspace(t16, a)
    coincident = DimensionProfile.of_subspace(t16, a, f4)
    assert max(coincident.dims) == 2

    verdict = majorization_compare(q, greedy, coincident)
    assert verdict.relation == "majorized"
    assert verdict.sum_d == 3 and verdict.sum_dprime == 2

    same = majorization_compare(q, greedy, greedy)
    assert same.relation == "majorized" and same.sum_d == same.sum_dprime

    with pytest.raises(FieldError, match="premise"):
        majorization_compare(
            q, greedy, DimensionProfile(dims=(1,) * len(greedy.dims))
        )


def test_majorization_exhaustive_over_all_W(t16):
    # All 35 two-dim W: flat profiles reach 9, any 2-dim coincidence is lower.
    f4 = subfield_subspace(t16, 2)
    best = 9
    for w_space in enumerate_subspaces(t16, 2):
        total = sum(
            intersect_dim(scale(t16.element(g), f4), w_space) for g in range(1, 16)
        )
        profile = DimensionProfile.of_subspace(t16, 2, w_space)
        if max(profile.dims) <= 1:
            assert total == best
        else:
            assert total < best


def test_theorem_closed_form_matches_optimizer_small():
    # q=2, ell=2, s=1, m=1: closed form (q^2-1)*1 - (q-1)q... = 3 - 1 = 2.
    t = make_tower(2, 1, 2)
    spec = make_code(t, 4, 2)
    side = SideInfo((t.one,))
    res = optimize_exhaustive(spec, 0, side, 1)
    assert res.bandwidth == 2
    built = build_subfield_scheme(spec, 0, side, 1)
    assert built.measured_bw == 2
