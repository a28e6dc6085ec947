import random

import pytest

from rsrepair.fields import FieldError, make_tower
from rsrepair.linalg import (
    BudgetError,
    Subspace,
    complete_basis,
    enumerate_complements,
    enumerate_subspaces,
    gaussian_binomial,
    intersect_dim,
    rank_of,
    scale,
    span,
)


def test_rank_basics(t4, t16):
    assert rank_of(t4, []) == 0
    w = t4.element(2)
    assert rank_of(t4, [t4.one, w, t4.one + w]) == 2
    basis = [t16.element(1 << i) for i in range(4)]
    assert rank_of(t16, basis) == 4


def test_rank_rejects_mixed_towers(t4, t16):
    with pytest.raises(FieldError, match="mixed"):
        rank_of(t4, [t4.one, t16.one])


def test_span_canonical(t16):
    rng = random.Random(2)
    for _ in range(25):
        elems = [t16.element(rng.randrange(16)) for _ in range(3)]
        direct = span(t16, elems)
        shuffled = list(elems)
        rng.shuffle(shuffled)
        assert span(t16, shuffled) == direct
        g = t16.element(rng.randrange(1, 16))
        # scaling every generator by the same gamma spans gamma * V
        assert span(t16, [g * el for el in elems]) == scale(g, direct)


def test_subspace_membership_and_elements(t16):
    sub = span(t16, [t16.element(3), t16.element(5)])
    elems = list(sub.elements())
    assert len(elems) == 2**sub.dim
    assert len({e.code for e in elems}) == len(elems)
    for e in elems:
        assert e in sub


@pytest.mark.parametrize("params", [(2, 1, 4), (3, 1, 3), (2, 2, 2), (2, 1, 6)])
def test_enumeration_counts_match_gaussian_binomial(params):
    t = make_tower(*params)
    for d in range(t.ell + 1):
        subs = list(enumerate_subspaces(t, d))
        assert len(subs) == gaussian_binomial(t.ell, d, t.q)
        assert len(set(subs)) == len(subs)
        for sub in subs[:20]:
            assert span(t, list(sub.basis)) == sub


def test_enumeration_budget():
    big = make_tower(2, 1, 12)
    assert gaussian_binomial(12, 6, 2) > 10**6
    with pytest.raises(BudgetError):
        list(enumerate_subspaces(big, 6))


def test_complements(t16):
    f4 = span(t16, t16.subfield_elements(2))
    comps = list(enumerate_complements(f4))
    assert len(comps) == 16 and len(set(comps)) == 16
    for comp in comps:
        assert comp.dim == 2
        assert rank_of(t16, list(f4.basis) + list(comp.basis)) == 4
    # degenerate ends
    full = span(t16, [t16.element(c) for c in range(16)])
    assert list(enumerate_complements(full)) == [span(t16, [])]
    zero = span(t16, [])
    assert len(list(enumerate_complements(zero))) == 1


def test_complete_basis(t16):
    zero = span(t16, [])
    full = span(t16, [t16.element(1 << i) for i in range(4)])
    delta, T = complete_basis(zero, full)
    assert delta.code == 1 and T == full

    f4 = span(t16, t16.subfield_elements(2))
    delta, T = complete_basis(f4, f4)
    assert delta.code not in {e.code for e in t16.subfield_elements(2)}
    assert rank_of(t16, list(f4.basis) + list(T.basis)) == 4

    with pytest.raises(FieldError, match="dimension mismatch"):
        complete_basis(f4, full)


def test_intersect_dim_properties(t16):
    rng = random.Random(4)
    subs = list(enumerate_subspaces(t16, 2))
    for _ in range(30):
        u = subs[rng.randrange(len(subs))]
        v = subs[rng.randrange(len(subs))]
        assert intersect_dim(u, u) == u.dim
        assert intersect_dim(u, v) == intersect_dim(v, u)
        g = t16.element(rng.randrange(1, 16))
        assert intersect_dim(scale(g, u), scale(g, v)) == intersect_dim(u, v)


def test_scale_properties(t16):
    f4 = span(t16, t16.subfield_elements(2))
    for code in range(1, 16):
        assert scale(t16.element(code), f4).dim == 2
    with pytest.raises(FieldError, match="zero"):
        scale(t16.zero, f4)


def test_coprime_subfield_intersections(t64):
    f4 = span(t64, t64.subfield_elements(2))
    f8 = span(t64, t64.subfield_elements(3))
    seen = set()
    for gc in range(1, 64):
        g_sub = scale(t64.element(gc), f4)
        for dc in range(1, 64):
            seen.add(intersect_dim(g_sub, scale(t64.element(dc), f8)))
    assert seen <= {0, 1}


def test_subspace_json_round_trip(t16):
    sub = span(t16, [t16.element(6), t16.element(9)])
    again = Subspace.from_json(t16, sub.to_json())
    assert again == sub
