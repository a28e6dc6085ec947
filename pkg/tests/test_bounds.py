import itertools
from fractions import Fraction

import pytest

from rsrepair.bounds import (
    closed_form_bound,
    lower_bound,
    reduction_report,
    sweep,
)
from rsrepair.fields import FieldError, factorize


def brute_force_balanced_minimum(q, ell, s, n, k):
    """Independent oracle: minimize sum(b_j) over per-helper download counts
    b_j in {0..ell-s} subject to sum(q^-b_j) <= T, enumerating level counts
    (the objective and constraint only depend on how many helpers sit at
    each level)."""
    r = n - k
    qa = q ** (ell - s)
    threshold = Fraction((r - 1) * (qa - 1) + n - 1, qa)
    levels = list(range(ell - s + 1))
    helpers = n - 1
    best = None
    for counts in _compositions(helpers, len(levels)):
        load = sum(c * Fraction(1, q**lvl) for c, lvl in zip(counts, levels))
        if load <= threshold:
            cost = sum(c * lvl for c, lvl in zip(counts, levels))
            if best is None or cost < best:
                best = cost
    return best


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@pytest.mark.parametrize(
    "q,ell,s,n,k,t_expected,bound_expected,thresh",
    [
        (2, 4, 2, 16, 12, 9, 21, Fraction(6)),
        (2, 4, 2, 16, 14, 3, 27, Fraction(9, 2)),
    ],
)
def test_worked_instances(q, ell, s, n, k, t_expected, bound_expected, thresh):
    rep = lower_bound(q, ell, s, n, k)
    assert rep.threshold == thresh
    assert rep.t == t_expected
    assert rep.bound == bound_expected
    assert not rep.b_ave_integral
    assert rep.bound == brute_force_balanced_minimum(q, ell, s, n, k)


@pytest.mark.parametrize(
    "q,ell,s,n,k",
    [
        (2, 2, 1, 4, 2),
        (2, 3, 1, 8, 6),
        (3, 2, 1, 9, 6),
        (2, 4, 3, 16, 12),
        (2, 4, 0, 16, 12),
        (2, 6, 4, 64, 56),
        (2, 4, 1, 12, 7),
        (3, 2, 0, 7, 3),
    ],
)
def test_bound_matches_brute_force(q, ell, s, n, k):
    assert lower_bound(q, ell, s, n, k).bound == brute_force_balanced_minimum(
        q, ell, s, n, k
    )


def test_s0_full_length_reduces_to_known_bound():
    # n = q^ell, r = q^m: the ratio (n-1)/T is the exact power q^(ell-m),
    # so every helper sits at ell - m and the bound is (q^ell - 1)(ell - m).
    for q, ell, m in [(2, 4, 2), (2, 4, 1), (3, 3, 1), (2, 6, 3), (4, 2, 1)]:
        rep = lower_bound(q, ell, 0, q**ell, q**ell - q**m)
        assert rep.b_ave_integral
        assert rep.t == q**ell - 1
        assert rep.bound == (q**ell - 1) * (ell - m)


def test_bound_monotone_in_s():
    for q, ell, n, k in [(2, 4, 16, 12), (2, 4, 16, 14), (3, 2, 9, 5), (2, 6, 64, 56)]:
        bounds_ = [r.bound for r in sweep(q, ell, n, k)]
        assert all(a >= b for a, b in zip(bounds_, bounds_[1:]))
        assert bounds_[-1] == 0  # s = ell needs nothing


def test_parameter_validation():
    with pytest.raises(FieldError):
        lower_bound(6, 2, 0, 4, 2)  # q not a prime power
    with pytest.raises(FieldError):
        lower_bound(2, 4, 5, 16, 12)
    with pytest.raises(FieldError):
        lower_bound(2, 4, 0, 17, 12)
    with pytest.raises(FieldError):
        lower_bound(2, 4, 0, 16, 0)


def test_closed_form_values():
    assert closed_form_bound(2, 4, 2, 2) == 21
    assert closed_form_bound(2, 6, 4, 3) == 105
    assert closed_form_bound(2, 4, 3, 2) == 12


def test_closed_form_preconditions():
    with pytest.raises(FieldError, match="ell >= m"):
        closed_form_bound(2, 4, 2, 3)
    with pytest.raises(FieldError, match="divide"):
        closed_form_bound(2, 4, 1, 2)
    with pytest.raises(FieldError):
        closed_form_bound(2, 4, 4, 2)


def _prime_powers(limit):
    return [q for q in range(2, limit + 1) if len(factorize(q)) == 1]


def test_closed_form_equals_general_bound_exhaustively():
    # Every eligible (q, ell, s, m) with q^ell <= 2^10.
    checked = 0
    for q in _prime_powers(32):
        for ell in itertools.count(2):
            if q**ell > 1024:
                break
            for m in range(1, ell):
                for s in range(ell):
                    a = ell - s
                    if ell % a or ell < m * a:
                        continue
                    value = closed_form_bound(q, ell, s, m)
                    general = lower_bound(q, ell, s, q**ell, q**ell - q**m).bound
                    assert value == general
                    checked += 1
    assert checked > 100


def test_reduction_report():
    rep = reduction_report(2, 4, 2, 2)
    assert rep.bw_with_side == 21
    assert rep.bw_without_side == 30
    assert rep.saving == 9
    assert rep.saving_vs_naive == rep.trivial_term + rep.intersection_term
    assert rep.case1_simplified is None

    case1 = reduction_report(2, 4, 3, 2)
    assert case1.bw_with_side == 12
    assert case1.case1_simplified == (2**4 - 1) - (2**2 - 1)

    zero = reduction_report(2, 4, 0, 1)
    assert zero.saving == 0 and zero.trivial_term == 0


def test_reduction_decomposition_exact():
    for q, ell, s, m in [(2, 4, 2, 2), (2, 6, 4, 3), (3, 2, 1, 1), (2, 6, 3, 2)]:
        rep = reduction_report(q, ell, s, m)
        assert rep.bw_naive - rep.bw_with_side == rep.saving_vs_naive
        assert rep.trivial_term == s * (q**ell - 1)
        assert rep.intersection_term == (q ** (ell - s) - 1) * (q**m - 1) // (q - 1)
