"""Lower bounds on repair bandwidth with side information.

All decisions (integrality of the average, the balancing count t) are made
with exact rational arithmetic; floats appear only in reports for display.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .fields import FieldError, prime_power_split


@dataclass(frozen=True)
class LowerBoundReport:
    """The balancing quantities behind the bandwidth lower bound.

    ``threshold`` is the exact rational cap on sum_j q^(-b_j); ``b_ave`` is
    log_q((n-1)/threshold) (display only); ``t`` counts helpers pinned to
    floor(b_ave) in the balanced optimum.
    """

    q: int
    ell: int
    s: int
    n: int
    k: int
    r: int
    threshold: Fraction
    b_ave: float
    b_ave_integral: bool
    t: int
    bound: int

    def csv_row(self) -> list:
        return [
            self.q,
            self.ell,
            self.s,
            self.n,
            self.k,
            str(self.threshold),
            repr(self.b_ave),
            self.t,
            self.bound,
        ]


CSV_COLUMNS = ["q", "ell", "s", "n", "k", "T_thresh", "b_ave", "t", "bound"]


def _exact_q_power(value: Fraction, q: int) -> int | None:
    """The integer j >= 0 with value == q**j, or None."""
    if value.denominator != 1:
        return None
    v = value.numerator
    j = 0
    while v > 1:
        if v % q:
            return None
        v //= q
        j += 1
    return j if v == 1 else None


def lower_bound(q: int, ell: int, s: int, n: int, k: int) -> LowerBoundReport:
    """Minimum sub-symbols any linear scheme with side size s must download.

    bound = t * floor(b_ave) + (n - 1 - t) * ceil(b_ave), where the
    threshold is ((r-1)(q^(ell-s) - 1) + n - 1) / q^(ell-s) and t is the
    balancing count, everything computed over exact rationals.
    """
    prime_power_split(q)
    if ell < 1:
        raise FieldError("ell must be >= 1")
    if not 0 <= s <= ell:
        raise FieldError(f"side size s = {s} out of range 0..{ell}")
    if not 1 <= k < n <= q**ell:
        raise FieldError(f"need 1 <= k < n <= q^ell, got k={k} n={n}")
    r = n - k
    qa = q ** (ell - s)
    threshold = Fraction((r - 1) * (qa - 1) + n - 1, qa)
    ratio = Fraction(n - 1) / threshold
    b_ave = math.log(ratio.numerator / ratio.denominator, q)
    exact = _exact_q_power(ratio, q)
    if exact is not None:
        t = n - 1
        bound = (n - 1) * exact
        b_ave = float(exact)
        integral = True
    else:
        floor_b = 0
        while Fraction(q ** (floor_b + 1)) <= ratio:
            floor_b += 1
        ceil_b = floor_b + 1
        numer = threshold - Fraction(n - 1, q**ceil_b)
        denom = Fraction(1, q**floor_b) - Fraction(1, q**ceil_b)
        t = int(numer / denom)
        bound = t * floor_b + (n - 1 - t) * ceil_b
        integral = False
    if not 0 <= t <= n - 1:  # pragma: no cover
        raise AssertionError(f"balancing count t = {t} left its range")
    return LowerBoundReport(
        q=q,
        ell=ell,
        s=s,
        n=n,
        k=k,
        r=r,
        threshold=threshold,
        b_ave=b_ave,
        b_ave_integral=integral,
        t=t,
        bound=bound,
    )


def closed_form_bound(q: int, ell: int, s: int, m: int) -> int:
    """(q^ell - 1)(ell - s) - (q^(ell-s) - 1)(q^m - 1)/(q - 1), for the
    full-length code with n - k = q^m.

    Valid when (ell - s) | ell and ell >= m * (ell - s); the result is
    checked against the general lower bound it specializes.
    """
    prime_power_split(q)
    if not 1 <= m < ell:
        raise FieldError(f"need 1 <= m < ell, got m={m}")
    if not 0 <= s < ell:
        raise FieldError(f"need 0 <= s < ell, got s={s}")
    a = ell - s
    if ell % a:
        raise FieldError(f"(ell - s) = {a} must divide ell = {ell}")
    if ell < m * a:
        raise FieldError(f"need ell >= m * (ell - s) = {m * a}, got ell = {ell}")
    value = (q**ell - 1) * a - (q**a - 1) * (q**m - 1) // (q - 1)
    general = lower_bound(q, ell, s, q**ell, q**ell - q**m).bound
    if value != general:  # pragma: no cover
        raise AssertionError(
            f"closed form {value} != general bound {general} at "
            f"q={q} ell={ell} s={s} m={m}"
        )
    return value


@dataclass(frozen=True)
class ReductionReport:
    """Bandwidth with side information against two baselines.

    ``bw_without_side`` is the optimal full-length bandwidth at s = 0,
    which the general lower bound yields exactly as (q^ell - 1)(ell - m);
    ``bw_naive`` is downloading everything, (q^ell - 1) * ell.  The saving
    against the naive baseline splits exactly into s(q^ell - 1) plus the
    subspace-intersection term.
    """

    q: int
    ell: int
    s: int
    m: int
    bw_with_side: int
    bw_without_side: int
    saving: int
    bw_naive: int
    saving_vs_naive: int
    trivial_term: int
    intersection_term: int
    case1_simplified: int | None

    def to_json(self) -> dict:
        out = {
            "q": self.q,
            "ell": self.ell,
            "s": self.s,
            "m": self.m,
            "bw_with_side": self.bw_with_side,
            "bw_without_side": self.bw_without_side,
            "saving": self.saving,
            "bw_naive": self.bw_naive,
            "saving_vs_naive": self.saving_vs_naive,
            "trivial_term": self.trivial_term,
            "intersection_term": self.intersection_term,
        }
        if self.case1_simplified is not None:
            out["case1_simplified"] = self.case1_simplified
        return out


def reduction_report(q: int, ell: int, s: int, m: int) -> ReductionReport:
    """How much the side information saves on a full-length code with
    n - k = q^m, against both the optimal s = 0 scheme and the naive
    download-everything baseline."""
    with_side = closed_form_bound(q, ell, s, m)
    without_side = lower_bound(q, ell, 0, q**ell, q**ell - q**m).bound
    naive = (q**ell - 1) * ell
    trivial = s * (q**ell - 1)
    inter = (q ** (ell - s) - 1) * (q**m - 1) // (q - 1)
    saving_naive = naive - with_side
    if saving_naive != trivial + inter:  # pragma: no cover
        raise AssertionError("saving decomposition broke exact arithmetic")
    case1 = None
    if s == ell - 1 and ell % m == 0:
        d = ell // m
        case1 = (q**ell - 1) - (q ** (ell // d) - 1)
        if case1 != with_side:  # pragma: no cover
            raise AssertionError("case-1 simplification disagrees with closed form")
    return ReductionReport(
        q=q,
        ell=ell,
        s=s,
        m=m,
        bw_with_side=with_side,
        bw_without_side=without_side,
        saving=without_side - with_side,
        bw_naive=naive,
        saving_vs_naive=saving_naive,
        trivial_term=trivial,
        intersection_term=inter,
        case1_simplified=case1,
    )


def sweep(q: int, ell: int, n: int, k: int) -> list[LowerBoundReport]:
    """Lower bounds for s = 0..ell on a fixed code."""
    return [lower_bound(q, ell, s, n, k) for s in range(ell + 1)]
