"""Subspace-polynomial repair schemes and their bandwidth optimization.

A scheme is built from an m-dimensional subspace W (with q^m <= n - k) and
a target-side basis: the check polynomials are L_W(beta_i (x - alpha*)) /
(x - alpha*) where L_W is the subspace polynomial of W.  The bandwidth of
such a scheme equals (n-1)(ell-s) minus the sum over helpers of
dim((alpha - alpha*) * T intersect W), which this module evaluates both
ways and keeps in lock-step.

One scalar subtlety is resolved operationally: the value of a check
polynomial at alpha* is a0 * beta_i, where a0 is the linear coefficient of
L_W, so the realized target subspace is a0 * span(beta_i).  The delta scan
in ``build_scheme`` validates against the realized targets and keeps
scanning until they complete the side information to a basis.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from .fields import FieldElement, FieldError, FieldTower
from .linalg import (
    BudgetError,
    Subspace,
    _rank_codes,
    _sum_scaled_intersections,
    enumerate_complements,
    enumerate_subspaces,
    gaussian_binomial,
    intersect_dim,
    rank_of,
    scale,
    span,
)
from .repair import RepairScheme, SideInfo, bandwidth
from .rs import CodeSpec, eval_poly

PAIR_BUDGET = 10**7
_CHUNK = 4096


def subfield_subspace(tower: FieldTower, a: int) -> Subspace:
    """The subfield F_(q^a) viewed as an a-dimensional F_q-subspace."""
    return span(tower, tower.subfield_elements(a))


def subspace_poly(w_space: Subspace) -> list[FieldElement]:
    """Coefficients of L_W(x) = prod_{w in W} (x - w), low degree first.

    The result is monic of degree q^dim(W), q-linearized (only q-power
    monomials appear) and vanishes exactly on W; both facts are checked.
    """
    tower = w_space.tower
    coeffs = [tower.one]
    for w in w_space.elements():
        nxt = [tower.zero] * (len(coeffs) + 1)
        for d, c in enumerate(coeffs):
            nxt[d + 1] = nxt[d + 1] + c
            nxt[d] = nxt[d] - c * w
        coeffs = nxt
    degree = len(coeffs) - 1
    q_powers = {tower.q**j for j in range(w_space.dim + 1)}
    for d, c in enumerate(coeffs):
        if c.code and d not in q_powers:
            raise AssertionError("subspace polynomial is not q-linearized")
    for b in w_space.basis:
        if eval_poly(coeffs, b).code:
            raise AssertionError("subspace polynomial does not vanish on W")
    assert degree == tower.q**w_space.dim and coeffs[-1].code == 1
    return coeffs


@dataclass(frozen=True)
class SubspaceScheme:
    """A built scheme together with the data that produced it.

    ``t_basis`` holds the beta_i fed into the check polynomials (spanning
    delta * T'); ``target_space`` is the span of the realized targets
    g_i(alpha*), which completes the side information to a basis.
    """

    w_space: Subspace
    target_space: Subspace
    t_basis: tuple[FieldElement, ...]
    delta: FieldElement
    scheme: RepairScheme
    predicted_bw: int
    measured_bw: int
    method: str

    def to_json(self) -> dict:
        payload = self.scheme.to_json()
        payload.update(
            {
                "W": self.w_space.to_json(),
                "T": self.target_space.to_json(),
                "predicted_bw": self.predicted_bw,
                "measured_bw": self.measured_bw,
                "method": self.method,
            }
        )
        return payload


def intersection_bandwidth(
    spec: CodeSpec, star_index: int, s: int, t_space: Subspace, w_space: Subspace
) -> int:
    """(n-1)(ell-s) - sum over helpers of dim((alpha - alpha*)T ^ W)."""
    tower = spec.tower
    star = spec.points[star_index]
    gammas = [
        (pt - star).code for j, pt in enumerate(spec.points) if j != star_index
    ]
    total = _sum_scaled_intersections(
        tower, list(t_space.codes), list(w_space.codes), gammas
    )
    return (spec.n - 1) * (tower.ell - s) - total


def build_scheme(
    spec: CodeSpec,
    star_index: int,
    side: SideInfo,
    w_space: Subspace,
    t_prime: Subspace,
    method: str = "custom",
) -> SubspaceScheme:
    """Construct the scheme for target-side shape T' and kernel subspace W.

    Scans delta in ascending code order until the realized targets
    a0 * delta * T' complete the side information to a full basis (existence
    is guaranteed by the basis-completion counting argument), then measures
    the bandwidth and cross-checks it against the intersection formula.
    """
    tower = spec.tower
    ell = tower.ell
    s = side.s
    if t_prime.dim != ell - s:
        raise FieldError(
            f"target shape must have dimension ell - s = {ell - s}, got {t_prime.dim}"
        )
    if tower.q**w_space.dim > spec.r:
        raise FieldError(
            f"degree infeasible: q^dim(W) = {tower.q ** w_space.dim} > n - k = {spec.r}"
        )
    side_space = side.subspace(tower) if s else None
    if side_space is not None and side_space.dim + t_prime.dim != ell:
        raise FieldError("side and target dimensions do not fill the field")

    lw = subspace_poly(w_space)
    a0 = lw[1]
    side_codes = [b.code for b in side.elements]
    star = spec.points[star_index]

    chosen = None
    for delta_code in range(1, tower.order):
        realized = [
            tower.mul_codes(a0.code, tower.mul_codes(delta_code, c))
            for c in t_prime.codes
        ]
        if _rank_codes(tower, side_codes + realized) == ell:
            chosen = delta_code
            break
    if chosen is None:
        raise AssertionError("no completing delta exists; construction is broken")

    delta = FieldElement(tower, chosen)
    betas = tuple(delta * b for b in t_prime.basis)
    checks = tuple(_check_poly(lw, beta, star) for beta in betas)
    scheme = RepairScheme(spec=spec, star_index=star_index, side=side, checks=checks)
    measured = bandwidth(scheme).total
    predicted = intersection_bandwidth(spec, star_index, s, span(tower, list(betas)), w_space)
    if predicted != measured:  # pragma: no cover
        raise AssertionError(
            f"intersection formula {predicted} != measured bandwidth {measured}"
        )
    return SubspaceScheme(
        w_space=w_space,
        target_space=span(tower, list(scheme.targets)),
        t_basis=betas,
        delta=delta,
        scheme=scheme,
        predicted_bw=predicted,
        measured_bw=measured,
        method=method,
    )


def _check_poly(
    lw: Sequence[FieldElement], beta: FieldElement, star: FieldElement
) -> tuple[FieldElement, ...]:
    """Coefficients of L_W(beta * (x - alpha*)) / (x - alpha*).

    Since L_W is q-linearized, L_W(beta(x - alpha*)) expands to
    sum_j c_j x^(q^j) - sum_j c_j alpha*^(q^j) with c_j = a_j beta^(q^j);
    the division by the root alpha* is synthetic and must be exact.
    """
    tower = beta.tower
    q = tower.q
    degree = len(lw) - 1
    numer = [tower.zero] * (degree + 1)
    const = tower.zero
    j = 0
    power = 1
    while power <= degree:
        a_j = lw[power]
        if a_j.code:
            c_j = a_j * beta**power
            numer[power] = numer[power] + c_j
            const = const + c_j * star**power
        j += 1
        power = q**j
    numer[0] = numer[0] - const
    # synthetic division by (x - alpha*)
    out = [tower.zero] * degree
    carry = tower.zero
    for d in range(degree, 0, -1):
        carry = numer[d] + carry * star if d < degree else numer[d]
        out[d - 1] = carry
    remainder = numer[0] + carry * star
    if remainder.code:  # pragma: no cover
        raise AssertionError("check polynomial division left a remainder")
    return tuple(out)


@dataclass(frozen=True)
class OptimizationResult:
    t_space: Subspace
    w_space: Subspace
    bandwidth: int
    intersection_sum: int
    t_count: int
    w_count: int


def optimize_exhaustive(
    spec: CodeSpec,
    star_index: int,
    side: SideInfo,
    m: int,
    coset_targets: bool = False,
    workers: int | None = None,
) -> OptimizationResult:
    """Maximize the intersection sum over all valid (T, W) pairs.

    T ranges over the complements of the side-information subspace (or,
    with ``coset_targets``, over the multiplicative cosets of the subfield
    F_(q^(ell-s)) that are complements), W over all m-dimensional
    subspaces.  Ties break on the first maximizer in enumeration order,
    regardless of the worker count.
    """
    tower = spec.tower
    ell = tower.ell
    s = side.s
    if tower.q**m > spec.r:
        raise FieldError(
            f"degree infeasible: q^m = {tower.q ** m} > n - k = {spec.r}"
        )
    side_space = side.subspace(tower)
    if coset_targets:
        a = ell - s
        if a == 0 or ell % a:
            raise FieldError("coset targets need (ell - s) dividing ell")
        sub = subfield_subspace(tower, a)
        reps = _coset_representatives(tower, a)
        t_list = []
        for rep in reps:
            cand = scale(rep, sub)
            if rank_of(tower, list(side_space.basis) + list(cand.basis)) == ell:
                t_list.append(cand)
    else:
        t_list = list(enumerate_complements(side_space))
    w_list = list(enumerate_subspaces(tower, m))
    if len(t_list) * len(w_list) > PAIR_BUDGET:
        raise BudgetError(
            f"{len(t_list)} x {len(w_list)} search pairs exceed the budget {PAIR_BUDGET}"
        )

    star = spec.points[star_index]
    gammas = [
        (pt - star).code for j, pt in enumerate(spec.points) if j != star_index
    ]
    n_pairs = len(t_list) * len(w_list)
    n_w = len(w_list)

    def eval_range(lo: int, hi: int) -> tuple[int, int]:
        best_sum, best_idx = -1, -1
        for idx in range(lo, hi):
            t_sub = t_list[idx // n_w]
            w_sub = w_list[idx % n_w]
            total = _sum_scaled_intersections(
                tower, list(t_sub.codes), list(w_sub.codes), gammas
            )
            if total > best_sum:
                best_sum, best_idx = total, idx
        return best_sum, best_idx

    if workers is None:
        env = os.environ.get("RS_SIDEINFO_THREADS")
        workers = int(env) if env else (os.cpu_count() or 1)
    workers = max(1, workers)

    ranges = [(lo, min(lo + _CHUNK, n_pairs)) for lo in range(0, n_pairs, _CHUNK)]
    if workers == 1 or len(ranges) == 1:
        results = [eval_range(lo, hi) for lo, hi in ranges]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda r: eval_range(*r), ranges))

    best_sum, best_idx = -1, -1
    for chunk_sum, chunk_idx in results:
        if chunk_sum > best_sum or (chunk_sum == best_sum and chunk_idx < best_idx):
            best_sum, best_idx = chunk_sum, chunk_idx
    t_best = t_list[best_idx // n_w]
    w_best = w_list[best_idx % n_w]
    bw = (spec.n - 1) * (ell - s) - best_sum
    return OptimizationResult(
        t_space=t_best,
        w_space=w_best,
        bandwidth=bw,
        intersection_sum=best_sum,
        t_count=len(t_list),
        w_count=len(w_list),
    )


def _coset_representatives(tower: FieldTower, a: int) -> list[FieldElement]:
    """One representative per multiplicative coset of F_(q^a)* in the
    top field's multiplicative group."""
    xi = tower.primitive_element()
    n_cosets = (tower.order - 1) // (tower.q**a - 1)
    reps, cur = [], tower.one
    for _ in range(n_cosets):
        reps.append(cur)
        cur = cur * xi
    return reps


def _closed_form_bandwidth(q: int, ell: int, s: int, m: int) -> int:
    return (q**ell - 1) * (ell - s) - (q ** (ell - s) - 1) * (q**m - 1) // (q - 1)


def build_subfield_scheme(
    spec: CodeSpec,
    star_index: int,
    side: SideInfo,
    m: int,
    w_scale: FieldElement | None = None,
) -> SubspaceScheme:
    """W = F_(q^m) (optionally a multiplicative coset of it), T' = F_(q^(ell-s)).

    Requires a full-length code, (ell-s) | ell, m | ell, gcd(ell-s, m) = 1
    and q^m <= n-k; the measured bandwidth then equals
    (q^ell - 1)(ell - s) - (q^(ell-s) - 1)(q^m - 1)/(q - 1).
    """
    tower = spec.tower
    ell, q = tower.ell, tower.q
    s = side.s
    a = ell - s
    if not spec.full_length:
        raise FieldError("subfield construction needs a full-length code")
    if a == 0 or ell % a:
        raise FieldError(f"(ell - s) = {a} must divide ell = {ell}")
    if m < 1 or ell % m:
        raise FieldError(f"m = {m} must divide ell = {ell}")
    if math.gcd(a, m) != 1:
        raise FieldError(f"coprimality fails: gcd(ell - s, m) = {math.gcd(a, m)} != 1")
    if q**m > spec.r:
        raise FieldError(f"degree infeasible: q^m = {q ** m} > n - k = {spec.r}")

    w_space = subfield_subspace(tower, m)
    if w_scale is not None:
        if not w_scale.code:
            raise FieldError("coset scale must be nonzero")
        w_space = scale(w_scale, w_space)
    t_prime = subfield_subspace(tower, a)
    built = build_scheme(spec, star_index, side, w_space, t_prime, method="subfield")
    expected = _closed_form_bandwidth(q, ell, s, m)
    if built.measured_bw != expected:  # pragma: no cover
        raise AssertionError(
            f"subfield scheme bandwidth {built.measured_bw} != closed form {expected}"
        )
    return built


def greedy_condition_holds(q: int, ell: int, a: int, m: int) -> bool:
    """Exact integer check of q^ell > C(q^(m-1), 2) * ((q^a-1)/(q-1))^2 + 1."""
    bound = math.comb(q ** (m - 1), 2) * ((q**a - 1) // (q - 1)) ** 2 + 1
    return q**ell > bound


def build_greedy_W(tower: FieldTower, a: int, m: int) -> Subspace:
    """Greedy m-dimensional W with dim(gamma * F_(q^a) ^ W) in {0, 1} for
    every nonzero gamma.

    Extends W one generator at a time, always picking the smallest code
    outside the forbidden set B = {a1*u + a2*v : u != v in W, a1, a2 in
    F_(q^a)}; the counting condition guarantees such a code exists.
    """
    q, ell = tower.q, tower.ell
    if a < 1 or ell % a:
        raise FieldError(f"a = {a} must divide ell = {ell}")
    if not greedy_condition_holds(q, ell, a, m):
        bound = math.comb(q ** (m - 1), 2) * ((q**a - 1) // (q - 1)) ** 2 + 1
        raise FieldError(
            f"greedy condition fails: q^ell = {q ** ell} is not > "
            f"C(q^(m-1), 2) * ((q^a - 1)/(q - 1))^2 + 1 = {bound}"
        )
    subfield_codes = [el.code for el in tower.subfield_elements(a)]
    gen_codes: list[int] = [1]
    for _ in range(1, m):
        current = span(tower, [FieldElement(tower, c) for c in gen_codes])
        elems = [el.code for el in current.elements()]
        forbidden = set()
        for u in elems:
            for v in elems:
                if u == v:
                    continue
                for a1 in subfield_codes:
                    a1u = tower.mul_codes(a1, u)
                    for a2 in subfield_codes:
                        forbidden.add(
                            tower.add_codes(a1u, tower.mul_codes(a2, v))
                        )
        w_next = next(
            (c for c in range(1, tower.order) if c not in forbidden), None
        )
        if w_next is None:  # pragma: no cover
            raise AssertionError("forbidden set covers the field; counting bound broken")
        gen_codes.append(w_next)
    w_space = span(tower, [FieldElement(tower, c) for c in gen_codes])
    assert w_space.dim == m
    _assert_low_intersection_profile(tower, a, w_space)
    return w_space


def _assert_low_intersection_profile(
    tower: FieldTower, a: int, w_space: Subspace
) -> None:
    """Exhaustive check of the {0,1} coset-intersection property, plus the
    partition identity sum_gamma dim = (q^a - 1)(q^m - 1)/(q - 1)."""
    sub = subfield_subspace(tower, a)
    total = 0
    for gamma in range(1, tower.order):
        d = intersect_dim(scale(FieldElement(tower, gamma), sub), w_space)
        if d > 1:
            raise AssertionError(
                f"greedy subspace has a {d}-dimensional coset intersection"
            )
        total += d
    q = tower.q
    expected = (q**a - 1) * (q**w_space.dim - 1) // (q - 1)
    if total != expected:  # pragma: no cover
        raise AssertionError(
            f"intersection sum {total} != partition count {expected}"
        )


def build_greedy_scheme(
    spec: CodeSpec, star_index: int, side: SideInfo, m: int
) -> SubspaceScheme:
    """Greedy W with a = ell - s, target shape T' = F_(q^(ell-s)); same
    closed-form bandwidth as the subfield construction, under the greedy
    counting condition instead of the coprimality one."""
    tower = spec.tower
    ell, q = tower.ell, tower.q
    s = side.s
    a = ell - s
    if not spec.full_length:
        raise FieldError("greedy construction needs a full-length code")
    if a == 0 or ell % a:
        raise FieldError(f"(ell - s) = {a} must divide ell = {ell}")
    if q**m > spec.r:
        raise FieldError(f"degree infeasible: q^m = {q ** m} > n - k = {spec.r}")
    w_space = build_greedy_W(tower, a, m)
    t_prime = subfield_subspace(tower, a)
    built = build_scheme(spec, star_index, side, w_space, t_prime, method="greedy")
    expected = _closed_form_bandwidth(q, ell, s, m)
    if built.measured_bw != expected:  # pragma: no cover
        raise AssertionError(
            f"greedy scheme bandwidth {built.measured_bw} != closed form {expected}"
        )
    return built


@dataclass(frozen=True)
class DimensionProfile:
    """Per-coset intersection dimensions with a fixed subfield, sorted
    descending; one entry per multiplicative coset of F_(q^a)*."""

    dims: tuple[int, ...]

    @classmethod
    def of_subspace(
        cls, tower: FieldTower, a: int, w_space: Subspace
    ) -> "DimensionProfile":
        sub = subfield_subspace(tower, a)
        dims = [
            intersect_dim(scale(rep, sub), w_space)
            for rep in _coset_representatives(tower, a)
        ]
        return cls(dims=tuple(sorted(dims, reverse=True)))

    def transformed(self, q: int) -> tuple[int, ...]:
        return tuple(q**d - 1 for d in self.dims)


@dataclass(frozen=True)
class MajorizationVerdict:
    relation: str  # "majorized" or "incomparable"
    sum_d: int
    sum_dprime: int


def majorization_compare(
    q: int, d: DimensionProfile, dprime: DimensionProfile
) -> MajorizationVerdict:
    """Compare two coset profiles through x_i = q^(d_i) - 1.

    When x is majorized by x' (equal sums, prefix dominance of x'), the
    dimension sums must satisfy sum(d) >= sum(d'); that consequence is
    asserted, not assumed.
    """
    if len(d.dims) != len(dprime.dims):
        raise FieldError("profiles have different lengths")
    x = d.transformed(q)
    xp = dprime.transformed(q)
    if sum(x) != sum(xp):
        raise FieldError(
            f"majorization premise violated: transformed sums {sum(x)} != {sum(xp)}"
        )
    sum_d, sum_dp = sum(d.dims), sum(dprime.dims)
    prefix_x = prefix_xp = 0
    dominated = True
    for xi, xpi in zip(x, xp):
        prefix_x += xi
        prefix_xp += xpi
        if prefix_x > prefix_xp:
            dominated = False
            break
    if not dominated:
        return MajorizationVerdict("incomparable", sum_d, sum_dp)
    if sum_d < sum_dp:  # pragma: no cover
        raise AssertionError(
            "majorized profile has the smaller dimension sum; comparator broken"
        )
    return MajorizationVerdict("majorized", sum_d, sum_dp)
