"""Generic linear trace-repair engine with side information.

A scheme for the erased position j* is a list of ell - s check polynomials
g_i of degree < n - k whose values at alpha* complete the side-information
set S to an F_q-basis (the full-rank condition).  Helpers answer base-field
traces only; the engine never sees a full helper symbol, which pins the
bandwidth accounting to the interface.

Per helper j the query multipliers are mu_i = -g_i(alpha_j) * lambda_j /
lambda*; the minus sign is folded in here so that reconstruction is a plain
sum.  Queries are the canonical echelon basis of span{mu_i}: any spanning
set would work, and an oversized query set is representable but never
optimal, so the engine always uses a basis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .fields import FieldElement, FieldError, FieldTower
from .linalg import (
    BudgetError,
    Subspace,
    _echelon_digit_matrices,
    _rank_codes,
    _rref_rows,
    gaussian_binomial,
    span,
)
from .rs import CodeSpec, eval_poly, poly_degree

EXHAUSTIVE_FIELD_LIMIT = 1 << 6
EXHAUSTIVE_REDUNDANCY_LIMIT = 4


@dataclass(frozen=True)
class SideInfo:
    """F_q-linearly independent elements beta_i; the repairing node knows
    the traces Tr(beta_i * f(alpha*)).  ``values`` carries those traces as
    F_q codes when available."""

    elements: tuple[FieldElement, ...]
    values: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.elements:
            tower = self.elements[0].tower
            if _rank_codes(tower, [b.code for b in self.elements]) != len(
                self.elements
            ):
                raise FieldError("side information set is linearly dependent")
        if self.values is not None and len(self.values) != len(self.elements):
            raise FieldError("side information values length mismatch")

    @property
    def s(self) -> int:
        return len(self.elements)

    def subspace(self, tower: FieldTower) -> Subspace:
        return span(tower, list(self.elements))

    @staticmethod
    def empty() -> "SideInfo":
        return SideInfo(elements=())


@dataclass(frozen=True)
class RepairScheme:
    """Check polynomials plus declared side information for one position."""

    spec: CodeSpec
    star_index: int
    side: SideInfo
    checks: tuple[tuple[FieldElement, ...], ...]
    targets: tuple[FieldElement, ...] = field(init=False)

    def __post_init__(self):
        if not 0 <= self.star_index < self.spec.n:
            raise FieldError(f"star index {self.star_index} out of range")
        star = self.spec.points[self.star_index]
        object.__setattr__(
            self, "targets", tuple(eval_poly(g, star) for g in self.checks)
        )

    @property
    def tower(self) -> FieldTower:
        return self.spec.tower

    @property
    def star_point(self) -> FieldElement:
        return self.spec.points[self.star_index]

    def helper_indices(self) -> list[int]:
        return [j for j in range(self.spec.n) if j != self.star_index]

    def to_json(self) -> dict:
        return {
            "code": self.spec.to_json(),
            "star": self.star_index,
            "side": [b.text() for b in self.side.elements],
            "checks": [[c.text() for c in g] for g in self.checks],
        }

    @classmethod
    def from_json(cls, payload: dict) -> "RepairScheme":
        spec = CodeSpec.from_json(payload["code"])
        tower = spec.tower
        side = SideInfo(tuple(tower.from_text(t) for t in payload["side"]))
        checks = tuple(
            tuple(tower.from_text(t) for t in g) for g in payload["checks"]
        )
        return cls(spec=spec, star_index=payload["star"], side=side, checks=checks)


@dataclass(frozen=True)
class BandwidthReport:
    """Per-helper F_q-ranks of the check evaluations and their sum."""

    per_helper: dict[int, int]
    total: int


@dataclass(frozen=True)
class QueryPlan:
    """Per-helper query basis and the F_q expansion of each multiplier.

    ``queries[j]`` is the basis Q_j sent to helper j; ``expansions[j][i]``
    gives the F_q coefficients expressing mu_i in terms of Q_j.
    """

    queries: dict[int, tuple[FieldElement, ...]]
    expansions: dict[int, tuple[tuple[int, ...], ...]]


def validate(scheme: RepairScheme) -> list[str]:
    """Empty list when valid, otherwise one message per violated invariant."""
    violations = []
    r = scheme.spec.r
    for i, g in enumerate(scheme.checks):
        if poly_degree(g) >= r:
            violations.append(
                f"check polynomial {i} has degree {poly_degree(g)} >= n-k = {r}"
            )
    tower = scheme.tower
    ell = tower.ell
    expected = scheme.side.s + len(scheme.checks)
    if expected != ell:
        violations.append(
            f"side size {scheme.side.s} + checks {len(scheme.checks)} != ell = {ell}"
        )
    codes = [b.code for b in scheme.side.elements] + [t.code for t in scheme.targets]
    rank = _rank_codes(tower, codes)
    if rank != ell:
        violations.append(
            f"full-rank condition fails: rank(S united with targets) = {rank} < {ell}"
        )
    return violations


def _require_valid(scheme: RepairScheme) -> None:
    violations = validate(scheme)
    if violations:
        raise FieldError("invalid scheme: " + "; ".join(violations))


def bandwidth(scheme: RepairScheme) -> BandwidthReport:
    """Sum over helpers of rank_Fq({g_i(alpha)}), in F_q sub-symbols."""
    _require_valid(scheme)
    tower = scheme.tower
    per_helper: dict[int, int] = {}
    for j in scheme.helper_indices():
        pt = scheme.spec.points[j]
        evals = [eval_poly(g, pt).code for g in scheme.checks]
        per_helper[j] = _rank_codes(tower, evals)
    return BandwidthReport(per_helper=per_helper, total=sum(per_helper.values()))


def _query_multipliers(scheme: RepairScheme, j: int) -> list[int]:
    """Codes of mu_i = -g_i(alpha_j) * lambda_j / lambda_star."""
    spec = scheme.spec
    tower = scheme.tower
    pt = spec.points[j]
    lam_ratio = spec.multipliers[j] / spec.multipliers[scheme.star_index]
    return [
        tower.neg_code(tower.mul_codes(eval_poly(g, pt).code, lam_ratio.code))
        for g in scheme.checks
    ]


def query_plan(scheme: RepairScheme) -> QueryPlan:
    _require_valid(scheme)
    tower = scheme.tower
    ell = tower.ell
    queries: dict[int, tuple[FieldElement, ...]] = {}
    expansions: dict[int, tuple[tuple[int, ...], ...]] = {}
    for j in scheme.helper_indices():
        mus = _query_multipliers(scheme, j)
        rows = [list(tower.top_digits(c)) for c in mus]
        basis_rows = _rref_rows(tower, rows)
        pivots = [next(c for c in range(ell) if row[c]) for row in basis_rows]
        basis_codes = [tower.top_from_digits(row) for row in basis_rows]
        exp_rows = []
        for mu in mus:
            digits = tower.top_digits(mu)
            coeffs = tuple(digits[p] for p in pivots)
            # The pivot coordinates determine the expansion because the
            # basis is in reduced echelon form; recompose to be sure.
            acc = 0
            for c, b in zip(coeffs, basis_codes):
                if c:
                    acc = tower.add_codes(acc, tower.mul_codes(c, b))
            if acc != mu:  # pragma: no cover
                raise AssertionError("query expansion failed to recompose")
            exp_rows.append(coeffs)
        queries[j] = tuple(FieldElement(tower, c) for c in basis_codes)
        expansions[j] = tuple(exp_rows)
    return QueryPlan(queries=queries, expansions=expansions)


def answers_from_symbols(
    plan: QueryPlan, symbols: Mapping[int, FieldElement]
) -> dict[int, list[int]]:
    """What honest helpers send: Tr(gamma * symbol) for gamma in Q_j."""
    out: dict[int, list[int]] = {}
    for j, queries in plan.queries.items():
        sym = symbols[j]
        out[j] = [(gamma * sym).trace() for gamma in queries]
    return out


def execute_repair(
    scheme: RepairScheme,
    answers: Mapping[int, Sequence[int]],
    side_values: Sequence[int] | None = None,
    plan: QueryPlan | None = None,
) -> FieldElement:
    """Reconstruct f(alpha*) from helper traces and known side traces.

    ``answers[j]`` must align with the plan's query basis for helper j;
    ``side_values`` are the traces Tr(beta_i f(alpha*)) in the order of the
    side-information elements (falling back to the values stored in the
    scheme's SideInfo).
    """
    _require_valid(scheme)
    tower = scheme.tower
    if plan is None:
        plan = query_plan(scheme)
    if side_values is None:
        side_values = scheme.side.values
    if scheme.side.s and side_values is None:
        raise FieldError("side-information trace values are required")
    side_values = tuple(side_values or ())
    if len(side_values) != scheme.side.s:
        raise FieldError("side value count differs from side set size")

    n_targets = len(scheme.checks)
    etas = [0] * n_targets
    for j, queries in plan.queries.items():
        got = answers.get(j, ())
        if len(got) != len(queries):
            raise FieldError(f"answer shape mismatch for helper {j}")
        exp = plan.expansions[j]
        for i in range(n_targets):
            acc = 0
            for c, a in zip(exp[i], got):
                if c and a:
                    acc = tower.fq_add(acc, tower.fq_mul(c, a))
            etas[i] = tower.fq_add(etas[i], acc)

    basis = list(scheme.side.elements) + list(scheme.targets)
    dual = tower.dual_basis(basis)
    coeffs = list(side_values) + etas
    acc = 0
    for c, nu in zip(coeffs, dual):
        if c:
            acc = tower.add_codes(acc, tower.mul_codes(c, nu.code))
    return FieldElement(tower, acc)


def exhaustive_optimal_bandwidth(
    spec: CodeSpec, star_index: int, side: SideInfo
) -> int:
    """Minimum bandwidth over every valid linear repair scheme, by brute
    force over F_q-subspaces of the dual code.

    The bandwidth and the full-rank condition depend only on the F_q-span
    of the check polynomials, so enumerating (ell-s)-dimensional subspaces
    of the coefficient space F_q^(ell*r) visits every scheme exactly once
    up to bandwidth-preserving recombination.
    """
    tower = spec.tower
    ell, q, r = tower.ell, tower.q, spec.r
    s = side.s
    if tower.order > EXHAUSTIVE_FIELD_LIMIT or r > EXHAUSTIVE_REDUNDANCY_LIMIT:
        raise BudgetError(
            "exhaustive search restricted to fields of size "
            f"<= {EXHAUSTIVE_FIELD_LIMIT} and redundancy <= {EXHAUSTIVE_REDUNDANCY_LIMIT}"
        )
    if s == ell:
        return 0
    d = ell - s
    count = gaussian_binomial(ell * r, d, q)
    if count > 10**6:
        raise BudgetError(f"{count} dual-code subspaces exceed the search budget")

    side_codes = [b.code for b in side.elements]
    star = spec.points[star_index]
    helpers = [spec.points[j] for j in range(spec.n) if j != star_index]
    best: int | None = None
    for mat in _echelon_digit_matrices(q, ell * r, d):
        polys = []
        for row in mat:
            coeffs = [
                FieldElement(tower, tower.top_from_digits(row[t * ell : (t + 1) * ell]))
                for t in range(r)
            ]
            polys.append(coeffs)
        targets = [eval_poly(g, star).code for g in polys]
        if _rank_codes(tower, side_codes + targets) != ell:
            continue
        total = 0
        for pt in helpers:
            evals = [eval_poly(g, pt).code for g in polys]
            total += _rank_codes(tower, evals)
            if best is not None and total >= best:
                break
        if best is None or total < best:
            best = total
    if best is None:  # pragma: no cover
        raise AssertionError("no valid scheme found; full-rank completion must exist")
    return best
