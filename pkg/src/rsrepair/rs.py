"""Reed-Solomon codes over the tower's top field, with dual-code machinery.

A codeword is the evaluation of a message polynomial (degree < k) at n
distinct points.  The dual of RS(A, k) is the generalized RS code with
multipliers lambda_j = prod_{i != j} (alpha_j - alpha_i)^(-1); the standard
formula is not taken on faith but validated at construction by spot-checking
the duality identity sum_j g(alpha_j) * lambda_j * f(alpha_j) = 0 on random
polynomial pairs.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

from .fields import FieldElement, FieldError, FieldTower, make_tower, prime_power_split

_DUALITY_CHECKS = 10
_DUALITY_SEED = 0x52533031


def eval_poly(coeffs: Sequence[FieldElement], x: FieldElement) -> FieldElement:
    """Horner evaluation; an empty coefficient list is the zero polynomial."""
    acc = x.tower.zero
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def poly_degree(coeffs: Sequence[FieldElement]) -> int:
    for i in range(len(coeffs) - 1, -1, -1):
        if coeffs[i].code:
            return i
    return -1


def interpolate(
    points: Sequence[FieldElement], values: Sequence[FieldElement]
) -> list[FieldElement]:
    """Lagrange interpolation, used as the naive-repair / MDS oracle."""
    if len(points) != len(values):
        raise FieldError("points/values length mismatch")
    tower = points[0].tower
    n = len(points)
    coeffs = [tower.zero] * n
    for j in range(n):
        denom = tower.one
        basis = [tower.one]
        for i in range(n):
            if i == j:
                continue
            denom = denom * (points[j] - points[i])
            nxt = [tower.zero] * (len(basis) + 1)
            for d, c in enumerate(basis):
                nxt[d + 1] = nxt[d + 1] + c
                nxt[d] = nxt[d] - c * points[i]
            basis = nxt
        w = values[j] / denom
        for d in range(len(basis)):
            coeffs[d] = coeffs[d] + w * basis[d]
    return coeffs


@dataclass(frozen=True)
class CodeSpec:
    """RS(A, k) over the tower, with dual multipliers lambda attached."""

    tower: FieldTower
    n: int
    k: int
    points: tuple[FieldElement, ...]
    multipliers: tuple[FieldElement, ...]

    @property
    def r(self) -> int:
        return self.n - self.k

    @property
    def full_length(self) -> bool:
        return self.n == self.tower.order

    def to_json(self) -> dict:
        t = self.tower
        return {
            "p": t.p,
            "e": t.e,
            "ell": t.ell,
            "base_modulus": list(t.base_modulus),
            "top_modulus": [list(t.fq_digits(c)) for c in t.top_modulus],
            "n": self.n,
            "k": self.k,
            "points": [pt.text() for pt in self.points],
        }

    @classmethod
    def from_json(cls, payload: dict) -> "CodeSpec":
        p = payload["p"]
        tower = make_tower(
            p,
            payload["e"],
            payload["ell"],
            base_modulus=payload["base_modulus"],
            top_modulus=[_pack_base_p(p, row) for row in payload["top_modulus"]],
        )
        points = [tower.from_text(t) for t in payload["points"]]
        return make_code(tower, payload["n"], payload["k"], points=points)


def _pack_base_p(p: int, digits: Sequence[int]) -> int:
    value = 0
    for d in reversed(digits):
        value = value * p + d
    return value


@dataclass
class Codeword:
    """Symbols of one codeword; the message polynomial is retained for test
    oracles only and is never read by repair operations."""

    spec: CodeSpec
    symbols: tuple[FieldElement, ...]
    message_poly: tuple[FieldElement, ...] | None = field(default=None)

    def to_json(self) -> dict:
        return {
            "code": self.spec.to_json(),
            "symbols": [s.text() for s in self.symbols],
        }


def make_code(
    tower: FieldTower,
    n: int,
    k: int,
    points: Sequence[FieldElement] | None = None,
) -> CodeSpec:
    """Build a validated RS(A, k).

    When ``points`` is omitted the first n field elements in code order are
    used, which for n = q^ell is the full evaluation set A = F_(q^ell).
    """
    if not 1 <= k < n <= tower.order:
        raise FieldError(f"need 1 <= k < n <= {tower.order}, got k={k} n={n}")
    if points is None:
        pts = tuple(tower.element(c) for c in range(n))
    else:
        pts = tuple(points)
        if len(pts) != n:
            raise FieldError("evaluation point count differs from n")
        for pt in pts:
            if pt.tower != tower:
                raise FieldError("evaluation point from a different tower")
        if len({pt.code for pt in pts}) != n:
            raise FieldError("duplicate evaluation points")

    if n == tower.order:
        # Full length: prod_{i != j}(alpha_j - alpha_i) runs over all of
        # F*, whose product is -1, so every multiplier is -1.
        lam = tuple(-tower.one for _ in range(n))
    else:
        multipliers = []
        for j in range(n):
            prod = tower.one
            for i in range(n):
                if i != j:
                    prod = prod * (pts[j] - pts[i])
            multipliers.append(prod.inverse())
        lam = tuple(multipliers)

    spec = CodeSpec(tower=tower, n=n, k=k, points=pts, multipliers=lam)
    _validate_duality(spec)
    return spec


def _validate_duality(spec: CodeSpec) -> None:
    rng = random.Random(_DUALITY_SEED + spec.n * 1009 + spec.k)
    tower = spec.tower
    for _ in range(_DUALITY_CHECKS):
        f = [tower.element(rng.randrange(tower.order)) for _ in range(spec.k)]
        g = [tower.element(rng.randrange(tower.order)) for _ in range(spec.r)]
        acc = tower.zero
        for pt, lam in zip(spec.points, spec.multipliers):
            acc = acc + eval_poly(g, pt) * lam * eval_poly(f, pt)
        if acc.code:
            raise FieldError("dual multiplier validation failed")


def encode(spec: CodeSpec, message: Sequence[FieldElement]) -> Codeword:
    if len(message) != spec.k:
        raise FieldError(f"message must have {spec.k} coefficients")
    symbols = tuple(eval_poly(message, pt) for pt in spec.points)
    return Codeword(spec=spec, symbols=symbols, message_poly=tuple(message))


def check_identity(
    spec: CodeSpec, g_coeffs: Sequence[FieldElement], codeword: Codeword
) -> FieldElement:
    """Residual sum_j g(alpha_j) * lambda_j * c_j; zero for valid codewords."""
    if poly_degree(g_coeffs) >= spec.r:
        raise FieldError(f"check polynomial degree must be < {spec.r}")
    acc = spec.tower.zero
    for pt, lam, sym in zip(spec.points, spec.multipliers, codeword.symbols):
        acc = acc + eval_poly(g_coeffs, pt) * lam * sym
    return acc
