"""F_q-linear algebra on the top field viewed as the vector space F_q^ell.

Subspaces are kept in canonical reduced-row-echelon form (pivot columns
scanned from coordinate 0 upward), so two ``Subspace`` values are equal iff
they describe the same set of elements.  Enumeration orders are fixed:
pivot-column tuples ascending, then free entries in row-major base-q order,
which makes every search in the package reproducible.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import _kern
from .fields import FieldElement, FieldError, FieldTower

ENUMERATION_BUDGET = 10**6


class BudgetError(ValueError):
    """An enumeration would exceed the configured search budget."""


def gaussian_binomial(ell: int, d: int, q: int) -> int:
    """Number of d-dimensional F_q-subspaces of F_q^ell."""
    if d < 0 or d > ell:
        return 0
    num = den = 1
    for i in range(d):
        num *= q ** (ell - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


# -- internal elimination ---------------------------------------------------

def _rows_from_codes(tower: FieldTower, codes: Iterable[int]) -> list[list[int]]:
    return [list(tower.top_digits(c)) for c in codes]


def _rref_rows(tower: FieldTower, rows: list[list[int]]) -> list[tuple[int, ...]]:
    """Reduced row echelon form over F_q; returns nonzero rows, pivots
    ascending, pivot entries 1, zeros above and below each pivot."""
    ell = tower.ell
    rank = 0
    for col in range(ell):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][col]), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = tower.fq_inv(rows[rank][col])
        if inv != 1:
            rows[rank] = [tower.fq_mul(inv, v) for v in rows[rank]]
        prow = rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r][col]:
                f = rows[r][col]
                rows[r] = [
                    tower.fq_sub(v, tower.fq_mul(f, w))
                    for v, w in zip(rows[r], prow)
                ]
        rank += 1
        if rank == len(rows):
            break
    return [tuple(r) for r in rows[:rank]]


def _rank_codes(tower: FieldTower, codes: Sequence[int]) -> int:
    if not codes:
        return 0
    if tower.has_fq_tables:
        if _kern.native is not None:
            return _kern.native.rank_codes(
                np.asarray(codes, dtype=np.int64),
                tower.q,
                tower.p,
                tower.e,
                tower.ell,
                tower.np_fq_exp,
                tower.np_fq_log,
                tower.np_fq_inv,
                tower.np_fq_neg,
            )
        return _kern.pyref.rank_codes(
            codes,
            tower.q,
            tower.p,
            tower.e,
            tower.ell,
            tower._fq_exp,
            tower._fq_log,
            tower._fq_inv,
            tower._fq_neg,
        )
    rows = _rows_from_codes(tower, codes)
    return len(_rref_rows(tower, rows))


def _sum_scaled_intersections(
    tower: FieldTower,
    t_codes: Sequence[int],
    w_codes: Sequence[int],
    gammas: Sequence[int],
) -> int:
    """Sum over gamma of dim(gamma*T intersect W), basis codes given."""
    if not gammas:
        return 0
    if tower.has_top_tables and tower.has_fq_tables:
        args = (tower.q, tower.p, tower.e, tower.ell)
        if _kern.native is not None:
            return _kern.native.sum_scaled_intersections(
                np.asarray(t_codes, dtype=np.int64),
                np.asarray(w_codes, dtype=np.int64),
                np.asarray(gammas, dtype=np.int64),
                *args,
                tower.np_top_exp,
                tower.np_top_log,
                tower.np_fq_exp,
                tower.np_fq_log,
                tower.np_fq_inv,
                tower.np_fq_neg,
            )
        return _kern.pyref.sum_scaled_intersections(
            t_codes,
            w_codes,
            gammas,
            *args,
            tower._top_exp,
            tower._top_log,
            tower._fq_exp,
            tower._fq_log,
            tower._fq_inv,
            tower._fq_neg,
        )
    total = 0
    for g in gammas:
        scaled = [tower.mul_codes(g, c) for c in t_codes]
        r = _rank_codes(tower, scaled + list(w_codes))
        total += len(t_codes) + len(w_codes) - r
    return total


def _check_same_tower(tower: FieldTower, elems: Iterable[FieldElement]) -> None:
    for el in elems:
        if el.tower != tower:
            raise FieldError("elements from mixed towers")


class Subspace:
    """An F_q-subspace of the top field in canonical echelon basis form."""

    __slots__ = ("tower", "codes")

    def __init__(self, tower: FieldTower, canonical_codes: tuple[int, ...]):
        self.tower = tower
        self.codes = canonical_codes

    @property
    def dim(self) -> int:
        return len(self.codes)

    @property
    def basis(self) -> tuple[FieldElement, ...]:
        return tuple(FieldElement(self.tower, c) for c in self.codes)

    def elements(self) -> Iterator[FieldElement]:
        """All q^dim elements, in deterministic combination order."""
        tower = self.tower
        combos = [0]
        for c in self.codes:
            scaled = [tower.mul_codes(s, c) for s in range(1, tower.q)]
            combos = combos + [tower.add_codes(x, s) for s in scaled for x in combos]
        for code in combos:
            yield FieldElement(tower, code)

    def __contains__(self, elem: FieldElement) -> bool:
        if elem.tower != self.tower:
            return False
        if elem.code == 0:
            return True
        return _rank_codes(self.tower, list(self.codes) + [elem.code]) == self.dim

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Subspace)
            and self.codes == other.codes
            and self.tower == other.tower
        )

    def __hash__(self) -> int:
        return hash((self.codes, self.tower))

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, basis={[b.text() for b in self.basis]})"

    def to_json(self) -> dict:
        return {"dim": self.dim, "basis": [b.text() for b in self.basis]}

    @classmethod
    def from_json(cls, tower: FieldTower, payload: dict) -> "Subspace":
        elems = [tower.from_text(t) for t in payload["basis"]]
        sub = span(tower, elems)
        if sub.dim != payload["dim"]:
            raise FieldError("subspace payload dimension mismatch")
        return sub


def rank_of(tower: FieldTower, elems: Sequence[FieldElement]) -> int:
    """F_q-rank of a list of elements (empty list allowed)."""
    _check_same_tower(tower, elems)
    return _rank_codes(tower, [el.code for el in elems])


def span(tower: FieldTower, elems: Sequence[FieldElement]) -> Subspace:
    """Canonical subspace spanned by the given elements."""
    _check_same_tower(tower, elems)
    rows = _rows_from_codes(tower, (el.code for el in elems))
    canonical = _rref_rows(tower, rows)
    return Subspace(tower, tuple(tower.top_from_digits(r) for r in canonical))


def scale(gamma: FieldElement, space: Subspace) -> Subspace:
    """The subspace gamma * V; gamma must be nonzero (dim is preserved)."""
    if gamma.code == 0:
        raise FieldError("scaling a subspace by zero")
    tower = space.tower
    if gamma.tower != tower:
        raise FieldError("elements from mixed towers")
    scaled = [tower.mul_codes(gamma.code, c) for c in space.codes]
    rows = _rows_from_codes(tower, scaled)
    canonical = _rref_rows(tower, rows)
    return Subspace(tower, tuple(tower.top_from_digits(r) for r in canonical))


def intersect_dim(u: Subspace, v: Subspace) -> int:
    """dim(U intersect V) = dim U + dim V - rank(U basis ++ V basis)."""
    if u.tower != v.tower:
        raise FieldError("subspaces from mixed towers")
    joint = _rank_codes(u.tower, list(u.codes) + list(v.codes))
    return u.dim + v.dim - joint


def complete_basis(
    side: Subspace, t_prime: Subspace
) -> tuple[FieldElement, Subspace]:
    """First nonzero delta (ascending code order) with S + delta*T' a direct
    sum equal to the whole field; returns (delta, delta*T').

    Existence is a counting fact for dim S + dim T' = ell; exhausting the
    scan would therefore indicate a bug and raises.
    """
    tower = side.tower
    if t_prime.tower != tower:
        raise FieldError("subspaces from mixed towers")
    ell = tower.ell
    if side.dim + t_prime.dim != ell:
        raise FieldError(
            f"dimension mismatch: {side.dim} + {t_prime.dim} != {ell}"
        )
    side_codes = list(side.codes)
    for delta in range(1, tower.order):
        scaled = [tower.mul_codes(delta, c) for c in t_prime.codes]
        if _rank_codes(tower, side_codes + scaled) == ell:
            el = FieldElement(tower, delta)
            return el, scale(el, t_prime)
    raise AssertionError("no completing scalar exists; basis completion is broken")


def _echelon_digit_matrices(
    q: int, ncols: int, d: int
) -> Iterator[tuple[tuple[int, ...], ...]]:
    """Every d x ncols reduced-echelon matrix over F_q, exactly once.

    Order: pivot-column tuples ascending, then free entries in row-major
    base-q order (most significant digit first).
    """
    if d == 0:
        yield ()
        return
    for pivots in itertools.combinations(range(ncols), d):
        free_cells = [
            (r, c)
            for r in range(d)
            for c in range(pivots[r] + 1, ncols)
            if c not in pivots
        ]
        nfree = len(free_cells)
        for idx in range(q**nfree):
            mat = [[0] * ncols for _ in range(d)]
            for r, p_col in enumerate(pivots):
                mat[r][p_col] = 1
            rem = idx
            for cell in range(nfree - 1, -1, -1):
                r, c = free_cells[cell]
                mat[r][c] = rem % q
                rem //= q
            yield tuple(tuple(row) for row in mat)


def enumerate_subspaces(tower: FieldTower, d: int) -> Iterator[Subspace]:
    """All d-dimensional subspaces in canonical echelon order."""
    ell = tower.ell
    if d < 0 or d > ell:
        raise FieldError(f"dimension {d} out of range 0..{ell}")
    count = gaussian_binomial(ell, d, tower.q)
    if count > ENUMERATION_BUDGET:
        raise BudgetError(
            f"{count} subspaces exceed the enumeration budget {ENUMERATION_BUDGET}"
        )
    for mat in _echelon_digit_matrices(tower.q, ell, d):
        yield Subspace(tower, tuple(tower.top_from_digits(row) for row in mat))


def enumerate_complements(side: Subspace) -> Iterator[Subspace]:
    """All T with dim T = ell - dim S and S + T the whole field (direct sum).

    A fixed complement T0 is read off the non-pivot coordinates of S; every
    complement is the graph of a unique F_q-linear map T0 -> S, so exactly
    q^(s*(ell-s)) subspaces are produced, each once.
    """
    tower = side.tower
    ell, q = tower.ell, tower.q
    s = side.dim
    co_dim = ell - s
    count = q ** (s * co_dim)
    if count > ENUMERATION_BUDGET:
        raise BudgetError(
            f"{count} complements exceed the enumeration budget {ENUMERATION_BUDGET}"
        )
    srows = [tower.top_digits(c) for c in side.codes]
    pivots = []
    for row in srows:
        pivots.append(next(c for c in range(ell) if row[c]))
    free_coords = [c for c in range(ell) if c not in pivots]
    t0 = [tower.top_from_digits([int(i == c) for i in range(ell)]) for c in free_coords]
    side_codes = list(side.codes)
    ncells = s * co_dim
    for idx in range(count):
        rem = idx
        coeffs = [0] * ncells
        for cell in range(ncells - 1, -1, -1):
            coeffs[cell] = rem % q
            rem //= q
        rows = []
        for i in range(co_dim):
            acc = t0[i]
            for j in range(s):
                c = coeffs[i * s + j]
                if c:
                    acc = tower.add_codes(acc, tower.mul_codes(c, side_codes[j]))
            rows.append(acc)
        canonical = _rref_rows(tower, _rows_from_codes(tower, rows))
        yield Subspace(tower, tuple(tower.top_from_digits(r) for r in canonical))
