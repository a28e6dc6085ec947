"""Exact arithmetic in a finite field tower F_p < F_q < F_(q^ell), q = p^e.

An element of the top field is a polynomial of degree < ell over F_q
(reduced modulo a fixed irreducible), and each F_q coefficient is itself a
polynomial of degree < e over F_p.  Elements are stored as a single integer
code: the base-p packing of all coefficient digits, least significant digit
first.  With that packing the code of a subfield constant c in the top
field equals the F_q code of c, so scalars embed for free, and for p = 2
addition of codes is plain XOR.

Multiplication, inversion and traces are driven by discrete-log tables for
fields with at most ``TABLE_SIZE_LIMIT`` elements; larger fields fall back
to direct polynomial arithmetic.  Towers and elements are immutable, all
operations are pure functions.
"""

from __future__ import annotations

import json
from typing import Iterator, Sequence

import numpy as np

TOWER_SIZE_LIMIT = 1 << 20
TABLE_SIZE_LIMIT = 1 << 16


class FieldError(ValueError):
    """Invalid tower construction or field operation."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division (fine for n <= 2**20)."""
    factors: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            factors[d] = factors.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        factors[n] = factors.get(n, 0) + 1
    return factors


def prime_power_split(q: int) -> tuple[int, int]:
    """Return (p, e) with q = p**e, or raise if q is not a prime power."""
    factors = factorize(q)
    if len(factors) != 1:
        raise FieldError(f"{q} is not a prime power")
    ((p, e),) = factors.items()
    return p, e


# ---------------------------------------------------------------------------
# Polynomials over F_p: tuples of ints in [0, p), low degree first, trimmed.
# ---------------------------------------------------------------------------

def _pp_trim(c: list[int]) -> tuple[int, ...]:
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def _pp_add(a: Sequence[int], b: Sequence[int], p: int) -> tuple[int, ...]:
    n = max(len(a), len(b))
    out = [0] * n
    for i in range(n):
        x = a[i] if i < len(a) else 0
        y = b[i] if i < len(b) else 0
        out[i] = (x + y) % p
    return _pp_trim(out)


def _pp_mul(a: Sequence[int], b: Sequence[int], p: int) -> tuple[int, ...]:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _pp_trim(out)


def _pp_divmod(
    a: Sequence[int], b: Sequence[int], p: int
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(a)
    quot = [0] * max(len(a) - len(b) + 1, 0)
    inv_lead = pow(b[-1], p - 2, p) if p > 2 else b[-1]
    while len(rem) >= len(b) and any(rem):
        while rem and rem[-1] == 0:
            rem.pop()
        if len(rem) < len(b):
            break
        shift = len(rem) - len(b)
        factor = (rem[-1] * inv_lead) % p
        quot[shift] = factor
        for j, c in enumerate(b):
            rem[shift + j] = (rem[shift + j] - factor * c) % p
    return _pp_trim(quot), _pp_trim(rem)


def _pp_irreducible(f: Sequence[int], p: int) -> bool:
    """Exhaustive trial division by all monic polynomials up to deg(f)//2."""
    d = len(f) - 1
    if d <= 0 or f[-1] == 0:
        return False
    if d == 1:
        return True
    for t in range(1, d // 2 + 1):
        for idx in range(p**t):
            div = _digits(idx, p, t) + (1,)
            _, rem = _pp_divmod(f, div, p)
            if not rem:
                return False
    return True


def _digits(value: int, base: int, width: int) -> tuple[int, ...]:
    out = []
    for _ in range(width):
        out.append(value % base)
        value //= base
    return tuple(out)


def _pack(digits: Sequence[int], base: int) -> int:
    value = 0
    for d in reversed(digits):
        value = value * base + d
    return value


def _smallest_irreducible_fp(p: int, d: int) -> tuple[int, ...]:
    """Smallest monic irreducible of degree d over F_p with nonzero constant
    term, ordering candidates by their coefficient code (high digits most
    significant)."""
    for idx in range(1, p**d):
        if idx % p == 0:
            continue
        cand = _digits(idx, p, d) + (1,)
        if _pp_irreducible(cand, p):
            return cand
    raise FieldError(f"no irreducible of degree {d} over F_{p}")  # pragma: no cover


class FieldTower:
    """The pair F_q in F_(q^ell) with fixed moduli and precomputed tables.

    Attributes ``p``, ``e``, ``ell``, ``q`` (= p**e), ``order`` (= q**ell),
    ``base_modulus`` (monic, degree e, F_p coefficients low first) and
    ``top_modulus`` (monic, degree ell, F_q codes low first) are public and
    immutable.
    """

    def __init__(
        self,
        p: int,
        e: int = 1,
        ell: int = 1,
        base_modulus: Sequence[int] | None = None,
        top_modulus: Sequence[int] | None = None,
    ):
        if not is_prime(p):
            raise FieldError(f"p = {p} is not prime")
        if e < 1 or ell < 1:
            raise FieldError("extension degrees must be >= 1")
        q = p**e
        order = q**ell
        if order > TOWER_SIZE_LIMIT:
            raise FieldError(
                f"field size q^ell = {order} exceeds the budget {TOWER_SIZE_LIMIT}"
            )
        self.p = p
        self.e = e
        self.ell = ell
        self.q = q
        self.order = order

        if base_modulus is not None:
            bm = tuple(int(c) % p for c in base_modulus)
            if len(bm) != e + 1 or bm[-1] != 1:
                raise FieldError("base modulus must be monic of degree e")
            if not _pp_irreducible(bm, p):
                raise FieldError("supplied base modulus is reducible")
            self.base_modulus = bm
        else:
            self.base_modulus = _smallest_irreducible_fp(p, e)

        # F_q multiplicative tables (always available: q <= 2**20 and the
        # table is 1-D).  For q above TABLE_SIZE_LIMIT (only possible when
        # ell == 1) multiplication falls back to polynomial arithmetic.
        self.has_fq_tables = q <= TABLE_SIZE_LIMIT
        if self.has_fq_tables:
            self._build_fq_tables()

        if top_modulus is not None:
            tm = tuple(int(c) % q for c in top_modulus)
            if len(tm) != ell + 1 or tm[-1] != 1:
                raise FieldError("top modulus must be monic of degree ell")
            if not self._tq_irreducible(tm):
                raise FieldError("supplied top modulus is reducible over F_q")
            self.top_modulus = tm
        else:
            self.top_modulus = self._smallest_irreducible_fq(ell)

        self.has_top_tables = order <= TABLE_SIZE_LIMIT
        if self.has_top_tables:
            self._build_top_tables()

        self._key = (p, e, ell, self.base_modulus, self.top_modulus)
        self._hash = hash(self._key)

    # -- identity ----------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FieldTower) and self._key == other._key

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"FieldTower(p={self.p}, e={self.e}, ell={self.ell})"

    # -- F_q arithmetic on codes in [0, q) ----------------------------------

    def _fq_mul_poly(self, a: int, b: int) -> int:
        p, e = self.p, self.e
        prod = _pp_mul(_digits(a, p, e), _digits(b, p, e), p)
        _, rem = _pp_divmod(prod, self.base_modulus, p)
        return _pack(rem + (0,) * (e - len(rem)), p)

    def _fq_pow_poly(self, a: int, n: int) -> int:
        result, base = 1, a
        while n:
            if n & 1:
                result = self._fq_mul_poly(result, base)
            base = self._fq_mul_poly(base, base)
            n >>= 1
        return result

    def _build_fq_tables(self) -> None:
        q = self.q
        if q == 2:
            gen = 1
        else:
            group = q - 1
            prime_divs = list(factorize(group))
            gen = 0
            for cand in range(2, q):
                if all(
                    self._fq_pow_poly(cand, group // r) != 1 for r in prime_divs
                ):
                    gen = cand
                    break
            if not gen:  # pragma: no cover
                raise FieldError("no F_q generator found")
        exp = [1] * (q - 1)
        for i in range(1, q - 1):
            exp[i] = self._fq_mul_poly(exp[i - 1], gen)
        log = [-1] * q
        for i, v in enumerate(exp):
            log[v] = i
        self._fq_exp = exp + exp  # doubled: no modular reduction on lookup
        self._fq_log = log
        self._fq_generator = gen
        self.np_fq_exp = np.asarray(self._fq_exp, dtype=np.int32)
        self.np_fq_log = np.asarray(self._fq_log, dtype=np.int32)
        inv = [0] * q
        neg = [0] * q
        for a in range(1, q):
            inv[a] = exp[(q - 1 - log[a]) % (q - 1)]
        for a in range(q):
            neg[a] = self.fq_neg(a)
        self._fq_inv = inv
        self._fq_neg = neg
        self.np_fq_inv = np.asarray(inv, dtype=np.int32)
        self.np_fq_neg = np.asarray(neg, dtype=np.int32)

    def fq_add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        p, e = self.p, self.e
        out, shift = 0, 1
        for _ in range(e):
            out += ((a % p + b % p) % p) * shift
            a //= p
            b //= p
            shift *= p
        return out

    def fq_neg(self, a: int) -> int:
        if self.p == 2:
            return a
        p, e = self.p, self.e
        out, shift = 0, 1
        for _ in range(e):
            out += ((p - a % p) % p) * shift
            a //= p
            shift *= p
        return out

    def fq_sub(self, a: int, b: int) -> int:
        return self.fq_add(a, self.fq_neg(b))

    def fq_mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self.has_fq_tables:
            return self._fq_exp[self._fq_log[a] + self._fq_log[b]]
        return self._fq_mul_poly(a, b)

    def fq_inv(self, a: int) -> int:
        if a == 0:
            raise FieldError("inversion of zero in F_q")
        if self.has_fq_tables:
            return self._fq_inv[a]
        return self._fq_pow_poly(a, self.q - 2)

    def fq_digits(self, a: int) -> tuple[int, ...]:
        return _digits(a, self.p, self.e)

    def fq_from_digits(self, digits: Sequence[int]) -> int:
        if len(digits) != self.e or any(d < 0 or d >= self.p for d in digits):
            raise FieldError("bad F_q digit vector")
        return _pack(digits, self.p)

    # -- polynomials over F_q: tuples of codes, used for the top modulus ----

    def _tq_divmod(
        self, a: Sequence[int], b: Sequence[int]
    ) -> tuple[tuple[int, ...], tuple[int, ...]]:
        rem = list(a)
        quot = [0] * max(len(a) - len(b) + 1, 0)
        inv_lead = self.fq_inv(b[-1])
        while True:
            while rem and rem[-1] == 0:
                rem.pop()
            if len(rem) < len(b):
                break
            shift = len(rem) - len(b)
            factor = self.fq_mul(rem[-1], inv_lead)
            quot[shift] = factor
            for j, c in enumerate(b):
                rem[shift + j] = self.fq_sub(rem[shift + j], self.fq_mul(factor, c))
        while quot and quot[-1] == 0:
            quot.pop()
        return tuple(quot), tuple(rem)

    def _tq_irreducible(self, f: Sequence[int]) -> bool:
        d = len(f) - 1
        if d <= 0 or f[-1] == 0:
            return False
        if d == 1:
            return True
        q = self.q
        for t in range(1, d // 2 + 1):
            for idx in range(q**t):
                div = _digits(idx, q, t) + (1,)
                _, rem = self._tq_divmod(f, div)
                if not rem:
                    return False
        return True

    def _smallest_irreducible_fq(self, d: int) -> tuple[int, ...]:
        q = self.q
        for idx in range(1, q**d):
            if idx % q == 0:
                continue
            cand = _digits(idx, q, d) + (1,)
            if self._tq_irreducible(cand):
                return cand
        raise FieldError(  # pragma: no cover
            f"no irreducible of degree {d} over F_{q}"
        )

    # -- top field arithmetic on codes in [0, order) ------------------------

    def top_digits(self, a: int) -> tuple[int, ...]:
        return _digits(a, self.q, self.ell)

    def top_from_digits(self, digits: Sequence[int]) -> int:
        if len(digits) != self.ell or any(d < 0 or d >= self.q for d in digits):
            raise FieldError("bad coordinate vector")
        return _pack(digits, self.q)

    def add_codes(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        p = self.p
        out, shift = 0, 1
        for _ in range(self.e * self.ell):
            out += ((a % p + b % p) % p) * shift
            a //= p
            b //= p
            shift *= p
        return out

    def neg_code(self, a: int) -> int:
        if self.p == 2:
            return a
        p = self.p
        out, shift = 0, 1
        for _ in range(self.e * self.ell):
            out += ((p - a % p) % p) * shift
            a //= p
            shift *= p
        return out

    def sub_codes(self, a: int, b: int) -> int:
        return self.add_codes(a, self.neg_code(b))

    def _top_mul_poly(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        ell, q = self.ell, self.q
        da, db = self.top_digits(a), self.top_digits(b)
        prod = [0] * (2 * ell - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    if y:
                        prod[i + j] = self.fq_add(prod[i + j], self.fq_mul(x, y))
        mod = self.top_modulus
        for idx in range(2 * ell - 2, ell - 1, -1):
            c = prod[idx]
            if c:
                prod[idx] = 0
                for j in range(ell):
                    prod[idx - ell + j] = self.fq_sub(
                        prod[idx - ell + j], self.fq_mul(c, mod[j])
                    )
        return _pack(prod[:ell], q)

    def _top_pow_poly(self, a: int, n: int) -> int:
        result, base = 1, a
        while n:
            if n & 1:
                result = self._top_mul_poly(result, base)
            base = self._top_mul_poly(base, base)
            n >>= 1
        return result

    def _find_primitive(self) -> int:
        """Smallest code of multiplicative order q^ell - 1."""
        group = self.order - 1
        if group == 1:
            return 1
        prime_divs = list(factorize(group))
        for cand in range(2, self.order):
            if all(self._top_pow_poly(cand, group // r) != 1 for r in prime_divs):
                return cand
        raise FieldError("no primitive element found")  # pragma: no cover

    def _build_top_tables(self) -> None:
        n = self.order
        xi = self._find_primitive()
        exp = [1] * (n - 1)
        for i in range(1, n - 1):
            exp[i] = self._top_mul_poly(exp[i - 1], xi)
        log = [-1] * n
        for i, v in enumerate(exp):
            log[v] = i
        self._top_exp = exp + exp
        self._top_log = log
        self._primitive = xi
        self.np_top_exp = np.asarray(self._top_exp, dtype=np.int64)
        self.np_top_log = np.asarray(self._top_log, dtype=np.int64)
        # Trace table: Tr(a) = sum of a^(q^i), i = 0..ell-1, an F_q code.
        trace = [0] * n
        for a in range(1, n):
            acc, b = a, a
            for _ in range(self.ell - 1):
                b = self.frob_code(b)
                acc = self.add_codes(acc, b)
            if acc >= self.q:  # pragma: no cover
                raise FieldError("trace left the base field")
            trace[a] = acc
        self._trace = trace

    def mul_codes(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self.has_top_tables:
            return self._top_exp[self._top_log[a] + self._top_log[b]]
        return self._top_mul_poly(a, b)

    def inv_code(self, a: int) -> int:
        if a == 0:
            raise FieldError("inversion of zero")
        if self.has_top_tables:
            n = self.order - 1
            return self._top_exp[(n - self._top_log[a]) % n]
        return self._top_pow_poly(a, self.order - 2)

    def pow_code(self, a: int, n: int) -> int:
        """Square-and-multiply; negative exponents invert first."""
        if n < 0:
            return self.pow_code(self.inv_code(a), -n)
        if a == 0:
            return 0 if n else 1
        if n >= self.order:
            n %= self.order - 1
        result, base = 1, a
        while n:
            if n & 1:
                result = self.mul_codes(result, base)
            base = self.mul_codes(base, base)
            n >>= 1
        return result

    def frob_code(self, a: int) -> int:
        if a == 0:
            return 0
        if self.has_top_tables:
            n = self.order - 1
            return self._top_exp[(self._top_log[a] * self.q) % n]
        return self._top_pow_poly(a, self.q)

    def trace_code(self, a: int) -> int:
        if self.has_top_tables:
            return self._trace[a]
        acc, b = a, a
        for _ in range(self.ell - 1):
            b = self.frob_code(b)
            acc = self.add_codes(acc, b)
        return acc

    # -- element construction ------------------------------------------------

    def element(self, code: int) -> "FieldElement":
        if code < 0 or code >= self.order:
            raise FieldError(f"code {code} out of range")
        return FieldElement(self, code)

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(self, 0)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(self, 1)

    def from_coeffs(self, coeffs: Sequence[Sequence[int]]) -> "FieldElement":
        """Element from ell rows of e base-p digits, low degree first."""
        if len(coeffs) != self.ell:
            raise FieldError(f"expected {self.ell} coefficients")
        codes = [self.fq_from_digits(row) for row in coeffs]
        return FieldElement(self, self.top_from_digits(codes))

    def from_text(self, text: str) -> "FieldElement":
        head, _, body = text.partition(":")
        params = dict(kv.split("=") for kv in head.split(","))
        if int(params["q"]) != self.q or int(params["ell"]) != self.ell:
            raise FieldError(f"element text {text!r} does not match {self!r}")
        return self.from_coeffs(json.loads(body))

    def elements(self) -> Iterator["FieldElement"]:
        for code in range(self.order):
            yield FieldElement(self, code)

    def primitive_element(self) -> "FieldElement":
        if self.has_top_tables:
            return FieldElement(self, self._primitive)
        return FieldElement(self, self._find_primitive())

    # -- trace duality and subfields ----------------------------------------

    def dual_basis(self, basis: Sequence["FieldElement"]) -> list["FieldElement"]:
        """Trace-dual basis: returns nu with Tr(basis[i] * nu[j]) = delta_ij.

        Inverts the ell x ell Gram matrix G[i][j] = Tr(b_i b_j) over F_q;
        a singular Gram matrix means the input was not a basis.
        """
        ell = self.ell
        if len(basis) != ell:
            raise FieldError(f"dual basis needs exactly {ell} elements")
        codes = [b.code for b in basis]
        gram = [
            [self.trace_code(self.mul_codes(bi, bj)) for bj in codes]
            for bi in codes
        ]
        inverse = self._fq_matrix_inverse(gram)
        out = []
        for j in range(ell):
            acc = 0
            for k in range(ell):
                if inverse[k][j]:
                    acc = self.add_codes(acc, self.mul_codes(inverse[k][j], codes[k]))
            out.append(FieldElement(self, acc))
        return out

    def _fq_matrix_inverse(self, mat: list[list[int]]) -> list[list[int]]:
        n = len(mat)
        aug = [list(row) + [int(i == j) for j in range(n)] for i, row in enumerate(mat)]
        for col in range(n):
            pivot = next((r for r in range(col, n) if aug[r][col]), None)
            if pivot is None:
                raise FieldError("not a basis (singular Gram matrix)")
            aug[col], aug[pivot] = aug[pivot], aug[col]
            inv = self.fq_inv(aug[col][col])
            aug[col] = [self.fq_mul(inv, v) for v in aug[col]]
            for r in range(n):
                if r != col and aug[r][col]:
                    f = aug[r][col]
                    aug[r] = [
                        self.fq_sub(v, self.fq_mul(f, w))
                        for v, w in zip(aug[r], aug[col])
                    ]
        return [row[n:] for row in aug]

    def subfield_elements(self, a: int) -> list["FieldElement"]:
        """All q^a elements of the unique subfield F_(q^a), a | ell."""
        if a < 1 or self.ell % a != 0:
            raise FieldError(f"{a} does not divide ell = {self.ell}")
        if a == self.ell:
            return [FieldElement(self, c) for c in range(self.order)]
        group = self.order - 1
        step = group // (self.q**a - 1)
        if self.has_top_tables:
            codes = {self._top_exp[(i * step) % group] for i in range(self.q**a - 1)}
        else:
            xi = self._find_primitive()
            base = self._top_pow_poly(xi, step)
            codes, cur = set(), 1
            for _ in range(self.q**a - 1):
                codes.add(cur)
                cur = self._top_mul_poly(cur, base)
        codes.add(0)
        return [FieldElement(self, c) for c in sorted(codes)]


class FieldElement:
    """Immutable element of a tower's top field, identified by its code."""

    __slots__ = ("tower", "code")

    def __init__(self, tower: FieldTower, code: int):
        self.tower = tower
        self.code = code

    def _coerce(self, other: object) -> int:
        if isinstance(other, FieldElement):
            if other.tower != self.tower:
                raise FieldError("elements from different towers")
            return other.code
        raise TypeError(f"cannot combine FieldElement with {type(other).__name__}")

    def __add__(self, other: "FieldElement") -> "FieldElement":
        return FieldElement(self.tower, self.tower.add_codes(self.code, self._coerce(other)))

    def __sub__(self, other: "FieldElement") -> "FieldElement":
        return FieldElement(self.tower, self.tower.sub_codes(self.code, self._coerce(other)))

    def __neg__(self) -> "FieldElement":
        return FieldElement(self.tower, self.tower.neg_code(self.code))

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        return FieldElement(self.tower, self.tower.mul_codes(self.code, self._coerce(other)))

    def __truediv__(self, other: "FieldElement") -> "FieldElement":
        return FieldElement(
            self.tower,
            self.tower.mul_codes(self.code, self.tower.inv_code(self._coerce(other))),
        )

    def __pow__(self, n: int) -> "FieldElement":
        return FieldElement(self.tower, self.tower.pow_code(self.code, n))

    def inverse(self) -> "FieldElement":
        return FieldElement(self.tower, self.tower.inv_code(self.code))

    def frobenius(self, times: int = 1) -> "FieldElement":
        code = self.code
        if code:
            for _ in range(times % self.tower.ell):
                code = self.tower.frob_code(code)
        return FieldElement(self.tower, code)

    def trace(self) -> int:
        """Trace down to F_q, returned as an F_q code in [0, q)."""
        return self.tower.trace_code(self.code)

    def __bool__(self) -> bool:
        return self.code != 0

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, FieldElement)
            and self.code == other.code
            and self.tower == other.tower
        )

    def __hash__(self) -> int:
        return hash((self.code, self.tower._hash))

    @property
    def coeffs(self) -> tuple[tuple[int, ...], ...]:
        return tuple(
            self.tower.fq_digits(c) for c in self.tower.top_digits(self.code)
        )

    def text(self) -> str:
        body = json.dumps([list(row) for row in self.coeffs], separators=(",", ":"))
        return f"q={self.tower.q},ell={self.tower.ell}:{body}"

    def __repr__(self) -> str:
        return f"<{self.text()}>"


def make_tower(
    p: int,
    e: int = 1,
    ell: int = 1,
    base_modulus: Sequence[int] | None = None,
    top_modulus: Sequence[int] | None = None,
) -> FieldTower:
    """Build a validated tower; omitted moduli are chosen deterministically
    (smallest monic irreducible with nonzero constant term)."""
    return FieldTower(p, e, ell, base_modulus=base_modulus, top_modulus=top_modulus)
