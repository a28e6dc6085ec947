import random

import pytest

from rsrepair.fields import FieldError, make_tower
from rsrepair.rs import (
    Codeword,
    CodeSpec,
    check_identity,
    encode,
    eval_poly,
    interpolate,
    make_code,
    poly_degree,
)


def test_full_length_default_points(t16, code16):
    assert code16.n == 16
    assert [pt.code for pt in code16.points] == list(range(16))
    assert code16.full_length


def test_explicit_multipliers_tiny_code(t4):
    spec = make_code(t4, 2, 1, points=[t4.element(0), t4.element(1)])
    assert [m.code for m in spec.multipliers] == [1, 1]


def test_make_code_errors(t4):
    with pytest.raises(FieldError, match="duplicate"):
        make_code(t4, 2, 1, points=[t4.one, t4.one])
    with pytest.raises(FieldError):
        make_code(t4, 3, 3)
    with pytest.raises(FieldError):
        make_code(t4, 5, 1)


def test_encode_degenerate_messages(code16, t16):
    zero = encode(code16, [t16.zero] * 12)
    assert all(s.code == 0 for s in zero.symbols)
    const = encode(code16, [t16.element(7)] + [t16.zero] * 11)
    assert all(s.code == 7 for s in const.symbols)


def test_dual_checks_vanish_on_codewords(code16, t16):
    rng = random.Random(9)
    for _ in range(25):
        msg = [t16.element(rng.randrange(16)) for _ in range(12)]
        cw = encode(code16, msg)
        g = [t16.element(rng.randrange(16)) for _ in range(4)]
        assert check_identity(code16, g, cw).code == 0


def test_check_identity_detects_corruption(code16, t16):
    rng = random.Random(10)
    msg = [t16.element(rng.randrange(16)) for _ in range(12)]
    cw = encode(code16, msg)
    bad = Codeword(
        code16, cw.symbols[:2] + (cw.symbols[2] + t16.one,) + cw.symbols[3:]
    )
    hits = 0
    for c0 in range(16):
        for c1 in range(16):
            g = [t16.element(c0), t16.element(c1), t16.zero, t16.zero]
            if check_identity(code16, g, bad).code:
                hits += 1
    assert hits > 0
    assert check_identity(code16, [t16.zero], bad).code == 0


def test_check_identity_degree_guard(code16, t16):
    too_big = [t16.zero] * 4 + [t16.one]
    with pytest.raises(FieldError, match="degree"):
        check_identity(code16, too_big, encode(code16, [t16.zero] * 12))


def test_mds_interpolation_oracle(code16, t16):
    rng = random.Random(11)
    for _ in range(5):
        msg = [t16.element(rng.randrange(16)) for _ in range(12)]
        cw = encode(code16, msg)
        for j in range(16):
            others = [i for i in range(16) if i != j]
            rng.shuffle(others)
            sel = others[:12]
            coeffs = interpolate(
                [code16.points[i] for i in sel], [cw.symbols[i] for i in sel]
            )
            assert poly_degree(coeffs) < 12
            assert eval_poly(coeffs, code16.points[j]) == cw.symbols[j]


def test_duality_validated_for_many_shapes():
    rng = random.Random(12)
    t = make_tower(3, 1, 2)
    for _ in range(5):
        n = rng.randrange(3, 9)
        k = rng.randrange(1, n)
        pts = rng.sample(range(9), n)
        spec = make_code(t, n, k, points=[t.element(c) for c in pts])
        msg = [t.element(rng.randrange(9)) for _ in range(k)]
        cw = encode(spec, msg)
        g = [t.element(rng.randrange(9)) for _ in range(spec.r)]
        assert check_identity(spec, g, cw).code == 0


def test_code_json_round_trip(code16):
    again = CodeSpec.from_json(code16.to_json())
    assert again.n == code16.n and again.k == code16.k
    assert [p.code for p in again.points] == [p.code for p in code16.points]
    assert [m.code for m in again.multipliers] == [
        m.code for m in code16.multipliers
    ]
