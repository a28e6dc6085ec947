import pytest

from rsrepair.bounds import lower_bound
from rsrepair.fields import make_tower
from rsrepair.rs import make_code


@pytest.fixture(scope="session")
def t4():
    return make_tower(2, 1, 2)


@pytest.fixture(scope="session")
def t16():
    return make_tower(2, 1, 4)


@pytest.fixture(scope="session")
def t64():
    return make_tower(2, 1, 6)


@pytest.fixture(scope="session")
def t81():
    return make_tower(3, 1, 4)


@pytest.fixture(scope="session")
def t16_nested():
    # F_16 built as a degree-2 extension of F_4: exercises e > 1 paths.
    return make_tower(2, 2, 2)


@pytest.fixture(scope="session")
def code16(t16):
    return make_code(t16, 16, 12)


@pytest.fixture(scope="session")
def code4(t4):
    return make_code(t4, 4, 2)


def assert_sound(built):
    """Global soundness hook: no constructed scheme may beat the lower bound."""
    spec = built.scheme.spec
    tower = spec.tower
    bnd = lower_bound(tower.q, tower.ell, built.scheme.side.s, spec.n, spec.k).bound
    assert built.measured_bw >= bnd, (
        f"scheme beats the lower bound: {built.measured_bw} < {bnd}"
    )
