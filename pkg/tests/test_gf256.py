import random

import numpy as np
import pytest

from acrlnc.gf256 import (
    MUL_TABLE,
    POLY,
    encode,
    gf_add,
    gf_div,
    gf_inv,
    gf_mul,
    random_coefficients,
)


def slow_mul(a: int, b: int) -> int:
    """Independent shift-and-add oracle with 0x11D reduction."""
    acc = 0
    while b:
        if b & 1:
            acc ^= a
        a <<= 1
        if a & 0x100:
            a ^= POLY
        b >>= 1
    return acc


def test_multiplicative_identity():
    assert gf_mul(0x01, 0x57) == 0x57


def test_zero_annihilates():
    assert gf_mul(0x00, 0xFF) == 0x00


def test_doubling_wraps_through_polynomial():
    assert gf_mul(0x02, 0x80) == slow_mul(0x02, 0x80) == 0x1D


def test_table_matches_slow_oracle_on_sample():
    rng = random.Random(11)
    for _ in range(2000):
        a, b = rng.randrange(256), rng.randrange(256)
        assert gf_mul(a, b) == slow_mul(a, b)


def _np_mul_table() -> np.ndarray:
    return np.array(MUL_TABLE, dtype=np.uint8).reshape(256, 256)


def test_field_axioms_exhaustive():
    mul = _np_mul_table()
    a = np.arange(256, dtype=np.uint8)

    # commutativity over all 256x256 pairs
    assert np.array_equal(mul, mul.T)

    # associativity and distributivity over all 256^3 triples
    ab = mul[a[:, None], a[None, :]]                    # (a*b)
    ab_c = mul[ab[:, :, None], a[None, None, :]]        # (a*b)*c
    bc = mul[a[:, None], a[None, :]]                    # (b*c)
    a_bc = mul[a[:, None, None], bc[None, :, :]]        # a*(b*c)
    assert np.array_equal(ab_c, a_bc)

    xor = a[:, None] ^ a[None, :]                       # b ^ c
    a_bxc = mul[a[:, None, None], xor[None, :, :]]      # a*(b^c)
    ab_axc = mul[a[:, None], a[None, :]][:, :, None] ^ \
        mul[a[:, None], a[None, :]][:, None, :]         # (a*b)^(a*c)
    assert np.array_equal(a_bxc, ab_axc)

    # every nonzero element has an inverse
    for x in range(1, 256):
        assert gf_mul(x, gf_inv(x)) == 1


def test_additive_structure():
    assert gf_add(0x5A, 0x5A) == 0
    assert gf_add(0x5A, 0x00) == 0x5A


def test_inverse_and_division_errors():
    with pytest.raises(ZeroDivisionError):
        gf_inv(0)
    with pytest.raises(ZeroDivisionError):
        gf_div(1, 0)
    assert gf_div(0, 7) == 0
    assert gf_div(gf_mul(3, 9), 9) == 3


def test_encode_identity_combination():
    payload = bytes([1, 2, 3, 250])
    assert encode([payload], [0x01]) == payload


def test_encode_addition_is_xor():
    assert encode([bytes([0x01]), bytes([0x02])], [0x01, 0x01]) == bytes([0x03])


def test_encode_weighted_sum():
    # 2*1 ^ 3*1 over the field
    expected = slow_mul(2, 1) ^ slow_mul(3, 1)
    assert encode([bytes([0x01]), bytes([0x01])], [0x02, 0x03]) == bytes([expected])
    assert expected == 0x01


def test_encode_rejects_bad_shapes():
    with pytest.raises(ValueError):
        encode([bytes([1])], [1, 2])
    with pytest.raises(ValueError):
        encode([bytes([1]), bytes([1, 2])], [1, 2])
    with pytest.raises(ValueError):
        encode([], [])


def test_random_coefficients_deterministic_under_seed():
    a = random_coefficients(5, random.Random(99))
    b = random_coefficients(5, random.Random(99))
    assert a == b
    assert len(a) == 5


def test_random_coefficients_width_one():
    coeffs = random_coefficients(1, random.Random(3))
    assert len(coeffs) == 1 and coeffs[0] != 0


def test_random_coefficients_newest_forced_nonzero():
    rng = random.Random(0)
    for _ in range(3000):
        assert random_coefficients(3, rng)[-1] != 0


def test_random_coefficients_zero_frequency():
    # non-forced positions should hit zero about once per 256 draws
    rng = random.Random(42)
    draws = 10_000
    zeros = sum(random_coefficients(4, rng)[0] == 0 for _ in range(draws))
    p = 1 / 256
    sigma = (draws * p * (1 - p)) ** 0.5
    assert abs(zeros - draws * p) <= 3 * sigma
