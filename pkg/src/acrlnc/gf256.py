"""GF(2^8) arithmetic and random linear combination of packet payloads.

Field elements are plain ints in 0..255.  Addition is XOR; multiplication
is carried out modulo the polynomial x^8 + x^4 + x^3 + x^2 + 1 (0x11D)
through log/antilog tables built at import time.
"""

from __future__ import annotations

import random

POLY = 0x11D

# exp table is doubled so gf_mul can skip the mod-255 reduction.
_EXP = [0] * 510
_LOG = [0] * 256

_x = 1
for _i in range(255):
    _EXP[_i] = _x
    _LOG[_x] = _i
    _x <<= 1
    if _x & 0x100:
        _x ^= POLY
for _i in range(255, 510):
    _EXP[_i] = _EXP[_i - 255]
del _x, _i

# Flat 64 KiB product table for the hot paths (index a << 8 | b).
MUL_TABLE = [
    0 if a == 0 or b == 0 else _EXP[_LOG[a] + _LOG[b]]
    for a in range(256)
    for b in range(256)
]


def gf_mul(a: int, b: int) -> int:
    """Product of two field elements."""
    if a == 0 or b == 0:
        return 0
    return _EXP[_LOG[a] + _LOG[b]]


def gf_add(a: int, b: int) -> int:
    return a ^ b


def gf_inv(a: int) -> int:
    """Multiplicative inverse; zero has none."""
    if a == 0:
        raise ZeroDivisionError("0 has no inverse in GF(2^8)")
    return _EXP[255 - _LOG[a]]


def gf_div(a: int, b: int) -> int:
    if b == 0:
        raise ZeroDivisionError("division by 0 in GF(2^8)")
    if a == 0:
        return 0
    return _EXP[_LOG[a] - _LOG[b] + 255]


def encode(payloads: list[bytes], coefficients: list[int]) -> bytes:
    """Coefficient-weighted GF(2^8) sum of equal-length payloads.

    This is the coded-packet body: byte j of the result is
    sum_i coefficients[i] * payloads[i][j] over the field.
    """
    if len(payloads) != len(coefficients):
        raise ValueError(
            f"{len(payloads)} payloads but {len(coefficients)} coefficients"
        )
    if not payloads:
        raise ValueError("empty combination")
    length = len(payloads[0])
    out = bytearray(length)
    mul = MUL_TABLE
    for payload, coef in zip(payloads, coefficients):
        if len(payload) != length:
            raise ValueError("payload lengths differ within one combination")
        if coef == 0:
            continue
        base = coef << 8
        for j in range(length):
            out[j] ^= mul[base | payload[j]]
    return bytes(out)


def random_coefficients(width: int, rng: random.Random) -> list[int]:
    """Uniform coefficient vector of the given width.

    The last position belongs to the newest packet in the window and is
    redrawn until nonzero, so every transmission really carries the DoF
    it declares.
    """
    if width < 1:
        raise ValueError("width must be >= 1")
    coeffs = [rng.randrange(256) for _ in range(width)]
    while coeffs[-1] == 0:
        coeffs[-1] = rng.randrange(256)
    return coeffs
