"""Bit-array helpers shared across the package.

Everything that moves between bit land and byte land goes through these two
functions so the convention is stated exactly once: bit i of a stream lives in
byte i // 8 at bit position i % 8, least significant bit first.
"""

from __future__ import annotations

import numpy as np


def pack_bits(bits) -> bytes:
    """Pack a 0/1 sequence into bytes, LSB-first within each byte."""
    arr = np.asarray(bits, dtype=np.uint8)
    return np.packbits(arr, bitorder="little").tobytes()


def unpack_bits(data: bytes, nbits: int) -> np.ndarray:
    """Unpack `nbits` bits from `data` (LSB-first), as a uint8 array of 0/1."""
    arr = np.frombuffer(data, dtype=np.uint8)
    out = np.unpackbits(arr, bitorder="little")
    if len(out) < nbits:
        raise ValueError(f"need {nbits} bits, got {len(out)}")
    return out[:nbits].copy()
