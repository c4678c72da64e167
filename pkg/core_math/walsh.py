"""
Walsh-Hadamard transform over Z_2^n
"""

from __future__ import annotations

import numpy as np

from core_math.errors import DimensionError
from core_math.types import SignVector


def is_power_of_two(length: int) -> bool:
    return length >= 1 and (length & (length - 1)) == 0


def qubit_count(length: int) -> int:
    """n such that length = 2^n"""
    if not is_power_of_two(length):
        raise DimensionError(f"length {length} is not a power of two")
    return length.bit_length() - 1


def dot_parity(s, x):
    """s.x mod 2 for integer-encoded bit strings (vectorized)"""
    v = np.bitwise_and(np.asarray(s, dtype=np.int64), np.asarray(x, dtype=np.int64))
    parity = np.zeros_like(v)
    while np.any(v):
        parity ^= v & 1
        v = v >> 1
    return parity


def popcount(values) -> np.ndarray:
    v = np.asarray(values, dtype=np.int64).copy()
    count = np.zeros_like(v)
    while np.any(v):
        count += v & 1
        v = v >> 1
    return count


def fwht(values, axis: int = -1) -> np.ndarray:
    """
    Unnormalized fast Walsh-Hadamard transform (butterfly, O(N log N))

    Args:
        values: real or complex array whose `axis` has power-of-two length
        axis: axis to transform

    Returns:
        np.ndarray: H values, where H[s, x] = (-1)^{s.x}; applying it twice gives N * values
    """
    arr = np.asarray(values)
    out = np.moveaxis(arr.astype(np.result_type(arr.dtype, np.float64)), axis, -1).copy()
    length = out.shape[-1]
    qubit_count(length)
    h = 1
    while h < length:
        shaped = out.reshape(out.shape[:-1] + (length // (2 * h), 2, h))
        a = shaped[..., 0, :].copy()
        b = shaped[..., 1, :]
        shaped[..., 0, :] = a + b
        shaped[..., 1, :] = a - b
        out = shaped.reshape(out.shape)
        h *= 2
    return np.moveaxis(out, -1, axis)


def walsh_hadamard(table) -> np.ndarray:
    """
    Fourier coefficients h^(s) = 2^-n sum_x (-1)^{s.x} h(x)

    Args:
        table: SignVector or real sequence of length 2^n

    Returns:
        np.ndarray: all 2^n coefficients
    """
    values = table.entries if isinstance(table, SignVector) else np.asarray(table, dtype=float)
    if not is_power_of_two(len(values)):
        raise DimensionError(f"table length {len(values)} is not a power of two")
    return fwht(values.astype(np.float64)) / len(values)


def naive_walsh_hadamard(table) -> np.ndarray:
    """O(4^n) double sum; kept as an oracle for `walsh_hadamard`"""
    values = table.entries if isinstance(table, SignVector) else np.asarray(table, dtype=float)
    length = len(values)
    if not is_power_of_two(length):
        raise DimensionError(f"table length {length} is not a power of two")
    out = np.zeros(length)
    for s in range(length):
        total = 0.0
        for x in range(length):
            sign = -1.0 if bin(s & x).count("1") % 2 else 1.0
            total += sign * float(values[x])
        out[s] = total / length
    return out
