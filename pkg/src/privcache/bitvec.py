"""Fixed-length bit strings over GF(2), backed by Python integers."""

from __future__ import annotations

import random
from typing import Iterable, Sequence


class Bits:
    """An immutable bit string of a fixed length.

    Bit ``j`` of the string (``j`` starting at 0) is stored at integer bit
    position ``j``, so ``value >> j & 1`` reads it.  XOR is only defined
    between strings of equal length.
    """

    __slots__ = ("value", "length")

    def __init__(self, value: int, length: int) -> None:
        if length < 0:
            raise ValueError(f"negative bit length {length}")
        if value < 0 or value >> length:
            raise ValueError(f"value does not fit in {length} bits")
        self.value = value
        self.length = length

    @classmethod
    def zeros(cls, length: int) -> Bits:
        return cls(0, length)

    @classmethod
    def random(cls, length: int, rng: random.Random) -> Bits:
        return cls(rng.getrandbits(length) if length else 0, length)

    @classmethod
    def from01(cls, text: str) -> Bits:
        value = 0
        for j, ch in enumerate(text):
            if ch == "1":
                value |= 1 << j
            elif ch != "0":
                raise ValueError(f"invalid bit character {ch!r}")
        return cls(value, len(text))

    @classmethod
    def concat(cls, parts: Iterable[Bits]) -> Bits:
        value = 0
        length = 0
        for part in parts:
            value |= part.value << length
            length += part.length
        return cls(value, length)

    def bit(self, j: int) -> int:
        if not 0 <= j < self.length:
            raise IndexError(f"bit {j} out of range for length {self.length}")
        return self.value >> j & 1

    def block(self, i: int, width: int) -> Bits:
        """The i-th consecutive block of `width` bits."""
        if width <= 0 or (i + 1) * width > self.length:
            raise IndexError(f"block {i} of width {width} out of range")
        return Bits(self.value >> (i * width) & ((1 << width) - 1), width)

    def to01(self) -> str:
        return "".join("1" if self.value >> j & 1 else "0" for j in range(self.length))

    def to_bytes(self) -> bytes:
        """Byte-pack the string, bit 0 at the MSB of the first byte."""
        out = bytearray((self.length + 7) // 8)
        v = self.value
        j = 0
        while v:
            if v & 1:
                out[j >> 3] |= 0x80 >> (j & 7)
            v >>= 1
            j += 1
        return bytes(out)

    @classmethod
    def from_bytes(cls, data: bytes, length: int) -> Bits:
        if len(data) != (length + 7) // 8:
            raise ValueError(f"expected {(length + 7) // 8} bytes for {length} bits")
        value = 0
        for j in range(length):
            if data[j >> 3] & (0x80 >> (j & 7)):
                value |= 1 << j
        return cls(value, length)

    def __xor__(self, other: Bits) -> Bits:
        if self.length != other.length:
            raise ValueError(f"length mismatch: {self.length} vs {other.length}")
        return Bits(self.value ^ other.value, self.length)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Bits)
            and self.length == other.length
            and self.value == other.value
        )

    def __hash__(self) -> int:
        return hash((self.value, self.length))

    def __len__(self) -> int:
        return self.length

    def __repr__(self) -> str:
        if self.length <= 64:
            return f"Bits({self.to01()!r})"
        return f"Bits(<{self.length} bits>)"


def xor_all(parts: Sequence[Bits], length: int) -> Bits:
    """XOR a sequence of equal-length strings; empty input gives zeros."""
    acc = Bits.zeros(length)
    for part in parts:
        acc = acc ^ part
    return acc
