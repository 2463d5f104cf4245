"""MSB-first bit I/O and the Elias-gamma integer code."""

from __future__ import annotations


class BitstreamError(ValueError):
    """Raised when a bit source runs out or holds an invalid code.

    ``offset`` is the bit position at which reading failed.
    """

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at bit offset {offset})")
        self.offset = offset


class BitWriter:
    def __init__(self) -> None:
        self._buf = bytearray()
        self._nbits = 0

    def __len__(self) -> int:
        return self._nbits

    def write_bit(self, bit: int) -> None:
        if self._nbits % 8 == 0:
            self._buf.append(0)
        if bit:
            self._buf[-1] |= 0x80 >> (self._nbits % 8)
        self._nbits += 1

    def write(self, value: int, nbits: int) -> None:
        """Write the low ``nbits`` of ``value``, most significant first."""
        if value < 0 or value >> nbits:
            raise ValueError(f"{value} does not fit in {nbits} bits")
        for shift in range(nbits - 1, -1, -1):
            self.write_bit((value >> shift) & 1)

    def write_gamma(self, n: int) -> None:
        if n < 1:
            raise ValueError(f"Elias gamma needs n >= 1, got {n}")
        width = n.bit_length()
        self.write(0, width - 1)
        self.write(n, width)

    def extend(self, data: bytes, nbits: int) -> None:
        """Append the first ``nbits`` bits of packed ``data``."""
        for i in range(nbits):
            self.write_bit((data[i >> 3] >> (7 - (i & 7))) & 1)

    def getvalue(self) -> bytes:
        return bytes(self._buf)


class BitReader:
    """Reads bits from packed bytes, limited to ``limit`` bits if given."""

    def __init__(self, data: bytes, limit: int | None = None, offset: int = 0):
        self._data = data
        self._limit = len(data) * 8 if limit is None else min(limit, len(data) * 8)
        self.pos = offset

    @property
    def remaining(self) -> int:
        return self._limit - self.pos

    def read_bit(self) -> int:
        if self.pos >= self._limit:
            raise BitstreamError("unexpected end of bit stream", self.pos)
        byte = self._data[self.pos >> 3]
        bit = (byte >> (7 - (self.pos & 7))) & 1
        self.pos += 1
        return bit

    def read(self, nbits: int) -> int:
        if nbits > self.remaining:
            raise BitstreamError(f"need {nbits} bits, only {self.remaining} left", self.pos)
        value = 0
        for _ in range(nbits):
            value = (value << 1) | self.read_bit()
        return value

    def read_gamma(self, max_width: int = 64) -> int:
        start = self.pos
        zeros = 0
        while self.read_bit() == 0:
            zeros += 1
            if zeros >= max_width:
                raise BitstreamError("Elias gamma prefix too long", start)
        return (1 << zeros) | self.read(zeros)


def gamma_length(n: int) -> int:
    """Length in bits of the Elias-gamma code for ``n``."""
    if n < 1:
        raise ValueError(f"Elias gamma needs n >= 1, got {n}")
    return 2 * (n.bit_length() - 1) + 1
