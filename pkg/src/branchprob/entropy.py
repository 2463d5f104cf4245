"""Algorithmic entropy estimated as the length of a real compressor's output.

Every adapter produces self-delimiting output, so ``2**-entropy`` is a
meaningful prior weight. Three adapters ship with the package:

``lz``
    A small LZ77 variant, defined below, with Elias-gamma headers and match fields.
``zlib``
    DEFLATE via the standard library, as an independent cross-check.
``dft``
    The truncated-DFT codec, reading bytes as complex128 samples (lossy).
"""

from __future__ import annotations

import json
import zlib
from dataclasses import asdict, dataclass
from typing import Callable, Literal

import numpy as np

from . import dft_codec
from .bits import BitReader, BitWriter, gamma_length
from .dft_codec import CodeStream

LOG_DOMAIN_THRESHOLD = 1000.0


@dataclass(frozen=True)
class Compressor:
    name: str
    compress: Callable[[bytes], CodeStream]
    decompress: Callable[[CodeStream], bytes]
    header_length: Callable[[bytes], int]
    lossless: bool = True


# --- LZ77 adapter ----------------------------------------------------------
#
# gamma(len+1), then tokens until len bytes are produced:
#   0 <byte:8>                     literal
#   1 gamma(offset) gamma(len-2)   copy ``len`` >= 3 bytes from ``offset`` back

MIN_MATCH = 3
MAX_CHAIN = 48


def _match_length(data: bytes, src: int, dst: int, limit: int) -> int:
    n = 0
    block = 64
    while n + block <= limit and data[src + n : src + n + block] == data[dst + n : dst + n + block]:
        n += block
    while n < limit and data[src + n] == data[dst + n]:
        n += 1
    return n


def lz_compress(data: bytes) -> CodeStream:
    w = BitWriter()
    w.write_gamma(len(data) + 1)
    chains: dict[bytes, list[int]] = {}
    i, n = 0, len(data)

    def insert(pos: int) -> None:
        if pos + MIN_MATCH <= n:
            chains.setdefault(data[pos : pos + MIN_MATCH], []).append(pos)

    while i < n:
        best_len, best_off = 0, 0
        if i + MIN_MATCH <= n:
            for cand in reversed(chains.get(data[i : i + MIN_MATCH], [])[-MAX_CHAIN:]):
                length = _match_length(data, cand, i, n - i)
                if length > best_len:
                    best_len, best_off = length, i - cand
                    if i + length == n:
                        break
        if best_len >= MIN_MATCH and 1 + gamma_length(best_off) + gamma_length(best_len - 2) < 9 * best_len:
            w.write_bit(1)
            w.write_gamma(best_off)
            w.write_gamma(best_len - 2)
            stop = i + best_len
            # interior positions of very long runs add nothing but time
            for p in range(i, min(stop, i + 256)):
                insert(p)
            for p in range(max(i + 256, stop - 256), stop):
                insert(p)
            i = stop
        else:
            w.write_bit(0)
            w.write(data[i], 8)
            insert(i)
            i += 1
    return CodeStream(w.getvalue(), len(w))


def lz_decompress(stream: CodeStream) -> bytes:
    r = BitReader(stream.bits, stream.bit_length)
    n = r.read_gamma() - 1
    out = bytearray()
    while len(out) < n:
        if r.read_bit():
            off = r.read_gamma()
            length = r.read_gamma() + 2
            if off > len(out):
                raise ValueError(f"LZ back-reference {off} before start of output")
            for _ in range(length):
                out.append(out[-off])
        else:
            out.append(r.read(8))
    return bytes(out)


LZ = Compressor(
    name="lz",
    compress=lz_compress,
    decompress=lz_decompress,
    header_length=lambda x: gamma_length(len(x) + 1),
)


def _zlib_compress(data: bytes) -> CodeStream:
    out = zlib.compress(data, 9)
    return CodeStream(out, 8 * len(out))


# framing plus the empty final block
_ZLIB_OVERHEAD = 8 * len(zlib.compress(b"", 9))

ZLIB = Compressor(
    name="zlib",
    compress=_zlib_compress,
    decompress=lambda s: zlib.decompress(s.bits[: s.bit_length // 8]),
    header_length=lambda x: _ZLIB_OVERHEAD,
)


SAMPLE_LIMIT = 1e30


def bytes_to_signal(data: bytes) -> np.ndarray:
    """Read bytes as complex128 samples, zero-padding to a whole sample.

    Arbitrary bytes can hold NaN or huge floats; those read as 0 and
    +-SAMPLE_LIMIT so the codec's float32 scale stays finite.
    """
    padded = data + b"\0" * (-len(data) % 16)
    if not padded:
        padded = b"\0" * 16
    raw = np.frombuffer(padded, dtype=np.float64)
    clean = np.clip(np.nan_to_num(raw, nan=0.0, posinf=SAMPLE_LIMIT, neginf=-SAMPLE_LIMIT), -SAMPLE_LIMIT, SAMPLE_LIMIT)
    return clean.view(np.complex128).copy()


def signal_to_bytes(signal) -> bytes:
    return np.asarray(signal, dtype=np.complex128).tobytes()


def dft_compressor(epsilon: float = dft_codec.DEFAULT_EPSILON) -> Compressor:
    def compress(data: bytes) -> CodeStream:
        return dft_codec.minimal_encoding(bytes_to_signal(data), epsilon)

    def head(data: bytes) -> int:
        p = dft_codec.stream_params(compress(data))
        return dft_codec.header_length(p.N, p.R, p.b)

    return Compressor(
        name="dft",
        compress=compress,
        decompress=lambda s: signal_to_bytes(dft_codec.decode(s).amplitudes),
        header_length=head,
        lossless=False,
    )


DFT = dft_compressor()

COMPRESSORS: dict[str, Compressor] = {"lz": LZ, "zlib": ZLIB, "dft": DFT}


def get_compressor(name: str) -> Compressor:
    try:
        return COMPRESSORS[name]
    except KeyError:
        raise ValueError(f"unknown compressor {name!r}; choose from {sorted(COMPRESSORS)}") from None


# --- estimates -------------------------------------------------------------


def entropy(x: bytes, c: Compressor = LZ) -> int:
    """Bit length of ``c``'s encoding of ``x``."""
    return c.compress(bytes(x)).bit_length


@dataclass(frozen=True)
class LogProbability:
    """A probability too small for a float, held as its base-2 logarithm."""

    log2: float

    @property
    def value(self) -> float:
        return 2.0**self.log2


def solomonoff_probability(h: float) -> float | LogProbability:
    """``2**-h``; beyond 1000 bits the result stays in the log domain."""
    if h < 0:
        raise ValueError(f"entropy must be non-negative, got {h}")
    if h > LOG_DOMAIN_THRESHOLD:
        return LogProbability(-float(h))
    return 2.0 ** -float(h)


def is_random(x: bytes, c: Compressor = LZ) -> bool:
    """Incompressible: the encoding is no shorter than the raw 8*len(x) bits."""
    return entropy(x, c) >= 8 * len(x)


def conditional_entropy(
    x: bytes, y: bytes, c: Compressor = LZ, mode: Literal["delta", "concat"] = "delta"
) -> float:
    """H(x|y), clamped at zero.

    ``delta`` assumes y's information is fully shared and returns H(x) - H(y);
    ``concat`` returns H(y + x) - H(y).
    """
    if mode == "delta":
        d = entropy(x, c) - entropy(y, c)
    elif mode == "concat":
        d = entropy(bytes(y) + bytes(x), c) - entropy(y, c)
    else:
        raise ValueError(f"mode must be 'delta' or 'concat', got {mode!r}")
    return float(max(d, 0))


@dataclass(frozen=True)
class EntropyReport:
    h_x: float
    h_y: float | None
    h_x_given_y: float | None
    mutual: float | None
    compressor: str

    def to_json(self) -> str:
        return json.dumps(asdict(self))


def report(x: bytes, y: bytes | None = None, c: Compressor = LZ, mode: str = "concat") -> EntropyReport:
    h_x = float(entropy(x, c))
    if y is None:
        return EntropyReport(h_x, None, None, None, c.name)
    h_x_given_y = conditional_entropy(x, y, c, mode)
    return EntropyReport(h_x, float(entropy(y, c)), h_x_given_y, h_x - h_x_given_y, c.name)

