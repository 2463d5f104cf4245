"""Truncated-DFT transform codec with a self-delimiting bit container.

Stream layout (MSB-first)::

    gamma(N) gamma(R) gamma(b) A:float32 | R x (re, im), b/2 bits each

``A`` is the largest absolute real/imaginary component among the retained
coefficients; each component is quantized by a uniform midrise quantizer with
``2**(b/2)`` levels over ``[-A, A]``. The total length is
``header_length(N, R, b) + b*R`` and the decoder can find the end of the
stream on its own, so the length is a usable entropy.

The transform is the unitary DFT (``1/sqrt(N)`` both ways) and truncation
keeps frequency indices ``0..R-1``.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .bits import BitReader, BitstreamError, BitWriter, gamma_length
from .statevec import StateVector, as_state

MAGIC = b"BLC1"
B_GRID = tuple(range(4, 33, 2))
DEFAULT_EPSILON = 1e-3


class CodecError(ValueError):
    pass


class BudgetError(CodecError):
    pass


@dataclass(frozen=True)
class CodecParams:
    N: int
    R: int
    b: int

    def __post_init__(self) -> None:
        if self.N < 1 or self.R < 1 or self.b < 1:
            raise CodecError(f"codec parameters must be positive: {self}")
        if self.R > self.N:
            raise CodecError(f"R={self.R} exceeds N={self.N}")
        if self.b % 2 or self.b < 4:
            raise CodecError(f"b must be an even integer >= 4, got {self.b}")

    @property
    def bit_length(self) -> int:
        return header_length(self.N, self.R, self.b) + self.b * self.R


@dataclass(frozen=True)
class CodeStream:
    """Packed MSB-first bits; only the first ``bit_length`` bits are meaningful."""

    bits: bytes
    bit_length: int

    def __len__(self) -> int:
        return self.bit_length

    def bit_string(self) -> str:
        return "".join(str((self.bits[i >> 3] >> (7 - (i & 7))) & 1) for i in range(self.bit_length))

    def to_bytes(self) -> bytes:
        """Container format: magic, 8-byte LE bit length, packed bits."""
        nbytes = (self.bit_length + 7) // 8
        return MAGIC + struct.pack("<Q", self.bit_length) + self.bits[:nbytes].ljust(nbytes, b"\0")

    @classmethod
    def from_bytes(cls, data: bytes) -> CodeStream:
        if len(data) < 12 or data[:4] != MAGIC:
            raise BitstreamError("missing BLC1 container header", 0)
        (bit_length,) = struct.unpack("<Q", data[4:12])
        payload = data[12:]
        if len(payload) * 8 < bit_length:
            raise BitstreamError(
                f"container declares {bit_length} bits but holds {len(payload) * 8}", len(payload) * 8
            )
        return cls(bytes(payload), bit_length)


def header_length(N: int, R: int, b: int) -> int:
    return gamma_length(N) + gamma_length(R) + gamma_length(b) + 32


def dft_forward(signal: StateVector, R: int) -> StateVector:
    x = as_state(signal).amplitudes
    if not 1 <= R <= x.size:
        raise CodecError(f"R must be in [1, {x.size}], got {R}")
    return StateVector(np.fft.fft(x, norm="ortho")[:R])


def dft_inverse(coeffs: StateVector, N: int) -> StateVector:
    c = as_state(coeffs).amplitudes
    if c.size > N:
        raise CodecError(f"R={c.size} exceeds N={N}")
    padded = np.zeros(N, dtype=np.complex128)
    padded[: c.size] = c
    return StateVector(np.fft.ifft(padded, norm="ortho"))


def _scale(values: np.ndarray) -> float:
    """Largest component magnitude, rounded up to a float32."""
    a = float(np.max(np.abs(values))) if values.size else 0.0
    if not a < 3.4e38:
        return float("inf")
    a32 = np.float32(a)
    if float(a32) < a:
        a32 = np.nextafter(a32, np.float32(np.inf))
    return float(a32)


def quantize(values: np.ndarray, scale: float, bits: int) -> np.ndarray:
    """Midrise quantizer indices in [0, 2**bits)."""
    levels = 1 << bits
    if scale == 0.0:
        return np.zeros(values.shape, dtype=np.int64)
    step = 2.0 * scale / levels
    q = np.floor(values / step).astype(np.int64) + levels // 2
    return np.clip(q, 0, levels - 1)


def dequantize(indices: np.ndarray, scale: float, bits: int) -> np.ndarray:
    levels = 1 << bits
    if scale == 0.0:
        return np.zeros(indices.shape, dtype=np.float64)
    step = 2.0 * scale / levels
    return (indices - levels // 2 + 0.5) * step


def encode(signal: StateVector, params: CodecParams) -> CodeStream:
    signal = as_state(signal)
    if signal.dim != params.N:
        raise CodecError(f"signal has dimension {signal.dim}, params expect N={params.N}")
    coeffs = dft_forward(signal, params.R).amplitudes
    comps = np.column_stack([coeffs.real, coeffs.imag]).reshape(-1)
    scale = _scale(comps)
    if not np.isfinite(scale):
        raise CodecError("coefficients are non-finite or exceed the float32 scale range")
    half = params.b // 2
    q = quantize(comps, scale, half)

    w = BitWriter()
    w.write_gamma(params.N)
    w.write_gamma(params.R)
    w.write_gamma(params.b)
    w.write(struct.unpack(">I", struct.pack(">f", scale))[0], 32)
    for v in q.tolist():
        w.write(v, half)
    return CodeStream(w.getvalue(), len(w))


def read_stream(reader: BitReader, target_dim: int | None = None) -> StateVector:
    """Decode one stream from ``reader``, leaving it positioned just past the stream."""
    start = reader.pos
    N = reader.read_gamma()
    R = reader.read_gamma()
    b = reader.read_gamma()
    try:
        params = CodecParams(N, R, b)
    except CodecError as exc:
        raise BitstreamError(f"malformed header: {exc}", start) from None
    scale = struct.unpack(">f", struct.pack(">I", reader.read(32)))[0]
    if not np.isfinite(scale) or scale < 0:
        raise BitstreamError(f"malformed header: scale {scale}", reader.pos - 32)
    half = params.b // 2
    q = np.array([reader.read(half) for _ in range(2 * params.R)], dtype=np.int64)
    comps = dequantize(q, float(scale), half).reshape(-1, 2)
    coeffs = comps[:, 0] + 1j * comps[:, 1]
    return dft_inverse(StateVector(coeffs), params.N if target_dim is None else target_dim)


def decode(stream: CodeStream, target_dim: int | None = None) -> StateVector:
    """Decode a stream. ``target_dim`` resamples to another resolution (norm-preserving)."""
    return read_stream(BitReader(stream.bits, stream.bit_length), target_dim)


def decode_prefix(data: bytes, limit: int | None = None) -> tuple[StateVector, int]:
    """Decode a stream from the front of ``data``; returns (signal, bits consumed)."""
    reader = BitReader(data, limit)
    signal = read_stream(reader)
    return signal, reader.pos


def relative_distortion(reference: StateVector, approx: StateVector) -> float:
    ref = as_state(reference).amplitudes
    err = float(np.linalg.norm(as_state(approx).amplitudes - ref))
    norm = float(np.linalg.norm(ref))
    return err / norm if norm > 0 else err


def candidate_grid(N: int, b_grid: tuple[int, ...] = B_GRID) -> list[CodecParams]:
    """All (R, b) points ordered by stream length, then R, then b."""
    grid = [CodecParams(N, R, b) for R in range(1, N + 1) for b in b_grid]
    grid.sort(key=lambda p: (p.bit_length, p.R, p.b))
    return grid


def minimal_encoding(
    signal: StateVector, epsilon: float = DEFAULT_EPSILON, b_grid: tuple[int, ...] = B_GRID
) -> CodeStream:
    """Shortest stream over the (R, b) grid whose decode is within ``epsilon``.

    Candidates are tried in length order, so the first one meeting the budget
    is optimal. R values whose discarded high-frequency energy alone breaks
    the budget are skipped without encoding.
    """
    if epsilon <= 0:
        raise CodecError(f"distortion budget must be positive, got {epsilon}")
    signal = as_state(signal)
    N = signal.dim
    spectrum = np.fft.fft(signal.amplitudes, norm="ortho")
    norm = float(np.linalg.norm(signal.amplitudes))
    if not np.isfinite(norm):
        raise CodecError("signal has non-finite samples")
    tail = np.sqrt(np.cumsum((np.abs(spectrum) ** 2)[::-1])[::-1])  # tail[R] = energy beyond R-1
    budget = epsilon * norm if norm > 0 else epsilon
    for params in candidate_grid(N, b_grid):
        if params.R < N and tail[params.R] > budget * (1 + 1e-9):
            continue
        stream = encode(signal, params)
        if relative_distortion(signal, decode(stream)) <= epsilon:
            return stream
    raise BudgetError(
        f"no (R, b) grid point reaches relative distortion {epsilon:g} for N={N}; "
        f"the finest setting b={max(b_grid)} cannot resolve it, use a larger budget"
    )


def stream_params(stream: CodeStream) -> CodecParams:
    reader = BitReader(stream.bits, stream.bit_length)
    return CodecParams(reader.read_gamma(), reader.read_gamma(), reader.read_gamma())


def stream_scale(stream: CodeStream) -> float:
    reader = BitReader(stream.bits, stream.bit_length)
    for _ in range(3):
        reader.read_gamma()
    return struct.unpack(">f", struct.pack(">I", reader.read(32)))[0]


def is_incompressible(signal: StateVector, epsilon: float = DEFAULT_EPSILON) -> bool:
    """True when meeting the budget needs every frequency (R = N)."""
    signal = as_state(signal)
    return stream_params(minimal_encoding(signal, epsilon)).R == signal.dim
