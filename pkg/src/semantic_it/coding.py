"""Static-model arithmetic coding and the semantic codec built on it.

Container layout (big-endian)::

    magic     8 bytes  b"SEMCODE1"
    version   4 bytes  uint32 (= 1)
    count     8 bytes  uint64 number of coded symbols
    alphabet  4 bytes  uint32 model size
    freqs     2 bytes per symbol, uint16 quantized frequency
    payload   coder bits, MSB first, zero-padded to a byte boundary

Frequencies sum to 2**16 (65535 for a one-symbol model). Every symbol with
positive probability gets a frequency of at least 1; zero-probability
symbols get 0 and cannot be encoded.
"""
from __future__ import annotations

import bisect
import struct
from dataclasses import dataclass

import numpy as np

from .errors import DecodeError, ValidationError
from .probability import Distribution, plogp_sum
from .semantic import SynonymousMapping, pushforward

MAGIC = b"SEMCODE1"
VERSION = 1
FREQ_TOTAL = 1 << 16
_HEADER = struct.Struct(">8sIQI")

STATE_BITS = 32
_FULL = (1 << STATE_BITS) - 1
_HALF = 1 << (STATE_BITS - 1)
_QUARTER = 1 << (STATE_BITS - 2)


def quantize_model(p: Distribution) -> np.ndarray:
    probs = p.probs
    pos = probs > 0
    total = FREQ_TOTAL if pos.sum() > 1 else FREQ_TOTAL - 1
    scaled = probs * total
    freq = np.where(pos, np.maximum(np.floor(scaled), 1), 0).astype(np.int64)
    diff = total - int(freq.sum())
    if diff > 0:
        # largest remainders first; stable order for ties
        order = np.argsort(-(scaled - np.floor(scaled)) * pos, kind="stable")
        for i in order[:diff]:
            freq[i] += 1
    while diff < 0:
        i = int(np.argmax(freq))
        take = min(-diff, int(freq[i]) - 1)
        freq[i] -= take
        diff += take
    return freq


def model_entropy(freq: np.ndarray) -> float:
    """Entropy H_q of a quantized model, bits per symbol."""
    return plogp_sum(freq / freq.sum())


def _cumulative(freq) -> list[int]:
    cum = [0]
    for f in freq:
        cum.append(cum[-1] + int(f))
    return cum


def _encode_payload(symbols, cum: list[int]) -> tuple[bytes, int]:
    total = cum[-1]
    low, high = 0, _FULL
    bits = []
    pending = 0
    for s in symbols:
        rng = high - low + 1
        high = low + cum[s + 1] * rng // total - 1
        low = low + cum[s] * rng // total
        while True:
            if (low ^ high) & _HALF == 0:
                b = low >> (STATE_BITS - 1)
                bits.append(b)
                if pending:
                    bits.extend([b ^ 1] * pending)
                    pending = 0
                low = (low << 1) & _FULL
                high = ((high << 1) & _FULL) | 1
            elif low & ~high & _QUARTER:
                pending += 1
                low = (low << 1) & (_FULL >> 1)
                high = ((high << 1) & (_FULL >> 1)) | _HALF | 1
            else:
                break
    if symbols:
        # two disambiguating bits (plus pending) pin a value inside [low, high]
        # once the decoder pads with zeros
        b = 0 if low < _QUARTER else 1
        bits.append(b)
        bits.extend([b ^ 1] * (pending + 1))
    return np.packbits(np.array(bits, dtype=np.uint8)).tobytes(), len(bits)


def _decode_payload(payload: bytes, n: int, cum: list[int]) -> np.ndarray:
    total = cum[-1]
    stream = np.unpackbits(np.frombuffer(payload, dtype=np.uint8)).tolist()
    avail = len(stream)
    pos = 0

    def read():
        nonlocal pos
        pos += 1
        return stream[pos - 1] if pos <= avail else 0

    out = np.empty(n, dtype=np.int64)
    if n == 0:
        return out
    low, high = 0, _FULL
    code = 0
    pending = 0
    for _ in range(STATE_BITS):
        code = (code << 1) | read()
    for i in range(n):
        rng = high - low + 1
        value = ((code - low + 1) * total - 1) // rng
        s = bisect.bisect_right(cum, value) - 1
        out[i] = s
        high = low + cum[s + 1] * rng // total - 1
        low = low + cum[s] * rng // total
        while True:
            if (low ^ high) & _HALF == 0:
                low = (low << 1) & _FULL
                high = ((high << 1) & _FULL) | 1
                code = ((code << 1) & _FULL) | read()
                pending = 0
            elif low & ~high & _QUARTER:
                low = (low << 1) & (_FULL >> 1)
                high = ((high << 1) & (_FULL >> 1)) | _HALF | 1
                code = (code & _HALF) | ((code << 1) & (_FULL >> 1)) | read()
                pending += 1
            else:
                break
        # a complete stream is never over-read by more than STATE_BITS - 2
        if pos - avail > STATE_BITS - 2:
            raise DecodeError("payload truncated")
    # the decoder consumes exactly emitted + STATE_BITS - 2 bits; the rest is padding
    emitted = pos - (STATE_BITS - 2)
    b = 0 if low < _QUARTER else 1
    tail = [b] + [b ^ 1] * (pending + 1)
    if (
        emitted > avail
        or avail - emitted >= 8
        or any(stream[emitted:])
        or stream[emitted - len(tail) : emitted] != tail
    ):
        raise DecodeError("payload truncated or corrupt")
    return out


def arithmetic_encode(symbols, p: Distribution) -> bytes:
    """Encode ``symbols`` (ints in 0..len(p)-1) under the quantized model of ``p``.

    The payload is at most sum(-log2 q(s_i)) + 3 bits plus about 1e-4 bits per
    symbol of range-rounding loss.
    """
    freq = quantize_model(p)
    syms = np.asarray(symbols, dtype=np.int64).ravel()
    if syms.size:
        if syms.min() < 0 or syms.max() >= freq.size:
            raise ValidationError(f"symbol out of range for alphabet of size {freq.size}")
        zero = np.flatnonzero(freq[syms] == 0)
        if zero.size:
            raise ValidationError(f"symbol {int(syms[zero[0]])} has zero quantized frequency")
    payload, _ = _encode_payload(syms.tolist(), _cumulative(freq))
    header = _HEADER.pack(MAGIC, VERSION, syms.size, freq.size)
    return header + struct.pack(f">{freq.size}H", *freq.tolist()) + payload


@dataclass(frozen=True)
class Container:
    count: int
    freqs: np.ndarray
    payload: bytes

    @property
    def payload_bits(self) -> int:
        return 8 * len(self.payload)


def read_container(data: bytes) -> Container:
    if len(data) < _HEADER.size:
        raise DecodeError("truncated header")
    magic, version, count, size = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise DecodeError("bad magic")
    if version != VERSION:
        raise DecodeError(f"unsupported version {version}")
    end = _HEADER.size + 2 * size
    if len(data) < end:
        raise DecodeError("truncated frequency table")
    freqs = np.array(struct.unpack_from(f">{size}H", data, _HEADER.size), dtype=np.int64)
    if count and freqs.sum() == 0:
        raise DecodeError("empty model")
    return Container(count, freqs, bytes(data[end:]))


def arithmetic_decode(data: bytes, n: int, p: Distribution) -> np.ndarray:
    c = read_container(data)
    if c.count != n:
        raise DecodeError(f"stream holds {c.count} symbols, {n} requested")
    if not np.array_equal(c.freqs, quantize_model(p)):
        raise DecodeError("frequency table does not match the supplied model")
    if n and not c.payload:
        raise DecodeError("payload truncated")
    return _decode_payload(c.payload, n, _cumulative(c.freqs))


def bits_per_symbol(data: bytes) -> float:
    c = read_container(data)
    return c.payload_bits / c.count if c.count else 0.0


# -- semantic codec ------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GenerativeDecoder:
    """Maps each class index z to a reconstruction symbol: xhat = G(z)."""

    representative: np.ndarray
    require_consistent: bool = False

    def __post_init__(self):
        r = np.asarray(self.representative, dtype=np.int64)
        if r.ndim != 1 or r.size == 0 or r.min() < 0:
            raise ValidationError("representative map must be a non-empty list of symbol indices")
        r.setflags(write=False)
        object.__setattr__(self, "representative", r)

    @classmethod
    def lowest_index(cls, f: SynonymousMapping, require_consistent: bool = True) -> "GenerativeDecoder":
        return cls([int(f.members(z)[0]) for z in range(f.n_classes)], require_consistent)

    @classmethod
    def most_probable(cls, f: SynonymousMapping, p: Distribution, require_consistent: bool = True) -> "GenerativeDecoder":
        """Mode of p within each class; ties go to the lowest index."""
        reps = []
        for z in range(f.n_classes):
            mem = f.members(z)
            reps.append(int(mem[np.argmax(p.probs[mem])]))
        return cls(reps, require_consistent)

    def is_consistent(self, f: SynonymousMapping) -> bool:
        if self.representative.size != f.n_classes or self.representative.max() >= f.n_symbols:
            return False
        return bool(np.all(f.class_of[self.representative] == np.arange(f.n_classes)))


def semantic_encode(xs, f: SynonymousMapping, p: Distribution) -> bytes:
    """Code only the class sequence f(x_i) under the pushed-forward model."""
    xs = np.asarray(xs, dtype=np.int64).ravel()
    if xs.size and (xs.min() < 0 or xs.max() >= f.n_symbols):
        raise ValidationError(f"source symbol out of range 0..{f.n_symbols - 1}")
    return arithmetic_encode(f.class_of[xs], pushforward(p, f))


def generative_decode(data: bytes, n: int, f: SynonymousMapping, g: GenerativeDecoder, p: Distribution) -> np.ndarray:
    if g.representative.size != f.n_classes:
        raise ValidationError(f"decoder has {g.representative.size} representatives for {f.n_classes} classes")
    if g.require_consistent and not g.is_consistent(f):
        raise ValidationError("representative lies outside its class")
    z = arithmetic_decode(data, n, pushforward(p, f))
    return g.representative[z]
