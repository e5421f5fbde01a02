"""Label-map compression: adaptive arithmetic coding plus the aux-info layout.

Labels are integers in [0, l]. The coder is an adaptive order-0 arithmetic
coder (32-bit state, classic underflow handling) over the alphabet
{0..l, EOF}; symbol counts start at 1 and are incremented after every
coded symbol, so encoder and decoder stay in lockstep. The EOF symbol
terminates the stream and lets the decoder detect truncation and count
mismatches instead of silently returning garbage.

Aux-info byte layout (normative, golden-file tested):
    u32 BE  number of embedding-set vertices (= label count)
    u64 BE  embedded payload length in bits
    u32 BE  compressed label map length in bytes
    ...     compressed label map
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

from .exceptions import LabelDecodeError

_STATE_BITS = 32
_MASK = (1 << _STATE_BITS) - 1
_HALF = 1 << (_STATE_BITS - 1)
_QUARTER = 1 << (_STATE_BITS - 2)

_AUX_HEADER = struct.Struct(">IQI")


class _BitWriter:
    def __init__(self):
        self._bits = []

    def write(self, bit):
        self._bits.append(bit)

    def to_bytes(self):
        out = bytearray()
        acc = 0
        nacc = 0
        for b in self._bits:
            acc = (acc << 1) | b
            nacc += 1
            if nacc == 8:
                out.append(acc)
                acc = 0
                nacc = 0
        if nacc:
            out.append(acc << (8 - nacc))
        return bytes(out)


class _BitReader:
    """MSB-first bit reader; tolerates a bounded overread past the end.

    An arithmetic decoder legitimately reads up to one state width beyond
    the bits the encoder emitted. Anything past that means the stream was
    truncated.
    """

    def __init__(self, data, max_overread=_STATE_BITS):
        self._data = data
        self._nbits = 8 * len(data)
        self._pos = 0
        self._overread = 0
        self._max_overread = max_overread

    def read(self):
        if self._pos >= self._nbits:
            self._overread += 1
            if self._overread > self._max_overread:
                raise LabelDecodeError("compressed label stream is truncated")
            return 0
        byte = self._data[self._pos >> 3]
        bit = (byte >> (7 - (self._pos & 7))) & 1
        self._pos += 1
        return bit


class _Model:
    """Adaptive order-0 frequency model with add-one updates."""

    def __init__(self, nsymbols):
        self.counts = [1] * nsymbols
        self.total = nsymbols

    def cumulative(self, symbol):
        lo = sum(self.counts[:symbol])
        return lo, lo + self.counts[symbol]

    def find(self, value):
        acc = 0
        for sym, c in enumerate(self.counts):
            if acc + c > value:
                return sym, acc, acc + c
            acc += c
        raise LabelDecodeError("decoder scaled value out of range")

    def update(self, symbol):
        self.counts[symbol] += 1
        self.total += 1


class _Encoder:
    def __init__(self, out):
        self.low = 0
        self.high = _MASK
        self.pending = 0
        self.out = out

    def _emit(self, bit):
        self.out.write(bit)
        for _ in range(self.pending):
            self.out.write(bit ^ 1)
        self.pending = 0

    def encode(self, model, symbol):
        lo, hi = model.cumulative(symbol)
        total = model.total
        span = self.high - self.low + 1
        self.high = self.low + span * hi // total - 1
        self.low = self.low + span * lo // total
        while True:
            if self.high < _HALF:
                self._emit(0)
            elif self.low >= _HALF:
                self._emit(1)
                self.low -= _HALF
                self.high -= _HALF
            elif self.low >= _QUARTER and self.high < 3 * _QUARTER:
                self.pending += 1
                self.low -= _QUARTER
                self.high -= _QUARTER
            else:
                break
            self.low = (self.low << 1) & _MASK
            self.high = ((self.high << 1) | 1) & _MASK
        model.update(symbol)

    def finish(self):
        self.pending += 1
        self._emit(0 if self.low < _QUARTER else 1)


class _Decoder:
    def __init__(self, reader):
        self.low = 0
        self.high = _MASK
        self.reader = reader
        self.code = 0
        for _ in range(_STATE_BITS):
            self.code = (self.code << 1) | reader.read()

    def decode(self, model):
        total = model.total
        span = self.high - self.low + 1
        value = ((self.code - self.low + 1) * total - 1) // span
        symbol, lo, hi = model.find(value)
        self.high = self.low + span * hi // total - 1
        self.low = self.low + span * lo // total
        while True:
            if self.high < _HALF:
                pass
            elif self.low >= _HALF:
                self.low -= _HALF
                self.high -= _HALF
                self.code -= _HALF
            elif self.low >= _QUARTER and self.high < 3 * _QUARTER:
                self.low -= _QUARTER
                self.high -= _QUARTER
                self.code -= _QUARTER
            else:
                break
            self.low = (self.low << 1) & _MASK
            self.high = ((self.high << 1) | 1) & _MASK
            self.code = ((self.code << 1) | self.reader.read()) & _MASK
        model.update(symbol)
        return symbol


def encode_labels(labels, l):
    """Compress a list of labels in [0, l] to bytes. Deterministic."""
    eof = l + 1
    for t in labels:
        if not 0 <= t <= l:
            raise ValueError(f"label {t} outside [0, {l}]")
    writer = _BitWriter()
    enc = _Encoder(writer)
    model = _Model(l + 2)
    for t in labels:
        enc.encode(model, int(t))
    enc.encode(model, eof)
    enc.finish()
    return writer.to_bytes()


def decode_labels(data, count, l):
    """Exact inverse of encode_labels; raises LabelDecodeError on a
    truncated stream or a count that does not match the encoded list."""
    eof = l + 1
    dec = _Decoder(_BitReader(data))
    model = _Model(l + 2)
    out = []
    for _ in range(count):
        sym = dec.decode(model)
        if sym == eof:
            raise LabelDecodeError(
                f"stream ended after {len(out)} labels, expected {count}"
            )
        out.append(sym)
    if dec.decode(model) != eof:
        raise LabelDecodeError("stream holds more labels than the declared count")
    return out


@dataclass(frozen=True)
class AuxInfo:
    """Auxiliary information shipped in the container header."""

    s_e_count: int
    payload_bit_len: int
    compressed_map: bytes

    @property
    def bit_len(self):
        """Total serialized size in bits; the l_ai term of the embedding rate."""
        return 8 * (_AUX_HEADER.size + len(self.compressed_map))

    def to_bytes(self):
        return _AUX_HEADER.pack(
            self.s_e_count, self.payload_bit_len, len(self.compressed_map)
        ) + self.compressed_map

    @classmethod
    def from_bytes(cls, data):
        if len(data) < _AUX_HEADER.size:
            raise LabelDecodeError("aux info shorter than its fixed header")
        s_e_count, payload_bit_len, map_len = _AUX_HEADER.unpack_from(data)
        body = data[_AUX_HEADER.size:_AUX_HEADER.size + map_len]
        if len(body) != map_len:
            raise LabelDecodeError("aux info compressed map is truncated")
        return cls(s_e_count, payload_bit_len, body)

    @property
    def byte_len(self):
        return _AUX_HEADER.size + len(self.compressed_map)
