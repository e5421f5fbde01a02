"""Fixed-point coordinate mapping and the offset-binary bit representation.

A coordinate v becomes the integer floor(v * 10^p); the receiver divides
by 10^p to get back within 10^-p of the original. The word width l is a
fixed function of p. Signed integers are carried as offset binary
(bias 2^(l-1)) so that comparing bit patterns from the MSB down is
monotone in the underlying value, which is what prefix-match prediction
relies on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import MeshFormatError, QuantizeError
from .mesh_io import Mesh, _check_faces

P_MIN = 1
P_MAX = 33


def bit_length(p):
    """Word width in bits for precision exponent p.

    The published table skips p = 9; 10^9 overflows a 32-bit offset
    range, so it maps to 64 like the rest of [10, 33].
    """
    if not P_MIN <= p <= P_MAX:
        raise QuantizeError(f"precision {p} outside [{P_MIN}, {P_MAX}]")
    if p <= 2:
        return 8
    if p <= 4:
        return 16
    if p <= 8:
        return 32
    return 64


@dataclass(frozen=True, eq=False)
class QuantizedMesh:
    """l-bit integer coordinates in units of 10^-p, plus the source faces."""

    p: int
    l: int
    coords: np.ndarray  # (n, 3) int64, signed quantized values
    faces: np.ndarray

    def __post_init__(self):
        if bit_length(self.p) != self.l:
            raise QuantizeError(f"l={self.l} does not match p={self.p}")
        c = np.asarray(self.coords, dtype=np.int64)
        f = np.asarray(self.faces, dtype=np.int64)
        if c.ndim != 2 or c.shape[1] != 3:
            raise MeshFormatError("coords must be an (n, 3) array")
        _check_faces(f, c.shape[0])
        lo, hi = offset_range(self.l)
        if self.l < 64 and (c.min() < lo or c.max() > hi):
            raise QuantizeError(f"coordinate outside [{lo}, {hi}] for l={self.l}")
        object.__setattr__(self, "coords", c)
        object.__setattr__(self, "faces", f)

    @property
    def n(self):
        return self.coords.shape[0]

    def __eq__(self, other):
        if not isinstance(other, QuantizedMesh):
            return NotImplemented
        return (
            self.p == other.p
            and self.l == other.l
            and np.array_equal(self.coords, other.coords)
            and np.array_equal(self.faces, other.faces)
        )


def offset_range(l):
    """Inclusive signed range representable in l-bit offset binary."""
    return -(1 << (l - 1)), (1 << (l - 1)) - 1


def quantize(mesh, p):
    """Map float coordinates to integers: floor(v * 10^p).

    Requantizing a dequantized mesh is a fixed point: the float product
    lands back on the exact integer within half an ulp, so the floor
    never drifts.
    """
    l = bit_length(p)
    scaled = np.floor(mesh.vertices * (10.0 ** p))
    if np.any(scaled < -(2.0 ** (l - 1))) or np.any(scaled >= 2.0 ** (l - 1)):
        lo, hi = offset_range(l)
        worst = float(np.abs(scaled).max())
        raise QuantizeError(
            f"coordinate quantizes to magnitude {worst:.0f}, outside l={l} "
            f"range [{lo}, {hi}]"
        )
    coords = scaled.astype(np.int64)
    return QuantizedMesh(p=p, l=l, coords=coords, faces=mesh.faces.copy())


def dequantize(q):
    """Divide the integer coordinates by 10^p; error is below 10^-p."""
    return Mesh(vertices=q.coords.astype(np.float64) / 10.0 ** q.p, faces=q.faces.copy())


def to_word(v, l):
    """Signed value -> l-bit offset-binary word (unsigned int)."""
    lo, hi = offset_range(l)
    if not lo <= v <= hi:
        raise QuantizeError(f"value {v} outside offset range [{lo}, {hi}]")
    return v + (1 << (l - 1))


def from_word(u, l):
    if not 0 <= u < (1 << l):
        raise QuantizeError(f"word {u} does not fit in {l} bits")
    return u - (1 << (l - 1))


def to_bits(v, l):
    """Signed value -> length-l 0/1 array; index k carries weight 2^k of
    the offset word (k = 0 is the LSB)."""
    u = to_word(v, l)
    return np.array([(u >> k) & 1 for k in range(l)], dtype=np.uint8)


def from_bits(bits, l):
    if len(bits) != l:
        raise QuantizeError(f"expected {l} bits, got {len(bits)}")
    u = 0
    for k in range(l):
        u |= int(bits[k]) << k
    return from_word(u, l)


def offset_words(coords, l):
    """Vectorized to_word over an (n, 3) signed int64 array -> uint64."""
    if l == 64:
        return coords.astype(np.uint64) + np.uint64(1 << 63)
    return (coords + (1 << (l - 1))).astype(np.uint64)


def signed_coords(words, l):
    """Vectorized from_word: (n, 3) uint64 offset words -> signed int64."""
    if l == 64:
        return (words + np.uint64(1 << 63)).astype(np.int64)
    return words.astype(np.int64) - (1 << (l - 1))
