"""Keystream generation and XOR encryption of coordinate words and payload.

The keystream is ChaCha20 keyed by a 256-bit key and a 96-bit per-mesh
nonce, so it is deterministic, prefix-consistent, and never reused
across meshes. Bit k of the stream lives in byte k // 8 at position
k % 8 counting from the LSB.

Consumption order over a mesh is normative: vertex index ascending, axis
x then y then z, bit k = 0 (LSB) through l-1 within each word. With
little-endian l-bit words this is exactly the raw byte stream, so
encryption XORs whole words at once.
"""

from __future__ import annotations

import numpy as np
from cryptography.hazmat.primitives.ciphers import Cipher, algorithms

from .exceptions import KeyFormatError
from .quantizer import QuantizedMesh, offset_words, signed_coords

KEY_BYTES = 32
NONCE_BYTES = 12

_WORD_DTYPES = {8: "<u1", 16: "<u2", 32: "<u4", 64: "<u8"}


def parse_key(hexstr, nbytes=KEY_BYTES):
    try:
        raw = bytes.fromhex(hexstr)
    except ValueError:
        raise KeyFormatError("key/nonce must be hexadecimal") from None
    if len(raw) != nbytes:
        raise KeyFormatError(f"expected {2 * nbytes} hex chars, got {len(hexstr)}")
    return raw


def keystream_bytes(key, nonce, nbytes):
    if len(key) != KEY_BYTES:
        raise KeyFormatError(f"key must be {KEY_BYTES} bytes")
    if len(nonce) != NONCE_BYTES:
        raise KeyFormatError(f"nonce must be {NONCE_BYTES} bytes")
    if nbytes == 0:
        return b""
    # ChaCha20 here takes a 16-byte nonce: 4-byte block counter + 96-bit nonce.
    algo = algorithms.ChaCha20(key, b"\x00" * 4 + nonce)
    return Cipher(algo, mode=None).encryptor().update(b"\x00" * nbytes)


def keystream(key, nonce, bit_count):
    """First bit_count keystream bits as a 0/1 uint8 array."""
    if bit_count < 0:
        raise ValueError("bit_count must be non-negative")
    raw = keystream_bytes(key, nonce, (bit_count + 7) // 8)
    bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")
    return bits[:bit_count]


def _keystream_words(key, nonce, count, l):
    raw = keystream_bytes(key, nonce, count * (l // 8))
    return np.frombuffer(raw, dtype=_WORD_DTYPES[l]).astype(np.uint64)


def xor_words(words, l, key_words):
    """XOR an (n, 3) uint64 word array with a flat keystream word array.

    Involutive; the test suite drives it with an all-zero stream to pin
    the identity behavior.
    """
    if key_words.size != words.size:
        raise ValueError("keystream length does not match word count")
    return words ^ key_words.reshape(words.shape)


def encrypt_words(words, l, key, nonce):
    return xor_words(words, l, _keystream_words(key, nonce, words.size, l))


def encrypt_mesh(q, key, nonce):
    """Encrypt a QuantizedMesh's coordinates; returns (n, 3) uint64
    offset-binary ciphertext words. Faces are never encrypted."""
    return encrypt_words(offset_words(q.coords, q.l), q.l, key, nonce)


def decrypt_words(words, l, key, nonce):
    # XOR is an involution, so decryption is re-encryption.
    return encrypt_words(words, l, key, nonce)


def decrypt_mesh(words, p, l, faces, key, nonce):
    """Inverse of encrypt_mesh, reassembled into a QuantizedMesh."""
    plain = decrypt_words(words, l, key, nonce)
    return QuantizedMesh(p=p, l=l, coords=signed_coords(plain, l), faces=faces)


def encrypt_payload(data, key, nonce):
    """XOR a byte string with the keystream; involutive."""
    ks = keystream_bytes(key, nonce, len(data))
    return bytes(a ^ b for a, b in zip(data, ks))
