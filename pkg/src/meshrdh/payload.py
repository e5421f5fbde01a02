"""Embedding by MSB substitution and the three receiver cases.

Slot order is normative: embedding-set vertices ascending, axes x, y, z,
bit planes from the MSB (l-1) down to l-t. Payload bytes expand to a bit
stream MSB-first within each byte. Extraction needs only the data key
and the container; recovery needs only the model key and the container —
the partition and labels are re-derived from cleartext face data and the
aux info, never from plaintext coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import cipher
from .exceptions import CapacityError
from .locmap import AuxInfo, decode_labels, encode_labels
from .mesh_io import StegoContainer
from .predictor import build_label_map, predicted_words
from .quantizer import QuantizedMesh, signed_coords
from .topology import build_adjacency, divide_vertices


@dataclass(frozen=True)
class CapacityInfo:
    """Gross slot bits, aux-info overhead, and what is left for payload."""

    total_bits: int   # l_p: 3 * sum of labels
    aux_bits: int     # l_ai: serialized aux info length in bits
    net_bits: int     # usable payload room, floored at 0

    @property
    def max_payload_bytes(self):
        return self.net_bits // 8

    def embedding_rate(self, n):
        """Net bits per vertex; 0 when the aux info outweighs the room."""
        return max(self.total_bits - self.aux_bits, 0) / n


def capacity(label_map):
    """Capacity accounting for a label map, aux overhead included."""
    compressed = encode_labels(label_map.labels.tolist(), label_map.l)
    aux = AuxInfo(len(label_map.labels), 0, compressed)
    total = label_map.total_bits
    return CapacityInfo(
        total_bits=total,
        aux_bits=aux.bit_len,
        net_bits=max(total - aux.bit_len, 0),
    )


def _derive_partition(faces, n, strategy):
    return divide_vertices(build_adjacency(faces, n), n, strategy)


def iter_slots(partition, labels, l):
    """Yield (vertex, axis, t) in normative slot order, skipping t = 0."""
    for pos, u in enumerate(partition.embed_set):
        t = int(labels[pos])
        if t == 0:
            continue
        for axis in range(3):
            yield u, axis, t


def build_container(q, key_m, nonce, strategy="topology", scale=1.0):
    """Sender side: label, encrypt, and pack a mesh with no payload yet."""
    partition = _derive_partition(q.faces, q.n, strategy)
    label_map = build_label_map(q, partition)
    compressed = encode_labels(label_map.labels.tolist(), label_map.l)
    aux = AuxInfo(len(label_map.labels), 0, compressed)
    words = cipher.encrypt_mesh(q, key_m, nonce)
    return StegoContainer(
        p=q.p,
        l=q.l,
        strategy=strategy,
        nonce=nonce,
        scale=scale,
        aux=aux,
        words=words,
        faces=q.faces.copy(),
    )


def embed(container, cipher_data):
    """Data-hider side: substitute already-encrypted payload bits into the
    embeddable MSB planes. Only slot bits change; faces, prediction-set
    words, and non-slot planes are untouched."""
    l = container.l
    partition = _derive_partition(container.faces, container.n, container.strategy)
    labels = decode_labels(container.aux.compressed_map, container.aux.s_e_count, l)
    info = capacity_from_parts(labels, container.aux, l)
    nbits = 8 * len(cipher_data)
    if nbits > info.net_bits:
        raise CapacityError(
            f"payload of {len(cipher_data)} bytes exceeds net capacity; "
            f"maximum is {info.max_payload_bytes} bytes",
            max_bytes=info.max_payload_bytes,
        )
    bits = np.unpackbits(np.frombuffer(cipher_data, dtype=np.uint8))
    words = container.words.copy()
    pos = 0
    for u, axis, t in iter_slots(partition, labels, l):
        if pos >= nbits:
            break
        take = min(t, nbits - pos)
        chunk = 0
        for b in bits[pos:pos + take]:
            chunk = (chunk << 1) | int(b)
        pos += take
        shift = l - take
        w = int(words[u - 1, axis])
        w = (w & ((1 << shift) - 1)) | (chunk << shift)
        words[u - 1, axis] = np.uint64(w)
    aux = AuxInfo(container.aux.s_e_count, nbits, container.aux.compressed_map)
    return StegoContainer(
        p=container.p,
        l=l,
        strategy=container.strategy,
        nonce=container.nonce,
        scale=container.scale,
        aux=aux,
        words=words,
        faces=container.faces,
    )


def capacity_from_parts(labels, aux, l):
    total = 3 * int(sum(labels))
    return CapacityInfo(
        total_bits=total,
        aux_bits=aux.bit_len,
        net_bits=max(total - aux.bit_len, 0),
    )


def extract(container, key_a):
    """Case 1: pull the embedded bits back out and decrypt them with the
    data key. Needs neither the model key nor any plaintext coordinate."""
    l = container.l
    nbits = container.aux.payload_bit_len
    if nbits % 8 != 0:
        raise CapacityError("payload bit length is not byte-aligned")
    partition = _derive_partition(container.faces, container.n, container.strategy)
    labels = decode_labels(container.aux.compressed_map, container.aux.s_e_count, l)
    bits = np.empty(nbits, dtype=np.uint8)
    pos = 0
    for u, axis, t in iter_slots(partition, labels, l):
        if pos >= nbits:
            break
        take = min(t, nbits - pos)
        w = int(container.words[u - 1, axis])
        for i in range(take):
            bits[pos + i] = (w >> (l - 1 - i)) & 1
        pos += take
    if pos < nbits:
        raise CapacityError("container declares more payload bits than its slots hold")
    data = np.packbits(bits).tobytes()
    return cipher.encrypt_payload(data, key_a, container.nonce)


def recover(container, key_m):
    """Case 2: decrypt every coordinate, then rebuild the embedding-set
    prefixes from the prediction set. Bit-exact against the original
    quantized mesh."""
    l = container.l
    partition = _derive_partition(container.faces, container.n, container.strategy)
    labels = decode_labels(container.aux.compressed_map, container.aux.s_e_count, l)
    words = cipher.decrypt_words(container.words, l, key_m, container.nonce)
    pred, _ = predicted_words(words, partition, l)
    for pos, u in enumerate(partition.embed_set):
        t = int(labels[pos])
        if t == 0:
            continue
        shift = l - t
        for axis in range(3):
            w = int(words[u - 1, axis])
            top = int(pred[pos, axis]) >> shift
            words[u - 1, axis] = np.uint64((w & ((1 << shift) - 1)) | (top << shift))
    return QuantizedMesh(
        p=container.p, l=l, coords=signed_coords(words, l), faces=container.faces.copy()
    )


def extract_and_recover(container, key_a, key_m):
    """Case 3: both keys; extraction first, then recovery. Equal to the
    two single-key operations run independently."""
    return extract(container, key_a), recover(container, key_m)
