"""Bitplane-mode prediction and per-vertex embeddable lengths.

Each embedding-set vertex is predicted, per axis, by taking the
bit-plane-wise majority of its predictor words (ties break to 1). The
label t of a vertex is the longest MSB prefix on which its own word
agrees with the prediction, minimized over x, y, z. During recovery the
top t planes of each coordinate are overwritten with the predicted bits,
which by construction restores the original exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .quantizer import offset_words, to_bits


@dataclass(frozen=True, eq=False)
class LabelMap:
    """Embeddable length t in [0, l] for each vertex of the embedding
    set, in embed_set order."""

    labels: np.ndarray
    l: int

    def __post_init__(self):
        arr = np.asarray(self.labels, dtype=np.int64)
        if arr.ndim != 1 or (arr.size and (arr.min() < 0 or arr.max() > self.l)):
            raise ValueError(f"labels must be a flat array within [0, {self.l}]")
        object.__setattr__(self, "labels", arr)

    @property
    def total_bits(self):
        """Gross capacity: three coordinates each carry t bits."""
        return 3 * int(self.labels.sum())

    def __eq__(self, other):
        if not isinstance(other, LabelMap):
            return NotImplemented
        return self.l == other.l and np.array_equal(self.labels, other.labels)


def predict_bits(patterns):
    """Per-bit majority of ≥1 equal-length bit vectors; exact ties give 1.

    Order of the predictors does not matter.
    """
    stack = np.asarray(patterns, dtype=np.int64)
    if stack.ndim != 2 or stack.shape[0] < 1:
        raise ValueError("need at least one predictor pattern")
    ones = stack.sum(axis=0)
    return (2 * ones >= stack.shape[0]).astype(np.uint8)


def axis_label(target, predicted):
    """Length of the common bit prefix starting at the MSB (index l-1)."""
    if len(target) != len(predicted):
        raise ValueError("bit vectors must have equal length")
    l = len(target)
    t = 0
    for k in range(l - 1, -1, -1):
        if target[k] != predicted[k]:
            break
        t += 1
    return t


def vertex_label(q, partition, vertex):
    """Embeddable length of one embedding-set vertex: the minimum of the
    three per-axis prefix lengths; 0 without predictors."""
    try:
        pos = partition.embed_set.index(vertex)
    except ValueError:
        raise ValueError(f"vertex {vertex} is not in the embedding set") from None
    preds = partition.predictors[pos]
    if not preds:
        return 0
    l = q.l
    t = l
    for axis in range(3):
        patterns = [to_bits(int(q.coords[u - 1, axis]), l) for u in preds]
        predicted = predict_bits(patterns)
        target = to_bits(int(q.coords[vertex - 1, axis]), l)
        t = min(t, axis_label(target, predicted))
        if t == 0:
            break
    return t


def _bit_lengths(x):
    """Vectorized int.bit_length over a uint64 array."""
    x = x.copy()
    out = np.zeros(x.shape, dtype=np.int64)
    for s in (32, 16, 8, 4, 2, 1):
        big = x >= (np.uint64(1) << np.uint64(s))
        out[big] += s
        x[big] >>= np.uint64(s)
    out += (x > 0)
    return out


def predicted_words(words, partition, l):
    """Majority-vote predicted offset words for every embedding vertex.

    Returns ((n_se, 3) uint64 predictions, (n_se,) bool has_predictors).
    Rows without predictors stay zero and are excluded by the mask.
    """
    n_se = len(partition.embed_set)
    out = np.zeros((n_se, 3), dtype=np.uint64)
    has = np.array([len(p) > 0 for p in partition.predictors], dtype=bool)
    rows = np.nonzero(has)[0]
    if rows.size == 0:
        return out, has
    lens = np.array([len(partition.predictors[r]) for r in rows], dtype=np.int64)
    flat = np.concatenate(
        [np.asarray(partition.predictors[r], dtype=np.int64) - 1 for r in rows]
    )
    starts = np.zeros(lens.shape[0], dtype=np.int64)
    np.cumsum(lens[:-1], out=starts[1:])
    gathered = words[flat]
    acc = np.zeros((rows.size, 3), dtype=np.uint64)
    for k in range(l):
        plane = ((gathered >> np.uint64(k)) & np.uint64(1)).astype(np.int64)
        ones = np.add.reduceat(plane, starts, axis=0)
        maj = (2 * ones >= lens[:, None]).astype(np.uint64)
        acc |= maj << np.uint64(k)
    out[rows] = acc
    return out, has


def build_label_map(q, partition):
    """Labels for the whole embedding set, in embed_set order."""
    words = offset_words(q.coords, q.l)
    pred, has = predicted_words(words, partition, q.l)
    embed_idx = np.asarray(partition.embed_set, dtype=np.int64) - 1
    target = words[embed_idx]
    mismatch_len = _bit_lengths(target ^ pred)
    labels = (q.l - mismatch_len).min(axis=1)
    labels[~has] = 0
    return LabelMap(labels=labels, l=q.l)
