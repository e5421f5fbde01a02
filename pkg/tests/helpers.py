"""Shared test utilities: synthetic meshes and independent brute-force
oracles.

The oracles deliberately avoid the library's vectorized code paths: they
work bit by bit with plain Python integers so they stay an independent
check of the production implementation.
"""

import math

import numpy as np
from scipy.spatial import Delaunay

from meshrdh.mesh_io import Mesh


def random_mesh(rng, n, span=0.9):
    """Random planar-Delaunay triangulation with random heights.

    Gives realistic closed-patch topology (average degree about six).
    """
    if n < 4:
        verts = rng.uniform(-span, span, (3, 3))
        return Mesh(verts, np.array([[1, 2, 3]]))
    while True:
        pts2 = rng.uniform(-span, span, (n, 2))
        tri = Delaunay(pts2)
        if np.unique(tri.simplices).size == n:
            break
    verts = np.column_stack([pts2, rng.uniform(-span, span, n)])
    return Mesh(verts, tri.simplices.astype(np.int64) + 1)


def fan_mesh_family(max_n=10):
    """Deterministic family of small triangulations: fans and strips for
    every vertex count up to max_n. Used for exhaustive oracle checks."""
    meshes = []
    for n in range(3, max_n + 1):
        fan = [[1, i, i + 1] for i in range(2, n)]
        if fan:
            meshes.append((n, np.array(fan)))
        strip = [[i, i + 1, i + 2] for i in range(1, n - 1)]
        if strip:
            meshes.append((n, np.array(strip)))
    return meshes


def fixed_vertices(n, seed):
    rng = np.random.default_rng(seed)
    return rng.uniform(-0.9, 0.9, (n, 3))


# --- independent oracles -------------------------------------------------

def oracle_bits(value, l):
    """Offset-binary bits of a signed value, LSB first."""
    u = value + (1 << (l - 1))
    return [(u >> k) & 1 for k in range(l)]


def oracle_majority(patterns):
    l = len(patterns[0])
    out = []
    for k in range(l):
        ones = sum(p[k] for p in patterns)
        zeros = len(patterns) - ones
        out.append(1 if ones >= zeros else 0)
    return out


def oracle_prefix(target, predicted):
    t = 0
    for k in range(len(target) - 1, -1, -1):
        if target[k] != predicted[k]:
            break
        t += 1
    return t


def oracle_labels(coords, l, partition):
    """Per-vertex embeddable lengths recomputed from first principles."""
    labels = []
    for u, preds in zip(partition.embed_set, partition.predictors):
        if not preds:
            labels.append(0)
            continue
        t = l
        for axis in range(3):
            patterns = [oracle_bits(int(coords[v - 1, axis]), l) for v in preds]
            predicted = oracle_majority(patterns)
            target = oracle_bits(int(coords[u - 1, axis]), l)
            t = min(t, oracle_prefix(target, predicted))
        labels.append(t)
    return labels


def oracle_slots(partition, labels, l):
    """(vertex, axis, plane) triples in embedding order, MSB downward."""
    out = []
    for pos, u in enumerate(partition.embed_set):
        t = labels[pos]
        for axis in range(3):
            for plane in range(l - 1, l - 1 - t, -1):
                out.append((u, axis, plane))
    return out


def oracle_snr(orig, rec):
    n = len(orig)
    means = [sum(v[a] for v in orig) / n for a in range(3)]
    num = sum((v[a] - means[a]) ** 2 for v in orig for a in range(3))
    den = sum((r[a] - v[a]) ** 2 for v, r in zip(orig, rec) for a in range(3))
    if den == 0:
        return math.inf
    return 10 * math.log10(num / den)


def oracle_hausdorff(a, b):
    def directed(xs, ys):
        return max(
            min(math.dist(x, y) for y in ys) for x in xs
        )

    return max(directed(a, b), directed(b, a))
