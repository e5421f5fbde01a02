"""Vertex adjacency and the embedding/prediction set division.

The division starts from index parity (odd -> embedding set S_e, even ->
prediction set S_p) and then greedily promotes even vertices whose
neighborhood supports it: an even vertex moves to S_e when, at scan
time, its neighbors in S_e number at most twice its neighbors in S_p and
at least two of its neighbors would remain in S_p to predict it. The
scan runs over even indices in ascending order, so the result is a
deterministic function of the face data alone — both the data hider and
the receiver re-derive it without seeing any plaintext coordinate.
"""

from __future__ import annotations

from dataclasses import dataclass

STRATEGIES = ("topology", "parity_only")


@dataclass(frozen=True)
class Adjacency:
    """Per-vertex sorted neighbor lists; neighbors[i - 1] serves vertex i."""

    neighbors: tuple

    def of(self, vertex):
        return self.neighbors[vertex - 1]

    @property
    def n(self):
        return len(self.neighbors)


@dataclass(frozen=True)
class Partition:
    """Embedding set, prediction set, and per-S_e-vertex predictor lists.

    embed_set and predict_set are ascending 1-based index lists;
    predictors[i] lists the S_p neighbors of embed_set[i].
    """

    embed_set: tuple
    predict_set: tuple
    predictors: tuple


def build_adjacency(faces, n):
    """Edge adjacency from face data: j is a neighbor of i iff some face
    contains both."""
    sets = [set() for _ in range(n)]
    for i, j, k in faces:
        i, j, k = int(i), int(j), int(k)
        sets[i - 1].update((j, k))
        sets[j - 1].update((i, k))
        sets[k - 1].update((i, j))
    return Adjacency(tuple(tuple(sorted(s)) for s in sets))


def divide_vertices(adj, n, strategy="topology"):
    """Split vertices 1..n into S_e and S_p."""
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    # 1-based parity: odd indices seed S_e.
    in_embed = [i % 2 == 1 for i in range(1, n + 1)]

    if strategy == "topology":
        for v in range(2, n + 1, 2):
            nbrs = adj.of(v)
            embed_ct = sum(in_embed[u - 1] for u in nbrs)
            predict_ct = len(nbrs) - embed_ct
            if embed_ct <= 2 * predict_ct and predict_ct >= 2:
                in_embed[v - 1] = True

    embed_set = tuple(i for i in range(1, n + 1) if in_embed[i - 1])
    predict_set = tuple(i for i in range(1, n + 1) if not in_embed[i - 1])
    predictors = tuple(
        tuple(u for u in adj.of(v) if not in_embed[u - 1]) for v in embed_set
    )
    return Partition(embed_set, predict_set, predictors)
