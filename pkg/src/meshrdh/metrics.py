"""Fidelity and capacity metrics: SNR, Hausdorff distance, embedding rate.

SNR compares the recovered mesh against the original relative to the
original's spread around its per-axis means. Hausdorff distance runs on
the vertex sets with the Euclidean norm; values for the full pipeline
sit near 10^-p, so it is computed exactly (KD-tree nearest neighbors,
no sampling).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .exceptions import MeshRdhError
from .locmap import decode_labels
from .payload import capacity_from_parts
from .topology import build_adjacency, divide_vertices

CSV_HEADER = "mesh,n,m,strategy,p,|S_e|,utilization,l_p,l_ai,ER,snr,hausdorff"


def snr(original, recovered):
    """Signal-to-noise ratio in dB between two vertex-aligned meshes.

    Returns math.inf when the meshes are identical (zero noise power).
    """
    a = original.vertices
    b = recovered.vertices
    if a.shape != b.shape:
        raise MeshRdhError(
            f"vertex count mismatch: {a.shape[0]} vs {b.shape[0]}"
        )
    signal = float(((a - a.mean(axis=0)) ** 2).sum())
    noise = float(((b - a) ** 2).sum())
    if noise == 0.0:
        return math.inf
    return 10.0 * math.log10(signal / noise)


def hausdorff(a, b):
    """Symmetric Hausdorff distance between two meshes' vertex sets."""
    pa = np.asarray(a.vertices if hasattr(a, "vertices") else a, dtype=np.float64)
    pb = np.asarray(b.vertices if hasattr(b, "vertices") else b, dtype=np.float64)
    if pa.size == 0 or pb.size == 0:
        raise MeshRdhError("Hausdorff distance needs non-empty vertex sets")
    d_ab = cKDTree(pb).query(pa)[0].max()
    d_ba = cKDTree(pa).query(pb)[0].max()
    return float(max(d_ab, d_ba))


@dataclass(frozen=True)
class EvalReport:
    mesh: str
    n: int
    m: int
    strategy: str
    p: int
    s_e: int
    utilization: float
    l_p: int
    l_ai: int
    er_bpv: float
    snr_db: float
    hausdorff: float

    def csv_row(self):
        snr_txt = "inf" if math.isinf(self.snr_db) else f"{self.snr_db:.6g}"
        return (
            f"{self.mesh},{self.n},{self.m},{self.strategy},{self.p},"
            f"{self.s_e},{self.utilization:.6g},{self.l_p},{self.l_ai},"
            f"{self.er_bpv:.6g},{snr_txt},{self.hausdorff:.6g}"
        )


def evaluate(original, container, recovered, name="mesh"):
    """Aggregate capacity and fidelity numbers from one pipeline run."""
    if original.n != container.n or original.n != recovered.n:
        raise MeshRdhError("original, container, and recovered meshes disagree on n")
    partition = divide_vertices(
        build_adjacency(container.faces, container.n), container.n, container.strategy
    )
    labels = decode_labels(
        container.aux.compressed_map, container.aux.s_e_count, container.l
    )
    info = capacity_from_parts(labels, container.aux, container.l)
    s_e = len(partition.embed_set)
    return EvalReport(
        mesh=name,
        n=container.n,
        m=container.m,
        strategy=container.strategy,
        p=container.p,
        s_e=s_e,
        utilization=s_e / container.n,
        l_p=info.total_bits,
        l_ai=info.aux_bits,
        er_bpv=info.embedding_rate(container.n),
        snr_db=snr(original, recovered),
        hausdorff=hausdorff(original, recovered),
    )
