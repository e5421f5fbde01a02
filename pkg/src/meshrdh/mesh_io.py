"""Mesh file parsing (OFF, OBJ) and the binary stego container.

Only triangular meshes are accepted. Vertex indices are 1-based
internally; OFF faces are converted from the format's 0-based indices,
OBJ faces are already 1-based.

Container layout (all multi-byte header fields big-endian):

    4s   magic "MRDH"
    u16  version (1)
    u8   precision exponent p
    u8   bits per coordinate l
    u8   partition strategy (0 = topology, 1 = parity_only)
    12s  cipher nonce
    f64  pre-normalization scale factor (1.0 when unused)
    u32  vertex count n
    u32  face count m
    ...  aux info (self-delimiting, see locmap.AuxInfo)
    ...  coordinate payload: 3*n little-endian l-bit words,
         vertex order, x then y then z
    ...  faces: m * 3 * u32 BE, 1-based indices
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .exceptions import ContainerError, MeshFormatError, MeshParseError
from .locmap import AuxInfo

MAGIC = b"MRDH"
VERSION = 1
NONCE_BYTES = 12

STRATEGY_CODES = {"topology": 0, "parity_only": 1}
STRATEGY_NAMES = {code: name for name, code in STRATEGY_CODES.items()}

_HEADER = struct.Struct(">4sHBBB12sdII")

_WORD_DTYPES = {8: "<u1", 16: "<u2", 32: "<u4", 64: "<u8"}


def _check_faces(faces, n):
    if faces.ndim != 2 or faces.shape[1] != 3:
        raise MeshFormatError("faces must be an (m, 3) array")
    if faces.shape[0] < 1:
        raise MeshFormatError("mesh must have at least one face")
    if faces.min() < 1 or faces.max() > n:
        raise MeshFormatError(f"face index outside [1, {n}]")
    for row in faces:
        if len(set(row.tolist())) != 3:
            raise MeshFormatError(f"face {row.tolist()} repeats a vertex")


@dataclass(frozen=True, eq=False)
class Mesh:
    """Triangular mesh: (n, 3) float64 vertices and (m, 3) 1-based faces."""

    vertices: np.ndarray
    faces: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=np.float64)
        f = np.asarray(self.faces, dtype=np.int64)
        if v.ndim != 2 or v.shape[1] != 3:
            raise MeshFormatError("vertices must be an (n, 3) array")
        if v.shape[0] < 3:
            raise MeshFormatError("mesh must have at least three vertices")
        _check_faces(f, v.shape[0])
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "faces", f)

    @property
    def n(self):
        return self.vertices.shape[0]

    @property
    def m(self):
        return self.faces.shape[0]

    def __eq__(self, other):
        if not isinstance(other, Mesh):
            return NotImplemented
        return np.array_equal(self.vertices, other.vertices) and np.array_equal(
            self.faces, other.faces
        )


def _tokens(text):
    """Yield (line_number, tokens) for non-empty, non-comment lines."""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def _parse_floats(toks, lineno):
    try:
        return [float(t) for t in toks]
    except ValueError:
        raise MeshParseError(f"non-numeric coordinate in {toks!r}", lineno) from None


def _parse_off(data):
    lines = _tokens(data)
    try:
        lineno, toks = next(lines)
    except StopIteration:
        raise MeshParseError("empty OFF document") from None
    if toks[0] != "OFF":
        raise MeshParseError("missing OFF header", lineno)
    counts = toks[1:]
    if not counts:
        try:
            lineno, counts = next(lines)
        except StopIteration:
            raise MeshParseError("missing counts line", lineno) from None
    if len(counts) != 3:
        raise MeshParseError("counts line must be 'n m e'", lineno)
    try:
        n, m, _ = (int(t) for t in counts)
    except ValueError:
        raise MeshParseError("non-integer counts", lineno) from None

    vertices = []
    for _ in range(n):
        try:
            lineno, toks = next(lines)
        except StopIteration:
            raise MeshParseError(f"expected {n} vertices, file ended early") from None
        if len(toks) != 3:
            raise MeshParseError("vertex line must hold exactly x y z", lineno)
        vertices.append(_parse_floats(toks, lineno))

    faces = []
    for _ in range(m):
        try:
            lineno, toks = next(lines)
        except StopIteration:
            raise MeshParseError(f"expected {m} faces, file ended early") from None
        try:
            vals = [int(t) for t in toks]
        except ValueError:
            raise MeshParseError("non-integer face entry", lineno) from None
        if vals[0] != 3 or len(vals) != 4:
            raise MeshParseError("non-triangular face", lineno)
        idx = [v + 1 for v in vals[1:]]
        if min(idx) < 1 or max(idx) > n:
            raise MeshParseError(f"face index out of range [0, {n - 1}]", lineno)
        faces.append(idx)

    try:
        return Mesh(np.array(vertices), np.array(faces))
    except MeshFormatError as exc:
        raise MeshParseError(str(exc)) from None


def _parse_obj(data):
    vertices = []
    faces = []
    for lineno, toks in _tokens(data):
        kind = toks[0]
        if kind == "v":
            if len(toks) != 4:
                raise MeshParseError("vertex line must hold exactly x y z", lineno)
            vertices.append(_parse_floats(toks[1:], lineno))
        elif kind == "f":
            if len(toks) != 4:
                raise MeshParseError("non-triangular face", lineno)
            idx = []
            for t in toks[1:]:
                if "/" in t:
                    raise MeshParseError(
                        "texture/normal face references are not supported", lineno
                    )
                try:
                    idx.append(int(t))
                except ValueError:
                    raise MeshParseError("non-integer face index", lineno) from None
            faces.append((lineno, idx))
        elif kind in ("vn", "vt"):
            raise MeshParseError(f"'{kind}' attribute channels are not supported", lineno)
        elif kind in ("o", "g", "s", "usemtl", "mtllib"):
            continue
        else:
            raise MeshParseError(f"unsupported OBJ directive {kind!r}", lineno)
    if not vertices:
        raise MeshParseError("OBJ document holds no vertices")
    n = len(vertices)
    for lineno, face in faces:
        if min(face) < 1 or max(face) > n:
            raise MeshParseError(f"face index out of range [1, {n}]", lineno)
    try:
        return Mesh(np.array(vertices), np.array([f for _, f in faces]))
    except MeshFormatError as exc:
        raise MeshParseError(str(exc)) from None


def parse_mesh(data, fmt):
    """Parse OFF or OBJ bytes into a Mesh, preserving vertex/face order."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    fmt = fmt.lower()
    if fmt == "off":
        return _parse_off(data)
    if fmt == "obj":
        return _parse_obj(data)
    raise ValueError(f"unknown mesh format {fmt!r}")


def write_mesh(mesh, fmt):
    """Serialize a Mesh to OFF or OBJ bytes. Floats use repr precision, so
    parse_mesh(write_mesh(m)) round-trips exactly."""
    fmt = fmt.lower()
    lines = []
    if fmt == "off":
        lines.append("OFF")
        lines.append(f"{mesh.n} {mesh.m} 0")
        for x, y, z in mesh.vertices.tolist():
            lines.append(f"{x!r} {y!r} {z!r}")
        for i, j, k in mesh.faces.tolist():
            lines.append(f"3 {i - 1} {j - 1} {k - 1}")
    elif fmt == "obj":
        for x, y, z in mesh.vertices.tolist():
            lines.append(f"v {x!r} {y!r} {z!r}")
        for i, j, k in mesh.faces.tolist():
            lines.append(f"f {i} {j} {k}")
    else:
        raise ValueError(f"unknown mesh format {fmt!r}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def guess_format(path):
    path = str(path).lower()
    if path.endswith(".off"):
        return "off"
    if path.endswith(".obj"):
        return "obj"
    raise ValueError(f"cannot infer mesh format from {path!r}")


@dataclass(frozen=True, eq=False)
class StegoContainer:
    """Encrypted, possibly payload-carrying mesh plus cleartext metadata.

    words holds the 3*n encrypted coordinate words as an (n, 3) uint64
    array (each value fits in l bits); faces stay cleartext and identical
    to the source mesh.
    """

    p: int
    l: int
    strategy: str
    nonce: bytes
    scale: float
    aux: AuxInfo
    words: np.ndarray
    faces: np.ndarray

    def __post_init__(self):
        if self.strategy not in STRATEGY_CODES:
            raise ContainerError(f"unknown strategy {self.strategy!r}")
        if len(self.nonce) != NONCE_BYTES:
            raise ContainerError(f"nonce must be {NONCE_BYTES} bytes")
        if self.l not in _WORD_DTYPES:
            raise ContainerError(f"unsupported word size {self.l}")
        w = np.asarray(self.words, dtype=np.uint64)
        f = np.asarray(self.faces, dtype=np.int64)
        if w.ndim != 2 or w.shape[1] != 3:
            raise ContainerError("words must be an (n, 3) array")
        _check_faces(f, w.shape[0])
        object.__setattr__(self, "words", w)
        object.__setattr__(self, "faces", f)

    @property
    def n(self):
        return self.words.shape[0]

    @property
    def m(self):
        return self.faces.shape[0]

    def __eq__(self, other):
        if not isinstance(other, StegoContainer):
            return NotImplemented
        return (
            (self.p, self.l, self.strategy, self.nonce, self.aux)
            == (other.p, other.l, other.strategy, other.nonce, other.aux)
            and self.scale == other.scale
            and np.array_equal(self.words, other.words)
            and np.array_equal(self.faces, other.faces)
        )


def write_container(c):
    """Serialize a StegoContainer; read_container inverts bit-exactly."""
    header = _HEADER.pack(
        MAGIC,
        VERSION,
        c.p,
        c.l,
        STRATEGY_CODES[c.strategy],
        c.nonce,
        c.scale,
        c.n,
        c.m,
    )
    words = c.words.astype(_WORD_DTYPES[c.l]).tobytes()
    faces = c.faces.astype(">u4").tobytes()
    return header + c.aux.to_bytes() + words + faces


def read_container(data):
    if len(data) < _HEADER.size:
        raise ContainerError("container shorter than its fixed header")
    magic, version, p, l, strat, nonce, scale, n, m = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise ContainerError(f"bad magic {magic!r}")
    if version != VERSION:
        raise ContainerError(f"unsupported version {version}")
    if strat not in STRATEGY_NAMES:
        raise ContainerError(f"unknown strategy code {strat}")
    if l not in _WORD_DTYPES:
        raise ContainerError(f"unsupported word size {l}")
    pos = _HEADER.size
    aux = AuxInfo.from_bytes(data[pos:])
    pos += aux.byte_len
    word_bytes = 3 * n * (l // 8)
    face_bytes = 3 * m * 4
    if len(data) != pos + word_bytes + face_bytes:
        raise ContainerError(
            f"expected {pos + word_bytes + face_bytes} bytes, got {len(data)}"
        )
    words = (
        np.frombuffer(data, dtype=_WORD_DTYPES[l], count=3 * n, offset=pos)
        .astype(np.uint64)
        .reshape(n, 3)
    )
    faces = (
        np.frombuffer(data, dtype=">u4", count=3 * m, offset=pos + word_bytes)
        .astype(np.int64)
        .reshape(m, 3)
    )
    return StegoContainer(
        p=p,
        l=l,
        strategy=STRATEGY_NAMES[strat],
        nonce=nonce,
        scale=scale,
        aux=aux,
        words=words,
        faces=faces,
    )
