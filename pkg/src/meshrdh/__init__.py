"""Reversible data hiding for encrypted 3D triangular meshes."""

from .cipher import (
    decrypt_mesh,
    encrypt_mesh,
    encrypt_payload,
    keystream,
    parse_key,
)
from .exceptions import (
    CapacityError,
    ContainerError,
    KeyFormatError,
    LabelDecodeError,
    MeshFormatError,
    MeshParseError,
    MeshRdhError,
    QuantizeError,
)
from .locmap import AuxInfo, decode_labels, encode_labels
from .mesh_io import (
    Mesh,
    StegoContainer,
    parse_mesh,
    read_container,
    write_container,
    write_mesh,
)
from .metrics import EvalReport, evaluate, hausdorff, snr
from .payload import (
    CapacityInfo,
    build_container,
    capacity,
    embed,
    extract,
    extract_and_recover,
    recover,
)
from .predictor import LabelMap, axis_label, build_label_map, predict_bits, vertex_label
from .quantizer import (
    QuantizedMesh,
    bit_length,
    dequantize,
    from_bits,
    quantize,
    to_bits,
)
from .topology import Adjacency, Partition, build_adjacency, divide_vertices

__version__ = "0.1.0"
