"""Exception hierarchy for meshrdh."""


class MeshRdhError(Exception):
    """Base class for all meshrdh errors."""


class MeshParseError(MeshRdhError):
    """Malformed OFF/OBJ input. Carries the 1-based line number when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class MeshFormatError(MeshRdhError):
    """A Mesh or QuantizedMesh violating its structural invariants."""


class ContainerError(MeshRdhError):
    """Bad magic, version mismatch, or truncated stego container."""


class QuantizeError(MeshRdhError):
    """Precision out of range or a coordinate overflowing its bit width."""


class CapacityError(MeshRdhError):
    """Payload larger than the net embedding capacity."""

    def __init__(self, message, max_bytes=None):
        self.max_bytes = max_bytes
        super().__init__(message)


class LabelDecodeError(MeshRdhError):
    """Corrupted or truncated compressed label stream."""


class KeyFormatError(MeshRdhError):
    """Key or nonce string with the wrong length or non-hex characters."""
