"""JSON codec for qpolar artifacts.

Code specifications, simulation reports, reliability profiles and threshold
results are written as UTF-8 JSON with sorted keys so that identical runs
produce identical bytes.
"""

import json
from enum import Enum
from fractions import Fraction
from typing import Any, Protocol, runtime_checkable

import numpy as np

from .transform import BitWord


@runtime_checkable
class Serializer(Protocol):
    """Protocol defining the interface for serializers."""

    def serialize(self, data: Any) -> bytes:
        """Serialize data to bytes.

        Raises:
            SerializationError: If serialization fails.
        """
        ...

    def deserialize(self, data: bytes) -> Any:
        """Deserialize data from bytes.

        Raises:
            SerializationError: If deserialization fails.
        """
        ...


class SerializationError(Exception):
    """Raised when serialization or deserialization fails."""
    pass


def pack_bits(bits: np.ndarray) -> dict[str, Any]:
    """Hex encoding (MSB-first packed bytes) with an explicit bit length."""
    bits = np.asarray(bits, dtype=np.uint8)
    return {'hex': np.packbits(bits).tobytes().hex(), 'bits': int(bits.shape[0])}


def unpack_bits(obj: dict[str, Any]) -> np.ndarray:
    """Inverse of :func:`pack_bits`."""
    try:
        length = int(obj['bits'])
        packed = np.frombuffer(bytes.fromhex(obj['hex']), dtype=np.uint8)
    except (KeyError, TypeError, ValueError) as e:
        raise SerializationError(f"Malformed bit string {obj!r}: {e}") from e
    bits = np.unpackbits(packed)
    if bits.shape[0] < length:
        raise SerializationError(f"Bit string shorter than its declared length {length}")
    return bits[:length].astype(np.uint8)


class JSONSerializer:
    """JSON serializer for qpolar outputs."""

    def _default(self, obj: Any) -> Any:
        """Convert non-JSON-serializable objects to JSON-serializable ones.

        Raises:
            TypeError: If the object cannot be converted.
        """
        if isinstance(obj, BitWord):
            return pack_bits(obj.bits)
        if isinstance(obj, np.ndarray):
            return obj.tolist()
        if isinstance(obj, np.integer):
            return int(obj)
        if isinstance(obj, np.floating):
            return float(obj)
        if isinstance(obj, np.bool_):
            return bool(obj)
        if isinstance(obj, Enum):
            return obj.value
        if isinstance(obj, Fraction):
            return {'numerator': obj.numerator, 'denominator': obj.denominator}
        if isinstance(obj, (set, frozenset)):
            return sorted(obj)
        if hasattr(obj, 'to_dict'):
            return obj.to_dict()
        raise TypeError(f"Object of type {obj.__class__.__name__} is not JSON serializable")

    def serialize(self, data: Any) -> bytes:
        """Serialize data to JSON bytes.

        Raises:
            SerializationError: If data is not JSON-serializable.
        """
        try:
            text = json.dumps(data, default=self._default, sort_keys=True, indent=2,
                              ensure_ascii=False, allow_nan=False)
        except (TypeError, ValueError) as e:
            raise SerializationError(f"Failed to serialize to JSON: {e}") from e
        return (text + '\n').encode('utf-8')

    def deserialize(self, data: bytes) -> Any:
        """Deserialize data from JSON bytes.

        Raises:
            SerializationError: If data is not valid JSON.
        """
        try:
            return json.loads(data.decode('utf-8'))
        except (json.JSONDecodeError, UnicodeDecodeError) as e:
            raise SerializationError(f"Failed to deserialize from JSON: {e}") from e
