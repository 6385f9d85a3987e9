"""Deterministic signatures for cached reliability profiles."""

import hashlib
from dataclasses import fields, is_dataclass
from enum import Enum
from typing import Any

import numpy as np


class ProfileSignature:
    """Handles signature calculation and parameter hashing."""

    @staticmethod
    def _hash_parameters(parameters: dict[str, Any]) -> tuple:
        """Convert parameters into a hashable tuple."""
        return tuple(
            (name, ProfileSignature._hash_value(value))
            for name, value in sorted(parameters.items())
        )

    @staticmethod
    def _hash_value(value: Any) -> Any:  # noqa: ANN401
        """Convert a value into a hashable form."""
        if isinstance(value, str):
            return value
        if isinstance(value, float):
            return ('float', repr(value))
        if isinstance(value, Enum):
            return (type(value).__name__, value.value)
        if isinstance(value, np.ndarray):
            return ('ndarray', str(value.dtype), value.shape, value.tobytes().hex())
        if isinstance(value, (list | tuple)):
            return (type(value).__name__, len(value), tuple(ProfileSignature._hash_value(item) for item in value))
        if isinstance(value, dict):
            return ('dict', tuple(
                (ProfileSignature._hash_value(key), ProfileSignature._hash_value(val))
                for key, val in sorted(value.items())
            ))
        if is_dataclass(value):
            return ('dataclass', type(value).__name__, tuple(
                (f.name, ProfileSignature._hash_value(getattr(value, f.name)))
                for f in fields(value)
            ))
        return (type(value).__name__, str(value))

    @staticmethod
    def calculate(name: str, version: int, parameters: dict[str, Any]) -> int:
        """Calculate a deterministic hash signature."""
        components = (name, version, ProfileSignature._hash_parameters(parameters))
        components_str = str(components).encode('utf-8')
        return int(hashlib.sha256(components_str).hexdigest(), 16) % (10**10)
