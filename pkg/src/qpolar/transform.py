"""The polar transform G_k = G^{(x)k} over F_2 and its transpose.

Index convention: input index j (0-based) of the butterfly is the logical
channel whose branch string is the k-bit binary expansion of j, most
significant bit first.  Bit 0 selects the worse (check-node) branch and bit 1
the better (variable-node) branch of one polarization step.  No bit-reversal
permutation is applied anywhere; construction, decoding and simulation all
rely on this single convention.
"""

from collections.abc import Iterable
from dataclasses import dataclass, field

import numpy as np


def block_exponent(n: int) -> int:
    """Return k with n = 2**k, or raise ValueError."""
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise ValueError(f"Block length must be an integer, got {n!r}")
    n = int(n)
    if n <= 0 or n & (n - 1):
        raise ValueError(f"Block length must be a power of two, got {n}")
    return n.bit_length() - 1


@dataclass(frozen=True)
class TransformSpec:
    """Recursion depth of the transform."""
    k: int

    def __post_init__(self) -> None:
        if self.k < 0:
            raise ValueError(f"Recursion depth must be non-negative, got {self.k}")

    @property
    def n(self) -> int:
        return 1 << self.k

    @classmethod
    def from_length(cls, n: int) -> 'TransformSpec':
        return cls(block_exponent(n))


@dataclass(frozen=True, eq=False)
class BitWord:
    """Binary vector of power-of-two length."""
    bits: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        bits = np.asarray(self.bits)
        if bits.ndim != 1:
            raise ValueError("BitWord must be one-dimensional")
        block_exponent(bits.shape[0])
        if bits.size and not np.isin(bits, (0, 1)).all():
            raise ValueError("BitWord elements must be 0 or 1")
        bits = bits.astype(np.uint8, copy=True)
        bits.setflags(write=False)
        object.__setattr__(self, 'bits', bits)

    @classmethod
    def zeros(cls, n: int) -> 'BitWord':
        return cls(np.zeros(n, dtype=np.uint8))

    @classmethod
    def of(cls, values: Iterable[int]) -> 'BitWord':
        return cls(np.fromiter(values, dtype=np.uint8))

    @classmethod
    def from_hex(cls, text: str, length: int) -> 'BitWord':
        """Inverse of :meth:`to_hex`."""
        packed = np.frombuffer(bytes.fromhex(text), dtype=np.uint8)
        bits = np.unpackbits(packed)
        if bits.shape[0] < length:
            raise ValueError(f"Hex string too short for {length} bits")
        return cls(bits[:length])

    def to_hex(self) -> str:
        """Pack MSB-first into bytes and render as lowercase hex."""
        return np.packbits(self.bits).tobytes().hex()

    @property
    def n(self) -> int:
        return int(self.bits.shape[0])

    def reverse(self) -> 'BitWord':
        return BitWord(self.bits[::-1])

    def __len__(self) -> int:
        return self.n

    def __iter__(self):  # noqa: ANN204
        return iter(int(b) for b in self.bits)

    def __getitem__(self, index: int) -> int:
        return int(self.bits[index])

    def __xor__(self, other: 'BitWord') -> 'BitWord':
        if not isinstance(other, BitWord):
            return NotImplemented
        if other.n != self.n:
            raise ValueError(f"Length mismatch: {self.n} vs {other.n}")
        return BitWord(self.bits ^ other.bits)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitWord):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self.bits, other.bits))

    def __hash__(self) -> int:
        return hash((self.n, self.bits.tobytes()))

    def __repr__(self) -> str:
        return f"BitWord({''.join(str(int(b)) for b in self.bits)})"


def polar_transform(bits: np.ndarray, transpose: bool = False) -> np.ndarray:
    """Apply G_k (or G_k^T) along the last axis of a uint8 array.

    Each of the log2(n) passes XORs one half of every block of width 2*half
    into the other half, (n/2)*log2(n) XORs in total.
    """
    x = np.ascontiguousarray(bits, dtype=np.uint8).copy()
    n = x.shape[-1]
    block_exponent(n)
    lead = x.shape[:-1]
    half = 1
    while half < n:
        view = x.reshape(*lead, n // (2 * half), 2, half)
        if transpose:
            view[..., 1, :] ^= view[..., 0, :]
        else:
            view[..., 0, :] ^= view[..., 1, :]
        half *= 2
    return x


def encode(z: BitWord) -> BitWord:
    """Return G_k z over F_2; G_k is an involution."""
    return BitWord(polar_transform(z.bits))


def encode_transpose(x: BitWord) -> BitWord:
    """Return G_k^T x, the action of the transform in the phase basis."""
    return BitWord(polar_transform(x.bits, transpose=True))


def cnot_count(n: int) -> int:
    """Number of CNOT gates in the transform circuit of length n."""
    k = block_exponent(n)
    return (n // 2) * k


def kron_matrix(k: int) -> np.ndarray:
    """Explicit G^{(x)k} as a dense 0/1 matrix (for small k)."""
    g = np.array([[1, 1], [0, 1]], dtype=np.uint8)
    out = np.ones((1, 1), dtype=np.uint8)
    for _ in range(k):
        out = np.kron(out, g)
    return out
