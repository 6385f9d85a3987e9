"""Successive-cancellation decoding for any binary-input channel.

Decisions are taken in natural index order 0..n-1.  Codes whose decisions
must run in reverse order (the phase stage) are decoded by reversing their
inputs and outputs before calling the decoder.
"""

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .channels import BinaryInputChannel
from .transform import BitWord, block_exponent, polar_transform
from .types import Basis

LLR_CLAMP = _kernels.LLR_CLAMP
TIE_BAND = _kernels.TIE_BAND


@dataclass(frozen=True, eq=False)
class LlrVector:
    """Per-position log(P(y|0)/P(y|1)), clamped to +/-LLR_CLAMP."""
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.clip(np.asarray(self.values, dtype=np.float64), -LLR_CLAMP, LLR_CLAMP)
        if not np.isfinite(values).all():
            raise ValueError("LLR values must not be NaN")
        block_exponent(values.shape[0])
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    @property
    def n(self) -> int:
        return int(self.values.shape[0])


@dataclass(frozen=True, eq=False)
class FrozenMap:
    """Frozen input positions and their values."""
    positions: np.ndarray
    values: np.ndarray
    basis: Basis = Basis.AMPLITUDE

    def __post_init__(self) -> None:
        positions = np.asarray(self.positions, dtype=np.intp)
        values = np.asarray(self.values, dtype=np.uint8)
        if positions.shape != values.shape:
            raise ValueError(
                f"Frozen values ({values.shape[0]}) must match positions ({positions.shape[0]})"
            )
        object.__setattr__(self, 'positions', positions)
        object.__setattr__(self, 'values', values)

    @classmethod
    def empty(cls, basis: Basis = Basis.AMPLITUDE) -> 'FrozenMap':
        return cls(np.zeros(0, dtype=np.intp), np.zeros(0, dtype=np.uint8), basis)

    def masks(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        """Dense (mask, values) arrays of length n."""
        if self.positions.size and (self.positions.min() < 0 or self.positions.max() >= n):
            raise ValueError(f"Frozen positions out of range for block length {n}")
        mask = np.zeros(n, dtype=np.uint8)
        values = np.zeros(n, dtype=np.uint8)
        mask[self.positions] = 1
        values[self.positions] = self.values
        return mask, values


def llr_from_outputs(ch: BinaryInputChannel, y: np.ndarray) -> LlrVector:
    """Look up the LLR of every received symbol."""
    y = np.asarray(y)
    if y.size and (y.min() < 0 or y.max() >= ch.alphabet_size):
        raise ValueError(f"Output symbols outside alphabet of size {ch.alphabet_size}")
    return LlrVector(ch.llr_table[y.astype(np.intp)])


@dataclass
class SCDecoder:
    """Successive-cancellation decoder with a reusable workspace.

    An instance belongs to one thread at a time.
    """
    n: int
    operations: int = 0
    _llr: np.ndarray = field(init=False, repr=False)
    _left: np.ndarray = field(init=False, repr=False)
    _right: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        block_exponent(self.n)
        size = 2 * self.n - 1
        self._llr = np.zeros(size, dtype=np.float64)
        self._left = np.zeros(size, dtype=np.uint8)
        self._right = np.zeros(size, dtype=np.uint8)

    def _run(self, llr: LlrVector, mask: np.ndarray, values: np.ndarray,
             truth: np.ndarray, genie: bool) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        if llr.n != self.n:
            raise ValueError(f"LLR length {llr.n} does not match decoder length {self.n}")
        u_hat = np.zeros(self.n, dtype=np.uint8)
        flags = np.zeros(self.n, dtype=np.uint8)
        posterior = np.zeros(self.n, dtype=np.float64)
        self.operations = int(_kernels.sc_kernel(
            llr.values, mask, values, truth, genie,
            u_hat, flags, posterior, self._llr, self._left, self._right,
        ))
        return u_hat, flags, posterior

    def decode(self, llr: LlrVector, frozen: FrozenMap) -> BitWord:
        """Estimate the full input word; frozen positions echo their values."""
        mask, values = frozen.masks(self.n)
        u_hat, _, _ = self._run(llr, mask, values, values, genie=False)
        return BitWord(u_hat)

    def genie(self, llr: LlrVector, truth: BitWord, frozen: FrozenMap | None = None) -> np.ndarray:
        """Per-index failure flags of genie-aided decoding."""
        flags, _ = self.genie_posterior(llr, truth, frozen)
        return flags

    def genie_posterior(self, llr: LlrVector, truth: BitWord,
                        frozen: FrozenMap | None = None) -> tuple[np.ndarray, np.ndarray]:
        """Failure flags and posterior error probabilities of genie-aided decoding.

        With uniform inputs the posterior has the same mean as the flags; frozen
        positions report zero for both.
        """
        if truth.n != self.n:
            raise ValueError(f"Truth length {truth.n} does not match decoder length {self.n}")
        mask, values = (frozen or FrozenMap.empty()).masks(self.n)
        _, flags, posterior = self._run(llr, mask, values, truth.bits, genie=True)
        return flags.astype(bool), posterior


def sc_decode(llr: LlrVector, frozen: FrozenMap) -> BitWord:
    """One-shot successive-cancellation decode."""
    return SCDecoder(llr.n).decode(llr, frozen)


def genie_decode(llr: LlrVector, truth: BitWord, frozen: FrozenMap | None = None) -> np.ndarray:
    """Per-index failure flags when every earlier decision is replaced by the truth."""
    return SCDecoder(llr.n).genie(llr, truth, frozen)


def brute_force_decisions(ch: BinaryInputChannel, y: np.ndarray, frozen: FrozenMap) -> np.ndarray:
    """Exhaustive successive posterior decisions over all 2**n inputs.

    Decision i maximizes sum_z P(y | G_k z) over inputs z agreeing with the
    earlier decisions; the tie rule matches the decoder.  Only for small n.
    """
    y = np.asarray(y, dtype=np.intp)
    n = y.shape[0]
    if block_exponent(n) > 4:
        raise ValueError("Brute-force decisions are limited to n <= 16")
    inputs = np.array(list(itertools.product((0, 1), repeat=n)), dtype=np.uint8)
    codewords = polar_transform(inputs)
    likelihood = ch.transition[codewords, y[None, :]].prod(axis=1)
    mask, values = frozen.masks(n)
    decisions = np.zeros(n, dtype=np.uint8)
    consistent = np.ones(inputs.shape[0], dtype=bool)
    for i in range(n):
        if mask[i]:
            bit = int(values[i])
        else:
            p0 = likelihood[consistent & (inputs[:, i] == 0)].sum()
            p1 = likelihood[consistent & (inputs[:, i] == 1)].sum()
            if p0 > 0 and p1 > 0:
                llr = float(np.log(p0 / p1))
            elif p0 > 0:
                llr = LLR_CLAMP
            elif p1 > 0:
                llr = -LLR_CLAMP
            else:
                llr = 0.0
            bit = 1 if llr < -TIE_BAND else 0
        decisions[i] = bit
        consistent &= inputs[:, i] == bit
    return decisions
