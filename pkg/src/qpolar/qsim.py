"""Monte Carlo simulation of the two-stage quantum polar decoder.

The coherent decoder is simulated through its classical equivalent: a
Pauli error (u, v) is sampled, the amplitude code recovers u, and the phase
code recovers v using the recovered amplitude error as side output.  A block
succeeds when both stages decode their message exactly.

Stage conventions:
    amplitude  y = G_k z + u, decoded in natural order with frozen set A and E.
    phase      y' = R(G_k^T x + v) = G_k(R x) + R v, decoded on reversed
               indices with frozen set P and E and side output R(recovered_u).
"""

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np
from scipy.stats import norm

from .channels import (ERASURE_SYMBOL, QuantumChannel, QubitErasureChannel, format_channel,
                       induced_pair, sample_error)
from .construction import CodeSpec, net_rate
from .decoder import FrozenMap, SCDecoder, llr_from_outputs
from .events import Event, emit
from .streams import SeedStream
from .transform import BitWord, polar_transform
from .types import Basis, ChannelKind, EventType
from .workers import run_chunks

logger = logging.getLogger(__name__)

ORACLE_MAX_LENGTH = 8


class SpecMismatchError(ValueError):
    """A code is simulated against a channel it was not constructed for."""


@dataclass(frozen=True, eq=False)
class TrialResult:
    amp_ok: bool
    phase_ok: bool
    recovered_u: BitWord

    @property
    def block_ok(self) -> bool:
        return self.amp_ok and self.phase_ok


def wilson_interval(failures: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials < 1:
        raise ValueError(f"Trial count must be at least 1, got {trials}")
    if not 0 <= failures <= trials:
        raise ValueError(f"Failures must lie in [0, {trials}], got {failures}")
    if not 0.0 < confidence < 1.0:
        raise ValueError(f"Confidence must lie in (0, 1), got {confidence}")
    z = float(norm.ppf(0.5 + confidence / 2.0))
    p = failures / trials
    denom = 1.0 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    spread = z * np.sqrt(p * (1.0 - p) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, centre - spread), min(1.0, centre + spread)


@dataclass(frozen=True)
class RateEstimate:
    failures: int
    trials: int

    @property
    def rate(self) -> float:
        return self.failures / self.trials

    @property
    def interval(self) -> tuple[float, float]:
        return wilson_interval(self.failures, self.trials)

    @property
    def halfwidth(self) -> float:
        low, high = self.interval
        return (high - low) / 2.0

    def to_dict(self) -> dict[str, Any]:
        low, high = self.interval
        return {
            'failures': self.failures,
            'rate': self.rate,
            'ci_low': low,
            'ci_high': high,
            'ci_halfwidth': self.halfwidth,
        }


@dataclass(frozen=True)
class SimReport:
    """Aggregated outcome of a simulation run."""
    trials: int
    amp_err: RateEstimate
    phase_err: RateEstimate
    block_err: RateEstimate
    net_rate: float
    entanglement_rate: float
    seed: int
    config: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            'trials': self.trials,
            'amp_err': self.amp_err.to_dict(),
            'phase_err': self.phase_err.to_dict(),
            'block_err': self.block_err.to_dict(),
            'net_rate': self.net_rate,
            'entanglement_rate': self.entanglement_rate,
            'seed': self.seed,
            'config': dict(self.config),
        }


class TwoStageDecoder:
    """Amplitude then phase successive-cancellation decoding of one code.

    Owns its decoder workspace; use one instance per thread.
    """

    def __init__(self, spec: CodeSpec):
        self.spec = spec
        self.n = spec.n
        self.amplitude_channel, self.phase_channel = induced_pair(spec.channel)
        self._decoder = SCDecoder(self.n)
        self._amp_positions = spec.partition.amplitude_frozen
        # decoder position of physical input j is n - 1 - j
        self._phase_inputs = spec.partition.phase_frozen
        self._phase_positions = self.n - 1 - self._phase_inputs

    def message_words(self, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
        """Uniform amplitude and phase inputs with the code's frozen values in place.

        Entries on E are the trial's shared entanglement values.
        """
        partition = self.spec.partition
        z = rng.integers(0, 2, self.n, dtype=np.uint8)
        x = rng.integers(0, 2, self.n, dtype=np.uint8)
        z[partition.a] = partition.g
        x[partition.p] = partition.h
        return z, x

    def amplitude(self, z: np.ndarray, u: np.ndarray,
                  erased: np.ndarray | None = None) -> tuple[bool, np.ndarray]:
        """Decode the amplitude stage; return (success, recovered amplitude error)."""
        y = polar_transform(z) ^ u
        symbols = y.astype(np.intp)
        if erased is not None:
            symbols[erased] = ERASURE_SYMBOL
        frozen = FrozenMap(self._amp_positions, z[self._amp_positions], Basis.AMPLITUDE)
        z_hat = self._decoder.decode(llr_from_outputs(self.amplitude_channel, symbols), frozen)
        recovered = y ^ polar_transform(z_hat.bits)
        return bool(np.array_equal(z_hat.bits, z)), recovered

    def phase(self, x: np.ndarray, v: np.ndarray, side_u: np.ndarray,
              erased: np.ndarray | None = None) -> bool:
        """Decode the phase stage given the amplitude error recovered earlier."""
        w = (polar_transform(x, transpose=True) ^ v)[::-1].astype(np.intp)
        if self.phase_channel.kind is ChannelKind.EXTENDED_PHASE:
            symbols = w + 2 * side_u[::-1].astype(np.intp)
        else:
            symbols = w
        if erased is not None:
            symbols[erased[::-1]] = ERASURE_SYMBOL
        frozen = FrozenMap(self._phase_positions, x[self._phase_inputs], Basis.PHASE)
        x_hat = self._decoder.decode(llr_from_outputs(self.phase_channel, symbols), frozen)
        return bool(np.array_equal(x_hat.bits[::-1], x))

    def trial(self, rng: np.random.Generator) -> TrialResult:
        error = sample_error(self.spec.channel, self.n, rng)
        z, x = self.message_words(rng)
        amp_ok, recovered_u = self.amplitude(z, error.u, error.erased)
        phase_ok = self.phase(x, error.v, recovered_u, error.erased)
        return TrialResult(amp_ok, phase_ok, BitWord(recovered_u))


def run_trial(spec: CodeSpec, rng: np.random.Generator,
              decoder: TwoStageDecoder | None = None) -> TrialResult:
    """Simulate one block through both decoding stages."""
    return (decoder or TwoStageDecoder(spec)).trial(rng)


def check_channel(spec: CodeSpec, channel: QuantumChannel) -> None:
    """Raise SpecMismatchError unless the code was built for this channel."""
    if format_channel(channel) != format_channel(spec.channel):
        raise SpecMismatchError(
            f"Code was constructed for {format_channel(spec.channel)}, "
            f"not {format_channel(channel)}"
        )


def simulate(spec: CodeSpec, trials: int, seed: int = 0, threads: int | None = None,
             config: dict[str, Any] | None = None) -> SimReport:
    """Run independent trials; the report depends only on (spec, trials, seed)."""
    if trials < 1:
        raise ValueError(f"Trial count must be at least 1, got {trials}")
    stream = SeedStream(seed).child('simulate')
    emit(Event(EventType.SIMULATION_STARTED, 'simulate', {'n': spec.n, 'trials': trials}))

    def count(indices: range) -> np.ndarray:
        decoder = TwoStageDecoder(spec)
        failures = np.zeros(3, dtype=np.int64)
        for t in indices:
            result = decoder.trial(stream.trial(t))
            failures += (not result.amp_ok, not result.phase_ok, not result.block_ok)
        return failures

    amp, phase, block = (int(c) for c in np.sum(run_chunks(count, trials, threads), axis=0))
    report = SimReport(
        trials=trials,
        amp_err=RateEstimate(amp, trials),
        phase_err=RateEstimate(phase, trials),
        block_err=RateEstimate(block, trials),
        net_rate=net_rate(spec.partition),
        entanglement_rate=spec.partition.entanglement_rate,
        seed=seed,
        config=dict(config or {}),
    )
    logger.info("Simulated %d trials at n=%d: block error %.3g", trials, spec.n, report.block_err.rate)
    emit(Event(EventType.SIMULATION_FINISHED, 'simulate', report))
    return report


def _free_words(n: int, fixed: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Every word of length n with the given positions fixed."""
    free = np.setdiff1d(np.arange(n), fixed)
    words = np.zeros((1 << free.shape[0], n), dtype=np.uint8)
    if free.shape[0]:
        words[:, free] = np.array(list(itertools.product((0, 1), repeat=free.shape[0])), dtype=np.uint8)
    words[:, fixed] = values
    return words


def _exact(p: float) -> Fraction:
    return Fraction(p)


def _erasure_oracle(spec: CodeSpec, decoder: TwoStageDecoder) -> Fraction:
    n = spec.n
    p = _exact(spec.channel.p)
    z_words = _free_words(n, spec.partition.a, spec.partition.g)
    x_words = _free_words(n, spec.partition.p, spec.partition.h)
    zeros = np.zeros(n, dtype=np.uint8)
    success = Fraction(0)
    for pattern in itertools.product((False, True), repeat=n):
        erased = np.array(pattern, dtype=bool)
        count = int(erased.sum())
        weight = p ** count * (1 - p) ** (n - count)
        if weight == 0:
            continue
        # erased positions are reported as erasures whatever the Pauli was
        amp = sum(decoder.amplitude(z, zeros, erased)[0] for z in z_words)
        phase = sum(decoder.phase(x, zeros, zeros, erased) for x in x_words)
        success += weight * Fraction(amp, len(z_words)) * Fraction(phase, len(x_words))
    return 1 - success


def _pauli_oracle(spec: CodeSpec, decoder: TwoStageDecoder) -> Fraction:
    n = spec.n
    table = [[_exact(p) for p in row] for row in spec.channel.table.tolist()]
    z_words = _free_words(n, spec.partition.a, spec.partition.g)
    x_words = _free_words(n, spec.partition.p, spec.partition.h)
    patterns = [np.array(bits, dtype=np.uint8) for bits in itertools.product((0, 1), repeat=n)]

    # P(amp_ok | u); when the amplitude stage succeeds the recovered error is u itself
    amp_ok = [Fraction(sum(decoder.amplitude(z, u)[0] for z in z_words), len(z_words)) for u in patterns]
    success = Fraction(0)
    for i, u in enumerate(patterns):
        if amp_ok[i] == 0:
            continue
        for v in patterns:
            weight = Fraction(1)
            for ui, vi in zip(u.tolist(), v.tolist()):
                weight *= table[ui][vi]
            if weight == 0:
                continue
            phase = sum(decoder.phase(x, v, u) for x in x_words)
            success += weight * amp_ok[i] * Fraction(phase, len(x_words))
    return 1 - success


def exact_block_oracle(spec: CodeSpec) -> Fraction:
    """Exact block error probability by enumerating every error pattern.

    Messages and entanglement values are averaged exactly over all words.
    Limited to n <= 8; Pauli channels at n = 8 take minutes.
    """
    if spec.n > ORACLE_MAX_LENGTH:
        raise ValueError(f"Exact enumeration is limited to n <= {ORACLE_MAX_LENGTH}, got {spec.n}")
    decoder = TwoStageDecoder(spec)
    if isinstance(spec.channel, QubitErasureChannel):
        return _erasure_oracle(spec, decoder)
    return _pauli_oracle(spec, decoder)
