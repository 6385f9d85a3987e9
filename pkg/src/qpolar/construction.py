"""Reliability profiles, the Q/A/P/E partition and code specifications.

Phase reliabilities are computed on the phase-side channel in the decoder's
own (reversed) order and stored re-indexed by physical input, so that
``profile.phase[j]`` and ``profile.amp[j]`` describe the same input j.  The
re-indexing is index reversal, which complements every digit of the branch
string: the phase code makes the opposite channel choice at each step.
"""

import dataclasses
import logging
import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from .channels import (BinaryInputChannel, QuantumChannel, QubitErasureChannel, channel_fidelity,
                       coherent_information, format_channel, induced_pair, mutual_information,
                       parse_channel)
from .decoder import SCDecoder, llr_from_outputs
from .events import Event, emit
from .persistence import current_store
from .serializers import pack_bits, unpack_bits
from .signature import ProfileSignature
from .streams import SeedStream
from .threshold import fprime_bound_profile
from .transform import BitWord, TransformSpec, block_exponent, polar_transform
from .types import EventType, FrozenPolicy, ReliabilityMethod, ReliabilityMetric
from .workers import run_blocks

logger = logging.getLogger(__name__)

DEFAULT_EPSILON = 1e-3
DEFAULT_TRIALS = 10_000
PROFILE_VERSION = 2
TRIAL_BLOCK = 256


def phase_to_input_order(values: np.ndarray) -> np.ndarray:
    """Map phase-decoder order to physical input order (index reversal)."""
    return np.ascontiguousarray(np.asarray(values)[::-1])


def bec_reliability(p: float, n: int) -> np.ndarray:
    """Exact erasure probabilities of the n logical channels of BEC(p)."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"Erasure probability must lie in [0, 1], got {p}")
    k = block_exponent(n)
    z = np.array([p], dtype=np.float64)
    for _ in range(k):
        z = np.stack([2.0 * z - z * z, z * z], axis=1).reshape(-1)
    return z


@dataclass(frozen=True, eq=False)
class ErrorRateEstimate:
    """Per-index genie failure counts over a number of trials.

    When posterior sums are present, rates and standard errors come from them:
    the posterior error probability of a genie decision has the mean of its
    failure flag and a far smaller variance on reliable indices.
    """
    failures: np.ndarray
    trials: int
    seed: int
    posterior: np.ndarray | None = None
    posterior_squares: np.ndarray | None = None

    @property
    def rates(self) -> np.ndarray:
        if self.posterior is None:
            return self.failures / self.trials
        return np.clip(self.posterior / self.trials, 0.0, 1.0)

    @property
    def std_errors(self) -> np.ndarray:
        r = self.rates
        if self.posterior_squares is None:
            return np.sqrt(r * (1.0 - r) / self.trials)
        variance = np.maximum(self.posterior_squares / self.trials - r * r, 0.0)
        return np.sqrt(variance / self.trials)


def mc_reliability(ch: BinaryInputChannel, n: int, trials: int, stream: SeedStream,
                   threads: int | None = None) -> ErrorRateEstimate:
    """Genie-aided Monte Carlo estimate of every logical channel's failure rate.

    Each trial sends a uniformly random input word; trial t draws all of its
    randomness from ``stream.trial(t)``.
    """
    block_exponent(n)
    if trials < 1:
        raise ValueError(f"Trial count must be at least 1, got {trials}")

    def accumulate(indices: range) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        decoder = SCDecoder(n)
        failures = np.zeros(n, dtype=np.int64)
        posterior = np.zeros(n, dtype=np.float64)
        squares = np.zeros(n, dtype=np.float64)
        for t in indices:
            rng = stream.trial(t)
            x = rng.integers(0, 2, n, dtype=np.uint8)
            y = ch.sample_outputs(polar_transform(x), rng)
            flags, p = decoder.genie_posterior(llr_from_outputs(ch, y), BitWord(x))
            failures += flags
            posterior += p
            squares += p * p
        return failures, posterior, squares

    blocks = run_blocks(accumulate, trials, TRIAL_BLOCK, threads)
    failures, posterior, squares = (np.sum(parts, axis=0) for parts in zip(*blocks))
    return ErrorRateEstimate(failures.astype(np.int64), trials, stream.seed, posterior, squares)


@dataclass(frozen=True, eq=False)
class ReliabilityProfile:
    """Per-index reliabilities of the amplitude and phase codes.

    Monte Carlo profiles also carry the standard error of every value.
    """
    n: int
    amp: np.ndarray
    phase: np.ndarray
    method: ReliabilityMethod
    metric: ReliabilityMetric
    trials: int | None = None
    seed: int | None = None
    amp_se: np.ndarray | None = None
    phase_se: np.ndarray | None = None

    def __post_init__(self) -> None:
        block_exponent(self.n)
        for name in ('amp', 'phase'):
            values = np.asarray(getattr(self, name), dtype=np.float64)
            if values.shape != (self.n,):
                raise ValueError(f"{name} must have length {self.n}, got {values.shape}")
            if values.size and (values.min() < 0.0 or values.max() > 1.0):
                raise ValueError(f"{name} values must lie in [0, 1]")
            values.setflags(write=False)
            object.__setattr__(self, name, values)
        for name in ('amp_se', 'phase_se'):
            errors = getattr(self, name)
            if errors is None:
                continue
            errors = np.asarray(errors, dtype=np.float64)
            if errors.shape != (self.n,) or (errors < 0.0).any():
                raise ValueError(f"{name} must hold {self.n} non-negative values")
            errors.setflags(write=False)
            object.__setattr__(self, name, errors)

    def upper(self, sigmas: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
        """Amplitude and phase values raised by ``sigmas`` standard errors, capped at 1."""
        if not (np.isfinite(sigmas) and sigmas >= 0.0):
            raise ValueError(f"Confidence margin must be a non-negative number, got {sigmas}")
        bounds = []
        for values, errors in ((self.amp, self.amp_se), (self.phase, self.phase_se)):
            if errors is None or sigmas == 0.0:
                bounds.append(values)
            else:
                bounds.append(np.minimum(values + sigmas * errors, 1.0))
        return bounds[0], bounds[1]

    def metadata(self) -> dict[str, Any]:
        return {
            'method': self.method.value,
            'metric': self.metric.value,
            'trials': self.trials,
            'seed': self.seed,
        }

    def to_dict(self) -> dict[str, Any]:
        return {
            'n': self.n,
            'amp': self.amp.tolist(),
            'phase': self.phase.tolist(),
            'amp_se': None if self.amp_se is None else self.amp_se.tolist(),
            'phase_se': None if self.phase_se is None else self.phase_se.tolist(),
            **self.metadata(),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> 'ReliabilityProfile':
        return cls(
            n=data['n'],
            amp=np.array(data['amp'], dtype=np.float64),
            phase=np.array(data['phase'], dtype=np.float64),
            method=ReliabilityMethod(data['method']),
            metric=ReliabilityMetric(data['metric']),
            trials=data.get('trials'),
            seed=data.get('seed'),
            amp_se=None if data.get('amp_se') is None else np.array(data['amp_se'], dtype=np.float64),
            phase_se=None if data.get('phase_se') is None else np.array(data['phase_se'], dtype=np.float64),
        )


def _compute_profile(channel: QuantumChannel, n: int, method: ReliabilityMethod,
                     trials: int, seed: int, threads: int | None) -> ReliabilityProfile:
    if method is ReliabilityMethod.EXACT_BEC:
        if not isinstance(channel, QubitErasureChannel):
            raise ValueError("The exact-bec method requires an erasure channel")
        values = bec_reliability(channel.p, n)
        return ReliabilityProfile(n, values, phase_to_input_order(values), method,
                                  ReliabilityMetric.FIDELITY)

    amplitude, phase = induced_pair(channel)
    if method is ReliabilityMethod.FPRIME_BOUND:
        return ReliabilityProfile(
            n,
            fprime_bound_profile(channel_fidelity(amplitude), n),
            phase_to_input_order(fprime_bound_profile(channel_fidelity(phase), n)),
            method,
            ReliabilityMetric.FIDELITY,
        )

    stream = SeedStream(seed).child('reliability')
    amp_estimate = mc_reliability(amplitude, n, trials, stream.child('amplitude'), threads)
    phase_estimate = mc_reliability(phase, n, trials, stream.child('phase'), threads)
    return ReliabilityProfile(
        n,
        amp_estimate.rates,
        phase_to_input_order(phase_estimate.rates),
        method,
        ReliabilityMetric.ERROR_PROBABILITY,
        trials=trials,
        seed=seed,
        amp_se=amp_estimate.std_errors,
        phase_se=phase_to_input_order(phase_estimate.std_errors),
    )


def reliability_profile(channel: QuantumChannel, n: int,
                        method: ReliabilityMethod = ReliabilityMethod.MONTE_CARLO,
                        trials: int = DEFAULT_TRIALS, seed: int = 0,
                        threads: int | None = None) -> ReliabilityProfile:
    """Profile of both codes, served from the profile store when one is configured."""
    key = ProfileSignature.calculate('reliability_profile', PROFILE_VERSION, {
        'channel': format_channel(channel),
        'n': n,
        'method': method,
        'trials': trials if method is ReliabilityMethod.MONTE_CARLO else None,
        'seed': seed if method is ReliabilityMethod.MONTE_CARLO else None,
    })
    store = current_store()
    if store is not None and store.exists(key):
        logger.info("Loaded cached profile %s", key)
        profile = ReliabilityProfile.from_dict(store.load(key))
        emit(Event(EventType.PROFILE_CACHE_HIT, 'reliability_profile', {'key': key}))
        return profile

    profile = _compute_profile(channel, n, method, trials, seed, threads)
    emit(Event(EventType.PROFILE_COMPUTED, 'reliability_profile', {'key': key, **profile.metadata()}))
    if store is not None:
        store.save(profile.to_dict(), key)
    return profile


@dataclass(frozen=True, eq=False)
class IndexPartition:
    """Disjoint index sets Q, A, P, E covering 0..n-1, with frozen values."""
    n: int
    q: np.ndarray
    a: np.ndarray
    p: np.ndarray
    e: np.ndarray
    g: np.ndarray | None = None
    h: np.ndarray | None = None

    def __post_init__(self) -> None:
        for name in ('q', 'a', 'p', 'e'):
            values = np.sort(np.asarray(getattr(self, name), dtype=np.intp))
            values.setflags(write=False)
            object.__setattr__(self, name, values)
        joined = np.sort(np.concatenate([self.q, self.a, self.p, self.e]))
        if not np.array_equal(joined, np.arange(self.n)):
            raise ValueError("Q, A, P, E must be disjoint and cover every index")
        for name, owner in (('g', self.a), ('h', self.p)):
            values = getattr(self, name)
            if values is None:
                continue
            values = np.asarray(values, dtype=np.uint8)
            if values.shape != owner.shape:
                raise ValueError(f"{name} needs {owner.shape[0]} values, got {values.shape[0]}")
            object.__setattr__(self, name, values)

    @property
    def amplitude_frozen(self) -> np.ndarray:
        """Inputs the amplitude decoder treats as frozen (A and E)."""
        return np.sort(np.concatenate([self.a, self.e]))

    @property
    def phase_frozen(self) -> np.ndarray:
        """Inputs the phase decoder treats as frozen (P and E)."""
        return np.sort(np.concatenate([self.p, self.e]))

    @property
    def entanglement_rate(self) -> float:
        return self.e.shape[0] / self.n

    def sizes(self) -> dict[str, int]:
        return {name: int(getattr(self, name).shape[0]) for name in ('q', 'a', 'p', 'e')}

    def to_dict(self) -> dict[str, Any]:
        return {
            'index_base': 0,
            'q': self.q.tolist(),
            'a': self.a.tolist(),
            'p': self.p.tolist(),
            'e': self.e.tolist(),
            'g': None if self.g is None else pack_bits(self.g),
            'h': None if self.h is None else pack_bits(self.h),
        }

    @classmethod
    def from_dict(cls, n: int, data: dict[str, Any]) -> 'IndexPartition':
        if data.get('index_base', 0) != 0:
            raise ValueError("Only 0-based index sets are supported")
        return cls(
            n=n,
            q=np.array(data['q'], dtype=np.intp),
            a=np.array(data['a'], dtype=np.intp),
            p=np.array(data['p'], dtype=np.intp),
            e=np.array(data['e'], dtype=np.intp),
            g=None if data.get('g') is None else unpack_bits(data['g']),
            h=None if data.get('h') is None else unpack_bits(data['h']),
        )


def _profile_pair(rel_amp: np.ndarray, rel_phase: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    rel_amp = np.asarray(rel_amp, dtype=np.float64)
    rel_phase = np.asarray(rel_phase, dtype=np.float64)
    if rel_amp.shape != rel_phase.shape or rel_amp.ndim != 1:
        raise ValueError(f"Profile lengths differ: {rel_amp.shape} vs {rel_phase.shape}")
    return rel_amp, rel_phase


def _split(rel_amp: np.ndarray, rel_phase: np.ndarray, cutoff: float) -> IndexPartition:
    good_amp = rel_amp <= cutoff
    good_phase = rel_phase <= cutoff
    return IndexPartition(
        n=rel_amp.shape[0],
        q=np.flatnonzero(good_amp & good_phase),
        a=np.flatnonzero(~good_amp & good_phase),
        p=np.flatnonzero(good_amp & ~good_phase),
        e=np.flatnonzero(~good_amp & ~good_phase),
    )


def build_partition(rel_amp: np.ndarray, rel_phase: np.ndarray, epsilon: float) -> IndexPartition:
    """Split inputs by whether each code's reliability value is within epsilon."""
    rel_amp, rel_phase = _profile_pair(rel_amp, rel_phase)
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"Cutoff must lie in (0, 1), got {epsilon}")
    return _split(rel_amp, rel_phase, epsilon)


def rate_cutoff(rel_amp: np.ndarray, rel_phase: np.ndarray, rate: float) -> float:
    """Smallest profile value whose partition reaches the given net rate.

    Input j is good for both codes once the cutoff reaches max(amp_j, phase_j)
    and for one code once it reaches min(amp_j, phase_j), so the net rate
    never falls as the cutoff grows.
    """
    rel_amp, rel_phase = _profile_pair(rel_amp, rel_phase)
    if not -1.0 <= rate <= 1.0:
        raise ValueError(f"Net rate must lie in [-1, 1], got {rate}")
    n = rel_amp.shape[0]
    target = math.ceil(rate * n - 1e-9)
    candidates = np.unique(np.concatenate([rel_amp, rel_phase]))
    both = np.sort(np.maximum(rel_amp, rel_phase))
    either = np.sort(np.minimum(rel_amp, rel_phase))
    reached = (np.searchsorted(both, candidates, side='right')
               + np.searchsorted(either, candidates, side='right') - n)
    return float(candidates[np.argmax(reached >= target)])


def net_rate(partition: IndexPartition) -> float:
    """(|Q| - |E|) / n qubits per channel use."""
    return (partition.q.shape[0] - partition.e.shape[0]) / partition.n


def assign_frozen(partition: IndexPartition, policy: FrozenPolicy = FrozenPolicy.ALL_ZERO,
                  seed: int = 0) -> IndexPartition:
    """Fill the frozen amplitude values g (on A) and phase values h (on P).

    Values on E are drawn per trial by the simulator.
    """
    if policy is FrozenPolicy.ALL_ZERO:
        g = np.zeros(partition.a.shape[0], dtype=np.uint8)
        h = np.zeros(partition.p.shape[0], dtype=np.uint8)
    else:
        rng = SeedStream(seed).child('frozen').generator()
        g = rng.integers(0, 2, partition.a.shape[0], dtype=np.uint8)
        h = rng.integers(0, 2, partition.p.shape[0], dtype=np.uint8)
    return dataclasses.replace(partition, g=g, h=h)


def polarization_fractions(profile: ReliabilityProfile, epsilon: float) -> tuple[float, float]:
    """Fractions of inputs good for the amplitude and for the phase code."""
    partition = build_partition(profile.amp, profile.phase, epsilon)
    bad_amp = partition.amplitude_frozen.shape[0]
    bad_phase = partition.phase_frozen.shape[0]
    return 1.0 - bad_amp / profile.n, 1.0 - bad_phase / profile.n


def capacity_target(channel: QuantumChannel) -> float:
    """The rate the scheme approaches: coherent information, or 1 - 2p for erasure."""
    if isinstance(channel, QubitErasureChannel):
        return channel.capacity
    return coherent_information(channel)


@dataclass(frozen=True, eq=False)
class CodeSpec:
    """A complete quantum polar code ready for simulation."""
    transform: TransformSpec
    partition: IndexPartition
    epsilon: float
    channel: QuantumChannel
    method: dict[str, Any]
    frozen_policy: FrozenPolicy = FrozenPolicy.ALL_ZERO

    def __post_init__(self) -> None:
        if self.partition.n != self.transform.n:
            raise ValueError(
                f"Partition covers {self.partition.n} inputs, transform has {self.transform.n}"
            )
        if self.partition.g is None or self.partition.h is None:
            raise ValueError("Frozen values must be assigned before building a CodeSpec")

    @property
    def n(self) -> int:
        return self.transform.n

    def to_dict(self) -> dict[str, Any]:
        amplitude, phase = induced_pair(self.channel)
        return {
            'n': self.n,
            'k': self.transform.k,
            'epsilon': self.epsilon,
            'channel': format_channel(self.channel),
            **self.partition.to_dict(),
            'frozen_policy': self.frozen_policy.value,
            'method': dict(self.method),
            'sizes': self.partition.sizes(),
            'net_rate': net_rate(self.partition),
            'entanglement_rate': self.partition.entanglement_rate,
            'capacity_target': capacity_target(self.channel),
            'mutual_information': {
                'amplitude': mutual_information(amplitude),
                'phase': mutual_information(phase),
            },
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> 'CodeSpec':
        transform = TransformSpec.from_length(data['n'])
        if transform.k != data.get('k', transform.k):
            raise ValueError(f"Inconsistent n={data['n']} and k={data['k']}")
        return cls(
            transform=transform,
            partition=IndexPartition.from_dict(data['n'], data),
            epsilon=float(data['epsilon']),
            channel=parse_channel(data['channel']),
            method=dict(data.get('method', {})),
            frozen_policy=FrozenPolicy(data.get('frozen_policy', FrozenPolicy.ALL_ZERO.value)),
        )


def construct_code(channel: QuantumChannel, n: int, epsilon: float = DEFAULT_EPSILON,
                   method: ReliabilityMethod = ReliabilityMethod.MONTE_CARLO,
                   trials: int = DEFAULT_TRIALS, seed: int = 0,
                   policy: FrozenPolicy = FrozenPolicy.ALL_ZERO,
                   threads: int | None = None, rate: float | None = None,
                   sigmas: float = 0.0) -> CodeSpec:
    """Profile, partition and freeze a code for the given channel.

    Inputs are classified on profile values raised by ``sigmas`` standard
    errors.  With ``rate`` set, the cutoff is the smallest one reaching that
    net rate and ``epsilon`` is ignored; the returned CodeSpec records the cutoff used.
    """
    emit(Event(EventType.CONSTRUCTION_STARTED, 'construct_code',
               {'n': n, 'method': method.value, 'rate': rate, 'sigmas': sigmas}))
    profile = reliability_profile(channel, n, method, trials, seed, threads)
    amp, phase = profile.upper(sigmas)
    if rate is None:
        cutoff = epsilon
        partition = build_partition(amp, phase, epsilon)
    else:
        cutoff = rate_cutoff(amp, phase, rate)
        partition = _split(amp, phase, cutoff)
    spec = CodeSpec(
        transform=TransformSpec.from_length(n),
        partition=assign_frozen(partition, policy, seed),
        epsilon=cutoff,
        channel=channel,
        method={**profile.metadata(), 'sigmas': sigmas, 'target_rate': rate},
        frozen_policy=policy,
    )
    logger.info("Constructed n=%d code at cutoff %.3g: %s, net rate %.4f",
                n, cutoff, partition.sizes(), net_rate(partition))
    emit(Event(EventType.CONSTRUCTION_FINISHED, 'construct_code', spec))
    return spec
