"""qpolar - quantum polar codes for Pauli and erasure channels."""

from .channels import (BinaryInputChannel, ChannelSpecError, ErrorPattern, PauliChannel,
                       QubitErasureChannel, channel_fidelity, coherent_information, format_channel,
                       induced_amplitude, induced_extended_phase, induced_pair, induced_phase,
                       mutual_information, parse_channel, sample_error)
from .construction import (CodeSpec, IndexPartition, ReliabilityProfile, assign_frozen,
                           bec_reliability, build_partition, construct_code, mc_reliability,
                           net_rate, polarization_fractions, rate_cutoff, reliability_profile)
from .context import Context, get_current_context
from .decoder import FrozenMap, LlrVector, SCDecoder, genie_decode, sc_decode
from .events import Event, emit, listen
from .persistence import ProfileStore, set_profile_store
from .persistence_backends import FileSystemBackend, InMemoryBackend, PersistenceBackend
from .qsim import SimReport, TrialResult, exact_block_oracle, run_trial, simulate
from .streams import SeedStream
from .threshold import SolverError, ThresholdResult, fprime_bound_profile, solve_coherent_zero, solve_threshold
from .transform import BitWord, TransformSpec, encode, encode_transpose
from .types import (Basis, ChannelFamily, ChannelKind, EventType, FrozenPolicy, ReliabilityMethod,
                    ReliabilityMetric)

__all__ = [
    'Basis',
    'BinaryInputChannel',
    'BitWord',
    'ChannelFamily',
    'ChannelKind',
    'ChannelSpecError',
    'CodeSpec',
    'Context',
    'ErrorPattern',
    'Event',
    'EventType',
    'FileSystemBackend',
    'FrozenMap',
    'FrozenPolicy',
    'InMemoryBackend',
    'IndexPartition',
    'LlrVector',
    'PauliChannel',
    'PersistenceBackend',
    'ProfileStore',
    'QubitErasureChannel',
    'ReliabilityMethod',
    'ReliabilityMetric',
    'ReliabilityProfile',
    'SCDecoder',
    'SeedStream',
    'SimReport',
    'SolverError',
    'ThresholdResult',
    'TransformSpec',
    'TrialResult',
    'assign_frozen',
    'bec_reliability',
    'build_partition',
    'channel_fidelity',
    'coherent_information',
    'construct_code',
    'emit',
    'encode',
    'encode_transpose',
    'exact_block_oracle',
    'format_channel',
    'fprime_bound_profile',
    'genie_decode',
    'get_current_context',
    'induced_amplitude',
    'induced_extended_phase',
    'induced_pair',
    'induced_phase',
    'listen',
    'mc_reliability',
    'mutual_information',
    'net_rate',
    'parse_channel',
    'polarization_fractions',
    'rate_cutoff',
    'reliability_profile',
    'run_trial',
    'sample_error',
    'sc_decode',
    'set_profile_store',
    'simulate',
    'solve_coherent_zero',
    'solve_threshold',
]
