"""Type definitions for qpolar."""

from enum import Enum, auto


class ChannelKind(Enum):
    """Kind of a binary-input channel."""
    BSC = 'bsc'
    BEC = 'bec'
    EXTENDED_PHASE = 'extended-phase'


class ReliabilityMethod(Enum):
    """How a reliability profile was estimated."""
    EXACT_BEC = 'exact-bec'
    MONTE_CARLO = 'monte-carlo'
    FPRIME_BOUND = 'fprime-bound'


class ReliabilityMetric(Enum):
    """Quantity carried by a reliability profile."""
    FIDELITY = 'fidelity'
    ERROR_PROBABILITY = 'error-probability'


class FrozenPolicy(Enum):
    """How frozen amplitude and phase values are chosen."""
    ALL_ZERO = 'all-zero'
    RANDOM = 'random'


class Basis(Enum):
    """Basis a frozen map refers to."""
    AMPLITUDE = 'amplitude'
    PHASE = 'phase'


class ChannelFamily(Enum):
    """One-parameter Pauli channel families used by the threshold solvers."""
    INDEPENDENT_EQUAL = 'independent-equal'
    DEPOLARIZING = 'depolarizing'

    @classmethod
    def parse(cls, name: str) -> 'ChannelFamily':
        """Parse a family name, accepting the long form of the XZ family."""
        if name == 'independent-equal-xz':
            return cls.INDEPENDENT_EQUAL
        try:
            return cls(name)
        except ValueError:
            raise ValueError(f"Unknown channel family: {name}") from None


class EventType(Enum):
    """Types of events emitted while constructing and simulating codes."""
    CONSTRUCTION_STARTED = auto()
    CONSTRUCTION_FINISHED = auto()
    PROFILE_CACHE_HIT = auto()
    PROFILE_COMPUTED = auto()
    SIMULATION_STARTED = auto()
    SIMULATION_FINISHED = auto()
    THRESHOLD_SOLVED = auto()
