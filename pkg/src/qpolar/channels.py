"""Pauli and erasure channels and the classical channels they induce.

Output symbols of every :class:`BinaryInputChannel` are small integers with a
side table of transition probabilities P(y|x):

* BSC: symbol = received bit.
* BEC: 0 and 1 are received bits, 2 is the erasure flag.
* Extended phase: symbol = w + 2*u for the output pair (w, u), where
  P((w, u)|x) = p_{u, w xor x}.
"""

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from ._kernels import LLR_CLAMP
from .transform import block_exponent
from .types import ChannelKind

PROBABILITY_TOLERANCE = 1e-12
ERASURE_SYMBOL = 2


class ChannelSpecError(ValueError):
    """Raised when a channel specification string cannot be parsed."""


def _check_probability(name: str, value: float) -> float:
    value = float(value)
    if not (-PROBABILITY_TOLERANCE <= value <= 1.0 + PROBABILITY_TOLERANCE) or math.isnan(value):
        raise ValueError(f"{name} must lie in [0, 1], got {value}")
    return min(max(value, 0.0), 1.0)


def _entropy(probabilities: np.ndarray) -> float:
    """Shannon entropy in bits; zero-probability terms contribute 0."""
    p = np.asarray(probabilities, dtype=np.float64).ravel()
    p = p[p > 0.0]
    return float(-(p * np.log2(p)).sum())


def binary_entropy(p: float) -> float:
    return _entropy(np.array([p, 1.0 - p]))


@dataclass(frozen=True)
class PauliChannel:
    """Qubit channel applying X^u Z^v with probability p_{u,v}."""
    p00: float
    p10: float
    p01: float
    p11: float

    def __post_init__(self) -> None:
        for name in ('p00', 'p10', 'p01', 'p11'):
            object.__setattr__(self, name, _check_probability(name, getattr(self, name)))
        total = self.p00 + self.p10 + self.p01 + self.p11
        if abs(total - 1.0) > PROBABILITY_TOLERANCE:
            raise ValueError(f"Pauli probabilities must sum to 1, got {total!r}")

    @classmethod
    def identity(cls) -> 'PauliChannel':
        return cls(1.0, 0.0, 0.0, 0.0)

    @classmethod
    def depolarizing(cls, q: float) -> 'PauliChannel':
        q = _check_probability('q', q)
        return cls(1.0 - q, q / 3.0, q / 3.0, q / 3.0)

    @classmethod
    def independent(cls, du: float, dv: float) -> 'PauliChannel':
        """Independent amplitude (X) and phase (Z) flips."""
        du = _check_probability('du', du)
        dv = _check_probability('dv', dv)
        return cls((1 - du) * (1 - dv), du * (1 - dv), (1 - du) * dv, du * dv)

    @property
    def table(self) -> np.ndarray:
        """2x2 array indexed [u, v]."""
        return np.array([[self.p00, self.p01], [self.p10, self.p11]], dtype=np.float64)

    @property
    def probabilities(self) -> np.ndarray:
        """Probabilities of I, X, Z, Y in that order."""
        return np.array([self.p00, self.p10, self.p01, self.p11], dtype=np.float64)

    @property
    def delta_u(self) -> float:
        return self.p10 + self.p11

    @property
    def delta_v(self) -> float:
        return self.p01 + self.p11


@dataclass(frozen=True)
class QubitErasureChannel:
    """Quantum erasure channel; both induced classical channels are BEC(p)."""
    p: float

    def __post_init__(self) -> None:
        object.__setattr__(self, 'p', _check_probability('p', self.p))

    @property
    def capacity(self) -> float:
        return max(0.0, 1.0 - 2.0 * self.p)


QuantumChannel = PauliChannel | QubitErasureChannel


@dataclass(frozen=True, eq=False)
class BinaryInputChannel:
    """Binary-input discrete memoryless channel with integer output symbols."""
    kind: ChannelKind
    transition: np.ndarray = field(repr=False)
    parameter: float | None = None
    pauli: PauliChannel | None = None

    def __post_init__(self) -> None:
        table = np.array(self.transition, dtype=np.float64)
        if table.ndim != 2 or table.shape[0] != 2:
            raise ValueError("Transition table must have shape (2, m)")
        if (table < 0).any():
            raise ValueError("Transition probabilities must be non-negative")
        sums = table.sum(axis=1)
        if np.abs(sums - 1.0).max() > PROBABILITY_TOLERANCE:
            raise ValueError(f"Transition rows must sum to 1, got {sums}")
        table.setflags(write=False)
        object.__setattr__(self, 'transition', table)

    @classmethod
    def bsc(cls, delta: float) -> 'BinaryInputChannel':
        delta = _check_probability('delta', delta)
        return cls(ChannelKind.BSC, [[1 - delta, delta], [delta, 1 - delta]], parameter=delta)

    @classmethod
    def bec(cls, p: float) -> 'BinaryInputChannel':
        p = _check_probability('p', p)
        return cls(ChannelKind.BEC, [[1 - p, 0.0, p], [0.0, 1 - p, p]], parameter=p)

    @classmethod
    def extended_phase(cls, ch: PauliChannel) -> 'BinaryInputChannel':
        p = ch.table
        rows = np.zeros((2, 4))
        for x in (0, 1):
            for u in (0, 1):
                for w in (0, 1):
                    rows[x, w + 2 * u] = p[u, w ^ x]
        return cls(ChannelKind.EXTENDED_PHASE, rows, pauli=ch)

    @property
    def alphabet_size(self) -> int:
        return int(self.transition.shape[1])

    @cached_property
    def llr_table(self) -> np.ndarray:
        """log(P(y|0)/P(y|1)) per symbol, clamped to +/-LLR_CLAMP.

        Symbols impossible under both inputs map to 0.
        """
        p0, p1 = self.transition
        out = np.zeros(self.alphabet_size)
        both = (p0 > 0) & (p1 > 0)
        out[both] = np.log(p0[both] / p1[both])
        out[(p0 > 0) & (p1 == 0)] = LLR_CLAMP
        out[(p0 == 0) & (p1 > 0)] = -LLR_CLAMP
        np.clip(out, -LLR_CLAMP, LLR_CLAMP, out=out)
        out.setflags(write=False)
        return out

    @cached_property
    def _cdf(self) -> np.ndarray:
        return np.cumsum(self.transition, axis=1)

    def sample_outputs(self, x: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """Draw one output symbol per input bit."""
        x = np.asarray(x, dtype=np.intp)
        r = rng.random(x.shape[0])
        symbols = (r[:, None] >= self._cdf[x]).sum(axis=1)
        return np.minimum(symbols, self.alphabet_size - 1).astype(np.intp)

    def describe(self) -> str:
        if self.kind is ChannelKind.EXTENDED_PHASE:
            return f"extended-phase({format_channel(self.pauli)})"
        return f"{self.kind.value}({self.parameter!r})"


@dataclass(frozen=True, eq=False)
class ErrorPattern:
    """Amplitude flips u and phase flips v of one block."""
    u: np.ndarray
    v: np.ndarray
    erased: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.u.shape != self.v.shape:
            raise ValueError("u and v must have equal length")

    @property
    def n(self) -> int:
        return int(self.u.shape[0])


def induced_amplitude(ch: PauliChannel) -> BinaryInputChannel:
    """W_A: BSC with flip probability p10 + p11."""
    return BinaryInputChannel.bsc(ch.delta_u)


def induced_phase(ch: PauliChannel) -> BinaryInputChannel:
    """W_P: BSC with flip probability p01 + p11."""
    return BinaryInputChannel.bsc(ch.delta_v)


def induced_extended_phase(ch: PauliChannel) -> BinaryInputChannel:
    """W_P': x -> (x + v, u) with probability p_{u,v}."""
    return BinaryInputChannel.extended_phase(ch)


def erasure_channel(p: float) -> BinaryInputChannel:
    """BEC(p), the induced channel of a qubit erasure channel in either basis."""
    return BinaryInputChannel.bec(p)


def induced_pair(ch: QuantumChannel) -> tuple[BinaryInputChannel, BinaryInputChannel]:
    """The channels seen by the amplitude decoder and the phase decoder."""
    if isinstance(ch, QubitErasureChannel):
        bec = erasure_channel(ch.p)
        return bec, bec
    return induced_amplitude(ch), induced_extended_phase(ch)


def channel_fidelity(ch: BinaryInputChannel) -> float:
    """Sum over outputs of sqrt(P(y|0) P(y|1))."""
    p0, p1 = ch.transition
    return float(min(1.0, np.sqrt(p0 * p1).sum()))


def mutual_information(ch: BinaryInputChannel) -> float:
    """Input-output mutual information in bits for uniform inputs."""
    output = 0.5 * ch.transition.sum(axis=0)
    conditional = 0.5 * (_entropy(ch.transition[0]) + _entropy(ch.transition[1]))
    return _entropy(output) - conditional


def coherent_information(ch: PauliChannel) -> float:
    """1 - H(p_uv), the coherent information for Bell-state input."""
    return 1.0 - _entropy(ch.probabilities)


def sample_error(ch: QuantumChannel, n: int, rng: np.random.Generator) -> ErrorPattern:
    """Draw i.i.d. Pauli errors (u_i, v_i) for a block of length n.

    For an erasure channel each erased qubit receives a uniformly random
    Pauli and is flagged in ``erased``.
    """
    block_exponent(n)
    if isinstance(ch, QubitErasureChannel):
        erased = rng.random(n) < ch.p
        u = (rng.integers(0, 2, n, dtype=np.uint8) & erased).astype(np.uint8)
        v = (rng.integers(0, 2, n, dtype=np.uint8) & erased).astype(np.uint8)
        return ErrorPattern(u, v, erased)
    outcome = rng.choice(4, size=n, p=ch.probabilities)
    u = (outcome & 1).astype(np.uint8)
    v = (outcome >> 1).astype(np.uint8)
    return ErrorPattern(u, v)


def _parse_params(body: str, text: str) -> dict[str, float]:
    params = {}
    for item in filter(None, body.split(',')):
        name, sep, value = item.partition('=')
        if not sep:
            raise ChannelSpecError(f"Malformed parameter '{item}' in channel spec '{text}'")
        try:
            params[name.strip()] = float(value)
        except ValueError:
            raise ChannelSpecError(f"Parameter '{name}' is not a number in '{text}'") from None
    return params


def parse_channel(text: str) -> QuantumChannel:
    """Parse ``kind:name=value,...`` channel specifications.

    Examples: ``depolarizing:q=0.1``, ``xz:du=0.05,dv=0.05``,
    ``pauli:p00=0.7,p10=0.1,p01=0.1,p11=0.1``, ``erasure:p=0.25``.
    """
    kind, _, body = text.partition(':')
    params = _parse_params(body, text)
    expected = {
        'depolarizing': {'q'},
        'xz': {'du', 'dv'},
        'pauli': {'p00', 'p10', 'p01', 'p11'},
        'erasure': {'p'},
    }
    if kind not in expected:
        raise ChannelSpecError(f"Unknown channel kind '{kind}' in '{text}'")
    if set(params) != expected[kind]:
        raise ChannelSpecError(
            f"Channel '{kind}' needs parameters {sorted(expected[kind])}, got {sorted(params)}"
        )
    try:
        if kind == 'depolarizing':
            return PauliChannel.depolarizing(params['q'])
        if kind == 'xz':
            return PauliChannel.independent(params['du'], params['dv'])
        if kind == 'pauli':
            return PauliChannel(params['p00'], params['p10'], params['p01'], params['p11'])
        return QubitErasureChannel(params['p'])
    except ValueError as e:
        raise ChannelSpecError(f"Invalid channel '{text}': {e}") from e


def format_channel(ch: QuantumChannel) -> str:
    """Canonical spec string; parse_channel(format_channel(ch)) == ch."""
    if isinstance(ch, QubitErasureChannel):
        return f"erasure:p={ch.p!r}"
    return f"pauli:p00={ch.p00!r},p10={ch.p10!r},p01={ch.p01!r},p11={ch.p11!r}"
