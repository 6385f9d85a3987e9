"""The F' bounding process and the entanglement-assistance threshold solvers.

Branch C = 0 squares the fidelity and C = 1 maps F to 2F - F^2.  In the
index convention of :mod:`qpolar.transform` an index digit d selects
C = 1 - d, so digit 0 (the worse channel) grows the bound and digit 1 (the
better channel) shrinks it.
"""

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .channels import (PauliChannel, QuantumChannel, channel_fidelity,
                       coherent_information, induced_pair)
from .events import Event, emit
from .transform import block_exponent
from .types import ChannelFamily, EventType

logger = logging.getLogger(__name__)

MAX_ITERATIONS = 200
MONOTONICITY_GRID = 65

FAMILY_BRACKETS = {
    ChannelFamily.INDEPENDENT_EQUAL: (0.0, 0.25),
    ChannelFamily.DEPOLARIZING: (0.0, 0.5),
}


class SolverError(RuntimeError):
    """Raised when a root cannot be bracketed on a monotone interval."""


def fprime_step(fidelity: float, c: int) -> float:
    """One step of the F' process."""
    if not 0.0 <= fidelity <= 1.0:
        raise ValueError(f"Fidelity must lie in [0, 1], got {fidelity}")
    if c not in (0, 1):
        raise ValueError(f"Branch must be 0 or 1, got {c}")
    if c == 0:
        return fidelity * fidelity
    return 2.0 * fidelity - fidelity * fidelity


@dataclass(frozen=True)
class FidelityProcessState:
    """Value of the F' process after the branch choices in ``history``."""
    value: float
    history: tuple[int, ...] = ()

    def step(self, c: int) -> 'FidelityProcessState':
        return FidelityProcessState(fprime_step(self.value, c), (*self.history, c))


def sum_process(fa0: float, fp0: float, branches: Sequence[int]) -> list[float]:
    """Trajectory of F'_A + F'_P' when the phase process takes the opposite branches."""
    amp = FidelityProcessState(fa0)
    phase = FidelityProcessState(fp0)
    totals = [fa0 + fp0]
    for c in branches:
        amp = amp.step(c)
        phase = phase.step(1 - c)
        totals.append(amp.value + phase.value)
    return totals


def fprime_bound_profile(f0: float, n: int) -> np.ndarray:
    """Upper bounds on the fidelities of all n logical channels.

    Materializes one level at a time; entry j follows the branch string of
    index j.  Exact for erasure channels.
    """
    if not 0.0 <= f0 <= 1.0:
        raise ValueError(f"Initial fidelity must lie in [0, 1], got {f0}")
    k = block_exponent(n)
    values = np.array([f0], dtype=np.float64)
    for _ in range(k):
        worse = 2.0 * values - values * values
        better = values * values
        values = np.stack([worse, better], axis=1).reshape(-1)
    return values


def assistance_margin(ch: QuantumChannel) -> float:
    """F_A,0 + F_P',0 - 1; non-positive means no entanglement assistance is needed."""
    amplitude, phase = induced_pair(ch)
    return channel_fidelity(amplitude) + channel_fidelity(phase) - 1.0


def family_channel(family: ChannelFamily, t: float) -> PauliChannel:
    """The member of a one-parameter family with noise level t."""
    if family is ChannelFamily.INDEPENDENT_EQUAL:
        return PauliChannel.independent(t, t)
    return PauliChannel.depolarizing(t)


def _solve(f: Callable[[float], float], lo: float, hi: float, tol: float, what: str) -> float:
    if tol <= 0:
        raise ValueError(f"Tolerance must be positive, got {tol}")
    grid = np.linspace(lo, hi, MONOTONICITY_GRID)
    samples = np.array([f(t) for t in grid])
    steps = np.diff(samples)
    if not ((steps > 0).all() or (steps < 0).all()):
        raise SolverError(f"{what} is not strictly monotone on [{lo}, {hi}]")
    if np.sign(samples[0]) == np.sign(samples[-1]):
        raise SolverError(f"{what} has no sign change on [{lo}, {hi}]")
    try:
        return float(optimize.bisect(f, lo, hi, xtol=tol, maxiter=MAX_ITERATIONS))
    except RuntimeError as e:
        raise SolverError(f"Bisection for {what} failed: {e}") from e


def solve_threshold(family: ChannelFamily, tol: float = 1e-10) -> float:
    """Noise level at which the assistance margin crosses zero."""
    lo, hi = FAMILY_BRACKETS[family]
    return _solve(lambda t: assistance_margin(family_channel(family, t)), lo, hi, tol,
                  f"assistance margin of {family.value}")


def solve_coherent_zero(family: ChannelFamily, tol: float = 1e-10) -> float:
    """Noise level at which the coherent information crosses zero."""
    lo, hi = FAMILY_BRACKETS[family]
    return _solve(lambda t: coherent_information(family_channel(family, t)), lo, hi, tol,
                  f"coherent information of {family.value}")


@dataclass(frozen=True)
class ThresholdResult:
    family: ChannelFamily
    assistance_threshold: float
    coherent_zero: float
    tol: float

    def to_dict(self) -> dict:
        return {
            'family': self.family.value,
            'assistance_threshold': self.assistance_threshold,
            'coherent_zero': self.coherent_zero,
            'tol': self.tol,
        }


def threshold_summary(family: ChannelFamily, tol: float = 1e-10) -> ThresholdResult:
    result = ThresholdResult(
        family=family,
        assistance_threshold=solve_threshold(family, tol),
        coherent_zero=solve_coherent_zero(family, tol),
        tol=tol,
    )
    logger.debug("Solved thresholds for %s: %s", family.value, result)
    emit(Event(EventType.THRESHOLD_SOLVED, family.value, result))
    return result
