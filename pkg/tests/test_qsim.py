"""Tests for the two-stage simulator and the exact block oracle."""

import math
from fractions import Fraction

import numpy as np
import pytest

from qpolar.channels import PauliChannel, QuantumChannel, QubitErasureChannel
from qpolar.construction import CodeSpec, IndexPartition, assign_frozen, construct_code, net_rate
from qpolar.events import emitter
from qpolar.qsim import (SpecMismatchError, TwoStageDecoder, check_channel, exact_block_oracle,
                         run_trial, simulate, wilson_interval)
from qpolar.streams import SeedStream
from qpolar.threshold import assistance_margin
from qpolar.transform import TransformSpec
from qpolar.types import EventType, FrozenPolicy, ReliabilityMethod


def make_spec(channel: QuantumChannel, n: int, q, a=(), p=(), e=(),
              policy: FrozenPolicy = FrozenPolicy.RANDOM, seed: int = 0) -> CodeSpec:
    partition = IndexPartition(n=n, q=list(q), a=list(a), p=list(p), e=list(e))
    return CodeSpec(
        transform=TransformSpec.from_length(n),
        partition=assign_frozen(partition, policy, seed),
        epsilon=0.1,
        channel=channel,
        method={},
        frozen_policy=policy,
    )


def assert_matches_oracle(spec: CodeSpec, trials: int, seed: int) -> None:
    exact = float(exact_block_oracle(spec))
    report = simulate(spec, trials, seed=seed, threads=2)
    sigma = math.sqrt(max(exact * (1 - exact), 1e-12) / trials)
    assert abs(report.block_err.rate - exact) <= 4 * sigma


@pytest.fixture
def mixed_code() -> CodeSpec:
    return make_spec(PauliChannel.depolarizing(0.1), 4, q=[3], a=[1], p=[2], e=[0], seed=5)


def test_wilson_interval() -> None:
    """Test the 95% Wilson interval against known values."""
    low, high = wilson_interval(5, 10)
    assert low == pytest.approx(0.2366, abs=1e-4)
    assert high == pytest.approx(0.7634, abs=1e-4)
    assert wilson_interval(0, 100)[0] == 0.0
    assert wilson_interval(100, 100)[1] == 1.0


def test_wilson_interval_validation() -> None:
    """Test argument checks."""
    with pytest.raises(ValueError, match="at least 1"):
        wilson_interval(0, 0)
    with pytest.raises(ValueError, match="Failures"):
        wilson_interval(5, 4)
    with pytest.raises(ValueError, match="Confidence"):
        wilson_interval(1, 4, confidence=1.0)


@pytest.mark.parametrize("layout", [
    {"q": range(16)},
    {"q": [7, 11, 13, 14, 15], "a": [1, 2, 3, 9], "p": [4, 8, 10, 12], "e": [0, 5, 6]},
], ids=["all-quantum", "mixed"])
def test_identity_channel_always_succeeds(layout: dict) -> None:
    """Test that a noiseless channel never causes a block error."""
    spec = make_spec(PauliChannel.identity(), 16, **layout)
    decoder = TwoStageDecoder(spec)
    stream = SeedStream(2)
    for t in range(50):
        result = run_trial(spec, stream.trial(t), decoder)
        assert result.block_ok
        assert not result.recovered_u.bits.any()


def test_recovered_amplitude_error_matches_forced_pattern() -> None:
    """Test that a successful amplitude stage reports the true amplitude error."""
    spec = construct_code(PauliChannel.depolarizing(0.05), 64, trials=500, seed=1)
    decoder = TwoStageDecoder(spec)
    rng = SeedStream(6).generator()
    successes = 0
    for position in range(0, 64, 3):
        z, _ = decoder.message_words(rng)
        u = np.zeros(64, dtype=np.uint8)
        u[position] = 1
        amp_ok, recovered = decoder.amplitude(z, u)
        if amp_ok:
            successes += 1
            assert recovered.tolist() == u.tolist()
    assert successes > 0


def test_block_ok_implies_amp_ok(mixed_code: CodeSpec) -> None:
    """Test the stage accounting of single trials."""
    stream = SeedStream(3)
    for t in range(200):
        result = run_trial(mixed_code, stream.trial(t))
        assert result.block_ok == (result.amp_ok and result.phase_ok)


def test_simulate_single_trial() -> None:
    """Test that one trial yields 0/1 rates."""
    spec = make_spec(PauliChannel.depolarizing(0.2), 8, q=range(8))
    report = simulate(spec, 1, seed=4)
    assert report.trials == 1
    for estimate in (report.amp_err, report.phase_err, report.block_err):
        assert estimate.rate in (0.0, 1.0)


def test_simulate_is_deterministic(mixed_code: CodeSpec) -> None:
    """Test identical reports for identical seeds, regardless of threads."""
    first = simulate(mixed_code, 500, seed=11, threads=1)
    second = simulate(mixed_code, 500, seed=11, threads=1)
    threaded = simulate(mixed_code, 500, seed=11, threads=3)
    assert first == second
    assert first.to_dict() == threaded.to_dict()
    assert simulate(mixed_code, 500, seed=12).to_dict() != first.to_dict()


def test_simulate_union_bound() -> None:
    """Test block_err <= amp_err + phase_err."""
    spec = make_spec(PauliChannel.depolarizing(0.15), 8, q=[5, 6, 7], a=[1, 3], p=[2, 4], e=[0])
    report = simulate(spec, 2000, seed=0)
    assert report.block_err.failures <= report.amp_err.failures + report.phase_err.failures
    assert report.block_err.failures >= max(report.amp_err.failures, report.phase_err.failures)


def test_simulate_report_contents(mixed_code: CodeSpec) -> None:
    """Test rates, config and events of a report."""
    events = []
    emitter.listen(EventType.SIMULATION_FINISHED)(events.append)
    try:
        report = simulate(mixed_code, 100, seed=1, config={'note': 'x'})
    finally:
        emitter.remove(EventType.SIMULATION_FINISHED, events.append)
    data = report.to_dict()
    assert data['trials'] == 100
    assert data['net_rate'] == 0.0
    assert data['entanglement_rate'] == 0.25
    assert data['config'] == {'note': 'x'}
    assert data['block_err']['ci_low'] <= data['block_err']['rate'] <= data['block_err']['ci_high']
    assert events[0].data is report


def test_simulate_requires_trials(mixed_code: CodeSpec) -> None:
    """Test that zero trials are rejected."""
    with pytest.raises(ValueError, match="at least 1"):
        simulate(mixed_code, 0)


def test_check_channel(mixed_code: CodeSpec) -> None:
    """Test channel mismatch detection."""
    check_channel(mixed_code, PauliChannel.depolarizing(0.1))
    with pytest.raises(SpecMismatchError, match="constructed for"):
        check_channel(mixed_code, PauliChannel.depolarizing(0.2))


def test_oracle_identity_channel() -> None:
    """Test that the noiseless channel has zero block error."""
    spec = make_spec(PauliChannel.identity(), 4, q=[2, 3], a=[1], e=[0])
    assert exact_block_oracle(spec) == 0


def test_oracle_single_qubit_values() -> None:
    """Test hand-computed block errors at n=1."""
    erasure = make_spec(QubitErasureChannel(0.5), 1, q=[0])
    assert exact_block_oracle(erasure) == Fraction(3, 8)
    pauli = make_spec(PauliChannel.depolarizing(0.1), 1, q=[0])
    assert float(exact_block_oracle(pauli)) == pytest.approx(0.1, abs=1e-15)


def test_oracle_is_exact_fraction(mixed_code: CodeSpec) -> None:
    """Test that the oracle returns a probability as a Fraction."""
    value = exact_block_oracle(mixed_code)
    assert isinstance(value, Fraction)
    assert 0 <= value <= 1


def test_oracle_rejects_large_blocks() -> None:
    """Test the enumeration size limit."""
    spec = make_spec(PauliChannel.identity(), 16, q=range(16))
    with pytest.raises(ValueError, match="n <= 8"):
        exact_block_oracle(spec)


@pytest.mark.parametrize("n", [2, 4])
def test_simulation_matches_oracle_depolarizing(n: int) -> None:
    """Test Monte Carlo block errors against exact enumeration for depolarizing(0.1)."""
    assert_matches_oracle(make_spec(PauliChannel.depolarizing(0.1), n, q=range(n)), 20_000, seed=n)


def test_simulation_matches_oracle_mixed(mixed_code: CodeSpec) -> None:
    """Test agreement on a code with every index set present."""
    assert_matches_oracle(mixed_code, 20_000, seed=8)


def test_simulation_matches_oracle_erasure() -> None:
    """Test agreement for BEC(0.5) with every index in Q."""
    assert_matches_oracle(make_spec(QubitErasureChannel(0.5), 4, q=range(4)), 20_000, seed=9)


def test_frozen_policies_are_equivalent() -> None:
    """Test that all-zero and random frozen values give the same block error."""
    channel = PauliChannel.depolarizing(0.05)
    rates = []
    for policy in (FrozenPolicy.ALL_ZERO, FrozenPolicy.RANDOM):
        spec = construct_code(channel, 32, epsilon=0.05, method=ReliabilityMethod.FPRIME_BOUND,
                              policy=policy, seed=2)
        rates.append(simulate(spec, 4000, seed=3).block_err.rate)
    pooled = sum(rates) / 2
    sigma = math.sqrt(2 * max(pooled * (1 - pooled), 1e-12) / 4000)
    assert abs(rates[0] - rates[1]) <= 4 * sigma


def test_depolarizing_code_block_error() -> None:
    """Test the block error of an n=1024 code built for depolarizing(0.05)."""
    spec = construct_code(PauliChannel.depolarizing(0.05), 1 << 10, epsilon=1e-3, trials=10_000, seed=1,
                          threads=4)
    report = simulate(spec, 2000, seed=2, threads=4)
    assert report.block_err.rate < 0.05


def test_erasure_code_block_error() -> None:
    """Test the block error of an n=4096 code built for qubit erasure p=0.25."""
    spec = construct_code(QubitErasureChannel(0.25), 1 << 12, epsilon=1e-3, method=ReliabilityMethod.EXACT_BEC)
    report = simulate(spec, 2000, seed=2, threads=4)
    assert report.block_err.rate < 0.05
    assert report.net_rate > 0.0


def test_two_stage_scaling() -> None:
    """Test that a longer code at the same net rate has a clearly lower block error."""
    channel = PauliChannel.depolarizing(0.05)
    small = construct_code(channel, 1 << 8, epsilon=1e-3, trials=10_000, seed=1, threads=4)
    large = construct_code(channel, 1 << 12, rate=net_rate(small.partition), trials=10_000, seed=1,
                           threads=4)
    assert net_rate(large.partition) >= net_rate(small.partition)
    small_err = simulate(small, 2000, seed=2, threads=4).block_err
    large_err = simulate(large, 2000, seed=2, threads=4).block_err
    assert large_err.interval[1] < small_err.interval[0]


@pytest.mark.parametrize("q", [0.02, 0.05, 0.08, 0.11, 0.12])
def test_entanglement_free_regime(q: float) -> None:
    """Test that below the assistance threshold the entanglement fraction keeps falling with n."""
    channel = PauliChannel.depolarizing(q)
    assert assistance_margin(channel) < 0
    rates = [construct_code(channel, 1 << k, method=ReliabilityMethod.FPRIME_BOUND).partition.entanglement_rate
             for k in (8, 10, 12, 14)]
    assert all(later <= earlier for earlier, later in zip(rates, rates[1:]))
    assert rates[-1] < 0.2
    if rates[0] > 0:
        assert rates[-1] < rates[0] / 2
