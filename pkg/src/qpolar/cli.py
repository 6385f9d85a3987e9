"""Command-line front end: construct, simulate, threshold and sweep.

Every output file embeds the flags that produced it (minus ``--threads``,
``--cache-dir`` and ``-v``, which never change results), so repeated runs
with the same flags are byte-identical.
"""

import argparse
import csv
import logging
import math
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from .channels import PauliChannel, QuantumChannel, QubitErasureChannel, format_channel, parse_channel
from .construction import DEFAULT_EPSILON, DEFAULT_TRIALS, CodeSpec, construct_code
from .context import get_current_context
from .events import Event, emitter
from .persistence import set_profile_store
from .qsim import SimReport, check_channel, simulate
from .serializers import JSONSerializer, SerializationError
from .threshold import family_channel, threshold_summary
from .transform import block_exponent
from .types import ChannelFamily, EventType, FrozenPolicy, ReliabilityMethod

logger = logging.getLogger(__name__)

CSV_COLUMNS = ['n', 'channel_param', 'net_rate', 'ent_rate', 'amp_err', 'phase_err',
               'block_err', 'ci_halfwidth', 'trials', 'seed']
RUNTIME_FLAGS = {'threads', 'cache_dir', 'verbose', 'handler'}


def _log_event(event: Event) -> None:
    logger.info("%s from %s", event.type.name.lower(), event.source)


def _channel(text: str) -> QuantumChannel:
    try:
        return parse_channel(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _block_length(text: str) -> int:
    try:
        n = int(text)
        block_exponent(n)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None
    return n


def _real(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"must be finite, got {text}")
    return value


def _probability(text: str) -> float:
    value = _real(text)
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"must lie in (0, 1), got {text}")
    return value


def _positive_float(text: str) -> float:
    value = _real(text)
    if value <= 0.0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def _non_negative_float(text: str) -> float:
    value = _real(text)
    if value < 0.0:
        raise argparse.ArgumentTypeError(f"must be non-negative, got {text}")
    return value


def _net_rate(text: str) -> float:
    value = _real(text)
    if not -1.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"must lie in [-1, 1], got {text}")
    return value


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {text}")
    return value


def _non_negative(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative, got {text}")
    return value


def _family(text: str) -> ChannelFamily:
    try:
        return ChannelFamily.parse(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _parameters(text: str) -> list[float]:
    try:
        return [float(item) for item in text.split(',') if item]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text}") from None


def resolved_config(args: argparse.Namespace) -> dict[str, Any]:
    """Flags that determine the output, in JSON-friendly form."""
    config = {}
    for name, value in sorted(vars(args).items()):
        if name in RUNTIME_FLAGS:
            continue
        if isinstance(value, PauliChannel | QubitErasureChannel):
            value = format_channel(value)
        elif isinstance(value, Path):
            value = str(value)
        config[name] = value
    return config


def channel_parameter(channel: QuantumChannel) -> float:
    """Scalar noise level for CSV rows: erasure probability or total Pauli error."""
    if isinstance(channel, QubitErasureChannel):
        return channel.p
    return 1.0 - channel.p00


def _write_json(data: Any, path: Path | None) -> None:
    payload = JSONSerializer().serialize(data)
    if path is None:
        sys.stdout.write(payload.decode('utf-8'))
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(payload)


def _csv_row(n: int, param: float, report: SimReport) -> dict[str, Any]:
    return {
        'n': n,
        'channel_param': param,
        'net_rate': report.net_rate,
        'ent_rate': report.entanglement_rate,
        'amp_err': report.amp_err.rate,
        'phase_err': report.phase_err.rate,
        'block_err': report.block_err.rate,
        'ci_halfwidth': report.block_err.halfwidth,
        'trials': report.trials,
        'seed': report.seed,
    }


def _write_csv(rows: list[dict[str, Any]], path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open('w', newline='', encoding='utf-8') as f:
        writer = csv.DictWriter(f, fieldnames=CSV_COLUMNS, lineterminator='\n')
        writer.writeheader()
        writer.writerows(rows)


def cmd_construct(args: argparse.Namespace) -> int:
    spec = construct_code(args.channel, args.n, epsilon=args.epsilon, method=args.method,
                          trials=args.trials, seed=args.seed, policy=args.policy,
                          rate=args.rate, sigmas=args.sigmas)
    data = spec.to_dict()
    data['config'] = resolved_config(args)
    _write_json(data, args.out)
    sizes = data['sizes']
    sys.stdout.write(f"n={spec.n} |Q|={sizes['q']} |A|={sizes['a']} |P|={sizes['p']} |E|={sizes['e']}\n")
    sys.stdout.write(f"net_rate={data['net_rate']:.6f} entanglement_rate={data['entanglement_rate']:.6f} "
                     f"capacity_target={data['capacity_target']:.6f}\n")
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    spec = CodeSpec.from_dict(JSONSerializer().deserialize(args.spec.read_bytes()))
    if args.channel is not None:
        check_channel(spec, args.channel)
    report = simulate(spec, args.trials, seed=args.seed, config=resolved_config(args))
    _write_json(report.to_dict(), args.out)
    if args.csv is not None:
        _write_csv([_csv_row(spec.n, channel_parameter(spec.channel), report)], args.csv)
    return 0


def cmd_threshold(args: argparse.Namespace) -> int:
    result = threshold_summary(args.family, args.tol)
    data = result.to_dict()
    data['config'] = resolved_config(args)
    _write_json(data, args.out)
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    """Construct and simulate one code per (n, noise level)."""
    rows = []
    for n in args.n:
        for t in args.params:
            channel = family_channel(args.family, t)
            spec = construct_code(channel, n, epsilon=args.epsilon, method=args.method,
                                  trials=args.profile_trials, seed=args.seed)
            report = simulate(spec, args.trials, seed=args.seed)
            logger.info("n=%d t=%g block error %.3g", n, t, report.block_err.rate)
            rows.append(_csv_row(n, t, report))
    _write_csv(rows, args.csv)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('-v', '--verbose', action='store_true', help="log progress to stderr")
    common.add_argument('--threads', type=_positive, default=1, help="worker threads")
    common.add_argument('--cache-dir', type=Path, default=None,
                        help="directory caching reliability profiles")

    parser = argparse.ArgumentParser(prog='qpolar', description="Quantum polar code toolkit")
    sub = parser.add_subparsers(dest='command', required=True)

    construct = sub.add_parser('construct', parents=[common], help="build a code for a channel")
    construct.add_argument('--channel', type=_channel, required=True,
                           help="e.g. depolarizing:q=0.05, xz:du=0.05,dv=0.05, erasure:p=0.25")
    construct.add_argument('--n', type=_block_length, required=True)
    construct.add_argument('--epsilon', type=_probability, default=DEFAULT_EPSILON)
    construct.add_argument('--rate', type=_net_rate, default=None,
                           help="design for this net rate instead of a fixed epsilon")
    construct.add_argument('--sigmas', type=_non_negative_float, default=0.0,
                           help="classify on profile values plus this many standard errors")
    construct.add_argument('--method', type=ReliabilityMethod, default=ReliabilityMethod.MONTE_CARLO,
                           choices=list(ReliabilityMethod))
    construct.add_argument('--trials', type=_positive, default=DEFAULT_TRIALS,
                           help="Monte Carlo trials per reliability profile")
    construct.add_argument('--seed', type=_non_negative, default=0)
    construct.add_argument('--policy', type=FrozenPolicy, default=FrozenPolicy.ALL_ZERO,
                           choices=list(FrozenPolicy))
    construct.add_argument('--out', type=Path, required=True)
    construct.set_defaults(handler=cmd_construct)

    sim = sub.add_parser('simulate', parents=[common], help="estimate error rates of a code")
    sim.add_argument('--spec', type=Path, required=True, help="code JSON written by construct")
    sim.add_argument('--channel', type=_channel, default=None,
                     help="must match the channel the code was built for")
    sim.add_argument('--trials', type=_positive, default=1000)
    sim.add_argument('--seed', type=_non_negative, default=0)
    sim.add_argument('--out', type=Path, default=None)
    sim.add_argument('--csv', type=Path, default=None)
    sim.set_defaults(handler=cmd_simulate)

    threshold = sub.add_parser('threshold', parents=[common], help="solve noise thresholds")
    threshold.add_argument('--family', type=_family, required=True,
                           help="independent-equal or depolarizing")
    threshold.add_argument('--tol', type=_positive_float, default=1e-10)
    threshold.add_argument('--out', type=Path, default=None)
    threshold.set_defaults(handler=cmd_threshold)

    sweep = sub.add_parser('sweep', parents=[common], help="construct and simulate over a grid")
    sweep.add_argument('--family', type=_family, required=True)
    sweep.add_argument('--params', type=_parameters, required=True, help="noise levels, comma-separated")
    sweep.add_argument('--n', type=_block_length, nargs='+', required=True)
    sweep.add_argument('--epsilon', type=_probability, default=DEFAULT_EPSILON)
    sweep.add_argument('--method', type=ReliabilityMethod, default=ReliabilityMethod.MONTE_CARLO,
                       choices=list(ReliabilityMethod))
    sweep.add_argument('--profile-trials', type=_positive, default=DEFAULT_TRIALS)
    sweep.add_argument('--trials', type=_positive, default=1000)
    sweep.add_argument('--seed', type=_non_negative, default=0)
    sweep.add_argument('--csv', type=Path, required=True)
    sweep.set_defaults(handler=cmd_sweep)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    for event_type in EventType:
        emitter.listen(event_type)(_log_event)

    try:
        with get_current_context().replace(threads=args.threads):
            if args.cache_dir is None:
                return args.handler(args)
            with set_profile_store(args.cache_dir):
                return args.handler(args)
    except (ValueError, RuntimeError, OSError, SerializationError) as e:
        logger.debug("Command failed", exc_info=True)
        sys.stderr.write(f"qpolar {args.command}: error: {e}\n")
        return 1
