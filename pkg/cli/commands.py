"""Command-line surface: figure data, N_min, sampling and oracle checks"""

import argparse
import logging
import math
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional

import numpy as np

from config import ProtocolConfig, __version__
from core import oracle, protocol, register
from core.cvmode import GaussianSpec, auto_grid, gaussian_characteristic, gaussian_state
from core.errors import SimulationError
from data.models import CommandName, RunManifest
from utils.export import DataExporter, column_names, manifest_name

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2

DEFAULT_VARIANCES = [0.1, 1.0]


# Argument types

def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not value > 0 or not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return value


def tolerance(text: str) -> float:
    value = positive_float(text)
    if value >= 1:
        raise argparse.ArgumentTypeError(f"must lie in (0, 1), got {text}")
    return value


# Shared plumbing

def _recorded_arguments(args: argparse.Namespace) -> Dict:
    skip = {'handler', 'log_level'}
    return {key: value for key, value in sorted(vars(args).items()) if key not in skip}


def _write_manifest(args: argparse.Namespace, command: CommandName, config: Dict,
                    outputs: List[Path], manifest_file: str) -> Path:
    exporter = DataExporter(args.out_dir)
    manifest = RunManifest(
        command=command,
        config=config,
        arguments=_recorded_arguments(args),
        tool_version=__version__,
        outputs=[str(path) for path in outputs],
    )
    manifest.stamp()
    return exporter.export_manifest(manifest_file, manifest)


def _gaussian_readout(variance: float, config: ProtocolConfig,
                      epsilon: Optional[float]) -> protocol.ReadoutDistribution:
    if protocol.flat_regime(variance):
        logger.warning("Variance %g >= %g: P(l) is flat and carries little position "
                       "information", variance, protocol.upper_variance_limit())
    if config.eta is not None:
        protocol.lamb_dicke_check(variance, config.n_qubits, config.eta,
                                  config.lamb_dicke_margin)
    if config.r == 1.0:
        return protocol.readout_distribution_gaussian(variance, config.n_qubits, epsilon)
    return protocol.readout_distribution(gaussian_characteristic(variance),
                                         config.n_qubits, config.r)


# Commands

def cmd_distribution(args: argparse.Namespace) -> int:
    """P(l) columns for each variance"""
    variances = args.variance or DEFAULT_VARIANCES
    config = ProtocolConfig(n_qubits=args.n_qubits, r=args.r, epsilon=args.epsilon,
                            eta=args.lamb_dicke_eta)
    epsilon = None if args.untruncated else config.epsilon
    dists = [_gaussian_readout(v, config, epsilon) for v in variances]
    columns = [dist.probs for dist in dists]
    orders = [dist.truncation_order for dist in dists]

    size = config.register_size
    x = protocol.label_positions(size, reflect=args.reflect, r=config.r)
    rows = ([l, x[l]] + [column[l] for column in columns] for l in range(size))

    exporter = DataExporter(args.out_dir)
    out = exporter.export_csv(args.out, ['l', 'x'] + column_names(variances), rows)
    resolved = dict(config.to_dict(), variances=list(variances), reflect=args.reflect,
                    truncated=any(order is not None for order in orders),
                    truncation_orders=orders)
    _write_manifest(args, CommandName.DISTRIBUTION, resolved, [out], manifest_name(args.out))
    print(f"Wrote {out} ({size} rows)")
    return EXIT_OK


def cmd_variance_scan(args: argparse.Namespace) -> int:
    """Estimated variance of the mapped readout against ion number"""
    if args.n_min > args.n_max:
        raise SimulationError(f"--n-min {args.n_min} exceeds --n-max {args.n_max}")
    rows = protocol.variance_scan(args.variance, range(args.n_min, args.n_max + 1),
                                  args.epsilon)

    exporter = DataExporter(args.out_dir)
    out = exporter.export_csv(args.out, ['N', 'estimated_variance'], rows)
    resolved = {'variance': args.variance, 'n_min': args.n_min, 'n_max': args.n_max,
                'epsilon': args.epsilon, 'r': 1.0}
    _write_manifest(args, CommandName.VARIANCE_SCAN, resolved, [out],
                    manifest_name(args.out))
    for n_qubits, estimate in rows:
        print(f"N={n_qubits:2d}  variance={estimate:.6g}")
    return EXIT_OK


def cmd_nmin(args: argparse.Namespace) -> int:
    """Minimum ion number for a variance at tolerance 0.01"""
    result = protocol.n_min(args.variance)
    resolved = {'variance': args.variance, 'epsilon': protocol.NMIN_EPSILON,
                'n_min': result}
    _write_manifest(args, CommandName.NMIN, resolved, [], "nmin.manifest.json")
    print(result)
    return EXIT_OK


def cmd_sample(args: argparse.Namespace) -> int:
    """Seeded readout shots and their histogram against the analytic P(l)"""
    config = ProtocolConfig(n_qubits=args.n_qubits, seed=args.seed,
                            epsilon=args.epsilon or 0.01)
    dist = _gaussian_readout(args.variance, config, args.epsilon)
    shots = register.sample_readout(dist, config.seed, args.shots)
    counts = np.bincount(shots, minlength=dist.size)
    frequencies = counts / args.shots

    exporter = DataExporter(args.out_dir)
    shots_out = exporter.export_csv(args.out, ['shot', 'l'], enumerate(shots.tolist()))
    histogram_name = str(Path(args.out).with_name(Path(args.out).stem + "_histogram.csv"))
    histogram_out = exporter.export_csv(
        histogram_name, ['l', 'count', 'frequency', 'probability'],
        zip(range(dist.size), counts.tolist(), frequencies, dist.probs))

    deviation = float(np.max(np.abs(frequencies - dist.probs)))
    resolved = dict(config.to_dict(), variance=args.variance, shots=args.shots,
                    truncated=dist.truncation_order is not None,
                    truncation_order=dist.truncation_order)
    _write_manifest(args, CommandName.SAMPLE, resolved, [shots_out, histogram_out],
                    manifest_name(args.out))
    print(f"max |frequency - P(l)| = {deviation:.3e} over {args.shots} shots")
    return EXIT_OK


def cmd_oracle_check(args: argparse.Namespace) -> int:
    """Compare the joint state-vector oracle with the analytic readout"""
    cap = max(args.n_qubits, 8) if args.force else 8
    config = ProtocolConfig(n_qubits=args.n_qubits, r=args.r, theta=args.theta,
                            max_oracle_qubits=cap)
    K = config.register_size - 1
    rows = []
    grids = []
    failed = False
    for variance in args.variance or [0.1]:
        spec = GaussianSpec(variance)
        grid = auto_grid(spec, max_shift=config.r * K, policy=config.grid,
                         any_rotation=bool(config.theta))
        mode = gaussian_state(spec, grid)
        reference = None
        if not config.theta and config.r == 1.0:
            reference = protocol.readout_distribution_gaussian(variance, config.n_qubits)
        error = oracle.oracle_vs_analytic(mode, config, reference)
        passed = error <= args.tolerance
        failed = failed or not passed
        rows.append((config.n_qubits, variance, config.theta, error, passed))
        grids.append(grid.to_dict())
        print(f"N={config.n_qubits} variance={variance:g} theta={config.theta:g} "
              f"max_abs_error={error:.3e} {'ok' if passed else 'FAIL'}")

    exporter = DataExporter(args.out_dir)
    out = exporter.export_csv(args.out, ['N', 'variance', 'theta', 'max_abs_error', 'passed'],
                              rows)
    resolved = dict(config.to_dict(), variances=list(args.variance or [0.1]),
                    tolerance=args.tolerance, grids=grids)
    _write_manifest(args, CommandName.ORACLE_CHECK, resolved, [out], manifest_name(args.out))
    return EXIT_CHECK_FAILED if failed else EXIT_OK


HANDLERS: Dict[CommandName, Callable[[argparse.Namespace], int]] = {
    CommandName.DISTRIBUTION: cmd_distribution,
    CommandName.VARIANCE_SCAN: cmd_variance_scan,
    CommandName.NMIN: cmd_nmin,
    CommandName.SAMPLE: cmd_sample,
    CommandName.ORACLE_CHECK: cmd_oracle_check,
}


def cmd_replay(args: argparse.Namespace) -> int:
    """Re-run a command from its manifest"""
    manifest = DataExporter.load_manifest(args.manifest)
    recorded = argparse.Namespace(**manifest.arguments)
    if args.into is not None:
        recorded.out_dir = args.into
    logger.info("Replaying %s from %s", manifest.command.value, args.manifest)
    return HANDLERS[manifest.command](recorded)


# Parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ionmeter",
        description="Quadrature measurement of an ion-trap vibrational mode "
                    "with a Fourier-transformed register of N ions.",
    )
    parser.add_argument('--version', action='version', version=f"%(prog)s {__version__}")
    parser.add_argument('--log-level', default='WARNING',
                        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'])
    parser.add_argument('--out-dir', default='.', help="directory for CSV and manifest files")
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('distribution', help="readout distribution P(l) per variance")
    p.add_argument('--n-qubits', type=positive_int, default=9)
    p.add_argument('--variance', type=positive_float, action='append',
                   help="position variance; repeatable (default 0.1 and 1.0)")
    p.add_argument('--epsilon', type=tolerance, default=0.01)
    p.add_argument('--untruncated', action='store_true', help="keep every series term")
    p.add_argument('--r', type=positive_float, default=1.0)
    p.add_argument('--reflect', action=argparse.BooleanOptionalAction, default=True)
    p.add_argument('--lamb-dicke-eta', type=positive_float, default=None)
    p.add_argument('--out', default='distribution.csv')
    p.set_defaults(handler=cmd_distribution)

    p = sub.add_parser('variance-scan', help="estimated variance against ion number")
    p.add_argument('--variance', type=positive_float, required=True)
    p.add_argument('--n-min', type=positive_int, default=4)
    p.add_argument('--n-max', type=positive_int, default=14)
    p.add_argument('--epsilon', type=tolerance, default=0.01)
    p.add_argument('--out', default='variance_scan.csv')
    p.set_defaults(handler=cmd_variance_scan)

    p = sub.add_parser('nmin', help="minimum number of ions for a variance")
    p.add_argument('--variance', type=positive_float, required=True)
    p.set_defaults(handler=cmd_nmin)

    p = sub.add_parser('sample', help="seeded readout shots and histogram")
    p.add_argument('--n-qubits', type=positive_int, required=True)
    p.add_argument('--variance', type=positive_float, required=True)
    p.add_argument('--shots', type=positive_int, required=True)
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--epsilon', type=tolerance, default=None,
                   help="truncate the series (default: exact)")
    p.add_argument('--out', default='shots.csv')
    p.set_defaults(handler=cmd_sample)

    p = sub.add_parser('oracle-check', help="oracle against analytic readout")
    p.add_argument('--n-qubits', type=positive_int, default=6)
    p.add_argument('--variance', type=positive_float, action='append')
    p.add_argument('--theta', type=float, default=0.0)
    p.add_argument('--r', type=positive_float, default=1.0)
    p.add_argument('--tolerance', type=positive_float, default=1e-6)
    p.add_argument('--force', action='store_true', help="lift the 8-qubit cap")
    p.add_argument('--out', default='oracle_check.csv')
    p.set_defaults(handler=cmd_oracle_check)

    p = sub.add_parser('replay', help="re-run a command from its manifest")
    p.add_argument('manifest')
    p.add_argument('--into', default=None,
                   help="write outputs here instead of the recorded directory")
    p.set_defaults(handler=cmd_replay)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=args.log_level, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.handler(args)
    except SimulationError as e:
        logger.error("%s", e)
        print(f"{parser.prog}: error: {e}", file=sys.stderr)
        return EXIT_USAGE
