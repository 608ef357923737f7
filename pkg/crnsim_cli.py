#!/usr/bin/env python3
"""
CRN Simulator - CLI Entrypoint

Command-line tool for running channel-selection dissemination campaigns on random
cognitive radio networks and writing their result tables.
"""

import argparse
import json
import logging
import sys
from pathlib import Path

from crnsim.config import (
    SCENARIO_PRESETS,
    THREADS_ENV_VAR,
    ExperimentConfig,
    parse_betas,
    resolve_threads,
)
from crnsim.errors import CrnSimError
from crnsim.experiment import beta_sweep, run_campaign, scenario_topology
from crnsim.topology import save_topology, topology_to_dict
from crnsim.tracelog import TraceLog

LOG_FORMAT = '%(asctime)s [%(levelname)s] %(name)s: %(message)s'


def load_config(args) -> ExperimentConfig:
    """Config file (or Ch=5 defaults) with command-line overrides applied."""
    config = ExperimentConfig.load(Path(args.config)) if args.config else ExperimentConfig()
    return config.with_overrides(
        preset=getattr(args, 'preset', None),
        strategies=getattr(args, 'strategies', None),
        runs=getattr(args, 'runs', None),
        master_seed=getattr(args, 'seed', None),
        dump_traces=True if getattr(args, 'dump_traces', False) else None,
    )


def print_progress(done: int, total: int) -> None:
    step = max(1, total // 20)
    if done % step == 0 or done == total:
        print(f"  runs: {done}/{total}", flush=True)


def describe(config: ExperimentConfig) -> None:
    print(f"  - Nodes: {config.n_cr} CR, {config.n_pr} PR")
    print(f"  - Channels: {config.channels} (Acs size {config.acs_size}), beta={config.beta}")
    print(f"  - Slots per channel: {config.tau_t}, activity probability: {config.activity_prob}")
    print(f"  - Area: {config.area_side:g} m, range: {config.radius:g} m, TTL: {config.resolved_ttl()}")
    print(f"  - Runs: {config.runs}, master seed: {config.master_seed}")


def cmd_run(args):
    """Run a dissemination campaign and write hops/delivery/summary CSVs."""
    print("CRN Dissemination Campaign")
    print("=" * 50)

    config = load_config(args)
    threads = resolve_threads(args.threads)
    out_dir = Path(args.out)

    print("\n[1/2] Configuration")
    describe(config)
    print(f"  - Strategies: {','.join(config.strategies)}")
    print(f"  - Threads: {threads}")

    print("\n[2/2] Simulating...")
    output = run_campaign(config, out_dir, threads=threads, progress=print_progress)

    print(f"\n{'=' * 50}")
    print(f"{'strategy':8} | {'tx/node':>8} | {'reached':>8} | hop {config.resolved_ttl()} receivers")
    for result in output.results:
        print(
            f"{result.strategy:8} | {result.mean_tx_per_node:8.2f} | "
            f"{100 * result.reached_fraction:7.1f}% | {result.hop_mean[-1] if result.hop_mean else 0:.2f}"
        )
    print("\nWrote:")
    for path in output.files:
        print(f"  {path}")
    if config.dump_traces:
        stats = TraceLog(out_dir).stats()
        print(
            f"  ({stats['trace_files']} trace files, "
            f"{stats['total_size_bytes'] / 1024:.1f} KB)"
        )
    return 0


def cmd_sweep_beta(args):
    """Run the SURF campaign for several tenancy factors."""
    print("SURF Tenancy Factor Sweep")
    print("=" * 50)

    config = load_config(args)
    betas = parse_betas(args.betas)
    threads = resolve_threads(args.threads)

    print("\n[1/2] Configuration")
    describe(config)
    print(f"  - Betas: {','.join(str(b) for b in betas)}")

    print(f"\n[2/2] Simulating {len(betas)} campaigns...")
    output = beta_sweep(config, betas, Path(args.out), threads=threads)

    print(f"\n{'=' * 50}")
    for result in output.results:
        print(
            f"  beta={result.beta:3d}: reached {100 * result.reached_fraction:5.1f}%, "
            f"collision rate {result.mean_collision_rate:.3f}"
        )
    print(f"\nWrote: {output.files[0]}")
    return 0


def cmd_dump_topology(args):
    """Write the topology a campaign would use for its first run."""
    config = load_config(args)
    topology = scenario_topology(config, run=0)

    if args.output:
        save_topology(topology, Path(args.output))
        print(f"Topology written to {args.output}")
        print(f"  - Mean degree: {topology.mean_degree():.2f}")
        print(f"  - Connected: {'yes' if topology.is_connected() else 'no'}")
    else:
        print(json.dumps(topology_to_dict(topology), indent=2))
    return 0


def add_common_arguments(sub):
    sub.add_argument(
        '--config',
        help='JSON config file (default: Ch=5 scenario defaults)'
    )
    sub.add_argument(
        '--preset',
        choices=sorted(SCENARIO_PRESETS),
        help='Channel scenario: channels, Acs size and beta together'
    )
    sub.add_argument(
        '--seed',
        type=int,
        help='Master seed'
    )


def add_pool_arguments(sub):
    sub.add_argument(
        '--runs',
        type=int,
        help='Number of seeded runs per strategy'
    )
    sub.add_argument(
        '--threads',
        type=int,
        help=f'Worker threads (default: ${THREADS_ENV_VAR} or 1)'
    )


def main(argv=None):
    """Main CLI entrypoint."""
    parser = argparse.ArgumentParser(
        description="Simulate channel-selection strategies for multi-hop CRN dissemination",
        formatter_class=argparse.RawDescriptionHelpFormatter
    )
    parser.add_argument(
        '--verbose', '-v',
        action='store_true',
        help='Debug logging'
    )

    subparsers = parser.add_subparsers(dest='command', help='Command to run')

    # Run command
    run_parser = subparsers.add_parser('run', help='Run a dissemination campaign')
    add_common_arguments(run_parser)
    add_pool_arguments(run_parser)
    run_parser.add_argument(
        '--out', '-o',
        default='results',
        help='Output directory (default: results)'
    )
    run_parser.add_argument(
        '--strategies',
        help='Comma-separated subset of SURF,RD,SB,CA'
    )
    run_parser.add_argument(
        '--dump-traces',
        action='store_true',
        help='Also write per-hop traces as JSON lines'
    )
    run_parser.set_defaults(func=cmd_run)

    # Beta sweep command
    sweep_parser = subparsers.add_parser('sweep-beta', help='Sweep the SURF tenancy factor')
    add_common_arguments(sweep_parser)
    add_pool_arguments(sweep_parser)
    sweep_parser.add_argument(
        '--betas',
        required=True,
        help='Comma-separated beta values, e.g. 2,6,10,14,18'
    )
    sweep_parser.add_argument(
        '--out', '-o',
        default='results',
        help='Output directory (default: results)'
    )
    sweep_parser.set_defaults(func=cmd_sweep_beta)

    # Dump-topology command
    dump_parser = subparsers.add_parser('dump-topology', help='Write a generated topology as JSON')
    add_common_arguments(dump_parser)
    dump_parser.add_argument(
        '--output', '-o',
        help='Output JSON file (default: stdout)'
    )
    dump_parser.set_defaults(func=cmd_dump_topology)

    # Parse arguments
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format=LOG_FORMAT,
    )

    if not args.command:
        parser.print_help()
        return 1

    # Run command
    try:
        return args.func(args)
    except KeyboardInterrupt:
        print("\n\nInterrupted by user")
        return 130
    except CrnSimError as e:
        print(f"Error: {e}", file=sys.stderr)
        return 1
    except Exception as e:
        print(f"\nError: {e}", file=sys.stderr)
        import traceback
        traceback.print_exc()
        return 1


if __name__ == '__main__':
    sys.exit(main())
