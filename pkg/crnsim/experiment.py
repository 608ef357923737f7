"""
Seeded campaigns: fan runs out over a worker pool, aggregate per strategy and write the
result tables.

Seed contract (stable across platforms): every random stream of a campaign is seeded
with child_seed(master_seed, code, run), a splitmix64 chain

    h = splitmix64(master_seed); h = splitmix64(h ^ code); h = splitmix64(h ^ run)

where code is 0 for the scenario (topology and source), 1-4 for the channel and slot
draws of SURF, RD, SB and CA, and 5 for PR activity. Scenario and PR streams do not
depend on the strategy, so every strategy of a run sees the same network, source and
PR frames.
"""

import logging
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import (
    BETA_SWEEP_CSV,
    DELIVERY_CSV,
    HOPS_CSV,
    STRATEGY_SURF,
    SUMMARY_CSV,
    VALID_STRATEGIES,
    ExperimentConfig,
)
from .engine import DisseminationTrace, run_dissemination
from .errors import InvalidConfigError
from .metrics import (
    ExperimentResult,
    aggregate,
    beta_sweep_table,
    delivery_table,
    hops_table,
    summary_table,
    write_csv,
)
from .spectrum import PrActivityModel
from .strategy import StrategyConfig
from .topology import Topology, generate
from .tracelog import TraceLog

logger = logging.getLogger(__name__)

MASK64 = (1 << 64) - 1
SCENARIO_CODE = 0
PR_ACTIVITY_CODE = 5
STRATEGY_CODES = {name: index + 1 for index, name in enumerate(VALID_STRATEGIES)}

ProgressCallback = Callable[[int, int], None]


def splitmix64(value: int) -> int:
    """One splitmix64 step; a bijection on 64-bit integers."""
    z = (value + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def child_seed(master_seed: int, code: int, run: int) -> int:
    h = splitmix64(master_seed & MASK64)
    h = splitmix64(h ^ code)
    return splitmix64(h ^ run)


@dataclass(frozen=True)
class Scenario:
    """What every strategy shares within one run."""
    run: int
    topology: Topology
    source: int
    pr_model: PrActivityModel


@dataclass(frozen=True)
class CampaignOutput:
    results: list[ExperimentResult]
    files: list[Path]


def build_scenario(config: ExperimentConfig, run: int) -> Scenario:
    rng = np.random.default_rng(child_seed(config.master_seed, SCENARIO_CODE, run))
    topology = generate(
        n=config.n_cr,
        area_side=config.area_side,
        radius=config.radius,
        channels=config.channels,
        acs_size=config.acs_size,
        pr_count=config.n_pr,
        rng=rng,
        require_connected=config.require_connected,
        max_attempts=config.max_topology_attempts,
    )
    source = int(rng.integers(topology.n))
    pr_model = PrActivityModel(config.activity_prob, topology.pr_assignment)
    return Scenario(run=run, topology=topology, source=source, pr_model=pr_model)


def run_scenario(config: ExperimentConfig, run: int) -> dict[str, DisseminationTrace]:
    """Disseminate run's packet once per configured strategy."""
    scenario = build_scenario(config, run)
    ttl = config.resolved_ttl()
    traces = {}
    for strategy in config.strategies:
        strategy_cfg = StrategyConfig(
            kind=strategy,
            beta=config.beta,
            occupancy_mode=config.occupancy_mode,
            tie_tolerance=config.tie_tolerance,
        )
        traces[strategy] = run_dissemination(
            scenario.topology,
            strategy_cfg,
            ttl,
            scenario.pr_model,
            rng=np.random.default_rng(
                child_seed(config.master_seed, STRATEGY_CODES[strategy], run)
            ),
            source=scenario.source,
            total_slots=config.tau_t,
            pr_rng=np.random.default_rng(
                child_seed(config.master_seed, PR_ACTIVITY_CODE, run)
            ),
        )
    return traces


def simulate(
    config: ExperimentConfig,
    threads: int = 1,
    progress: ProgressCallback | None = None
) -> dict[str, list[DisseminationTrace]]:
    """
    Run every run of a campaign and collect traces per strategy in run order.

    Runs execute on a thread pool when threads > 1; results are gathered in run order
    so the output does not depend on the pool size.
    """
    if threads < 1:
        raise InvalidConfigError(f"thread count must be positive, got {threads}")

    def task(run: int) -> dict[str, DisseminationTrace]:
        return run_scenario(config, run)

    collected: dict[str, list[DisseminationTrace]] = {s: [] for s in config.strategies}
    if threads == 1:
        outcomes = map(task, range(config.runs))
        _collect(outcomes, collected, config.runs, progress)
    else:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            _collect(executor.map(task, range(config.runs)), collected, config.runs, progress)
    return collected


def _collect(outcomes, collected, total, progress):
    for done, traces in enumerate(outcomes, 1):
        for strategy, trace in traces.items():
            collected[strategy].append(trace)
        if progress is not None:
            progress(done, total)


def run_campaign(
    config: ExperimentConfig,
    out_dir: Path,
    threads: int = 1,
    progress: ProgressCallback | None = None
) -> CampaignOutput:
    """
    Simulate a campaign and write hops.csv, delivery.csv and summary.csv (plus trace
    dumps when enabled). Files created before a failure are removed.
    """
    out_dir = Path(out_dir)
    created: list[Path] = []
    try:
        collected = simulate(config, threads, progress)
        ttl = config.resolved_ttl()
        results = [
            aggregate(collected[strategy], strategy, config.channels, config.beta, ttl)
            for strategy in config.strategies
        ]

        out_dir.mkdir(parents=True, exist_ok=True)
        for name, table in (
            (HOPS_CSV, hops_table(results)),
            (DELIVERY_CSV, delivery_table(results)),
            (SUMMARY_CSV, summary_table(results)),
        ):
            path = out_dir / name
            created.append(path)
            write_csv(table, path)

        if config.dump_traces:
            trace_log = TraceLog(out_dir)
            # a dump replaces every earlier one, including strategies not run this time
            stale = trace_log.clear()
            if stale:
                logger.info("removed %d stale trace dumps from %s", stale, out_dir)
            for strategy in config.strategies:
                path = trace_log.path_for(strategy)
                created.append(path)
                trace_log.save_traces(strategy, collected[strategy])

        logger.info("campaign done: %d runs x %d strategies", config.runs, len(results))
        return CampaignOutput(results=results, files=list(created))
    except BaseException:
        _remove(created)
        raise


def beta_sweep(
    config: ExperimentConfig,
    beta_values: list[int],
    out_dir: Path,
    threads: int = 1,
    progress: ProgressCallback | None = None
) -> CampaignOutput:
    """Run the SURF campaign once per tenancy factor and write beta_sweep.csv."""
    if not beta_values:
        raise InvalidConfigError("beta sweep needs at least one beta value")

    out_dir = Path(out_dir)
    created: list[Path] = []
    try:
        results = []
        for beta in beta_values:
            sweep_config = config.with_overrides(beta=beta, strategies=(STRATEGY_SURF,))
            logger.info("beta sweep: beta=%d", beta)
            collected = simulate(sweep_config, threads, progress)
            results.append(aggregate(
                collected[STRATEGY_SURF], STRATEGY_SURF, sweep_config.channels, beta,
                sweep_config.resolved_ttl(),
            ))

        out_dir.mkdir(parents=True, exist_ok=True)
        path = out_dir / BETA_SWEEP_CSV
        created.append(path)
        write_csv(beta_sweep_table(results), path)
        return CampaignOutput(results=results, files=list(created))
    except BaseException:
        _remove(created)
        raise


def scenario_topology(config: ExperimentConfig, run: int = 0) -> Topology:
    """The topology a campaign with this config uses for the given run."""
    return build_scenario(config, run).topology


def _remove(paths: list[Path]) -> None:
    for path in paths:
        try:
            path.unlink(missing_ok=True)
        except OSError as e:
            logger.warning("could not remove partial output %s: %s", path, e)
