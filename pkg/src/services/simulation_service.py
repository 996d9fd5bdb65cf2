"""Measurement runs on top of the event core."""

import logging
from typing import List, Optional, Tuple

import numpy as np
from scipy.stats import t as t_dist

from ..exceptions import ConfigValidationError
from ..models.network import ModelVariant
from ..models.simulation import EventTrace, ServiceLaw, SimHorizon, SimStats
from ..models.system import SystemConfig
from ..simulation import NetworkSimulator, SimulationListener, Task, replay_trace

logger = logging.getLogger(__name__)

DEFAULT_BATCHES = 20


def default_warmup(m: int) -> int:
    """Rounds discarded before measuring: max(10 m, 1000)."""
    return max(10 * m, 1000)


class WindowCollector(SimulationListener):
    """
    Collects statistics over the rounds [warmup, window_end).

    A task belongs to the window when it was dispatched while the update
    counter was inside the window; the run drains until every such task
    has been applied, so delays are not truncated.
    """

    def __init__(self, simulator: NetworkSimulator, warmup: int, window_end: Optional[int]):
        self.simulator = simulator
        self.warmup = warmup
        self.window_end = window_end
        self.pending = 0
        self.apply_times: List[float] = []
        self.energy_marks: List[float] = []
        self.appliers: List[int] = []
        self.measured: List[Tuple[int, int, int]] = []

    @property
    def is_open(self) -> bool:
        return bool(self.apply_times)

    def _open(self, now: float) -> None:
        self.simulator.meter.window_start = now
        self.apply_times.append(now)
        self.energy_marks.append(self.simulator.meter.energy)

    def on_dispatch(self, task: Task, now: float) -> None:
        if task.initial or task.dispatch_round < self.warmup:
            return
        if self.window_end is not None and task.dispatch_round >= self.window_end:
            return
        task.measured = True
        self.pending += 1

    def on_apply(self, task: Task, now: float, delay: int) -> None:
        k = self.simulator.updates_applied
        if k == self.warmup and not self.is_open:
            self._open(now)
        elif self.is_open and k > self.warmup and (self.window_end is None or k <= self.window_end):
            self.apply_times.append(now)
            self.energy_marks.append(self.simulator.meter.energy)
            self.appliers.append(task.client)
            if k == self.window_end:
                self.simulator.meter.window_end = now
        if task.measured:
            self.measured.append((task.dispatch_round - self.warmup, task.client, delay))
            self.pending -= 1

    def done(self) -> bool:
        return (
            self.window_end is not None
            and self.simulator.updates_applied >= self.window_end
            and self.pending == 0
        )


def _batch_se(values: np.ndarray) -> np.ndarray:
    if len(values) < 2:
        return np.zeros(values.shape[1:]) if values.ndim > 1 else np.float64(0.0)
    return values.std(axis=0, ddof=1) / np.sqrt(len(values))


def run_simulation(
    config: SystemConfig,
    law: ServiceLaw = ServiceLaw(),
    horizon: SimHorizon = SimHorizon(rounds=100_000),
    warmup: Optional[int] = None,
    seed: int = 0,
    model: ModelVariant = ModelVariant.NO_CS,
    batches: int = DEFAULT_BATCHES,
    record_trace: bool = False,
    check_conservation: bool = False,
) -> SimStats:
    """
    Simulate the network and measure throughput, delays, update shares and energy.

    Args:
        config: System configuration
        law: Service-time law
        horizon: Total rounds (warmup included) or a simulated time limit
        warmup: Rounds discarded first (>= 1); defaults to max(10 m, 1000)
        seed: Master seed
        model: Whether the CS queue is simulated
        batches: Number of batches for batch-means standard errors
        record_trace: Attach the station-level EventTrace to the result
        check_conservation: Assert the population after every event

    Returns:
        SimStats over the measurement window

    Raises:
        ConfigValidationError: If the warmup does not fit in the horizon
    """
    warmup = default_warmup(config.m) if warmup is None else warmup
    # round 0 only carries the initial tasks, which are never measured
    if warmup < 1:
        raise ConfigValidationError(f"warmup must be >= 1 round, got {warmup}")
    window_end = None
    if horizon.rounds is not None:
        if warmup >= horizon.rounds:
            raise ConfigValidationError(
                f"warmup {warmup} must be below the horizon of {horizon.rounds} rounds"
            )
        window_end = horizon.rounds

    simulator = NetworkSimulator(
        config,
        law,
        seed,
        model=model,
        record_trace=record_trace,
        check_conservation=check_conservation,
    )
    collector = WindowCollector(simulator, warmup, window_end)
    simulator.listener = collector
    simulator.start()

    while not collector.done():
        simulator.step()
        if collector.window_end is None and simulator.now >= horizon.time_limit:
            if simulator.updates_applied <= warmup:
                raise ConfigValidationError(
                    f"time limit {horizon.time_limit} reached after {simulator.updates_applied} "
                    f"rounds, before the warmup of {warmup} ended"
                )
            collector.window_end = simulator.updates_applied + 1

    stats = _summarize(collector, config.n, warmup, seed, model, law, batches)
    if record_trace:
        trace: EventTrace = simulator.trace
        trace.window_start = collector.apply_times[0]
        trace.window_end = collector.apply_times[-1]
        trace.window_rounds = stats.rounds_completed
        stats.trace = trace
    logger.info(
        "simulation window closed: %d rounds, throughput %.6g (se %.2g)",
        stats.rounds_completed, stats.empirical_throughput, stats.throughput_se,
    )
    return stats


def _summarize(
    collector: WindowCollector,
    n: int,
    warmup: int,
    seed: int,
    model: ModelVariant,
    law: ServiceLaw,
    batches: int,
) -> SimStats:
    times = np.asarray(collector.apply_times)
    energy = np.asarray(collector.energy_marks)
    appliers = np.asarray(collector.appliers, dtype=int)
    rounds = len(appliers)
    measured = np.asarray(collector.measured, dtype=int).reshape(-1, 3)
    offsets, clients, delays = measured[:, 0], measured[:, 1], measured[:, 2]

    span = float(times[-1] - times[0])
    delay_sums = np.bincount(clients, weights=delays, minlength=n)
    energy_total = float(energy[-1] - energy[0])

    count = max(1, min(batches, rounds))
    edges = (np.arange(count + 1) * rounds) // count
    batch_throughput, batch_energy, batch_fraction, batch_delays = [], [], [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        size = hi - lo
        batch_throughput.append(size / (times[hi] - times[lo]))
        batch_energy.append((energy[hi] - energy[lo]) / size)
        batch_fraction.append(np.bincount(appliers[lo:hi], minlength=n) / size)
        inside = (offsets >= lo) & (offsets < hi)
        batch_delays.append(np.bincount(clients[inside], weights=delays[inside], minlength=n) / size)

    return SimStats(
        rounds_completed=rounds,
        sim_time=span,
        empirical_throughput=rounds / span,
        empirical_delays=delay_sums / rounds,
        per_client_update_fraction=np.bincount(appliers, minlength=n) / rounds,
        energy_total=energy_total,
        energy_per_round=energy_total / rounds,
        warmup_discarded=warmup,
        seed=seed,
        measured_tasks=len(measured),
        throughput_se=float(_batch_se(np.asarray(batch_throughput))),
        delays_se=_batch_se(np.asarray(batch_delays)),
        update_fraction_se=_batch_se(np.asarray(batch_fraction)),
        energy_per_round_se=float(_batch_se(np.asarray(batch_energy))),
        model=model,
        law=law,
    )


def measure_energy(trace: EventTrace) -> Tuple[float, float]:
    """
    Integrate the power over a recorded trace's measurement window.

    Args:
        trace: EventTrace attached by run_simulation(record_trace=True)

    Returns:
        (energy_total, energy_per_round)
    """
    meter = replay_trace(trace)
    rounds = max(trace.window_rounds, 1)
    return meter.energy, meter.energy / rounds


def confidence_intervals(stats: SimStats, batches: int = DEFAULT_BATCHES, level: float = 0.95) -> dict:
    """
    Student-t intervals from the batch-means standard errors.

    Args:
        stats: Simulation statistics
        batches: Number of batches the standard errors were computed from
        level: Two-sided confidence level

    Returns:
        Dictionary of (low, high) pairs per measured quantity
    """
    dof = max(min(batches, stats.rounds_completed) - 1, 1)
    half = float(t_dist.ppf(0.5 + level / 2.0, dof))
    n = len(stats.empirical_delays)
    delays_se = stats.delays_se if stats.delays_se is not None else np.zeros(n)
    fraction_se = stats.update_fraction_se if stats.update_fraction_se is not None else np.zeros(n)

    def interval(value, se):
        return [value - half * se, value + half * se]

    return {
        "level": level,
        "throughput": interval(stats.empirical_throughput, stats.throughput_se),
        "energy_per_round": interval(stats.energy_per_round, stats.energy_per_round_se),
        "delays": [interval(v, s) for v, s in zip(stats.empirical_delays, delays_se)],
        "update_fraction": [interval(v, s) for v, s in zip(stats.per_client_update_fraction, fraction_se)],
    }
