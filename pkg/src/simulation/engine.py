"""Discrete-event core of the closed network."""

import heapq
import logging
from collections import deque
from dataclasses import dataclass
from typing import Deque, List, Optional

import numpy as np

from ..exceptions import ConfigValidationError, OracleFailure
from ..models.network import ModelVariant
from ..models.simulation import EventTrace, ServiceLaw, StationKind
from ..models.system import SystemConfig
from ..samplers import BaseServiceSampler, SamplerFactory
from .energy import EnergyMeter

logger = logging.getLogger(__name__)

# SeedSequence spawn keys of the independent random streams
ROUTING_STREAM = 0
INIT_STREAM = 1
CS_STREAM = 2
DOWNLINK_STREAM = 3
COMPUTE_STREAM = 4
UPLINK_STREAM = 5

BUFFER_SIZE = 1024


@dataclass
class Task:
    """One model copy travelling through the network."""

    task_id: int
    client: int
    dispatch_round: int
    initial: bool = False
    measured: bool = False


class SimulationListener:
    """Hooks called by the simulator; the default does nothing."""

    def on_dispatch(self, task: Task, now: float) -> None:
        pass

    def on_apply(self, task: Task, now: float, delay: int) -> None:
        pass


class _ServiceStream:
    """Buffered draws of one station's service times."""

    def __init__(self, sampler: BaseServiceSampler, rng: np.random.Generator, rate: float):
        sampler.check_rate(rate)
        self._sampler = sampler
        self._rng = rng
        self._rate = rate
        self._buffer = np.empty(0)
        self._pos = 0

    def next(self) -> float:
        if self._pos >= len(self._buffer):
            self._buffer = self._sampler.sample_many(self._rng, self._rate, BUFFER_SIZE)
            self._pos = 0
        value = self._buffer[self._pos]
        self._pos += 1
        return float(value)


def station_rng(seed: int, stream: int, index: int = 0) -> np.random.Generator:
    """Independent generator for one station, derived from the master seed."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream, index)))


class NetworkSimulator:
    """
    Event-driven simulation of the closed network.

    A task is dispatched to a client's downlink, queues FIFO for the
    client's compute server, returns over the uplink and (with the CS
    model) waits in the central-server FIFO queue. Its application
    increments the update counter and dispatches one new task, so the
    population stays at m.
    """

    def __init__(
        self,
        config: SystemConfig,
        law: ServiceLaw,
        seed: int,
        model: ModelVariant = ModelVariant.NO_CS,
        listener: Optional[SimulationListener] = None,
        record_trace: bool = False,
        check_conservation: bool = False,
    ):
        """
        Initialize the simulator.

        Args:
            config: System configuration (clients, routing, m, optional CS)
            law: Service-time law shared by every station
            seed: Master seed
            model: Whether the CS queue is simulated
            listener: Optional dispatch/apply hooks
            record_trace: Keep a station-level EventTrace
            check_conservation: Assert the population after every event
        """
        if model is ModelVariant.WITH_CS and config.cs is None:
            raise ConfigValidationError("model 'cs' requires a 'cs' block in the config")
        if config.m < 1:
            raise ConfigValidationError(f"concurrency must be >= 1, got m={config.m}")

        self.config = config
        self.law = law
        self.seed = seed
        self.model = model
        self.listener = listener or SimulationListener()
        self.check_conservation = check_conservation

        n = config.n
        sampler = SamplerFactory.create_sampler(law)
        self._downlink_streams = [
            _ServiceStream(sampler, station_rng(seed, DOWNLINK_STREAM, i), c.mu_d)
            for i, c in enumerate(config.clients)
        ]
        self._compute_streams = [
            _ServiceStream(sampler, station_rng(seed, COMPUTE_STREAM, i), c.mu_c)
            for i, c in enumerate(config.clients)
        ]
        self._uplink_streams = [
            _ServiceStream(sampler, station_rng(seed, UPLINK_STREAM, i), c.mu_u)
            for i, c in enumerate(config.clients)
        ]
        self._cs_stream = (
            _ServiceStream(sampler, station_rng(seed, CS_STREAM), config.cs.mu_cs)
            if model is ModelVariant.WITH_CS
            else None
        )
        self._routing_rng = station_rng(seed, ROUTING_STREAM)
        self._init_rng = station_rng(seed, INIT_STREAM)
        self._cumulative = np.cumsum(config.routing.as_array())
        self._cumulative[-1] = 1.0
        self._uniforms = np.empty(0)
        self._uniform_pos = 0

        self._events: List[tuple] = []
        self._seq = 0
        self._task_ids = 0
        self._compute: List[Deque[Task]] = [deque() for _ in range(n)]
        self._cs_queue: Deque[Task] = deque()
        self._downlink_count = np.zeros(n, dtype=int)
        self._uplink_count = np.zeros(n, dtype=int)
        self._in_system = 0

        self.now = 0.0
        self.updates_applied = 0
        self.meter = EnergyMeter(config, model)
        self.trace = EventTrace(config=config, model=model) if record_trace else None
        self._started = False

    # Station transitions

    def _schedule(self, delay: float, station: StationKind, index: int, task: Task) -> None:
        self._seq += 1
        heapq.heappush(self._events, (self.now + delay, station.priority, index, self._seq, station, task))

    def _log(self, station: StationKind, event: str, client: int) -> None:
        if event == "arrive":
            self.meter.arrive(station, client)
        else:
            self.meter.depart(station, client)
        if self.trace is not None:
            self.trace.record(self.now, station, event, client, self._in_system)

    def _arrive_downlink(self, task: Task) -> None:
        i = task.client
        self._in_system += 1
        self._downlink_count[i] += 1
        self._log(StationKind.DOWNLINK, "arrive", i)
        self._schedule(self._downlink_streams[i].next(), StationKind.DOWNLINK, i, task)

    def _arrive_compute(self, task: Task) -> None:
        i = task.client
        queue = self._compute[i]
        queue.append(task)
        self._in_system += 1
        self._log(StationKind.COMPUTE, "arrive", i)
        if len(queue) == 1:
            self._schedule(self._compute_streams[i].next(), StationKind.COMPUTE, i, task)

    def _arrive_uplink(self, task: Task) -> None:
        i = task.client
        self._in_system += 1
        self._uplink_count[i] += 1
        self._log(StationKind.UPLINK, "arrive", i)
        self._schedule(self._uplink_streams[i].next(), StationKind.UPLINK, i, task)

    def _arrive_cs(self, task: Task) -> None:
        self._cs_queue.append(task)
        self._in_system += 1
        self._log(StationKind.CS, "arrive", task.client)
        if len(self._cs_queue) == 1:
            self._schedule(self._cs_stream.next(), StationKind.CS, 0, task)

    def _finish(self, station: StationKind, index: int, task: Task) -> None:
        self._in_system -= 1
        if station is StationKind.DOWNLINK:
            self._downlink_count[index] -= 1
            self._log(station, "depart", index)
            self._arrive_compute(task)
        elif station is StationKind.COMPUTE:
            queue = self._compute[index]
            queue.popleft()
            self._log(station, "depart", index)
            if queue:
                self._schedule(self._compute_streams[index].next(), station, index, queue[0])
            self._arrive_uplink(task)
        elif station is StationKind.UPLINK:
            self._uplink_count[index] -= 1
            self._log(station, "depart", index)
            if self._cs_stream is not None:
                self._arrive_cs(task)
            else:
                self._apply(task)
        else:
            self._cs_queue.popleft()
            self._log(station, "depart", task.client)
            if self._cs_queue:
                self._schedule(self._cs_stream.next(), station, 0, self._cs_queue[0])
            self._apply(task)

    # Updates and dispatch

    def _sample_client(self) -> int:
        if self._uniform_pos >= len(self._uniforms):
            self._uniforms = self._routing_rng.random(BUFFER_SIZE)
            self._uniform_pos = 0
        u = self._uniforms[self._uniform_pos]
        self._uniform_pos += 1
        return int(np.searchsorted(self._cumulative, u, side="right"))

    def _new_task(self, client: int, initial: bool = False) -> Task:
        self._task_ids += 1
        task = Task(
            task_id=self._task_ids,
            client=client,
            dispatch_round=self.updates_applied,
            initial=initial,
        )
        return task

    def _apply(self, task: Task) -> None:
        # delay: updates applied between this task's dispatch and its own
        delay = self.updates_applied - task.dispatch_round
        self.updates_applied += 1
        self.listener.on_apply(task, self.now, delay)
        new_task = self._new_task(self._sample_client())
        self.listener.on_dispatch(new_task, self.now)
        self._arrive_downlink(new_task)

    def start(self) -> None:
        """Place the m initial tasks on uniformly chosen clients' downlinks."""
        if self._started:
            return
        self._started = True
        clients = self._init_rng.integers(self.config.n, size=self.config.m)
        for client in clients:
            task = self._new_task(int(client), initial=True)
            self.listener.on_dispatch(task, self.now)
            self._arrive_downlink(task)
        self._check()

    def _check(self) -> None:
        if not self.check_conservation:
            return
        total = (
            int(self._downlink_count.sum())
            + sum(len(q) for q in self._compute)
            + int(self._uplink_count.sum())
            + len(self._cs_queue)
        )
        if total != self.config.m or self._in_system != self.config.m:
            raise OracleFailure(
                f"task conservation violated at t={self.now}: {total} tasks, expected {self.config.m}"
            )

    def step(self) -> None:
        """Process the next event."""
        if not self._started:
            self.start()
        time, _, index, _, station, task = heapq.heappop(self._events)
        self.meter.advance(time)
        self.now = time
        self._finish(station, index, task)
        self._check()

    def run_updates(self, count: int) -> None:
        """Advance until at least count updates have been applied."""
        while self.updates_applied < count:
            self.step()

    def tasks_in_system(self) -> int:
        return self._in_system
