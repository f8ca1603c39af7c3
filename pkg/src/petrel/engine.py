"""Deterministic discrete-event simulation of an edge-cloud.

The engine advances a virtual clock over task arrivals, delay wake-ups,
and completions.  Each cloudlet keeps one ready time per VM in a min
heap; committing a task pops the earliest VM, starts the task at
``max(now, ready)``, and pushes the ready time back.  Communication is
charged to the task's completion, not to VM occupancy.

Two runs with the same config, trace, policy, and seed produce
bit-identical records.
"""

from __future__ import annotations

import heapq
from bisect import bisect_right
from dataclasses import dataclass
from math import inf
from typing import Sequence

from .model import (
    Allocation,
    Cloudlet,
    EdgeCloud,
    Task,
    TaskClass,
    completion_time_cloud,
    completion_time_daemon,
    completion_time_remote,
)
from .schedulers import (
    Assign,
    AssignCloud,
    Delay,
    ProbeResult,
    SchedulingDecision,
    make_scheduler,
)
from .seeding import new_rng


class SimulationError(RuntimeError):
    """A run could not proceed (bad trace, bad decision, or safety cap hit)."""


ARRIVAL = "arrival"
DELAY_EXPIRED = "delay-expired"
COMPLETED = "completed"


@dataclass(frozen=True)
class Event:
    """One entry of the event queue; processed in (time, sequence) order."""

    time: float
    sequence: int
    kind: str
    task_id: int
    cloudlet_id: int | None = None
    vm_index: int | None = None


class VmSchedule:
    """Per-VM next-free timestamps for one cloudlet.

    The earliest ready time is the heap head.  Every commit is also
    appended to a per-VM history so probes can be answered with the
    state as of an earlier instant when probe staleness is configured.
    """

    def __init__(self, vm_count: int, initial_ready: float = 0.0):
        if vm_count < 1:
            raise ValueError("vm_count must be >= 1")
        self._heap: list[tuple[float, int]] = [(initial_ready, i) for i in range(vm_count)]
        heapq.heapify(self._heap)
        self._history: list[list[tuple[float, float]]] = [
            [(-inf, initial_ready)] for _ in range(vm_count)
        ]

    def __len__(self) -> int:
        return len(self._heap)

    def ready_times(self) -> list[float]:
        return sorted(t for t, _ in self._heap)

    def earliest_ready(self) -> float:
        return self._heap[0][0]

    def earliest_ready_asof(self, when: float) -> float:
        """Earliest ready time as it looked at instant ``when``."""
        best = inf
        for history in self._history:
            idx = bisect_right(history, (when, inf)) - 1
            best = min(best, history[idx][1])
        return best

    def has_idle_vm(self, now: float) -> bool:
        return self.earliest_ready() <= now

    def commit(self, now: float, exec_time: float) -> tuple[float, int]:
        """Occupy the earliest-ready VM; returns (start, vm_index)."""
        ready, vm_index = heapq.heappop(self._heap)
        start = max(now, ready)
        new_ready = start + exec_time
        heapq.heappush(self._heap, (new_ready, vm_index))
        self._history[vm_index].append((now, new_ready))
        return start, vm_index


@dataclass(frozen=True)
class TaskRecord:
    """Final outcome of one task; the input to every metric."""

    task_id: int
    task_class: TaskClass
    daemon_id: int
    allocation: Allocation
    arrival_time: float
    assign_time: float
    start_time: float
    completion_time: float
    turnaround: float
    service_time: float
    speedup: float
    delays_taken: int
    bound_violated: bool | None

    @property
    def weighted_turnaround(self) -> float:
        return self.turnaround / self.service_time


@dataclass(frozen=True)
class DecisionEntry:
    """One scheduler invocation and its outcome, for post-run audits."""

    time: float
    task_id: int
    decision: SchedulingDecision


@dataclass
class SimulationResult:
    records: list[TaskRecord]
    decisions: list[DecisionEntry]
    events: list[Event]
    topology: EdgeCloud


def _placement_breakdown(task: Task, daemon: Cloudlet, executor: Cloudlet):
    if executor.id == daemon.id:
        return completion_time_daemon(task, executor, 0.0)
    return completion_time_remote(task, daemon, executor, 0.0)


def expected_completion_time(
    task: Task,
    daemon: Cloudlet,
    executor: Cloudlet,
    vms: VmSchedule,
    now: float,
    commit_at: float | None = None,
) -> float:
    """Time from ``now`` until ``executor`` would hand the result back.

    A tentative probe: nothing is committed.  ``commit_at`` projects a
    commit at a later instant (used when pondering a delay) while still
    reading the current ready times.
    """
    effective = now if commit_at is None else commit_at
    start = max(effective, vms.earliest_ready())
    bd = _placement_breakdown(task, daemon, executor)
    return (start + bd.exec + bd.comm) - now


def commit_assignment(
    task: Task, daemon: Cloudlet, executor: Cloudlet, vms: VmSchedule, now: float
) -> tuple[float, float, int]:
    """Bind the task to the executor's earliest-ready VM.

    Returns (start, completion, vm_index); completion includes the
    communication charge for the placement.
    """
    bd = _placement_breakdown(task, daemon, executor)
    start, vm_index = vms.commit(now, bd.exec)
    completion = start + bd.exec + bd.comm
    return start, completion, vm_index


def schedule_delay(task: Task, delay: float, now: float, sequence: int) -> Event:
    """Wake-up event for a postponed task; only tolerant tasks may wait."""
    if task.task_class is not TaskClass.LATENCY_TOLERANT:
        raise SimulationError(f"task {task.id}: only latency-tolerant tasks can be delayed")
    if delay <= 0:
        raise SimulationError(f"task {task.id}: delay must be > 0, got {delay}")
    return Event(time=now + delay, sequence=sequence, kind=DELAY_EXPIRED, task_id=task.id)


class ClusterView:
    """Read-only probe interface the engine hands to a policy.

    Probes of non-daemon cloudlets can be answered with stale state
    (``probe_latency`` old); the daemon always sees its own live state.
    """

    __slots__ = ("now", "daemon_id", "_task", "_sim")

    def __init__(self, sim: "Simulation", task: Task, now: float):
        self.now = now
        self.daemon_id = task.daemon_id
        self._task = task
        self._sim = sim

    @property
    def cloudlet_ids(self) -> tuple[int, ...]:
        return self._sim.topology.ids

    def probe(self, cloudlet_id: int) -> ProbeResult:
        sim = self._sim
        task = self._task
        daemon = sim.topology.get(task.daemon_id)
        executor = sim.topology.get(cloudlet_id)
        vms = sim.vm_schedules[cloudlet_id]
        if cloudlet_id == task.daemon_id or sim.probe_latency <= 0:
            ready = vms.earliest_ready()
        else:
            ready = vms.earliest_ready_asof(max(0.0, self.now - sim.probe_latency))
        start = max(self.now, ready)
        bd = _placement_breakdown(task, daemon, executor)
        return ProbeResult(
            cloudlet_id=cloudlet_id,
            expected_completion=start + bd.exec + bd.comm,
            has_idle_vm=ready <= self.now,
        )

    def daemon_completion_if_delayed(self, delay: float) -> float:
        """Projected wall-clock daemon completion if committed ``delay`` from now."""
        sim = self._sim
        task = self._task
        daemon = sim.topology.get(task.daemon_id)
        vms = sim.vm_schedules[task.daemon_id]
        start = max(self.now + delay, vms.earliest_ready())
        bd = completion_time_daemon(task, daemon, 0.0)
        return start + bd.exec + bd.comm


class Simulation:
    """One single-threaded simulation run over a fixed topology and policy."""

    def __init__(
        self,
        topology: EdgeCloud,
        scheduler,
        *,
        max_delays: int = 1000,
        probe_latency: float = 0.0,
    ):
        if len(topology) == 0:
            raise SimulationError("topology has no cloudlets")
        self.topology = topology
        self.scheduler = scheduler
        self.max_delays = max_delays
        self.probe_latency = probe_latency
        self.vm_schedules: dict[int, VmSchedule] = {
            c.id: VmSchedule(c.vm_count) for c in topology
        }
        self._sequence = 0

    def _next_sequence(self) -> int:
        seq = self._sequence
        self._sequence += 1
        return seq

    def run(self, trace: Sequence[Task]) -> SimulationResult:
        self._validate_trace(trace)
        tasks = {t.id: t for t in trace}
        queue: list[tuple[float, int, Event]] = []
        for task in trace:
            ev = Event(task.arrival_time, self._next_sequence(), ARRIVAL, task.id)
            heapq.heappush(queue, (ev.time, ev.sequence, ev))

        records: dict[int, TaskRecord] = {}
        delays_taken: dict[int, int] = {t.id: 0 for t in trace}
        decisions: list[DecisionEntry] = []
        events: list[Event] = []
        clock = 0.0

        while queue:
            _, _, event = heapq.heappop(queue)
            if event.time < clock:
                raise SimulationError(
                    f"causality violation: event at {event.time} before clock {clock}"
                )
            clock = event.time
            events.append(event)
            if event.kind == COMPLETED:
                continue
            task = tasks[event.task_id]
            if task.id in records:
                raise SimulationError(f"task {task.id} scheduled twice")
            decision = self.scheduler.decide(task, ClusterView(self, task, clock))
            decisions.append(DecisionEntry(clock, task.id, decision))
            self._apply(decision, task, clock, queue, records, delays_taken)

        ordered = [records[t.id] for t in trace]
        return SimulationResult(ordered, decisions, events, self.topology)

    def _validate_trace(self, trace: Sequence[Task]) -> None:
        last = -inf
        seen: set[int] = set()
        for task in trace:
            if task.arrival_time < last:
                raise SimulationError(
                    f"trace not sorted by arrival time at task {task.id}"
                )
            last = task.arrival_time
            if task.id in seen:
                raise SimulationError(f"duplicate task id {task.id} in trace")
            seen.add(task.id)
            if task.daemon_id not in self.vm_schedules:
                raise SimulationError(
                    f"task {task.id} names unknown daemon cloudlet {task.daemon_id}"
                )

    def _apply(self, decision, task, now, queue, records, delays_taken) -> None:
        if isinstance(decision, Assign):
            try:
                executor = self.topology.get(decision.cloudlet_id)
            except KeyError:
                raise SimulationError(
                    f"scheduler assigned task {task.id} to unknown cloudlet {decision.cloudlet_id}"
                ) from None
            daemon = self.topology.get(task.daemon_id)
            vms = self.vm_schedules[executor.id]
            start, completion, vm_index = commit_assignment(task, daemon, executor, vms, now)
            bd = _placement_breakdown(task, daemon, executor)
            self._record(
                records, task, Allocation.cloudlet(executor.id), now, start, completion,
                bd.exec, delays_taken[task.id],
            )
            done = Event(completion, self._next_sequence(), COMPLETED, task.id,
                         cloudlet_id=executor.id, vm_index=vm_index)
            heapq.heappush(queue, (done.time, done.sequence, done))
        elif isinstance(decision, AssignCloud):
            daemon = self.topology.get(task.daemon_id)
            bd = completion_time_cloud(task, daemon.net)
            start = now
            completion = start + bd.exec + bd.comm
            self._record(
                records, task, Allocation.cloud(), now, start, completion,
                bd.exec, delays_taken[task.id],
            )
            done = Event(completion, self._next_sequence(), COMPLETED, task.id)
            heapq.heappush(queue, (done.time, done.sequence, done))
        elif isinstance(decision, Delay):
            delays_taken[task.id] += 1
            if delays_taken[task.id] > self.max_delays:
                raise SimulationError(
                    f"task {task.id} delayed more than max_delays={self.max_delays};"
                    " the bound check should have terminated this"
                )
            ev = schedule_delay(task, decision.duration, now, self._next_sequence())
            heapq.heappush(queue, (ev.time, ev.sequence, ev))
        else:
            raise SimulationError(f"scheduler returned unknown decision {decision!r}")

    def _record(self, records, task, allocation, assign_time, start, completion,
                service_time, delays) -> None:
        turnaround = completion - task.arrival_time
        violated = None
        if task.task_class is TaskClass.LATENCY_TOLERANT:
            violated = turnaround > task.latency_bound
        records[task.id] = TaskRecord(
            task_id=task.id,
            task_class=task.task_class,
            daemon_id=task.daemon_id,
            allocation=allocation,
            arrival_time=task.arrival_time,
            assign_time=assign_time,
            start_time=start,
            completion_time=completion,
            turnaround=turnaround,
            service_time=service_time,
            speedup=task.mobile_exec_time / turnaround,
            delays_taken=delays,
            bound_violated=violated,
        )


def simulate(config, trace: Sequence[Task], scheduler, seed: int,
             topology: EdgeCloud | None = None) -> SimulationResult:
    """Run one simulation described by a config.

    ``scheduler`` is either a policy name token or a ready policy
    instance.  With a name, the policy RNG is derived from ``seed``;
    the topology, when not supplied, is drawn from ``seed`` as well, so
    the same seed compares policies on identical ground.
    """
    from .config import build_topology

    if topology is None:
        topology = build_topology(config, seed=seed)
    if isinstance(scheduler, str):
        scheduler = make_scheduler(
            scheduler,
            rng=new_rng(seed, "policy"),
            delay_quantum=config.resolve_delay_quantum(),
        )
    sim = Simulation(
        topology,
        scheduler,
        max_delays=config.max_delays,
        probe_latency=config.probe_latency_ms,
    )
    return sim.run(trace)


def run_simulation(config, trace: Sequence[Task], scheduler, seed: int,
                   topology: EdgeCloud | None = None) -> list[TaskRecord]:
    """Like :func:`simulate` but returns only the per-task records."""
    return simulate(config, trace, scheduler, seed, topology=topology).records
