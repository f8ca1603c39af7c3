"""Scheduling policies.

Every policy answers one question per task: run it on some cloudlet, on
the cloud, or try again later.  Policies see the cluster through a probe
view supplied by the engine (``now``, the cloudlet ids, and expected
completion probes); they keep no state beyond a seeded RNG and small
cursors, so replaying the same observations reproduces the decisions.

Policy names, as accepted on the command line:

    daa          adaptive two-choice scheduling with delay scheduling
    daemon-only  keep every task on its daemon cloudlet
    round-robin  cycle the full cloudlet list, one cursor per daemon
    greedy       probe everything, take the earliest expected completion
    two-choices  probe two random non-daemon cloudlets, take the better
    cloud-only   send everything to the cloud
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from .model import Task, TaskClass


@dataclass(frozen=True)
class Assign:
    """Place the task on the given cloudlet now."""

    cloudlet_id: int


@dataclass(frozen=True)
class AssignCloud:
    """Send the task to the cloud."""


@dataclass(frozen=True)
class Delay:
    """Postpone the decision; the scheduler runs again after ``duration``."""

    duration: float


SchedulingDecision = Union[Assign, AssignCloud, Delay]


@dataclass(frozen=True)
class ProbeResult:
    """Answer to "when would this cloudlet finish the task?"."""

    cloudlet_id: int
    expected_completion: float  # wall-clock timestamp
    has_idle_vm: bool


def sample_two(cloudlet_ids: Sequence[int], daemon_id: int,
               rng: np.random.Generator) -> tuple[int, ...]:
    """Two distinct non-daemon cloudlets, uniform without replacement.

    With a single non-daemon cloudlet the sample degenerates to that one
    node; with none there is nothing to probe and the topology is too
    small for sampling policies.
    """
    others = [c for c in cloudlet_ids if c != daemon_id]
    if not others:
        raise ValueError(
            "sampling needs at least one non-daemon cloudlet; add cloudlets to the topology"
        )
    if len(others) == 1:
        return (others[0],)
    picked = rng.choice(len(others), size=2, replace=False)
    return (others[int(picked[0])], others[int(picked[1])])


def _least_loaded(probes: Sequence[ProbeResult]) -> ProbeResult:
    # ties go to the lower cloudlet id
    return min(probes, key=lambda p: (p.expected_completion, p.cloudlet_id))


def daa_decide(
    task: Task,
    now: float,
    daemon_probe: ProbeResult,
    candidate_probes: Sequence[ProbeResult],
    delayed_daemon_completion: Union[float, Callable[[], float]],
    delay_quantum: float,
) -> SchedulingDecision:
    """Adaptive decision for one task.

    An idle daemon VM always wins.  Otherwise the better of the two
    sampled cloudlets becomes the candidate: sensitive tasks go wherever
    finishes first, tolerant tasks take an idle candidate VM if there is
    one and otherwise wait a quantum on the daemon, unless even the
    delayed daemon projection would already overrun their bound.

    ``delayed_daemon_completion`` is the projected daemon completion if
    the task committed one quantum from now; pass a callable to compute
    it lazily (it is only needed on the tolerant, all-busy branch).
    """
    if daemon_probe.has_idle_vm:
        return Assign(daemon_probe.cloudlet_id)
    candidate = _least_loaded(candidate_probes)
    if task.task_class is TaskClass.LATENCY_SENSITIVE:
        if candidate.expected_completion < daemon_probe.expected_completion:
            return Assign(candidate.cloudlet_id)
        return Assign(daemon_probe.cloudlet_id)
    if candidate.has_idle_vm:
        return Assign(candidate.cloudlet_id)
    delayed = delayed_daemon_completion() if callable(delayed_daemon_completion) else delayed_daemon_completion
    if delayed >= task.deadline:
        return Assign(daemon_probe.cloudlet_id)
    return Delay(delay_quantum)


class DaaScheduler:
    """Two-choice sampling plus class-aware placement and delay scheduling."""

    name = "daa"

    def __init__(self, rng: np.random.Generator, delay_quantum: float):
        if delay_quantum <= 0:
            raise ValueError("delay_quantum must be > 0")
        self._rng = rng
        self.delay_quantum = delay_quantum

    def decide(self, task: Task, view) -> SchedulingDecision:
        daemon_probe = view.probe(view.daemon_id)
        if daemon_probe.has_idle_vm:
            return Assign(view.daemon_id)
        pair = sample_two(view.cloudlet_ids, view.daemon_id, self._rng)
        probes = [view.probe(c) for c in pair]
        return daa_decide(
            task,
            view.now,
            daemon_probe,
            probes,
            lambda: view.daemon_completion_if_delayed(self.delay_quantum),
            self.delay_quantum,
        )


class DaemonOnlyScheduler:
    """No load balancing: every task runs on its daemon cloudlet."""

    name = "daemon-only"

    def decide(self, task: Task, view) -> SchedulingDecision:
        return Assign(view.daemon_id)


class RoundRobinScheduler:
    """Cycle over all cloudlets, one independent cursor per daemon."""

    name = "round-robin"

    def __init__(self):
        self._cursors: dict[int, int] = {}

    def decide(self, task: Task, view) -> SchedulingDecision:
        ids = view.cloudlet_ids
        cursor = self._cursors.get(view.daemon_id, 0)
        self._cursors[view.daemon_id] = (cursor + 1) % len(ids)
        return Assign(ids[cursor])


class GreedyScheduler:
    """Probe every cloudlet and take the earliest expected completion."""

    name = "greedy"

    def decide(self, task: Task, view) -> SchedulingDecision:
        best = min(
            (view.probe(c) for c in view.cloudlet_ids),
            key=lambda p: (p.expected_completion, p.cloudlet_id != view.daemon_id, p.cloudlet_id),
        )
        return Assign(best.cloudlet_id)


class TwoChoicesScheduler:
    """Classic two-choice balancing; class-blind and never delays."""

    name = "two-choices"

    def __init__(self, rng: np.random.Generator):
        self._rng = rng

    def decide(self, task: Task, view) -> SchedulingDecision:
        pair = sample_two(view.cloudlet_ids, view.daemon_id, self._rng)
        best = _least_loaded([view.probe(c) for c in pair])
        return Assign(best.cloudlet_id)


class CloudOnlyScheduler:
    """Reference policy: the cloud takes everything, no queueing at all."""

    name = "cloud-only"

    def decide(self, task: Task, view) -> SchedulingDecision:
        return AssignCloud()


SCHEDULER_NAMES = ("daa", "daemon-only", "round-robin", "greedy", "two-choices", "cloud-only")


def make_scheduler(name: str, *, rng: np.random.Generator | None = None,
                   delay_quantum: float | None = None):
    """Build a policy instance from its command-line token."""
    if name == "daa":
        if rng is None or delay_quantum is None:
            raise ValueError("daa needs an rng and a delay quantum")
        return DaaScheduler(rng, delay_quantum)
    if name == "daemon-only":
        return DaemonOnlyScheduler()
    if name == "round-robin":
        return RoundRobinScheduler()
    if name == "greedy":
        return GreedyScheduler()
    if name == "two-choices":
        if rng is None:
            raise ValueError("two-choices needs an rng")
        return TwoChoicesScheduler(rng)
    if name == "cloud-only":
        return CloudOnlyScheduler()
    raise ValueError(f"unknown scheduler {name!r}; choose one of {', '.join(SCHEDULER_NAMES)}")
