"""Event loop behaviour: queueing, waits, delays, probe staleness."""

import numpy as np
import pytest

from fixtures import make_cloudlet, make_net, make_task, make_topology
from petrel.engine import (
    COMPLETED,
    ClusterView,
    Simulation,
    SimulationError,
    VmSchedule,
    commit_assignment,
    expected_completion_time,
    run_simulation,
    schedule_delay,
    simulate,
)
from petrel.config import EdgeCloudConfig
from petrel.schedulers import (
    Assign,
    AssignCloud,
    DaaScheduler,
    DaemonOnlyScheduler,
    Delay,
    RoundRobinScheduler,
    make_scheduler,
)
from replay_oracle import ReplayOracle


class Scripted:
    """Plays back a fixed list of decisions, one per invocation."""

    name = "scripted"

    def __init__(self, decisions):
        self._decisions = iter(decisions)

    def decide(self, task, view):
        return next(self._decisions)


def zero_data_net(**overrides):
    params = dict(daemon_rtt=10.0, remote_rtt=60.0)
    params.update(overrides)
    return make_net(**params)


def small_topology(vms=1, count=2, speed=1.0):
    net = zero_data_net()
    return make_topology(
        *(make_cloudlet(i, vm_count=vms, speed_factor=speed, net=net) for i in range(count))
    )


class TestVmSchedule:
    def test_all_vms_start_idle(self):
        vms = VmSchedule(3)
        assert vms.ready_times() == [0.0, 0.0, 0.0]
        assert vms.earliest_ready() == 0.0
        assert vms.has_idle_vm(0.0)

    def test_commit_occupies_the_earliest_vm(self):
        vms = VmSchedule(1)
        start, index = vms.commit(0.0, 800.0)
        assert (start, index) == (0.0, 0)
        start, _ = vms.commit(0.0, 500.0)
        assert start == 800.0
        assert vms.ready_times() == [1300.0]

    def test_commit_spreads_over_idle_vms(self):
        vms = VmSchedule(2)
        vms.commit(0.0, 1000.0)
        start, index = vms.commit(0.0, 1000.0)
        assert start == 0.0
        assert index == 1
        assert vms.ready_times() == [1000.0, 1000.0]

    def test_late_commit_starts_at_now(self):
        vms = VmSchedule(1)
        start, _ = vms.commit(700.0, 100.0)
        assert start == 700.0
        assert vms.ready_times() == [800.0]

    def test_idle_flag_follows_the_clock(self):
        vms = VmSchedule(1)
        vms.commit(0.0, 400.0)
        assert not vms.has_idle_vm(399.0)
        assert vms.has_idle_vm(400.0)

    def test_asof_reads_see_older_state(self):
        vms = VmSchedule(1)
        vms.commit(600.0, 5000.0)
        assert vms.earliest_ready() == 5600.0
        assert vms.earliest_ready_asof(599.0) == 0.0
        assert vms.earliest_ready_asof(600.0) == 5600.0
        assert vms.earliest_ready_asof(10_000.0) == 5600.0

    def test_asof_takes_the_min_across_vms(self):
        vms = VmSchedule(2)
        vms.commit(100.0, 1000.0)
        vms.commit(200.0, 2000.0)
        assert vms.earliest_ready_asof(150.0) == 0.0
        assert vms.earliest_ready_asof(250.0) == 1100.0


class TestProbeAndCommitHelpers:
    def test_probe_is_a_duration_from_now(self):
        vms = VmSchedule(2)
        vms.commit(0.0, 3000.0)
        vms.commit(0.0, 5000.0)
        net = zero_data_net(daemon_rtt=100.0)
        node = make_cloudlet(0, vm_count=2, net=net)
        task = make_task(base_service_time=4000.0, data_volume=0.0)
        assert expected_completion_time(task, node, node, vms, now=2000.0) == 5100.0

    def test_probe_with_a_future_commit_instant(self):
        vms = VmSchedule(1)
        vms.commit(0.0, 3000.0)
        net = zero_data_net(daemon_rtt=100.0)
        node = make_cloudlet(0, net=net)
        task = make_task(base_service_time=4000.0, data_volume=0.0)
        on_time = expected_completion_time(task, node, node, vms, now=2000.0, commit_at=2500.0)
        late = expected_completion_time(task, node, node, vms, now=2000.0, commit_at=3500.0)
        assert on_time == 5100.0
        assert late == 5600.0

    def test_commit_returns_start_completion_and_vm(self):
        vms = VmSchedule(1)
        net = zero_data_net(daemon_rtt=10.0)
        node = make_cloudlet(0, net=net)
        task = make_task(base_service_time=500.0, data_volume=0.0)
        start, completion, vm_index = commit_assignment(task, node, node, vms, now=800.0)
        assert (start, completion, vm_index) == (800.0, 1310.0, 0)

    def test_remote_commit_charges_the_pair_rtt(self):
        net = zero_data_net(daemon_rtt=10.0, remote_rtt=60.0)
        daemon = make_cloudlet(0, net=net)
        executor = make_cloudlet(1, net=net)
        vms = VmSchedule(1)
        task = make_task(base_service_time=500.0, data_volume=0.0)
        _, completion, _ = commit_assignment(task, daemon, executor, vms, now=0.0)
        assert completion == 570.0

    def test_wake_event_lands_a_quantum_later(self):
        task = make_task(task_class="tolerant", latency_bound=9000.0)
        event = schedule_delay(task, 250.0, now=100.0, sequence=7)
        assert event.time == 350.0
        assert event.kind == "delay-expired"
        assert event.sequence == 7

    def test_only_tolerant_tasks_may_wait(self):
        with pytest.raises(SimulationError):
            schedule_delay(make_task(), 250.0, now=0.0, sequence=0)

    def test_wait_must_be_positive(self):
        task = make_task(task_class="tolerant", latency_bound=9000.0)
        with pytest.raises(SimulationError):
            schedule_delay(task, 0.0, now=0.0, sequence=0)


class TestSimulationRuns:
    def test_single_vm_serialises_simultaneous_arrivals(self):
        topo = small_topology(vms=1, count=1)
        trace = [
            make_task(task_id=0, arrival_time=0.0, base_service_time=1000.0, data_volume=0.0),
            make_task(task_id=1, arrival_time=0.0, base_service_time=1000.0, data_volume=0.0),
        ]
        records = Simulation(topo, DaemonOnlyScheduler()).run(trace).records
        assert [r.completion_time for r in records] == [1010.0, 2010.0]
        assert [r.start_time for r in records] == [0.0, 1000.0]

    def test_empty_trace_is_a_quiet_run(self):
        result = Simulation(small_topology(), DaemonOnlyScheduler()).run([])
        assert result.records == []
        assert result.events == []

    def test_independent_daemons_never_queue_on_each_other(self):
        topo = small_topology(vms=1, count=2)
        trace = [
            make_task(task_id=0, daemon_id=0, arrival_time=0.0, base_service_time=1000.0, data_volume=0.0),
            make_task(task_id=1, daemon_id=1, arrival_time=0.0, base_service_time=1000.0, data_volume=0.0),
        ]
        records = Simulation(topo, DaemonOnlyScheduler()).run(trace).records
        assert all(r.start_time == 0.0 for r in records)

    def test_cloud_assignments_never_wait(self):
        topo = small_topology(vms=1, count=1)
        trace = [
            make_task(task_id=i, arrival_time=0.0, cloud_exec_time=700.0, data_volume=0.0)
            for i in range(3)
        ]
        records = Simulation(topo, Scripted([AssignCloud()] * 3)).run(trace).records
        for r in records:
            assert r.start_time == 0.0
            assert r.completion_time == 700.0 + 250.0
            assert r.allocation.executor_label == "cloud"

    def test_delay_defers_and_then_lands(self):
        topo = small_topology(vms=1, count=1)
        busy = make_task(task_id=0, arrival_time=0.0, base_service_time=1000.0, data_volume=0.0)
        waiter = make_task(
            task_id=1, daemon_id=0, arrival_time=0.0, task_class="tolerant",
            base_service_time=100.0, data_volume=0.0, latency_bound=50_000.0,
        )
        policy = Scripted([Assign(0), Delay(300.0), Delay(300.0), Assign(0)])
        result = Simulation(topo, policy).run([busy, waiter])
        record = result.records[1]
        assert record.assign_time == 600.0
        assert record.delays_taken == 2
        assert record.start_time == 1000.0
        assert record.completion_time == 1110.0

    def test_delays_beyond_the_cap_abort(self):
        topo = small_topology(vms=1, count=1)
        task = make_task(
            task_id=0, task_class="tolerant", latency_bound=1e12, data_volume=0.0
        )

        class AlwaysDelay:
            name = "always-delay"

            def decide(self, t, view):
                return Delay(10.0)

        sim = Simulation(topo, AlwaysDelay(), max_delays=5)
        with pytest.raises(SimulationError):
            sim.run([task])

    def test_records_keep_trace_order_not_completion_order(self):
        topo = small_topology(vms=2, count=2)
        trace = [
            make_task(task_id=5, arrival_time=0.0, base_service_time=5000.0, data_volume=0.0),
            make_task(task_id=3, arrival_time=10.0, base_service_time=100.0, data_volume=0.0),
        ]
        records = Simulation(topo, DaemonOnlyScheduler()).run(trace).records
        assert [r.task_id for r in records] == [5, 3]
        assert records[0].completion_time > records[1].completion_time

    def test_turnaround_speedup_and_bound_flags(self):
        topo = small_topology(vms=1, count=1)
        trace = [
            make_task(
                task_id=0, arrival_time=100.0, task_class="tolerant",
                base_service_time=1000.0, mobile_exec_time=5050.0,
                data_volume=0.0, latency_bound=1010.0,
            ),
            make_task(
                task_id=1, arrival_time=100.0, task_class="tolerant",
                base_service_time=1000.0, mobile_exec_time=5050.0,
                data_volume=0.0, latency_bound=1010.0,
            ),
            make_task(task_id=2, arrival_time=100.0, data_volume=0.0),
        ]
        policy = Scripted([Assign(0), Assign(0), AssignCloud()])
        records = Simulation(topo, policy).run(trace).records
        first, second, sensitive = records
        assert first.turnaround == 1010.0
        assert first.speedup == 5.0
        assert first.bound_violated is False
        assert second.turnaround == 2010.0
        assert second.bound_violated is True
        assert sensitive.bound_violated is None

    def test_weighted_turnaround_is_turnaround_over_service(self):
        topo = small_topology(vms=1, count=1)
        trace = [
            make_task(task_id=0, arrival_time=0.0, base_service_time=1000.0, data_volume=0.0),
            make_task(task_id=1, arrival_time=0.0, base_service_time=1000.0, data_volume=0.0),
        ]
        records = Simulation(topo, DaemonOnlyScheduler()).run(trace).records
        assert records[0].weighted_turnaround == 1010.0 / 1000.0
        assert records[1].weighted_turnaround == 2010.0 / 1000.0

    def test_completion_events_match_records(self):
        topo = small_topology(vms=1, count=2)
        trace = [
            make_task(task_id=i, daemon_id=i % 2, arrival_time=50.0 * i, data_volume=0.0)
            for i in range(6)
        ]
        result = Simulation(topo, DaemonOnlyScheduler()).run(trace)
        completions = {e.task_id: e.time for e in result.events if e.kind == COMPLETED}
        for record in result.records:
            assert completions[record.task_id] == record.completion_time

    def test_decision_log_is_time_ordered(self):
        topo = small_topology(vms=1, count=2)
        trace = [
            make_task(task_id=i, daemon_id=i % 2, arrival_time=30.0 * i, data_volume=0.0)
            for i in range(8)
        ]
        result = Simulation(topo, RoundRobinScheduler()).run(trace)
        times = [d.time for d in result.decisions]
        assert times == sorted(times)
        assert [d.task_id for d in result.decisions] == list(range(8))


class TestTraceValidation:
    def test_rejects_unsorted_traces(self):
        trace = [
            make_task(task_id=0, arrival_time=100.0),
            make_task(task_id=1, arrival_time=50.0),
        ]
        with pytest.raises(SimulationError):
            Simulation(small_topology(), DaemonOnlyScheduler()).run(trace)

    def test_rejects_duplicate_task_ids(self):
        trace = [
            make_task(task_id=0, arrival_time=0.0),
            make_task(task_id=0, arrival_time=10.0),
        ]
        with pytest.raises(SimulationError):
            Simulation(small_topology(), DaemonOnlyScheduler()).run(trace)

    def test_rejects_unknown_daemons(self):
        trace = [make_task(task_id=0, daemon_id=9)]
        with pytest.raises(SimulationError):
            Simulation(small_topology(), DaemonOnlyScheduler()).run(trace)

    def test_rejects_assignments_to_unknown_cloudlets(self):
        trace = [make_task(task_id=0)]
        sim = Simulation(small_topology(), Scripted([Assign(42)]))
        with pytest.raises(SimulationError):
            sim.run(trace)

    def test_rejects_foreign_decision_objects(self):
        trace = [make_task(task_id=0)]
        sim = Simulation(small_topology(), Scripted(["park it"]))
        with pytest.raises(SimulationError):
            sim.run(trace)

    def test_rejects_an_empty_topology(self):
        from petrel.model import EdgeCloud

        with pytest.raises(SimulationError):
            Simulation(EdgeCloud(cloudlets=()), DaemonOnlyScheduler())


class TestProbeStaleness:
    def _sim(self, latency):
        topo = small_topology(vms=1, count=2)
        return Simulation(topo, DaemonOnlyScheduler(), probe_latency=latency)

    def test_remote_probes_lag_behind_commits(self):
        sim = self._sim(1500.0)
        sim.vm_schedules[1].commit(600.0, 5000.0)
        task = make_task(daemon_id=0, data_volume=0.0)
        view = ClusterView(sim, task, now=1000.0)
        probe = view.probe(1)
        assert probe.has_idle_vm  # the 600ms commit is not visible yet
        assert probe.expected_completion == 1000.0 + 1000.0 + 70.0

    def test_remote_probes_catch_up_once_the_lag_passes(self):
        sim = self._sim(1500.0)
        sim.vm_schedules[1].commit(600.0, 5000.0)
        task = make_task(daemon_id=0, data_volume=0.0)
        probe = ClusterView(sim, task, now=2200.0).probe(1)
        assert not probe.has_idle_vm
        assert probe.expected_completion == 5600.0 + 1000.0 + 70.0

    def test_daemon_probes_are_always_live(self):
        sim = self._sim(1500.0)
        sim.vm_schedules[0].commit(600.0, 5000.0)
        task = make_task(daemon_id=0, data_volume=0.0)
        probe = ClusterView(sim, task, now=1000.0).probe(0)
        assert not probe.has_idle_vm
        assert probe.expected_completion == 5600.0 + 1000.0 + 10.0

    def test_zero_latency_means_fresh_probes_everywhere(self):
        sim = self._sim(0.0)
        sim.vm_schedules[1].commit(600.0, 5000.0)
        task = make_task(daemon_id=0, data_volume=0.0)
        probe = ClusterView(sim, task, now=1000.0).probe(1)
        assert not probe.has_idle_vm

    def test_delayed_daemon_projection_uses_live_state(self):
        sim = self._sim(1500.0)
        sim.vm_schedules[0].commit(600.0, 5000.0)
        task = make_task(daemon_id=0, data_volume=0.0)
        view = ClusterView(sim, task, now=1000.0)
        assert view.daemon_completion_if_delayed(400.0) == 5600.0 + 1000.0 + 10.0
        assert view.daemon_completion_if_delayed(9000.0) == 10_000.0 + 1000.0 + 10.0


def busy_mixed_trace(n=60, daemons=3):
    trace = []
    for i in range(n):
        tolerant = i % 3 == 2
        trace.append(
            make_task(
                task_id=i,
                daemon_id=i % daemons,
                arrival_time=100.0 * i,
                task_class="tolerant" if tolerant else "sensitive",
                base_service_time=900.0 + 37.0 * (i % 7),
                data_volume=125_000.0,
                latency_bound=30_000.0 if tolerant else None,
            )
        )
    return trace


class TestPhysicalInvariants:
    def test_no_vm_runs_two_tasks_at_once(self):
        topo = small_topology(vms=2, count=3)
        policy = DaaScheduler(np.random.default_rng(5), delay_quantum=200.0)
        result = Simulation(topo, policy, probe_latency=300.0).run(busy_mixed_trace())
        by_record = {r.task_id: r for r in result.records}
        intervals = {}
        for event in result.events:
            if event.kind != COMPLETED or event.cloudlet_id is None:
                continue
            record = by_record[event.task_id]
            exec_time = record.service_time
            intervals.setdefault((event.cloudlet_id, event.vm_index), []).append(
                (record.start_time, record.start_time + exec_time)
            )
        assert intervals
        for spans in intervals.values():
            spans.sort()
            for (_, end), (start, _) in zip(spans, spans[1:]):
                assert start >= end

    def test_record_ordering_invariants(self):
        topo = small_topology(vms=2, count=3)
        policy = DaaScheduler(np.random.default_rng(6), delay_quantum=200.0)
        records = Simulation(topo, policy, probe_latency=300.0).run(busy_mixed_trace()).records
        for r in records:
            assert r.arrival_time <= r.assign_time <= r.start_time
            assert r.completion_time > r.start_time
            assert r.turnaround == r.completion_time - r.arrival_time
            assert r.speedup == pytest.approx(5000.0 / r.turnaround)
            if r.delays_taken == 0 and r.task_class.token == "sensitive":
                assert r.assign_time == r.arrival_time


class TestReplayAgreement:
    @pytest.mark.parametrize("latency", [0.0, 300.0])
    @pytest.mark.parametrize("name", ["daa", "two-choices", "greedy", "round-robin"])
    def test_engine_matches_the_handwritten_replay(self, name, latency):
        topo = small_topology(vms=2, count=3)
        trace = busy_mixed_trace(40)
        seed = 2024

        def build():
            return make_scheduler(
                name, rng=np.random.default_rng(seed), delay_quantum=200.0
            )

        result = Simulation(topo, build(), probe_latency=latency).run(trace)
        replay = ReplayOracle(topo, probe_latency=latency).run(trace, build())
        assert len(result.records) == len(replay)
        for got, want in zip(result.records, replay):
            assert got.task_id == want.task_id
            assert got.allocation.executor_label == want.executor
            assert got.assign_time == want.assign_time
            assert got.start_time == want.start_time
            assert got.completion_time == want.completion_time
            assert got.delays_taken == want.delays_taken


class TestSimulateEntryPoint:
    def test_accepts_policy_names_and_instances(self):
        config = EdgeCloudConfig(cloudlet_count=3, probe_latency_ms=0.0)
        trace = busy_mixed_trace(20)
        by_name = run_simulation(config, trace, "daemon-only", seed=99)
        by_instance = run_simulation(config, trace, DaemonOnlyScheduler(), seed=99)
        assert by_name == by_instance

    def test_same_seed_same_records(self):
        config = EdgeCloudConfig(cloudlet_count=3)
        trace = busy_mixed_trace(30)
        first = run_simulation(config, trace, "daa", seed=4242)
        second = run_simulation(config, trace, "daa", seed=4242)
        assert first == second

    def test_shared_topology_isolates_policy_randomness(self):
        from petrel.config import build_topology

        config = EdgeCloudConfig(cloudlet_count=3)
        topo = build_topology(config, seed=11)
        trace = busy_mixed_trace(30)
        a = run_simulation(config, trace, "daemon-only", seed=1, topology=topo)
        b = run_simulation(config, trace, "daemon-only", seed=2, topology=topo)
        assert a == b  # daemon-only consumes no randomness
