"""End-to-end simulation runs, experiment sweeps, and result emission.

A run places every VNF at slot 0, then alternates planner step, feasibility
assertion and progress accumulation until every interaction completes or the
slot budget runs out.  Sweeps rewrite the scenario's end-user attachments
(connection count on the first/last component, or the number of components
connected at all), replicate each point over consecutive seeds, and collect
one row per run.
"""

from __future__ import annotations

import csv
import io
import math
import os
import random
import statistics
from dataclasses import dataclass, field, replace
from pathlib import Path

from .feasibility import FeasibilityReport, is_feasible
from .makespan import (MakespanReport, ProgressState, Schedule, advance_slot,
                       migration_counts, request_makespan)
from .model import Scenario, UserFlow, load_scenario
from .network import NetworkModel
from .planner import Planner, PlannerState, initial_placement, make_planner

OUT_DIR_ENV = "FOGMIG_OUT"


class FeasibilityError(RuntimeError):
    """A planner emitted a slot that fails the constraint suite."""

    def __init__(self, tau: int, report: FeasibilityReport):
        self.tau = tau
        self.report = report
        lines = "; ".join(str(v) for v in report.violations)
        super().__init__(f"infeasible schedule at slot {tau}: {lines}")


class SweepError(ValueError):
    """Unknown or inapplicable sweep parameter."""


@dataclass
class RunConfig:
    """One experiment description: scenario, planner(s), seeds, sweep, output."""

    scenario_path: str | None = None
    scenario: Scenario | None = None
    planner: str = "acm"
    planners: tuple[str, ...] | None = None
    seed: int = 0
    slots: int | None = None
    reps: int = 1
    sweep_param: str | None = None
    sweep_values: tuple = ()
    out_dir: str | None = None
    p_move: float = 1.0
    check: bool = False

    def load(self) -> Scenario:
        if self.scenario is not None:
            return self.scenario
        if self.scenario_path is None:
            raise ValueError("RunConfig needs a scenario or a scenario_path")
        return load_scenario(self.scenario_path)

    def validate(self) -> None:
        if self.reps < 1:
            raise ValueError("replication count must be >= 1")
        if self.sweep_param is not None and not self.sweep_values:
            raise SweepError("sweep requires a non-empty values list")


@dataclass
class RunRow:
    planner: str
    scenario: str
    seed: int
    sweep_param: str | None
    sweep_value: float | None
    m_proc: float
    m_com: float
    m_mig: float
    makespan: float
    migrations: int
    mean_migrations_per_slot: float
    slots: int
    completed: bool
    migration_counts: list = field(default_factory=list, repr=False, compare=False)
    report: MakespanReport | None = field(default=None, repr=False, compare=False)
    check_report: FeasibilityReport | None = field(default=None, repr=False,
                                                   compare=False)


@dataclass(frozen=True)
class SummaryRow:
    planner: str
    scenario: str
    sweep_param: str | None
    sweep_value: float | None
    reps: int
    mean_makespan: float
    std_makespan: float
    mean_migrations_per_slot: float
    std_migrations_per_slot: float


CSV_HEADER = ["planner", "scenario", "seed", "sweep_param", "sweep_value",
              "m_proc", "m_com", "m_mig", "makespan", "migrations",
              "mean_migrations_per_slot", "slots", "completed"]


@dataclass
class Metrics:
    """Rows for a batch of runs plus per-sweep-point aggregation."""

    rows: list = field(default_factory=list)

    def add(self, row: RunRow) -> None:
        self.rows.append(row)

    def extend(self, other: "Metrics") -> None:
        self.rows.extend(other.rows)

    def sorted_rows(self) -> list:
        def key(r):
            value = -math.inf if r.sweep_value is None else float(r.sweep_value)
            return (r.planner, value, r.seed, r.scenario)
        return sorted(self.rows, key=key)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in self.sorted_rows():
            writer.writerow([
                r.planner, r.scenario, r.seed,
                r.sweep_param if r.sweep_param is not None else "",
                r.sweep_value if r.sweep_value is not None else "",
                repr(r.m_proc), repr(r.m_com), repr(r.m_mig), repr(r.makespan),
                r.migrations, repr(r.mean_migrations_per_slot), r.slots,
                int(r.completed),
            ])
        return buf.getvalue()

    def summary(self) -> list[SummaryRow]:
        groups: dict = {}
        for r in self.rows:
            groups.setdefault(
                (r.planner, r.scenario, r.sweep_param, r.sweep_value), []).append(r)
        out = []
        for key in sorted(groups, key=lambda k: (
                k[0], k[1], k[2] or "", -math.inf if k[3] is None else float(k[3]))):
            rows = groups[key]
            makespans = [r.makespan for r in rows]
            migrations = [r.mean_migrations_per_slot for r in rows]
            out.append(SummaryRow(
                planner=key[0], scenario=key[1], sweep_param=key[2],
                sweep_value=key[3], reps=len(rows),
                mean_makespan=statistics.fmean(makespans),
                std_makespan=statistics.stdev(makespans) if len(rows) > 1 else 0.0,
                mean_migrations_per_slot=statistics.fmean(migrations),
                std_migrations_per_slot=(statistics.stdev(migrations)
                                         if len(rows) > 1 else 0.0),
            ))
        return out


# ---------------------------------------------------------------------------
# Single runs


def _assert_feasible(schedule: Schedule, scenario: Scenario, tau: int,
                     collected: list | None) -> None:
    report = is_feasible(schedule, scenario, tau)
    if collected is not None:
        collected.extend(report.violations)
    if not report.ok:
        raise FeasibilityError(tau, report)


def _completion_slots(track, inc: float, cap: int) -> int | None:
    """Smallest j >= 1 with acc + j * inc >= need, or None past the cap."""
    if inc <= 0:
        return None
    j = max(1, math.ceil(track.remaining / inc))
    while track.acc + j * inc < track.need:
        j += 1
    while j > 1 and track.acc + (j - 1) * inc >= track.need:
        j -= 1
    return j if j <= cap else None


def _fast_forward_static(progress: ProgressState, schedule: Schedule,
                         cap: int) -> int:
    """Complete pending accumulators analytically under a frozen placement.

    Valid only when every later slice would equal slot 0's, so per-slot
    increments are constant.  Returns the last completion slot reached.
    """
    sl = schedule.at(0)
    net = schedule.network
    scenario = progress.scenario
    slot = progress.slot_length
    last = 0

    for key in sorted(progress.pending_proc):
        rid, vnf_id = key
        track = progress.proc[key]
        a = sl.assign.get(key)
        inc = slot / scenario.node(a[1]).delay_for(vnf_id) if a else 0.0
        j = _completion_slots(track, inc, cap)
        if j is not None:
            track.acc += j * inc
            track.done = j
            progress.pending_proc.discard(key)
            last = max(last, j)

    for key in sorted(progress.pending_edges):
        rid, src, dst = key
        track = progress.edges[key]
        ha, hb = sl.assign.get((rid, src)), sl.assign.get((rid, dst))
        inc = 0.0
        if ha is not None and hb is not None and ha[1] != hb[1]:
            inc = slot / net.per_unit_transfer_delay(ha[1], hb[1], 0)
        j = _completion_slots(track, inc, cap)
        if j is not None:
            track.acc += j * inc
            track.done = j
            progress.pending_edges.discard(key)
            last = max(last, j)

    for key in sorted(progress.pending_users):
        rid, user_id, vnf_id = key
        track = progress.users[key]
        host = sl.assign.get((rid, vnf_id))
        inc = (slot / net.per_unit_transfer_delay(user_id, host[1], 0)
               if host else 0.0)
        j = _completion_slots(track, inc, cap)
        if j is not None:
            track.acc += j * inc
            track.done = j
            progress.pending_users.discard(key)
            last = max(last, j)

    return last


def _run_once(scenario: Scenario, planner: Planner, seed: int,
              slots_cap: int | None = None, check: bool = False,
              sweep_param: str | None = None,
              sweep_value: float | None = None) -> RunRow:
    cap = slots_cap if slots_cap is not None else scenario.sim.slots
    network = NetworkModel(scenario, seed, slots=cap)
    schedule = Schedule(network)
    schedule.append(initial_placement(scenario, seed, network))
    progress = ProgressState(scenario)
    state = PlannerState(scenario, network, schedule, progress,
                         random.Random(f"{seed}|plan"))
    collected = [] if check else None
    _assert_feasible(schedule, scenario, 0, collected)
    advance_slot(progress, schedule, 0)

    if planner.static and not progress.all_complete():
        slots_executed = _fast_forward_static(progress, schedule, cap)
        if not progress.all_complete():
            slots_executed = cap
    else:
        tau = 1
        while not progress.all_complete() and tau <= cap:
            schedule.append(planner.step(state, tau))
            _assert_feasible(schedule, scenario, tau, collected)
            advance_slot(progress, schedule, tau)
            tau += 1
        slots_executed = schedule.last_slot

    completed = progress.all_complete()
    report = request_makespan(scenario, schedule, progress=progress,
                              allow_incomplete=True)
    counts = migration_counts(schedule)
    total = sum(counts)
    return RunRow(
        planner=planner.name, scenario=scenario.name, seed=seed,
        sweep_param=sweep_param, sweep_value=sweep_value,
        m_proc=sum(r.processing for r in report.rows),
        m_com=sum(r.communication for r in report.rows),
        m_mig=sum(r.migration for r in report.rows),
        makespan=report.objective,
        migrations=total,
        mean_migrations_per_slot=(total / slots_executed
                                  if slots_executed > 0 else 0.0),
        slots=slots_executed, completed=completed,
        migration_counts=counts, report=report,
        check_report=(FeasibilityReport(tuple(collected))
                      if collected is not None else None),
    )


def run_simulation(config: RunConfig) -> Metrics:
    """Execute one run described by the config; deterministic per seed."""
    config.validate()
    scenario = config.load()
    planner = make_planner(config.planner, config.p_move)
    row = _run_once(scenario, planner, config.seed, config.slots, config.check)
    metrics = Metrics()
    metrics.add(row)
    return metrics


# ---------------------------------------------------------------------------
# Sweeps


def first_and_last_vnfs(scenario: Scenario, request_id: str) -> tuple[str, str]:
    leaves = scenario.request(request_id).structure.leaves()
    return leaves[0], leaves[-1]


def connection_order(request) -> list[str]:
    """Canonical order in which components gain user connectivity: the first
    and last tree leaves, then the interior ones in leaf order."""
    leaves = request.structure.leaves()
    if len(leaves) == 1:
        return leaves
    return [leaves[0], leaves[-1]] + leaves[1:-1]


def with_user_connections(scenario: Scenario, connections: int) -> Scenario:
    """Attach ``connections`` user flows to each request's first and last
    component, spread round-robin over the end-user devices; each connection
    carries the scenario's per-connection traffic."""
    if connections < 0:
        raise SweepError("connection count must be >= 0")
    users = [u.id for u in scenario.users]
    rate = scenario.sim.user_traffic
    new_requests = []
    for r in scenario.requests:
        leaves = r.structure.leaves()
        targets = {leaves[0], leaves[-1]}
        flows = [fl for fl in r.user_flows if fl.vnf not in targets]
        for vnf_id in (leaves[0], leaves[-1]) if len(leaves) > 1 else (leaves[0],):
            per_user = [0] * len(users)
            for i in range(connections):
                per_user[i % len(users)] += 1
            for uid, count in zip(users, per_user):
                if count:
                    flows.append(UserFlow(uid, vnf_id, 1, count * rate))
        new_requests.append(replace(r, user_flows=tuple(flows)))
    return replace(scenario, requests=tuple(new_requests))


def with_connected_vnfs(scenario: Scenario, connected: int) -> Scenario:
    """Connect the first ``connected`` components (canonical order) of each
    request to every end-user device, one connection each; all other
    components lose their attachments."""
    users = [u.id for u in scenario.users]
    rate = scenario.sim.user_traffic
    new_requests = []
    for r in scenario.requests:
        order = connection_order(r)
        if not 0 <= connected <= len(order):
            raise SweepError(
                f"connected VNF count {connected} outside [0, {len(order)}] "
                f"for request {r.id}")
        flows = [UserFlow(uid, vnf_id, 1, rate)
                 for vnf_id in order[:connected] for uid in users]
        new_requests.append(replace(r, user_flows=tuple(flows)))
    return replace(scenario, requests=tuple(new_requests))


SWEEP_PARAMS = {
    "user-connections": with_user_connections,
    "connected-vnfs": with_connected_vnfs,
}


def sweep(config: RunConfig) -> Metrics:
    """One run per (planner, sweep value, replication), common seeds per point."""
    config.validate()
    if config.sweep_param not in SWEEP_PARAMS:
        raise SweepError(f"unknown sweep parameter {config.sweep_param!r} "
                         f"(expected one of {sorted(SWEEP_PARAMS)})")
    rewrite = SWEEP_PARAMS[config.sweep_param]
    base = config.load()
    planner_ids = config.planners if config.planners else (config.planner,)
    metrics = Metrics()
    for planner_id in planner_ids:
        for value in config.sweep_values:
            scenario = rewrite(base, int(value))
            for rep in range(config.reps):
                planner = make_planner(planner_id, config.p_move)
                metrics.add(_run_once(scenario, planner, config.seed + rep,
                                      config.slots, config.check,
                                      sweep_param=config.sweep_param,
                                      sweep_value=value))
    return metrics


# ---------------------------------------------------------------------------
# Emission


def _summary_csv(rows: list[SummaryRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["planner", "scenario", "sweep_param", "sweep_value", "reps",
                     "mean_makespan", "std_makespan",
                     "mean_migrations_per_slot", "std_migrations_per_slot"])
    for s in rows:
        writer.writerow([s.planner, s.scenario, s.sweep_param or "",
                         s.sweep_value if s.sweep_value is not None else "",
                         s.reps, repr(s.mean_makespan), repr(s.std_makespan),
                         repr(s.mean_migrations_per_slot),
                         repr(s.std_migrations_per_slot)])
    return buf.getvalue()


def plot_series(summary_rows, value_getter) -> dict:
    """Group sweep summary rows into plottable series.

    One series per planner; when the rows span several scenarios (the
    combined three-application view), one series per (scenario, planner)."""
    series: dict = {}
    scenarios = {s.scenario for s in summary_rows}
    for s in summary_rows:
        label = (s.planner if len(scenarios) == 1
                 else f"{s.scenario}/{s.planner}")
        series.setdefault(label, []).append((s.sweep_value, value_getter(s)))
    return {label: sorted(points) for label, points in series.items()}


def _plot(summary_rows, value_getter, ylabel, path):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    series = plot_series(summary_rows, value_getter)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for label in sorted(series):
        points = series[label]
        ax.plot([p[0] for p in points], [p[1] for p in points],
                marker="o", label=label)
    ax.set_xlabel(summary_rows[0].sweep_param or "sweep value")
    ax.set_ylabel(ylabel)
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def emit_results(metrics: Metrics, out_dir=None) -> list[Path]:
    """Write results.csv, summary.csv, and trend plots for sweep metrics."""
    out = Path(out_dir or os.environ.get(OUT_DIR_ENV, "results"))
    out.mkdir(parents=True, exist_ok=True)
    written = []

    results = out / "results.csv"
    results.write_text(metrics.to_csv(), encoding="utf-8")
    written.append(results)

    summary_rows = metrics.summary()
    summary = out / "summary.csv"
    summary.write_text(_summary_csv(summary_rows), encoding="utf-8")
    written.append(summary)

    sweep_rows = [s for s in summary_rows if s.sweep_value is not None]
    if sweep_rows:
        makespan_png = out / "makespan.png"
        _plot(sweep_rows, lambda s: s.mean_makespan, "mean makespan (ms)",
              makespan_png)
        written.append(makespan_png)
        migrations_png = out / "migrations.png"
        _plot(sweep_rows, lambda s: s.mean_migrations_per_slot,
              "mean migrations per slot", migrations_png)
        written.append(migrations_png)
    return written
