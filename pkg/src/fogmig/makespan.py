"""Slot-threshold makespan calculus over time-indexed schedules.

Processing, per-edge transfer and per-user transfer amounts accumulate from
slot 0 at the rate the current placement allows; each interaction's
completion slot is the first slot at which its accumulator reaches the
required traffic.  Slot counts turn into times, leaf times aggregate through
the structure tree, and host changes between consecutive slots add migration
charges.

Conventions that change every number and are therefore pinned here:

* accumulator sums are inclusive of the completion slot, so a constant
  placement completes processing at slot ceil(A * D / |T|) - 1;
* a zero-traffic interaction completes at slot 0;
* co-located endpoints transfer instantly: the edge completes in its first
  slot with both ends placed on the same node;
* migration between slots tau and tau+1 is priced with both endpoints'
  locations at tau.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

from .model import Request, Scenario
from .network import NetworkModel


class SimulationIncomplete(RuntimeError):
    """An interaction did not finish within the slot budget."""


class ScheduleError(ValueError):
    """The schedule is not defined where an operation needs it."""


# ---------------------------------------------------------------------------
# Schedule


@dataclass
class Slice:
    """One slot of deployment and assignment variables, stored sparsely.

    ``assign`` maps (request id, vnf id) to (instance index, node id): the
    instance of that type serving the request this slot.  ``deploy`` maps
    (vnf id, instance index) to the node currently hosting the instance.
    Keying assignments by (request, vnf) enforces the at-most-one rule.
    """

    assign: dict = field(default_factory=dict)
    deploy: dict = field(default_factory=dict)

    def copy(self) -> "Slice":
        return Slice(dict(self.assign), dict(self.deploy))


class Schedule:
    """Slices indexed by slot, plus the network model they were planned under."""

    def __init__(self, network: NetworkModel, slices=None):
        self.network = network
        self.slices: list[Slice] = list(slices) if slices else []

    def append(self, sl: Slice) -> None:
        self.slices.append(sl)

    def at(self, tau: int) -> Slice:
        if not 0 <= tau < len(self.slices):
            raise ScheduleError(f"schedule is not defined at slot {tau}")
        return self.slices[tau]

    @property
    def last_slot(self) -> int:
        return len(self.slices) - 1


# ---------------------------------------------------------------------------
# Progress accumulators


@dataclass
class Track:
    """One accumulator: required amount, progress so far, completion slot."""

    need: float
    acc: float = 0.0
    done: int | None = None

    @property
    def remaining(self) -> float:
        return max(self.need - self.acc, 0.0) if self.done is None else 0.0


def incoming_traffic(request: Request, vnf_id: str) -> float:
    """Total traffic into a VNF: predecessor edges plus attached user flows."""
    if vnf_id not in request._incoming:
        raise KeyError(f"request {request.id}: VNF {vnf_id!r} not in request")
    return request._incoming[vnf_id]


class ProgressState:
    """Per-request accumulators for processing, edge and user transfers."""

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self.slot_length = scenario.sim.slot_length
        self.proc: dict = {}
        self.edges: dict = {}
        self.users: dict = {}
        self._edge_keys_of: dict = {}
        self._user_keys_of: dict = {}
        for r in scenario.requests:
            for v in r.vnfs:
                self.proc[(r.id, v)] = Track(incoming_traffic(r, v))
                self._edge_keys_of[(r.id, v)] = tuple(
                    (r.id, e.source, e.target) for e in r.edges_into(v))
                self._user_keys_of[(r.id, v)] = tuple(
                    (r.id, fl.user, fl.vnf) for fl in r.flows_into(v))
            for e in r.edges:
                self.edges[(r.id, e.source, e.target)] = Track(e.traffic)
            for fl in r.user_flows:
                if fl.connected:
                    self.users[(r.id, fl.user, fl.vnf)] = Track(fl.traffic)
        self.pending_proc = set(self.proc)
        self.pending_edges = set(self.edges)
        self.pending_users = set(self.users)

    def all_complete(self) -> bool:
        return not (self.pending_proc or self.pending_edges or self.pending_users)

    def vnf_pending(self, request_id: str, vnf_id: str) -> bool:
        """True while the VNF's processing or any incoming transfer is open."""
        key = (request_id, vnf_id)
        if key in self.pending_proc:
            return True
        if any(k in self.pending_edges for k in self._edge_keys_of[key]):
            return True
        return any(k in self.pending_users for k in self._user_keys_of[key])

    def pending_items(self) -> list[tuple]:
        out = [("proc",) + k for k in sorted(self.pending_proc)]
        out += [("edge",) + k for k in sorted(self.pending_edges)]
        out += [("user",) + k for k in sorted(self.pending_users)]
        return out

    def clone(self) -> "ProgressState":
        other = ProgressState.__new__(ProgressState)
        other.scenario = self.scenario
        other.slot_length = self.slot_length
        other.proc = {k: Track(t.need, t.acc, t.done) for k, t in self.proc.items()}
        other.edges = {k: Track(t.need, t.acc, t.done) for k, t in self.edges.items()}
        other.users = {k: Track(t.need, t.acc, t.done) for k, t in self.users.items()}
        other._edge_keys_of = self._edge_keys_of
        other._user_keys_of = self._user_keys_of
        other.pending_proc = set(self.pending_proc)
        other.pending_edges = set(self.pending_edges)
        other.pending_users = set(self.pending_users)
        return other


def advance_slot(state: ProgressState, schedule: Schedule, tau: int) -> ProgressState:
    """Accumulate one slot of progress under the placement at ``tau``.

    Assigned VNFs process |T| / D traffic; edges with both endpoints placed
    transfer |T| / D_link (instant when co-located); user flows transfer over
    the host's access link.  Completion slots are recorded at the first
    threshold crossing and never move.
    """
    sl = schedule.at(tau)
    net = schedule.network
    scenario = state.scenario
    slot = state.slot_length

    for key in sorted(state.pending_proc):
        rid, vnf_id = key
        track = state.proc[key]
        a = sl.assign.get(key)
        if a is not None:
            track.acc += slot / scenario.node(a[1]).delay_for(vnf_id)
        if track.acc >= track.need:
            track.done = tau
            state.pending_proc.discard(key)

    for key in sorted(state.pending_edges):
        rid, src, dst = key
        track = state.edges[key]
        ha = sl.assign.get((rid, src))
        hb = sl.assign.get((rid, dst))
        if ha is not None and hb is not None:
            if ha[1] == hb[1]:
                track.acc = track.need  # co-located: completes within the slot
            else:
                track.acc += slot / net.per_unit_transfer_delay(ha[1], hb[1], tau)
        if track.acc >= track.need:
            track.done = tau
            state.pending_edges.discard(key)

    for key in sorted(state.pending_users):
        rid, user_id, vnf_id = key
        track = state.users[key]
        host = sl.assign.get((rid, vnf_id))
        if host is not None:
            track.acc += slot / net.per_unit_transfer_delay(user_id, host[1], tau)
        if track.acc >= track.need:
            track.done = tau
            state.pending_users.discard(key)

    return state


# ---------------------------------------------------------------------------
# Per-VNF times and tree aggregation


def processing_time(state: ProgressState, request_id: str, vnf_id: str) -> float:
    track = state.proc[(request_id, vnf_id)]
    if track.done is None:
        raise SimulationIncomplete(
            f"processing of ({request_id}, {vnf_id}) never completed; "
            f"the slot budget is too small")
    return track.done * state.slot_length


def communication_time(state: ProgressState, request_id: str, vnf_id: str) -> float:
    """Worst completion slot over incoming edges and connected user flows, as time."""
    worst = 0
    for key in state._edge_keys_of[(request_id, vnf_id)]:
        track = state.edges[key]
        if track.done is None:
            raise SimulationIncomplete(
                f"transfer {key} never completed; the slot budget is too small")
        worst = max(worst, track.done)
    for key in state._user_keys_of[(request_id, vnf_id)]:
        track = state.users[key]
        if track.done is None:
            raise SimulationIncomplete(
                f"user transfer {key} never completed; the slot budget is too small")
        worst = max(worst, track.done)
    return worst * state.slot_length


def migration_time(schedule: Schedule, request_id: str, vnf_id: str) -> float:
    """Total migration charge: PD + image/BW per consecutive-slot host change."""
    net = schedule.network
    image = net.scenario.vnf(vnf_id).image_size
    key = (request_id, vnf_id)
    total = 0.0
    for tau in range(len(schedule.slices) - 1):
        a = schedule.slices[tau].assign.get(key)
        b = schedule.slices[tau + 1].assign.get(key)
        if a is not None and b is not None and a[1] != b[1]:
            total += (net.propagation_delay(a[1], b[1], tau)
                      + image / net.bandwidth(a[1], b[1], tau))
    return total


def aggregate_over_tree(tree, leaf_values: dict) -> float:
    """Fold per-leaf times bottom-up: seq sums, par maxes, sel weights, loop
    scales the child sum by q / (1 - q)."""
    if tree.kind == "leaf":
        if tree.vnf not in leaf_values:
            raise KeyError(f"missing leaf value for {tree.vnf!r}")
        return leaf_values[tree.vnf]
    vals = [aggregate_over_tree(c, leaf_values) for c in tree.children]
    if tree.kind == "seq":
        return sum(vals)
    if tree.kind == "par":
        return max(vals)
    if tree.kind == "sel":
        return sum(w * v for w, v in zip(tree.weights, vals))
    if tree.kind == "loop":
        return (tree.repeat / (1.0 - tree.repeat)) * sum(vals)
    raise ValueError(f"unknown tree kind {tree.kind!r}")


# ---------------------------------------------------------------------------
# Reports


@dataclass(frozen=True)
class RequestMakespan:
    request_id: str
    processing: float
    communication: float
    migration: float

    @property
    def total(self) -> float:
        return self.processing + self.communication + self.migration


@dataclass(frozen=True)
class MakespanReport:
    rows: tuple[RequestMakespan, ...]
    complete: bool = True

    @property
    def objective(self) -> float:
        return sum(r.total for r in self.rows)

    def row(self, request_id: str) -> RequestMakespan:
        for r in self.rows:
            if r.request_id == request_id:
                return r
        raise KeyError(request_id)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["request", "m_proc", "m_com", "m_mig", "m_total"])
        for r in self.rows:
            writer.writerow([r.request_id, repr(r.processing),
                             repr(r.communication), repr(r.migration),
                             repr(r.total)])
        writer.writerow(["ALL", repr(sum(r.processing for r in self.rows)),
                         repr(sum(r.communication for r in self.rows)),
                         repr(sum(r.migration for r in self.rows)),
                         repr(self.objective)])
        return buf.getvalue()


def request_makespan(scenario: Scenario, schedule: Schedule,
                     progress: ProgressState | None = None,
                     allow_incomplete: bool = False) -> MakespanReport:
    """Run the accumulator over every slot of the schedule and aggregate.

    When ``progress`` is given it must already reflect every slot of the
    schedule (the harness advances it incrementally); otherwise a fresh state
    is stepped through all slots here.  Incomplete interactions raise unless
    ``allow_incomplete``, in which case affected components become inf.
    """
    if progress is None:
        progress = ProgressState(scenario)
        for tau in range(len(schedule.slices)):
            advance_slot(progress, schedule, tau)
    rows = []
    complete = True
    for r in scenario.requests:
        leaf_proc, leaf_com, leaf_mig = {}, {}, {}
        for v in r.vnfs:
            try:
                leaf_proc[v] = processing_time(progress, r.id, v)
                leaf_com[v] = communication_time(progress, r.id, v)
            except SimulationIncomplete:
                if not allow_incomplete:
                    raise
                complete = False
                leaf_proc.setdefault(v, float("inf"))
                leaf_com[v] = float("inf")
            leaf_mig[v] = migration_time(schedule, r.id, v)
        rows.append(RequestMakespan(
            request_id=r.id,
            processing=aggregate_over_tree(r.structure, leaf_proc),
            communication=aggregate_over_tree(r.structure, leaf_com),
            migration=aggregate_over_tree(r.structure, leaf_mig),
        ))
    return MakespanReport(rows=tuple(rows), complete=complete)


def migration_counts(schedule: Schedule) -> list[int]:
    """Host changes per slot transition, one entry per consecutive slice pair."""
    counts = []
    for tau in range(len(schedule.slices) - 1):
        before = schedule.slices[tau].assign
        after = schedule.slices[tau + 1].assign
        moved = 0
        for key, a in before.items():
            b = after.get(key)
            if b is not None and a[1] != b[1]:
                moved += 1
        counts.append(moved)
    return counts
