"""Per-slot placement decisions: greedy migration, baselines, initial placement.

The migration heuristic (``acm_step``) carries the previous slot forward,
then revisits every VNF whose interactions (processing, predecessor
transfers, user transfers) are still open.  For each it builds the set of
fog nodes able to take the VNF and its incoming flows, and moves it to the
candidate minimizing communication latency + processing delay + migration
overhead.  Ties break on the lowest node id so runs replay exactly.

``exhaustive_step`` is a brute-force re-derivation of the same per-VNF
choice used as an oracle on tiny instances: it enumerates all fog nodes,
checks feasibility by building a trial slice and running the full constraint
suite on it, evaluates the same three-term cost, and applies the true argmin
with the shared tie-break.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from .feasibility import is_feasible
from .makespan import (ProgressState, Schedule, ScheduleError, Slice,
                       advance_slot, incoming_traffic)
from .model import Request, Scenario
from .network import NetworkModel


class PlacementError(RuntimeError):
    """No feasible placement found within the retry budget."""


class PlannerError(ValueError):
    """Planner misuse: unknown planner id or instance-size guard tripped."""


EXHAUSTIVE_MAX_NODES = 4
EXHAUSTIVE_MAX_VNFS = 8
RANDOM_REJECT_CAP = 10


class SliceView:
    """Adapter exposing one hypothetical slice at a fixed slot to the checks."""

    def __init__(self, network: NetworkModel, sl: Slice, tau: int):
        self.network = network
        self._sl = sl
        self._tau = tau

    def at(self, tau: int) -> Slice:
        if tau != self._tau:
            raise ScheduleError(f"view only defined at slot {self._tau}")
        return self._sl


@dataclass
class Decision:
    """One per-VNF outcome of a planning step."""

    request_id: str
    vnf_id: str
    source: str
    target: str
    cost: float | None = None
    stalled: bool = False


@dataclass
class PlannerState:
    """Everything a per-slot step consumes: schedule so far, progress, RNG."""

    scenario: Scenario
    network: NetworkModel
    schedule: Schedule
    progress: ProgressState
    rng: random.Random
    instance_next: dict = field(default_factory=dict)

    def __post_init__(self):
        for sl in self.schedule.slices:
            for (vnf_id, idx) in sl.deploy:
                nxt = self.instance_next.get(vnf_id, 0)
                if idx + 1 > nxt:
                    self.instance_next[vnf_id] = idx + 1

    def clone(self) -> "PlannerState":
        rng = random.Random()
        rng.setstate(self.rng.getstate())
        schedule = Schedule(self.network, [sl.copy() for sl in self.schedule.slices])
        return PlannerState(self.scenario, self.network, schedule,
                            self.progress.clone(), rng,
                            dict(self.instance_next))


# ---------------------------------------------------------------------------
# Shared plumbing


def _instance_load(sl: Slice, scenario: Scenario, vnf_id: str, idx: int) -> float:
    """Traffic already assigned to instance (vnf_id, idx), in request order."""
    load = 0.0
    for r in scenario.requests:
        a = sl.assign.get((r.id, vnf_id))
        if a is not None and a[0] == idx:
            load += incoming_traffic(r, vnf_id)
    return load


def _node_load(sl: Slice, scenario: Scenario, node_id: str) -> float:
    return sum(scenario.vnf(vnf_id).resource_demand
               for (vnf_id, _idx), n in sl.deploy.items() if n == node_id)


def _link_load(sl: Slice, scenario: Scenario, pair: tuple) -> float:
    load = 0.0
    for r in scenario.requests:
        for e in r.edges:
            ha = sl.assign.get((r.id, e.source))
            hb = sl.assign.get((r.id, e.target))
            if (ha is not None and hb is not None and ha[1] != hb[1]
                    and tuple(sorted((ha[1], hb[1]))) == pair):
                load += e.traffic
    return load


def _access_load(sl: Slice, scenario: Scenario, user_id: str, node_id: str) -> float:
    load = 0.0
    for r in scenario.requests:
        for fl in r.user_flows:
            if fl.connected and fl.user == user_id:
                host = sl.assign.get((r.id, fl.vnf))
                if host is not None and host[1] == node_id:
                    load += fl.traffic
    return load


def _usable_instances(sl: Slice, scenario: Scenario, request: Request,
                      vnf_id: str, node_id: str) -> tuple[list[int], list[int]]:
    """Instances of the type on the node, and the subset with spare capacity."""
    vnf = scenario.vnf(vnf_id)
    cap = vnf.max_utilization * vnf.processing_capacity
    demand = incoming_traffic(request, vnf_id)
    existing = sorted(j for (v, j), n in sl.deploy.items()
                      if v == vnf_id and n == node_id)
    usable = [j for j in existing
              if _instance_load(sl, scenario, vnf_id, j) + demand <= cap]
    return existing, usable


def _apply_move(state: PlannerState, work: Slice, request: Request,
                vnf_id: str, target: str) -> None:
    """Reassign the request's VNF to ``target``, reusing a random instance
    with spare capacity or instantiating a new one, and drop the old
    instance's deployment flag when it no longer serves any request."""
    old_idx, old_node = work.assign[(request.id, vnf_id)]
    _existing, usable = _usable_instances(work, state.scenario, request,
                                          vnf_id, target)
    if usable:
        j = state.rng.choice(usable)
    else:
        j = state.instance_next.get(vnf_id, 0)
        state.instance_next[vnf_id] = j + 1
        work.deploy[(vnf_id, j)] = target
    work.assign[(request.id, vnf_id)] = (j, target)
    still_used = any(a == (old_idx, old_node)
                     for (_rid, v), a in work.assign.items() if v == vnf_id)
    if not still_used:
        work.deploy.pop((vnf_id, old_idx), None)


def candidate_cost(state: PlannerState, work: Slice, tau: int, request: Request,
                   vnf_id: str, n0: str, n1: str) -> tuple[float, float, float]:
    """Three cost terms of hosting the VNF on ``n1`` this slot (all in ms).

    communication: per predecessor edge and attached user flow, propagation
    delay to ``n1`` plus the still-untransferred traffic at the link's
    per-unit delay; processing: the still-unprocessed traffic at the node's
    per-unit processing delay; migration: the one-shot charge for moving the
    image from ``n0``, zero when staying put.
    """
    net, prog, rid = state.network, state.progress, request.id
    comm = 0.0
    for e in request.edges_into(vnf_id):
        hs = work.assign.get((rid, e.source))
        if hs is None:
            continue
        track = prog.edges[(rid, e.source, e.target)]
        comm += (net.propagation_delay(hs[1], n1, tau)
                 + track.remaining * net.per_unit_transfer_delay(hs[1], n1, tau))
    for fl in request.flows_into(vnf_id):
        track = prog.users[(rid, fl.user, fl.vnf)]
        comm += (net.propagation_delay(fl.user, n1, tau)
                 + track.remaining * net.per_unit_transfer_delay(fl.user, n1, tau))
    proc = (prog.proc[(rid, vnf_id)].remaining
            * state.scenario.node(n1).delay_for(vnf_id))
    if n1 == n0:
        mig = 0.0
    else:
        image = state.scenario.vnf(vnf_id).image_size
        mig = (net.propagation_delay(n0, n1, tau)
               + image / net.bandwidth(n0, n1, tau))
    return comm, proc, mig


def _can_host(state: PlannerState, work: Slice, tau: int, request: Request,
              vnf_id: str, n0: str, n1: str) -> bool:
    """Candidate filter: room for the VNF and for its incoming flows at tau."""
    if n1 == n0:
        return True  # already hosted there; nothing is added
    scenario = state.scenario
    existing, usable = _usable_instances(work, scenario, request, vnf_id, n1)
    if not usable:
        vnf = scenario.vnf(vnf_id)
        if (incoming_traffic(request, vnf_id)
                > vnf.max_utilization * vnf.processing_capacity):
            return False  # a fresh instance could not legally carry the load
        node = scenario.node(n1)
        if (_node_load(work, scenario, n1) + vnf.resource_demand
                > node.max_utilization * node.capacity):
            return False
    for e in request.edges_into(vnf_id):
        hs = work.assign.get((request.id, e.source))
        if hs is None or hs[1] == n1 or e.traffic == 0:
            continue
        pair = tuple(sorted((hs[1], n1)))
        limit = (scenario.network.link_max_utilization
                 * state.network.bandwidth(hs[1], n1, tau))
        if _link_load(work, scenario, pair) + e.traffic > limit:
            return False
    for fl in request.flows_into(vnf_id):
        if fl.traffic == 0:
            continue
        user = scenario.user(fl.user)
        limit = (user.access_max_utilization
                 * state.network.bandwidth(fl.user, n1, tau))
        if _access_load(work, scenario, fl.user, n1) + fl.traffic > limit:
            return False
    return True


def _move_feasible(state: PlannerState, work: Slice, tau: int, request: Request,
                   vnf_id: str, n0: str, n1: str) -> bool:
    """Full feasibility of one reassignment, assuming the pre-move slice is
    feasible: the candidate filter's checks plus the VNF's outgoing links,
    which a move relocates as well."""
    if not _can_host(state, work, tau, request, vnf_id, n0, n1):
        return False
    scenario = state.scenario
    for e in request.edges:
        if e.source != vnf_id or e.traffic == 0:
            continue
        hd = work.assign.get((request.id, e.target))
        if hd is None or hd[1] == n1:
            continue
        pair = tuple(sorted((hd[1], n1)))
        limit = (scenario.network.link_max_utilization
                 * state.network.bandwidth(n1, hd[1], tau))
        if _link_load(work, scenario, pair) + e.traffic > limit:
            return False
    return True


def _pending_vnfs(state: PlannerState):
    for request in state.scenario.requests:
        for vnf_id in request.vnfs:
            if state.progress.vnf_pending(request.id, vnf_id):
                yield request, vnf_id


# ---------------------------------------------------------------------------
# Planner steps


def no_migration_step(state: PlannerState, tau: int, log=None) -> Slice:
    """Keep the previous slot's variables untouched."""
    return state.schedule.at(tau - 1).copy()


def acm_step(state: PlannerState, tau: int, log: list | None = None) -> Slice:
    """Greedy per-slot migration over fog candidates for open-interaction VNFs."""
    work = state.schedule.at(tau - 1).copy()
    fog_ids = sorted(n.id for n in state.scenario.fog_nodes())
    for request, vnf_id in _pending_vnfs(state):
        cur = work.assign.get((request.id, vnf_id))
        if cur is None:
            continue
        n0 = cur[1]
        best, best_cost = None, math.inf
        for n1 in fog_ids:  # ascending id: first strict improvement wins ties
            if not _can_host(state, work, tau, request, vnf_id, n0, n1):
                continue
            cost = sum(candidate_cost(state, work, tau, request, vnf_id, n0, n1))
            if cost < best_cost:
                best, best_cost = n1, cost
        if best is None:
            # empty candidate set: the VNF stays put this slot
            if log is not None:
                log.append(Decision(request.id, vnf_id, n0, n0, stalled=True))
            continue
        if best != n0:
            _apply_move(state, work, request, vnf_id, best)
        if log is not None:
            log.append(Decision(request.id, vnf_id, n0, best, cost=best_cost))
    return work


def exhaustive_step(state: PlannerState, tau: int, log: list | None = None) -> Slice:
    """Brute-force argmin over all fog nodes; oracle for acm_step's choices.

    Feasibility of each candidate is established independently by applying a
    trial move to a copy of the working slice and running the full per-slot
    constraint suite on it.
    """
    scenario = state.scenario
    if len(scenario.nodes) > EXHAUSTIVE_MAX_NODES:
        raise PlannerError(
            f"exhaustive planner is limited to {EXHAUSTIVE_MAX_NODES} nodes, "
            f"scenario has {len(scenario.nodes)}")
    if scenario.total_vnf_count() > EXHAUSTIVE_MAX_VNFS:
        raise PlannerError(
            f"exhaustive planner is limited to {EXHAUSTIVE_MAX_VNFS} VNFs, "
            f"scenario has {scenario.total_vnf_count()}")

    work = state.schedule.at(tau - 1).copy()
    fog_ids = sorted(n.id for n in state.scenario.fog_nodes())
    for request, vnf_id in _pending_vnfs(state):
        cur = work.assign.get((request.id, vnf_id))
        if cur is None:
            continue
        n0 = cur[1]
        best, best_cost = None, math.inf
        for n1 in fog_ids:
            if n1 != n0:
                trial = work.copy()
                _trial_move(trial, state, request, vnf_id, n1)
                view = SliceView(state.network, trial, tau)
                if not is_feasible(view, scenario, tau).ok:
                    continue
            cost = sum(candidate_cost(state, work, tau, request, vnf_id, n0, n1))
            if cost < best_cost:
                best, best_cost = n1, cost
        if best is None:
            if log is not None:
                log.append(Decision(request.id, vnf_id, n0, n0, stalled=True))
            continue
        if best != n0:
            _apply_move(state, work, request, vnf_id, best)
        if log is not None:
            log.append(Decision(request.id, vnf_id, n0, best, cost=best_cost))
    return work


def _trial_move(trial: Slice, state: PlannerState, request: Request,
                vnf_id: str, target: str) -> None:
    """Hypothetical move for feasibility probing; lowest usable instance,
    scratch index for a new one, no RNG consumed."""
    old_idx, old_node = trial.assign[(request.id, vnf_id)]
    _existing, usable = _usable_instances(trial, state.scenario, request,
                                          vnf_id, target)
    if usable:
        j = usable[0]
    else:
        j = state.instance_next.get(vnf_id, 0)
        trial.deploy[(vnf_id, j)] = target
    trial.assign[(request.id, vnf_id)] = (j, target)
    still_used = any(a == (old_idx, old_node)
                     for (_rid, v), a in trial.assign.items() if v == vnf_id)
    if not still_used:
        trial.deploy.pop((vnf_id, old_idx), None)


def random_migration_step(state: PlannerState, tau: int, p_move: float = 1.0,
                          log: list | None = None) -> Slice:
    """Move each assignment to a uniformly random feasible node.

    Each VNF redraws with probability ``p_move``; the draw may land on the
    current host (no move).  Infeasible targets are rejected and redrawn up
    to a small cap, after which the VNF stays put.
    """
    scenario = state.scenario
    work = state.schedule.at(tau - 1).copy()
    node_ids = [n.id for n in scenario.nodes]
    for key in sorted(work.assign):
        rid, vnf_id = key
        if state.rng.random() >= p_move:
            continue
        request = scenario.request(rid)
        n0 = work.assign[key][1]
        for _attempt in range(RANDOM_REJECT_CAP):
            n1 = state.rng.choice(node_ids)
            if n1 == n0:
                break
            if _move_feasible(state, work, tau, request, vnf_id, n0, n1):
                _apply_move(state, work, request, vnf_id, n1)
                if log is not None:
                    log.append(Decision(rid, vnf_id, n0, n1))
                break
    return work


# ---------------------------------------------------------------------------
# Initial placement


def initial_placement(scenario: Scenario, seed: int,
                      network: NetworkModel | None = None,
                      retry_cap: int = 1000) -> Slice:
    """Uniformly random assignment of every request's VNFs, resampled until
    the slot-0 constraint suite passes; deterministic per seed."""
    net = network if network is not None else NetworkModel(scenario, seed)
    rng = random.Random(f"{seed}|place")
    node_ids = [n.id for n in scenario.nodes]
    for _attempt in range(retry_cap):
        sl = Slice()
        counters: dict[str, int] = {}
        for request in scenario.requests:
            for vnf_id in request.vnfs:
                node_id = rng.choice(node_ids)
                _existing, usable = _usable_instances(sl, scenario, request,
                                                      vnf_id, node_id)
                if usable:
                    j = rng.choice(usable)
                else:
                    j = counters.get(vnf_id, 0)
                    counters[vnf_id] = j + 1
                    sl.deploy[(vnf_id, j)] = node_id
                sl.assign[(request.id, vnf_id)] = (j, node_id)
        if is_feasible(SliceView(net, sl, 0), scenario, 0).ok:
            return sl
    raise PlacementError(
        f"no feasible initial placement found in {retry_cap} attempts; "
        f"the scenario is over-constrained")


# ---------------------------------------------------------------------------
# Planner objects for the harness


class Planner:
    name = "?"
    static = False

    def __init__(self):
        self.decisions: list[Decision] = []

    def step(self, state: PlannerState, tau: int) -> Slice:
        raise NotImplementedError


class AcmPlanner(Planner):
    name = "acm"

    def step(self, state, tau):
        self.decisions = []
        return acm_step(state, tau, self.decisions)


class NoMigrationPlanner(Planner):
    name = "none"
    static = True

    def step(self, state, tau):
        self.decisions = []
        return no_migration_step(state, tau)


class RandomMigrationPlanner(Planner):
    name = "random"

    def __init__(self, p_move: float = 1.0):
        super().__init__()
        self.p_move = p_move

    def step(self, state, tau):
        self.decisions = []
        return random_migration_step(state, tau, self.p_move, self.decisions)


class ExhaustivePlanner(Planner):
    name = "exact"

    def step(self, state, tau):
        self.decisions = []
        return exhaustive_step(state, tau, self.decisions)


def compare_planners(scenario: Scenario, seed: int,
                     slots: int | None = None) -> tuple[list, int]:
    """Step the greedy and exhaustive planners side by side from identical
    states and compare every per-VNF node choice.

    The greedy planner drives the simulation forward; at each slot the
    exhaustive planner runs on a clone of the same state.  Returns the list
    of (slot, request, vnf, greedy target, exhaustive target) mismatches and
    the total number of choices compared.
    """
    cap = slots if slots is not None else scenario.sim.slots
    network = NetworkModel(scenario, seed, slots=cap)
    schedule = Schedule(network)
    schedule.append(initial_placement(scenario, seed, network))
    progress = ProgressState(scenario)
    state = PlannerState(scenario, network, schedule, progress,
                         random.Random(f"{seed}|plan"))
    advance_slot(progress, schedule, 0)
    mismatches: list = []
    total = 0
    tau = 1
    while not progress.all_complete() and tau <= cap:
        twin = state.clone()
        log_greedy: list[Decision] = []
        log_exact: list[Decision] = []
        sl = acm_step(state, tau, log_greedy)
        exhaustive_step(twin, tau, log_exact)
        exact_targets = {(d.request_id, d.vnf_id): d.target for d in log_exact}
        for d in log_greedy:
            total += 1
            other = exact_targets.get((d.request_id, d.vnf_id))
            if other != d.target:
                mismatches.append((tau, d.request_id, d.vnf_id, d.target, other))
        schedule.append(sl)
        advance_slot(progress, schedule, tau)
        tau += 1
    return mismatches, total


def make_planner(name: str, p_move: float = 1.0) -> Planner:
    if name == "acm":
        return AcmPlanner()
    if name == "none":
        return NoMigrationPlanner()
    if name == "random":
        return RandomMigrationPlanner(p_move)
    if name == "exact":
        return ExhaustivePlanner()
    raise PlannerError(f"unknown planner {name!r} "
                       f"(expected acm, none, random or exact)")
