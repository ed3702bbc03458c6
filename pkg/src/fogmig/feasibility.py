"""Per-slot constraint checks over a schedule.

Five checks: node capacity, chain link utilization, access link utilization,
VNF instance capacity, and assignment-implies-deployment.  All bounds are
non-strict (load equal to the limit is feasible) and violations are returned
as data rather than raised, so planners can inspect the full picture.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from .makespan import Schedule, incoming_traffic
from .model import Scenario

NODE_CAPACITY = "node-capacity"
CHAIN_LINK = "chain-link"
ACCESS_LINK = "access-link"
VNF_CAPACITY = "vnf-capacity"
DEPLOYMENT = "deployment"


@dataclass(frozen=True)
class Violation:
    slot: int
    constraint: str
    entities: tuple
    load: float
    limit: float

    def __str__(self):
        ent = "/".join(str(e) for e in self.entities)
        return (f"slot {self.slot}: {self.constraint} violated by {ent} "
                f"(load {self.load} > limit {self.limit})")


@dataclass(frozen=True)
class FeasibilityReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["slot", "constraint", "entities", "load", "limit"])
        for v in self.violations:
            writer.writerow([v.slot, v.constraint,
                             "/".join(str(e) for e in v.entities),
                             repr(v.load), repr(v.limit)])
        return buf.getvalue()


def check_node_capacity(schedule: Schedule, scenario: Scenario, tau: int):
    """Deployed instances' VCPU demands must fit each node's usable capacity."""
    sl = schedule.at(tau)
    loads: dict[str, float] = {}
    members: dict[str, list] = {}
    for (vnf_id, idx), node_id in sl.deploy.items():
        loads[node_id] = loads.get(node_id, 0.0) + scenario.vnf(vnf_id).resource_demand
        members.setdefault(node_id, []).append((vnf_id, idx))
    out = []
    for node_id in sorted(loads):
        node = scenario.node(node_id)
        limit = node.max_utilization * node.capacity
        if loads[node_id] > limit:
            out.append(Violation(tau, NODE_CAPACITY,
                                 (node_id, tuple(sorted(members[node_id]))),
                                 loads[node_id], limit))
    return out


def check_chain_link_utilization(schedule: Schedule, scenario: Scenario, tau: int):
    """FG-edge traffic routed over each inter-node link must fit its cap."""
    sl = schedule.at(tau)
    net = schedule.network
    loads: dict[tuple, float] = {}
    members: dict[tuple, list] = {}
    for r in scenario.requests:
        for e in r.edges:
            ha = sl.assign.get((r.id, e.source))
            hb = sl.assign.get((r.id, e.target))
            if ha is None or hb is None or ha[1] == hb[1]:
                continue
            link = tuple(sorted((ha[1], hb[1])))
            loads[link] = loads.get(link, 0.0) + e.traffic
            members.setdefault(link, []).append((r.id, e.source, e.target))
    out = []
    for link in sorted(loads):
        limit = (scenario.network.link_max_utilization
                 * net.bandwidth(link[0], link[1], tau))
        if loads[link] > limit:
            out.append(Violation(tau, CHAIN_LINK, (link, tuple(members[link])),
                                 loads[link], limit))
    return out


def check_access_link_utilization(schedule: Schedule, scenario: Scenario, tau: int):
    """Connected user flows into each (user, host) access link must fit its cap."""
    sl = schedule.at(tau)
    net = schedule.network
    loads: dict[tuple, float] = {}
    members: dict[tuple, list] = {}
    for r in scenario.requests:
        for fl in r.user_flows:
            if not fl.connected:
                continue
            host = sl.assign.get((r.id, fl.vnf))
            if host is None:
                continue
            link = (fl.user, host[1])
            loads[link] = loads.get(link, 0.0) + fl.traffic
            members.setdefault(link, []).append((r.id, fl.vnf))
    out = []
    for link in sorted(loads):
        user = scenario.user(link[0])
        limit = user.access_max_utilization * net.bandwidth(link[0], link[1], tau)
        if loads[link] > limit:
            out.append(Violation(tau, ACCESS_LINK, (link, tuple(members[link])),
                                 loads[link], limit))
    return out


def check_vnf_capacity(schedule: Schedule, scenario: Scenario, tau: int):
    """Each instance's assigned incoming traffic must fit its usable capacity."""
    sl = schedule.at(tau)
    loads: dict[tuple, float] = {}
    members: dict[tuple, list] = {}
    for r in scenario.requests:
        for v in r.vnfs:
            a = sl.assign.get((r.id, v))
            if a is None:
                continue
            inst = (v, a[0])
            loads[inst] = loads.get(inst, 0.0) + incoming_traffic(r, v)
            members.setdefault(inst, []).append(r.id)
    out = []
    for inst in sorted(loads):
        vnf = scenario.vnf(inst[0])
        limit = vnf.max_utilization * vnf.processing_capacity
        if loads[inst] > limit:
            out.append(Violation(tau, VNF_CAPACITY, (inst, tuple(members[inst])),
                                 loads[inst], limit))
    return out


def check_assignment_deployed(schedule: Schedule, tau: int):
    """Every assignment must point at a deployed (instance, node) pair."""
    sl = schedule.at(tau)
    out = []
    for (rid, vnf_id), (idx, node_id) in sorted(sl.assign.items()):
        if sl.deploy.get((vnf_id, idx)) != node_id:
            out.append(Violation(tau, DEPLOYMENT, (rid, vnf_id, idx, node_id),
                                 1.0, 0.0))
    return out


def is_feasible(schedule: Schedule, scenario: Scenario, tau: int) -> FeasibilityReport:
    """Union of the five constraint checks for one slot."""
    violations = (check_node_capacity(schedule, scenario, tau)
                  + check_chain_link_utilization(schedule, scenario, tau)
                  + check_access_link_utilization(schedule, scenario, tau)
                  + check_vnf_capacity(schedule, scenario, tau)
                  + check_assignment_deployed(schedule, tau))
    return FeasibilityReport(tuple(violations))
