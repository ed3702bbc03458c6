"""Independent reference implementations used as test oracles.

``brute_force_report`` recomputes per-request makespans from scratch with
exact rational arithmetic: a naive slot loop over the schedule, literal
threshold checks, and Fraction tree folding.  It shares no code with the
engine's accumulator.  It requires a degenerate propagation delay range
(min == max) so migration charges stay rational; the random case generators
below guarantee that, and stick to dyadic numbers so the engine's float
arithmetic is exact and results can be compared with zero tolerance.
"""

import random
from fractions import Fraction as F

from helpers import (base_doc, build, cloud_doc, flow_doc, fog_doc,
                     request_doc, user_doc, vnf_doc)


def _domain(scenario, endpoint):
    if endpoint in scenario._nodes:
        return scenario._nodes[endpoint].domain
    return "user"


def _pair_bw(scenario, a, b):
    da, db = _domain(scenario, a), _domain(scenario, b)
    if da == "user":
        return F(dict(scenario.user(a).access_bandwidth)[db])
    if db == "user":
        return F(dict(scenario.user(b).access_bandwidth)[da])
    key = "-".join(sorted((da, db)))
    return F(dict(scenario.network.bandwidth)[key])


def _fold(tree, leaves):
    if tree.kind == "leaf":
        return leaves[tree.vnf]
    vals = [_fold(c, leaves) for c in tree.children]
    if tree.kind == "seq":
        return sum(vals)
    if tree.kind == "par":
        return max(vals)
    if tree.kind == "sel":
        return sum(F(w) * v for w, v in zip(tree.weights, vals))
    if tree.kind == "loop":
        q = F(tree.repeat)
        return q / (1 - q) * sum(vals)
    raise ValueError(tree.kind)


def brute_force_report(scenario, schedule):
    """Exact makespan decomposition per request, or None if any interaction
    stays incomplete within the schedule."""
    net = scenario.network
    assert net.propagation_delay_min == net.propagation_delay_max, \
        "oracle needs a constant propagation delay"
    pd = F(net.propagation_delay_min)
    slot = F(scenario.sim.slot_length)
    n_slots = len(schedule.slices)
    out = {}
    for r in scenario.requests:
        def host(tau, vnf_id):
            a = schedule.slices[tau].assign.get((r.id, vnf_id))
            return None if a is None else a[1]

        need_proc = {v: F(0) for v in r.vnfs}
        for e in r.edges:
            need_proc[e.target] += F(e.traffic)
        for fl in r.user_flows:
            need_proc[fl.vnf] += F(fl.traffic)

        tau_p = {}
        acc = {v: F(0) for v in r.vnfs}
        for tau in range(n_slots):
            for v in r.vnfs:
                if v in tau_p:
                    continue
                h = host(tau, v)
                if h is not None:
                    acc[v] += slot / F(scenario.node(h).delay_for(v))
                if acc[v] >= need_proc[v]:
                    tau_p[v] = tau

        tau_cp = {}
        eacc = {(e.source, e.target): F(0) for e in r.edges}
        for tau in range(n_slots):
            for e in r.edges:
                key = (e.source, e.target)
                if key in tau_cp:
                    continue
                hs, hd = host(tau, e.source), host(tau, e.target)
                if hs is not None and hd is not None:
                    if hs == hd:
                        eacc[key] = F(e.traffic)
                    else:
                        eacc[key] += slot * _pair_bw(scenario, hs, hd)
                if eacc[key] >= F(e.traffic):
                    tau_cp[key] = tau

        tau_cu = {}
        flows = [fl for fl in r.user_flows if fl.connected]
        uacc = {(fl.user, fl.vnf): F(0) for fl in flows}
        for tau in range(n_slots):
            for fl in flows:
                key = (fl.user, fl.vnf)
                if key in tau_cu:
                    continue
                h = host(tau, fl.vnf)
                if h is not None:
                    uacc[key] += slot * _pair_bw(scenario, fl.user, h)
                if uacc[key] >= F(fl.traffic):
                    tau_cu[key] = tau

        if (len(tau_p) < len(r.vnfs) or len(tau_cp) < len(r.edges)
                or len(tau_cu) < len(flows)):
            return None

        leaf_proc = {v: tau_p[v] * slot for v in r.vnfs}
        leaf_com = {}
        for v in r.vnfs:
            slots_in = [tau_cp[(e.source, e.target)] for e in r.edges
                        if e.target == v]
            slots_in += [tau_cu[(fl.user, fl.vnf)] for fl in flows
                         if fl.vnf == v]
            leaf_com[v] = (max(slots_in) if slots_in else 0) * slot
        leaf_mig = {}
        for v in r.vnfs:
            total = F(0)
            for tau in range(n_slots - 1):
                a, b = host(tau, v), host(tau + 1, v)
                if a is not None and b is not None and a != b:
                    total += pd + F(scenario.vnf(v).image_size) / _pair_bw(
                        scenario, a, b)
            leaf_mig[v] = total

        out[r.id] = {
            "proc": _fold(r.structure, leaf_proc),
            "com": _fold(r.structure, leaf_com),
            "mig": _fold(r.structure, leaf_mig),
        }
    return out


# ---------------------------------------------------------------------------
# Random case generators (dyadic numbers throughout)

DYADIC_DELAYS = [0.25, 0.5, 1.0, 2.0, 4.0, 8.0]
DYADIC_BW = [0.5, 1.0, 2.0, 4.0, 8.0]


def random_chain_scenario(rng: random.Random):
    """A random VNF chain on a small static-parameter network."""
    n_vnfs = rng.randint(1, 5)
    n_nodes = rng.randint(1, 4)
    vnfs = [f"v{i}" for i in range(n_vnfs)]
    nodes = []
    for i in range(n_nodes):
        if i % 2 == 0:
            nodes.append(cloud_doc(f"cloud-{i}", location=(16.0 * i, 8.0),
                                   delay=rng.choice(DYADIC_DELAYS)))
        else:
            nodes.append(fog_doc(f"fog-{i}", delay=rng.choice(DYADIC_DELAYS)))
    edges = [{"source": a, "target": b,
              "traffic": rng.randrange(0, 9) * 0.25}
             for a, b in zip(vnfs, vnfs[1:])]
    flows = []
    for v in (vnfs[0], vnfs[-1]):
        if rng.random() < 0.7:
            flows.append(flow_doc("u1", v, traffic=rng.randrange(0, 9) * 0.25))
    doc = base_doc(
        catalog=[vnf_doc(v, image=rng.choice([0.5, 1.0, 2.0])) for v in vnfs],
        nodes=nodes,
        users=[user_doc("u1", cloud_bw=rng.choice(DYADIC_BW),
                        fog_bw=rng.choice(DYADIC_BW))],
        requests=[request_doc("r", vnfs, edges=edges, flows=flows)],
        bandwidth={"cloud-cloud": rng.choice(DYADIC_BW),
                   "cloud-fog": rng.choice(DYADIC_BW),
                   "fog-fog": rng.choice(DYADIC_BW)},
        pd=(0.25, 0.25),
        slot=rng.choice([0.5, 1.0, 2.0]),
        slots=16,
        seed=rng.randrange(10_000),
    )
    return build(doc)


def random_chain_schedule(scenario, rng: random.Random, n_slots=None):
    """Random per-slot placements (with idle gaps) for every request VNF."""
    from fogmig import NetworkModel, Schedule, Slice

    network = NetworkModel(scenario, seed=rng.randrange(10_000), slots=16)
    schedule = Schedule(network)
    node_ids = [n.id for n in scenario.nodes]
    slots = n_slots if n_slots is not None else rng.randint(3, 10)
    for _tau in range(slots):
        sl = Slice()
        for r in scenario.requests:
            for v in r.vnfs:
                if rng.random() < 0.85:
                    node = rng.choice(node_ids)
                    sl.assign[(r.id, v)] = (0, node)
                    sl.deploy[(v, 0)] = node
        schedule.append(sl)
    return schedule


def random_tiny_scenario(rng: random.Random):
    """Tiny planner instance: one cloud, 2..3 fog nodes, 1..2 chain requests.

    Link capacities are generous so only node and instance capacities can
    bind; traffic is dyadic so load sums are exact in any order.
    """
    n_fog = rng.randint(2, 3)
    types = [f"t{i}" for i in range(4)]
    catalog = [vnf_doc(t, capacity=rng.choice([2.0, 4.0, 64.0]),
                       mu=1.0, image=rng.choice([0.5, 1.0, 2.0]),
                       demand=rng.randint(1, 3))
               for t in types]
    nodes = [cloud_doc("cloud-0", location=(8.0, 8.0),
                       delay=rng.choice(DYADIC_DELAYS), capacity=8)]
    nodes += [fog_doc(f"fog-{i}", capacity=rng.randint(4, 8),
                      delay=rng.choice(DYADIC_DELAYS)) for i in range(n_fog)]
    users = [user_doc("u1", location=(32.0, 32.0)),
             user_doc("u2", location=(96.0, 96.0))]
    n_requests = rng.randint(1, 2)
    requests = []
    budget = 8  # planner guard: total VNFs over all requests
    for i in range(n_requests):
        size = rng.randint(2, min(4, budget))
        budget -= size
        members = rng.sample(types, size)
        edges = [{"source": a, "target": b, "traffic": rng.randrange(0, 7) * 0.25}
                 for a, b in zip(members, members[1:])]
        flows = [flow_doc(rng.choice(["u1", "u2"]), v,
                          traffic=rng.randrange(2, 9) * 0.25)
                 for v in members if rng.random() < 0.6]
        requests.append(request_doc(f"r{i}", members, edges=edges, flows=flows))
    doc = base_doc(
        catalog=catalog, nodes=nodes, users=users, requests=requests,
        bandwidth={"cloud-cloud": 64.0, "cloud-fog": 64.0, "fog-fog": 64.0},
        user_bandwidth={"cloud": 64.0, "fog": 64.0},
        pd=(0.25, 1.0),
        slot=1.0, slots=32, seed=rng.randrange(10_000),
    )
    return build(doc)
