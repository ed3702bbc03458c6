"""Domain types and scenario documents for cloud/fog component migration runs.

A scenario document is a single JSON object with top-level keys ``catalog``,
``nodes``, ``users``, ``requests``, ``network`` and ``sim`` (plus an optional
``name``).  Units are fixed by the schema: times in milliseconds, traffic
amounts in kilobytes, rates in KB/ms, node capacities in VCPUs.  The parser
validates every cross reference and structural invariant and reports the
offending field on failure.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from importlib import resources

TREE_KINDS = ("leaf", "seq", "par", "sel", "loop")
WEIGHT_TOL = 1e-9


class ScenarioError(ValueError):
    """A scenario document is malformed or violates a model invariant."""


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ScenarioError(msg)


# ---------------------------------------------------------------------------
# Structure trees


@dataclass(frozen=True)
class StructureTree:
    """Hierarchical decomposition of an application into substructures.

    Leaves name application components (VNF types); internal nodes combine
    their children in sequence, in parallel, by weighted selection, or as a
    repeated loop body with repeat probability ``repeat``.
    """

    kind: str
    vnf: str | None = None
    children: tuple["StructureTree", ...] = ()
    weights: tuple[float, ...] | None = None
    repeat: float | None = None

    def leaves(self) -> list[str]:
        """VNF ids of all leaves, in left-to-right traversal order."""
        if self.kind == "leaf":
            return [self.vnf]
        out: list[str] = []
        for child in self.children:
            out.extend(child.leaves())
        return out


def leaf(vnf: str) -> StructureTree:
    return StructureTree("leaf", vnf=vnf)


def seq(*children: StructureTree) -> StructureTree:
    return StructureTree("seq", children=tuple(children))


def par(*children: StructureTree) -> StructureTree:
    return StructureTree("par", children=tuple(children))


def sel(*children: StructureTree, weights=None) -> StructureTree:
    w = tuple(weights) if weights is not None else None
    return StructureTree("sel", children=tuple(children), weights=w)


def loop(*children: StructureTree, repeat: float) -> StructureTree:
    return StructureTree("loop", children=tuple(children), repeat=repeat)


def _validate_tree(tree: StructureTree, where: str) -> None:
    _require(tree.kind in TREE_KINDS,
             f"{where}: unknown node kind {tree.kind!r}")
    if tree.kind == "leaf":
        _require(isinstance(tree.vnf, str) and tree.vnf != "",
                 f"{where}: leaf requires a VNF id")
        _require(not tree.children, f"{where}: leaf nodes have zero children")
        return
    _require(tree.vnf is None, f"{where}: internal node cannot name a VNF")
    _require(len(tree.children) >= 1,
             f"{where}: internal node needs at least one child")
    if tree.kind == "sel":
        _require(tree.weights is not None
                 and len(tree.weights) == len(tree.children),
                 f"{where}: selection needs one weight per child")
        total = sum(tree.weights)
        _require(abs(total - 1.0) <= WEIGHT_TOL,
                 f"{where}: selection weights sum to {total}, "
                 f"expected 1 (within {WEIGHT_TOL})")
        _require(all(w >= 0 for w in tree.weights),
                 f"{where}: selection weights must be non-negative")
    else:
        _require(tree.weights is None,
                 f"{where}: weights are only valid on selection nodes")
    if tree.kind == "loop":
        _require(tree.repeat is not None and 0.0 <= tree.repeat < 1.0,
                 f"{where}: loop repeat probability must satisfy 0 <= q < 1, "
                 f"got {tree.repeat}")
    else:
        _require(tree.repeat is None,
                 f"{where}: repeat is only valid on loop nodes")
    for i, child in enumerate(tree.children):
        _validate_tree(child, f"{where}.children[{i}]")


def build_structure_tree(spec, catalog_ids=None, where: str = "structure") -> StructureTree:
    """Build and validate a StructureTree from a nested expression.

    ``spec`` is either an already constructed StructureTree (from the
    ``leaf``/``seq``/``par``/``sel``/``loop`` helpers) or the nested dict
    form used in scenario documents.  Selection weights default to equal
    probability when omitted.  Every VNF id must appear in exactly one leaf;
    when ``catalog_ids`` is given, leaves must name known VNF types.
    """
    tree = spec if isinstance(spec, StructureTree) else _tree_from_obj(spec, where)
    tree = _fill_selection_weights(tree)
    _validate_tree(tree, where)
    seen: set[str] = set()
    for v in tree.leaves():
        _require(v not in seen, f"{where}: VNF {v!r} appears in more than one leaf")
        seen.add(v)
        if catalog_ids is not None:
            _require(v in catalog_ids, f"{where}: leaf names unknown VNF {v!r}")
    return tree


def _fill_selection_weights(tree: StructureTree) -> StructureTree:
    children = tuple(_fill_selection_weights(c) for c in tree.children)
    weights = tree.weights
    if tree.kind == "sel" and weights is None and children:
        weights = (1.0 / len(children),) * len(children)
    return replace(tree, children=children, weights=weights)


def _tree_from_obj(obj, where: str) -> StructureTree:
    _require(isinstance(obj, dict), f"{where}: expected an object")
    kind = obj.get("kind")
    _require(kind in TREE_KINDS, f"{where}.kind: unknown node kind {kind!r}")
    if kind == "leaf":
        return StructureTree("leaf", vnf=obj.get("vnf"))
    raw_children = obj.get("children", [])
    _require(isinstance(raw_children, list),
             f"{where}.children: expected a list")
    children = tuple(_tree_from_obj(c, f"{where}.children[{i}]")
                     for i, c in enumerate(raw_children))
    weights = tuple(obj["weights"]) if "weights" in obj else None
    repeat = obj.get("repeat")
    return StructureTree(kind, children=children, weights=weights, repeat=repeat)


def _tree_to_obj(tree: StructureTree) -> dict:
    if tree.kind == "leaf":
        return {"kind": "leaf", "vnf": tree.vnf}
    out: dict = {"kind": tree.kind,
                 "children": [_tree_to_obj(c) for c in tree.children]}
    if tree.weights is not None:
        out["weights"] = list(tree.weights)
    if tree.repeat is not None:
        out["repeat"] = tree.repeat
    return out


# ---------------------------------------------------------------------------
# Catalog, infrastructure, users


@dataclass(frozen=True)
class VnfType:
    """A VNF catalog entry.

    ``processing_capacity`` caps the total traffic rate an instance may be
    asked to serve, ``max_utilization`` the usable fraction of it.
    ``image_size`` (KB) is transferred on every migration and
    ``resource_demand`` (VCPUs) is consumed on the hosting node.
    """

    id: str
    processing_capacity: float
    max_utilization: float
    image_size: float
    resource_demand: int


@dataclass(frozen=True)
class Node:
    """A cloud or fog compute node.

    ``processing_delay`` maps VNF ids to the time (ms) needed to process one
    KB of traffic; the key ``"*"`` provides a default.  Cloud nodes carry a
    static ``location``; fog node positions come from the mobility trace.
    """

    id: str
    domain: str
    capacity: float
    max_utilization: float
    processing_delay: tuple[tuple[str, float], ...]
    location: tuple[float, float] | None = None

    def __post_init__(self):
        object.__setattr__(self, "_delay_map", dict(self.processing_delay))

    def delay_for(self, vnf_id: str) -> float:
        table = self._delay_map
        if vnf_id in table:
            return table[vnf_id]
        _require("*" in table,
                 f"nodes[{self.id}].processing_delay: no entry for {vnf_id!r}")
        return table["*"]


@dataclass(frozen=True)
class EndUser:
    """A fixed end-user device with per-domain access link parameters."""

    id: str
    location: tuple[float, float]
    access_bandwidth: tuple[tuple[str, float], ...]
    access_max_utilization: float

    def __post_init__(self):
        object.__setattr__(self, "_bw_map", dict(self.access_bandwidth))

    def bandwidth_to(self, domain: str) -> float:
        table = self._bw_map
        _require(domain in table,
                 f"users[{self.id}].access_bandwidth: no entry for {domain!r}")
        return table[domain]


@dataclass(frozen=True)
class FgEdge:
    """A forwarding-graph edge with its traffic amount (KB)."""

    source: str
    target: str
    traffic: float


@dataclass(frozen=True)
class UserFlow:
    """An end-user attachment to a VNF: connectivity flag plus traffic (KB)."""

    user: str
    vnf: str
    connected: int
    traffic: float


@dataclass
class Request:
    """A structured application request: VNF set, FG edges, tree, user flows."""

    id: str
    vnfs: tuple[str, ...]
    edges: tuple[FgEdge, ...]
    structure: StructureTree
    user_flows: tuple[UserFlow, ...]
    _edges_into: dict = field(init=False, repr=False, compare=False)
    _flows_into: dict = field(init=False, repr=False, compare=False)
    _incoming: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        into: dict[str, list[FgEdge]] = {v: [] for v in self.vnfs}
        for e in self.edges:
            into[e.target].append(e)
        flows: dict[str, list[UserFlow]] = {v: [] for v in self.vnfs}
        for fl in self.user_flows:
            if fl.connected:
                flows[fl.vnf].append(fl)
        self._edges_into = into
        self._flows_into = flows
        self._incoming = {
            v: (sum(e.traffic for e in into[v])
                + sum(fl.traffic for fl in self.user_flows if fl.vnf == v))
            for v in self.vnfs
        }

    def edges_into(self, vnf_id: str) -> list[FgEdge]:
        return self._edges_into[vnf_id]

    def flows_into(self, vnf_id: str) -> list[UserFlow]:
        """Attached user flows with connectivity flag set."""
        return self._flows_into[vnf_id]


def immediate_predecessors(request: Request, vnf_id: str) -> set[str]:
    """FG-edge sources pointing at ``vnf_id``; empty for entry VNFs."""
    _require(vnf_id in request.vnfs,
             f"request {request.id}: VNF {vnf_id!r} is not part of the request")
    return {e.source for e in request.edges_into(vnf_id)}


def topological_order(request: Request) -> list[str]:
    """VNFs ordered so predecessors come first; raises if edges form a cycle."""
    remaining = {v: immediate_predecessors(request, v) for v in request.vnfs}
    order: list[str] = []
    while remaining:
        ready = [v for v, preds in remaining.items() if not preds]
        _require(bool(ready),
                 f"request {request.id}: FG edges contain a cycle among "
                 f"{sorted(remaining)}")
        for v in ready:
            order.append(v)
            del remaining[v]
        for preds in remaining.values():
            preds.difference_update(ready)
    return order


# ---------------------------------------------------------------------------
# Scenario


@dataclass
class NetworkParams:
    """Bandwidth tables, propagation delay range, utilization caps, area."""

    bandwidth: tuple[tuple[str, float], ...]
    user_bandwidth: tuple[tuple[str, float], ...]
    link_max_utilization: float
    user_link_max_utilization: float
    propagation_delay_min: float
    propagation_delay_max: float
    area_side: float
    _bw_map: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self._bw_map = dict(self.bandwidth)

    def pair_bandwidth(self, domain_a: str, domain_b: str) -> float:
        key = "-".join(sorted((domain_a, domain_b)))
        _require(key in self._bw_map, f"network.bandwidth: no entry for {key!r}")
        return self._bw_map[key]


@dataclass
class SimParams:
    """Time discretization and run defaults."""

    slot_length: float
    slots: int
    seed: int
    mobility: str = "uniform"
    waypoint_file: str | None = None
    user_traffic: float = 0.08
    constants: tuple[tuple[str, float], ...] = ()


@dataclass
class Scenario:
    name: str
    catalog: tuple[VnfType, ...]
    nodes: tuple[Node, ...]
    users: tuple[EndUser, ...]
    requests: tuple[Request, ...]
    network: NetworkParams
    sim: SimParams
    _vnfs: dict = field(init=False, repr=False, compare=False)
    _nodes: dict = field(init=False, repr=False, compare=False)
    _users: dict = field(init=False, repr=False, compare=False)
    _requests: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self._vnfs = {v.id: v for v in self.catalog}
        self._nodes = {n.id: n for n in self.nodes}
        self._users = {u.id: u for u in self.users}
        self._requests = {r.id: r for r in self.requests}

    def vnf(self, vnf_id: str) -> VnfType:
        return self._vnfs[vnf_id]

    def node(self, node_id: str) -> Node:
        return self._nodes[node_id]

    def user(self, user_id: str) -> EndUser:
        return self._users[user_id]

    def fog_nodes(self) -> list[Node]:
        return [n for n in self.nodes if n.domain == "fog"]

    def request(self, request_id: str) -> Request:
        return self._requests[request_id]

    def total_vnf_count(self) -> int:
        return sum(len(r.vnfs) for r in self.requests)


def _num(obj: dict, key: str, where: str, *, default=None) -> float:
    if key not in obj:
        _require(default is not None, f"{where}.{key}: missing required field")
        return default
    val = obj[key]
    _require(isinstance(val, (int, float)) and not isinstance(val, bool),
             f"{where}.{key}: expected a number, got {val!r}")
    return float(val)


def _text(obj: dict, key: str, where: str, *, default=None) -> str:
    if key not in obj and default is not None:
        return default
    val = obj.get(key)
    _require(isinstance(val, str) and val != "",
             f"{where}.{key}: expected a non-empty string, got {val!r}")
    return val


def _point(obj, where: str) -> tuple[float, float]:
    _require(isinstance(obj, (list, tuple)) and len(obj) == 2
             and all(isinstance(c, (int, float)) for c in obj),
             f"{where}: expected a [x, y] pair")
    return (float(obj[0]), float(obj[1]))


def _parse_vnf(obj: dict, where: str) -> VnfType:
    vnf = VnfType(
        id=_text(obj, "id", where),
        processing_capacity=_num(obj, "processing_capacity", where),
        max_utilization=_num(obj, "max_utilization", where),
        image_size=_num(obj, "image_size", where),
        resource_demand=int(_num(obj, "resource_demand", where)),
    )
    _require(vnf.processing_capacity > 0,
             f"{where}.processing_capacity: must be > 0")
    _require(0 < vnf.max_utilization <= 1,
             f"{where}.max_utilization: must be in (0, 1]")
    _require(vnf.image_size > 0, f"{where}.image_size: must be > 0")
    _require(vnf.resource_demand >= 1, f"{where}.resource_demand: must be >= 1")
    return vnf


def _parse_node(obj: dict, where: str, area_side: float) -> Node:
    domain = _text(obj, "domain", where)
    _require(domain in ("cloud", "fog"),
             f"{where}.domain: expected 'cloud' or 'fog', got {domain!r}")
    delays = obj.get("processing_delay")
    _require(isinstance(delays, dict) and delays,
             f"{where}.processing_delay: expected a non-empty mapping")
    for k, v in delays.items():
        _require(isinstance(v, (int, float)) and v > 0,
                 f"{where}.processing_delay[{k}]: must be a positive number")
    location = None
    if domain == "cloud":
        _require("location" in obj,
                 f"{where}.location: cloud nodes need a static location")
        location = _point(obj["location"], f"{where}.location")
        _require(0 <= location[0] <= area_side and 0 <= location[1] <= area_side,
                 f"{where}.location: outside the deployment area")
    else:
        _require("location" not in obj,
                 f"{where}.location: fog nodes take locations from the "
                 f"mobility trace, not the scenario file")
    node = Node(
        id=_text(obj, "id", where),
        domain=domain,
        capacity=_num(obj, "capacity", where),
        max_utilization=_num(obj, "max_utilization", where),
        processing_delay=tuple(sorted((k, float(v)) for k, v in delays.items())),
        location=location,
    )
    _require(node.capacity > 0, f"{where}.capacity: must be > 0")
    _require(0 < node.max_utilization <= 1,
             f"{where}.max_utilization: must be in (0, 1]")
    return node


def _parse_user(obj: dict, where: str, net: NetworkParams) -> EndUser:
    location = _point(obj.get("location"), f"{where}.location")
    _require(0 <= location[0] <= net.area_side and 0 <= location[1] <= net.area_side,
             f"{where}.location: outside the deployment area")
    bw = obj.get("access_bandwidth", dict(net.user_bandwidth))
    _require(isinstance(bw, dict) and set(bw) >= {"cloud", "fog"},
             f"{where}.access_bandwidth: expected entries for 'cloud' and 'fog'")
    for k, v in bw.items():
        _require(isinstance(v, (int, float)) and v > 0,
                 f"{where}.access_bandwidth[{k}]: must be a positive number")
    return EndUser(
        id=_text(obj, "id", where),
        location=location,
        access_bandwidth=tuple(sorted((k, float(v)) for k, v in bw.items())),
        access_max_utilization=_num(obj, "access_max_utilization", where,
                                    default=net.user_link_max_utilization),
    )


def _parse_request(obj: dict, where: str, catalog_ids: set[str],
                   user_ids: set[str]) -> Request:
    rid = _text(obj, "id", where)
    vnfs = obj.get("vnfs")
    _require(isinstance(vnfs, list) and vnfs,
             f"{where}.vnfs: expected a non-empty list of VNF ids")
    for i, v in enumerate(vnfs):
        _require(v in catalog_ids, f"{where}.vnfs[{i}]: unknown VNF {v!r}")
    _require(len(set(vnfs)) == len(vnfs), f"{where}.vnfs: duplicate VNF ids")
    vnf_set = set(vnfs)

    edges = []
    for i, e in enumerate(obj.get("edges", [])):
        ew = f"{where}.edges[{i}]"
        src, dst = _text(e, "source", ew), _text(e, "target", ew)
        _require(src in vnf_set, f"{ew}.source: {src!r} is not in vnfs")
        _require(dst in vnf_set, f"{ew}.target: {dst!r} is not in vnfs")
        _require(src != dst, f"{ew}: self edges are not allowed")
        traffic = _num(e, "traffic", ew)
        _require(traffic >= 0, f"{ew}.traffic: must be >= 0")
        edges.append(FgEdge(src, dst, traffic))

    flows = []
    for i, fl in enumerate(obj.get("user_flows", [])):
        fw = f"{where}.user_flows[{i}]"
        user = _text(fl, "user", fw)
        _require(user in user_ids, f"{fw}.user: unknown user {user!r}")
        vnf_id = _text(fl, "vnf", fw)
        _require(vnf_id in vnf_set, f"{fw}.vnf: {vnf_id!r} is not in vnfs")
        connected = int(_num(fl, "connected", fw))
        _require(connected in (0, 1), f"{fw}.connected: must be 0 or 1")
        traffic = _num(fl, "traffic", fw)
        _require(traffic >= 0, f"{fw}.traffic: must be >= 0")
        _require(connected == 1 or traffic == 0,
                 f"{fw}: disconnected flows must carry zero traffic "
                 f"(connected = 0 forces traffic = 0)")
        flows.append(UserFlow(user, vnf_id, connected, traffic))

    tree = build_structure_tree(obj.get("structure"), catalog_ids=vnf_set,
                                where=f"{where}.structure")
    _require(set(tree.leaves()) == vnf_set,
             f"{where}.structure: tree leaves {sorted(tree.leaves())} do not "
             f"equal the request VNF set {sorted(vnf_set)}")
    request = Request(rid, tuple(vnfs), tuple(edges), tree, tuple(flows))
    topological_order(request)  # rejects cyclic FG edge sets
    return request


def _parse_network(obj: dict) -> NetworkParams:
    where = "network"
    _require(isinstance(obj, dict), f"{where}: expected an object")
    bw = obj.get("bandwidth")
    _require(isinstance(bw, dict) and bw,
             f"{where}.bandwidth: expected a non-empty mapping of domain pairs")
    for k, v in bw.items():
        _require(isinstance(v, (int, float)) and v > 0,
                 f"{where}.bandwidth[{k}]: must be a positive number")
    ubw = obj.get("user_bandwidth")
    _require(isinstance(ubw, dict) and set(ubw) >= {"cloud", "fog"},
             f"{where}.user_bandwidth: expected entries for 'cloud' and 'fog'")
    net = NetworkParams(
        bandwidth=tuple(sorted((k, float(v)) for k, v in bw.items())),
        user_bandwidth=tuple(sorted((k, float(v)) for k, v in ubw.items())),
        link_max_utilization=_num(obj, "link_max_utilization", where, default=1.0),
        user_link_max_utilization=_num(obj, "user_link_max_utilization", where,
                                       default=1.0),
        propagation_delay_min=_num(obj, "propagation_delay_min", where),
        propagation_delay_max=_num(obj, "propagation_delay_max", where),
        area_side=_num(obj, "area_side", where),
    )
    _require(0 < net.propagation_delay_min <= net.propagation_delay_max,
             f"{where}: propagation delay range must satisfy 0 < min <= max")
    _require(net.area_side > 0, f"{where}.area_side: must be > 0")
    _require(0 < net.link_max_utilization <= 1,
             f"{where}.link_max_utilization: must be in (0, 1]")
    _require(0 < net.user_link_max_utilization <= 1,
             f"{where}.user_link_max_utilization: must be in (0, 1]")
    return net


def _parse_sim(obj: dict) -> SimParams:
    where = "sim"
    _require(isinstance(obj, dict), f"{where}: expected an object")
    sim = SimParams(
        slot_length=_num(obj, "slot_length", where),
        slots=int(_num(obj, "slots", where)),
        seed=int(_num(obj, "seed", where, default=0)),
        mobility=_text(obj, "mobility", where, default="uniform"),
        waypoint_file=obj.get("waypoint_file"),
        user_traffic=_num(obj, "user_traffic", where, default=0.08),
        constants=tuple(sorted((k, float(v))
                               for k, v in obj.get("constants", {}).items())),
    )
    _require(sim.slot_length > 0, f"{where}.slot_length: must be > 0")
    _require(sim.slots >= 1, f"{where}.slots: must be >= 1")
    _require(sim.mobility in ("uniform", "waypoints"),
             f"{where}.mobility: expected 'uniform' or 'waypoints'")
    return sim


def scenario_from_dict(doc: dict) -> Scenario:
    _require(isinstance(doc, dict), "document: expected a JSON object")
    for key in ("catalog", "nodes", "users", "requests", "network", "sim"):
        _require(key in doc, f"document: missing top-level key {key!r}")
    net = _parse_network(doc["network"])
    sim = _parse_sim(doc["sim"])
    catalog = tuple(_parse_vnf(o, f"catalog[{i}]")
                    for i, o in enumerate(doc["catalog"]))
    _require(len({v.id for v in catalog}) == len(catalog),
             "catalog: duplicate VNF ids")
    nodes = tuple(_parse_node(o, f"nodes[{i}]", net.area_side)
                  for i, o in enumerate(doc["nodes"]))
    _require(len({n.id for n in nodes}) == len(nodes), "nodes: duplicate node ids")
    _require(bool(nodes), "nodes: at least one node is required")
    users = tuple(_parse_user(o, f"users[{i}]", net)
                  for i, o in enumerate(doc["users"]))
    _require(len({u.id for u in users}) == len(users), "users: duplicate user ids")
    catalog_ids = {v.id for v in catalog}
    user_ids = {u.id for u in users}
    requests = tuple(_parse_request(o, f"requests[{i}]", catalog_ids, user_ids)
                     for i, o in enumerate(doc["requests"]))
    _require(len({r.id for r in requests}) == len(requests),
             "requests: duplicate request ids")
    return Scenario(
        name=doc.get("name", "scenario"),
        catalog=catalog, nodes=nodes, users=users, requests=requests,
        network=net, sim=sim,
    )


def parse_scenario(text: str) -> Scenario:
    """Parse a scenario document; raises ScenarioError naming any defect."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"document: not valid JSON ({exc})") from exc
    return scenario_from_dict(doc)


def scenario_to_dict(scenario: Scenario) -> dict:
    return {
        "name": scenario.name,
        "catalog": [
            {"id": v.id, "processing_capacity": v.processing_capacity,
             "max_utilization": v.max_utilization, "image_size": v.image_size,
             "resource_demand": v.resource_demand}
            for v in scenario.catalog
        ],
        "nodes": [
            {k: v for k, v in (
                ("id", n.id), ("domain", n.domain), ("capacity", n.capacity),
                ("max_utilization", n.max_utilization),
                ("processing_delay", dict(n.processing_delay)),
                ("location", list(n.location) if n.location else None),
            ) if v is not None}
            for n in scenario.nodes
        ],
        "users": [
            {"id": u.id, "location": list(u.location),
             "access_bandwidth": dict(u.access_bandwidth),
             "access_max_utilization": u.access_max_utilization}
            for u in scenario.users
        ],
        "requests": [
            {"id": r.id, "vnfs": list(r.vnfs),
             "edges": [{"source": e.source, "target": e.target,
                        "traffic": e.traffic} for e in r.edges],
             "structure": _tree_to_obj(r.structure),
             "user_flows": [{"user": fl.user, "vnf": fl.vnf,
                             "connected": fl.connected, "traffic": fl.traffic}
                            for fl in r.user_flows]}
            for r in scenario.requests
        ],
        "network": {
            "bandwidth": dict(scenario.network.bandwidth),
            "user_bandwidth": dict(scenario.network.user_bandwidth),
            "link_max_utilization": scenario.network.link_max_utilization,
            "user_link_max_utilization": scenario.network.user_link_max_utilization,
            "propagation_delay_min": scenario.network.propagation_delay_min,
            "propagation_delay_max": scenario.network.propagation_delay_max,
            "area_side": scenario.network.area_side,
        },
        "sim": {
            "slot_length": scenario.sim.slot_length,
            "slots": scenario.sim.slots,
            "seed": scenario.sim.seed,
            "mobility": scenario.sim.mobility,
            "waypoint_file": scenario.sim.waypoint_file,
            "user_traffic": scenario.sim.user_traffic,
            "constants": dict(scenario.sim.constants),
        },
    }


def emit_scenario(scenario: Scenario) -> str:
    """Serialize a Scenario back to document text; parse(emit(s)) == s."""
    return json.dumps(scenario_to_dict(scenario), indent=2)


def load_scenario(path) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return parse_scenario(fh.read())


def load_preset(name: str) -> Scenario:
    """Load one of the shipped scenario presets (app1, app2, app3, tiny)."""
    ref = resources.files("fogmig").joinpath(f"presets/{name}.scenario")
    return parse_scenario(ref.read_text(encoding="utf-8"))


def diagonal(area_side: float) -> float:
    return area_side * math.sqrt(2.0)
