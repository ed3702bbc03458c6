"""Node locations over time and location-dependent link delay/bandwidth.

Topology is a complete graph over all nodes plus one access link per
(user, node) pair.  Bandwidth is a table lookup by domain pair; propagation
delay grows linearly with euclidean distance, normalized by the diagonal of
the square deployment area so the maximum is attained only at opposite
corners.
"""

from __future__ import annotations

import math
import random

from .model import Scenario, ScenarioError, diagonal


class MobilityTrace:
    """Per-slot fog node locations inside the deployment square.

    Two generation modes:

    * ``uniform``: every fog node is relocated uniformly at random each slot.
      The location is a pure function of (seed, node, slot), so traces replay
      bit-exactly and are independent of query order.
    * ``waypoints``: locations come from a trace file with one
      ``node slot x y`` record per line; a node holds its last recorded
      position until the next record.
    """

    def __init__(self, scenario: Scenario, seed: int, slots: int,
                 waypoints: dict | None = None):
        self.scenario = scenario
        self.seed = seed
        self.slots = slots
        self.side = scenario.network.area_side
        self.fog_ids = [n.id for n in scenario.fog_nodes()]
        self.waypoints = waypoints
        self._cache: dict = {}
        if waypoints is not None:
            for nid in self.fog_ids:
                if nid not in waypoints or waypoints[nid][0][0] != 0:
                    raise ScenarioError(
                        f"mobility trace: fog node {nid!r} needs a record at slot 0")

    def location(self, node_id: str, tau: int) -> tuple[float, float]:
        if not 0 <= tau <= self.slots:
            raise ValueError(f"slot {tau} outside [0, {self.slots}]")
        key = (node_id, tau)
        loc = self._cache.get(key)
        if loc is None:
            if self.waypoints is not None:
                loc = self._from_waypoints(node_id, tau)
            else:
                rng = random.Random(f"{self.seed}|mob|{node_id}|{tau}")
                loc = (rng.uniform(0.0, self.side), rng.uniform(0.0, self.side))
            self._cache[key] = loc
        return loc

    def _from_waypoints(self, node_id, tau):
        records = self.waypoints[node_id]
        lo, hi = 0, len(records)
        while lo + 1 < hi:  # last record with slot <= tau
            mid = (lo + hi) // 2
            if records[mid][0] <= tau:
                lo = mid
            else:
                hi = mid
        return records[lo][1], records[lo][2]

    def write(self, path, slots: int | None = None) -> None:
        """Emit the trace as ``node slot x y`` lines so runs can be replayed."""
        upto = self.slots if slots is None else slots
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("# node slot x y\n")
            for nid in self.fog_ids:
                for tau in range(upto + 1):
                    x, y = self.location(nid, tau)
                    fh.write(f"{nid} {tau} {x!r} {y!r}\n")


def read_waypoints(path) -> dict:
    """Parse a mobility trace file into {node: [(slot, x, y), ...]} sorted by slot."""
    out: dict[str, list] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 4:
                raise ScenarioError(
                    f"mobility trace line {lineno}: expected 'node slot x y'")
            nid, slot, x, y = parts[0], int(parts[1]), float(parts[2]), float(parts[3])
            out.setdefault(nid, []).append((slot, x, y))
    for records in out.values():
        records.sort()
    return out


class NetworkModel:
    """Location, propagation delay, bandwidth and per-unit transfer delay.

    Endpoints are node ids or user ids.  Bandwidth between two nodes is the
    domain-pair table value; between a user and a node it is the user's
    access bandwidth for the node's domain.  Both are constant over slots in
    the shipped presets, but the signatures keep the slot argument so
    location-dependent models fit without interface changes.
    """

    def __init__(self, scenario: Scenario, seed: int, slots: int | None = None,
                 waypoints: dict | None = None):
        self.scenario = scenario
        self.seed = seed
        self.slots = scenario.sim.slots if slots is None else slots
        if waypoints is None and scenario.sim.mobility == "waypoints":
            if scenario.sim.waypoint_file:
                waypoints = read_waypoints(scenario.sim.waypoint_file)
            else:
                raise ScenarioError(
                    "sim.waypoint_file: required when mobility is 'waypoints'")
        self.trace = MobilityTrace(scenario, seed, self.slots, waypoints)
        self._diag = diagonal(scenario.network.area_side)

    def _domain(self, endpoint: str) -> str:
        node = self.scenario._nodes.get(endpoint)
        if node is not None:
            return node.domain
        if endpoint in self.scenario._users:
            return "user"
        raise KeyError(f"unknown endpoint {endpoint!r}")

    def location_at(self, endpoint: str, tau: int) -> tuple[float, float]:
        """Position of a node or user at slot ``tau``."""
        node = self.scenario._nodes.get(endpoint)
        if node is not None:
            if node.domain == "cloud":
                if not 0 <= tau <= self.slots:
                    raise ValueError(f"slot {tau} outside [0, {self.slots}]")
                return node.location
            return self.trace.location(endpoint, tau)
        user = self.scenario._users.get(endpoint)
        if user is not None:
            return user.location
        raise KeyError(f"unknown endpoint {endpoint!r}")

    def propagation_delay(self, a: str, b: str, tau: int) -> float:
        """min PD + (max PD - min PD) * distance / area diagonal; 0 for a == b."""
        if a == b:
            return 0.0
        net = self.scenario.network
        dist = math.dist(self.location_at(a, tau), self.location_at(b, tau))
        span = net.propagation_delay_max - net.propagation_delay_min
        return net.propagation_delay_min + span * (dist / self._diag)

    def bandwidth(self, a: str, b: str, tau: int) -> float:
        """Link bandwidth in KB/ms; infinite for co-located endpoints."""
        if a == b:
            return math.inf
        da, db = self._domain(a), self._domain(b)
        if da == "user" and db == "user":
            raise KeyError("user-to-user links are not part of the topology")
        if da == "user":
            return self.scenario.user(a).bandwidth_to(db)
        if db == "user":
            return self.scenario.user(b).bandwidth_to(da)
        return self.scenario.network.pair_bandwidth(da, db)

    def per_unit_transfer_delay(self, a: str, b: str, tau: int,
                                amortized: bool = False) -> float:
        """Transfer delay per KB of traffic (ms/KB); 0 for the same node.

        The default charges transmission only (1/BW).  With ``amortized``
        the per-unit cost is inflated by PD/|T|, folding one propagation
        delay into each slot's worth of traffic.
        """
        if a == b:
            return 0.0
        base = 1.0 / self.bandwidth(a, b, tau)
        if amortized:
            pd = self.propagation_delay(a, b, tau)
            base *= 1.0 + pd / self.scenario.sim.slot_length
        return base
