"""Scenario document builders shared across the test suite.

Tests build scenarios as JSON documents and run them through the real parser
so schema validation is exercised everywhere.  Default numbers are dyadic
(representable exactly in binary floats) so accumulator arithmetic in tests
is exact.
"""

import json

from fogmig import parse_scenario


def vnf_doc(vnf_id, capacity=64.0, mu=1.0, image=2.0, demand=1):
    return {"id": vnf_id, "processing_capacity": capacity,
            "max_utilization": mu, "image_size": image,
            "resource_demand": demand}


def cloud_doc(node_id, location=(50.0, 10.0), capacity=8, delay=8.0, mu=1.0):
    return {"id": node_id, "domain": "cloud", "capacity": capacity,
            "max_utilization": mu, "processing_delay": {"*": delay},
            "location": list(location)}


def fog_doc(node_id, capacity=8, delay=2.0, mu=1.0):
    return {"id": node_id, "domain": "fog", "capacity": capacity,
            "max_utilization": mu, "processing_delay": {"*": delay}}


def user_doc(user_id, location=(50.0, 50.0), cloud_bw=4.0, fog_bw=2.0, mu=1.0):
    return {"id": user_id, "location": list(location),
            "access_bandwidth": {"cloud": cloud_bw, "fog": fog_bw},
            "access_max_utilization": mu}


def chain_structure(vnfs):
    if len(vnfs) == 1:
        return {"kind": "leaf", "vnf": vnfs[0]}
    return {"kind": "seq",
            "children": [{"kind": "leaf", "vnf": v} for v in vnfs]}


def chain_edges(vnfs, traffic=0.25):
    return [{"source": a, "target": b, "traffic": traffic}
            for a, b in zip(vnfs, vnfs[1:])]


def request_doc(request_id, vnfs, edges=None, structure=None, flows=None):
    return {"id": request_id, "vnfs": list(vnfs),
            "edges": edges if edges is not None else [],
            "structure": structure or chain_structure(list(vnfs)),
            "user_flows": flows if flows is not None else []}


def flow_doc(user, vnf, traffic=0.25, connected=1):
    return {"user": user, "vnf": vnf, "connected": connected,
            "traffic": traffic}


def base_doc(catalog, nodes, users, requests, *, name="test",
             bandwidth=None, user_bandwidth=None, pd=(0.25, 0.25),
             area=100.0, slot=1.0, slots=64, seed=1,
             link_mu=1.0, user_link_mu=1.0, user_traffic=0.25,
             mobility="uniform", waypoint_file=None, constants=None):
    return {
        "name": name,
        "catalog": catalog,
        "nodes": nodes,
        "users": users,
        "requests": requests,
        "network": {
            "bandwidth": bandwidth or {"cloud-cloud": 8.0, "cloud-fog": 4.0,
                                       "fog-fog": 2.0},
            "user_bandwidth": user_bandwidth or {"cloud": 4.0, "fog": 2.0},
            "link_max_utilization": link_mu,
            "user_link_max_utilization": user_link_mu,
            "propagation_delay_min": pd[0],
            "propagation_delay_max": pd[1],
            "area_side": area,
        },
        "sim": {
            "slot_length": slot,
            "slots": slots,
            "seed": seed,
            "mobility": mobility,
            "waypoint_file": waypoint_file,
            "user_traffic": user_traffic,
            "constants": constants or {},
        },
    }


def build(doc):
    return parse_scenario(json.dumps(doc))


def minimal_doc(**kwargs):
    """Smallest well formed scenario: one cloud node, one VNF, one leaf request."""
    return base_doc(
        catalog=[vnf_doc("a")],
        nodes=[cloud_doc("cloud-1")],
        users=[],
        requests=[request_doc("r", ["a"])],
        **kwargs,
    )


def two_fog_doc(**kwargs):
    """One cloud plus two fog nodes and a single 3-VNF chain with one user."""
    vnfs = ["a", "b", "c"]
    return base_doc(
        catalog=[vnf_doc(v) for v in vnfs],
        nodes=[cloud_doc("cloud-1"), fog_doc("fog-1"), fog_doc("fog-2")],
        users=[user_doc("u1")],
        requests=[request_doc("r", vnfs, edges=chain_edges(vnfs),
                              flows=[flow_doc("u1", "a"), flow_doc("u1", "c")])],
        **kwargs,
    )
