"""Shared topology fixtures and brute-force oracles for the test suite."""

import itertools

import numpy as np

from wdmprov.netgraph import DcxGraph, Edge


def two_site_four_route_graph():
    """Two user sites joined through a POP mesh that admits exactly one
    2-POP route and three 3-POP routes."""
    edges = [
        Edge("aal-s1", "S1", "P1", 32.0),
        Edge("aal-s2", "S2", "P2", 40.0),
        Edge("cl-12", "P1", "P2", 32.0),
        Edge("cl-13", "P1", "P3", 30.0),
        Edge("cl-32", "P3", "P2", 30.0),
        Edge("cl-14", "P1", "P4", 35.0),
        Edge("cl-42", "P4", "P2", 35.0),
        Edge("cl-15", "P1", "P5", 45.0),
        Edge("cl-52", "P5", "P2", 45.0),
    ]
    return DcxGraph(["S1", "S2"], ["P1", "P2", "P3", "P4", "P5"], edges)


def five_site_mesh_graph():
    """Five sites, six fully meshed POPs; each site homed on its own POP."""
    pops = [f"P{i}" for i in range(1, 7)]
    sites = [f"S{i}" for i in range(1, 6)]
    edges = [Edge(f"aal-{s.lower()}", s, f"P{i + 1}", 20.0 + i)
             for i, s in enumerate(sites)]
    for a, b in itertools.combinations(range(1, 7), 2):
        edges.append(Edge(f"cl-{a}{b}", f"P{a}", f"P{b}", 25.0 + a + b))
    return DcxGraph(sites, pops, edges)


def random_graph(rng: np.random.Generator):
    """Random small topology (<= 8 nodes) with site/POP roles respected."""
    n_sites = int(rng.integers(2, 4))
    n_pops = int(rng.integers(1, 9 - n_sites))
    sites = [f"S{i}" for i in range(n_sites)]
    pops = [f"P{i}" for i in range(n_pops)]
    edges = []
    eid = 0
    for s in sites:
        for p in pops:
            if rng.random() < 0.5:
                edges.append(Edge(f"e{eid}", s, p, float(rng.uniform(5, 80))))
                eid += 1
    for i in range(n_pops):
        for j in range(i + 1, n_pops):
            if rng.random() < 0.5:
                edges.append(Edge(f"e{eid}", pops[i], pops[j],
                                  float(rng.uniform(5, 150))))
                eid += 1
    return DcxGraph(sites, pops, edges), sites


def oracle_routes(graph: DcxGraph, src, dst, max_pops, max_latency_ms):
    """Exhaustively enumerate all simple paths, then filter.

    Independent of the implementation under test: plain adjacency walk
    over the raw edge list with no pruning beyond simple-path-ness.
    """
    adj = {}
    for e in graph.edges:
        adj.setdefault(e.a, []).append(e)
        adj.setdefault(e.b, []).append(e)
    found = []

    def visit(node, nodes, links, length):
        if node == dst and len(nodes) > 1:
            found.append((tuple(nodes), tuple(links), length))
            return
        for e in adj.get(node, []):
            nxt = e.other(node)
            if nxt in nodes:
                continue
            visit(nxt, nodes + [nxt], links + [e.link_id],
                  length + e.length_km)

    visit(src, [src], [], 0.0)
    keep = []
    for nodes, links, length in found:
        inner = nodes[1:-1]
        if any(n in graph.sites for n in inner):
            continue
        if len(inner) > max_pops:
            continue
        if max_latency_ms is not None and \
                length * graph.delay_ms_per_km > max_latency_ms:
            continue
        keep.append((nodes, links, length))
    keep.sort(key=lambda item: (len(item[0]) - 2, item[2], item[0]))
    return keep
