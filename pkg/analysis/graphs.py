"""
Strong connectivity of GIFS graphs and closed walks through every vertex.
"""

from typing import Iterable, List, Optional, Sequence, Tuple, Union

import networkx as nx

from models import ConnectivityResult, GIFSSpec


def build_graph(
    vertices: Iterable[int], edges: Iterable[Tuple[int, int]]
) -> nx.DiGraph:
    graph = nx.DiGraph()
    graph.add_nodes_from(vertices)
    graph.add_edges_from(edges)
    return graph


def gifs_graph(spec: GIFSSpec) -> nx.DiGraph:
    return build_graph(spec.vertex_sets, ((e.src, e.dst) for e in spec.edges))


def covering_walk(graph: nx.DiGraph) -> Optional[List[int]]:
    """
    Closed walk visiting every vertex, built by chaining shortest paths to
    the next unvisited vertex and back to the start. None if impossible.
    """
    order = sorted(graph.nodes)
    if not order:
        return None
    start = order[0]
    walk = [start]
    visited = {start}
    try:
        for target in order:
            if target in visited:
                continue
            path = nx.shortest_path(graph, walk[-1], target)
            walk.extend(path[1:])
            visited.update(path)
        if len(walk) > 1 or graph.has_edge(start, start):
            closing = nx.shortest_path(graph, walk[-1], start)
            if len(closing) == 1:
                closing = [start, start]
            walk.extend(closing[1:])
    except nx.NetworkXNoPath:
        return None
    return walk


def strongly_connected(
    vertices: Iterable[int], edges: Iterable[Tuple[int, int]]
) -> ConnectivityResult:
    graph = build_graph(vertices, edges)
    if graph.number_of_nodes() == 0 or not nx.is_strongly_connected(graph):
        return ConnectivityResult(strongly_connected=False, witness=None)
    return ConnectivityResult(strongly_connected=True, witness=covering_walk(graph))


def gifs_strongly_connected(spec: GIFSSpec) -> ConnectivityResult:
    """Reachability in both directions for every pair, plus a witness walk."""
    edges = ((e.src, e.dst) for e in spec.edges)
    return strongly_connected(spec.vertex_sets, edges)


def walk_is_valid(graph: Union[nx.DiGraph, GIFSSpec], walk: Sequence[int]) -> bool:
    """Every consecutive pair of the walk is an edge of the graph."""
    if isinstance(graph, GIFSSpec):
        graph = gifs_graph(graph)
    return all(graph.has_edge(u, v) for u, v in zip(walk, walk[1:]))


def walk_is_covering(graph: nx.DiGraph, walk: Sequence[int]) -> bool:
    return (
        len(walk) > 0
        and walk[0] == walk[-1]
        and walk_is_valid(graph, walk)
        and set(walk) == set(graph.nodes)
    )
