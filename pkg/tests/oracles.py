"""Independent reference implementations used to validate analysis results.

Everything here is deliberately written against networkx or plain Python,
not against the library under test, so agreement is meaningful.
"""

from __future__ import annotations

import itertools
import random

import networkx as nx

from causal_account import CausalGraph, Node, NodeKind, build_graph


def to_networkx(g: CausalGraph) -> nx.DiGraph:
    dg = nx.DiGraph()
    dg.add_nodes_from(g.names)
    dg.add_edges_from(g.edges)
    return dg


def nx_d_separated(g: CausalGraph, xs, ys, zs) -> bool:
    return nx.is_d_separator(to_networkx(g), set(xs), set(ys), set(zs))


def nx_satisfies_backdoor(g: CausalGraph, z, x: str, y: str) -> bool:
    """Back-door check via the mutilated-graph formulation.

    Z satisfies the criterion iff no Z-node descends from x and x is
    d-separated from y by Z in the graph with x's outgoing edges removed.
    The two formulations agree because removing x's out-edges leaves exactly
    the paths that start with an arrow into x, and no admissible Z-node can
    sit below x to re-open a collider through the removed edges.
    """
    zset = set(z)
    dg = to_networkx(g)
    if zset & set(nx.descendants(dg, x)):
        return False
    mutilated = dg.copy()
    mutilated.remove_edges_from(list(dg.out_edges(x)))
    return nx.is_d_separator(mutilated, {x}, {y}, zset)


def brute_minimal_backdoor_sets(g: CausalGraph, x: str, y: str) -> set[frozenset[str]]:
    """All inclusion-minimal observable back-door sets, by exhaustive search."""
    pool = [n for n in g.observable_names() if n not in (x, y)]
    satisfying: list[frozenset[str]] = []
    for size in range(len(pool) + 1):
        for combo in itertools.combinations(pool, size):
            if nx_satisfies_backdoor(g, combo, x, y):
                satisfying.append(frozenset(combo))
    return {
        z
        for z in satisfying
        if not any(other < z for other in satisfying)
    }


def random_dag(
    rng: random.Random,
    n_nodes: int,
    edge_probability: float = 0.3,
    latent_probability: float = 0.0,
) -> CausalGraph:
    """A random DAG over n1..nN with edges respecting the index order.

    Latent nodes are only ever sources (they take no incoming edges), so a
    node is eligible to be latent when the coin says so and no earlier node
    points at it.
    """
    names = [f"n{i + 1}" for i in range(n_nodes)]
    edges = [
        (names[i], names[j])
        for i in range(n_nodes)
        for j in range(i + 1, n_nodes)
        if rng.random() < edge_probability
    ]
    has_parent = {b for _, b in edges}
    nodes = []
    for name in names:
        if name in has_parent:
            kind = NodeKind.ENDOGENOUS
        elif rng.random() < latent_probability:
            kind = NodeKind.LATENT
        else:
            kind = rng.choice((NodeKind.EXOGENOUS, NodeKind.ENDOGENOUS))
        nodes.append(Node(name, kind))
    return build_graph(nodes, edges)


def all_dags(n_nodes: int):
    """Every DAG over n1..nN whose edges respect the index order."""
    names = [f"n{i + 1}" for i in range(n_nodes)]
    possible = [
        (names[i], names[j])
        for i in range(n_nodes)
        for j in range(i + 1, n_nodes)
    ]
    for mask in range(2 ** len(possible)):
        edges = [e for i, e in enumerate(possible) if mask >> i & 1]
        has_parent = {b for _, b in edges}
        nodes = [
            Node(
                name,
                NodeKind.ENDOGENOUS if name in has_parent else NodeKind.EXOGENOUS,
            )
            for name in names
        ]
        yield build_graph(nodes, edges)
