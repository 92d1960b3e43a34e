"""Independent oracles the tests check the engine against.

Deliberately naive implementations with no code shared with the package:
reachability by Floyd-Warshall over a boolean matrix, topological orders by
filtering permutations, inheritance by exhaustive ancestor x attribute
enumeration.
"""

from __future__ import annotations

from itertools import permutations


def floyd_warshall_pairs(nodes: list, edges: set[tuple]) -> set[tuple]:
    """All (a, b) with a path a -> ... -> b of length >= 1."""
    index = {node: k for k, node in enumerate(nodes)}
    n = len(nodes)
    reach = [[False] * n for _ in range(n)]
    for a, b in edges:
        reach[index[a]][index[b]] = True
    for k in range(n):
        for i in range(n):
            if reach[i][k]:
                row_i, row_k = reach[i], reach[k]
                for j in range(n):
                    if row_k[j]:
                        row_i[j] = True
    return {
        (nodes[i], nodes[j])
        for i in range(n)
        for j in range(n)
        if reach[i][j]
    }


def reachable_from(start, nodes: list, edges: set[tuple]) -> set:
    return {b for (a, b) in floyd_warshall_pairs(nodes, edges) if a == start}


def all_topological_orders(nodes: list, deps: dict) -> list[tuple]:
    """Every ordering of ``nodes`` where each node appears after all of its
    ``deps``.  Exponential; for small graphs only."""
    orders = []
    for candidate in permutations(nodes):
        position = {node: k for k, node in enumerate(candidate)}
        if all(position[d] < position[n] for n in nodes for d in deps.get(n, ()) if d in position):
            orders.append(candidate)
    return orders


def brute_force_inherited(concept, isa_edges: set[tuple], attr_facts: set[tuple]) -> set[tuple]:
    """(attribute, source) pairs: direct attributes plus each ancestor's,
    with ancestors computed by the Floyd-Warshall oracle."""
    nodes = sorted({a for a, _ in isa_edges} | {b for _, b in isa_edges} | {concept}
                   | {owner for owner, _ in attr_facts})
    ancestors = reachable_from(concept, nodes, isa_edges)
    out = set()
    for owner, attr in attr_facts:
        if owner == concept or owner in ancestors:
            out.add((attr, owner))
    return out
