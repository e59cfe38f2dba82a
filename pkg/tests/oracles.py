"""Independent brute-force oracles for the propagation engine.

Everything here is deliberately written from scratch against the printed
tables and rules: plain recursion without memoization, a frozen copy of
the preliminary-feasibility matrix, and literal enumeration for path
checks.  None of it calls the engine's aggregation or pipeline code.
"""

from __future__ import annotations

import itertools
import random

from riskgraph.graph import Edge, Node, RiskGraph

# Frozen copy of the printed preliminary feasibility table, row = Resources,
# column = Knowledge.
PAF_TABLE = {
    1: {1: 5, 2: 5, 3: 4, 4: 3, 5: 2},
    2: {1: 5, 2: 4, 3: 4, 4: 3, 5: 2},
    3: {1: 5, 2: 4, 3: 4, 4: 3, 5: 2},
    4: {1: 4, 2: 3, 3: 3, 4: 2, 5: 1},
    5: {1: 3, 2: 2, 3: 2, 4: 1, 5: 1},
}

CAPS = {"Resources": 5, "Knowledge": 5, "Location": 1}

RISK_TABLE = {
    1: ["Low", "Low", "Low", "Low", "Low"],
    2: ["Low", "Low", "Moderate", "Moderate", "Moderate"],
    3: ["Low", "Moderate", "Moderate", "Significant", "Significant"],
    4: ["Low", "Moderate", "Significant", "Very High", "Very High"],
    5: ["Low", "Moderate", "Significant", "Very High", "Very High"],
}

RISK_RANKS = {"Low": 1, "Moderate": 2, "Significant": 3, "Very High": 4}


def naive_af(attrs: dict[str, int]) -> int:
    paf = PAF_TABLE[attrs["Resources"]][attrs["Knowledge"]]
    return max(1, min(5, paf - attrs["Location"]))


def naive_attrs(graph: RiskGraph, node_id: str,
                ratings: dict[str, dict[str, int]]) -> dict[str, int]:
    """Recursive attribute evaluation, no memoization."""
    children = graph.attack_children(node_id)
    if not children:
        return dict(ratings[node_id])
    if len(children) == 1:
        return naive_attrs(graph, children[0], ratings)
    if graph.nodes[node_id].connector == "AND":
        maps = [naive_attrs(graph, child, ratings) for child in children]
        return {
            name: min(sum(m[name] for m in maps), CAPS[name])
            for name in ("Resources", "Knowledge", "Location")
        }
    return naive_attrs(graph, naive_or_choice(graph, node_id, ratings), ratings)


def naive_or_choice(graph: RiskGraph, node_id: str,
                    ratings: dict[str, dict[str, int]]) -> str:
    """Disjunctive selection: worst feasibility, then lowest Resources,
    then lowest Knowledge, then lowest id."""
    children = graph.attack_children(node_id)
    scored = {c: naive_attrs(graph, c, ratings) for c in children}
    afs = {c: naive_af(scored[c]) for c in children}
    worst = max(afs.values())
    candidates = [c for c in children if afs[c] == worst]
    if len(candidates) > 1:
        lowest = min(scored[c]["Resources"] for c in candidates)
        candidates = [c for c in candidates if scored[c]["Resources"] == lowest]
    if len(candidates) > 1:
        lowest = min(scored[c]["Knowledge"] for c in candidates)
        candidates = [c for c in candidates if scored[c]["Knowledge"] == lowest]
    return min(candidates)


def naive_risk(impact: int, af: int) -> int:
    return RISK_RANKS[RISK_TABLE[impact][af - 1]]


def naive_critical_nodes(graph: RiskGraph, topmost: str,
                         ratings: dict[str, dict[str, int]]) -> list[str]:
    """Included sub-DAG flattened parents-first, smallest id first."""
    included: set[str] = set()

    def descend(node_id: str) -> None:
        if node_id in included:
            return
        included.add(node_id)
        children = graph.attack_children(node_id)
        if not children:
            return
        if len(children) == 1:
            descend(children[0])
        elif graph.nodes[node_id].connector == "AND":
            for child in children:
                descend(child)
        else:
            descend(naive_or_choice(graph, node_id, ratings))

    descend(topmost)

    def kept_children(node_id: str) -> list[str]:
        children = graph.attack_children(node_id)
        if len(children) >= 2 and graph.nodes[node_id].connector != "AND":
            return [naive_or_choice(graph, node_id, ratings)]
        return [c for c in children if c in included]

    order: list[str] = []
    remaining = set(included)
    while remaining:
        blocked = {c for n in remaining for c in kept_children(n)}
        ready = sorted(remaining - blocked)
        order.append(ready[0])
        remaining.discard(ready[0])
    return order


def enumerate_paths(graph: RiskGraph, topmost: str) -> list[list[str]]:
    """Every refinement walk from the topmost node down to a basic node."""
    paths = []

    def walk(node_id: str, prefix: list[str]) -> None:
        prefix = prefix + [node_id]
        children = graph.attack_children(node_id)
        if not children:
            paths.append(prefix)
        for child in children:
            walk(child, prefix)

    walk(topmost, [])
    return paths


def critical_path_by_enumeration(graph: RiskGraph, topmost: str,
                                 ratings: dict[str, dict[str, int]]) -> list[str]:
    """For graphs without conjunctions: filter all paths by the local rules."""
    survivors = []
    for path in enumerate_paths(graph, topmost):
        consistent = True
        for parent, child in zip(path, path[1:]):
            children = graph.attack_children(parent)
            if len(children) >= 2 and naive_or_choice(graph, parent, ratings) != child:
                consistent = False
                break
        if consistent:
            survivors.append(path)
    assert len(survivors) == 1, f"expected a unique critical path, got {survivors}"
    return survivors[0]


def all_selection_subgraphs(graph: RiskGraph, topmost: str):
    """Every sub-DAG induced by picking one child at each disjunctive node."""
    or_nodes = [
        n for n in graph.node_ids("attack")
        if len(graph.attack_children(n)) >= 2 and graph.nodes[n].connector != "AND"
    ]
    choice_lists = [graph.attack_children(n) for n in or_nodes]
    for combo in itertools.product(*choice_lists):
        selection = dict(zip(or_nodes, combo))
        included: set[str] = set()
        stack = [topmost]
        while stack:
            node_id = stack.pop()
            if node_id in included:
                continue
            included.add(node_id)
            children = graph.attack_children(node_id)
            if not children:
                continue
            if node_id in selection:
                stack.append(selection[node_id])
            else:
                stack.extend(children)
        yield selection, included


# ---------------------------------------------------------------------------
# Random graph generation
# ---------------------------------------------------------------------------


def random_din_graph(rng: random.Random, max_attack: int = 8,
                     with_countermeasures: bool = False) -> RiskGraph:
    """A random connected refinement DAG with one consequence on its root."""
    count = rng.randint(1, max_attack)
    ids = [f"n{i:02d}" for i in range(count)]
    nodes = {i: Node(id=i, label=i, kind="attack") for i in ids}
    edges: dict[str, Edge] = {}

    def connect(parent: str, child: str) -> None:
        edge_id = f"e-{parent}-{child}"
        if edge_id not in edges:
            edges[edge_id] = Edge(id=edge_id, source=parent, target=child,
                                  kind="refinement")

    for j in range(1, count):
        connect(ids[rng.randrange(j)], ids[j])
    for i in range(count):
        for j in range(i + 1, count):
            if rng.random() < 0.15:
                connect(ids[i], ids[j])

    graph = RiskGraph(nodes=nodes, edges=edges, profile_name="din-vde-0831-104")
    for node_id in ids:
        children = graph.attack_children(node_id)
        if not children:
            nodes[node_id].ratings = {
                "Resources": rng.randint(1, 5),
                "Knowledge": rng.randint(1, 5),
                "Location": rng.randint(0, 1),
            }
        elif len(children) >= 2:
            nodes[node_id].connector = rng.choice(["AND", "OR", None])

    nodes["cons"] = Node(id="cons", label="Consequence", kind="consequence")
    edges["e-cons"] = Edge(id="e-cons", source="cons", target=ids[0],
                           kind="consequence",
                           attributes={"Impact": rng.randint(1, 5)})

    if with_countermeasures:
        for node_id in list(ids):
            if graph.attack_children(node_id) or rng.random() > 0.4:
                continue
            cm_id = f"cm-{node_id}"
            deltas = {}
            for name in ("Resources", "Knowledge"):
                deltas[name] = rng.randint(0, 2)
            if not any(deltas.values()):
                deltas["Knowledge"] = 1
            nodes[cm_id] = Node(id=cm_id, label=cm_id, kind="countermeasure",
                                ratings=deltas)
            edge_id = f"e-{node_id}-{cm_id}"
            edges[edge_id] = Edge(id=edge_id, source=node_id, target=cm_id,
                                  kind="countermeasure")
    return graph


def effective_ratings(graph: RiskGraph,
                      disabled: frozenset = frozenset()) -> dict[str, dict[str, int]]:
    """Basic-node ratings with enabled countermeasure deltas folded in."""
    ratings = {
        n.id: dict(n.ratings)
        for n in graph.nodes.values()
        if n.kind == "attack" and not graph.attack_children(n.id)
    }
    for edge in sorted(graph.edges.values(), key=lambda e: (e.source, e.target)):
        if edge.kind != "countermeasure" or edge.target in disabled:
            continue
        if edge.source not in ratings:
            continue
        deltas = graph.nodes[edge.target].ratings or {}
        for name, delta in deltas.items():
            ratings[edge.source][name] = min(
                ratings[edge.source][name] + delta, CAPS[name])
    return ratings
