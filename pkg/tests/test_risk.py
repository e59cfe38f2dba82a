"""Risk determination and critical path extraction."""

import random

import pytest

from riskgraph import (
    Edge,
    Node,
    RiskGraph,
    UnknownConsequenceError,
    critical_path,
    evaluate_graph,
)
from oracles import (
    all_selection_subgraphs,
    critical_path_by_enumeration,
    effective_ratings,
    naive_critical_nodes,
    naive_or_choice,
    random_din_graph,
)


def attack(node_id, ratings=None, connector=None):
    return Node(id=node_id, label=node_id, kind="attack",
                ratings=ratings, connector=connector)


def refine(src, dst):
    return Edge(id=f"{src}->{dst}", source=src, target=dst, kind="refinement")


def consequence_edge(cons, target, impact):
    return Edge(id=f"{cons}->{target}", source=cons, target=target,
                kind="consequence", attributes={"Impact": impact})


def make(nodes, edges):
    return RiskGraph(nodes={n.id: n for n in nodes},
                     edges={e.id: e for e in edges},
                     profile_name="din-vde-0831-104")


class TestDetermineRisk:
    def test_din_worked_outcomes(self, weiss_din, din):
        ev = evaluate_graph(weiss_din, din)
        assert ev.consequences["data-leakage"].risk_label == "Significant"
        assert ev.consequences["denial-of-rightful-access"].risk_label == "Moderate"

    def test_iso_outcomes(self, weiss_iso, iso):
        ev = evaluate_graph(weiss_iso, iso)
        assert ev.consequences["data-leakage"].risk == 4
        assert ev.consequences["denial-of-rightful-access"].risk == 3

    def test_clc_outcomes(self, weiss_clc, clc):
        ev = evaluate_graph(weiss_clc, clc)
        assert ev.consequences["data-leakage"].risk_label == "High"
        assert ev.consequences["denial-of-rightful-access"].risk_label == "Significant"

    def test_multi_edge_consequence_takes_the_maximum(self, din):
        nodes = [
            attack("hard", ratings={"Resources": 5, "Knowledge": 5, "Location": 1}),
            attack("easy", ratings={"Resources": 1, "Knowledge": 1, "Location": 0}),
            Node(id="loss", label="loss", kind="consequence"),
        ]
        edges = [consequence_edge("loss", "hard", 5),
                 consequence_edge("loss", "easy", 3)]
        ev = evaluate_graph(make(nodes, edges), din)
        assert ev.consequences["loss"].edges["loss->hard"].risk_label == "Low"
        assert ev.consequences["loss"].edges["loss->easy"].risk_label == "Significant"
        assert ev.consequences["loss"].risk_label == "Significant"
        assert any("maximum over 2" in d for d in ev.diagnostics)


class TestCriticalPath:
    def test_chain_is_the_whole_chain(self, din):
        nodes = [attack("root"), attack("mid"),
                 attack("leaf", ratings={"Resources": 2, "Knowledge": 2,
                                         "Location": 0}),
                 Node(id="loss", label="loss", kind="consequence")]
        edges = [refine("root", "mid"), refine("mid", "leaf"),
                 consequence_edge("loss", "root", 3)]
        ev = evaluate_graph(make(nodes, edges), din)
        path = ev.critical_paths["loss"]
        assert path.kind == "path"
        assert path.nodes == ["root", "mid", "leaf"]

    def test_or_follows_the_higher_feasibility_child(self, din):
        nodes = [attack("root"),
                 attack("a", ratings={"Resources": 1, "Knowledge": 2,
                                      "Location": 0}),   # feasibility 5
                 attack("b", ratings={"Resources": 1, "Knowledge": 4,
                                      "Location": 0}),   # feasibility 3
                 Node(id="loss", label="loss", kind="consequence")]
        edges = [refine("root", "a"), refine("root", "b"),
                 consequence_edge("loss", "root", 3)]
        ev = evaluate_graph(make(nodes, edges), din)
        assert ev.critical_paths["loss"].nodes == ["root", "a"]

    def test_weiss_path_goes_through_the_shoulder_surfer(self, weiss_din, din):
        ev = evaluate_graph(weiss_din, din)
        path = ev.critical_paths["data-leakage"]
        assert path.nodes == ["obtain-admin-privileges", "obtain-admin-password",
                              "look-over-shoulder"]
        assert path.kind == "path"

    def test_and_yields_a_tree(self, din):
        nodes = [attack("root", connector="AND"),
                 attack("a", ratings={"Resources": 1, "Knowledge": 1, "Location": 0}),
                 attack("b", ratings={"Resources": 2, "Knowledge": 2, "Location": 1}),
                 Node(id="loss", label="loss", kind="consequence")]
        edges = [refine("root", "a"), refine("root", "b"),
                 consequence_edge("loss", "root", 4)]
        ev = evaluate_graph(make(nodes, edges), din)
        path = ev.critical_paths["loss"]
        assert path.kind == "tree"
        assert path.nodes == ["root", "a", "b"]

    def test_multi_edge_start_is_the_highest_risk_topmost(self, din):
        nodes = [
            attack("hard", ratings={"Resources": 5, "Knowledge": 5, "Location": 1}),
            attack("easy", ratings={"Resources": 1, "Knowledge": 1, "Location": 0}),
            Node(id="loss", label="loss", kind="consequence"),
        ]
        edges = [consequence_edge("loss", "hard", 5),
                 consequence_edge("loss", "easy", 3)]
        ev = evaluate_graph(make(nodes, edges), din)
        assert ev.critical_paths["loss"].nodes == ["easy"]

    def test_unknown_consequence(self, weiss_din, din):
        ev = evaluate_graph(weiss_din, din)
        with pytest.raises(UnknownConsequenceError):
            critical_path(ev, weiss_din, "no-such-consequence")

    def test_invariant_start_topmost_end_basic(self, din):
        rng = random.Random(19)
        for _ in range(100):
            graph = random_din_graph(rng)
            ev = evaluate_graph(graph, din)
            path = ev.critical_paths["cons"]
            assert path.nodes[0] == "n00"
            assert not graph.attack_children(path.nodes[-1])

    def test_matches_recursive_oracle(self, din):
        rng = random.Random(29)
        for _ in range(150):
            graph = random_din_graph(rng)
            ratings = effective_ratings(graph)
            ev = evaluate_graph(graph, din)
            assert ev.critical_paths["cons"].nodes == naive_critical_nodes(
                graph, "n00", ratings)

    def test_matches_path_enumeration_on_disjunctive_graphs(self, din):
        rng = random.Random(31)
        checked = 0
        while checked < 60:
            graph = random_din_graph(rng)
            if any(n.connector == "AND" for n in graph.nodes.values()):
                continue
            checked += 1
            ratings = effective_ratings(graph)
            ev = evaluate_graph(graph, din)
            expected = critical_path_by_enumeration(graph, "n00", ratings)
            assert ev.critical_paths["cons"].nodes == expected
            assert ev.critical_paths["cons"].kind == "path"

    def test_matches_selection_enumeration_with_conjunctions(self, din):
        rng = random.Random(37)
        for _ in range(60):
            graph = random_din_graph(rng)
            ratings = effective_ratings(graph)
            ev = evaluate_graph(graph, din)
            consistent_sets = []
            for selection, included in all_selection_subgraphs(graph, "n00"):
                if all(selection[n] == naive_or_choice(graph, n, ratings)
                       for n in selection if n in included):
                    consistent_sets.append(included)
            assert consistent_sets
            for included in consistent_sets:
                assert included == set(ev.critical_paths["cons"].nodes)
