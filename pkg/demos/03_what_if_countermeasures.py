"""What-if exploration: switch countermeasures off, edit ratings and
impacts, and watch feasibility, risk, and the critical path move.

Run from the repository root:  python3 demos/03_what_if_countermeasures.py
"""

from pathlib import Path

from riskgraph import Overlay, load_builtin, parse_graph, what_if

FIXTURE = Path(__file__).parent.parent / "tests" / "fixtures" / "weiss-din.rag"

profile = load_builtin("din-vde-0831-104")
graph = parse_graph(FIXTURE.read_text())


def show(title, result):
    print(title)
    for cons_id, entry in sorted(result.delta["consequences"].items()):
        print(f"  {cons_id}: {entry['risk_label_before']} -> "
              f"{entry['risk_label_after']}")
    for node_id, entry in sorted(result.delta["nodes"].items()):
        print(f"  {node_id}: feasibility {entry['feasibility_before']} -> "
              f"{entry['feasibility_after']}")
    for cons_id, path in sorted(result.evaluation.critical_paths.items()):
        print(f"  critical path ({cons_id}): " + " -> ".join(path.nodes))
    print()


# Baseline: every countermeasure enabled, nothing overridden.
show("Baseline (identity delta):", what_if(graph, profile, Overlay()))

# Drop the physical access restriction: breaking into the computer center
# goes back to its raw R1 K1 rating and the whole console branch jumps to
# feasibility 4, tying the password branch; the critical path for the
# denial consequence shifts across.
show("Physical access restriction disabled:",
     what_if(graph, profile,
             Overlay(disabled=frozenset({"physical-access-restriction"}))))

# Shoulder surfing made hard: rate its Knowledge at the maximum.  The
# disjunction re-selects Corrupt Sys. Admin and the risk stays put, which
# is the point: single hardenings rarely move the top-level risk when a
# parallel path is just as easy.
show("Shoulder surfing needs extraordinary knowledge:",
     what_if(graph, profile,
             Overlay(rating_overrides={"look-over-shoulder": {"Knowledge": 5}})))

# Impact mitigation attaches to the consequence edge, not to a node: halve
# the data leakage impact and the risk drops from Significant to Moderate.
show("Data leakage impact reduced to Minor:",
     what_if(graph, profile,
             Overlay(rating_overrides={
                 "data-leakage->obtain-admin-privileges": {"Impact": 2}})))
