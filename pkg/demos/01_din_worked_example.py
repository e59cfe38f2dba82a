"""Walk through the DIN VDE V 0831-104 evaluation of the classic
"obtain administrator privileges" scenario, step by step.

Run from the repository root:  python3 demos/01_din_worked_example.py
"""

from pathlib import Path

from riskgraph import (
    compute_feasibility,
    emit_report,
    evaluate_graph,
    load_builtin,
    matrix_lookup,
    parse_graph,
)

FIXTURE = Path(__file__).parent.parent / "tests" / "fixtures" / "weiss-din.rag"

profile = load_builtin("din-vde-0831-104")
graph = parse_graph(FIXTURE.read_text())

# A basic attack node is rated on Resources, Knowledge, and Location.
# Feasibility is a two-stage pipeline: the preliminary value comes from a
# Resources x Knowledge matrix, then Location is subtracted.
paf_matrix = profile.pipeline.stages[0].matrix
print("Preliminary feasibility for Low resources, Low knowledge:",
      matrix_lookup(paf_matrix, {"Resources": 2, "Knowledge": 2}))
print("Feasibility once Local access is factored in:",
      compute_feasibility({"Resources": 2, "Knowledge": 2, "Location": 1},
                          profile.pipeline))
print()

# Full propagation: children first, then parents.  Conjunctions sum the
# children's values (capped at the attribute maximum); disjunctions adopt
# the child with the highest feasibility, resources breaking ties.
evaluation = evaluate_graph(graph, profile)

print("Per-node feasibility after propagation:")
for node_id, result in sorted(evaluation.nodes.items()):
    marker = f" (adopted {result.selected_children[0]})" \
        if result.selected_children and result.connector == "OR" else ""
    print(f"  {graph.nodes[node_id].label:42s} {result.feasibility}{marker}")
print()

# "Guess Password" is the conjunction from the worked example: the
# password file (R1 K3 L0) plus a guessable password (R1 K2 L0) yields
# R2 K5 L0, and the Knowledge sum hits the cap.
guess = evaluation.nodes["guess-password"]
print("Guess Password combines its children into", guess.attributes)

# The two consequences get their risks from the impact x feasibility
# matrix: moderate impact at feasibility 4 reads Significant, minor
# impact reads Moderate.
print()
print(emit_report(evaluation, graph, profile, "text-table"))
