"""Report formats and a user-authored profile with a custom connector.

Run from the repository root:  python3 demos/04_reports_and_custom_profiles.py
"""

from pathlib import Path

from riskgraph import (
    emit_report,
    evaluate_graph,
    load_builtin,
    load_profile,
    parse_graph,
)

FIXTURE = Path(__file__).parent.parent / "tests" / "fixtures" / "weiss-din.rag"

profile = load_builtin("din-vde-0831-104")
graph = parse_graph(FIXTURE.read_text())
evaluation = evaluate_graph(graph, profile)

# DOT export: consequence nodes colored by risk, basic nodes green with
# their ratings (countermeasure-adjusted values next to the struck-out
# originals), countermeasures light blue, critical path edges in red.
dot = emit_report(evaluation, graph, profile, "dot")
out = Path(__file__).parent / "weiss-din.dot"
out.write_text(dot)
print(f"wrote {out} ({len(dot.splitlines())} lines); render with:")
print(f"  dot -Tsvg {out} -o weiss-din.svg")
print()

# The JSON report is the full evaluation, byte-identical to what the HTTP
# service returns for the same inputs.
print("JSON report starts with:")
print("\n".join(emit_report(evaluation, graph, profile, "json").splitlines()[:6]))
print()

# Profiles are data.  Start from the built-in document, register a
# two-of-n connector (attacker needs any two children; experimental), and
# rewire one refinement to use it.  Graphs are immutable after parse, so
# the rewiring edits the document and parses a fresh graph.
doc = load_builtin("din-vde-0831-104").to_document()
doc["name"] = "din-two-of-n"
doc["connectors"]["TWO-OF-N"] = {"mode": "k-of-n", "k": 2, "fn": "capped-sum"}
custom = load_profile(doc)

import json

graph_doc = json.loads(FIXTURE.read_text())
graph_doc["profile"] = "din-two-of-n"
for node in graph_doc["nodes"]:
    if node["id"] == "obtain-admin-password":
        node["connector"] = "TWO-OF-N"
rewired = parse_graph(json.dumps(graph_doc))
evaluation = evaluate_graph(rewired, custom)
password = evaluation.nodes["obtain-admin-password"]
print("Obtain Admin Password under TWO-OF-N combines", password.selected_children)
print("  attributes:", password.attributes, "-> feasibility", password.feasibility)
print("  (the two easiest children are required together, so their costs add)")
