"""The same attack scenario rated under ISO/SAE 21434 and CLC/TS 50701.

Each standard is a profile document: its own attribute schemas, its own
feasibility pipeline, its own risk matrix.  The propagation engine is
shared.

Run from the repository root:  python3 demos/02_standards_profiles.py
"""

from pathlib import Path

from riskgraph import (
    clc_likelihood,
    evaluate_graph,
    iso_attack_potential,
    load_builtin,
    parse_graph,
    risk_lookup,
)

FIXTURES = Path(__file__).parent.parent / "tests" / "fixtures"

# --- ISO/SAE 21434: attack potential ------------------------------------
iso = load_builtin("iso-sae-21434")

# Five parameters, each an enumerate with a numeric value; the sum maps
# onto a feasibility class through the 0-13 / 14-19 / 20-24 / >=25 bands.
total, rank = iso_attack_potential({
    "ElapsedTime": "<1 month",
    "SpecialistExpertise": "Expert",
    "ItemKnowledge": "Confidential",
    "WindowOfOpportunity": "Easy",
    "Equipment": "Specialized",
}, iso)
print("ISO attack potential", total, "maps to",
      iso.feasibility_schema.label_of(rank))

evaluation = evaluate_graph(parse_graph((FIXTURES / "weiss-iso.rag").read_text()), iso)
top = evaluation.nodes["obtain-admin-privileges"]
print("Topmost feasibility:", top.feasibility_label)
print("Conjunctive subtree total:",
      sum(evaluation.nodes["guess-password"].attributes.values()),
      "->", evaluation.nodes["guess-password"].feasibility_label)
for cons_id, cons in sorted(evaluation.consequences.items()):
    print(f"  risk of {cons_id}: {cons.risk_label}")
print()

# --- CLC/TS 50701: likelihood --------------------------------------------
clc = load_builtin("clc-ts-50701")

# Likelihood is exposure plus vulnerability minus one, so two 1..3 scales
# yield a 1..5 likelihood.
print("CLC likelihood of EXP=2, VUL=3:", clc_likelihood(2, 3))
print("Impact A at likelihood 4 reads", risk_lookup(clc, "A", 4).label)

evaluation = evaluate_graph(parse_graph((FIXTURES / "weiss-clc.rag").read_text()), clc)
print("Topmost likelihood:",
      evaluation.nodes["obtain-admin-privileges"].feasibility)
for cons_id, cons in sorted(evaluation.consequences.items()):
    print(f"  risk of {cons_id}: {cons.risk_label}")
