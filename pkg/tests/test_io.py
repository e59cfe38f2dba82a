"""Graph document parsing, serialization, and report emission."""

import json
import random
from pathlib import Path

import pytest

from riskgraph import (
    Overlay,
    ParseError,
    VersionError,
    emit_report,
    evaluate_graph,
    parse_graph,
    serialize_graph,
)
from riskgraph.risk import Evaluation

FIXTURES = Path(__file__).parent / "fixtures"

MINIMAL = """
{
  "format_version": "1",
  "profile": "din-vde-0831-104",
  "nodes": [
    {"id": "loss", "label": "Loss", "kind": "consequence"},
    {"id": "goal", "label": "Goal", "kind": "attack",
     "ratings": {"Resources": 2, "Knowledge": 2, "Location": 1}}
  ],
  "edges": [
    {"id": "loss->goal", "source": "loss", "target": "goal",
     "kind": "consequence", "attributes": {"Impact": 3}}
  ]
}
"""


class TestParse:
    def test_minimal_document(self):
        graph = parse_graph(MINIMAL)
        assert len(graph.nodes) == 2
        assert graph.profile_name == "din-vde-0831-104"
        assert graph.nodes["goal"].ratings == {
            "Resources": 2, "Knowledge": 2, "Location": 1}

    def test_truncated_document_reports_position(self):
        with pytest.raises(ParseError) as err:
            parse_graph(MINIMAL[:80])
        assert err.value.line is not None

    def test_version_error(self):
        doc = json.loads(MINIMAL)
        doc["format_version"] = "2"
        with pytest.raises(VersionError):
            parse_graph(json.dumps(doc))

    def test_bom_rejected(self):
        with pytest.raises(ParseError):
            parse_graph("﻿" + MINIMAL)

    def test_non_utf8_bytes_rejected(self):
        with pytest.raises(ParseError):
            parse_graph(b"\xff\xfe{}")

    def test_duplicate_node_id(self):
        doc = json.loads(MINIMAL)
        doc["nodes"].append(dict(doc["nodes"][0]))
        with pytest.raises(ParseError) as err:
            parse_graph(json.dumps(doc))
        assert "duplicate" in str(err.value)

    def test_bad_rank_type(self):
        doc = json.loads(MINIMAL)
        doc["nodes"][1]["ratings"]["Resources"] = "Low"
        with pytest.raises(ParseError) as err:
            parse_graph(json.dumps(doc))
        assert "ranks are integers" in str(err.value)

    def test_strict_mode_rejects_unknown_fields(self):
        doc = json.loads(MINIMAL)
        doc["nodes"][0]["color"] = "red"
        text = json.dumps(doc)
        parse_graph(text)  # lenient: preserved
        with pytest.raises(ParseError):
            parse_graph(text, strict=True)

    def test_lenient_mode_preserves_unknown_fields(self):
        doc = json.loads(MINIMAL)
        doc["nodes"][0]["color"] = "red"
        doc["custom_top"] = {"a": 1}
        graph = parse_graph(json.dumps(doc))
        assert graph.nodes["loss"].extra == {"color": "red"}
        assert graph.extra == {"custom_top": {"a": 1}}
        round_tripped = parse_graph(serialize_graph(graph))
        assert round_tripped == graph

    def test_display_hints_are_opaque(self):
        doc = json.loads(MINIMAL)
        doc["nodes"][0]["display"] = {"x": 12, "y": -3, "color": "#fff"}
        graph = parse_graph(json.dumps(doc))
        assert graph.nodes["loss"].display == {"x": 12, "y": -3, "color": "#fff"}

    def test_inline_profile(self, din):
        doc = json.loads(MINIMAL)
        doc["profile"] = din.to_document()
        graph = parse_graph(json.dumps(doc))
        assert graph.profile_name == "din-vde-0831-104"
        assert graph.inline_profile is not None

    @pytest.mark.parametrize("fixture", ["weiss-din", "weiss-iso", "weiss-clc"])
    def test_fixture_round_trip(self, fixture):
        graph = parse_graph((FIXTURES / f"{fixture}.rag").read_text())
        assert parse_graph(serialize_graph(graph)) == graph

    def test_serialization_is_byte_deterministic(self, weiss_din):
        assert serialize_graph(weiss_din) == serialize_graph(weiss_din)

    def test_fuzz_smoke(self):
        rng = random.Random(97)
        for _ in range(500):
            blob = bytes(rng.randrange(256) for _ in range(rng.randrange(0, 64)))
            with pytest.raises(ParseError):
                parse_graph(blob)


class TestFixtureSchema:
    def test_fixtures_satisfy_the_shipped_json_schema(self):
        jsonschema = pytest.importorskip("jsonschema")
        schema = json.loads(
            (Path(__file__).parent.parent / "docs" / "rag.schema.json").read_text())
        for fixture in FIXTURES.glob("*.rag"):
            jsonschema.validate(json.loads(fixture.read_text()), schema)


class TestEmitReport:
    def test_text_table_rows(self, weiss_din, din):
        ev = evaluate_graph(weiss_din, din)
        report = emit_report(ev, weiss_din, din, "text-table")
        assert "Data Leakage | 3 | 4 | Significant" in report
        assert ("Denial of Rightful Access to the System | 2 | 4 | Moderate"
                in report)
        assert "obtain-admin-password -> look-over-shoulder" in report

    def test_json_round_trip(self, weiss_din, din):
        ev = evaluate_graph(weiss_din, din)
        text = emit_report(ev, weiss_din, din, "json")
        assert Evaluation.from_dict(json.loads(text)) == ev

    def test_json_is_byte_deterministic(self, weiss_din, din):
        ev = evaluate_graph(weiss_din, din)
        assert (emit_report(ev, weiss_din, din, "json")
                == emit_report(ev, weiss_din, din, "json"))

    def test_dot_has_no_countermeasure_styling_without_countermeasures(
            self, weiss_iso, iso):
        ev = evaluate_graph(weiss_iso, iso)
        dot = emit_report(ev, weiss_iso, iso, "dot")
        assert "lightblue" not in dot
        assert dot.startswith("digraph")

    def test_dot_crosses_out_hardened_ratings(self, weiss_din, din):
        ev = evaluate_graph(weiss_din, din)
        dot = emit_report(ev, weiss_din, din, "dot")
        assert "lightblue" in dot
        assert "<s>1</s>" in dot          # authored value struck out
        assert "Risk: Significant" in dot

    def test_dot_marks_disabled_countermeasures(self, weiss_din, din):
        ev = evaluate_graph(weiss_din, din,
                            Overlay(disabled=frozenset({"firewall"})))
        dot = emit_report(ev, weiss_din, din, "dot")
        assert "disabled" in dot

    def test_unknown_format(self, weiss_din, din):
        ev = evaluate_graph(weiss_din, din)
        with pytest.raises(ValueError):
            emit_report(ev, weiss_din, din, "yaml")
