"""Tests for instance documents, the ring grammar, reports, and DOT export."""

import json
import pathlib

import pytest

from chaincover.document import (
    DocumentSemanticError,
    DocumentSyntaxError,
    InstanceDocument,
    build_check_report,
    build_search_report,
    build_spec_report,
    build_verify_report,
    document_for_hom,
    document_for_map,
    elem_text,
    export_dot,
    hom_text,
    instance_dict,
    parse_hom_expr,
    parse_instance,
    parse_ring_expr,
    render_check_text,
    render_search_text,
    render_spec_text,
    render_verify_text,
    ring_expr_text,
    serialize_instance,
    serialize_report,
)
from chaincover.poset import make_poset
from chaincover.rings import Product, Zn, make_hom, spec as ring_spec
from chaincover.search import WitnessSearchSpec, search_witness
from chaincover.specmap import TOP, make_spectral_map
from chaincover.theorems import TheoremId, exhaustive_verify, verify


def diamond_doc_text():
    payload = {
        "name": "identity-diamond",
        "s": {
            "labels": ["bot", "a", "b", "top"],
            "pairs": [["a", "top"], ["b", "top"], ["bot", "a"], ["bot", "b"]],
        },
        "r": {
            "labels": ["bot", "a", "b", "top"],
            "pairs": [["a", "top"], ["b", "top"], ["bot", "a"], ["bot", "b"]],
        },
        "map": {"bot": "bot", "a": "a", "b": "b", "top": "top"},
    }
    return json.dumps(payload, indent=2) + "\n"


class TestRingGrammar:
    def test_ring_expressions(self):
        assert parse_ring_expr("Zn(12)") == Zn(12)
        assert parse_ring_expr(" Zn( 12 ) ") == Zn(12)
        assert parse_ring_expr("Product(Zn(2),Zn(3))") == Product((Zn(2), Zn(3)))
        assert parse_ring_expr("Product( Zn(2) , Zn(3) , Zn(5) )") == Product(
            (Zn(2), Zn(3), Zn(5))
        )

    def test_nested_products_flatten(self):
        assert parse_ring_expr("Product(Zn(2),Product(Zn(3),Zn(4)))") == Product(
            (Zn(2), Zn(3), Zn(4))
        )

    def test_singleton_product_collapses(self):
        assert parse_ring_expr("Product(Zn(5))") == Zn(5)

    def test_ring_syntax_errors_carry_position(self):
        with pytest.raises(DocumentSyntaxError) as info:
            parse_ring_expr("Zn(x)")
        assert info.value.line == 1 and info.value.column == 4
        with pytest.raises(DocumentSyntaxError):
            parse_ring_expr("Zn(12")
        with pytest.raises(DocumentSyntaxError):
            parse_ring_expr("Zn(12) junk")
        with pytest.raises(DocumentSyntaxError):
            parse_ring_expr("Ring(12)")

    def test_ring_semantic_errors(self):
        with pytest.raises(DocumentSemanticError):
            parse_ring_expr("Zn(1)")

    def test_hom_expressions(self):
        h = parse_hom_expr("hom(m=6, target=Zn(2), e=1)")
        assert (h.m, h.target, h.e) == (6, Zn(2), 1)
        h = parse_hom_expr("hom(m=2,target=Product(Zn(2),Zn(2)),e=(1,0))")
        assert h.e == (1, 0)

    def test_hom_validation_errors(self):
        with pytest.raises(DocumentSemanticError):
            parse_hom_expr("hom(m=3, target=Zn(2), e=1)")
        with pytest.raises(DocumentSemanticError):
            parse_hom_expr("hom(m=6, target=Zn(4), e=2)")
        with pytest.raises(DocumentSemanticError):
            parse_hom_expr("hom(m=1, target=Zn(2), e=0)")

    def test_hom_syntax_errors(self):
        with pytest.raises(DocumentSyntaxError):
            parse_hom_expr("hom(m=6, e=1)")
        with pytest.raises(DocumentSyntaxError):
            parse_hom_expr("hom(m=6, target=Zn(2) e=1)")

    def test_canonical_text(self):
        assert ring_expr_text(Product((Zn(2), Zn(3)))) == "Product(Zn(2),Zn(3))"
        assert elem_text((1, 0)) == "(1,0)"
        assert elem_text(4) == "4"
        h = make_hom(6, Zn(2), 1)
        assert hom_text(h) == "hom(m=6, target=Zn(2), e=1)"
        assert parse_hom_expr(hom_text(h)) == h


class TestParseInstance:
    def test_poset_document_round_trip(self):
        text = diamond_doc_text()
        doc = parse_instance(text)
        assert doc.name == "identity-diamond"
        assert doc.ring is None
        canonical = serialize_instance(doc)
        again = parse_instance(canonical)
        assert again == doc
        assert serialize_instance(again) == canonical

    def test_ring_document_round_trip(self):
        doc = parse_instance('{"ring": "hom(m=6,target=Zn(2),e=1)"}')
        assert doc.ring == "hom(m=6, target=Zn(2), e=1)"
        assert doc.smap.s_poset.labels == ("2Z6", "3Z6")
        canonical = serialize_instance(doc)
        assert parse_instance(canonical) == doc
        assert serialize_instance(parse_instance(canonical)) == canonical

    def test_top_map_value(self):
        doc = parse_instance(json.dumps({
            "s": {"labels": ["p"], "pairs": []},
            "r": {"labels": ["q0", "q1"], "pairs": []},
            "map": {"q0": "p", "q1": "TOP"},
        }))
        assert doc.smap.assignment == (0, TOP)

    def test_json_syntax_error_position(self):
        with pytest.raises(DocumentSyntaxError) as info:
            parse_instance('{\n  "name": }\n')
        assert info.value.line == 2
        assert info.value.column == 11

    def test_unknown_keys(self):
        with pytest.raises(DocumentSemanticError):
            parse_instance('{"bogus": 1}')

    def test_exactly_one_block(self):
        with pytest.raises(DocumentSemanticError):
            parse_instance(json.dumps({
                "ring": "hom(m=6, target=Zn(2), e=1)",
                "s": {"labels": [], "pairs": []},
            }))
        with pytest.raises(DocumentSemanticError):
            parse_instance("{}")

    def test_missing_blocks(self):
        with pytest.raises(DocumentSemanticError) as info:
            parse_instance(json.dumps({
                "s": {"labels": ["p"], "pairs": []},
                "map": {},
            }))
        assert "missing: r" in str(info.value)

    def test_map_key_mismatch(self):
        base = {
            "s": {"labels": ["p"], "pairs": []},
            "r": {"labels": ["q0", "q1"], "pairs": []},
        }
        with pytest.raises(DocumentSemanticError) as info:
            parse_instance(json.dumps({**base, "map": {"q0": "p"}}))
        assert "unmapped r elements: q1" in str(info.value)
        with pytest.raises(DocumentSemanticError) as info:
            parse_instance(json.dumps({
                **base, "map": {"q0": "p", "q1": "p", "zz": "p"},
            }))
        assert "unknown r elements: zz" in str(info.value)

    def test_unknown_map_value(self):
        with pytest.raises(DocumentSemanticError):
            parse_instance(json.dumps({
                "s": {"labels": ["p"], "pairs": []},
                "r": {"labels": ["q"], "pairs": []},
                "map": {"q": "nope"},
            }))

    def test_non_monotone_map(self):
        # q0 < q1 but the contractions reverse strictly
        with pytest.raises(DocumentSemanticError) as info:
            parse_instance(json.dumps({
                "s": {"labels": ["p0", "p1"], "pairs": [["p0", "p1"]]},
                "r": {"labels": ["q0", "q1"], "pairs": [["q0", "q1"]]},
                "map": {"q0": "p1", "q1": "p0"},
            }))
        assert "map:" in str(info.value)

    def test_top_below_proper_value_rejected(self):
        with pytest.raises(DocumentSemanticError):
            parse_instance(json.dumps({
                "s": {"labels": ["p"], "pairs": []},
                "r": {"labels": ["q0", "q1"], "pairs": [["q0", "q1"]]},
                "map": {"q0": "TOP", "q1": "p"},
            }))

    def test_reserved_label(self):
        with pytest.raises(DocumentSemanticError):
            parse_instance(json.dumps({
                "s": {"labels": ["TOP"], "pairs": []},
                "r": {"labels": ["q"], "pairs": []},
                "map": {"q": "TOP"},
            }))

    def test_poset_block_errors(self):
        with pytest.raises(DocumentSemanticError):
            parse_instance(json.dumps({
                "s": {"labels": ["p", "p"], "pairs": []},
                "r": {"labels": ["q"], "pairs": []},
                "map": {"q": "p"},
            }))
        with pytest.raises(DocumentSemanticError):
            parse_instance(json.dumps({
                "s": {"labels": ["a", "b"], "pairs": [["a", "b"], ["b", "a"]]},
                "r": {"labels": ["q"], "pairs": []},
                "map": {"q": "a"},
            }))
        with pytest.raises(DocumentSemanticError):
            parse_instance(json.dumps({
                "s": {"labels": ["a"], "pairs": [["a"]]},
                "r": {"labels": ["q"], "pairs": []},
                "map": {"q": "a"},
            }))

    def test_metadata_types(self):
        with pytest.raises(DocumentSemanticError):
            parse_instance(json.dumps({"name": 3, "ring": "hom(m=6, target=Zn(2), e=1)"}))
        with pytest.raises(DocumentSemanticError):
            parse_instance(json.dumps({"seed": "x", "ring": "hom(m=6, target=Zn(2), e=1)"}))
        doc = parse_instance(json.dumps({
            "seed": 7, "ring": "hom(m=6, target=Zn(2), e=1)",
        }))
        assert doc.seed == 7

    def test_violation_block_tolerated(self):
        doc = parse_instance(json.dumps({
            "ring": "hom(m=6, target=Zn(2), e=1)",
            "violation": {"clause": "whatever"},
        }))
        assert doc.violation == {"clause": "whatever"}
        # and it survives a round trip
        assert parse_instance(serialize_instance(doc)).violation == doc.violation


class TestReports:
    def test_check_report_ring_regression(self):
        doc = parse_instance('{"ring": "hom(m=6, target=Zn(2), e=1)"}')
        report = build_check_report(doc)
        props = report["properties"]
        assert props["LO"] is False
        assert props["INC"] is True
        assert props["GU"] is True
        assert props["GD"] is True
        assert props["SGB"] is True
        assert props["unitary"] is True
        assert report["layers"] == {"1": False}
        assert list(report) == ["command", "instance", "properties", "layers"]

    def test_check_report_layer_override(self):
        doc = parse_instance(diamond_doc_text())
        report = build_check_report(doc, max_layer=4)
        assert list(report["layers"]) == ["1", "2", "3", "4"]
        assert all(report["layers"].values())

    def test_verify_report_counterexample_replays(self):
        v = exhaustive_verify(TheoremId.T_COVER_MAXCHAIN, 1, 2, waive_hypotheses=True)
        report = build_verify_report(None, [v], bounds={
            "max_s": 1, "max_r": 2, "allow_top": True,
        })
        assert report["all_hold"] is False
        entry = report["theorems"][0]
        dump = entry["counterexample"]
        # the dump is itself a valid instance document
        doc = parse_instance(json.dumps(dump))
        assert doc.violation["theorem"] == "T_COVER_MAXCHAIN"
        assert doc.violation["waived"] is True
        replay = verify(doc.smap, TheoremId.T_COVER_MAXCHAIN, waive_hypotheses=True)
        assert not replay.holds
        assert replay.counterexample.detail["code"] == doc.violation["code"]

    def test_verify_report_is_byte_stable(self):
        v1 = exhaustive_verify(TheoremId.C_EQUIVALENT, 2, 2, jobs=1)
        v2 = exhaustive_verify(TheoremId.C_EQUIVALENT, 2, 2, jobs=2)
        bounds = {"max_s": 2, "max_r": 2, "allow_top": True}
        r1 = serialize_report(build_verify_report(None, [v1], bounds=bounds))
        r2 = serialize_report(build_verify_report(None, [v2], bounds=bounds))
        assert r1 == r2

    def test_search_report_witness_parses(self):
        spec = WitnessSearchSpec(
            required=frozenset({"GU"}), goal="lo-fails", max_s=3, max_r=2
        )
        witness = search_witness(spec)
        report = build_search_report(spec, witness)
        assert report["found"] is True
        doc = parse_instance(json.dumps(report["witness"]))
        assert doc.smap.s_poset.n == 2
        assert doc.violation["goal"] == "lo-fails"

    def test_search_report_no_witness(self):
        spec = WitnessSearchSpec(
            required=frozenset({"LO"}), goal="lo-fails", max_s=2, max_r=2
        )
        report = build_search_report(spec, None)
        assert report["found"] is False and report["witness"] is None

    def test_spec_report(self):
        ring = parse_ring_expr("Zn(30)")
        report = build_spec_report(ring, ring_spec(ring))
        assert report["labels"] == ["2Z30", "3Z30", "5Z30"]
        assert report["pairs"] == []

    def test_renderers_produce_text(self):
        doc = parse_instance('{"ring": "hom(m=6, target=Zn(2), e=1)"}')
        check_text = render_check_text(build_check_report(doc))
        assert "LO: false" in check_text and "layer-1: false" in check_text
        v = verify(doc.smap, TheoremId.P_LAYERS)
        verify_text = render_verify_text(build_verify_report(doc, [v]))
        assert "P_LAYERS: holds" in verify_text
        spec = WitnessSearchSpec(
            required=frozenset(), goal="lo-fails", max_s=2, max_r=2
        )
        assert render_search_text(build_search_report(spec, None)).startswith(
            "no witness"
        )
        witness = search_witness(
            WitnessSearchSpec(required=frozenset(), goal="lo-fails", max_s=2, max_r=2)
        )
        text = render_search_text(build_search_report(spec, witness))
        assert "witness found" in text and "(antichain)" in text
        ring = parse_ring_expr("Zn(12)")
        assert "2Z12" in render_spec_text(build_spec_report(ring, ring_spec(ring)))


class TestExportDot:
    def test_structure(self):
        doc = parse_instance(diamond_doc_text())
        dot = export_dot(doc)
        assert dot.startswith("digraph instance {")
        assert dot.endswith("}\n")
        assert "subgraph cluster_s" in dot and "subgraph cluster_r" in dot
        # diamond Hasse has 4 covering edges per poset
        assert dot.count("->") == 4 + 4 + 4  # s edges + r edges + contraction
        assert dot.count("style=dashed") == 4
        assert "TOP" not in dot

    def test_top_node_appears_when_used(self):
        doc = parse_instance(json.dumps({
            "s": {"labels": ["p"], "pairs": []},
            "r": {"labels": ["q0", "q1"], "pairs": []},
            "map": {"q0": "p", "q1": "TOP"},
        }))
        dot = export_dot(doc)
        assert '"TOP" [shape=box];' in dot
        assert '"r:q1" -> "TOP" [style=dashed, constraint=false];' in dot

    def test_labels_with_quotes_escape(self):
        s = make_poset(['a"b'], [])
        r = make_poset(["q"], [])
        doc = document_for_map(make_spectral_map(s, r, [0]))
        dot = export_dot(doc)
        assert '\\"' in dot


class TestDocumentHelpers:
    def test_document_for_hom(self):
        doc = document_for_hom(make_hom(6, Zn(2), 1), name="reduction")
        assert doc.ring == "hom(m=6, target=Zn(2), e=1)"
        assert doc.name == "reduction"
        assert instance_dict(doc)["name"] == "reduction"

    def test_instance_dict_key_order(self):
        doc = parse_instance(diamond_doc_text())
        assert list(instance_dict(doc)) == ["name", "s", "r", "map"]
        ring_doc = parse_instance(json.dumps({
            "name": "x", "seed": 1, "ring": "hom(m=6, target=Zn(2), e=1)",
        }))
        assert list(instance_dict(ring_doc)) == ["name", "seed", "ring"]


class TestSampleInstances:
    """The shipped sample documents must stay parseable and canonical."""

    SAMPLES = sorted(
        pathlib.Path(__file__).resolve().parent.parent.joinpath("sample_instances").glob("*.json")
    )

    def test_samples_present(self):
        names = [p.name for p in self.SAMPLES]
        assert "z6_to_z2.json" in names
        assert "sgb_necessity.json" in names
        assert len(names) == 5

    @pytest.mark.parametrize("path", SAMPLES, ids=lambda p: p.stem)
    def test_sample_is_canonical_and_checkable(self, path):
        text = path.read_text()
        doc = parse_instance(text)
        assert serialize_instance(doc) == text
        report = build_check_report(doc)
        assert set(report["properties"]) >= {"LO", "GU", "GD", "SGB"}

    def test_sgb_necessity_profile(self):
        path = [p for p in self.SAMPLES if p.name == "sgb_necessity.json"][0]
        doc = parse_instance(path.read_text())
        props = build_check_report(doc)["properties"]
        assert props["LO"] and props["GU"] and props["GD"] and props["unitary"]
        assert not props["SGB"]
