import re

import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from hypersumm.corpus import Corpus, Dialogue, Role
from hypersumm.hypergraph import (
    EdgeKind,
    GraphError,
    HyperEdge,
    HyperGraph,
    HyperNode,
    NodeKind,
    ThemeLexicon,
    build_graph,
    export_graph_record,
    export_html,
    parse_graph_record,
    segment_dialogue,
    slugify,
    tag_themes,
)
from hypersumm.preprocess import build_qr_text, make_summary_pairs
from hypersumm.samples import load_sample_corpus, load_sample_summaries

from conftest import make_dialogue, make_turn


def lexicon(themes=None, styles=None):
    return ThemeLexicon(themes=themes or {}, styles=styles or {})


def segment_node(body, node_id="seg-test-0000-0001"):
    return HyperNode(id=node_id, kind=NodeKind.SEGMENT, title="t", body=body)


HREF = re.compile(r'href="([^"]+)"')


class TestSegmentDialogue:
    def test_even_split(self):
        dialogue = make_dialogue(texts=("a", "b", "c", "d"))
        nodes = segment_dialogue(dialogue, 2)
        assert len(nodes) == 2
        assert nodes[0].source_ref.start == 0 and nodes[0].source_ref.end == 1
        assert nodes[1].source_ref.start == 2 and nodes[1].source_ref.end == 3

    def test_single_turn_single_segment(self):
        dialogue = make_dialogue(texts=("only",))
        nodes = segment_dialogue(dialogue, 5)
        assert len(nodes) == 1
        assert nodes[0].body == build_qr_text(dialogue)

    def test_qr_pair_not_split(self):
        dialogue = make_dialogue(
            texts=("intro", "why?", "because."),
            roles=[Role.OTHER, Role.QUESTION, Role.RESPONSE],
        )
        nodes = segment_dialogue(dialogue, 2)
        spans = [(n.source_ref.start, n.source_ref.end) for n in nodes]
        assert spans == [(0, 0), (1, 2)]

    def test_cap_one_forces_split(self):
        dialogue = make_dialogue(
            texts=("why?", "because."), roles=[Role.QUESTION, Role.RESPONSE]
        )
        assert len(segment_dialogue(dialogue, 1)) == 2

    def test_invalid_cap(self):
        with pytest.raises(ValueError):
            segment_dialogue(make_dialogue(), 0)

    @given(
        roles=st.lists(st.sampled_from(list(Role)), min_size=1, max_size=12),
        cap=st.integers(min_value=2, max_value=5),
    )
    @settings(max_examples=120)
    def test_pair_preservation_and_coverage(self, roles, cap):
        dialogue = make_dialogue(texts=tuple(f"t{i}" for i in range(len(roles))), roles=roles)
        nodes = segment_dialogue(dialogue, cap)
        spans = [(n.source_ref.start, n.source_ref.end) for n in nodes]
        # coverage: spans tile the dialogue exactly
        assert spans[0][0] == 0 and spans[-1][1] == len(roles) - 1
        for (_, left_end), (right_start, _) in zip(spans, spans[1:]):
            assert right_start == left_end + 1
        # size cap respected
        assert all(end - start + 1 <= cap for start, end in spans)
        # no boundary separates a question from its immediate response
        for _, end in spans[:-1]:
            if roles[end] is Role.QUESTION and roles[end + 1] is Role.RESPONSE:
                pytest.fail(f"boundary after {end} splits a Q/R pair")


class TestTagThemes:
    def test_single_trigger(self):
        node = segment_node("he came across as friendly")
        tags = tag_themes(node, lexicon(themes={"emotional_response": ("friendly",)}))
        assert tags == {"emotional_response"}

    def test_empty_lexicon(self):
        assert tag_themes(segment_node("anything"), lexicon()) == set()

    def test_two_themes_both_returned(self):
        lex = lexicon(themes={"t1": ("alpha",), "t2": ("beta",)})
        assert tag_themes(segment_node("alpha then beta"), lex) == {"t1", "t2"}

    def test_phrase_matches_with_gaps(self):
        lex = lexicon(themes={"leadership": ("robot leader",)})
        assert tag_themes(segment_node("the robot acted as a leader"), lex) == {"leadership"}
        assert tag_themes(segment_node("leader of the robot"), lex) == set()

    def test_case_insensitive_and_punct_tolerant(self):
        lex = lexicon(styles={"transactional": ("task focused",)})
        assert tag_themes(segment_node("Very TASK-focused style."), lex) == {"transactional"}

    def test_theme_style_name_clash_rejected(self):
        with pytest.raises(GraphError, match="both theme and style"):
            ThemeLexicon(themes={"x": ("a",)}, styles={"x": ("b",)})


class TestBuildGraph:
    def test_empty_corpus(self):
        graph = build_graph(Corpus([]), [], lexicon())
        assert graph.nodes == [] and graph.edges == []

    def test_counts_for_one_dialogue(self):
        corpus = Corpus([make_dialogue(texts=("a", "b", "c", "d"))])
        pairs = make_summary_pairs(corpus, [("I1", "a summary")])
        graph = build_graph(corpus, pairs, lexicon(), max_turns_per_segment=2)
        kinds = [n.kind for n in graph.nodes]
        assert kinds.count(NodeKind.SEGMENT) == 2
        assert kinds.count(NodeKind.SUMMARY) == 1
        temporal = [e for e in graph.edges if e.kind is EdgeKind.TEMPORAL_NEXT]
        summary_of = [e for e in graph.edges if e.kind is EdgeKind.SUMMARY_OF]
        assert len(temporal) == 1
        assert len(summary_of) == 2

    def test_same_theme_edges_canonical_direction(self):
        corpus = Corpus([make_dialogue(texts=("the sky is blue", "blue again here"))])
        lex = lexicon(themes={"color": ("blue",)})
        graph = build_graph(corpus, [], lex, max_turns_per_segment=1)
        pair_edges = [
            e for e in graph.edges
            if e.kind is EdgeKind.SAME_THEME and not e.dst.startswith("theme-")
        ]
        assert len(pair_edges) == 1
        assert pair_edges[0].src < pair_edges[0].dst
        membership = [
            e for e in graph.edges
            if e.kind is EdgeKind.SAME_THEME and e.dst == "theme-color"
        ]
        assert len(membership) == 2

    def test_style_edges_from_style_node(self):
        corpus = Corpus([make_dialogue(texts=("pure reward logic", "nothing here"))])
        graph = build_graph(corpus, [], lexicon(styles={"transactional": ("reward",)}),
                            max_turns_per_segment=1)
        style_edges = [e for e in graph.edges if e.kind is EdgeKind.STYLE_OF]
        assert len(style_edges) == 1
        assert style_edges[0].src == "style-transactional"

    def test_same_speaker_needs_shared_speaker(self):
        dialogue = Dialogue("I1", [
            make_turn("I1", 0, speaker="A", text="one"),
            make_turn("I1", 1, speaker="B", text="two"),
            make_turn("I1", 2, speaker="B", text="three"),
            make_turn("I1", 3, speaker="C", text="four"),
        ])
        graph = build_graph(Corpus([dialogue]), [], lexicon(), max_turns_per_segment=1)
        same_speaker = [e for e in graph.edges if e.kind is EdgeKind.SAME_SPEAKER]
        assert len(same_speaker) == 1

    def test_unknown_summary_dialogue_rejected(self):
        from hypersumm.corpus import SummaryPair

        corpus = Corpus([make_dialogue()])
        orphan = SummaryPair("I9", "src", "sum")
        with pytest.raises(GraphError, match="unknown dialogue_id 'I9'"):
            build_graph(corpus, [orphan], lexicon())

    def test_deterministic_construction(self):
        corpus = load_sample_corpus()
        pairs = make_summary_pairs(corpus, load_sample_summaries())
        first = build_graph(corpus, pairs)
        second = build_graph(corpus, pairs)
        assert export_graph_record(first) == export_graph_record(second)


class TestValidate:
    def test_dangling_edge(self):
        graph = HyperGraph(
            [segment_node("x", "seg-a-0000-0000")],
            [HyperEdge("seg-a-0000-0000", "missing", EdgeKind.TEMPORAL_NEXT)],
        )
        with pytest.raises(GraphError, match="missing"):
            graph.validate()

    def test_duplicate_ids(self):
        node = segment_node("x", "dup")
        with pytest.raises(GraphError, match="duplicate node ids"):
            HyperGraph([node, segment_node("y", "dup")], []).validate()

    def test_branching_temporal_chain_rejected(self):
        nodes = [segment_node("x", f"n{i}") for i in range(3)]
        edges = [
            HyperEdge("n0", "n1", EdgeKind.TEMPORAL_NEXT),
            HyperEdge("n0", "n2", EdgeKind.TEMPORAL_NEXT),
        ]
        with pytest.raises(GraphError, match="simple chains"):
            HyperGraph(nodes, edges).validate()


class TestGraphRecord:
    def test_empty_graph(self):
        assert export_graph_record(HyperGraph([], [])) == ""

    def test_line_count(self):
        nodes = [segment_node("b", f"n{i}") for i in range(3)]
        edges = [
            HyperEdge("n0", "n1", EdgeKind.TEMPORAL_NEXT),
            HyperEdge("n1", "n2", EdgeKind.TEMPORAL_NEXT),
        ]
        record = export_graph_record(HyperGraph(nodes, edges))
        assert len(record.splitlines()) == 5

    def test_round_trip_bytes_and_structure(self):
        corpus = load_sample_corpus()
        pairs = make_summary_pairs(corpus, load_sample_summaries())
        graph = build_graph(corpus, pairs)
        record = export_graph_record(graph)
        parsed = parse_graph_record(record.splitlines())
        assert export_graph_record(parsed) == record
        assert {n.id for n in parsed.nodes} == {n.id for n in graph.nodes}
        assert set(parsed.edges) == set(graph.edges)

    def test_parse_rejects_garbage(self):
        from hypersumm.corpus import CorpusError

        with pytest.raises(CorpusError, match="line 1"):
            parse_graph_record(["nope"])
        with pytest.raises(CorpusError, match="node' or 'edge"):
            parse_graph_record(['{"other": {}}'])


class TestExportHtml:
    def test_empty_graph_has_index_only(self, tmp_path):
        manifest = export_html(HyperGraph([], []), tmp_path)
        assert manifest == ["index.html"]
        assert (tmp_path / "index.html").exists()

    def test_manifest_counts_nodes_plus_index(self, tmp_path):
        corpus = Corpus([make_dialogue(texts=("a", "b", "c", "d"))])
        graph = build_graph(corpus, [], lexicon(), max_turns_per_segment=2)
        manifest = export_html(graph, tmp_path)
        assert len(manifest) == len(graph.nodes) + 1

    def test_no_dangling_hrefs_on_sample_graph(self, tmp_path):
        corpus = load_sample_corpus()
        pairs = make_summary_pairs(corpus, load_sample_summaries())
        graph = build_graph(corpus, pairs)
        manifest = export_html(graph, tmp_path)
        emitted = set(manifest)
        for name in manifest:
            content = (tmp_path / name).read_text(encoding="utf-8")
            for href in HREF.findall(content):
                assert href in emitted, f"{name} links to missing {href}"

    def test_export_is_byte_deterministic(self, tmp_path):
        corpus = load_sample_corpus()
        graph = build_graph(corpus, [])
        first_dir, second_dir = tmp_path / "one", tmp_path / "two"
        export_html(graph, first_dir)
        export_html(graph, second_dir)
        for name in (p.name for p in first_dir.iterdir()):
            assert (first_dir / name).read_bytes() == (second_dir / name).read_bytes()

    def test_edges_rendered_with_kind_annotation(self, tmp_path):
        corpus = Corpus([make_dialogue(texts=("a", "b", "c", "d"))])
        graph = build_graph(corpus, [], lexicon(), max_turns_per_segment=2)
        export_html(graph, tmp_path)
        first_segment = sorted(n.id for n in graph.nodes)[0]
        page = (tmp_path / f"{first_segment}.html").read_text(encoding="utf-8")
        assert "(temporal_next)" in page

    def test_html_escaping(self, tmp_path):
        node = segment_node("<script>alert('x')</script>", "seg-esc-0000-0000")
        export_html(HyperGraph([node], []), tmp_path)
        page = (tmp_path / "seg-esc-0000-0000.html").read_text(encoding="utf-8")
        assert "<script>" not in page
        assert "&lt;script&gt;" in page


def test_slugify():
    assert slugify("INT01") == "INT01"
    assert slugify("a b/c:d") == "a-b-c-d"
    assert slugify("???") == "x"


def test_temporal_chains_cover_sample_dialogues():
    corpus = load_sample_corpus()
    graph = build_graph(corpus, [])
    segments_by_dialogue = {}
    for node in graph.nodes:
        if node.kind is NodeKind.SEGMENT:
            segments_by_dialogue.setdefault(node.source_ref.interview_id, []).append(node)
    temporal = {(e.src, e.dst) for e in graph.edges if e.kind is EdgeKind.TEMPORAL_NEXT}
    for interview_id, nodes in segments_by_dialogue.items():
        ordered = sorted(nodes, key=lambda n: n.source_ref.start)
        expected = {(a.id, b.id) for a, b in zip(ordered, ordered[1:])}
        chain = {(s, d) for s, d in temporal if s.startswith(f"seg-{interview_id}")}
        assert chain == expected
        # chain covers all turns of the dialogue
        dialogue = corpus.get(interview_id)
        assert ordered[0].source_ref.start == 0
        assert ordered[-1].source_ref.end == len(dialogue.turns) - 1
