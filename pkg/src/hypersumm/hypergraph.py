"""Hypertext graph over dialogue segments, summaries, themes and styles.

Dialogues are cut into small segments (by default one question/response
exchange) which become nodes of a typed graph, linked by temporal order,
shared themes, shared speakers, summary coverage and leadership style. Theme
and style tagging is a deterministic lexicon matcher: a node carries a tag
iff one of the tag's trigger phrases occurs, case-insensitively, as an
in-order token subsequence of the node body.

The graph exports two ways: a line-delimited record file that round-trips
byte-identically, and a static HTML site (index plus one page per node,
relative links only, no scripts).
"""

from __future__ import annotations

import hashlib
import html
import json
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable

from .corpus import CorpusError, Corpus, Dialogue, Role, SummaryPair, dumps_record
from .preprocess import build_qr_text
from .rouge import tokenize


class NodeKind(str, Enum):
    SEGMENT = "segment"
    SUMMARY = "summary"
    THEME = "theme"
    STYLE = "style"


class EdgeKind(str, Enum):
    TEMPORAL_NEXT = "temporal_next"
    SAME_THEME = "same_theme"
    SAME_SPEAKER = "same_speaker"
    SUMMARY_OF = "summary_of"
    STYLE_OF = "style_of"


class GraphError(ValueError):
    """Inconsistent graph input or structure."""


@dataclass(frozen=True)
class SourceRef:
    """Provenance of a segment: interview id plus inclusive turn span."""

    interview_id: str
    start: int
    end: int


@dataclass
class HyperNode:
    id: str
    kind: NodeKind
    title: str
    body: str
    source_ref: SourceRef | None = None


@dataclass(frozen=True)
class HyperEdge:
    src: str
    dst: str
    kind: EdgeKind


@dataclass
class HyperGraph:
    nodes: list[HyperNode] = field(default_factory=list)
    edges: list[HyperEdge] = field(default_factory=list)

    def node_ids(self) -> set[str]:
        return {node.id for node in self.nodes}

    def get(self, node_id: str) -> HyperNode:
        for node in self.nodes:
            if node.id == node_id:
                return node
        raise KeyError(node_id)

    def validate(self) -> None:
        ids = [node.id for node in self.nodes]
        if len(ids) != len(set(ids)):
            duplicates = sorted({i for i in ids if ids.count(i) > 1})
            raise GraphError(f"duplicate node ids: {', '.join(duplicates)}")
        known = set(ids)
        for edge in self.edges:
            for endpoint in (edge.src, edge.dst):
                if endpoint not in known:
                    raise GraphError(f"edge endpoint {endpoint!r} is not a node")
        outgoing: dict[str, int] = {}
        incoming: dict[str, int] = {}
        for edge in self.edges:
            if edge.kind is EdgeKind.TEMPORAL_NEXT:
                outgoing[edge.src] = outgoing.get(edge.src, 0) + 1
                incoming[edge.dst] = incoming.get(edge.dst, 0) + 1
        over_out = [n for n, c in outgoing.items() if c > 1]
        over_in = [n for n, c in incoming.items() if c > 1]
        if over_out or over_in:
            raise GraphError(
                "temporal_next edges must form simple chains;"
                f" offending nodes: {', '.join(sorted(over_out + over_in))}"
            )


# Trigger phrases are kept alphabetically sorted so configurations and
# exports stay canonical.
DEFAULT_THEMES: dict[str, tuple[str, ...]] = {
    "reaction_to_robot_behavior": (
        "eye contact", "facial", "gesture", "gestures", "movement",
        "movements", "pre-programmed", "scripted", "tone", "voice",
    ),
    "emotional_response": (
        "comfortable", "empathy", "enthusiasm", "friendly", "nervous",
        "trust", "uncomfortable", "unsettling", "warm",
    ),
    "leadership_applicability": (
        "authority", "credibility", "credible", "in charge", "leader",
        "leadership", "motivating", "role model",
    ),
}

DEFAULT_STYLES: dict[str, tuple[str, ...]] = {
    "transformational": (
        "encouraged", "inspiring", "passionate", "transformational", "vision",
    ),
    "transactional": (
        "checklist", "instructions", "reward", "rewards", "task focused", "transactional",
    ),
}


@dataclass(frozen=True)
class ThemeLexicon:
    """Trigger phrases per theme name and per style name."""

    themes: dict[str, tuple[str, ...]] = field(default_factory=lambda: dict(DEFAULT_THEMES))
    styles: dict[str, tuple[str, ...]] = field(default_factory=lambda: dict(DEFAULT_STYLES))

    def __post_init__(self):
        overlap = set(self.themes) & set(self.styles)
        if overlap:
            raise GraphError(f"names used as both theme and style: {', '.join(sorted(overlap))}")


def slugify(raw: str) -> str:
    """Filename- and URL-safe identifier fragment."""
    slug = re.sub(r"[^A-Za-z0-9_-]+", "-", raw).strip("-")
    return slug or "x"


def _is_token_subsequence(needle: list[str], haystack: list[str]) -> bool:
    iterator = iter(haystack)
    return all(token in iterator for token in needle)


def tag_themes(node: HyperNode, lexicon: ThemeLexicon) -> set[str]:
    """Every theme or style whose any trigger phrase matches the node body."""
    body_tokens = tokenize(node.body)
    tags = set()
    for name, phrases in list(lexicon.themes.items()) + list(lexicon.styles.items()):
        for phrase in phrases:
            phrase_tokens = tokenize(phrase)
            if phrase_tokens and _is_token_subsequence(phrase_tokens, body_tokens):
                tags.add(name)
                break
    return tags


def segment_dialogue(dialogue: Dialogue, max_turns_per_segment: int) -> list[HyperNode]:
    """Group consecutive turns into segment nodes.

    Segments hold at most ``max_turns_per_segment`` turns and a boundary is
    moved one turn earlier whenever it would otherwise separate a question
    turn from the response turn directly after it (impossible only when the
    cap is 1, in which case the pair is split).
    """
    if max_turns_per_segment < 1:
        raise ValueError(f"max_turns_per_segment must be >= 1, got {max_turns_per_segment}")
    turns = dialogue.turns
    nodes = []
    i = 0
    while i < len(turns):
        end = min(i + max_turns_per_segment, len(turns))
        if (
            end < len(turns)
            and end - 1 > i
            and turns[end - 1].role is Role.QUESTION
            and turns[end].role is Role.RESPONSE
        ):
            end -= 1
        segment_turns = turns[i:end]
        start_index = segment_turns[0].turn_index
        end_index = segment_turns[-1].turn_index
        nodes.append(
            HyperNode(
                id=f"seg-{slugify(dialogue.interview_id)}-{start_index:04d}-{end_index:04d}",
                kind=NodeKind.SEGMENT,
                title=f"{dialogue.interview_id} turns {start_index}-{end_index}",
                body=build_qr_text(Dialogue(dialogue.interview_id, segment_turns)),
                source_ref=SourceRef(dialogue.interview_id, start_index, end_index),
            )
        )
        i = end
    return nodes


def _segment_speakers(dialogue: Dialogue, ref: SourceRef) -> set[str]:
    return {
        turn.speaker
        for turn in dialogue.turns[ref.start : ref.end + 1]
        if turn.speaker
    }


def build_graph(
    corpus: Corpus,
    summaries: list[SummaryPair],
    lexicon: ThemeLexicon | None = None,
    max_turns_per_segment: int = 2,
) -> HyperGraph:
    """Assemble the full hypertext graph with deterministic ordering.

    Nodes: every dialogue segment, one summary node per summary pair, and one
    theme/style node per tag present on at least one segment. Edges:
    temporal_next chains per dialogue, summary_of from a summary to each of
    its dialogue's segments, same_speaker between consecutive segments that
    share a speaker, same_theme between segment pairs sharing a theme (one
    canonical lower-id to higher-id edge) plus segment-to-theme membership
    edges, and style_of from style nodes to tagged segments.
    """
    lexicon = lexicon or ThemeLexicon()
    nodes: list[HyperNode] = []
    edges: list[HyperEdge] = []
    segments_by_dialogue: dict[str, list[HyperNode]] = {}

    for dialogue in sorted(corpus.dialogues, key=lambda d: d.interview_id):
        segments = segment_dialogue(dialogue, max_turns_per_segment)
        segments_by_dialogue[dialogue.interview_id] = segments
        nodes.extend(segments)

    summary_nodes: list[tuple[HyperNode, str]] = []
    for pair in sorted(summaries, key=lambda p: (p.dialogue_id, p.target_summary)):
        if pair.dialogue_id not in segments_by_dialogue:
            raise GraphError(f"summary references unknown dialogue_id '{pair.dialogue_id}'")
        digest = hashlib.sha256(pair.target_summary.encode("utf-8")).hexdigest()[:8]
        node = HyperNode(
            id=f"summary-{slugify(pair.dialogue_id)}-{digest}",
            kind=NodeKind.SUMMARY,
            title=f"summary of {pair.dialogue_id}",
            body=pair.target_summary,
        )
        summary_nodes.append((node, pair.dialogue_id))
        nodes.append(node)

    # Tag segments; collect which themes/styles are actually present.
    tags_by_segment: dict[str, set[str]] = {}
    for segments in segments_by_dialogue.values():
        for segment in segments:
            tags_by_segment[segment.id] = tag_themes(segment, lexicon)
    present = sorted(set().union(*tags_by_segment.values()) if tags_by_segment else set())

    tag_nodes: dict[str, HyperNode] = {}
    for name in present:
        if name in lexicon.themes:
            kind, prefix, phrases = NodeKind.THEME, "theme", lexicon.themes[name]
        else:
            kind, prefix, phrases = NodeKind.STYLE, "style", lexicon.styles[name]
        node = HyperNode(
            id=f"{prefix}-{slugify(name)}",
            kind=kind,
            title=name,
            body="triggers: " + ", ".join(sorted(phrases)),
        )
        tag_nodes[name] = node
        nodes.append(node)

    # temporal_next chains.
    for interview_id in sorted(segments_by_dialogue):
        segments = segments_by_dialogue[interview_id]
        for left, right in zip(segments, segments[1:]):
            edges.append(HyperEdge(left.id, right.id, EdgeKind.TEMPORAL_NEXT))

    # summary_of edges.
    for node, dialogue_id in summary_nodes:
        for segment in segments_by_dialogue[dialogue_id]:
            edges.append(HyperEdge(node.id, segment.id, EdgeKind.SUMMARY_OF))

    # same_speaker between consecutive segments sharing a speaker.
    for interview_id in sorted(segments_by_dialogue):
        dialogue = corpus.get(interview_id)
        segments = segments_by_dialogue[interview_id]
        for left, right in zip(segments, segments[1:]):
            shared = _segment_speakers(dialogue, left.source_ref) & _segment_speakers(
                dialogue, right.source_ref
            )
            if shared:
                edges.append(HyperEdge(left.id, right.id, EdgeKind.SAME_SPEAKER))

    # Theme membership, segment-pair links and style edges.
    seen_pairs: set[tuple[str, str]] = set()
    for name in present:
        tag_node = tag_nodes[name]
        tagged = sorted(seg_id for seg_id, tags in tags_by_segment.items() if name in tags)
        if tag_node.kind is NodeKind.THEME:
            for seg_id in tagged:
                edges.append(HyperEdge(seg_id, tag_node.id, EdgeKind.SAME_THEME))
            for i, low in enumerate(tagged):
                for high in tagged[i + 1 :]:
                    if (low, high) not in seen_pairs:
                        seen_pairs.add((low, high))
                        edges.append(HyperEdge(low, high, EdgeKind.SAME_THEME))
        else:
            for seg_id in tagged:
                edges.append(HyperEdge(tag_node.id, seg_id, EdgeKind.STYLE_OF))

    graph = HyperGraph(nodes, edges)
    graph.validate()
    return graph


# ---------------------------------------------------------------------------
# Record export
# ---------------------------------------------------------------------------

def _node_to_record(node: HyperNode) -> dict:
    ref = None
    if node.source_ref is not None:
        ref = {
            "interview_id": node.source_ref.interview_id,
            "start": node.source_ref.start,
            "end": node.source_ref.end,
        }
    return {
        "node": {
            "id": node.id,
            "kind": node.kind.value,
            "title": node.title,
            "body": node.body,
            "source_ref": ref,
        }
    }


def export_graph_record(graph: HyperGraph) -> str:
    """Line-delimited graph records: all nodes sorted by id, then all edges
    sorted by (src, dst, kind). Re-exporting a parsed record is byte-stable."""
    lines = []
    for node in sorted(graph.nodes, key=lambda n: n.id):
        lines.append(dumps_record(_node_to_record(node)) + "\n")
    for edge in sorted(graph.edges, key=lambda e: (e.src, e.dst, e.kind.value)):
        record = {"edge": {"src": edge.src, "dst": edge.dst, "kind": edge.kind.value}}
        lines.append(dumps_record(record) + "\n")
    return "".join(lines)


def parse_graph_record(stream: Iterable[str]) -> HyperGraph:
    nodes: list[HyperNode] = []
    edges: list[HyperEdge] = []
    for line_no, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusError(f"invalid JSON record: {exc.msg}", line_no) from None
        if not isinstance(obj, dict) or len(obj) != 1:
            raise CorpusError("record must be a single-key node or edge object", line_no)
        try:
            if "node" in obj:
                body = obj["node"]
                ref = body.get("source_ref")
                source_ref = None
                if ref is not None:
                    source_ref = SourceRef(ref["interview_id"], ref["start"], ref["end"])
                nodes.append(
                    HyperNode(
                        id=body["id"],
                        kind=NodeKind(body["kind"]),
                        title=body["title"],
                        body=body["body"],
                        source_ref=source_ref,
                    )
                )
            elif "edge" in obj:
                body = obj["edge"]
                edges.append(HyperEdge(body["src"], body["dst"], EdgeKind(body["kind"])))
            else:
                raise CorpusError("record must contain 'node' or 'edge'", line_no)
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, CorpusError):
                raise
            raise CorpusError(f"invalid graph record: {exc}", line_no) from None
    graph = HyperGraph(nodes, edges)
    graph.validate()
    return graph


# ---------------------------------------------------------------------------
# HTML export
# ---------------------------------------------------------------------------

_PAGE_CSS = """\
body { font-family: sans-serif; max-width: 46rem; margin: 2rem auto; padding: 0 1rem; }
pre.body { white-space: pre-wrap; background: #f4f4f4; padding: 0.8rem; }
span.edge-kind { color: #666; font-size: 0.85em; }
p.kind { color: #666; }
"""

_KIND_ORDER = (NodeKind.SEGMENT, NodeKind.SUMMARY, NodeKind.THEME, NodeKind.STYLE)


def _page(title: str, content: str) -> str:
    return (
        "<!DOCTYPE html>\n"
        '<html lang="en">\n<head>\n<meta charset="utf-8">\n'
        f"<title>{html.escape(title)}</title>\n"
        f"<style>\n{_PAGE_CSS}</style>\n</head>\n<body>\n"
        f"{content}</body>\n</html>\n"
    )


def _link_item(target: HyperNode, kind: EdgeKind) -> str:
    return (
        f'<li><a href="{target.id}.html">{html.escape(target.title)}</a> '
        f'<span class="edge-kind">({kind.value})</span></li>'
    )


def export_html(graph: HyperGraph, out_dir: str | Path) -> list[str]:
    """Render the graph as a static site: index.html plus one page per node.

    Every edge appears as an anchor annotated with its kind, on the pages of
    both endpoints. All links are relative and resolve inside out_dir, and
    output bytes depend only on the graph. Returns the manifest of files
    written (index first, then node pages sorted by id).
    """
    graph.validate()
    out_path = Path(out_dir)
    out_path.mkdir(parents=True, exist_ok=True)
    by_id = {node.id: node for node in graph.nodes}

    outgoing: dict[str, list[HyperEdge]] = {node.id: [] for node in graph.nodes}
    incoming: dict[str, list[HyperEdge]] = {node.id: [] for node in graph.nodes}
    for edge in sorted(graph.edges, key=lambda e: (e.kind.value, e.src, e.dst)):
        outgoing[edge.src].append(edge)
        incoming[edge.dst].append(edge)

    manifest = ["index.html"]
    sections = []
    for kind in _KIND_ORDER:
        members = sorted((n for n in graph.nodes if n.kind is kind), key=lambda n: n.id)
        if not members:
            continue
        items = "\n".join(
            f'<li><a href="{node.id}.html">{html.escape(node.title)}</a></li>'
            for node in members
        )
        sections.append(f"<h2>{kind.value} nodes</h2>\n<ul>\n{items}\n</ul>\n")
    index_body = "<h1>dialogue hypertext</h1>\n" + (
        "".join(sections) if sections else "<p>empty graph</p>\n"
    )
    _write(out_path / "index.html", _page("dialogue hypertext", index_body))

    for node in sorted(graph.nodes, key=lambda n: n.id):
        parts = [
            '<nav><a href="index.html">index</a></nav>\n',
            f"<h1>{html.escape(node.title)}</h1>\n",
            f'<p class="kind">kind: {node.kind.value}</p>\n',
        ]
        if node.source_ref is not None:
            ref = node.source_ref
            parts.append(
                f'<p class="kind">source: {html.escape(ref.interview_id)}'
                f" turns {ref.start}-{ref.end}</p>\n"
            )
        parts.append(f'<pre class="body">{html.escape(node.body)}</pre>\n')
        out_items = [_link_item(by_id[e.dst], e.kind) for e in outgoing[node.id]]
        in_items = [_link_item(by_id[e.src], e.kind) for e in incoming[node.id]]
        if out_items:
            parts.append("<h2>links</h2>\n<ul>\n" + "\n".join(out_items) + "\n</ul>\n")
        if in_items:
            parts.append("<h2>linked from</h2>\n<ul>\n" + "\n".join(in_items) + "\n</ul>\n")
        _write(out_path / f"{node.id}.html", _page(node.title, "".join(parts)))
        manifest.append(f"{node.id}.html")
    return manifest


def _write(path: Path, content: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(content)
