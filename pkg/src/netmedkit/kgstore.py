"""Typed biomedical knowledge graph: load, validate, serve.

Nodes and edges come from JSON-lines files, the schema from a JSON file.
Graphs are immutable after load; all edge types carry undirected semantics.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

from .errors import DanglingEdge, ParseError, SchemaViolation, UnknownNode

log = logging.getLogger(__name__)


@dataclass
class NodeRecord:
    id: str
    node_type: str
    display_name: str
    synonyms: list[str] = field(default_factory=list)
    attrs: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not self.display_name:
            self.display_name = self.id


@dataclass(frozen=True)
class EdgeRecord:
    source: str
    target: str
    edge_type: str


@dataclass
class SchemaDescriptor:
    node_types: list[str]
    edge_types: list[tuple[str, str, str]]  # (edge_type, source_type, target_type)

    def __post_init__(self):
        triples = [tuple(t) for t in self.edge_types]
        if len(set(triples)) != len(triples):
            raise SchemaViolation("duplicate edge-type triples in schema")
        self.edge_types = triples
        for et, st, tt in self.edge_types:
            for t in (st, tt):
                if t not in self.node_types:
                    raise SchemaViolation(f"edge type {et} references unknown node type {t}")

    @classmethod
    def from_file(cls, path) -> "SchemaDescriptor":
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        return cls(node_types=raw["node_types"],
                   edge_types=[tuple(e) for e in raw["edge_types"]])

    def endpoint_types(self, edge_type: str) -> list[tuple[str, str]]:
        return [(s, t) for et, s, t in self.edge_types if et == edge_type]

    def allows_edge(self, source_type: str, edge_type: str, target_type: str) -> bool:
        # undirected semantics: either orientation of the declared triple counts
        return ((edge_type, source_type, target_type) in self.edge_types
                or (edge_type, target_type, source_type) in self.edge_types)

    def meta_edges(self) -> list[tuple[str, str, str]]:
        return list(self.edge_types)


class KnowledgeGraph:
    """Immutable typed property graph with per-edge-type adjacency."""

    def __init__(self, schema: SchemaDescriptor):
        self.schema = schema
        self.nodes: dict[str, NodeRecord] = {}
        # edge_type -> node id -> sorted neighbor set
        self._adj: dict[str, dict[str, set[str]]] = {}
        self._edge_count = 0

    # construction helpers (used by load_graph / induced_subgraph only)

    def _add_node(self, rec: NodeRecord):
        if rec.node_type not in self.schema.node_types:
            raise SchemaViolation(f"unknown node type {rec.node_type!r} for {rec.id}")
        if rec.id in self.nodes:
            log.warning("duplicate node id %s; keeping first occurrence", rec.id)
            return
        self.nodes[rec.id] = rec

    def _add_edge(self, source: str, target: str, edge_type: str, line_no: int = -1):
        for nid in (source, target):
            if nid not in self.nodes:
                raise DanglingEdge(line_no, source, target)
        st = self.nodes[source].node_type
        tt = self.nodes[target].node_type
        if not self.schema.allows_edge(st, edge_type, tt):
            raise SchemaViolation(
                f"edge type {edge_type!r} not declared for ({st}, {tt})")
        adj = self._adj.setdefault(edge_type, {})
        if target in adj.get(source, ()):  # duplicate edge
            return
        adj.setdefault(source, set()).add(target)
        adj.setdefault(target, set()).add(source)
        self._edge_count += 1

    # read API

    def stats(self) -> dict:
        return {"nodes": len(self.nodes), "edges": self._edge_count}

    def edge_types(self) -> list[str]:
        return sorted(self._adj)

    def node(self, node_id: str) -> NodeRecord:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise UnknownNode(node_id) from None

    def nodes_of_type(self, node_type: str) -> list[str]:
        return sorted(nid for nid, rec in self.nodes.items() if rec.node_type == node_type)

    def neighbors(self, node_id: str, edge_type: str | None = None) -> list[str]:
        if node_id not in self.nodes:
            raise UnknownNode(node_id)
        if edge_type is not None:
            return sorted(self._adj.get(edge_type, {}).get(node_id, ()))
        seen: set[str] = set()
        for adj in self._adj.values():
            seen.update(adj.get(node_id, ()))
        return sorted(seen)

    def degree(self, node_id: str, edge_type: str | None = None) -> int:
        return len(self.neighbors(node_id, edge_type))

    def has_edge(self, source: str, target: str, edge_type: str) -> bool:
        return target in self._adj.get(edge_type, {}).get(source, ())

    def edges(self) -> list[EdgeRecord]:
        out = []
        for et, adj in self._adj.items():
            for src, nbrs in adj.items():
                for tgt in nbrs:
                    if src <= tgt:
                        out.append(EdgeRecord(src, tgt, et))
        return sorted(out, key=lambda e: (e.edge_type, e.source, e.target))


def load_graph(nodes_path, edges_path, schema: SchemaDescriptor) -> KnowledgeGraph:
    """Load a graph from JSON-lines node and edge files.

    Duplicate nodes keep the first occurrence (warning logged); duplicate
    edges collapse silently. Unknown types raise SchemaViolation, edges with
    missing endpoints raise DanglingEdge with the offending line number.
    """
    graph = KnowledgeGraph(schema)
    for line_no, raw in _iter_jsonl(nodes_path):
        try:
            rec = NodeRecord(
                id=raw["id"],
                node_type=raw["type"],
                display_name=raw.get("name", ""),
                synonyms=list(raw.get("synonyms", [])),
                attrs=dict(raw.get("attrs", {})),
            )
        except (KeyError, TypeError) as exc:
            raise ParseError(nodes_path, line_no, f"bad node record: {exc}") from exc
        graph._add_node(rec)
    for line_no, raw in _iter_jsonl(edges_path):
        try:
            source, target, edge_type = raw["source"], raw["target"], raw["type"]
        except (KeyError, TypeError) as exc:
            raise ParseError(edges_path, line_no, f"bad edge record: {exc}") from exc
        graph._add_edge(source, target, edge_type, line_no)
    return graph


def _iter_jsonl(path):
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                yield line_no, json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(path, line_no, exc.msg) from exc


def graph_from_records(nodes: list[NodeRecord], edges: list[EdgeRecord],
                       schema: SchemaDescriptor) -> KnowledgeGraph:
    """Build a graph in memory; same validation path as load_graph."""
    graph = KnowledgeGraph(schema)
    for rec in nodes:
        graph._add_node(rec)
    for e in edges:
        graph._add_edge(e.source, e.target, e.edge_type)
    return graph


def translate_identifiers(graph: KnowledgeGraph, ids: list[str], target_type: str,
                          edge_type: str = "encodes") -> dict[str, list[str]]:
    """Map each id to its neighbors of target_type over the translation edge.

    Missing translations yield empty lists; absent input ids raise UnknownNode.
    """
    if target_type not in graph.schema.node_types:
        raise SchemaViolation(f"unknown target type {target_type!r}")
    out: dict[str, list[str]] = {}
    for nid in ids:
        nbrs = graph.neighbors(nid, edge_type)
        out[nid] = [n for n in nbrs if graph.nodes[n].node_type == target_type]
    return out


def induced_subgraph(graph: KnowledgeGraph, ids) -> KnowledgeGraph:
    """Subgraph on exactly `ids`, keeping edges with both endpoints inside."""
    keep = set(ids)
    for nid in keep:
        if nid not in graph.nodes:
            raise UnknownNode(nid)
    sub = KnowledgeGraph(graph.schema)
    for nid in sorted(keep):
        sub._add_node(graph.nodes[nid])
    for e in graph.edges():
        if e.source in keep and e.target in keep:
            sub._add_edge(e.source, e.target, e.edge_type)
    return sub
