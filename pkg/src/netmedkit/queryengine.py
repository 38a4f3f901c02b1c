"""Schema-constrained question answering over the knowledge graph.

A question becomes an ordered list of typed entity slots (edges deliberately
dropped); slots that carry a user value are matched to graph nodes by
trigram-cosine similarity; consecutive slots are joined back together along
the unique shortest path in the schema meta-graph; the resulting pattern is
executed exactly against the in-memory store and also rendered as Cypher
text for transparency. Failures consume a retry budget, after which a
graph-grounded passage fallback answers instead.
"""

from __future__ import annotations

import json
import math
import re
from collections import Counter, deque
from dataclasses import dataclass

from .errors import (AmbiguousPath, MalformedDecomposition, NoCandidates,
                     NoSchemaPath)
from .kgstore import KnowledgeGraph, SchemaDescriptor
from .provider import ChatMessage


@dataclass
class QuestionNode:
    node_type: str
    value: str = ""
    subquestion: str = ""
    needs_filter: bool = False


@dataclass
class QuestionList:
    nodes: list[QuestionNode]
    target: int  # index of the node whose bindings answer the question

    def __post_init__(self):
        if not self.nodes:
            raise MalformedDecomposition("empty question list")
        if not 0 <= self.target < len(self.nodes):
            raise MalformedDecomposition(f"target index {self.target} out of range")


@dataclass
class MatchCandidate:
    node_id: str
    similarity: float


@dataclass
class EngineConfig:
    top_n: int = 5
    retries: int = 3
    similarity_floor: float = 0.25

    def __post_init__(self):
        if self.top_n < 1 or self.retries < 1:
            raise ValueError("top_n and retries must be >= 1")


@dataclass
class PatternNode:
    var: str
    node_type: str
    filter_ids: list[str] | None = None


@dataclass
class Join:
    var_a: str
    edge_path: list[str]            # edge types, in order
    via_types: list[str]            # intermediate node types (len = len(edge_path)-1)
    var_b: str


@dataclass
class CompiledQuery:
    pattern: list[PatternNode]
    joins: list[Join]
    text: str
    return_var: str


@dataclass
class QueryResult:
    bindings: list[dict]
    compiled: CompiledQuery
    retries_used: int


@dataclass
class FallbackSummary:
    passages: list[tuple[str, str]]  # (source node id, rendered text)
    condensed: str
    retries_used: int = 0


# --- embedding ------------------------------------------------------------

def embed_text(text: str) -> dict[str, float]:
    """L2-normalized character-trigram term-frequency vector (lowercased)."""
    t = text.lower()
    grams = Counter(t[i:i + 3] for i in range(len(t) - 2))
    if not grams:
        return {}
    norm = math.sqrt(sum(c * c for c in grams.values()))
    return {g: c / norm for g, c in grams.items()}


def cosine(a: dict[str, float], b: dict[str, float]) -> float:
    if len(b) < len(a):
        a, b = b, a
    return sum(w * b.get(g, 0.0) for g, w in a.items())


# --- decomposition --------------------------------------------------------

DECOMPOSE_INSTRUCTIONS = """\
Break the user question into an ordered list of knowledge-graph entity slots.
Allowed node types: {types}.
Reply with JSON only:
{{"nodes": [{{"type": "...", "value": "...", "subquestion": "...", "needs_filter": true|false}}, ...],
  "target": <index of the slot that answers the question>}}
Set needs_filter=true and fill value only when the user names a concrete entity.
Do not include edges; they are reconstructed from the graph schema."""


def decompose_question(text: str, schema: SchemaDescriptor, provider,
                       feedback: str = "") -> QuestionList:
    """One provider call producing a validated QuestionList.

    Validation failures raise MalformedDecomposition; the caller owns retry
    accounting and feeds the failure reason back through `feedback`.
    """
    if not text:
        raise ValueError("empty question")
    system = DECOMPOSE_INSTRUCTIONS.format(types=", ".join(schema.node_types))
    user = text if not feedback else f"{text}\n\nPrevious attempt failed: {feedback}"
    reply = provider.complete([ChatMessage("system", system),
                               ChatMessage("user", user)])
    return parse_decomposition(reply.content, schema)


def parse_decomposition(raw: str, schema: SchemaDescriptor) -> QuestionList:
    try:
        payload = json.loads(_extract_json(raw))
    except (json.JSONDecodeError, ValueError) as exc:
        raise MalformedDecomposition(f"response is not JSON: {exc}") from exc
    try:
        nodes = [QuestionNode(node_type=n["type"], value=n.get("value", ""),
                              subquestion=n.get("subquestion", ""),
                              needs_filter=bool(n.get("needs_filter", False)))
                 for n in payload["nodes"]]
    except (KeyError, TypeError) as exc:
        raise MalformedDecomposition(f"bad node entry: {exc}") from exc
    for n in nodes:
        if n.node_type not in schema.node_types:
            raise MalformedDecomposition(f"unknown node type {n.node_type!r}")
        if n.needs_filter and not n.value:
            raise MalformedDecomposition(f"filter node of type {n.node_type} lacks a value")
    target = payload.get("target")
    if target is None:
        # convention: the last unfiltered slot answers the question
        unfiltered = [i for i, n in enumerate(nodes) if not n.needs_filter]
        target = unfiltered[-1] if unfiltered else len(nodes) - 1
    return QuestionList(nodes=nodes, target=int(target))


def _extract_json(raw: str) -> str:
    start = raw.find("{")
    end = raw.rfind("}")
    if start < 0 or end <= start:
        raise ValueError("no JSON object in response")
    return raw[start:end + 1]


# --- candidate matching ---------------------------------------------------

def match_candidates(qnode: QuestionNode, graph: KnowledgeGraph,
                     config: EngineConfig | None = None) -> list[MatchCandidate]:
    """Top-N graph nodes of the slot's type by trigram cosine to its value."""
    config = config or EngineConfig()
    if not qnode.needs_filter:
        raise ValueError("match_candidates requires a filter slot")
    query_vec = embed_text(f"{qnode.value} {qnode.subquestion}".strip())
    scored = []
    for nid in graph.nodes_of_type(qnode.node_type):
        rec = graph.nodes[nid]
        sim = max((cosine(query_vec, embed_text(name))
                   for name in [rec.display_name, *rec.synonyms]), default=0.0)
        if sim > config.similarity_floor:
            scored.append(MatchCandidate(nid, sim))
    scored.sort(key=lambda c: (-c.similarity, c.node_id))
    if not scored:
        raise NoCandidates(f"no {qnode.node_type} node matches {qnode.value!r}")
    return scored[:config.top_n]


# --- schema paths ---------------------------------------------------------

def shortest_schema_path(schema: SchemaDescriptor, type_a: str,
                         type_b: str) -> tuple[list[str], list[str]]:
    """Unique shortest edge-type path between two node types.

    Returns (edge types, intermediate node types). Two distinct shortest
    paths raise AmbiguousPath; none raises NoSchemaPath. Identical endpoint
    types still need at least one edge.
    """
    adj: dict[str, list[tuple[str, str]]] = {}
    for et, st, tt in schema.edge_types:
        adj.setdefault(st, []).append((et, tt))
        if st != tt:
            adj.setdefault(tt, []).append((et, st))
    # BFS over (type) with all shortest edge-sequences tracked
    paths: list[tuple[list[str], list[str]]] = []
    queue = deque([(type_a, [], [])])
    best_len: int | None = None
    seen_depth: dict[str, int] = {}
    while queue:
        cur, edges, vias = queue.popleft()
        if best_len is not None and len(edges) > best_len:
            break
        if cur == type_b and edges:
            best_len = len(edges)
            paths.append((edges, vias[:-1] if vias else []))
            continue
        depth = len(edges)
        if seen_depth.get(cur, depth) < depth:
            continue
        seen_depth[cur] = depth
        for et, nxt in sorted(adj.get(cur, [])):
            queue.append((nxt, edges + [et], vias + [nxt]))
    if not paths:
        raise NoSchemaPath(f"no schema path {type_a} -> {type_b}")
    distinct = {tuple(p[0]) for p in paths}
    if len(distinct) > 1 or len(paths) > 1:
        raise AmbiguousPath(f"{len(paths)} shortest schema paths {type_a} -> {type_b}")
    return paths[0]


# --- compilation ----------------------------------------------------------

def compile_query(qlist: QuestionList, candidates: dict[int, list[MatchCandidate]],
                  schema: SchemaDescriptor) -> CompiledQuery:
    """Join consecutive slots along unique shortest schema paths.

    Filter slots are constrained to their candidate id sets. Rendering is
    deterministic: identical inputs give byte-identical text.
    """
    pattern: list[PatternNode] = []
    for i, qn in enumerate(qlist.nodes):
        ids = None
        if qn.needs_filter:
            if i not in candidates:
                raise ValueError(f"filter slot {i} has no candidates")
            ids = sorted(c.node_id for c in candidates[i])
        pattern.append(PatternNode(var=f"v{i}", node_type=qn.node_type, filter_ids=ids))
    joins: list[Join] = []
    for a, b in zip(pattern, pattern[1:]):
        edge_path, via_types = shortest_schema_path(schema, a.node_type, b.node_type)
        joins.append(Join(var_a=a.var, edge_path=edge_path, via_types=via_types,
                          var_b=b.var))
    return_var = pattern[qlist.target].var
    return CompiledQuery(pattern=pattern, joins=joins,
                         text=_render(pattern, joins, return_var),
                         return_var=return_var)


def _render(pattern: list[PatternNode], joins: list[Join], return_var: str) -> str:
    by_var = {p.var: p for p in pattern}
    if not joins:
        match_parts = [f"({p.var}:{p.node_type})" for p in pattern]
    else:
        match_parts = []
        hop = 0
        for j in joins:
            a, b = by_var[j.var_a], by_var[j.var_b]
            seg = f"({a.var}:{a.node_type})"
            for step, et in enumerate(j.edge_path):
                if step < len(j.via_types):
                    seg += f"-[:{et}]-(h{hop}:{j.via_types[step]})"
                    hop += 1
                else:
                    seg += f"-[:{et}]-({b.var}:{b.node_type})"
            match_parts.append(seg)
    where = []
    for p in pattern:
        if p.filter_ids is not None:
            ids = ", ".join(f'"{i}"' for i in p.filter_ids)
            where.append(f"{p.var}.id IN [{ids}]")
    text = "MATCH " + ", ".join(match_parts)
    if where:
        text += " WHERE " + " AND ".join(where)
    text += f" RETURN {return_var}"
    return text


# --- execution ------------------------------------------------------------

def _candidate_set(graph: KnowledgeGraph, p: PatternNode) -> set[str]:
    nodes = set(graph.nodes_of_type(p.node_type))
    if p.filter_ids is not None:
        nodes &= set(p.filter_ids)
    return nodes


def _step(graph: KnowledgeGraph, frontier: set[str], edge_type: str,
          target_type: str) -> set[str]:
    out: set[str] = set()
    for nid in frontier:
        for nbr in graph.neighbors(nid, edge_type):
            if graph.nodes[nbr].node_type == target_type:
                out.add(nbr)
    return out


def _join_pairs(graph: KnowledgeGraph, sources: set[str], join: Join,
                target_type: str, targets: set[str]) -> set[tuple[str, str]]:
    pairs: set[tuple[str, str]] = set()
    types = join.via_types + [target_type]
    for src in sources:
        frontier = {src}
        for et, tt in zip(join.edge_path, types):
            frontier = _step(graph, frontier, et, tt)
            if not frontier:
                break
        for tgt in frontier & targets:
            pairs.add((src, tgt))
    return pairs


def execute_query(q: CompiledQuery, graph: KnowledgeGraph) -> list[dict]:
    """Exact chain pattern matching; bindings of the return variable, sorted.

    A node binds the return variable iff some assignment of every pattern
    variable satisfies all joins and filters (forward/backward semijoin over
    the chain — exact for chain-shaped patterns).
    """
    sets = [_candidate_set(graph, p) for p in q.pattern]
    n = len(sets)
    pairs = []
    for i, join in enumerate(q.joins):
        pairs.append(_join_pairs(graph, sets[i], join,
                                 q.pattern[i + 1].node_type, sets[i + 1]))
    forward = [set(sets[0])]
    for pr in pairs:
        prev = forward[-1]
        forward.append({b for a, b in pr if a in prev})
    backward = [set(sets[-1])]
    for pr in reversed(pairs):
        nxt = backward[0]
        backward.insert(0, {a for a, b in pr if b in nxt})
    target_idx = next(i for i, p in enumerate(q.pattern) if p.var == q.return_var)
    viable = forward[target_idx] & backward[target_idx] if n > 1 else forward[0]
    out = []
    for nid in sorted(viable):
        rec = graph.nodes[nid]
        out.append({"id": nid, "name": rec.display_name, "type": rec.node_type})
    return out


# --- retry loop and fallback ---------------------------------------------

FALLBACK_INSTRUCTIONS = """\
Answer the question strictly from the passages below. If they do not
contain the answer, say so. Do not invent entities."""


def answer_with_retries(text: str, graph: KnowledgeGraph, provider,
                        config: EngineConfig | None = None):
    """decompose -> match -> compile -> execute, with a bounded retry loop.

    Any stage failure consumes one retry and its reason is fed back to the
    provider. After the budget is spent, a passage-based fallback answers
    from condensed graph context instead. Provider transport errors surface.
    """
    config = config or EngineConfig()
    feedback = ""
    for attempt in range(config.retries):
        try:
            qlist = decompose_question(text, graph.schema, provider, feedback)
            cands = {i: match_candidates(qn, graph, config)
                     for i, qn in enumerate(qlist.nodes) if qn.needs_filter}
            compiled = compile_query(qlist, cands, graph.schema)
            bindings = execute_query(compiled, graph)
            return QueryResult(bindings=bindings, compiled=compiled,
                               retries_used=attempt)
        except (MalformedDecomposition, NoCandidates, AmbiguousPath,
                NoSchemaPath) as exc:
            feedback = str(exc)
    return build_fallback(text, graph, provider, config,
                          retries_used=config.retries)


def build_fallback(text: str, graph: KnowledgeGraph, provider,
                   config: EngineConfig | None = None,
                   retries_used: int = 0) -> FallbackSummary:
    """Graph-grounded passage retrieval for questions the compiler lost."""
    config = config or EngineConfig()
    qvec = embed_text(text)
    scored = []
    for nid in sorted(graph.nodes):
        rec = graph.nodes[nid]
        sim = max((cosine(qvec, embed_text(name))
                   for name in [rec.display_name, *rec.synonyms]), default=0.0)
        scored.append((-sim, nid))
    scored.sort()
    passages = []
    for _, nid in scored[:config.top_n]:
        passages.append((nid, render_passage(graph, nid)))
    prompt = FALLBACK_INSTRUCTIONS + "\n\n" + "\n".join(p for _, p in passages)
    reply = provider.complete([ChatMessage("system", prompt),
                               ChatMessage("user", text)])
    return FallbackSummary(passages=passages, condensed=reply.content,
                           retries_used=retries_used)


def render_passage(graph: KnowledgeGraph, node_id: str, max_neighbors: int = 8) -> str:
    rec = graph.node(node_id)
    parts = [f"{rec.display_name} ({rec.node_type}, {rec.id})"]
    nbrs = graph.neighbors(node_id)[:max_neighbors]
    if nbrs:
        named = ", ".join(f"{graph.nodes[n].display_name} [{graph.nodes[n].node_type}]"
                          for n in nbrs)
        parts.append(f"connected to: {named}")
    return ". ".join(parts)
