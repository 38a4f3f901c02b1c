"""Default agent handlers binding the orchestrator to the analysis tools.

The Workbench owns the loaded graph, annotation map, provider, and
literature backend, and exposes one handler per planner action. Handlers
are stateless over (session state, user text); everything they learn lands
in the session state as digests, tool-call records, and artifacts.
"""

from __future__ import annotations

import re
import time

from .coherence import AnnotationMap, empirical_pvalue
from .errors import NetmedError
from .kgstore import KnowledgeGraph, translate_identifiers
from .netmed import (DiamondParams, DiseaseModule, SeedSet, TrustRankParams,
                     diamond_expand, rank_drugs)
from .orchestrator import AgentResult, SessionState, ToolCallRecord, summarize_memory
from .queryengine import EngineConfig, FallbackSummary, answer_with_retries
from .research import decompose_research_query, search_literature
from .viz import build_network_payload, restyle_payload, validate_payload

_TOKEN_RE = re.compile(r"[A-Za-z0-9][A-Za-z0-9.\-]+")


class Workbench:
    def __init__(self, graph: KnowledgeGraph, annotations: AnnotationMap,
                 provider, search_backend=None,
                 engine_config: EngineConfig | None = None,
                 coherence_samples: int = 200, coherence_seed: int = 42):
        self.graph = graph
        self.annotations = annotations
        self.provider = provider
        self.search_backend = search_backend
        self.engine_config = engine_config or EngineConfig()
        self.coherence_samples = coherence_samples
        self.coherence_seed = coherence_seed

    def registry(self) -> dict:
        return {
            "SUMMARY": self.handle_summary,
            "FETCH_KG": self.handle_fetch_kg,
            "CALL_NEDREX_TOOL": self.handle_nedrex_tool,
            "CALL_DIGEST_TOOL": self.handle_digest_tool,
            "FETCH_RESEARCH": self.handle_research,
            "ADJUST_NETWORK": self.handle_adjust_network,
        }

    # --- entity resolution helpers ---

    def resolve_symbols(self, text: str, node_types=("gene", "protein")) -> list[str]:
        """Map surface tokens onto graph node ids by name/synonym/id match."""
        by_name: dict[str, str] = {}
        for nid, rec in self.graph.nodes.items():
            if rec.node_type not in node_types:
                continue
            by_name.setdefault(rec.display_name.lower(), nid)
            by_name.setdefault(nid.lower(), nid)
            for syn in rec.synonyms:
                by_name.setdefault(syn.lower(), nid)
        found = []
        for tok in _TOKEN_RE.findall(text):
            nid = by_name.get(tok.lower())
            if nid and nid not in found:
                found.append(nid)
        return found

    def _module_seeds(self, gene_ids: list[str]) -> SeedSet:
        """Gene ids onto the protein interaction layer when one exists."""
        if "protein" in self.graph.schema.node_types:
            mapping = translate_identifiers(self.graph, gene_ids, "protein")
            proteins = []
            for gid in gene_ids:
                proteins.extend(mapping.get(gid, []) or [gid])
            if proteins:
                return SeedSet(list(dict.fromkeys(proteins)), entity_kind="protein")
        return SeedSet(gene_ids, entity_kind="gene")

    # --- handlers ---

    def handle_summary(self, state: SessionState, user_text: str) -> AgentResult:
        before = len(state.transcript)
        summarize_memory(state, self.provider, token_threshold=0)
        return AgentResult(
            digest=f"compacted transcript ({before} -> {len(state.transcript)} messages)")

    def handle_fetch_kg(self, state: SessionState, user_text: str) -> AgentResult:
        start = time.monotonic()
        result = answer_with_retries(user_text, self.graph, self.provider,
                                     self.engine_config)
        duration = time.monotonic() - start
        if isinstance(result, FallbackSummary):
            digest = f"KG query fell back to passage retrieval: {result.condensed}"
            args = {"question": user_text, "mode": "fallback"}
        else:
            names = ", ".join(b["name"] for b in result.bindings[:15]) or "(no hits)"
            digest = (f"KG query returned {len(result.bindings)} "
                      f"{_target_type(result)} nodes: {names}")
            args = {"question": user_text, "cypher": result.compiled.text}
            state.add_artifact({"kind": "kg_result",
                               "bindings": result.bindings,
                               "cypher": result.compiled.text}, "kg")
        rec = ToolCallRecord(tool="NEDREX_KG", arguments=args, outcome="ok",
                             duration=duration, digest=digest)
        return AgentResult(digest=digest, tool_calls=[rec])

    def handle_nedrex_tool(self, state: SessionState, user_text: str) -> AgentResult:
        seeds_genes = self.resolve_symbols(user_text, node_types=("gene",))
        if not seeds_genes:
            seeds_genes = self._seeds_from_artifacts(state)
        if not seeds_genes:
            raise NetmedError("no seed genes found in request or session state")
        lowered = user_text.lower()
        method = ("closeness" if "closeness" in lowered
                  else "trustrank" if "trustrank" in lowered or "rank" in lowered
                  else "diamond")
        seeds = self._module_seeds(seeds_genes)

        calls = [ToolCallRecord(
            tool="NEDREX", arguments={"symbols": seeds_genes}, outcome="ok",
            duration=0.0, digest=f"resolved {len(seeds_genes)} seed genes")]
        events = []
        if method == "diamond":
            start = time.monotonic()
            module = diamond_expand(self.graph, seeds, DiamondParams(n_added=10))
            duration = time.monotonic() - start
            payload = build_network_payload(self.graph, module)
            validate_payload(payload)
            aid = state.add_artifact({"kind": "module", "module": module.to_json(),
                                      "network": payload}, "analysis")
            digest = (f"DIAMOnD added {len(module.added)} nodes to "
                      f"{len(seeds.ids)} seeds: "
                      + ", ".join(s.id for s in module.added))
            calls.append(ToolCallRecord(
                tool="NEDREX_TOOL",
                arguments={"algorithm": "diamond", "seeds": seeds.ids},
                outcome="ok", duration=duration, digest=digest))
            events.append({"type": "network", "analysis_id": aid})
        else:
            module = DiseaseModule(seeds=seeds)
            start = time.monotonic()
            ranking = rank_drugs(self.graph, module, method, TrustRankParams())
            duration = time.monotonic() - start
            top = ranking.entries[:10]
            digest = (f"{method} ranked {len(ranking.entries)} drugs; top: "
                      + ", ".join(f"{self.graph.node(d).display_name} ({s:.4g})"
                                  for d, s in top))
            payload = build_network_payload(self.graph, module, ranking)
            validate_payload(payload)
            aid = state.add_artifact({"kind": "ranking", "ranking": ranking.to_json(),
                                      "network": payload}, "analysis")
            calls.append(ToolCallRecord(
                tool="NEDREX_TOOL",
                arguments={"algorithm": method, "seeds": seeds.ids},
                outcome="ok", duration=duration, digest=digest))
            events.append({"type": "network", "analysis_id": aid})
        return AgentResult(digest=digest, tool_calls=calls, events=events)

    def handle_digest_tool(self, state: SessionState, user_text: str) -> AgentResult:
        genes = [t for t in _TOKEN_RE.findall(user_text)
                 if t in self.annotations.background]
        if not genes:
            genes = self._genes_from_artifacts(state)
        if not genes:
            raise NetmedError("no annotatable genes found for coherence analysis")
        start = time.monotonic()
        result = empirical_pvalue(genes, self.annotations,
                                  samples=self.coherence_samples,
                                  rng_seed=self.coherence_seed)
        duration = time.monotonic() - start
        top_terms = ", ".join(
            f"{t.name} ({t.term}) with {t.k} of {t.n} genes, p={t.p:.3g}"
            for t in result.per_term[:4])
        digest = (f"functional coherence {result.score:.3f}, empirical "
                  f"p={result.empirical_p:.4g} over {result.samples_used} samples; "
                  f"enriched: {top_terms}")
        state.add_artifact({"kind": "coherence", "result": result.to_json()},
                           "coherence")
        rec = ToolCallRecord(tool="DIGEST", arguments={"genes": genes},
                             outcome="ok", duration=duration, digest=digest)
        return AgentResult(digest=digest, tool_calls=[rec])

    def handle_research(self, state: SessionState, user_text: str) -> AgentResult:
        if self.search_backend is None:
            raise NetmedError("no literature backend configured")
        queries, degraded = decompose_research_query(user_text, self.provider)
        start = time.monotonic()
        report = search_literature(queries, self.search_backend,
                                   question=user_text)
        duration = time.monotonic() - start
        for rec in report.records:
            if rec.external_id not in state.literature_ids:
                state.literature_ids.append(rec.external_id)
        titles = "; ".join(f"{r.title} ({r.year})" for r in report.records[:5])
        digest = (f"literature search returned {len(report.records)} papers "
                  f"across 3 queries: {titles}")
        state.add_artifact({"kind": "literature", "report": report.to_json()},
                           "literature")
        calls = [ToolCallRecord(tool="SemanticScholar", arguments={"query": q},
                                outcome="error" if err else "ok",
                                duration=duration / 3,
                                digest=err or f"{count} results")
                 for q, count, err in zip(report.queries, report.per_query_counts,
                                          report.errors)]
        return AgentResult(digest=digest, tool_calls=calls)

    def handle_adjust_network(self, state: SessionState, user_text: str) -> AgentResult:
        target = None
        for aid in reversed(list(state.artifacts)):
            if "network" in state.artifacts[aid]:
                target = aid
                break
        if target is None:
            raise NetmedError("no network artifact to restyle")
        payload = restyle_payload(state.artifacts[target]["network"], user_text)
        validate_payload(payload)
        state.artifacts[target]["network"] = payload
        digest = f"restyled network {target}: {user_text.strip()}"
        rec = ToolCallRecord(tool="NETWORK", arguments={"instruction": user_text},
                             outcome="ok", duration=0.0, digest=digest)
        return AgentResult(digest=digest, tool_calls=[rec],
                           events=[{"type": "network", "analysis_id": target}])

    # --- artifact fallbacks ---

    def _seeds_from_artifacts(self, state: SessionState) -> list[str]:
        for art in reversed(list(state.artifacts.values())):
            if art.get("kind") == "kg_result":
                ids = [b["id"] for b in art["bindings"]
                       if b.get("type") == "gene"]
                if ids:
                    return ids
        return []

    def _genes_from_artifacts(self, state: SessionState) -> list[str]:
        for art in reversed(list(state.artifacts.values())):
            if art.get("kind") == "module":
                ids = (art["module"]["seeds"]
                       + [a["id"] for a in art["module"]["added"]])
                names = [self.graph.node(i).display_name for i in ids
                         if i in self.graph.nodes]
                genes = [n for n in names if n in self.annotations.background]
                if genes:
                    return genes
        return []


def _target_type(result) -> str:
    for p in result.compiled.pattern:
        if p.var == result.compiled.return_var:
            return p.node_type
    return "result"
