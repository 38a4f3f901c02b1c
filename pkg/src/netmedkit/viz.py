"""Network visualization payloads with a fixed group legend.

The payload format (nodes with group labels, plain edges, a legend mapping
groups to styles) matches what network-explorer front-ends consume. Restyle
instructions touch legend and visibility only; topology never changes.
"""

from __future__ import annotations

import copy
import hashlib
import json
import re

from .kgstore import KnowledgeGraph
from .netmed import DiseaseModule, RankedDrugList

GROUPS = ("seed", "diamond_node", "drug", "disorder", "gene", "protein")

DEFAULT_LEGEND = {
    "seed": {"color": "#f5a623", "shape": "star"},
    "diamond_node": {"color": "#4a90d9", "shape": "diamond"},
    "drug": {"color": "#7ed321", "shape": "diamond"},
    "disorder": {"color": "#d0021b", "shape": "triangle"},
    "gene": {"color": "#9b9b9b", "shape": "circle"},
    "protein": {"color": "#bd10e0", "shape": "circle"},
}

_COLOR_WORDS = ("red", "green", "blue", "orange", "purple", "yellow", "black",
                "white", "gray", "grey", "pink", "brown", "cyan")


def build_network_payload(graph: KnowledgeGraph, module: DiseaseModule,
                          ranking: RankedDrugList | None = None,
                          max_drugs: int = 10) -> dict:
    """Module (seeds + added) plus optionally its top-ranked drugs."""
    groups: dict[str, str] = {}
    for nid in module.seeds.ids:
        groups[nid] = "seed"
    for step in module.added:
        groups[step.id] = "diamond_node"
    if ranking is not None:
        for nid, score in ranking.entries[:max_drugs]:
            if score > 0 and nid not in groups:
                groups[nid] = "drug"
    nodes = []
    for nid in groups:
        rec = graph.node(nid)
        nodes.append({"id": nid, "label": rec.display_name, "group": groups[nid]})
    nodes.sort(key=lambda n: n["id"])
    keep = set(groups)
    edges = [{"from": e.source, "to": e.target}
             for e in graph.edges() if e.source in keep and e.target in keep]
    return {"nodes": nodes, "edges": edges,
            "legend": copy.deepcopy(DEFAULT_LEGEND)}


def topology_hash(payload: dict) -> str:
    topo = {"nodes": sorted(n["id"] for n in payload["nodes"]),
            "edges": sorted((e["from"], e["to"]) for e in payload["edges"])}
    return hashlib.sha256(json.dumps(topo, sort_keys=True).encode()).hexdigest()


def validate_payload(payload: dict) -> None:
    ids = {n["id"] for n in payload["nodes"]}
    for n in payload["nodes"]:
        if n["group"] not in GROUPS:
            raise ValueError(f"unknown group {n['group']!r}")
    for e in payload["edges"]:
        if e["from"] not in ids or e["to"] not in ids:
            raise ValueError(f"edge endpoint missing: {e}")


def restyle_payload(payload: dict, instruction: str, provider=None) -> dict:
    """Apply a natural-language restyle instruction; style/visibility only.

    Deterministic keyword rules cover the common cases (color names, hiding
    groups, grouping by type); a provider can map richer phrasings onto the
    same rule vocabulary but can never alter topology.
    """
    out = copy.deepcopy(payload)
    text = instruction.strip().lower()
    if not text:
        return out
    if provider is not None:
        text = _normalize_with_provider(text, provider)
    hidden = set()
    for group in GROUPS:
        label = group.replace("_", " ")
        if re.search(rf"\b(hide|remove|drop)\b.*\b{label}s?\b", text):
            hidden.add(group)
    if hidden:
        keep_nodes = [n for n in out["nodes"] if n["group"] not in hidden]
        keep_ids = {n["id"] for n in keep_nodes}
        out["nodes"] = keep_nodes
        out["edges"] = [e for e in out["edges"]
                        if e["from"] in keep_ids and e["to"] in keep_ids]
        for g in hidden:
            out["legend"].setdefault(g, {})["hidden"] = True
    for color in _COLOR_WORDS:
        if color in text.split():
            for group in GROUPS:
                label = group.replace("_", " ")
                if re.search(rf"\b{label}s?\b", text):
                    out["legend"].setdefault(group, {})["color"] = color
    if "group by type" in text:
        out["legend"]["layout"] = {"mode": "grouped"}
    return out


RESTYLE_PROMPT = """\
Rewrite the styling instruction using only this vocabulary: "hide <group>s",
"make <group>s <color>", "group by type". Groups: seed, diamond node, drug,
disorder, gene, protein. Reply with the rewritten instruction only."""


def _normalize_with_provider(text: str, provider) -> str:
    from .provider import ChatMessage
    try:
        reply = provider.complete([ChatMessage("system", RESTYLE_PROMPT),
                                   ChatMessage("user", text)])
        return reply.content.strip().lower() or text
    except Exception:
        return text
