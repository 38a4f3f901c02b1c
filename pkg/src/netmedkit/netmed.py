"""Network-medicine core: module expansion and drug prioritization.

Three graph tools operate on the immutable knowledge graph:
  - iterative disease-module expansion by hypergeometric connectivity
    significance (most significant candidate added per step),
  - damped trust propagation from seed nodes (personalized-PageRank style,
    undirected walk, uniform seed prior),
  - seed-relative closeness scoring over breadth-first distances.

All functions are pure in (graph, params) and deterministic.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

from .errors import DomainError, EmptySeeds, SeedNotInGraph
from .kgstore import KnowledgeGraph, translate_identifiers


@dataclass
class SeedSet:
    ids: list[str]
    entity_kind: str = "gene"  # gene | protein

    def __post_init__(self):
        # ordered, deduplicated
        seen = set()
        ordered = []
        for nid in self.ids:
            if nid not in seen:
                seen.add(nid)
                ordered.append(nid)
        self.ids = ordered


@dataclass
class DiamondParams:
    n_added: int = 10
    edge_type: str = "ppi"

    def __post_init__(self):
        if self.n_added < 0:
            raise DomainError("n_added must be >= 0")


@dataclass
class DiamondStep:
    id: str
    iteration: int
    p_value: float
    k: int       # links into the module at time of addition
    degree: int  # degree in the expansion network


@dataclass
class DiseaseModule:
    seeds: SeedSet
    added: list[DiamondStep] = field(default_factory=list)
    exhausted: bool = False  # ran out of connected candidates before n_added

    def node_ids(self) -> list[str]:
        return list(self.seeds.ids) + [s.id for s in self.added]

    def to_json(self) -> dict:
        return {
            "seeds": list(self.seeds.ids),
            "added": [{"id": s.id, "iter": s.iteration, "p": s.p_value,
                       "k": s.k, "degree": s.degree} for s in self.added],
            "exhausted": self.exhausted,
        }


@dataclass
class TrustRankParams:
    damping: float = 0.85
    max_iter: int = 200
    tol: float = 1e-10

    def __post_init__(self):
        if not 0.0 < self.damping < 1.0:
            raise DomainError("damping must be in (0,1)")
        if self.tol <= 0 or self.max_iter < 1:
            raise DomainError("tol must be > 0 and max_iter >= 1")


@dataclass
class RankedDrugList:
    entries: list[tuple[str, float]]
    method: str  # trustrank | closeness
    empty_marker: bool = False  # graph had no drug nodes

    def to_json(self) -> dict:
        return {"method": self.method,
                "entries": [{"id": i, "score": s} for i, s in self.entries]}


def hypergeometric_tail(k: int, s: int, d: int, N: int) -> float:
    """P(X >= k) for X ~ Hypergeometric(population N, successes s, draws d).

    Computed in log space (lgamma) so large populations don't overflow.
    """
    if not (0 <= k <= min(s, d)) or d > N or s > N or s < 0 or d < 0 or N < 0:
        raise DomainError(f"invalid hypergeometric bounds k={k} s={s} d={d} N={N}")
    if k == 0:
        return 1.0
    log_denom = _log_choose(N, d)
    log_terms = []
    for i in range(k, min(s, d) + 1):
        if d - i > N - s:
            continue  # zero-probability term
        log_terms.append(_log_choose(s, i) + _log_choose(N - s, d - i) - log_denom)
    if not log_terms:
        return 0.0
    m = max(log_terms)
    total = m + math.log(sum(math.exp(t - m) for t in log_terms))
    return min(1.0, math.exp(total))


def _log_choose(n: int, r: int) -> float:
    return math.lgamma(n + 1) - math.lgamma(r + 1) - math.lgamma(n - r + 1)


def _check_seeds(graph: KnowledgeGraph, seeds: SeedSet):
    if not seeds.ids:
        raise EmptySeeds("seed set is empty")
    for nid in seeds.ids:
        if nid not in graph.nodes:
            raise SeedNotInGraph(nid)


def diamond_expand(graph: KnowledgeGraph, seeds: SeedSet,
                   params: DiamondParams | None = None) -> DiseaseModule:
    """Grow a disease module one node per iteration.

    Every node outside the module with at least one link into it is a
    candidate; the one whose link count is least likely under the
    hypergeometric null (lowest tail probability) joins the module. Ties
    break by larger link count k, then lexicographic id. Stops early with
    the exhausted flag once no candidate touches the module.
    """
    params = params or DiamondParams()
    _check_seeds(graph, seeds)
    N = len(graph.nodes)

    module = set(seeds.ids)
    # links into the module per outside node, maintained incrementally
    k_of: dict[str, int] = {}
    for m in module:
        for nbr in graph.neighbors(m, params.edge_type):
            if nbr not in module:
                k_of[nbr] = k_of.get(nbr, 0) + 1

    result = DiseaseModule(seeds=seeds)
    for it in range(1, params.n_added + 1):
        if not k_of:
            result.exhausted = True
            break
        s = len(module)
        best = None
        for cand, k in k_of.items():
            deg = graph.degree(cand, params.edge_type)
            p = hypergeometric_tail(k, s, deg, N)
            key = (p, -k, cand)
            if best is None or key < best[0]:
                best = (key, cand, p, k, deg)
        _, chosen, p, k, deg = best
        result.added.append(DiamondStep(chosen, it, p, k, deg))
        module.add(chosen)
        del k_of[chosen]
        for nbr in graph.neighbors(chosen, params.edge_type):
            if nbr not in module:
                k_of[nbr] = k_of.get(nbr, 0) + 1
    return result


def trustrank(graph: KnowledgeGraph, seeds: SeedSet,
              params: TrustRankParams | None = None,
              edge_type: str | None = None) -> tuple[dict[str, float], bool]:
    """Damped propagation t <- (1-a)*d + a*W^T t on the undirected walk.

    d is uniform over seeds; nodes without neighbors hand their mass back to
    d, so scores always sum to 1. Returns (scores, converged). Nodes
    unreachable from every seed score exactly 0.
    """
    params = params or TrustRankParams()
    _check_seeds(graph, seeds)
    ids = sorted(graph.nodes)
    d = {nid: 0.0 for nid in ids}
    for s in seeds.ids:
        d[s] = 1.0 / len(seeds.ids)

    t = dict(d)
    alpha = params.damping
    converged = False
    for _ in range(params.max_iter):
        nxt = {nid: 0.0 for nid in ids}
        dangling = 0.0
        for nid in ids:
            mass = t[nid]
            if mass == 0.0:
                continue
            nbrs = graph.neighbors(nid, edge_type)
            if not nbrs:
                dangling += mass
            else:
                share = mass / len(nbrs)
                for nbr in nbrs:
                    nxt[nbr] += share
        for nid in ids:
            nxt[nid] = (1 - alpha) * d[nid] + alpha * (nxt[nid] + dangling * d[nid])
        delta = sum(abs(nxt[nid] - t[nid]) for nid in ids)
        t = nxt
        if delta < params.tol:
            converged = True
            break
    return t, converged


def bfs_distances(graph: KnowledgeGraph, start: str,
                  edge_type: str | None = None) -> dict[str, int]:
    dist = {start: 0}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        for nbr in graph.neighbors(cur, edge_type):
            if nbr not in dist:
                dist[nbr] = dist[cur] + 1
                queue.append(nbr)
    return dist


def closeness_scores(graph: KnowledgeGraph, candidates, seeds: SeedSet,
                     edge_type: str | None = None,
                     whole_graph: bool = False) -> dict[str, float]:
    """score(c) = sum over reachable seeds s of 1/dist(c, s).

    A candidate that is itself a seed counts only the other seeds. With
    whole_graph=True the sum runs over all other nodes instead (harmonic
    closeness over the full graph).
    """
    if not seeds.ids:
        raise EmptySeeds("seed set is empty")
    for nid in list(candidates) + list(seeds.ids):
        if nid not in graph.nodes:
            raise SeedNotInGraph(nid)
    # sorted target order keeps float accumulation reproducible
    targets = sorted(graph.nodes) if whole_graph else sorted(set(seeds.ids))
    out: dict[str, float] = {}
    for cand in sorted(candidates):
        dist = bfs_distances(graph, cand, edge_type)
        score = 0.0
        for t in targets:
            if t == cand:
                continue
            dt = dist.get(t)
            if dt:
                score += 1.0 / dt
        out[cand] = score
    return out


def rank_drugs(graph: KnowledgeGraph, module: DiseaseModule, method: str,
               params: TrustRankParams | None = None,
               top_k: int | None = None,
               drug_type: str = "drug",
               protein_type: str = "protein",
               translate_edge: str = "encodes") -> RankedDrugList:
    """Score drug nodes against the module with the chosen scorer.

    Module members are translated onto the protein layer when they encode
    proteins (gene seeds stay usable on gene-only graphs). Output holds only
    drug-type nodes, sorted by score descending then id.
    """
    if method not in ("trustrank", "closeness"):
        raise DomainError(f"unknown ranking method {method!r}")
    seed_ids = _module_on_protein_layer(graph, module, protein_type, translate_edge)
    seeds = SeedSet(seed_ids, entity_kind=protein_type)
    drugs = graph.nodes_of_type(drug_type)
    if not drugs:
        return RankedDrugList(entries=[], method=method, empty_marker=True)

    if method == "trustrank":
        scores, _ = trustrank(graph, seeds, params)
        entries = [(d, scores.get(d, 0.0)) for d in drugs]
    else:
        scores = closeness_scores(graph, drugs, seeds)
        entries = [(d, scores[d]) for d in drugs]
    entries.sort(key=lambda e: (-e[1], e[0]))
    if top_k is not None:
        entries = entries[:top_k]
    return RankedDrugList(entries=entries, method=method)


def _module_on_protein_layer(graph, module, protein_type, translate_edge) -> list[str]:
    ids = module.node_ids()
    if protein_type not in graph.schema.node_types:
        return ids
    mapping = translate_identifiers(graph, ids, protein_type, translate_edge)
    out = []
    for nid in ids:
        hits = mapping.get(nid, [])
        out.extend(hits if hits else [nid])
    return list(dict.fromkeys(out))
