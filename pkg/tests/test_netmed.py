import math
import random
from fractions import Fraction

import numpy as np
import pytest

from netmedkit.errors import DomainError, EmptySeeds, SeedNotInGraph
from netmedkit.kgstore import (EdgeRecord, NodeRecord, SchemaDescriptor,
                               graph_from_records)
from netmedkit.netmed import (DiamondParams, DiseaseModule, SeedSet,
                              TrustRankParams, closeness_scores, diamond_expand,
                              hypergeometric_tail, rank_drugs, trustrank)

from conftest import ppi_graph, random_ppi_graph


# --- independent oracles --------------------------------------------------

def hypergeom_tail_exact(k, s, d, N):
    """Exact-factorial summation oracle, rational arithmetic."""
    total = Fraction(0)
    denom = math.comb(N, d)
    for i in range(k, min(s, d) + 1):
        total += Fraction(math.comb(s, i) * math.comb(N - s, d - i), denom)
    return total


def diamond_step_bruteforce(graph, module, edge_type="ppi"):
    """Best next node by full recomputation, documented tie-break."""
    N = len(graph.nodes)
    best = None
    for cand in graph.nodes:
        if cand in module:
            continue
        k = sum(1 for nbr in graph.neighbors(cand, edge_type) if nbr in module)
        if k == 0:
            continue
        deg = graph.degree(cand, edge_type)
        p = float(hypergeom_tail_exact(k, len(module), deg, N))
        key = (p, -k, cand)
        if best is None or key < best[0]:
            best = (key, cand)
    return None if best is None else best[1]


def trustrank_dense_oracle(graph, seeds, alpha=0.85, iters=5000):
    """Dense matrix power iteration with dangling mass back to the prior."""
    ids = sorted(graph.nodes)
    idx = {nid: i for i, nid in enumerate(ids)}
    n = len(ids)
    W = np.zeros((n, n))
    for nid in ids:
        nbrs = graph.neighbors(nid)
        for nbr in nbrs:
            W[idx[nbr], idx[nid]] = 1.0 / len(nbrs)
    d = np.zeros(n)
    for s in seeds:
        d[idx[s]] = 1.0 / len(seeds)
    dangle = np.array([1.0 if not graph.neighbors(nid) else 0.0 for nid in ids])
    t = d.copy()
    for _ in range(iters):
        nxt = (1 - alpha) * d + alpha * (W @ t + (dangle @ t) * d)
        if np.abs(nxt - t).sum() < 1e-15:
            t = nxt
            break
        t = nxt
    return {nid: t[idx[nid]] for nid in ids}


def closeness_bfs_oracle(graph, candidates, seeds):
    """All-pairs BFS recomputed from scratch with a plain dict/queue."""
    def bfs(src):
        dist = {src: 0}
        frontier = [src]
        while frontier:
            nxt = []
            for u in frontier:
                for v in graph.neighbors(u):
                    if v not in dist:
                        dist[v] = dist[u] + 1
                        nxt.append(v)
            frontier = nxt
        return dist

    out = {}
    for c in candidates:
        dist = bfs(c)
        total = 0.0
        for s in sorted(set(seeds)):
            if s != c and dist.get(s):
                total += 1.0 / dist[s]
        out[c] = total
    return out


# --- hypergeometric tail --------------------------------------------------

def test_tail_from_zero():
    assert hypergeometric_tail(0, 3, 2, 10) == 1.0


def test_tail_known_values():
    assert hypergeometric_tail(1, 2, 1, 5) == pytest.approx(0.4, abs=1e-12)
    assert hypergeometric_tail(2, 2, 2, 4) == pytest.approx(1 / 6, abs=1e-12)


def test_tail_bounds_checked():
    for bad in [(-1, 2, 2, 4), (3, 2, 2, 4), (1, 2, 5, 4), (1, 5, 2, 4)]:
        with pytest.raises(DomainError):
            hypergeometric_tail(*bad)


def test_tail_matches_exact_oracle_small_N():
    for N in (5, 17, 40, 60):
        for s in range(0, N + 1, max(1, N // 7)):
            for d in range(0, N + 1, max(1, N // 7)):
                for k in range(0, min(s, d) + 1):
                    expect = float(hypergeom_tail_exact(k, s, d, N))
                    got = hypergeometric_tail(k, s, d, N)
                    assert got == pytest.approx(expect, rel=1e-9, abs=1e-300)


def test_tail_large_population_no_overflow():
    p = hypergeometric_tail(50, 400, 300, 20000)
    assert 0.0 <= p <= 1.0


# --- DIAMOnD --------------------------------------------------------------

def test_diamond_zero_added():
    g = ppi_graph([("a", "b"), ("b", "c")])
    mod = diamond_expand(g, SeedSet(["a"]), DiamondParams(n_added=0))
    assert mod.node_ids() == ["a"]
    assert mod.added == [] and not mod.exhausted


def test_diamond_double_link_wins():
    # x touches both seeds; every other candidate touches one
    g = ppi_graph([("s1", "x"), ("s2", "x"), ("s1", "y"), ("s2", "z"),
                   ("x", "w"), ("y", "w"), ("z", "w")])
    seeds = SeedSet(["s1", "s2"])
    mod = diamond_expand(g, seeds, DiamondParams(n_added=1))
    assert mod.added[0].id == diamond_step_bruteforce(g, {"s1", "s2"}) == "x"
    assert mod.added[0].k == 2


def test_diamond_exhaustion_flag():
    g = ppi_graph([("s1", "a"), ("q", "r")])  # seeds' component has 1 candidate
    mod = diamond_expand(g, SeedSet(["s1"]), DiamondParams(n_added=5))
    assert [s.id for s in mod.added] == ["a"]
    assert mod.exhausted


def test_diamond_errors():
    g = ppi_graph([("a", "b")])
    with pytest.raises(EmptySeeds):
        diamond_expand(g, SeedSet([]), DiamondParams(1))
    with pytest.raises(SeedNotInGraph):
        diamond_expand(g, SeedSet(["zzz"]), DiamondParams(1))


def test_diamond_determinism():
    rng = random.Random(5)
    g = random_ppi_graph(rng, 30, 0.15)
    seeds = SeedSet(sorted(g.nodes)[:3])
    a = diamond_expand(g, seeds, DiamondParams(n_added=8))
    b = diamond_expand(g, seeds, DiamondParams(n_added=8))
    assert [s.id for s in a.added] == [s.id for s in b.added]


def test_diamond_stepwise_optimality_random():
    # brute-force comparison over all candidates at every iteration
    for trial in range(30):
        rng = random.Random(1000 + trial)
        g = random_ppi_graph(rng, rng.randrange(8, 40), 0.12)
        seeds = rng.sample(sorted(g.nodes), rng.randrange(1, 4))
        mod = diamond_expand(g, SeedSet(seeds), DiamondParams(n_added=6))
        module = set(seeds)
        for step in mod.added:
            assert step.id == diamond_step_bruteforce(g, module)
            module.add(step.id)


def test_diamond_records_consecutive():
    rng = random.Random(9)
    g = random_ppi_graph(rng, 25, 0.2)
    mod = diamond_expand(g, SeedSet(sorted(g.nodes)[:2]), DiamondParams(n_added=5))
    assert [s.iteration for s in mod.added] == list(range(1, len(mod.added) + 1))
    assert len({s.id for s in mod.added}) == len(mod.added)


# --- TrustRank ------------------------------------------------------------

def test_trustrank_single_node():
    g = ppi_graph([], extra_nodes=["only"])
    scores, converged = trustrank(g, SeedSet(["only"]))
    assert scores == {"only": pytest.approx(1.0)}
    assert converged


def test_trustrank_path_matches_oracle():
    g = ppi_graph([("a", "b"), ("b", "c")])
    scores, _ = trustrank(g, SeedSet(["a"]))
    oracle = trustrank_dense_oracle(g, ["a"])
    for nid in g.nodes:
        assert scores[nid] == pytest.approx(oracle[nid], abs=1e-8)


def test_trustrank_unreachable_zero():
    g = ppi_graph([("a", "b"), ("z", "w")])
    scores, _ = trustrank(g, SeedSet(["a"]))
    assert scores["z"] == 0.0 and scores["w"] == 0.0


def test_trustrank_sum_and_nonneg_random():
    for trial in range(10):
        rng = random.Random(200 + trial)
        g = random_ppi_graph(rng, 40, 0.08, connected=False)
        seeds = rng.sample(sorted(g.nodes), 3)
        scores, _ = trustrank(g, SeedSet(seeds))
        assert sum(scores.values()) == pytest.approx(1.0, abs=1e-8)
        assert all(v >= 0 for v in scores.values())


def test_trustrank_params_validated():
    with pytest.raises(DomainError):
        TrustRankParams(damping=1.5)
    with pytest.raises(DomainError):
        TrustRankParams(tol=0)


# --- closeness ------------------------------------------------------------

def test_closeness_path_center():
    g = ppi_graph([("a", "b"), ("b", "c")])
    scores = closeness_scores(g, ["b"], SeedSet(["a", "c"]))
    assert scores["b"] == pytest.approx(2.0)


def test_closeness_disconnected_zero():
    g = ppi_graph([("a", "b"), ("z", "w")])
    scores = closeness_scores(g, ["z"], SeedSet(["a", "b"]))
    assert scores["z"] == 0.0


def test_closeness_star_center_beats_leaf():
    g = ppi_graph([("c", f"l{i}") for i in range(5)])
    scores = closeness_scores(g, ["c", "l0"], SeedSet([f"l{i}" for i in range(1, 5)]))
    assert scores["c"] > scores["l0"]


def test_closeness_matches_oracle_random():
    for trial in range(10):
        rng = random.Random(300 + trial)
        g = random_ppi_graph(rng, 60, 0.05, connected=False)
        ids = sorted(g.nodes)
        seeds = rng.sample(ids, 4)
        cands = rng.sample(ids, 10)
        got = closeness_scores(g, cands, SeedSet(seeds))
        assert got == closeness_bfs_oracle(g, cands, seeds)


def test_closeness_seed_candidate_skips_self():
    g = ppi_graph([("a", "b")])
    scores = closeness_scores(g, ["a"], SeedSet(["a", "b"]))
    assert scores["a"] == pytest.approx(1.0)


def test_closeness_whole_graph_mode():
    g = ppi_graph([("a", "b"), ("b", "c")])
    scores = closeness_scores(g, ["b"], SeedSet(["a"]), whole_graph=True)
    assert scores["b"] == pytest.approx(2.0)  # 1/1 to a + 1/1 to c


# --- rank_drugs -----------------------------------------------------------

DRUG_SCHEMA = SchemaDescriptor(
    node_types=["protein", "drug"],
    edge_types=[("ppi", "protein", "protein"), ("targets", "drug", "protein")])


def drug_graph(ppi_edges, target_edges, extra=()):
    prots = sorted({n for e in ppi_edges for n in e}
                   | {t for _, t in target_edges} | set(extra))
    drugs = sorted({d for d, _ in target_edges})
    nodes = [NodeRecord(p, "protein", p) for p in prots]
    nodes += [NodeRecord(d, "drug", d) for d in drugs]
    edges = [EdgeRecord(a, b, "ppi") for a, b in ppi_edges]
    edges += [EdgeRecord(d, t, "targets") for d, t in target_edges]
    return graph_from_records(nodes, edges, DRUG_SCHEMA)


def test_rank_single_targeting_drug_first():
    g = drug_graph([("m1", "m2")], [("drugA", "m1")])
    module = DiseaseModule(seeds=SeedSet(["m1", "m2"], "protein"))
    ranked = rank_drugs(g, module, "trustrank")
    assert ranked.entries[0][0] == "drugA"
    assert ranked.entries[0][1] > 0


def test_rank_two_targets_beats_one():
    g = drug_graph([("m1", "m2"), ("m1", "x"), ("m2", "x")],
                   [("drug2", "m1"), ("drug2", "m2"), ("drug1", "m1"),
                    ("drug1", "x")])
    module = DiseaseModule(seeds=SeedSet(["m1", "m2"], "protein"))
    ranked = rank_drugs(g, module, "trustrank")
    oracle = trustrank_dense_oracle(g, ["m1", "m2"])
    order = sorted(["drug1", "drug2"], key=lambda d: (-oracle[d], d))
    assert [d for d, _ in ranked.entries] == order
    assert ranked.entries[0][0] == "drug2"


def test_rank_closeness_matches_bfs_order():
    g = drug_graph([("m1", "m2"), ("m2", "far")],
                   [("near", "m1"), ("away", "far")])
    module = DiseaseModule(seeds=SeedSet(["m1", "m2"], "protein"))
    ranked = rank_drugs(g, module, "closeness")
    oracle = closeness_bfs_oracle(g, ["near", "away"], ["m1", "m2"])
    expect = sorted(oracle, key=lambda d: (-oracle[d], d))
    assert [d for d, _ in ranked.entries] == expect


def test_rank_no_drugs_marker():
    g = ppi_graph([("a", "b")])
    module = DiseaseModule(seeds=SeedSet(["a"], "protein"))
    ranked = rank_drugs(g, module, "trustrank")
    assert ranked.empty_marker and ranked.entries == []


def test_rank_sorted_and_drugs_only(sample_graph):
    from netmedkit.netmed import diamond_expand as dx
    seeds = SeedSet([f"uniprot.P{10000 + i}" for i in range(6)], "protein")
    module = dx(sample_graph, seeds, DiamondParams(n_added=5))
    for method in ("trustrank", "closeness"):
        ranked = rank_drugs(sample_graph, module, method)
        assert all(sample_graph.node(d).node_type == "drug"
                   for d, _ in ranked.entries)
        scores = [s for _, s in ranked.entries]
        assert scores == sorted(scores, reverse=True)
