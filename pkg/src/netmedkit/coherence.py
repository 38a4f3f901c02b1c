"""Functional-coherence validation of gene sets.

Coherence of a gene set = mean pairwise Jaccard similarity of the genes'
annotation-term sets. Significance comes from an empirical p-value against
random same-size gene sets drawn from the annotation background, plus
per-term hypergeometric enrichment.
"""

from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass, field
from itertools import combinations

from .errors import BackgroundTooSmall, TooFewGenes
from .netmed import hypergeometric_tail

log = logging.getLogger(__name__)


class AnnotationMap:
    """term id -> (term name, gene set), plus the annotatable background."""

    def __init__(self, terms: dict[str, tuple[str, set[str]]], background: set[str]):
        for term, (_, genes) in terms.items():
            if not genes:
                raise ValueError(f"term {term} has no genes")
            missing = genes - background
            if missing:
                raise ValueError(f"term {term} annotates genes outside background: {sorted(missing)[:3]}")
        self.terms = terms
        self.background = set(background)
        self._gene_terms: dict[str, set[str]] = {}
        for term, (_, genes) in terms.items():
            for g in genes:
                self._gene_terms.setdefault(g, set()).add(term)

    @classmethod
    def from_file(cls, path, background: set[str] | None = None) -> "AnnotationMap":
        terms: dict[str, tuple[str, set[str]]] = {}
        genes_seen: set[str] = set()
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                raw = json.loads(line)
                gene_set = set(raw["genes"])
                terms[raw["term"]] = (raw.get("name", raw["term"]), gene_set)
                genes_seen |= gene_set
        return cls(terms, background if background is not None else genes_seen)

    def terms_of(self, gene: str) -> set[str]:
        return self._gene_terms.get(gene, set())


@dataclass
class TermHit:
    term: str
    name: str
    k: int  # genes from the set in the term
    n: int  # size of the gene set
    term_size: int
    background_size: int
    p: float

    def to_json(self) -> dict:
        return {"term": self.term, "name": self.name, "k": self.k, "n": self.n,
                "term_size": self.term_size, "background_size": self.background_size,
                "p": self.p}


@dataclass
class CoherenceResult:
    score: float
    empirical_p: float
    samples_used: int
    rng_seed: int
    per_term: list[TermHit] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"score": self.score, "empirical_p": self.empirical_p,
                "samples_used": self.samples_used, "rng_seed": self.rng_seed,
                "per_term": [t.to_json() for t in self.per_term]}

    def plot_data(self) -> list[dict]:
        """(term, -log10 p) pairs for the enrichment bar chart."""
        import math
        return [{"term": t.term, "name": t.name, "neg_log10_p": -math.log10(t.p)}
                for t in self.per_term]


def _filter_genes(genes, ann: AnnotationMap) -> list[str]:
    kept = sorted(set(genes) & ann.background)
    dropped = set(genes) - ann.background
    if dropped:
        log.warning("dropping %d genes outside annotation background", len(dropped))
    if len(kept) < 2:
        raise TooFewGenes(f"need >= 2 annotatable genes, have {len(kept)}")
    return kept


def coherence_score(genes, ann: AnnotationMap) -> float:
    """Mean pairwise Jaccard of the genes' term sets, in [0,1]."""
    kept = _filter_genes(genes, ann)
    return _pairwise_jaccard(kept, ann)


def _pairwise_jaccard(genes: list[str], ann: AnnotationMap) -> float:
    term_sets = [ann.terms_of(g) for g in genes]
    total = 0.0
    pairs = 0
    for a, b in combinations(term_sets, 2):
        pairs += 1
        union = len(a | b)
        if union:
            total += len(a & b) / union
    return total / pairs


def empirical_pvalue(genes, ann: AnnotationMap, samples: int = 999,
                     rng_seed: int = 0) -> CoherenceResult:
    """Empirical p = (1 + #{random sets with coherence >= observed}) / (M + 1).

    Random sets are uniform same-size subsets of the background, drawn from
    an explicit seeded generator, so results are bit-identical per seed.
    """
    if samples < 100:
        raise ValueError("need at least 100 samples")
    kept = _filter_genes(genes, ann)
    background = sorted(ann.background)
    # the whole-background set is its own (degenerate) null distribution
    if len(background) < 2 * len(kept) and len(kept) != len(background):
        raise BackgroundTooSmall(
            f"background {len(background)} < 2x gene set {len(kept)}")

    observed = _pairwise_jaccard(kept, ann)
    rng = random.Random(rng_seed)
    exceed = 0
    for _ in range(samples):
        draw = rng.sample(background, len(kept))
        if _pairwise_jaccard(draw, ann) >= observed:
            exceed += 1
    p = (1 + exceed) / (samples + 1)
    return CoherenceResult(score=observed, empirical_p=p, samples_used=samples,
                           rng_seed=rng_seed, per_term=term_enrichment(kept, ann))


def term_enrichment(genes, ann: AnnotationMap) -> list[TermHit]:
    """Hypergeometric tail per annotation term hit by the gene set."""
    kept = _filter_genes(genes, ann)
    n = len(kept)
    N = len(ann.background)
    gene_set = set(kept)
    hits = []
    for term, (name, members) in ann.terms.items():
        k = len(gene_set & members)
        if k == 0:
            continue
        K = len(members)
        hits.append(TermHit(term=term, name=name, k=k, n=n, term_size=K,
                            background_size=N,
                            p=hypergeometric_tail(k, K, n, N)))
    hits.sort(key=lambda t: (t.p, t.term))
    return hits
