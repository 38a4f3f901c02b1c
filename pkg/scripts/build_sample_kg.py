#!/usr/bin/env python
"""Regenerate the bundled sample knowledge graph and annotation map.

Deterministic (fixed RNG seed); outputs land in src/netmedkit/data/. The
graph is small enough for tests but carries every node/edge type the schema
declares, the Alzheimer gene set, and the six seed genes used by the module
expansion fixtures.
"""

import json
import random
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "src" / "netmedkit" / "data"

SCHEMA = {
    "node_types": ["gene", "protein", "drug", "disorder", "pathway"],
    "edge_types": [
        ["ppi", "protein", "protein"],
        ["encodes", "gene", "protein"],
        ["associated_with", "gene", "disorder"],
        ["targets", "drug", "protein"],
        ["member_of", "protein", "pathway"],
    ],
}

# (symbol, entrez id) — Alzheimer panel plus module-expansion seed genes
CORE_GENES = [
    ("APOE", "348"), ("APP", "351"), ("PSEN1", "5663"), ("PSEN2", "5664"),
    ("SORL1", "6653"),
    ("ARC", "23237"), ("CD2AP", "23607"), ("BACE1", "23621"),
    ("ABI3", "51225"), ("MS4A4A", "51338"), ("TREM2", "54209"),
]

DISORDERS = [
    ("mondo.0004975", "Alzheimer disease", ["alzheimers disease", "AD"]),
    ("mondo.0004979", "asthma", []),
    ("mondo.0007739", "Huntington disease", ["HD"]),
    ("mondo.0005180", "Parkinson disease", ["PD"]),
    ("mondo.0005015", "diabetes mellitus", []),
    ("mondo.0005267", "heart disorder", []),
]

PATHWAYS = [
    ("kegg.hsa05010", "Alzheimer disease pathway"),
    ("kegg.hsa04722", "neurotrophin signaling"),
    ("kegg.hsa04330", "notch signaling"),
    ("kegg.hsa05022", "neurodegeneration pathways"),
    ("kegg.hsa04151", "pi3k-akt signaling"),
    ("kegg.hsa04010", "mapk signaling"),
]


def main():
    rng = random.Random(7)
    nodes, edges = [], []

    genes = []
    for sym, entrez in CORE_GENES:
        genes.append((f"entrez.{entrez}", sym))
    for i in range(1, 70):
        genes.append((f"entrez.9{i:04d}", f"FLG{i}"))
    for gid, sym in genes:
        nodes.append({"id": gid, "type": "gene", "name": sym,
                      "synonyms": [f"{sym} gene"], "attrs": {"source": "ncbi"}})

    proteins = []
    for idx, (gid, sym) in enumerate(genes):
        pid = f"uniprot.P{10000 + idx}"
        proteins.append(pid)
        nodes.append({"id": pid, "type": "protein", "name": f"{sym} protein",
                      "synonyms": [sym], "attrs": {"source": "uniprot"}})
        edges.append({"source": gid, "target": pid, "type": "encodes"})

    # PPI: ring backbone for connectivity + random chords + a dense pocket
    # around the core-gene proteins so module expansion has signal
    n = len(proteins)
    for i in range(n):
        edges.append({"source": proteins[i], "target": proteins[(i + 1) % n],
                      "type": "ppi"})
    for _ in range(140):
        a, b = rng.sample(range(n), 2)
        edges.append({"source": proteins[a], "target": proteins[b], "type": "ppi"})
    core = proteins[:len(CORE_GENES)]
    for i in range(len(core)):
        for j in range(i + 1, len(core)):
            if rng.random() < 0.55:
                edges.append({"source": core[i], "target": core[j], "type": "ppi"})
    for p in core:
        for _ in range(2):
            q = proteins[rng.randrange(len(CORE_GENES), n)]
            edges.append({"source": p, "target": q, "type": "ppi"})

    for d, (did, name, syns) in enumerate(DISORDERS):
        nodes.append({"id": did, "type": "disorder", "name": name,
                      "synonyms": syns, "attrs": {"source": "mondo"}})
    for gid, _ in genes[:len(CORE_GENES)]:
        edges.append({"source": gid, "target": DISORDERS[0][0],
                      "type": "associated_with"})
    for gid, _ in rng.sample(genes[len(CORE_GENES):], 25):
        did = DISORDERS[rng.randrange(1, len(DISORDERS))][0]
        edges.append({"source": gid, "target": did, "type": "associated_with"})

    for i in range(15):
        did = f"drugbank.DB{i:05d}"
        nodes.append({"id": did, "type": "drug", "name": f"drug-{i:02d}",
                      "synonyms": [], "attrs": {"source": "drugbank"}})
        # first few drugs target core proteins, rest target random ones
        if i < 5:
            for p in rng.sample(core, 2 + i % 3):
                edges.append({"source": did, "target": p, "type": "targets"})
        else:
            for p in rng.sample(proteins, 2):
                edges.append({"source": did, "target": p, "type": "targets"})

    for pid, name in PATHWAYS:
        nodes.append({"id": pid, "type": "pathway", "name": name,
                      "synonyms": [], "attrs": {"source": "kegg"}})
    for p in rng.sample(proteins, 40):
        pw = PATHWAYS[rng.randrange(len(PATHWAYS))][0]
        edges.append({"source": p, "target": pw, "type": "member_of"})

    kg_dir = OUT / "sample_kg"
    kg_dir.mkdir(parents=True, exist_ok=True)
    with open(kg_dir / "schema.json", "w") as fh:
        json.dump(SCHEMA, fh, indent=2)
        fh.write("\n")
    with open(kg_dir / "nodes.jsonl", "w") as fh:
        for rec in nodes:
            fh.write(json.dumps(rec) + "\n")
    with open(kg_dir / "edges.jsonl", "w") as fh:
        for rec in edges:
            fh.write(json.dumps(rec) + "\n")

    write_annotations(rng, [sym for _, sym in genes])
    print(f"wrote {len(nodes)} nodes, {len(edges)} edge lines")


def write_annotations(rng, symbols):
    """Term map over gene symbols; hsa05010 covers 3 of the 5 Alzheimer genes."""
    terms = {
        "hsa05010": ("Alzheimer's disease", ["APOE", "APP", "PSEN1"]),
        "hsa04722": ("Neuroactive ligand-receptor interaction", ["SORL1"]),
        "hsa04330": ("Wnt signaling pathway", ["PSEN2"]),
        "hsa05022": ("Huntington's disease", ["APP"]),
        "go.0042987": ("amyloid precursor protein processing",
                       ["APP", "PSEN1", "PSEN2", "BACE1"]),
        "go.0006869": ("lipid transport", ["APOE", "SORL1"]),
        "go.0002376": ("immune system process", ["TREM2", "MS4A4A", "ABI3"]),
    }
    filler = [s for s in symbols if s.startswith("FLG")]
    for i in range(24):
        members = rng.sample(filler, rng.randrange(2, 6))
        terms[f"go.9{i:06d}"] = (f"filler process {i}", members)
    with open(OUT / "annotations.jsonl", "w") as fh:
        for term, (name, members) in terms.items():
            fh.write(json.dumps({"term": term, "name": name,
                                 "genes": sorted(set(members))}) + "\n")
        # background completeness: every gene belongs to at least one term
        fh.write(json.dumps({"term": "go.0008150", "name": "biological process",
                             "genes": sorted(set(symbols))}) + "\n")


if __name__ == "__main__":
    main()
