"""Access to the bundled sample knowledge graph and annotation map."""

from __future__ import annotations

from pathlib import Path

from .coherence import AnnotationMap
from .kgstore import KnowledgeGraph, SchemaDescriptor, load_graph


def data_dir() -> Path:
    return Path(__file__).parent / "data"


def load_sample_graph(kg_dir: Path | str | None = None) -> KnowledgeGraph:
    base = Path(kg_dir) if kg_dir else data_dir() / "sample_kg"
    schema = SchemaDescriptor.from_file(base / "schema.json")
    return load_graph(base / "nodes.jsonl", base / "edges.jsonl", schema)


def load_annotations(path: Path | str | None = None) -> AnnotationMap:
    return AnnotationMap.from_file(path or data_dir() / "annotations.jsonl")
