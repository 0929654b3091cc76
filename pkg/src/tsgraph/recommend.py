"""Suggests node classes for a graph from what a repository uses most.

A repository is any directory tree of .tsg files.  Indexing counts how
often each node class appears across the parseable files; suggestions
are the most-counted classes the current graph does not use yet.  The
ranking contract is pluggable so alternative recommenders can register
beside the shipped popularity one.
"""
from __future__ import annotations

import hashlib
import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

from .graph import Tsg
from .lang import LinkChain, NodeDecl, ParseError, TsgDocument, parse_document
from .lang.validate import VIEW_CLASS, declared_names


@dataclass(frozen=True)
class IndexedFile:
    path: str
    parse_ok: bool


@dataclass(frozen=True)
class RepositoryIndex:
    """Per-class occurrence counts over the successfully parsed files."""

    counts: dict[str, int] = field(default_factory=dict)
    indexed_files: tuple[IndexedFile, ...] = ()


def count_classes(doc: TsgDocument) -> Counter[str]:
    """Class occurrences in one document, inferred Views included."""
    counts: Counter[str] = Counter()
    names = declared_names(doc)
    inferred: set[str] = set()
    for stmt in doc.statements:
        if isinstance(stmt, NodeDecl):
            counts[stmt.class_name] += 1
            continue
        for element in stmt.elements:
            if isinstance(element.target, NodeDecl):
                counts[element.target.class_name] += 1
            elif element.target not in names and element.target not in inferred:
                inferred.add(element.target)
                counts[VIEW_CLASS] += 1
    return counts


def repository_files(root: str | Path) -> list[Path]:
    return sorted(Path(root).rglob("*.tsg"))


def index_repository(
    paths: list[str | Path], cache_path: str | Path | None = None
) -> RepositoryIndex:
    cache = _load_cache(cache_path)
    dirty = False
    counts: Counter[str] = Counter()
    files: list[IndexedFile] = []
    for path in paths:
        text = Path(path).read_text(encoding="utf-8")
        digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
        entry = cache.get(digest)
        if entry is None:
            entry = _index_text(text, str(path))
            cache[digest] = entry
            dirty = True
        files.append(IndexedFile(str(path), entry["ok"]))
        counts.update(entry["counts"])
    if dirty and cache_path is not None:
        Path(cache_path).write_text(
            json.dumps(cache, indent=1, sort_keys=True), encoding="utf-8"
        )
    return RepositoryIndex(dict(counts), tuple(files))


def _index_text(text: str, source_name: str) -> dict:
    try:
        doc = parse_document(text, source_name)
    except ParseError:
        return {"ok": False, "counts": {}}
    return {"ok": True, "counts": dict(count_classes(doc))}


def _load_cache(cache_path: str | Path | None) -> dict:
    if cache_path is None or not Path(cache_path).is_file():
        return {}
    try:
        cache = json.loads(Path(cache_path).read_text(encoding="utf-8"))
    except ValueError:
        return {}
    return cache if isinstance(cache, dict) else {}


class Recommender(Protocol):
    """Ranking strategy over an index; third parties register their own."""

    name: str

    def recommend(
        self, index: RepositoryIndex, current: Tsg, k: int
    ) -> list[tuple[str, int]]: ...


class PopularityRecommender:
    name = "popularity"

    def recommend(
        self, index: RepositoryIndex, current: Tsg, k: int
    ) -> list[tuple[str, int]]:
        if k < 1:
            raise ValueError("k must be at least 1")
        used = {node.class_name for node in current.nodes.values()}
        ranked = sorted(
            (item for item in index.counts.items() if item[0] not in used),
            key=lambda item: (-item[1], item[0]),
        )
        return ranked[:k]


RECOMMENDERS: dict[str, Recommender] = {}


def register(recommender: Recommender) -> None:
    RECOMMENDERS[recommender.name] = recommender


register(PopularityRecommender())


def recommend_nodes(
    index: RepositoryIndex, current: Tsg, k: int
) -> list[tuple[str, int]]:
    return RECOMMENDERS["popularity"].recommend(index, current, k)
