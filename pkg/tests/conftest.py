"""Shared fixtures: corpus maps on disk and a seeded random map generator."""

from __future__ import annotations

import random
from typing import List

import pytest

from hymap import dsl
from hymap.corpus import all_cases
from hymap.model import (
    CognitiveMap,
    DuplicateEdge,
    DuplicateLabel,
    NodeKind,
    SelfLoop,
    Sign,
    WouldCreateCycle,
)

# characters that exercise quoting, escaping, and unicode in labels
LABEL_SPICE = ["", " extra", ' with "quotes"', " with \\backslash", " café", "  spaced  "]


def random_map(rng: random.Random, max_nodes: int = 50) -> CognitiveMap:
    """A structurally valid map built exclusively through the model ops."""
    cmap = CognitiveMap(title="random")
    product = cmap.add_node(NodeKind.PRODUCT, f"product{rng.choice(LABEL_SPICE)} p")

    def spiced(prefix: str, index: int) -> str:
        return f"{prefix} {index}{rng.choice(LABEL_SPICE)}"

    customers = [
        cmap.add_node(NodeKind.CUSTOMER, spiced("customer", i))
        for i in range(rng.randint(0, 5))
    ]
    features = [
        cmap.add_node(NodeKind.FEATURE, spiced("feature", i))
        for i in range(rng.randint(0, 8))
    ]
    remaining = max_nodes - len(cmap.nodes)
    concepts = [
        cmap.add_node(NodeKind.CONCEPT, spiced("concept", i))
        for i in range(rng.randint(0, max(0, remaining)))
    ]

    attempts = rng.randint(0, 3 * len(cmap.nodes))
    for _ in range(attempts):
        choice = rng.random()
        try:
            if choice < 0.25 and features:
                cmap.add_edge(product, rng.choice(features))
            elif choice < 0.5 and customers and concepts:
                cmap.add_edge(rng.choice(customers), rng.choice(concepts))
            elif concepts and (features or concepts):
                src_pool = features + concepts
                cmap.add_edge(rng.choice(src_pool), rng.choice(concepts),
                              sign=rng.choice(list(Sign)))
        except (DuplicateEdge, WouldCreateCycle, SelfLoop, DuplicateLabel):
            continue

    for edge in cmap.edges.values():
        edge.saturated = rng.random() < 0.5
    return cmap


def random_maps(seed: int, count: int, max_nodes: int = 50) -> List[CognitiveMap]:
    rng = random.Random(seed)
    return [random_map(rng, max_nodes=max_nodes) for _ in range(count)]


@pytest.fixture(scope="session")
def corpus_cases():
    return all_cases()


@pytest.fixture()
def corpus_files(tmp_path, corpus_cases) -> dict:
    """Every corpus case serialized to <tmp>/<name>.hymap."""
    paths = {}
    for name, fixture in corpus_cases.items():
        path = tmp_path / f"{name}.hymap"
        path.write_text(dsl.serialize(fixture.map), encoding="utf-8")
        paths[name] = path
    return paths
