"""Result-set re-ranking: journal frequency (Bradfordizing) and author
betweenness centrality.

Bradfordizing groups an ISSN-filtered result list by journal and sorts whole
journal groups by their frequency in the result set, so articles from the
journals publishing most on the query topic surface first. Author centrality
builds a co-authorship graph from the result set, computes exact betweenness
for every author, and floats documents with central authors to the top.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping

from .corpus import DocumentRecord
from .index import AUTH, BRAD, InvertedIndex, RankedList, facet_counts, ranked_list


def bradfordize(base: RankedList, idx: InvertedIndex, keep_unidentified: bool = False) -> RankedList:
    """Reorder a ranked list so journals with the highest result-set
    frequency come first.

    Documents without an ISSN cannot be attributed to a journal and are
    dropped (or appended after all journal groups when ``keep_unidentified``
    is set). Journal groups tie-break on their best base rank, then ISSN;
    inside a group the base order is kept. Output scores carry the journal's
    facet count, informational only.
    """
    with_issn = [e for e in base.entries if idx.issn.get(e.doc_id)]
    without_issn = [e for e in base.entries if not idx.issn.get(e.doc_id)]
    counts = facet_counts(idx, [e.doc_id for e in with_issn])

    best_rank = {}
    groups: dict[str, list] = {}
    for e in with_issn:
        issn = idx.issn[e.doc_id]
        groups.setdefault(issn, []).append(e)
        best_rank.setdefault(issn, e.rank)

    ordered_journals = sorted(counts, key=lambda j: (-counts[j], best_rank[j], j))
    scored = [
        (e.doc_id, float(counts[j]))
        for j in ordered_journals
        for e in groups[j]
    ]
    if keep_unidentified:
        scored.extend((e.doc_id, 0.0) for e in without_issn)
    return ranked_list(BRAD, base.topic_id, scored)


@dataclass
class CoauthorGraph:
    """Undirected, unweighted co-authorship graph."""

    adjacency: dict[str, set[str]] = field(default_factory=dict)

    def add_node(self, author: str) -> None:
        self.adjacency.setdefault(author, set())

    def add_edge(self, a: str, b: str) -> None:
        if a == b:
            return
        self.adjacency.setdefault(a, set()).add(b)
        self.adjacency.setdefault(b, set()).add(a)

    def nodes(self) -> list[str]:
        return list(self.adjacency)

    def edges(self) -> set[frozenset]:
        return {frozenset((a, b)) for a, nbrs in self.adjacency.items() for b in nbrs}


def build_coauthor_graph(docs: list[DocumentRecord]) -> CoauthorGraph:
    """One node per distinct author, an edge per co-authored document."""
    graph = CoauthorGraph()
    for doc in docs:
        for author in doc.authors:
            graph.add_node(author)
        for a, b in combinations(doc.authors, 2):
            graph.add_edge(a, b)
    return graph


def betweenness(graph: CoauthorGraph) -> dict[str, float]:
    """Exact betweenness centrality, unnormalized.

    Single-source shortest paths with backward dependency accumulation.
    Each unordered node pair (s, t) contributes sigma_st(v)/sigma_st once,
    hence the final halving for this undirected graph.
    """
    adjacency = graph.adjacency
    centrality = {v: 0.0 for v in adjacency}
    for source in adjacency:
        stack: list[str] = []
        preds: dict[str, list[str]] = {v: [] for v in adjacency}
        sigma = dict.fromkeys(adjacency, 0)
        dist = dict.fromkeys(adjacency, -1)
        sigma[source] = 1
        dist[source] = 0
        queue = deque([source])
        while queue:
            v = queue.popleft()
            stack.append(v)
            for w in adjacency[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = dict.fromkeys(adjacency, 0.0)
        while stack:
            w = stack.pop()
            for v in preds[w]:
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            if w != source:
                centrality[w] += delta[w]
    return {v: c / 2.0 for v, c in centrality.items()}


def author_centrality_rerank(base: RankedList, corpus: Mapping[str, DocumentRecord],
                             combine: str = "max") -> RankedList:
    """Reorder a ranked list by the betweenness of each document's authors.

    The graph is built from the result set itself. A document scores the
    max (or, with ``combine='sum'``, the sum) of its authors' betweenness;
    author-less documents score 0. Equal scores keep base order.
    """
    if combine not in ("max", "sum"):
        raise ValueError(f"combine must be 'max' or 'sum', got {combine!r}")
    docs = []
    for e in base.entries:
        if e.doc_id not in corpus:
            raise ValueError(f"unknown doc_id {e.doc_id!r}")
        docs.append(corpus[e.doc_id])
    scores = betweenness(build_coauthor_graph(docs))
    agg = max if combine == "max" else sum
    doc_scores = [
        (doc.doc_id, agg(scores[a] for a in doc.authors) if doc.authors else 0.0)
        for doc in docs
    ]
    doc_scores.sort(key=lambda pair: -pair[1])  # stable: ties keep base order
    return ranked_list(AUTH, base.topic_id, doc_scores)
