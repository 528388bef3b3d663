"""irbench: a retrieval evaluation workbench.

Search (tf-idf over an inverted index), three value-added result services
(co-word query expansion, journal-frequency re-ranking, author-centrality
re-ranking), pooled relevance assessment with an HTTP judging backend, and
agreement-aware evaluation reports.
"""

__version__ = "0.1.0"
