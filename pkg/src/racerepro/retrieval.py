"""TF-IDF vector-space retrieval and the two file-ranking schemes.

The variant is pinned for reproducibility: raw term frequency, idf =
ln(N / df), L2-normalized document vectors, cosine similarity.  Queries are
weighted with the same idf; terms absent from the corpus vocabulary are
skipped.  Zero vectors (empty docs, all-shared vocabulary) score 0.

Two rankers sit on top:

* ``rank_basic`` treats the whole report as one query against whole-file
  token streams (one index, one search per file);
* ``rank_structured`` runs 12 searches (3 queries x 4 source fields, each
  field with its own index) and averages with a fixed divisor of 12.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

from .reports import MODE_C_SOURCE, BugReport, TokenStream, preprocess, preprocess_tokens

if TYPE_CHECKING:
    from .catalog import KeySystemCalls
    from .csource import SourceDoc

QUERY_NAMES = ("subject", "body", "syscalls")
FIELD_NAMES = ("file_name", "function_names", "variable_names", "full_text_with_comments")

#: Number of (query, field) searches averaged by the structured ranker.
#: The divisor stays fixed even when a query is empty.
STRUCTURED_SEARCH_COUNT = len(QUERY_NAMES) * len(FIELD_NAMES)

#: Files kept for downstream instrumentation-point location.
DEFAULT_TOP_FILES = 10


# --- index ------------------------------------------------------------------

@dataclass
class TfIdfIndex:
    vocabulary: dict[str, int]
    idf: dict[str, float]
    doc_vectors: dict[str, dict[str, float]]

    @property
    def doc_ids(self) -> list[str]:
        return list(self.doc_vectors)


def _normalize(vec: dict[str, float]) -> dict[str, float]:
    norm = math.sqrt(sum(w * w for w in vec.values()))
    if norm == 0.0:
        return {}
    return {term: w / norm for term, w in vec.items()}


def build_index(docs: list[tuple[str, TokenStream]]) -> TfIdfIndex:
    """Build a TF-IDF index over (doc id, token stream) pairs."""
    if not docs:
        raise ValueError("cannot build an index over an empty corpus")
    n_docs = len(docs)
    df: Counter[str] = Counter()
    term_counts: dict[str, Counter[str]] = {}
    for doc_id, tokens in docs:
        if doc_id in term_counts:
            raise ValueError(f"duplicate document id: {doc_id!r}")
        counts = Counter(tokens)
        term_counts[doc_id] = counts
        df.update(counts.keys())

    vocabulary = {term: dim for dim, term in enumerate(sorted(df))}
    idf = {term: math.log(n_docs / df[term]) for term in vocabulary}
    doc_vectors = {
        doc_id: _normalize({t: c * idf[t] for t, c in counts.items()})
        for doc_id, counts in term_counts.items()
    }
    return TfIdfIndex(vocabulary=vocabulary, idf=idf, doc_vectors=doc_vectors)


def _query_vector(index: TfIdfIndex, query: TokenStream) -> dict[str, float]:
    counts = Counter(t for t in query if t in index.idf)
    return _normalize({t: c * index.idf[t] for t, c in counts.items()})


def similarity(index: TfIdfIndex, query: TokenStream, doc_id: str) -> float:
    """Cosine similarity between the query and one document, in [0, 1]."""
    if doc_id not in index.doc_vectors:
        raise KeyError(f"unknown document id: {doc_id!r}")
    qvec = _query_vector(index, query)
    dvec = index.doc_vectors[doc_id]
    if not qvec or not dvec:
        return 0.0
    if len(qvec) > len(dvec):
        qvec, dvec = dvec, qvec
    return sum(w * dvec[t] for t, w in qvec.items() if t in dvec)


def rank(index: TfIdfIndex, query: TokenStream) -> list[tuple[str, float]]:
    """All documents scored against the query, best first, ties by doc id."""
    scored = [(doc_id, similarity(index, query, doc_id)) for doc_id in index.doc_vectors]
    scored.sort(key=lambda e: (-e[1], e[0]))
    return scored


# --- file ranking -----------------------------------------------------------

@dataclass
class RankedFiles:
    """Ordered (path, score) list; scores non-increasing, ties lexicographic."""

    entries: list[tuple[str, float]]
    scheme: str
    #: per-file, per-search score breakdown ("<query>:<field>" -> cosine);
    #: populated by the structured ranker for auditability.
    breakdown: dict[str, dict[str, float]] = field(default_factory=dict)

    def rank_of(self, path: str) -> int | None:
        """1-based rank of a path, or None if absent."""
        for pos, (entry_path, _) in enumerate(self.entries, start=1):
            if entry_path == path:
                return pos
        return None

    def top(self, k: int) -> list[str]:
        return [path for path, _ in self.entries[:k]]


def _report_query(report: BugReport) -> TokenStream:
    return preprocess(report.subject + "\n" + report.body)


def _as_docs(source: object) -> list[SourceDoc]:
    """Accept either a SourceIndex or a plain list of SourceDoc."""
    return list(getattr(source, "docs", source))  # type: ignore[arg-type]


def rank_basic(report: BugReport, source: object) -> RankedFiles:
    """BasicIR baseline: whole report vs whole-file token streams."""
    docs = _as_docs(source)
    index = build_index([(d.path, d.fields["full_text_with_comments"]) for d in docs])
    entries = rank(index, _report_query(report))
    return RankedFiles(entries=entries, scheme="basic")


def _syscall_query(keys: KeySystemCalls) -> TokenStream:
    names: list[str] = []
    for entry in keys.entries:
        names.extend([entry.name] * entry.count)
    return preprocess_tokens(names, MODE_C_SOURCE)


def rank_structured(
    report: BugReport, key_syscalls: KeySystemCalls, source: object
) -> RankedFiles:
    """Structured ranker: 12 field-scoped searches averaged per file.

    Queries are the subject, the body, and the extracted syscall names (with
    multiplicity); each is run against four per-field indexes.  An empty
    query scores 0 everywhere but still counts in the divisor.
    """
    docs = _as_docs(source)
    queries: dict[str, TokenStream] = {
        "subject": preprocess(report.subject),
        "body": preprocess(report.body),
        "syscalls": _syscall_query(key_syscalls),
    }
    indexes = {
        fname: build_index([(d.path, d.fields[fname]) for d in docs])
        for fname in FIELD_NAMES
    }
    breakdown: dict[str, dict[str, float]] = {d.path: {} for d in docs}
    totals: dict[str, float] = {d.path: 0.0 for d in docs}
    for qname in QUERY_NAMES:
        query = queries[qname]
        for fname in FIELD_NAMES:
            index = indexes[fname]
            for doc in docs:
                score = similarity(index, query, doc.path)
                breakdown[doc.path][f"{qname}:{fname}"] = score
                totals[doc.path] += score

    entries = [(path, total / STRUCTURED_SEARCH_COUNT) for path, total in totals.items()]
    entries.sort(key=lambda e: (-e[1], e[0]))
    return RankedFiles(entries=entries, scheme="structured", breakdown=breakdown)
