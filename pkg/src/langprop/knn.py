"""Exact top-k cosine neighbours over word-unigram count vectors.

An inverted index (word -> tweets) restricts scoring to tweets that share
at least one word with the query.  Tweets sharing nothing have cosine 0
and are never neighbours, so the shortcut is exact.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import kernels
from .corpus import Tweet
from .features import SparseVector, build_feature_space, vectorize_many, word_unigrams

NeighborList = Dict[str, List[Tuple[str, float]]]


@dataclass(frozen=True)
class KnnConfig:
    k_fraction: float = 0.25
    k_max: Optional[int] = None

    def __post_init__(self):
        if not 0 < self.k_fraction <= 1:
            raise ValueError("k_fraction must lie in (0, 1]")
        if self.k_max is not None and self.k_max < 1:
            raise ValueError("k_max must be >= 1")

    def k_for(self, n_tweets: int) -> int:
        # small epsilon so that e.g. 0.29 * 100 floors to 29, not 28
        k = max(1, math.floor(self.k_fraction * n_tweets + 1e-9))
        if self.k_max is not None:
            k = min(k, self.k_max)
        return k


def _norm(v: SparseVector) -> float:
    return math.sqrt(sum(x * x for x in v.values()))


def cosine(a: SparseVector, b: SparseVector) -> float:
    """Cosine similarity of two sparse vectors; 0 if either is all-zero."""
    if len(a) > len(b):
        a, b = b, a
    dot = sum(x * b[i] for i, x in a.items() if i in b)
    if dot == 0:
        return 0.0
    # same expression as the kernels, so integer-count inputs agree bit for bit
    return dot / (_norm(a) * _norm(b))


def top_k_neighbors(tweets: Sequence[Tweet], cfg: KnnConfig = KnnConfig(), threads: int = 1) -> NeighborList:
    """The ``k`` most similar other tweets for every tweet.

    Lists are ordered by descending similarity with ties going to the
    smaller tweet id; zero-similarity tweets are excluded.
    """
    n = len(tweets)
    result: NeighborList = {t.id: [] for t in tweets}
    if n < 2:
        return result
    k = cfg.k_for(n)
    docs = [word_unigrams(t.text) for t in tweets]
    if not any(docs):
        return result
    X = vectorize_many(docs, build_feature_space(docs))
    XT = X.T.tocsr()
    indptr = X.indptr.astype(np.int64)
    indices = X.indices.astype(np.int32)
    t_indptr = XT.indptr.astype(np.int64)
    t_indices = XT.indices.astype(np.int32)
    norms = np.sqrt(np.asarray(X.multiply(X).sum(axis=1)).ravel())
    rank = np.empty(n, dtype=np.int64)
    rank[sorted(range(n), key=lambda i: tweets[i].id)] = np.arange(n)

    def run(bounds):
        return kernels.topk_cosine(
            indptr, indices, X.data, t_indptr, t_indices, XT.data, norms, rank, k, *bounds
        )

    threads = max(1, min(threads, n))
    step = -(-n // threads)
    chunks = [(s, min(s + step, n)) for s in range(0, n, step)]
    if len(chunks) == 1:
        parts = [run(chunks[0])]
    else:
        with ThreadPoolExecutor(len(chunks)) as pool:
            parts = list(pool.map(run, chunks))

    for (start, stop), (counts, nbr, sim) in zip(chunks, parts):
        for r in range(stop - start):
            lst = result[tweets[start + r].id]
            for s in range(r * k, r * k + counts[r]):
                lst.append((tweets[nbr[s]].id, float(sim[s])))
    return result


def brute_force_neighbors(tweets: Sequence[Tweet], cfg: KnnConfig = KnnConfig()) -> NeighborList:
    """All-pairs reference implementation used to check ``top_k_neighbors``."""
    n = len(tweets)
    result: NeighborList = {t.id: [] for t in tweets}
    if n < 2:
        return result
    k = cfg.k_for(n)
    counts = [word_unigrams(t.text) for t in tweets]
    vecs = [{w: float(c) for w, c in doc.items()} for doc in counts]
    for i, t in enumerate(tweets):
        scored = []
        for j, other in enumerate(tweets):
            if i == j:
                continue
            s = cosine(vecs[i], vecs[j])
            if s > 0:
                scored.append((-s, other.id))
        scored.sort()
        result[t.id] = [(oid, -ns) for ns, oid in scored[:k]]
    return result


def write_neighbors(path: str | Path, neighbors: NeighborList) -> None:
    lines = [f"{tid}\t{nid}\t{sim:.6f}\n" for tid, lst in neighbors.items() for nid, sim in lst]
    Path(path).write_text("".join(lines), encoding="utf-8", newline="\n")
