"""Character n-gram and word unigram features, and sparse count vectors."""
from __future__ import annotations

from collections import Counter
from pathlib import Path
from typing import Dict, Iterable, Sequence

import numpy as np
import scipy.sparse as sp

SparseVector = Dict[int, float]


def char_ngrams(text: str, n_min: int = 2, n_max: int = 5) -> Counter:
    """Character n-grams of each whitespace-separated word.

    N-grams never span a word boundary, so words shorter than ``n``
    contribute nothing at that order.
    """
    if n_min < 1 or n_max < n_min:
        raise ValueError(f"invalid n-gram range [{n_min}, {n_max}]")
    grams = Counter()
    for word in text.split():
        size = len(word)
        for n in range(n_min, min(n_max, size) + 1):
            grams.update(word[i:i + n] for i in range(size - n + 1))
    return grams


def word_unigrams(text: str) -> Counter:
    return Counter(text.split())


class FeatureSpace:
    """Injective map from feature strings to contiguous indices."""

    def __init__(self, features: Iterable[str] = ()):
        self.vocabulary: Dict[str, int] = {}
        for f in features:
            if f in self.vocabulary:
                raise ValueError(f"duplicate feature {f!r}")
            self.vocabulary[f] = len(self.vocabulary)

    @property
    def size(self) -> int:
        return len(self.vocabulary)

    def __len__(self):
        return len(self.vocabulary)

    def __contains__(self, feature):
        return feature in self.vocabulary

    def __eq__(self, other):
        return isinstance(other, FeatureSpace) and self.vocabulary == other.vocabulary

    def features(self):
        return list(self.vocabulary)

    def save(self, path: str | Path) -> None:
        lines = (f"{_escape(f)}\t{i}\n" for f, i in self.vocabulary.items())
        Path(path).write_text("".join(lines), encoding="utf-8", newline="\n")

    @classmethod
    def load(cls, path: str | Path) -> "FeatureSpace":
        entries = []
        text = Path(path).read_text(encoding="utf-8")
        for lineno, line in enumerate(text.split("\n"), start=1):
            if not line:
                continue
            feature, sep, index = line.rpartition("\t")
            if not sep:
                raise ValueError(f"{path}:{lineno}: expected 'feature<TAB>index'")
            entries.append((int(index), _unescape(feature)))
        entries.sort()
        if [i for i, _ in entries] != list(range(len(entries))):
            raise ValueError(f"{path}: indices are not contiguous from 0")
        return cls(f for _, f in entries)


def _escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace("\t", "\\t").replace("\n", "\\n")


def _unescape(s: str) -> str:
    out = []
    chars = iter(s)
    for c in chars:
        if c != "\\":
            out.append(c)
            continue
        nxt = next(chars, "")
        out.append({"t": "\t", "n": "\n", "\\": "\\"}.get(nxt, "\\" + nxt))
    return "".join(out)


def build_feature_space(corpus: Sequence[Iterable[str]], min_df: int = 1) -> FeatureSpace:
    """Vocabulary of features with document frequency >= ``min_df``.

    Indices follow first-seen order across the corpus.
    """
    if len(corpus) == 0:
        raise ValueError("cannot build a feature space from an empty corpus")
    df = Counter()
    order = {}
    for doc in corpus:
        for f in doc:
            order.setdefault(f, len(order))
        df.update(set(doc))
    kept = [f for f in order if df[f] >= min_df]
    if not kept:
        raise ValueError(f"no feature reaches min_df={min_df}")
    return FeatureSpace(kept)


def vectorize(features: Counter, space: FeatureSpace) -> SparseVector:
    """Raw counts of in-vocabulary features; unknown features are dropped."""
    vocab = space.vocabulary
    return {vocab[f]: float(c) for f, c in features.items() if f in vocab and c > 0}


def vectorize_many(docs: Sequence[Counter], space: FeatureSpace) -> sp.csr_matrix:
    """Stack count vectors into an ``n_docs x space.size`` CSR matrix."""
    vocab = space.vocabulary
    indptr = [0]
    indices = []
    data = []
    for doc in docs:
        row = sorted((vocab[f], c) for f, c in doc.items() if f in vocab and c > 0)
        indices.extend(i for i, _ in row)
        data.extend(c for _, c in row)
        indptr.append(len(indices))
    return sp.csr_matrix(
        (np.asarray(data, dtype=np.float64),
         np.asarray(indices, dtype=np.int32),
         np.asarray(indptr, dtype=np.int64)),
        shape=(len(docs), space.size),
    )
