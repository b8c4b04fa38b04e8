"""Synthetic two-language corpus with a community-structured follower graph.

Two "languages" draw words from vocabularies that share a configurable
fraction of their entries.  Users belong to communities, each with a
dominant language; a user writes in the community language with
probability ``monolinguality`` and in the other language otherwise.
Follow edges are denser inside communities than across them.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import FrozenSet, List, Tuple

import numpy as np

from .corpus import GoldLabel, LANGUAGES, Tweet, follow_pair

_ALPHABET = np.array(list("abcdefghijklmnopqrstuvwxyz"))


@dataclass(frozen=True)
class SynthConfig:
    seed: int = 0
    n_train: int = 500
    n_test: int = 500
    n_users: int = 100
    n_communities: int = 2
    vocab_size: int = 200
    overlap: float = 0.8
    monolinguality: float = 0.9
    p_in: float = 0.1
    p_out: float = 0.005
    min_words: int = 3
    max_words: int = 8
    languages: Tuple[str, str] = ("es", "ca")

    def __post_init__(self):
        if not 0 <= self.overlap <= 1:
            raise ValueError("overlap must lie in [0, 1]")
        if not 0 <= self.monolinguality <= 1:
            raise ValueError("monolinguality must lie in [0, 1]")
        if not (0 <= self.p_in <= 1 and 0 <= self.p_out <= 1):
            raise ValueError("follow probabilities must lie in [0, 1]")
        if self.n_train < 1 or self.n_test < 0:
            raise ValueError("need at least one training tweet")
        if self.n_users < 1 or not 1 <= self.n_communities <= self.n_users:
            raise ValueError("need 1 <= n_communities <= n_users")
        if self.vocab_size < 1:
            raise ValueError("vocab_size must be >= 1")
        if not 1 <= self.min_words <= self.max_words:
            raise ValueError("need 1 <= min_words <= max_words")
        if len(self.languages) != 2 or len(set(self.languages)) != 2:
            raise ValueError("exactly two distinct languages are required")
        for code in self.languages:
            if code not in LANGUAGES:
                raise ValueError(f"unknown language code {code!r}")


def _words(rng: np.random.Generator, count: int) -> List[str]:
    words: List[str] = []
    seen = set()
    while len(words) < count:
        length = int(rng.integers(3, 9))
        w = "".join(rng.choice(_ALPHABET, size=length))
        if w not in seen:
            seen.add(w)
            words.append(w)
    return words


def generate(cfg: SynthConfig) -> Tuple[List[Tweet], List[Tweet], FrozenSet[Tuple[str, str]]]:
    """Return ``(train, test, follows)``; every tweet carries its gold label."""
    rng = np.random.default_rng(cfg.seed)
    n_shared = int(round(cfg.overlap * cfg.vocab_size))
    n_own = cfg.vocab_size - n_shared
    pool = _words(rng, n_shared + 2 * n_own)
    shared = pool[:n_shared]
    vocab = [shared + pool[n_shared:n_shared + n_own], shared + pool[n_shared + n_own:]]

    width = len(str(cfg.n_users - 1))
    users = [f"u{i:0{width}d}" for i in range(cfg.n_users)]
    community = np.arange(cfg.n_users) % cfg.n_communities
    dominant = community % 2
    stays = rng.random(cfg.n_users) < cfg.monolinguality
    user_lang = np.where(stays, dominant, 1 - dominant)

    follows = set()
    for i in range(cfg.n_users):
        for j in range(i + 1, cfg.n_users):
            p = cfg.p_in if community[i] == community[j] else cfg.p_out
            if rng.random() < p:
                follows.add(follow_pair(users[i], users[j]))

    n_total = cfg.n_train + cfg.n_test
    width = len(str(n_total - 1))
    authors = rng.integers(0, cfg.n_users, size=n_total)
    tweets = []
    for k in range(n_total):
        u = int(authors[k])
        lang = int(user_lang[u])
        length = int(rng.integers(cfg.min_words, cfg.max_words + 1))
        words = rng.choice(len(vocab[lang]), size=length)
        text = " ".join(vocab[lang][w] for w in words)
        tweets.append(Tweet(f"t{k:0{width}d}", users[u], text, GoldLabel.single(cfg.languages[lang])))
    order = rng.permutation(n_total)
    train = [tweets[i] for i in sorted(order[:cfg.n_train])]
    test = [tweets[i] for i in sorted(order[cfg.n_train:])]
    return train, test, frozenset(follows)
