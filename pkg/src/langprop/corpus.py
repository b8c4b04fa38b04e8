"""Tweets, gold labels and the follower edge list, plus their TSV formats.

``tweets.tsv`` holds one tweet per line with four tab-separated fields::

    id <TAB> author <TAB> label <TAB> text

The label is a language code (``es``), a ``/``-joined set for ambiguous
tweets (``es/ca``), ``und``, or empty for unlabelled tweets.
``follows.tsv`` holds one ``userA <TAB> userB`` pair per line.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, Optional, Tuple

#: The closed set of concrete language codes, in tie-break order.
LANGUAGES: Tuple[str, ...] = ("es", "pt", "ca", "en", "gl", "eu")
UND = "und"
AMB = "amb"
#: Evaluation categories, in report order.
CATEGORIES: Tuple[str, ...] = LANGUAGES + (AMB, UND)

LabelDistribution = Dict[str, float]


class ParseError(ValueError):
    """Raised for malformed input files; carries the offending line number."""

    def __init__(self, message: str, lineno: Optional[int] = None, source: Optional[str] = None):
        self.lineno = lineno
        self.source = source
        where = ""
        if source is not None:
            where += f"{source}:"
        if lineno is not None:
            where += f"{lineno}:"
        super().__init__(f"{where} {message}" if where else message)


@dataclass(frozen=True)
class GoldLabel:
    kind: str  # "single" | "ambiguous" | "undecided"
    members: FrozenSet[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "members", frozenset(self.members))
        unknown = self.members - set(LANGUAGES)
        if unknown:
            raise ValueError(f"unknown language code(s): {sorted(unknown)}")
        n = len(self.members)
        if self.kind == "single" and n != 1:
            raise ValueError("single gold label needs exactly one member")
        if self.kind == "ambiguous" and n < 2:
            raise ValueError("ambiguous gold label needs at least two members")
        if self.kind == "undecided" and n != 0:
            raise ValueError("undecided gold label carries no members")
        if self.kind not in ("single", "ambiguous", "undecided"):
            raise ValueError(f"unknown gold label kind {self.kind!r}")

    @classmethod
    def single(cls, code: str) -> "GoldLabel":
        return cls("single", frozenset([code]))

    @classmethod
    def ambiguous(cls, codes: Iterable[str]) -> "GoldLabel":
        return cls("ambiguous", frozenset(codes))

    @classmethod
    def undecided(cls) -> "GoldLabel":
        return cls("undecided")

    @property
    def category(self) -> str:
        """Evaluation category this gold label is scored under."""
        if self.kind == "single":
            return next(iter(self.members))
        return AMB if self.kind == "ambiguous" else UND

    def ordered_members(self) -> Tuple[str, ...]:
        return tuple(code for code in LANGUAGES if code in self.members)

    def to_field(self) -> str:
        if self.kind == "undecided":
            return UND
        return "/".join(self.ordered_members())

    @classmethod
    def from_field(cls, value: str) -> Optional["GoldLabel"]:
        """Parse a label column; empty means unlabelled (``None``)."""
        if value == "":
            return None
        if value == UND:
            return cls.undecided()
        codes = value.split("/")
        for code in codes:
            if code not in LANGUAGES:
                raise ValueError(f"unknown language code {code!r}")
        if len(codes) == 1:
            return cls.single(codes[0])
        if len(set(codes)) != len(codes):
            raise ValueError(f"repeated code in ambiguous label {value!r}")
        return cls.ambiguous(codes)


@dataclass(frozen=True)
class Tweet:
    id: str
    author: str
    text: str
    gold: Optional[GoldLabel] = None

    def __post_init__(self):
        if not self.author:
            raise ValueError(f"tweet {self.id!r} has an empty author")


def follow_pair(a: str, b: str) -> Tuple[str, str]:
    """Canonical unordered representation of a follow relation."""
    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True)
class Dataset:
    tweets: Tuple[Tweet, ...] = ()
    follows: FrozenSet[Tuple[str, str]] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "tweets", tuple(self.tweets))
        pairs = set()
        for a, b in self.follows:
            if a == b:
                raise ValueError(f"self-loop follow pair for user {a!r}")
            pairs.add(follow_pair(a, b))
        object.__setattr__(self, "follows", frozenset(pairs))
        seen = set()
        for t in self.tweets:
            if t.id in seen:
                raise ValueError(f"duplicate tweet id {t.id!r}")
            seen.add(t.id)

    def labelled(self) -> Tuple[Tweet, ...]:
        return tuple(t for t in self.tweets if t.gold is not None)

    def users(self) -> Tuple[str, ...]:
        """Authors in first-seen order, then follow-only users sorted."""
        order = dict.fromkeys(t.author for t in self.tweets)
        extra = sorted({u for pair in self.follows for u in pair} - order.keys())
        return tuple(order) + tuple(extra)


def _lines(data: bytes | str):
    text = data.decode("utf-8") if isinstance(data, (bytes, bytearray)) else data
    # only LF separates records; other Unicode line breaks are legal tweet text
    for lineno, line in enumerate(text.split("\n"), start=1):
        if line:
            yield lineno, line


def parse_tweets(data: bytes | str, source: Optional[str] = None) -> Tuple[Tweet, ...]:
    """Parse ``tweets.tsv`` content, preserving input order."""
    tweets = []
    seen = set()
    for lineno, line in _lines(data):
        fields = line.split("\t")
        if len(fields) != 4:
            raise ParseError(f"expected 4 tab-separated fields, got {len(fields)}", lineno, source)
        tid, author, label, text = fields
        if not tid:
            raise ParseError("empty tweet id", lineno, source)
        if tid in seen:
            raise ParseError(f"duplicate tweet id {tid!r}", lineno, source)
        seen.add(tid)
        try:
            gold = GoldLabel.from_field(label)
            tweets.append(Tweet(tid, author, text, gold))
        except ValueError as exc:
            raise ParseError(str(exc), lineno, source) from None
    return tuple(tweets)


def parse_follows(data: bytes | str, source: Optional[str] = None) -> FrozenSet[Tuple[str, str]]:
    """Parse ``follows.tsv`` into deduplicated unordered pairs.

    Self-loops are skipped with a warning.
    """
    pairs = set()
    for lineno, line in _lines(data):
        fields = line.split("\t")
        if len(fields) != 2 or not fields[0] or not fields[1]:
            raise ParseError("expected 2 non-empty tab-separated fields", lineno, source)
        a, b = fields
        if a == b:
            where = f"{source}:" if source else ""
            warnings.warn(f"{where}{lineno}: skipping self-loop follow for {a!r}", stacklevel=2)
            continue
        pairs.add(follow_pair(a, b))
    return frozenset(pairs)


def format_tweets(tweets: Iterable[Tweet]) -> str:
    lines = []
    for t in tweets:
        if "\t" in t.text or "\n" in t.text:
            raise ValueError(f"tweet {t.id!r}: text cannot contain TAB or LF")
        label = t.gold.to_field() if t.gold is not None else ""
        lines.append(f"{t.id}\t{t.author}\t{label}\t{t.text}\n")
    return "".join(lines)


def format_follows(follows: Iterable[Tuple[str, str]]) -> str:
    return "".join(f"{a}\t{b}\n" for a, b in sorted(follows))


def read_tweets(path: str | Path) -> Tuple[Tweet, ...]:
    path = Path(path)
    return parse_tweets(path.read_bytes(), source=str(path))


def read_follows(path: str | Path) -> FrozenSet[Tuple[str, str]]:
    path = Path(path)
    return parse_follows(path.read_bytes(), source=str(path))


def write_tweets(path: str | Path, tweets: Iterable[Tweet]) -> None:
    Path(path).write_text(format_tweets(tweets), encoding="utf-8", newline="\n")


def write_follows(path: str | Path, follows: Iterable[Tuple[str, str]]) -> None:
    Path(path).write_text(format_follows(follows), encoding="utf-8", newline="\n")


def seed_distribution(gold: GoldLabel) -> LabelDistribution:
    """Initial label distribution for a training tweet.

    A single label is a point mass, an ambiguous set is uniform over its
    members, and ``und`` is uniform over every language.
    """
    if gold.kind == "undecided":
        members = LANGUAGES
    else:
        members = gold.ordered_members()
    p = 1.0 / len(members)
    return {code: p for code in members}
