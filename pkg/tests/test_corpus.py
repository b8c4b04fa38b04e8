import math
import warnings

import pytest
from hypothesis import given, strategies as st

from langprop.corpus import (
    LANGUAGES,
    Dataset,
    GoldLabel,
    ParseError,
    Tweet,
    format_follows,
    format_tweets,
    parse_follows,
    parse_tweets,
    seed_distribution,
)


def test_parse_single_label():
    (t,) = parse_tweets(b"1\tu1\tes\thola")
    assert t == Tweet("1", "u1", "hola", GoldLabel.single("es"))


def test_parse_ambiguous_label():
    (t,) = parse_tweets("2\tu1\tes/ca\tbon dia".encode())
    assert t.gold.kind == "ambiguous"
    assert t.gold.members == {"es", "ca"}
    assert t.text == "bon dia"


def test_parse_unlabelled():
    (t,) = parse_tweets(b"3\tu2\t\thello")
    assert t.gold is None


def test_parse_und_and_order():
    tweets = parse_tweets(b"b\tu\tund\tx\na\tu\ten\ty\n")
    assert [t.id for t in tweets] == ["b", "a"]
    assert tweets[0].gold == GoldLabel.undecided()


@pytest.mark.parametrize(
    "line, fragment",
    [
        (b"1\tu1\tes", "expected 4"),
        (b"1\tu1\tes\thola\textra", "expected 4"),
        (b"1\tu1\txx\thola", "unknown language"),
        (b"1\tu1\tes/xx\thola", "unknown language"),
        (b"1\tu1\tes/es\thola", "repeated"),
        (b"1\t\tes\thola", "empty author"),
    ],
)
def test_parse_errors(line, fragment):
    with pytest.raises(ParseError, match=fragment):
        parse_tweets(line)


def test_parse_error_cites_line_number():
    with pytest.raises(ParseError) as exc:
        parse_tweets(b"1\tu\tes\tok\n2\tu\tes\n", source="f.tsv")
    assert exc.value.lineno == 2
    assert "f.tsv:2" in str(exc.value)


def test_duplicate_id_rejected():
    with pytest.raises(ParseError, match="duplicate"):
        parse_tweets(b"1\tu\tes\ta\n1\tu\tca\tb\n")


def test_text_keeps_non_lf_line_breaks():
    (t,) = parse_tweets("1\tu\t\ta b\rc".encode())
    assert t.text == "a b\rc"


def test_follows_unordered_dedup():
    assert parse_follows(b"u1\tu2\nu2\tu1\n") == {("u1", "u2")}


def test_follows_self_loop_skipped():
    with pytest.warns(UserWarning, match="self-loop"):
        assert parse_follows(b"u1\tu1\n") == frozenset()


def test_follows_counting():
    assert len(parse_follows(b"a\tb\nb\tc\nc\td\n")) == 3


def test_follows_malformed():
    with pytest.raises(ParseError):
        parse_follows(b"a\tb\tc\n")


def test_gold_label_invariants():
    with pytest.raises(ValueError):
        GoldLabel("single", frozenset({"es", "ca"}))
    with pytest.raises(ValueError):
        GoldLabel("ambiguous", frozenset({"es"}))
    with pytest.raises(ValueError):
        GoldLabel("undecided", frozenset({"es"}))


def test_dataset_invariants():
    with pytest.raises(ValueError):
        Dataset((Tweet("1", "u", "a"), Tweet("1", "u", "b")))
    with pytest.raises(ValueError):
        Dataset((), frozenset({("u", "u")}))
    d = Dataset((), frozenset({("b", "a")}))
    assert d.follows == {("a", "b")}


def test_seed_distribution_examples():
    assert seed_distribution(GoldLabel.single("es")) == {"es": 1.0}
    assert seed_distribution(GoldLabel.ambiguous(["es", "ca"])) == {"es": 0.5, "ca": 0.5}
    und = seed_distribution(GoldLabel.undecided())
    assert set(und) == set(LANGUAGES)
    assert all(v == pytest.approx(1 / 6) for v in und.values())
    assert abs(sum(und.values()) - 1.0) <= 1e-12


gold_labels = st.one_of(
    st.none(),
    st.just(GoldLabel.undecided()),
    st.sampled_from(LANGUAGES).map(GoldLabel.single),
    st.sets(st.sampled_from(LANGUAGES), min_size=2).map(GoldLabel.ambiguous),
)
field_text = st.text(st.characters(blacklist_characters="\t\n", blacklist_categories=("Cs",)), min_size=1)


@given(st.lists(st.tuples(field_text, gold_labels, st.text(st.characters(blacklist_characters="\t\n", blacklist_categories=("Cs",)))),
                max_size=20))
def test_tweets_round_trip(rows):
    tweets = tuple(Tweet(f"id{i}", author, text, gold) for i, (author, gold, text) in enumerate(rows))
    assert parse_tweets(format_tweets(tweets).encode("utf-8")) == tweets


@given(st.sets(st.tuples(st.text("abcdef", min_size=1, max_size=3), st.text("abcdef", min_size=1, max_size=3)).filter(lambda p: p[0] != p[1]),
               max_size=15))
def test_follows_round_trip(pairs):
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        d = Dataset((), frozenset(pairs))
        assert parse_follows(format_follows(d.follows)) == d.follows


@given(gold_labels.filter(lambda g: g is not None))
def test_seed_distributions_sum_to_one(gold):
    dist = seed_distribution(gold)
    assert abs(math.fsum(dist.values()) - 1.0) <= 1e-12
    assert all(v >= 0 for v in dist.values())
