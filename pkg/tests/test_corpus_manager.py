import os

import pytest

from corpus_manager import (
    SplitSpec,
    SyntheticCorpusSpec,
    class_counts,
    generate_synthetic_corpus,
    label_review,
    load_corpus_csv,
    load_raw_reviews,
    minority_share,
    round_half_up,
    split,
)
from domain_types import LabeledDocument, Sentiment
from errors import CorpusFormatError, RatingValidationError, SplitError
from review_extractor import write_corpus_csv


@pytest.mark.parametrize("rating, label", [
    (5, Sentiment.POSITIVE), (4, Sentiment.POSITIVE),
    (3, Sentiment.NEGATIVE), (2, Sentiment.NEGATIVE), (1, Sentiment.NEGATIVE),
])
def test_label_review(rating, label):
    assert label_review(rating) is label


@pytest.mark.parametrize("rating", [0, 6, -1])
def test_label_review_rejects_out_of_range(rating):
    with pytest.raises(RatingValidationError):
        label_review(rating)


def test_load_table1_corpus(fixtures_dir):
    docs = load_corpus_csv(os.path.join(fixtures_dir, "table1_corpus.csv"))
    assert [d.id for d in docs] == [1, 2, 3, 4, 5, 6]
    assert [d.rating for d in docs] == [5, 5, 4, 3, 1, 2]
    assert [d.label for d in docs] == [Sentiment.POSITIVE] * 3 + [Sentiment.NEGATIVE] * 3
    assert docs[5].body.startswith("While we were walking across the park, a young man")


def test_round_trip_through_extractor_csv(fixtures_dir, tmp_path):
    reviews = load_raw_reviews(os.path.join(fixtures_dir, "golden_reviews.csv"))
    out = tmp_path / "copy.csv"
    write_corpus_csv(reviews, str(out))
    with open(os.path.join(fixtures_dir, "golden_reviews.csv"), "rb") as f:
        assert out.read_bytes() == f.read()


def test_bad_score_names_the_row(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("Score,Date,Title,Review\n5,d,t,fine\nfive,d,t,oops\n", encoding="utf-8")
    with pytest.raises(CorpusFormatError) as info:
        load_corpus_csv(str(path))
    assert info.value.row_number == 2
    assert "row 2" in str(info.value)


def test_out_of_range_score(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("Score,Date,Title,Review\n7,d,t,too high\n", encoding="utf-8")
    with pytest.raises(RatingValidationError):
        load_corpus_csv(str(path))


def test_missing_review_column(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("Score,Body\n5,text\n", encoding="utf-8")
    with pytest.raises(CorpusFormatError, match="Review"):
        load_corpus_csv(str(path))


def test_header_only_file_is_an_empty_corpus(tmp_path):
    path = tmp_path / "header.csv"
    path.write_text("Score,Date,Title,Review\n", encoding="utf-8")
    assert load_corpus_csv(str(path)) == []


def test_published_test_set_minority_share():
    corpus = _docs([Sentiment.POSITIVE] * 2714 + [Sentiment.NEGATIVE] * 286)
    assert minority_share(corpus) == pytest.approx(286 / 3000)
    assert minority_share(corpus) < 0.1


def test_empty_and_missing_files(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("", encoding="utf-8")
    with pytest.raises(CorpusFormatError):
        load_corpus_csv(str(empty))
    with pytest.raises(CorpusFormatError):
        load_corpus_csv(str(tmp_path / "nope.csv"))


def _docs(labels):
    return [LabeledDocument(i + 1, f"doc {i}", 5 if l is Sentiment.POSITIVE else 1, l) for i, l in enumerate(labels)]


def test_split_sizes_and_disjointness():
    corpus = _docs([Sentiment.POSITIVE] * 90 + [Sentiment.NEGATIVE] * 10)
    train, test = split(corpus, SplitSpec(test_fraction=0.25, seed=3))
    assert len(test) == 25
    assert len(train) == 75
    assert {d.id for d in train}.isdisjoint({d.id for d in test})
    assert {d.id for d in train} | {d.id for d in test} == {d.id for d in corpus}


def test_stratified_split_keeps_class_shares():
    corpus = _docs([Sentiment.POSITIVE] * 90 + [Sentiment.NEGATIVE] * 10)
    _, test = split(corpus, SplitSpec(test_fraction=0.3, seed=1))
    assert class_counts(test) == {Sentiment.POSITIVE: 27, Sentiment.NEGATIVE: 3}


def test_split_keeps_corpus_order():
    corpus = _docs([Sentiment.POSITIVE] * 20 + [Sentiment.NEGATIVE] * 20)
    train, test = split(corpus, SplitSpec(test_size=10, seed=5))
    assert [d.id for d in train] == sorted(d.id for d in train)
    assert [d.id for d in test] == sorted(d.id for d in test)


def test_split_is_deterministic_per_seed():
    corpus = _docs([Sentiment.POSITIVE] * 50 + [Sentiment.NEGATIVE] * 50)
    first = split(corpus, SplitSpec(seed=11))
    second = split(corpus, SplitSpec(seed=11))
    other = split(corpus, SplitSpec(seed=12))
    assert first == second
    assert first != other


def test_split_test_size_overrides_fraction():
    assert SplitSpec(test_fraction=0.5, test_size=4).test_count(100) == 4


@pytest.mark.parametrize("spec", [SplitSpec(test_fraction=0.99), SplitSpec(test_fraction=0.01), SplitSpec(test_size=10)])
def test_infeasible_split(spec):
    corpus = _docs([Sentiment.POSITIVE] * 5 + [Sentiment.NEGATIVE] * 5)
    with pytest.raises(SplitError):
        split(corpus, spec)


def test_minority_share():
    assert minority_share(_docs([Sentiment.POSITIVE] * 9 + [Sentiment.NEGATIVE])) == pytest.approx(0.1)


def test_synthetic_corpus_shape():
    docs = generate_synthetic_corpus(SyntheticCorpusSpec(total=2000, minority_fraction=0.1, seed=4))
    assert len(docs) == 2000
    assert [d.id for d in docs] == list(range(1, 2001))
    assert class_counts(docs)[Sentiment.NEGATIVE] == 200
    for doc in docs:
        assert doc.label is label_review(doc.rating)
        assert doc.body.endswith(".")
        assert 6 <= len(doc.body[:-1].split()) <= 12


@pytest.mark.parametrize("value, expected", [(2.5, 3), (3.5, 4), (2.4999, 2), (0.5, 1), (7.0, 7)])
def test_round_half_up(value, expected):
    assert round_half_up(value) == expected


def test_half_counts_round_up():
    docs = generate_synthetic_corpus(SyntheticCorpusSpec(total=25, minority_fraction=0.1, seed=1))
    assert class_counts(docs)[Sentiment.NEGATIVE] == 3
    assert SplitSpec(test_fraction=0.25).test_count(10) == 3
    assert SplitSpec(test_fraction=0.25).test_count(18) == 5


def test_synthetic_corpus_is_seeded():
    spec = SyntheticCorpusSpec(total=50, seed=9)
    assert generate_synthetic_corpus(spec) == generate_synthetic_corpus(spec)
    assert generate_synthetic_corpus(spec) != generate_synthetic_corpus(spec.copy(update={"seed": 10}))


def test_noise_free_corpus_uses_own_lexicon_only():
    spec = SyntheticCorpusSpec(total=100, minority_fraction=0.2, noise_rate=0.0, seed=2)
    negative_words = set(spec.negative_lexicon)
    for doc in generate_synthetic_corpus(spec):
        if doc.label is Sentiment.POSITIVE:
            assert not negative_words & set(doc.body[:-1].split())


@pytest.mark.parametrize("overrides", [
    {"minority_fraction": 0.5},
    {"minority_fraction": 0.0},
    {"noise_rate": 1.5},
    {"words_per_review": (5, 2)},
    {"positive_lexicon": []},
    {"neutral_lexicon": ["park", "dirty"]},
])
def test_synthetic_spec_validation(overrides):
    with pytest.raises(ValueError):
        SyntheticCorpusSpec(**overrides)
