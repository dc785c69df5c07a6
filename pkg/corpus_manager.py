"""
Corpus management module for the review sentiment toolkit.
Loads labeled review corpora, owns the rating-to-sentiment rule,
splits train/test sets and generates synthetic corpora.
"""
import math
from collections import Counter
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from loguru import logger
from pydantic import BaseModel, root_validator, validator

from domain_types import LabeledDocument, RawReview, Sentiment
from errors import CorpusFormatError, RatingValidationError, SplitError

POSITIVE_RATINGS = (4, 5)
NEGATIVE_RATINGS = (1, 2, 3)

DEFAULT_POSITIVE_LEXICON = [
    "beautiful", "lovely", "peaceful", "relaxing", "stunning", "gorgeous", "charming", "pleasant",
    "wonderful", "delightful", "tranquil", "scenic", "clean", "friendly", "spotless", "fantastic",
    "excellent", "calm", "vibrant", "magnificent", "idyllic", "serene", "blooming", "picturesque",
    "enjoyable", "fabulous", "superb", "glorious", "refreshing", "welcoming",
]
DEFAULT_NEGATIVE_LEXICON = [
    "dirty", "crowded", "noisy", "filthy", "unsafe", "rude", "smelly", "littered", "neglected",
    "dangerous", "awful", "terrible", "horrible", "disappointing", "shabby", "overgrown", "vandalised",
    "hassled", "drunk", "chaotic", "grim", "unpleasant", "scary", "broken", "depressing", "rubbish",
    "aggressive", "stinking", "muddy", "gloomy",
]
DEFAULT_NEUTRAL_LEXICON = [
    "park", "pond", "ducks", "swans", "gardens", "paths", "bench", "playground", "statue", "gate",
    "lawn", "trees", "grass", "fountain", "visit", "city", "centre", "lunch", "afternoon", "morning",
    "walk", "stroll", "picnic", "summer", "weather", "family", "children", "entrance", "cafe",
    "shopping", "history", "music", "sunday", "tourists", "bridge", "flowers", "dublin", "stop",
    "hour", "area",
]


def round_half_up(value: float) -> int:
    """Nearest integer with halves rounded up (2.5 -> 3), unlike round()."""
    return int(math.floor(value + 0.5 + 1e-9))


def label_review(rating: int) -> Sentiment:
    """
    Map a 1..5 bubble rating to a sentiment: 4 and 5 are Positive, 1 to 3 Negative.

    Args:
        rating: Bubble rating.

    Returns:
        The review's sentiment.
    """
    if rating in POSITIVE_RATINGS:
        return Sentiment.POSITIVE
    if rating in NEGATIVE_RATINGS:
        return Sentiment.NEGATIVE
    raise RatingValidationError(f"rating must be 1..5, got {rating!r}")


def _read_frame(path: str) -> pd.DataFrame:
    try:
        return pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    except FileNotFoundError as e:
        raise CorpusFormatError("file not found", path=path) from e
    except pd.errors.EmptyDataError as e:
        raise CorpusFormatError("file is empty, expected a header row", path=path) from e
    except (pd.errors.ParserError, UnicodeDecodeError) as e:
        raise CorpusFormatError(f"malformed CSV: {e}", path=path) from e


def _require_columns(frame: pd.DataFrame, columns: Sequence[str], path: str) -> None:
    missing = [column for column in columns if column not in frame.columns]
    if missing:
        raise CorpusFormatError(f"missing column(s) {', '.join(missing)}", path=path)


def _cell(row: pd.Series, column: str, row_number: int, path: str) -> str:
    value = row[column]
    if pd.isna(value):
        raise CorpusFormatError(f"missing {column} field", row_number=row_number, path=path)
    return value


def _parse_rating(text: str, row_number: int, path: str) -> int:
    try:
        rating = int(text.strip())
    except ValueError as e:
        raise CorpusFormatError(f"unparseable Score {text!r}", row_number=row_number, path=path) from e
    if rating not in POSITIVE_RATINGS + NEGATIVE_RATINGS:
        raise RatingValidationError(f"Score {rating} outside 1..5", row_number=row_number, path=path)
    return rating


def load_corpus_csv(path: str) -> List[LabeledDocument]:
    """
    Load a Score,Date,Title,Review CSV as labeled documents.

    Args:
        path: Corpus CSV path.

    Returns:
        Documents with ids equal to their 1-based data row number.
    """
    frame = _read_frame(path)
    _require_columns(frame, ["Score", "Review"], path)

    documents = []
    for offset, (_, row) in enumerate(frame.iterrows()):
        row_number = offset + 1
        rating = _parse_rating(_cell(row, "Score", row_number, path), row_number, path)
        documents.append(LabeledDocument(
            id=row_number,
            body=_cell(row, "Review", row_number, path),
            rating=rating,
            label=label_review(rating),
        ))

    counts = class_counts(documents)
    logger.info(
        f"Loaded {len(documents)} reviews from {path} "
        f"({counts[Sentiment.POSITIVE]} positive, {counts[Sentiment.NEGATIVE]} negative)"
    )
    return documents


def load_raw_reviews(path: str) -> List[RawReview]:
    """
    Load a corpus CSV back into RawReview records (all four fields).

    Args:
        path: Corpus CSV path.

    Returns:
        Records in file order.
    """
    frame = _read_frame(path)
    _require_columns(frame, ["Score", "Date", "Title", "Review"], path)

    reviews = []
    for offset, (_, row) in enumerate(frame.iterrows()):
        row_number = offset + 1
        try:
            reviews.append(RawReview(
                rating=_parse_rating(_cell(row, "Score", row_number, path), row_number, path),
                date=_cell(row, "Date", row_number, path),
                title=_cell(row, "Title", row_number, path),
                body=_cell(row, "Review", row_number, path),
            ))
        except ValueError as e:
            raise CorpusFormatError(str(e), row_number=row_number, path=path) from e
    return reviews


def class_counts(documents: Sequence[LabeledDocument]) -> Dict[Sentiment, int]:
    """Count documents per sentiment; both classes are always present as keys."""
    counts = Counter(document.label for document in documents)
    return {sentiment: counts.get(sentiment, 0) for sentiment in Sentiment}


def minority_share(documents: Sequence[LabeledDocument]) -> float:
    """Share of Negative documents in a corpus."""
    if not documents:
        raise CorpusFormatError("empty corpus has no class shares")
    return class_counts(documents)[Sentiment.NEGATIVE] / len(documents)


class SplitSpec(BaseModel):
    """How a corpus is cut into train and test sets."""

    test_fraction: Optional[float] = 0.25
    test_size: Optional[int] = None
    seed: int = 0
    stratified: bool = True

    class Config:
        extra = "forbid"

    @validator("test_fraction")
    def _fraction_in_range(cls, value):
        if value is not None and not 0 < value < 1:
            raise ValueError("test_fraction must lie in (0, 1)")
        return value

    @root_validator(skip_on_failure=True)
    def _one_size(cls, values):
        if values.get("test_size") is not None:
            values["test_fraction"] = None
        elif values.get("test_fraction") is None:
            raise ValueError("either test_fraction or test_size is required")
        return values

    def test_count(self, corpus_size: int) -> int:
        """Absolute number of test documents for a corpus of the given size."""
        if self.test_size is not None:
            return self.test_size
        return round_half_up(corpus_size * self.test_fraction)


def _allocate(class_sizes: List[int], total: int) -> List[int]:
    # largest remainder; ties go to the earlier class
    corpus_size = sum(class_sizes)
    quotas = [size * total / corpus_size for size in class_sizes]
    counts = [int(q) for q in quotas]
    order = sorted(range(len(quotas)), key=lambda i: (-(quotas[i] - counts[i]), i))
    for i in order[: total - sum(counts)]:
        counts[i] += 1
    return counts


def split(corpus: Sequence[LabeledDocument], spec: SplitSpec) -> Tuple[List[LabeledDocument], List[LabeledDocument]]:
    """
    Partition a corpus into train and test sets.

    Args:
        corpus: Documents to split.
        spec: Test size, seed and stratification.

    Returns:
        (train, test), each in corpus order.
    """
    if not corpus:
        raise SplitError("cannot split an empty corpus")
    n_test = spec.test_count(len(corpus))
    if n_test < 1:
        raise SplitError(f"test set would be empty ({len(corpus)} documents)")
    if n_test >= len(corpus):
        raise SplitError(f"test size {n_test} leaves no training documents out of {len(corpus)}")

    rng = np.random.default_rng(spec.seed)
    if spec.stratified:
        groups = [[i for i, d in enumerate(corpus) if d.label is sentiment] for sentiment in Sentiment]
        groups = [group for group in groups if group]
        per_class = _allocate([len(group) for group in groups], n_test)
        test_positions = set()
        for group, count in zip(groups, per_class):
            permuted = rng.permutation(len(group))
            test_positions.update(group[p] for p in permuted[:count])
    else:
        test_positions = set(rng.permutation(len(corpus))[:n_test].tolist())

    train = [d for i, d in enumerate(corpus) if i not in test_positions]
    test = [d for i, d in enumerate(corpus) if i in test_positions]
    logger.debug(f"Split {len(corpus)} documents into {len(train)} train / {len(test)} test")
    return train, test


class SyntheticCorpusSpec(BaseModel):
    """Parameters of a bag-of-lexicon synthetic review corpus."""

    total: int = 2000
    minority_fraction: float = 0.1
    positive_lexicon: List[str] = DEFAULT_POSITIVE_LEXICON
    negative_lexicon: List[str] = DEFAULT_NEGATIVE_LEXICON
    neutral_lexicon: List[str] = DEFAULT_NEUTRAL_LEXICON
    words_per_review: Tuple[int, int] = (6, 12)
    neutral_rate: float = 0.5
    noise_rate: float = 0.15
    seed: int = 0

    class Config:
        extra = "forbid"

    @validator("total")
    def _positive_total(cls, value):
        if value < 1:
            raise ValueError("total must be at least 1")
        return value

    @validator("minority_fraction")
    def _minority_below_half(cls, value):
        if not 0 < value < 0.5:
            raise ValueError("minority_fraction must lie in (0, 0.5)")
        return value

    @validator("positive_lexicon", "negative_lexicon", "neutral_lexicon")
    def _non_empty_lexicon(cls, value):
        if not value:
            raise ValueError("lexicon must not be empty")
        return value

    @validator("words_per_review")
    def _valid_range(cls, value):
        low, high = value
        if low < 1 or high < low:
            raise ValueError("words_per_review must satisfy 1 <= low <= high")
        return value

    @validator("neutral_rate", "noise_rate")
    def _probability(cls, value):
        if not 0 <= value <= 1:
            raise ValueError("rates must lie in [0, 1]")
        return value

    @root_validator(skip_on_failure=True)
    def _disjoint_lexicons(cls, values):
        positive = set(values["positive_lexicon"])
        negative = set(values["negative_lexicon"])
        neutral = set(values["neutral_lexicon"])
        if positive & negative or positive & neutral or negative & neutral:
            raise ValueError("lexicons must be pairwise disjoint")
        return values


def generate_synthetic_corpus(spec: SyntheticCorpusSpec) -> List[LabeledDocument]:
    """
    Generate a labeled corpus whose class signal lives in disjoint lexicons.

    Each word is neutral with probability neutral_rate; otherwise it comes
    from the review's own class lexicon, or from the other class's lexicon
    with probability noise_rate.

    Args:
        spec: Corpus size, class balance, lexicons, noise and seed.

    Returns:
        Documents with ids 1..total.
    """
    rng = np.random.default_rng(spec.seed)
    n_negative = round_half_up(spec.total * spec.minority_fraction)
    negative_positions = set(rng.permutation(spec.total)[:n_negative].tolist())
    low, high = spec.words_per_review

    documents = []
    for position in range(spec.total):
        negative = position in negative_positions
        own = spec.negative_lexicon if negative else spec.positive_lexicon
        other = spec.positive_lexicon if negative else spec.negative_lexicon
        rating = int(rng.choice(NEGATIVE_RATINGS if negative else POSITIVE_RATINGS))

        words = []
        for _ in range(int(rng.integers(low, high + 1))):
            if rng.random() < spec.neutral_rate:
                lexicon = spec.neutral_lexicon
            elif rng.random() < spec.noise_rate:
                lexicon = other
            else:
                lexicon = own
            words.append(lexicon[int(rng.integers(len(lexicon)))])

        documents.append(LabeledDocument(
            id=position + 1,
            body=" ".join(words) + ".",
            rating=rating,
            label=label_review(rating),
        ))

    logger.info(f"Generated {spec.total} synthetic reviews ({n_negative} negative)")
    return documents
