"""
Shared domain types for the review sentiment toolkit.
"""
from dataclasses import dataclass
from enum import Enum


class Sentiment(str, Enum):
    """Binary review sentiment. Positive is the majority class and the scored class."""

    POSITIVE = "positive"
    NEGATIVE = "negative"

    @property
    def sign(self) -> int:
        """+1 for Positive, -1 for Negative."""
        return 1 if self is Sentiment.POSITIVE else -1

    @classmethod
    def from_sign(cls, value: float) -> "Sentiment":
        """Map a decision value to a class; zero counts as Positive."""
        return cls.POSITIVE if value >= 0 else cls.NEGATIVE


@dataclass(frozen=True)
class RawReview:
    """One review block as found on a saved review page."""

    rating: int
    date: str
    title: str
    body: str
    source_page: str = ""

    def __post_init__(self):
        if self.rating not in (1, 2, 3, 4, 5):
            raise ValueError(f"rating must be 1..5, got {self.rating}")
        if "\n" in self.body or "\r" in self.body:
            raise ValueError("review body must not contain newlines")


@dataclass(frozen=True)
class LabeledDocument:
    """A review with its rating-derived sentiment; id is the row ordinal."""

    id: int
    body: str
    rating: int
    label: Sentiment
