"""
Review page extraction module for the review sentiment toolkit.
Parses saved TripAdvisor-style review pages into structured records
and writes them to the Score,Date,Title,Review corpus CSV.
"""
import csv
import os
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from bs4 import BeautifulSoup
from bs4.builder import ParserRejectedMarkup
from loguru import logger
from pydantic import BaseModel, validator

from domain_types import RawReview
from errors import BubbleDecodeError, ConfigError, DataError, ExtractionError

CSV_HEADER = ["Score", "Date", "Title", "Review"]
BUBBLE_PATTERN = re.compile(r"(?:^|\s)bubble_(\d+)(?=\s|$)")
VALID_BUBBLE_SUFFIXES = {10: 1, 20: 2, 30: 3, 40: 4, 50: 5}
PAGE_EXTENSIONS = (".html", ".htm")


class PageSelectors(BaseModel):
    """Class names locating the parts of one review block."""

    review_container: str = "Dq9MAugU T870kzTX LnVzGwUB"
    bubble_class_prefix: str = "ui_bubble_rating bubble_"
    date_class: str = "_34Xs-BQm"
    title_class: str = "glasR4aX"
    body_class: str = "IRsGHoPm"

    class Config:
        extra = "forbid"
        allow_mutation = False

    @validator("*")
    def _non_empty(cls, value: str) -> str:
        if not value or not value.strip():
            raise ValueError("selector must be non-empty")
        return value


def load_selectors(path: Optional[str]) -> PageSelectors:
    """
    Load page selectors from the [selectors] table of a TOML file.

    Args:
        path: TOML file path, or None for the built-in defaults.

    Returns:
        Validated PageSelectors.
    """
    if path is None:
        return PageSelectors()

    from pipeline_config import read_toml

    data = read_toml(path)
    try:
        return PageSelectors(**data.get("selectors", data))
    except ValueError as e:
        raise ConfigError(f"Invalid selectors in {path}: {e}") from e


@dataclass
class ParsedPage:
    """Reviews found on one page plus the number of broken blocks skipped."""

    reviews: List[RawReview] = field(default_factory=list)
    skipped: int = 0


def decode_bubble_score(class_attribute: str) -> int:
    """
    Decode a bubble rating class attribute such as "ui_bubble_rating bubble_50".

    Args:
        class_attribute: The full class attribute of the rating element.

    Returns:
        Rating 1..5.
    """
    match = BUBBLE_PATTERN.search(class_attribute or "")
    if not match:
        raise BubbleDecodeError(class_attribute)
    suffix = int(match.group(1))
    if suffix not in VALID_BUBBLE_SUFFIXES:
        raise BubbleDecodeError(class_attribute)
    return VALID_BUBBLE_SUFFIXES[suffix]


def _css_for_classes(class_names: str) -> str:
    return "".join("." + name for name in class_names.split())


def _flatten_text(text: str) -> str:
    # rendered text: newlines become single spaces, whitespace runs collapse
    text = re.sub(r"\r\n|\r|\n", " ", text)
    return re.sub(r"[ \t\f\v]+", " ", text).strip()


def _find_bubble(container, prefix: str):
    for element in container.find_all(True):
        class_attribute = " ".join(element.get("class", []))
        if prefix in class_attribute:
            return element
    return None


def _parse_block(container, selectors: PageSelectors, source_page: str) -> RawReview:
    bubble = _find_bubble(container, selectors.bubble_class_prefix)
    date_element = container.select_one(_css_for_classes(selectors.date_class))
    title_element = container.select_one(_css_for_classes(selectors.title_class))
    body_element = container.select_one(_css_for_classes(selectors.body_class))

    missing = [
        name for name, element in (
            ("rating", bubble), ("date", date_element), ("title", title_element), ("body", body_element)
        ) if element is None
    ]
    if missing:
        raise LookupError(f"missing {', '.join(missing)}")

    date = date_element.get("title")
    if date is None:
        raise LookupError("date element has no title attribute")

    return RawReview(
        rating=decode_bubble_score(" ".join(bubble.get("class", []))),
        date=date.strip(),
        title=_flatten_text(title_element.get_text()),
        body=_flatten_text(body_element.get_text()),
        source_page=source_page,
    )


def parse_review_page(html: str, selectors: Optional[PageSelectors] = None, source_page: str = "") -> ParsedPage:
    """
    Parse one saved review page.

    Blocks missing any sub-element (or carrying an undecodable rating) are
    skipped and counted rather than failing the page.

    Args:
        html: Page text.
        selectors: Class names of the review parts; defaults when omitted.
        source_page: Identifier stored on every record.

    Returns:
        ParsedPage with the reviews in document order.
    """
    selectors = selectors or PageSelectors()
    if not isinstance(html, (str, bytes)):
        raise ExtractionError(f"{source_page or 'page'}: expected document text, got {type(html).__name__}")
    try:
        soup = BeautifulSoup(html, "lxml")
    except ParserRejectedMarkup as e:
        raise ExtractionError(f"{source_page or 'page'}: unparseable document: {e}") from e

    page = ParsedPage()
    for index, container in enumerate(soup.select(_css_for_classes(selectors.review_container))):
        try:
            page.reviews.append(_parse_block(container, selectors, source_page))
        except (LookupError, BubbleDecodeError) as e:
            page.skipped += 1
            logger.debug(f"{source_page}: skipped review block {index}: {e}")

    logger.debug(f"{source_page}: parsed {len(page.reviews)} reviews, skipped {page.skipped}")
    return page


def write_corpus_csv(reviews: List[RawReview], path: str) -> int:
    """
    Write reviews as an RFC-4180 CSV with header Score,Date,Title,Review.

    Args:
        reviews: Records to write.
        path: Output file path.

    Returns:
        Number of review rows written.
    """
    try:
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\r\n")
            writer.writerow(CSV_HEADER)
            for review in reviews:
                writer.writerow([review.rating, review.date, review.title, review.body])
    except OSError as e:
        raise DataError(f"Cannot write corpus CSV {path}: {e}") from e
    return len(reviews)


class ReviewExtractor:
    """
    Runs page parsing over a directory of saved review pages.
    """

    def __init__(self, selectors: Optional[PageSelectors] = None):
        """
        Initialize the extractor.

        Args:
            selectors: Class names of the review parts; defaults when omitted.
        """
        self.selectors = selectors or PageSelectors()

    def process_page(self, page_path: str) -> Dict:
        """
        Parse one page file.

        Args:
            page_path: Path to an HTML file.

        Returns:
            Dictionary with page name, reviews, skip count, success flag and error.
        """
        source_page = os.path.basename(page_path)
        page_info = {
            "source_page": source_page,
            "reviews": [],
            "skipped": 0,
            "success": False,
            "error": None,
        }

        try:
            with open(page_path, "r", encoding="utf-8") as f:
                html = f.read()
        except UnicodeDecodeError as e:
            page_info["error"] = str(ExtractionError(f"{source_page}: not UTF-8 text: {e}"))
            return page_info
        except OSError as e:
            page_info["error"] = f"{source_page}: {e}"
            return page_info

        try:
            parsed = parse_review_page(html, self.selectors, source_page)
        except ExtractionError as e:
            page_info["error"] = str(e)
            return page_info

        page_info["reviews"] = parsed.reviews
        page_info["skipped"] = parsed.skipped
        page_info["success"] = True
        return page_info

    def process_directory(self, fixtures_dir: str) -> List[Dict]:
        """
        Parse every HTML page in a directory, in file-name order.

        Args:
            fixtures_dir: Directory holding saved pages.

        Returns:
            One page info dictionary per file.
        """
        if not os.path.isdir(fixtures_dir):
            raise DataError(f"Page directory not found: {fixtures_dir}")

        names = sorted(n for n in os.listdir(fixtures_dir) if n.lower().endswith(PAGE_EXTENSIONS))
        results = []
        for name in names:
            page_info = self.process_page(os.path.join(fixtures_dir, name))
            if page_info["success"]:
                logger.info(f"{name}: {len(page_info['reviews'])} reviews, {page_info['skipped']} skipped")
            else:
                logger.warning(f"{name}: {page_info['error']}")
            results.append(page_info)
        return results

    def extract_to_csv(self, fixtures_dir: str, out_path: str) -> Dict:
        """
        Parse a page directory and write all reviews to one corpus CSV.

        Args:
            fixtures_dir: Directory holding saved pages.
            out_path: Corpus CSV to write.

        Returns:
            Summary with page, review, skip and failure counts.
        """
        pages = self.process_directory(fixtures_dir)
        reviews = [review for page in pages for review in page["reviews"]]
        written = write_corpus_csv(reviews, out_path)
        return {
            "pages": len(pages),
            "failed_pages": sum(1 for page in pages if not page["success"]),
            "reviews": written,
            "skipped": sum(page["skipped"] for page in pages),
            "out_path": out_path,
        }
