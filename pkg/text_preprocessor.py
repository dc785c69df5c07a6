"""
Text preprocessing module for the review sentiment toolkit.
Turns raw review bodies into normalized token sequences: cleaning,
tokenization, negation-scope marking, stopword removal and stemming.
"""
import hashlib
import html
import os
import re
import unicodedata
from dataclasses import dataclass, field
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple

from loguru import logger

from errors import ConfigError
from porter_stemmer import stem_to_fixpoint

DATA_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "data")
DEFAULT_STOPWORDS_PATH = os.path.join(DATA_DIR, "stopwords_en.txt")
DEFAULT_TRIGGERS_PATH = os.path.join(DATA_DIR, "negation_triggers.txt")

SENTINEL = "<P>"
NEGATION_PREFIX = "NOT_"
DEFAULT_TERMINATORS = frozenset({"but"})

TokenSequence = Tuple[str, ...]

# private-use placeholders keep markers, contractions and boundaries
# intact while the punctuation passes run
_MARK = "\ue000"
_NT = "\ue001"
_BOUNDARY = "\ue002"

_TAG_RE = re.compile(r"<[^>]*>")
_MARKER_RE = re.compile(r"\bnot_(?=[^\W\d_])")
_CONTRACTION_RE = re.compile(r"n't\b")
_DIGIT_RE = re.compile(r"\d+")
_SENTENCE_PUNCT_RE = re.compile(r"[.!?;:]+")
_OTHER_PUNCT_RE = re.compile(r"[^\w\s" + _MARK + _NT + _BOUNDARY + r"]|_")
_SENTINEL_RUN_RE = re.compile(re.escape(SENTINEL) + r"(?:\s+" + re.escape(SENTINEL) + r")+")
_WHITESPACE_RE = re.compile(r"\s+")


def read_word_list(path: str) -> List[str]:
    """
    Read a one-token-per-line UTF-8 file; blank lines and # comments are ignored.

    Args:
        path: File path.

    Returns:
        Lowercased tokens in file order.
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            lines = f.read().splitlines()
    except OSError as e:
        raise ConfigError(f"Cannot read word list {path}: {e}") from e
    return [line.strip().lower() for line in lines if line.strip() and not line.lstrip().startswith("#")]


@dataclass(frozen=True)
class NegationLexicon:
    """Negation triggers and the words that close a negation scope."""

    triggers: FrozenSet[str]
    scope_terminators: FrozenSet[str] = DEFAULT_TERMINATORS

    def __post_init__(self):
        if not self.triggers:
            raise ConfigError("negation lexicon needs at least one trigger")
        if any(t != t.lower() for t in self.triggers):
            raise ConfigError("negation triggers must be lowercase")

    @classmethod
    def from_file(cls, path: str = DEFAULT_TRIGGERS_PATH,
                  scope_terminators: Iterable[str] = DEFAULT_TERMINATORS) -> "NegationLexicon":
        return cls(frozenset(read_word_list(path)), frozenset(w.lower() for w in scope_terminators))


@dataclass(frozen=True)
class StopwordList:
    """Lowercase stopwords."""

    words: FrozenSet[str] = field(default_factory=frozenset)

    @classmethod
    def from_file(cls, path: str = DEFAULT_STOPWORDS_PATH) -> "StopwordList":
        return cls(frozenset(read_word_list(path)))

    def __contains__(self, word: str) -> bool:
        return word in self.words


def normalize(raw: str) -> str:
    """
    Clean raw review text.

    Lowercases, strips HTML tags, decodes entities, removes digits, turns
    sentence punctuation into a single <P> boundary and other punctuation
    into spaces. Contractions ending in n't are split off; NOT_ markers
    already present are kept.

    Args:
        raw: Any text.

    Returns:
        Normalized text.
    """
    text = unicodedata.normalize("NFKC", raw or "")
    text = _TAG_RE.sub(" ", text)
    text = html.unescape(text)
    text = text.lower().replace("\u2019", "'")
    text = _MARKER_RE.sub(_MARK, text)
    text = _CONTRACTION_RE.sub(" " + _NT, text)
    text = text.replace("'", "")
    text = _DIGIT_RE.sub("", text)
    text = _SENTENCE_PUNCT_RE.sub(" " + _BOUNDARY + " ", text)
    text = _OTHER_PUNCT_RE.sub(" ", text)
    text = text.replace(_BOUNDARY, SENTINEL).replace(_NT, "n't").replace(_MARK, NEGATION_PREFIX)
    text = _WHITESPACE_RE.sub(" ", text).strip()
    return _SENTINEL_RUN_RE.sub(SENTINEL, text)


def tokenize(normalized: str) -> List[str]:
    """Split normalized text on whitespace; <P> boundaries stay as tokens."""
    return normalized.split()


def apply_negation_scope(tokens: Sequence[str], lexicon: NegationLexicon) -> List[str]:
    """
    Mark tokens inside negation scopes with the NOT_ prefix.

    A trigger opens (or, inside an open scope, flips) the scope; a <P>
    boundary or a terminator word closes it. Triggers and boundaries are
    dropped. Two triggers in one scope cancel out.

    Args:
        tokens: Tokens including <P> boundaries.
        lexicon: Triggers and terminators.

    Returns:
        Content tokens, marked where negated.
    """
    marked = []
    negated = False
    for token in tokens:
        if token == SENTINEL:
            negated = False
        elif token in lexicon.triggers:
            negated = not negated
        elif token in lexicon.scope_terminators:
            negated = False
            marked.append(token)
        else:
            base, already = _split_marker(token)
            if already != negated:
                marked.append(NEGATION_PREFIX + base)
            else:
                marked.append(base)
    return marked


def _split_marker(token: str) -> Tuple[str, bool]:
    if token.startswith(NEGATION_PREFIX) and len(token) > len(NEGATION_PREFIX):
        return token[len(NEGATION_PREFIX):], True
    return token, False


def render(tokens: Sequence[str]) -> str:
    """Join a token sequence back into text."""
    return " ".join(tokens)


class TextPreprocessor:
    """
    Holds a stoplist and negation lexicon and runs the full preprocessing chain.
    """

    def __init__(self, stoplist: Optional[StopwordList] = None, lexicon: Optional[NegationLexicon] = None):
        """
        Initialize the preprocessor.

        Args:
            stoplist: Stopwords; the shipped English list when omitted.
            lexicon: Negation triggers and terminators; the shipped list when omitted.
        """
        lexicon = lexicon or NegationLexicon.from_file()
        stoplist = stoplist or StopwordList.from_file()

        overlap = stoplist.words & lexicon.triggers
        if overlap:
            logger.warning(f"Dropping negation triggers from the stoplist: {', '.join(sorted(overlap))}")
            stoplist = StopwordList(stoplist.words - lexicon.triggers)

        self.stoplist = stoplist
        self.lexicon = lexicon

    @classmethod
    def from_paths(cls, stoplist_path: Optional[str] = None, lexicon_path: Optional[str] = None,
                   scope_terminators: Iterable[str] = DEFAULT_TERMINATORS) -> "TextPreprocessor":
        return cls(
            StopwordList.from_file(stoplist_path or DEFAULT_STOPWORDS_PATH),
            NegationLexicon.from_file(lexicon_path or DEFAULT_TRIGGERS_PATH, scope_terminators),
        )

    def preprocess(self, raw: str) -> TokenSequence:
        """
        normalize -> tokenize -> negation scope -> stopword removal -> stemming.

        Stems are taken to their Porter fixpoint, and a stem that lands on a
        stopword, trigger or scope terminator is dropped, so the output is
        stable when preprocessed again.

        Args:
            raw: Review text.

        Returns:
            Stemmed token sequence.
        """
        tokens = apply_negation_scope(tokenize(normalize(raw)), self.lexicon)
        result = []
        for token in tokens:
            base, negated = _split_marker(token)
            if base in self.stoplist:
                continue
            stemmed = stem_to_fixpoint(base)
            if stemmed and not self._is_function_word(stemmed):
                result.append(NEGATION_PREFIX + stemmed if negated else stemmed)
        return tuple(result)

    def _is_function_word(self, word: str) -> bool:
        return word in self.stoplist or word in self.lexicon.triggers or word in self.lexicon.scope_terminators

    def preprocess_all(self, bodies: Iterable[str]) -> List[TokenSequence]:
        return [self.preprocess(body) for body in bodies]

    def fingerprint(self) -> str:
        """SHA-256 over the stoplist, triggers, terminators and stemming choice."""
        digest = hashlib.sha256()
        for label, words in (
            ("stopwords", self.stoplist.words),
            ("triggers", self.lexicon.triggers),
            ("terminators", self.lexicon.scope_terminators),
        ):
            digest.update(label.encode("utf-8"))
            for word in sorted(words):
                digest.update(b"\x00" + word.encode("utf-8"))
            digest.update(b"\x01")
        digest.update(b"stemmer=porter-fixpoint;sentinel=" + SENTINEL.encode("utf-8"))
        return digest.hexdigest()


def preprocess(raw: str, stoplist: Optional[StopwordList] = None,
               lexicon: Optional[NegationLexicon] = None) -> TokenSequence:
    """Module-level shortcut for TextPreprocessor(stoplist, lexicon).preprocess(raw)."""
    return TextPreprocessor(stoplist, lexicon).preprocess(raw)
