"""
Porter stemming algorithm.

Implements the published five-step suffix-stripping rule set as written,
without the later extensions some ports add (no "logi" rule, "abli" rather
than "bli"). Only lowercase words should be passed in.
"""
from functools import lru_cache
from typing import Callable, List, Tuple

VOWELS = "aeiou"


def _is_consonant(word: str, i: int) -> bool:
    ch = word[i]
    if ch in VOWELS:
        return False
    if ch == "y":
        return i == 0 or not _is_consonant(word, i - 1)
    return True


def measure(stem: str) -> int:
    """
    Count VC sequences in a stem of the form [C](VC)^m[V].

    Args:
        stem: Lowercase letters.

    Returns:
        The measure m.
    """
    m = 0
    previous_vowel = False
    for i in range(len(stem)):
        consonant = _is_consonant(stem, i)
        if consonant and previous_vowel:
            m += 1
        previous_vowel = not consonant
    return m


def _contains_vowel(stem: str) -> bool:
    return any(not _is_consonant(stem, i) for i in range(len(stem)))


def _ends_double_consonant(stem: str) -> bool:
    return len(stem) >= 2 and stem[-1] == stem[-2] and _is_consonant(stem, len(stem) - 1)


def _ends_cvc(stem: str) -> bool:
    # consonant-vowel-consonant where the last consonant is not w, x or y
    if len(stem) < 3:
        return False
    return (
        _is_consonant(stem, len(stem) - 3)
        and not _is_consonant(stem, len(stem) - 2)
        and _is_consonant(stem, len(stem) - 1)
        and stem[-1] not in "wxy"
    )


def _m_above(n: int) -> Callable[[str], bool]:
    return lambda stem: measure(stem) > n


def _ion_condition(stem: str) -> bool:
    return measure(stem) > 1 and stem[-1:] in ("s", "t")


Rule = Tuple[str, str, Callable[[str], bool]]

STEP2_RULES: List[Rule] = [
    (suffix, replacement, _m_above(0)) for suffix, replacement in [
        ("ational", "ate"), ("tional", "tion"), ("enci", "ence"), ("anci", "ance"),
        ("izer", "ize"), ("abli", "able"), ("alli", "al"), ("entli", "ent"), ("eli", "e"),
        ("ousli", "ous"), ("ization", "ize"), ("ation", "ate"), ("ator", "ate"),
        ("alism", "al"), ("iveness", "ive"), ("fulness", "ful"), ("ousness", "ous"),
        ("aliti", "al"), ("iviti", "ive"), ("biliti", "ble"),
    ]
]

STEP3_RULES: List[Rule] = [
    (suffix, replacement, _m_above(0)) for suffix, replacement in [
        ("icate", "ic"), ("ative", ""), ("alize", "al"), ("iciti", "ic"),
        ("ical", "ic"), ("ful", ""), ("ness", ""),
    ]
]

STEP4_RULES: List[Rule] = [
    (suffix, "", _m_above(1)) for suffix in [
        "al", "ance", "ence", "er", "ic", "able", "ible", "ant", "ement", "ment", "ent",
        "ou", "ism", "ate", "iti", "ous", "ive", "ize",
    ]
] + [("ion", "", _ion_condition)]


def _apply_longest(word: str, rules: List[Rule]) -> str:
    # only the longest matching suffix is considered; a failed condition ends the step
    best = None
    for rule in rules:
        if word.endswith(rule[0]) and (best is None or len(rule[0]) > len(best[0])):
            best = rule
    if best is None:
        return word
    suffix, replacement, condition = best
    stem = word[: len(word) - len(suffix)]
    return stem + replacement if condition(stem) else word


class PorterStemmer:
    """Stateless Porter stemmer."""

    def stem(self, word: str) -> str:
        """
        Stem one lowercase word.

        Args:
            word: Lowercase word.

        Returns:
            Its Porter stem; words of two letters or fewer are returned unchanged.
        """
        return _stem_cached(word)

    def _step1a(self, word: str) -> str:
        if word.endswith("sses"):
            return word[:-2]
        if word.endswith("ies"):
            return word[:-2]
        if word.endswith("ss"):
            return word
        if word.endswith("s"):
            return word[:-1]
        return word

    def _step1b(self, word: str) -> str:
        if word.endswith("eed"):
            stem = word[:-3]
            return word[:-1] if measure(stem) > 0 else word

        for suffix in ("ed", "ing"):
            if word.endswith(suffix):
                stem = word[: -len(suffix)]
                if _contains_vowel(stem):
                    return self._step1b_tidy(stem)
                return word
        return word

    def _step1b_tidy(self, stem: str) -> str:
        if stem.endswith(("at", "bl", "iz")):
            return stem + "e"
        if _ends_double_consonant(stem) and stem[-1] not in "lsz":
            return stem[:-1]
        if measure(stem) == 1 and _ends_cvc(stem):
            return stem + "e"
        return stem

    def _step1c(self, word: str) -> str:
        if word.endswith("y") and _contains_vowel(word[:-1]):
            return word[:-1] + "i"
        return word

    def _step5a(self, word: str) -> str:
        if word.endswith("e"):
            stem = word[:-1]
            m = measure(stem)
            if m > 1 or (m == 1 and not _ends_cvc(stem)):
                return stem
        return word

    def _step5b(self, word: str) -> str:
        if measure(word) > 1 and _ends_double_consonant(word) and word.endswith("l"):
            return word[:-1]
        return word

    def stem_uncached(self, word: str) -> str:
        """Run all five steps without the memo table."""
        if len(word) <= 2:
            return word
        word = self._step1a(word)
        word = self._step1b(word)
        word = self._step1c(word)
        word = _apply_longest(word, STEP2_RULES)
        word = _apply_longest(word, STEP3_RULES)
        word = _apply_longest(word, STEP4_RULES)
        word = self._step5a(word)
        return self._step5b(word)


_DEFAULT = PorterStemmer()


@lru_cache(maxsize=65536)
def _stem_cached(word: str) -> str:
    return _DEFAULT.stem_uncached(word)


def stem(word: str) -> str:
    """Porter stem of a lowercase word."""
    return _stem_cached(word)


def stem_to_fixpoint(word: str) -> str:
    """
    Apply stem until the word stops changing.

    Porter stems are not always stems of themselves ("agreed" -> "agre" -> "agr").
    A Porter pass never lengthens a word, so a few passes reach a fixpoint.
    """
    current = word
    for _ in range(2 * len(word) + 2):
        stemmed = stem(current)
        if stemmed == current:
            break
        current = stemmed
    return current
