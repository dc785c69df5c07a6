import pytest

from errors import ConfigError
from text_preprocessor import (
    NegationLexicon,
    StopwordList,
    TextPreprocessor,
    apply_negation_scope,
    normalize,
    render,
    tokenize,
)

LEXICON = NegationLexicon(frozenset({"not", "no", "never", "n't"}))


@pytest.mark.parametrize("raw, expected", [
    ("Great&amp; place!!", "great place <P>"),
    ("3 km of paths", "km of paths"),
    ("<b>Nice</b> view. Lovely; calm!", "nice view <P> lovely <P> calm <P>"),
    ("It wasn't clean", "it was n't clean"),
    ("already NOT_clean", "already NOT_clean"),
    ("", ""),
])
def test_normalize(raw, expected):
    assert normalize(raw) == expected


def test_normalize_never_leaves_adjacent_boundaries():
    text = normalize("Wow... really?! Yes.")
    assert "<P> <P>" not in text


def test_tokenize_keeps_boundaries():
    assert tokenize("a b <P> c") == ["a", "b", "<P>", "c"]


def test_negation_scope_runs_to_the_boundary():
    tokens = tokenize("the park was not clean or quiet <P> lovely trees")
    assert apply_negation_scope(tokens, LEXICON) == [
        "the", "park", "was", "NOT_clean", "NOT_or", "NOT_quiet", "lovely", "trees"]


def test_terminator_closes_the_scope():
    tokens = tokenize("not dirty but crowded")
    assert apply_negation_scope(tokens, LEXICON) == ["NOT_dirty", "but", "crowded"]


def test_double_negation_cancels():
    tokens = tokenize("not never clean")
    assert apply_negation_scope(tokens, LEXICON) == ["clean"]


def test_marked_token_inside_scope_flips_back():
    assert apply_negation_scope(["not", "NOT_clean"], LEXICON) == ["clean"]


def test_preprocess_marks_negated_stem(preprocessor):
    assert preprocessor.preprocess("The park was not clean.") == ("park", "NOT_clean")


def test_preprocess_contraction(preprocessor):
    assert preprocessor.preprocess("It wasn't clean") == ("NOT_clean",)


def test_preprocess_stems_and_drops_stopwords(preprocessor):
    assert preprocessor.preprocess("Walking around the ponds was beautiful") == ("walk", "around", "pond", "beauti")


@pytest.mark.parametrize("raw", [
    "The park was not clean.",
    "Great place, never dirty but crowded.",
    "We loved the ponds and the walking paths!",
])
def test_preprocess_is_idempotent(preprocessor, raw):
    once = preprocessor.preprocess(raw)
    assert preprocessor.preprocess(render(once)) == once


WORDS = (
    "universal university universe agreed agreement ones nos nevers cannots buts happy happily "
    "relational conditional rational valenci hesitanci digitizer conformabli radicalli differentli "
    "vileli analogousli vietnamization predication operator feudalism decisiveness hopefulness "
    "callousness formaliti sensitiviti sensibiliti triplicate formative formalize electriciti "
    "electrical hopeful goodness revival allowance inference airliner gyroscopic adjustable "
    "defensible irritant replacement adjustment dependent adoption homologou communism activate "
    "angulariti homologous effective bowdlerize probate rate cease controlling rolling generously"
).split()


@pytest.mark.parametrize("word", WORDS)
def test_single_words_are_stable_under_reprocessing(preprocessor, word):
    once = preprocessor.preprocess(word)
    assert preprocessor.preprocess(render(once)) == once
    assert preprocessor.preprocess(render(once) + " " + render(once)) == once + once


@pytest.mark.parametrize("word", ["ones", "nos", "nevers", "cannots", "buts"])
def test_stems_landing_on_function_words_are_dropped(preprocessor, word):
    assert preprocessor.preprocess(word) == ()


def test_output_never_holds_stopwords_or_triggers(preprocessor):
    tokens = preprocessor.preprocess(" ".join(WORDS) + ". It was not " + " ".join(WORDS))
    for token in tokens:
        base = token[len("NOT_"):] if token.startswith("NOT_") else token
        assert base not in preprocessor.stoplist
        assert base not in preprocessor.lexicon.triggers


def test_stems_are_fixpoints(preprocessor):
    assert preprocessor.preprocess("agreed universal") == ("agr", "univ")


def test_triggers_are_removed_from_the_stoplist(log_messages):
    preprocessor = TextPreprocessor(StopwordList(frozenset({"the", "not"})), LEXICON)
    assert "not" not in preprocessor.stoplist
    assert preprocessor.preprocess("the view is not nice") == ("view", "is", "NOT_nice")
    assert any("Dropping negation triggers" in m for m in log_messages)


def test_fingerprint_tracks_the_stoplist():
    base = TextPreprocessor(StopwordList(frozenset({"the"})), LEXICON)
    same = TextPreprocessor(StopwordList(frozenset({"the"})), LEXICON)
    other = TextPreprocessor(StopwordList(frozenset({"the", "a"})), LEXICON)
    assert base.fingerprint() == same.fingerprint()
    assert base.fingerprint() != other.fingerprint()


def test_lexicon_validation():
    with pytest.raises(ConfigError):
        NegationLexicon(frozenset())
    with pytest.raises(ConfigError):
        NegationLexicon(frozenset({"Not"}))


def test_missing_word_list_is_a_config_error(tmp_path):
    with pytest.raises(ConfigError):
        StopwordList.from_file(str(tmp_path / "missing.txt"))


def test_word_list_skips_comments(tmp_path):
    path = tmp_path / "stop.txt"
    path.write_text("# comment\nThe\n\n  a  \n", encoding="utf-8")
    assert StopwordList.from_file(str(path)).words == frozenset({"the", "a"})
