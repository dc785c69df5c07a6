"""
Pipeline orchestration for the review sentiment toolkit.
Runs corpus -> split -> preprocess -> vocabulary -> vectorize ->
[oversample] -> train -> evaluate, writes the run artifacts, compares the
balanced and unbalanced scenarios, and streams predictions from a saved model.
"""
import json
import os
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
import scipy.sparse as sp
from loguru import logger

from corpus_manager import class_counts, generate_synthetic_corpus, load_corpus_csv, split
from domain_types import LabeledDocument, Sentiment
from errors import ConvergenceError, CorpusFormatError, DataError, ReviewSentimentError, StageError
from evaluator import MetricsReport, RocCurve, build_report, metric_table, write_metrics_json, write_roc_csv
from logistic_baseline import LogisticBaseline, logistic_decision_values, train_logistic_baseline
from model_store import ModelBundle, load_model, save_model, verify_fingerprint
from oversampler import augment_training_set, resolve_rate
from pipeline_config import PipelineConfig
from svm_trainer import SvmModel, decision_values, train_svm
from text_preprocessor import TextPreprocessor
from vectorizer import Vocabulary, WeightingScheme, build_vocabulary, to_matrix, vectorize_corpus

METRICS_FILE = "metrics.json"
ROC_FILE = "roc.csv"
MODEL_FILE = "model.bundle"
LOG_FILE = "run.log"
PREDICT_CHUNK_ROWS = 1000


@contextmanager
def stage(name: str):
    """Tag any error raised inside a pipeline stage with the stage name."""
    logger.info(f"[{name}] start")
    try:
        yield
    except StageError:
        raise
    except (ReviewSentimentError, ValueError, OSError) as e:
        raise StageError(name, e) from e


@dataclass
class RunResult:
    report: MetricsReport
    curve: RocCurve
    bundle: ModelBundle
    out_dir: str
    paths: Dict[str, str] = field(default_factory=dict)


@dataclass
class ComparisonResult:
    balanced: RunResult
    unbalanced: RunResult

    def deltas(self) -> Dict[str, Tuple[float, float, float]]:
        """metric -> (unbalanced, balanced, balanced - unbalanced)."""
        off = metric_table(self.unbalanced.report)
        on = metric_table(self.balanced.report)
        return {name: (off[name], on[name], on[name] - off[name]) for name in off}


def build_preprocessor(settings: Dict) -> TextPreprocessor:
    return TextPreprocessor.from_paths(
        settings.get("stoplist"),
        settings.get("negation_lexicon"),
        settings.get("scope_terminators", ["but"]),
    )


def load_documents(config: PipelineConfig) -> List[LabeledDocument]:
    if config.corpus.source == "csv":
        return load_corpus_csv(config.corpus.path)
    spec = config.corpus.synthetic.copy(update={"seed": config.stage_seed("corpus")})
    return generate_synthetic_corpus(spec)


def model_scores(model, matrix: sp.csr_matrix) -> np.ndarray:
    """Decision values of an SVM or logistic model on the rows of a matrix."""
    if isinstance(model, SvmModel):
        return decision_values(model, matrix)
    if isinstance(model, LogisticBaseline):
        return logistic_decision_values(model, matrix)
    raise DataError(f"unsupported model type {type(model).__name__}")


def featurize(preprocessor: TextPreprocessor, vocabulary: Vocabulary, scheme: WeightingScheme,
              bodies: Sequence[str]) -> sp.csr_matrix:
    tokens = preprocessor.preprocess_all(bodies)
    return to_matrix(vectorize_corpus(tokens, vocabulary, scheme), len(vocabulary))


def _train(config: PipelineConfig, matrix: sp.csr_matrix, labels: List[Sentiment]):
    seed = config.stage_seed("trainer")
    if config.trainer.model == "logistic":
        return train_logistic_baseline(matrix, labels, config.trainer.logistic_spec(seed))

    model = train_svm(matrix, labels, config.trainer.train_spec(seed), config.trainer.kernel)
    if not model.converged and config.trainer.nonconvergence == "fatal":
        raise ConvergenceError(f"SMO did not converge within {config.trainer.max_passes} steps "
                               f"(gap {model.kkt_gap:.3g})")
    return model


def run_pipeline(config: PipelineConfig, write_outputs: bool = True) -> RunResult:
    """
    Run one experiment end to end.

    The vocabulary and IDF statistics come from the training split only,
    and oversampling touches training vectors only.

    Args:
        config: Validated pipeline configuration.
        write_outputs: Write metrics.json, roc.csv and model.bundle to config.output.dir.

    Returns:
        RunResult with the report, ROC curve and model bundle.
    """
    with stage("corpus"):
        corpus = load_documents(config)
        counts = class_counts(corpus)
        logger.info(f"Corpus: {len(corpus)} documents ({counts[Sentiment.POSITIVE]} positive, "
                    f"{counts[Sentiment.NEGATIVE]} negative)")

    with stage("split"):
        train_docs, test_docs = split(corpus, config.split.to_spec(config.stage_seed("split")))
        logger.info(f"Split: {len(train_docs)} train, {len(test_docs)} test")

    with stage("preprocess"):
        preprocess_settings = config.preprocess.dict()
        preprocessor = build_preprocessor(preprocess_settings)
        train_tokens = preprocessor.preprocess_all(d.body for d in train_docs)
        test_tokens = preprocessor.preprocess_all(d.body for d in test_docs)

    with stage("vectorize"):
        vectorizer = config.vectorizer
        vocabulary = build_vocabulary(train_tokens, tuple(vectorizer.ngram_range), vectorizer.min_df)
        train_matrix = to_matrix(vectorize_corpus(train_tokens, vocabulary, vectorizer.scheme), len(vocabulary))
        test_matrix = to_matrix(vectorize_corpus(test_tokens, vocabulary, vectorizer.scheme), len(vocabulary))
        train_labels = [d.label for d in train_docs]

    synthetic_count = 0
    with stage("balance"):
        if config.balance.enabled:
            train_counts = class_counts(train_docs)
            n_minority = train_counts[Sentiment.NEGATIVE]
            rate = resolve_rate(config.balance.rate, train_counts[Sentiment.POSITIVE], n_minority)
            if rate > 0:
                spec = config.balance.to_spec(rate, config.stage_seed("balance"))
                before = train_matrix.shape[0]
                train_matrix, train_labels = augment_training_set(train_matrix, train_labels, spec)
                synthetic_count = train_matrix.shape[0] - before
            else:
                logger.warning("Minority class already at or above the majority; oversampling skipped")
        else:
            logger.info("Oversampling disabled")

    with stage("train"):
        model = _train(config, train_matrix, train_labels)

    with stage("evaluate"):
        bundle = ModelBundle(
            vocabulary=vocabulary,
            scheme=vectorizer.scheme,
            fingerprint=preprocessor.fingerprint(),
            model=model,
            preprocess=preprocess_settings,
            config=json.loads(config.json(sort_keys=True, exclude={"output"})),
        )
        scores = model_scores(model, test_matrix)
        report, curve = build_report(
            [Sentiment.from_sign(s) for s in scores],
            [d.label for d in test_docs],
            scores,
            model_id=bundle.model_id,
            config_fingerprint=config.fingerprint(),
            balanced=config.balance.enabled,
            train_size=len(train_docs),
            test_size=len(test_docs),
            synthetic_count=synthetic_count,
            converged=getattr(model, "converged", True),
        )

    result = RunResult(report, curve, bundle, config.output.dir)
    if write_outputs:
        with stage("write"):
            result.paths = write_run_outputs(result)
    return result


def write_run_outputs(result: RunResult) -> Dict[str, str]:
    """Write metrics.json, roc.csv and model.bundle into the run directory."""
    os.makedirs(result.out_dir, exist_ok=True)
    paths = {
        "metrics": os.path.join(result.out_dir, METRICS_FILE),
        "roc": os.path.join(result.out_dir, ROC_FILE),
        "model": os.path.join(result.out_dir, MODEL_FILE),
    }
    write_metrics_json(result.report, paths["metrics"])
    write_roc_csv(result.curve, paths["roc"])
    save_model(result.bundle, paths["model"])
    logger.info(f"Wrote run outputs to {result.out_dir}")
    return paths


def compare(config: PipelineConfig) -> ComparisonResult:
    """
    Run the experiment with and without oversampling.

    Outputs go to "balanced" and "unbalanced" subdirectories of the
    configured output directory; everything else is shared, so the test
    split is identical in both runs.
    """
    base_dir = config.output.dir
    runs = {}
    for name, enabled in (("unbalanced", False), ("balanced", True)):
        variant = config.copy(deep=True, update={
            "balance": config.balance.copy(update={"enabled": enabled}),
            "output": config.output.copy(update={"dir": os.path.join(base_dir, name)}),
        })
        logger.info(f"Scenario {name}")
        runs[name] = run_pipeline(variant)
    return ComparisonResult(balanced=runs["balanced"], unbalanced=runs["unbalanced"])


def evaluate_model(config: PipelineConfig, model_path: str) -> Tuple[MetricsReport, RocCurve]:
    """
    Score a saved model on the test split the configuration produces.

    Args:
        config: Configuration naming corpus, split and seed.
        model_path: Bundle written by an earlier run.

    Returns:
        (MetricsReport, RocCurve).
    """
    with stage("load-model"):
        bundle = load_model(model_path)
        preprocessor = build_preprocessor(bundle.preprocess)
        verify_fingerprint(bundle, preprocessor.fingerprint(), model_path)

    with stage("corpus"):
        corpus = load_documents(config)
    with stage("split"):
        _, test_docs = split(corpus, config.split.to_spec(config.stage_seed("split")))

    with stage("evaluate"):
        matrix = featurize(preprocessor, bundle.vocabulary, bundle.scheme, [d.body for d in test_docs])
        scores = model_scores(bundle.model, matrix)
        return build_report(
            [Sentiment.from_sign(s) for s in scores],
            [d.label for d in test_docs],
            scores,
            model_id=bundle.model_id,
            config_fingerprint=config.fingerprint(),
            test_size=len(test_docs),
            converged=getattr(bundle.model, "converged", True),
        )


def _read_chunks(input_csv: str) -> Iterator[pd.DataFrame]:
    try:
        header = pd.read_csv(input_csv, dtype=str, nrows=0)
        if "Review" not in header.columns:
            raise CorpusFormatError("missing required column 'Review'", path=input_csv)
        reader = pd.read_csv(input_csv, dtype=str, keep_default_na=False, chunksize=PREDICT_CHUNK_ROWS)
        for chunk in reader:
            yield chunk
    except pd.errors.EmptyDataError:
        return
    except pd.errors.ParserError as e:
        raise CorpusFormatError(f"malformed CSV: {e}", path=input_csv) from e
    except OSError as e:
        raise DataError(f"Cannot read {input_csv}: {e}") from e


def predict_command(model_path: str, input_csv: str, stoplist: Optional[str] = None,
                    negation_lexicon: Optional[str] = None) -> Iterator[Tuple[Sentiment, float]]:
    """
    Stream (label, decision value) for every row of a CSV with a Review column.

    Args:
        model_path: Saved model bundle.
        input_csv: CSV file with a Review column.
        stoplist: Stoplist to preprocess with instead of the bundle's.
        negation_lexicon: Negation lexicon to use instead of the bundle's.

    Returns:
        Iterator of (Sentiment, decision value), one per input row.
    """
    bundle = load_model(model_path)
    settings = dict(bundle.preprocess)
    if stoplist is not None:
        settings["stoplist"] = stoplist
    if negation_lexicon is not None:
        settings["negation_lexicon"] = negation_lexicon
    preprocessor = build_preprocessor(settings)
    verify_fingerprint(bundle, preprocessor.fingerprint(), model_path)

    for chunk in _read_chunks(input_csv):
        if chunk.empty:
            continue
        matrix = featurize(preprocessor, bundle.vocabulary, bundle.scheme, chunk["Review"].tolist())
        for value in model_scores(bundle.model, matrix):
            yield Sentiment.from_sign(value), float(value)
