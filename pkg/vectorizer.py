"""
Vectorization module for the review sentiment toolkit.
Builds the n-gram vocabulary from training documents and maps token
sequences to sparse binary, count or TF-IDF vectors.
"""
import math
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
from loguru import logger

from errors import DimensionMismatchError, VectorizationError

NGRAM_JOINER = "_"


class WeightingScheme(str, Enum):
    BINARY = "binary"
    COUNT = "count"
    TFIDF = "tfidf"


@dataclass(frozen=True)
class FeatureVector:
    """Sparse column -> weight map; zero weights are not stored."""

    weights: Dict[int, float]
    dim: int
    scheme: WeightingScheme

    def to_dense(self) -> np.ndarray:
        dense = np.zeros(self.dim)
        for column, weight in self.weights.items():
            dense[column] = weight
        return dense

    @classmethod
    def from_dense(cls, values: np.ndarray, scheme: WeightingScheme) -> "FeatureVector":
        nonzero = np.flatnonzero(values)
        return cls({int(c): float(values[c]) for c in nonzero}, int(values.shape[0]), scheme)


@dataclass
class Vocabulary:
    """
    Ordered n-gram -> column map with the document frequencies it was built from.
    """

    entries: Dict[str, int]
    df: List[int]
    n_docs: int
    ngram_range: Tuple[int, int] = (1, 1)
    min_df: int = 1

    def __len__(self) -> int:
        return len(self.entries)

    def df_of(self, term: str) -> int:
        return self.df[self.entries[term]]

    def to_dict(self) -> Dict:
        return {
            "terms": list(self.entries),
            "df": list(self.df),
            "n_docs": self.n_docs,
            "ngram_range": list(self.ngram_range),
            "min_df": self.min_df,
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "Vocabulary":
        terms = data["terms"]
        return cls(
            entries={term: i for i, term in enumerate(terms)},
            df=[int(v) for v in data["df"]],
            n_docs=int(data["n_docs"]),
            ngram_range=tuple(data["ngram_range"]),
            min_df=int(data["min_df"]),
        )


def extract_ngrams(tokens: Sequence[str], ngram_range: Tuple[int, int]) -> List[str]:
    """
    Contiguous n-grams of a token sequence, by n then by position.

    Args:
        tokens: Token sequence.
        ngram_range: Inclusive (lo, hi).

    Returns:
        N-grams joined with "_".
    """
    low, high = ngram_range
    grams = []
    for n in range(low, high + 1):
        for start in range(len(tokens) - n + 1):
            grams.append(NGRAM_JOINER.join(tokens[start:start + n]))
    return grams


def _check_range(ngram_range: Tuple[int, int], min_df: int) -> None:
    low, high = ngram_range
    if not 1 <= low <= high:
        raise VectorizationError(f"ngram_range must satisfy 1 <= lo <= hi, got {ngram_range}")
    if min_df < 1:
        raise VectorizationError(f"min_df must be at least 1, got {min_df}")


def build_vocabulary(train_docs: Sequence[Sequence[str]], ngram_range: Tuple[int, int] = (1, 1),
                     min_df: int = 1) -> Vocabulary:
    """
    Build the vocabulary from training documents only.

    Columns follow first appearance over the documents in the given order;
    df counts documents, not occurrences.

    Args:
        train_docs: Token sequences in id order.
        ngram_range: Inclusive n-gram lengths.
        min_df: Minimum document frequency for a term to get a column.

    Returns:
        The frozen vocabulary.
    """
    if not train_docs:
        raise VectorizationError("cannot build a vocabulary from an empty corpus")
    _check_range(ngram_range, min_df)

    order: Dict[str, int] = {}
    df: Counter = Counter()
    for tokens in train_docs:
        seen = set()
        for gram in extract_ngrams(tokens, ngram_range):
            if gram not in order:
                order[gram] = len(order)
            if gram not in seen:
                seen.add(gram)
                df[gram] += 1

    kept = [gram for gram in order if df[gram] >= min_df]
    vocab = Vocabulary(
        entries={gram: i for i, gram in enumerate(kept)},
        df=[df[gram] for gram in kept],
        n_docs=len(train_docs),
        ngram_range=tuple(ngram_range),
        min_df=min_df,
    )
    logger.info(f"Vocabulary: {len(vocab)} terms from {vocab.n_docs} documents "
                f"(ngram_range={tuple(ngram_range)}, min_df={min_df}, {len(order) - len(kept)} pruned)")
    return vocab


def term_weight_tfidf(tf: int, df_t: int, n: int) -> float:
    """
    TF-IDF weight tf * ln(n / df_t).

    Args:
        tf: Occurrences of the term in the review.
        df_t: Training reviews containing the term.
        n: Training reviews.

    Returns:
        The weight; zero when tf is zero or the term is in every review.
    """
    if tf < 0:
        raise VectorizationError(f"term frequency must be non-negative, got {tf}")
    if df_t < 1 or df_t > n:
        raise VectorizationError(f"document frequency {df_t} outside 1..{n}")
    if tf == 0:
        return 0.0
    return tf * math.log(n / df_t)


def vectorize_document(doc: Sequence[str], vocab: Vocabulary, scheme: WeightingScheme) -> FeatureVector:
    """
    Map one token sequence to a sparse vector; unknown n-grams are ignored.

    Args:
        doc: Token sequence.
        vocab: Vocabulary built on the training split; never modified.
        scheme: binary, count or tfidf.

    Returns:
        The document's feature vector.
    """
    scheme = WeightingScheme(scheme)
    counts = Counter(gram for gram in extract_ngrams(doc, vocab.ngram_range) if gram in vocab.entries)

    weights: Dict[int, float] = {}
    for gram, tf in counts.items():
        column = vocab.entries[gram]
        if scheme is WeightingScheme.BINARY:
            weight = 1
        elif scheme is WeightingScheme.COUNT:
            weight = tf
        else:
            weight = term_weight_tfidf(tf, vocab.df[column], vocab.n_docs)
        if weight != 0:
            weights[column] = weight
    return FeatureVector(dict(sorted(weights.items())), len(vocab), scheme)


def vectorize_corpus(docs: Iterable[Sequence[str]], vocab: Vocabulary, scheme: WeightingScheme) -> List[FeatureVector]:
    return [vectorize_document(doc, vocab, scheme) for doc in docs]


def to_matrix(vectors: Sequence[FeatureVector], dim: Optional[int] = None) -> sp.csr_matrix:
    """
    Stack sparse vectors into an (n, dim) CSR document-term matrix.

    Args:
        vectors: Vectors sharing one dimension.
        dim: Expected dimension, required when vectors is empty.

    Returns:
        CSR matrix of float64 weights.
    """
    if dim is None:
        if not vectors:
            raise VectorizationError("dimension is required for an empty vector list")
        dim = vectors[0].dim
    indptr = [0]
    indices: List[int] = []
    data: List[float] = []
    for row, vector in enumerate(vectors):
        if vector.dim != dim:
            raise DimensionMismatchError(f"vector {row} has dimension {vector.dim}, expected {dim}")
        indices.extend(vector.weights.keys())
        data.extend(vector.weights.values())
        indptr.append(len(indices))
    return sp.csr_matrix(
        (np.asarray(data, dtype=float), np.asarray(indices, dtype=np.int64), np.asarray(indptr, dtype=np.int64)),
        shape=(len(vectors), dim),
    )
