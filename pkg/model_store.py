"""
Model persistence for the review sentiment toolkit.
A bundle holds everything prediction needs: vocabulary, weighting scheme,
preprocessing settings and their fingerprint, and the trained model.
Model floats are written with float.hex() so a reload is bit-exact.
"""
import hashlib
import json
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Union

import numpy as np
from loguru import logger

from errors import BundleVersionError, CorruptBundleError, DataError, FingerprintMismatchError
from logistic_baseline import LogisticBaseline
from svm_trainer import KernelSpec, SvmModel, TrainSpec
from vectorizer import Vocabulary, WeightingScheme

FORMAT_NAME = "reviewsent-model-bundle"
FORMAT_VERSION = 1

Model = Union[SvmModel, LogisticBaseline]


@dataclass
class ModelBundle:
    vocabulary: Vocabulary
    scheme: WeightingScheme
    fingerprint: str
    model: Model
    preprocess: Dict[str, Any] = field(default_factory=dict)
    config: Dict[str, Any] = field(default_factory=dict)
    format_version: int = FORMAT_VERSION

    @property
    def model_kind(self) -> str:
        return "svm" if isinstance(self.model, SvmModel) else "logistic"

    @property
    def model_id(self) -> str:
        """Short hash of the encoded model and vocabulary."""
        payload = json.dumps({"model": _encode_model(self.model), "vocabulary": self.vocabulary.to_dict()},
                             sort_keys=True)
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


def _hex_list(values: np.ndarray) -> List[str]:
    return [float(v).hex() for v in values]


def _from_hex_list(values: List[str]) -> np.ndarray:
    return np.array([float.fromhex(v) for v in values], dtype=float)


def _sparse_rows(matrix: np.ndarray) -> List[List[List[Any]]]:
    return [[[int(c), float(row[c]).hex()] for c in np.flatnonzero(row)] for row in matrix]


def _dense_rows(rows: List[List[List[Any]]], dim: int) -> np.ndarray:
    matrix = np.zeros((len(rows), dim))
    for r, row in enumerate(rows):
        for column, value in row:
            matrix[r, int(column)] = float.fromhex(value)
    return matrix


def _encode_model(model: Model) -> Dict[str, Any]:
    if isinstance(model, SvmModel):
        return {
            "kind": "svm",
            "dim": model.dim,
            "support_vectors": _sparse_rows(model.support_vectors),
            "labels": [int(v) for v in model.labels],
            "alphas": _hex_list(model.alphas),
            "box": _hex_list(model.box),
            "bias": float(model.bias).hex(),
            "kernel": {
                "kind": model.kernel.kind.value,
                "gamma": float(model.kernel.gamma).hex(),
                "degree": model.kernel.degree,
                "coef0": float(model.kernel.coef0).hex(),
            },
            "train_spec": json.loads(model.spec.json()),
            "objective": float(model.objective).hex(),
            "iterations": model.iterations,
            "converged": model.converged,
            "kkt_gap": float(model.kkt_gap).hex(),
        }
    return {
        "kind": "logistic",
        "weights": _hex_list(model.weights),
        "bias": float(model.bias).hex(),
        "learning_rate": float(model.learning_rate).hex(),
        "epochs": model.epochs,
        "seed": model.seed,
    }


def _decode_model(data: Dict[str, Any]) -> Model:
    if data["kind"] == "svm":
        kernel = data["kernel"]
        return SvmModel(
            support_vectors=_dense_rows(data["support_vectors"], int(data["dim"])),
            labels=np.array([float(v) for v in data["labels"]]),
            alphas=_from_hex_list(data["alphas"]),
            bias=float.fromhex(data["bias"]),
            kernel=KernelSpec(kind=kernel["kind"], gamma=float.fromhex(kernel["gamma"]),
                              degree=int(kernel["degree"]), coef0=float.fromhex(kernel["coef0"])),
            spec=TrainSpec(**data["train_spec"]),
            box=_from_hex_list(data["box"]),
            objective=float.fromhex(data["objective"]),
            iterations=int(data["iterations"]),
            converged=bool(data["converged"]),
            kkt_gap=float.fromhex(data["kkt_gap"]),
        )
    if data["kind"] == "logistic":
        return LogisticBaseline(
            weights=_from_hex_list(data["weights"]),
            bias=float.fromhex(data["bias"]),
            learning_rate=float.fromhex(data["learning_rate"]),
            epochs=int(data["epochs"]),
            seed=int(data["seed"]),
        )
    raise ValueError(f"unknown model kind {data['kind']!r}")


def encode_bundle(bundle: ModelBundle) -> str:
    """Serialize a bundle to its JSON text."""
    document = {
        "format": FORMAT_NAME,
        "format_version": bundle.format_version,
        "fingerprint": bundle.fingerprint,
        "scheme": WeightingScheme(bundle.scheme).value,
        "preprocess": bundle.preprocess,
        "config": bundle.config,
        "vocabulary": bundle.vocabulary.to_dict(),
        "model": _encode_model(bundle.model),
    }
    return json.dumps(document, sort_keys=True, indent=1) + "\n"


def save_model(bundle: ModelBundle, path: str) -> None:
    """
    Write a model bundle.

    Args:
        bundle: Bundle to write.
        path: Destination file.
    """
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(encode_bundle(bundle))
    except OSError as e:
        raise DataError(f"Cannot write model bundle {path}: {e}") from e
    logger.info(f"Saved {bundle.model_kind} model {bundle.model_id} to {path}")


def decode_bundle(text: str, source: str = "<bundle>") -> ModelBundle:
    try:
        document = json.loads(text)
    except ValueError as e:
        raise CorruptBundleError(f"{source}: not a readable model bundle: {e}") from e
    if not isinstance(document, dict) or document.get("format") != FORMAT_NAME:
        raise CorruptBundleError(f"{source}: not a model bundle")

    version = document.get("format_version")
    if version != FORMAT_VERSION:
        raise BundleVersionError(f"{source}: bundle format version {version!r} is not supported "
                                 f"(expected {FORMAT_VERSION})")
    try:
        return ModelBundle(
            vocabulary=Vocabulary.from_dict(document["vocabulary"]),
            scheme=WeightingScheme(document["scheme"]),
            fingerprint=str(document["fingerprint"]),
            model=_decode_model(document["model"]),
            preprocess=dict(document["preprocess"]),
            config=dict(document["config"]),
            format_version=version,
        )
    except (KeyError, TypeError, ValueError) as e:
        raise CorruptBundleError(f"{source}: damaged bundle field: {e}") from e


def load_model(path: str, expected_fingerprint: Optional[str] = None) -> ModelBundle:
    """
    Read a model bundle.

    Args:
        path: Bundle file.
        expected_fingerprint: Preprocessing fingerprint of the loading
            environment; checked against the stored one when given.

    Returns:
        The bundle.
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except UnicodeDecodeError as e:
        raise CorruptBundleError(f"{path}: not UTF-8 text: {e}") from e
    except OSError as e:
        raise DataError(f"Cannot read model bundle {path}: {e}") from e

    bundle = decode_bundle(text, path)
    if expected_fingerprint is not None:
        verify_fingerprint(bundle, expected_fingerprint, path)
    logger.debug(f"Loaded {bundle.model_kind} model {bundle.model_id} from {path}")
    return bundle


def verify_fingerprint(bundle: ModelBundle, fingerprint: str, source: str = "<bundle>") -> None:
    """Raise FingerprintMismatchError unless the bundle was built with the given preprocessing."""
    if fingerprint != bundle.fingerprint:
        raise FingerprintMismatchError(
            f"{source}: preprocessing fingerprint {fingerprint[:12]} does not match "
            f"the model's {bundle.fingerprint[:12]}; the stoplist or negation lexicon changed"
        )
