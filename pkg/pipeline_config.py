"""
Pipeline configuration for the review sentiment toolkit.
Experiment settings live in TOML files validated into pydantic models;
the environment and command-line flags may override a few of them.
"""
import hashlib
import os
import sys
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

from loguru import logger
from pydantic import BaseModel, ValidationError, root_validator, validator

from corpus_manager import SplitSpec, SyntheticCorpusSpec
from errors import ConfigError
from logistic_baseline import LogisticSpec
from oversampler import TO_BALANCE, InterpolationMode, OversampleSpec
from svm_trainer import ClassWeights, KernelSpec, TrainSpec
from vectorizer import WeightingScheme

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

OUTPUT_DIR_ENV = "REVIEWSENT_OUTPUT_DIR"
DEFAULT_OUTPUT_DIR = "runs/latest"
SEED_LABELS = ("corpus", "split", "balance", "trainer")
MAX_SEED = 2 ** 64


def derive_seed(global_seed: int, label: str) -> int:
    """
    Stage seed from the global seed: the first 8 bytes (big-endian) of
    SHA-256 over "{global_seed}:{label}".
    """
    digest = hashlib.sha256(f"{global_seed}:{label}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def read_toml(path: str) -> Dict[str, Any]:
    """
    Parse a TOML file.

    Args:
        path: File path.

    Returns:
        The parsed tables.
    """
    try:
        with open(path, "rb") as f:
            return tomllib.load(f)
    except OSError as e:
        raise ConfigError(f"Cannot read config {path}: {e}") from e
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"Invalid TOML in {path}: {e}") from e


def _existing_path(value: Optional[str]) -> Optional[str]:
    if value is not None and not os.path.exists(value):
        raise ValueError(f"path does not exist: {value}")
    return value


class CorpusConfig(BaseModel):
    source: Literal["csv", "synthetic"] = "synthetic"
    path: Optional[str] = None
    synthetic: SyntheticCorpusSpec = SyntheticCorpusSpec()

    class Config:
        extra = "forbid"

    _path_exists = validator("path", allow_reuse=True)(_existing_path)

    @root_validator(skip_on_failure=True)
    def _csv_needs_path(cls, values):
        if values["source"] == "csv" and not values.get("path"):
            raise ValueError("corpus.path is required when corpus.source is 'csv'")
        return values


class SplitConfig(BaseModel):
    test_fraction: Optional[float] = 0.25
    test_size: Optional[int] = None
    stratified: bool = True

    class Config:
        extra = "forbid"

    def to_spec(self, seed: int) -> SplitSpec:
        return SplitSpec(test_fraction=self.test_fraction, test_size=self.test_size,
                         stratified=self.stratified, seed=seed)


class PreprocessConfig(BaseModel):
    stoplist: Optional[str] = None
    negation_lexicon: Optional[str] = None
    scope_terminators: List[str] = ["but"]

    class Config:
        extra = "forbid"

    _paths_exist = validator("stoplist", "negation_lexicon", allow_reuse=True)(_existing_path)


class VectorizerConfig(BaseModel):
    ngram_range: Tuple[int, int] = (1, 2)
    min_df: int = 1
    scheme: WeightingScheme = WeightingScheme.TFIDF

    class Config:
        extra = "forbid"

    @validator("ngram_range")
    def _valid_range(cls, value):
        low, high = value
        if not 1 <= low <= high:
            raise ValueError("ngram_range must satisfy 1 <= lo <= hi")
        return value

    @validator("min_df")
    def _min_df_positive(cls, value):
        if value < 1:
            raise ValueError("min_df must be at least 1")
        return value


class BalanceConfig(BaseModel):
    enabled: bool = True
    k: int = 5
    rate: Union[float, Literal["to-balance"]] = TO_BALANCE
    mode: InterpolationMode = InterpolationMode.STANDARD

    class Config:
        extra = "forbid"

    @validator("k")
    def _k_positive(cls, value):
        if value < 1:
            raise ValueError("k must be at least 1")
        return value

    @validator("rate")
    def _rate_positive(cls, value):
        if value != TO_BALANCE and not value > 0:
            raise ValueError("rate must be positive or 'to-balance'")
        return value

    def to_spec(self, rate_r: float, seed: int) -> OversampleSpec:
        return OversampleSpec(k=self.k, rate_r=rate_r, mode=self.mode, seed=seed)


class TrainerConfig(BaseModel):
    model: Literal["svm", "logistic"] = "svm"
    C: float = 1.0
    class_weights: Union[ClassWeights, Literal["balanced", "none"]] = "balanced"
    tolerance: float = 1e-3
    max_passes: int = 100000
    cache_mb: float = 256.0
    nonconvergence: Literal["flag", "fatal"] = "flag"
    kernel: KernelSpec = KernelSpec()
    logistic: LogisticSpec = LogisticSpec()

    class Config:
        extra = "forbid"

    def train_spec(self, seed: int) -> TrainSpec:
        return TrainSpec(C=self.C, class_weights=self.class_weights, tolerance=self.tolerance,
                         max_passes=self.max_passes, cache_mb=self.cache_mb, seed=seed)

    def logistic_spec(self, seed: int) -> LogisticSpec:
        return self.logistic.copy(update={"seed": seed})


class OutputConfig(BaseModel):
    dir: str = DEFAULT_OUTPUT_DIR

    class Config:
        extra = "forbid"


class PipelineConfig(BaseModel):
    """
    One experiment: corpus, split, preprocessing, features, balancing,
    trainer and outputs, plus the global seed every stage seed derives from.
    """

    seed: int = 0
    corpus: CorpusConfig = CorpusConfig()
    split: SplitConfig = SplitConfig()
    preprocess: PreprocessConfig = PreprocessConfig()
    vectorizer: VectorizerConfig = VectorizerConfig()
    balance: BalanceConfig = BalanceConfig()
    trainer: TrainerConfig = TrainerConfig()
    output: OutputConfig = OutputConfig()

    class Config:
        extra = "forbid"

    @validator("seed")
    def _seed_range(cls, value):
        if not 0 <= value < MAX_SEED:
            raise ValueError("seed must be an unsigned 64-bit integer")
        return value

    def stage_seed(self, label: str) -> int:
        if label not in SEED_LABELS:
            raise ConfigError(f"unknown seed label {label!r}")
        return derive_seed(self.seed, label)

    def fingerprint(self) -> str:
        """SHA-256 of the canonical JSON form of the settings that shape results."""
        canonical = self.json(sort_keys=True, exclude={"output"})
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _resolve(base_dir: str, value: Optional[str]) -> Optional[str]:
    if value is None or os.path.isabs(value):
        return value
    return os.path.normpath(os.path.join(base_dir, value))


def _resolve_paths(data: Dict[str, Any], base_dir: str) -> Dict[str, Any]:
    corpus = data.get("corpus")
    if isinstance(corpus, dict) and "path" in corpus:
        corpus["path"] = _resolve(base_dir, corpus["path"])
    preprocess = data.get("preprocess")
    if isinstance(preprocess, dict):
        for key in ("stoplist", "negation_lexicon"):
            if key in preprocess:
                preprocess[key] = _resolve(base_dir, preprocess[key])
    output = data.get("output")
    if isinstance(output, dict) and "dir" in output:
        output["dir"] = _resolve(base_dir, output["dir"])
    return data


def build_config(data: Dict[str, Any], source: str = "<config>") -> PipelineConfig:
    try:
        return PipelineConfig(**data)
    except ValidationError as e:
        raise ConfigError(f"Invalid configuration {source}:\n{e}") from e


def load_config(path: Optional[str] = None, seed: Optional[int] = None, out_dir: Optional[str] = None,
                balance: Optional[bool] = None) -> PipelineConfig:
    """
    Load and validate a pipeline configuration.

    Relative paths inside the file resolve against the file's directory.
    The output directory falls back to REVIEWSENT_OUTPUT_DIR when the file
    does not set one; explicit arguments win over both.

    Args:
        path: TOML file, or None for all defaults.
        seed: Global seed override.
        out_dir: Output directory override.
        balance: Oversampling on/off override.

    Returns:
        Validated PipelineConfig.
    """
    data: Dict[str, Any] = {}
    if path is not None:
        data = _resolve_paths(read_toml(path), os.path.dirname(os.path.abspath(path)))

    output = data.setdefault("output", {})
    if not isinstance(output, dict):
        raise ConfigError("[output] must be a table")
    if "dir" not in output and os.getenv(OUTPUT_DIR_ENV):
        output["dir"] = os.getenv(OUTPUT_DIR_ENV)
    if out_dir is not None:
        output["dir"] = out_dir
    if seed is not None:
        data["seed"] = seed
    if balance is not None:
        section = data.setdefault("balance", {})
        if not isinstance(section, dict):
            raise ConfigError("[balance] must be a table")
        section["enabled"] = balance

    config = build_config(data, path or "<defaults>")
    logger.debug(f"Loaded config {path or '<defaults>'} (seed={config.seed}, fingerprint={config.fingerprint()[:12]})")
    return config
