import csv
import io
import json
import os

import pytest

from pipeline_runner import LOG_FILE, METRICS_FILE, MODEL_FILE
from sentiment_cli import build_parser, main

SMALL_TOML = """
seed = 7

[corpus]
source = "synthetic"

[corpus.synthetic]
total = 200
minority_fraction = 0.2
noise_rate = 0.1

[vectorizer]
ngram_range = [1, 1]
min_df = 1

[balance]
k = 3
rate = "to-balance"

[trainer]
C = 1.0
class_weights = "none"
"""


@pytest.fixture
def config_path(tmp_path):
    path = tmp_path / "small.toml"
    path.write_text(SMALL_TOML, encoding="utf-8")
    return str(path)


@pytest.fixture
def trained_dir(config_path, tmp_path):
    out = str(tmp_path / "run")
    assert main(["--quiet", "train", "--config", config_path, "--out", out]) == 0
    return out


def test_train_prints_metrics_and_writes_the_run(trained_dir, capsys):
    printed = json.loads(capsys.readouterr().out)
    with open(os.path.join(trained_dir, METRICS_FILE), encoding="utf-8") as f:
        assert json.load(f) == printed
    assert os.path.isfile(os.path.join(trained_dir, MODEL_FILE))
    assert os.path.getsize(os.path.join(trained_dir, LOG_FILE)) > 0


def test_train_balance_off(config_path, tmp_path, capsys):
    assert main(["--quiet", "train", "--config", config_path, "--out", str(tmp_path / "off"), "--balance", "off"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["balanced"] is False
    assert report["synthetic_count"] == 0


def test_predict_writes_csv(trained_dir, tmp_path, capsys):
    reviews = tmp_path / "reviews.csv"
    reviews.write_text("Review\nlovely peaceful gardens\nfilthy noisy and unsafe\n", encoding="utf-8")
    capsys.readouterr()

    code = main(["--quiet", "predict", "--model", os.path.join(trained_dir, MODEL_FILE), "--input", str(reviews)])
    rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
    assert code == 0
    assert rows[0] == ["label", "decision_value"]
    assert [row[0] for row in rows[1:]] == ["positive", "negative"]
    assert float(rows[1][1]) > 0 > float(rows[2][1])


def test_predict_on_empty_csv(trained_dir, tmp_path, capsys):
    empty = tmp_path / "empty.csv"
    empty.write_text("", encoding="utf-8")
    capsys.readouterr()
    assert main(["predict", "--model", os.path.join(trained_dir, MODEL_FILE), "--input", str(empty)]) == 0
    assert capsys.readouterr().out == "label,decision_value\n"


def test_evaluate_saved_model(trained_dir, config_path, tmp_path, capsys):
    capsys.readouterr()
    out = str(tmp_path / "eval")
    assert main(["--quiet", "evaluate", "--config", config_path,
                 "--model", os.path.join(trained_dir, MODEL_FILE), "--out", out]) == 0
    report = json.loads(capsys.readouterr().out)
    with open(os.path.join(trained_dir, METRICS_FILE), encoding="utf-8") as f:
        assert report["auc"] == json.load(f)["auc"]
    assert os.path.isfile(os.path.join(out, METRICS_FILE))


def test_compare_prints_the_delta_table(config_path, tmp_path, capsys):
    out = tmp_path / "cmp"
    assert main(["--quiet", "compare", "--config", config_path, "--out", str(out), "--html"]) == 0
    text = capsys.readouterr().out
    assert "Minority recall" in text
    assert (out / "comparison.html").is_file()
    assert (out / "balanced" / METRICS_FILE).is_file()


def test_extract(fixtures_dir, tmp_path, capsys):
    out = tmp_path / "reviews.csv"
    assert main(["--quiet", "extract", "--fixtures", os.path.join(fixtures_dir, "pages"), "--out", str(out)]) == 0
    assert "5 reviews from 2 pages" in capsys.readouterr().out
    with open(os.path.join(fixtures_dir, "golden_reviews.csv"), "rb") as f:
        assert out.read_bytes() == f.read()


def test_gen_synthetic(config_path, tmp_path):
    out = tmp_path / "synthetic.csv"
    assert main(["--quiet", "gen-synthetic", "--config", config_path, "--out", str(out)]) == 0
    with open(out, newline="", encoding="utf-8") as f:
        rows = list(csv.DictReader(f))
    assert len(rows) == 200
    assert sum(1 for row in rows if int(row["Score"]) <= 3) == 40


def test_config_error_exit_code(tmp_path):
    bad = tmp_path / "bad.toml"
    bad.write_text("[trainer]\nC = -1\n", encoding="utf-8")
    assert main(["--quiet", "train", "--config", str(bad), "--out", str(tmp_path / "x")]) == 2
    assert main(["--quiet", "train", "--config", str(tmp_path / "missing.toml")]) == 2


def test_data_error_exit_code(tmp_path):
    assert main(["--quiet", "extract", "--fixtures", str(tmp_path / "none"), "--out", str(tmp_path / "o.csv")]) == 3
    assert main(["--quiet", "predict", "--model", str(tmp_path / "none.bundle"), "--input", "x.csv"]) == 3


def test_split_error_exit_code(tmp_path):
    path = tmp_path / "tiny.toml"
    path.write_text("[corpus.synthetic]\ntotal = 10\nminority_fraction = 0.2\n[split]\ntest_fraction = 0.99\n",
                    encoding="utf-8")
    assert main(["--quiet", "train", "--config", str(path), "--out", str(tmp_path / "run")]) == 3


def test_fatal_non_convergence_exit_code(config_path, tmp_path):
    path = tmp_path / "fatal.toml"
    with open(config_path, encoding="utf-8") as f:
        text = f.read()
    path.write_text(text + "max_passes = 1\nnonconvergence = \"fatal\"\n", encoding="utf-8")
    assert main(["--quiet", "train", "--config", str(path), "--out", str(tmp_path / "run")]) == 4


def test_parser_rejects_bad_seed_and_balance():
    parser = build_parser()
    with pytest.raises(SystemExit):
        parser.parse_args(["train", "--seed", "-3"])
    with pytest.raises(SystemExit):
        parser.parse_args(["train", "--balance", "maybe"])
    assert parser.parse_args(["train", "--seed", "0x10"]).seed == 16
