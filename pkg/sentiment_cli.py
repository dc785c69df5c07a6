"""
Command-line entry point for the review sentiment toolkit.

Subcommands: extract, gen-synthetic, train, evaluate, predict, compare.
Results go to stdout; diagnostics go to stderr and the run log.
"""
import argparse
import csv
import os
import sys
from typing import List, Optional

# Put the project root on the path so the flat modules import when run as a script
project_root = os.path.abspath(os.path.dirname(__file__))
if project_root not in sys.path:
    sys.path.append(project_root)

from dotenv import load_dotenv
from loguru import logger

from corpus_manager import generate_synthetic_corpus
from domain_types import RawReview
from errors import ReviewSentimentError
from evaluator import write_metrics_json, write_roc_csv
from log_setup import configure_logging
from pipeline_config import PipelineConfig, load_config
from pipeline_runner import LOG_FILE, METRICS_FILE, ROC_FILE, compare, evaluate_model, predict_command, run_pipeline
from report_generator import ReportGenerator
from review_extractor import ReviewExtractor, load_selectors, write_corpus_csv


def _seed(value: str) -> int:
    try:
        seed = int(value, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {value!r}")
    if not 0 <= seed < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return seed


def _on_off(value: str) -> bool:
    if value not in ("on", "off"):
        raise argparse.ArgumentTypeError("expected 'on' or 'off'")
    return value == "on"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="reviewsent", description="Review sentiment toolkit")
    parser.add_argument("--quiet", action="store_true", help="only warnings and errors on stderr")
    parser.add_argument("--log-level", default=None, help="console log level (default REVIEWSENT_LOG_LEVEL or INFO)")
    commands = parser.add_subparsers(dest="command", required=True)

    extract = commands.add_parser("extract", help="parse saved review pages into a corpus CSV")
    extract.add_argument("--fixtures", required=True, help="directory of saved HTML pages")
    extract.add_argument("--out", required=True, help="corpus CSV to write")
    extract.add_argument("--selectors", default=None, help="TOML file with a [selectors] table")

    synthetic = commands.add_parser("gen-synthetic", help="write the configured synthetic corpus as CSV")
    synthetic.add_argument("--config", default=None)
    synthetic.add_argument("--seed", type=_seed, default=None)
    synthetic.add_argument("--out", required=True, help="corpus CSV to write")

    for name, help_text in (("train", "run the full pipeline and write the run outputs"),
                            ("compare", "run with and without oversampling and print the deltas")):
        command = commands.add_parser(name, help=help_text)
        command.add_argument("--config", default=None)
        command.add_argument("--seed", type=_seed, default=None)
        command.add_argument("--out", default=None, help="output directory")
        if name == "train":
            command.add_argument("--balance", type=_on_off, default=None, help="on|off")
        else:
            command.add_argument("--html", action="store_true", help="also write comparison.html")

    evaluate = commands.add_parser("evaluate", help="score a saved model on the configured test split")
    evaluate.add_argument("--config", default=None)
    evaluate.add_argument("--seed", type=_seed, default=None)
    evaluate.add_argument("--model", required=True)
    evaluate.add_argument("--out", default=None, help="directory for metrics.json and roc.csv")

    predict = commands.add_parser("predict", help="label every row of a CSV with a Review column")
    predict.add_argument("--model", required=True)
    predict.add_argument("--input", required=True)
    predict.add_argument("--stoplist", default=None)
    predict.add_argument("--negation-lexicon", default=None)
    return parser


def _start_run_log(config: PipelineConfig, args) -> None:
    os.makedirs(config.output.dir, exist_ok=True)
    configure_logging(args.log_level, os.path.join(config.output.dir, LOG_FILE), args.quiet)


def cmd_extract(args) -> None:
    extractor = ReviewExtractor(load_selectors(args.selectors))
    summary = extractor.extract_to_csv(args.fixtures, args.out)
    print(f"{summary['reviews']} reviews from {summary['pages']} pages "
          f"({summary['skipped']} blocks skipped, {summary['failed_pages']} pages failed) -> {summary['out_path']}")


def cmd_gen_synthetic(args) -> None:
    config = load_config(args.config, seed=args.seed)
    spec = config.corpus.synthetic.copy(update={"seed": config.stage_seed("corpus")})
    documents = generate_synthetic_corpus(spec)
    reviews = [RawReview(rating=d.rating, date="", title="", body=d.body) for d in documents]
    written = write_corpus_csv(reviews, args.out)
    print(f"{written} synthetic reviews -> {args.out}")


def cmd_train(args) -> None:
    config = load_config(args.config, seed=args.seed, out_dir=args.out, balance=args.balance)
    _start_run_log(config, args)
    result = run_pipeline(config)
    print(result.report.to_json(), end="")


def cmd_evaluate(args) -> None:
    config = load_config(args.config, seed=args.seed)
    report, curve = evaluate_model(config, args.model)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        write_metrics_json(report, os.path.join(args.out, METRICS_FILE))
        write_roc_csv(curve, os.path.join(args.out, ROC_FILE))
    print(report.to_json(), end="")


def cmd_predict(args) -> None:
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["label", "decision_value"])
    for label, value in predict_command(args.model, args.input, args.stoplist, args.negation_lexicon):
        writer.writerow([label.value, repr(value)])


def cmd_compare(args) -> None:
    config = load_config(args.config, seed=args.seed, out_dir=args.out)
    _start_run_log(config, args)
    comparison = compare(config)
    generator = ReportGenerator(config.output.dir if args.html else None)
    print(generator.render_comparison_table(comparison), end="")
    if args.html:
        generator.generate_html_report(comparison)


COMMANDS = {
    "extract": cmd_extract,
    "gen-synthetic": cmd_gen_synthetic,
    "train": cmd_train,
    "evaluate": cmd_evaluate,
    "predict": cmd_predict,
    "compare": cmd_compare,
}


def main(argv: Optional[List[str]] = None) -> int:
    """
    Parse arguments, run one subcommand and return its exit code.

    0 success, 2 configuration error, 3 data error, 4 solver
    non-convergence when configured fatal, 1 anything else.
    """
    load_dotenv()
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level, quiet=args.quiet)

    try:
        COMMANDS[args.command](args)
    except ReviewSentimentError as e:
        logger.error(str(e))
        return e.exit_code
    except Exception as e:
        logger.exception(f"Unexpected error: {e}")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
