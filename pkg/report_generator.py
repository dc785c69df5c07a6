"""
Comparison report generation module for the review sentiment toolkit.
Renders the balanced vs unbalanced delta table as text and HTML.
"""
import os
from typing import Dict, List, Optional

import jinja2
from loguru import logger

from errors import DataError

DEFAULT_TEMPLATE_FOLDER = os.path.join(os.path.dirname(os.path.abspath(__file__)), "templates")

METRIC_LABELS = {
    "accuracy": "Accuracy",
    "precision": "Precision",
    "recall": "Recall",
    "f1": "F1",
    "auc": "AUC",
    "specificity": "Specificity",
    "minority_precision": "Minority precision",
    "minority_recall": "Minority recall",
    "minority_f1": "Minority F1",
}


class ReportGenerator:
    """
    Renders comparison reports from Jinja2 templates.
    """

    def __init__(self, report_folder: Optional[str] = None, template_folder: str = DEFAULT_TEMPLATE_FOLDER):
        """
        Initialize the report generator.

        Args:
            report_folder: Directory for written reports; nothing is written when None
            template_folder: Directory containing the report templates
        """
        self.report_folder = report_folder
        self.template_folder = template_folder

        if report_folder:
            os.makedirs(report_folder, exist_ok=True)

        self.jinja_env = jinja2.Environment(
            loader=jinja2.FileSystemLoader(template_folder),
            autoescape=jinja2.select_autoescape(["html", "xml"]),
            keep_trailing_newline=True,
            trim_blocks=True,
            lstrip_blocks=True,
            undefined=jinja2.StrictUndefined,
        )

    def prepare_report_data(self, comparison) -> Dict:
        """
        Prepare template data for a balanced vs unbalanced comparison.

        Args:
            comparison: ComparisonResult from the pipeline runner

        Returns:
            Dictionary of rows and run details
        """
        rows: List[Dict] = []
        for name, (off, on, delta) in comparison.deltas().items():
            rows.append({
                "metric": METRIC_LABELS.get(name, name),
                "unbalanced": f"{off:.4f}",
                "balanced": f"{on:.4f}",
                "delta": f"{delta:+.4f}",
            })

        balanced = comparison.balanced.report
        unbalanced = comparison.unbalanced.report
        return {
            "report_title": "Imbalance handling comparison",
            "rows": rows,
            "train_size": balanced.train_size,
            "test_size": balanced.test_size,
            "synthetic_count": balanced.synthetic_count,
            "balanced_model": balanced.model_id,
            "unbalanced_model": unbalanced.model_id,
            "converged": balanced.converged and unbalanced.converged,
        }

    def render(self, template_name: str, report_data: Dict) -> str:
        try:
            template = self.jinja_env.get_template(template_name)
        except jinja2.TemplateNotFound as e:
            raise DataError(f"Report template not found: {e.name} in {self.template_folder}") from e
        return template.render(**report_data)

    def render_comparison_table(self, comparison) -> str:
        """Plain-text delta table for the terminal."""
        return self.render("comparison_report.txt.j2", self.prepare_report_data(comparison))

    def generate_html_report(self, comparison, filename: str = "comparison.html") -> str:
        """
        Write the comparison as an HTML page.

        Args:
            comparison: ComparisonResult from the pipeline runner
            filename: File name inside the report folder

        Returns:
            Path to the generated HTML report
        """
        if not self.report_folder:
            raise DataError("No report folder configured for HTML output")

        html_content = self.render("comparison_report.html.j2", self.prepare_report_data(comparison))
        file_path = os.path.join(self.report_folder, filename)
        try:
            with open(file_path, "w", encoding="utf-8", newline="\n") as f:
                f.write(html_content)
        except OSError as e:
            raise DataError(f"Cannot write report {file_path}: {e}") from e

        logger.info(f"Wrote comparison report to {file_path}")
        return file_path
