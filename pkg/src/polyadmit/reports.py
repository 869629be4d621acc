"""Report-file writers: one CSV per published-table layout."""

from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

from . import counterfactual, metrics, scoring
from .econometrics import RegressionResult
from .io_csv import _write_csv, fmt
from .synth import CalibrationRow

WEIGHT_LABELS = {
    "gpa": "matriculation_gpa",
    "exam": "entrance_exam",
    "first_choice_bonus": "program_listed_first",
    "residual": "residual",
}


def write_weight_report(path: Path, report: scoring.WeightReport) -> None:
    _write_csv(
        path,
        ["component", "effective_weight"],
        (
            [WEIGHT_LABELS[name], fmt(report.weights[name])]
            for name in scoring.WEIGHT_COMPONENTS
        ),
    )


def write_tercile_report(path: Path, reports: Sequence[metrics.TercileReport]) -> None:
    labels = ("highest_third", "middle_third", "lowest_third")
    _write_csv(
        path,
        ["criterion", "tercile", "unassigned_fraction", "tercile_size"],
        (
            [report.criterion, label, fmt(frac), str(size)]
            for report in reports
            for label, frac, size in zip(
                labels, report.unassigned_fraction, report.tercile_sizes
            )
        ),
    )


def write_rank_stats(path: Path, rows: Sequence[metrics.RankStatsRow]) -> None:
    _write_csv(
        path,
        ["listed_rank", "n_applications", "exam_taken_share", "admitted_share"],
        (
            [str(r.listed_rank), str(r.n_applications), fmt(r.exam_taken_share), fmt(r.admitted_share)]
            for r in rows
        ),
    )


def write_scenario_suite(path: Path, results: Sequence[counterfactual.ScenarioResult]) -> None:
    _write_csv(
        path,
        ["scenario", "apps_per_applicant", "pct_differently_assigned", "rank_improvement"],
        (
            [
                r.scenario_id,
                fmt(r.applications_per_applicant),
                fmt(100.0 * r.diff_vs_baseline.differently_assigned_share),
                fmt(r.rank_improvement),
            ]
            for r in results
        ),
    )


def write_lpm_report(path: Path, results: Mapping[str, RegressionResult]) -> None:
    rows = []
    for column, result in results.items():
        for term, estimate, se in zip(result.terms, result.estimates, result.standard_errors):
            rows.append([column, term, fmt(estimate), fmt(se)])
        rows.append([column, "mean_dependent_variable", fmt(result.mean_y), ""])
        rows.append([column, "n", str(result.n), ""])
    _write_csv(path, ["column", "term", "estimate", "std_error"], rows)


def write_figure_data(path: Path, panels: Mapping[str, metrics.Histogram100]) -> None:
    _write_csv(
        path,
        ["panel", "bin", "value"],
        (
            [panel, str(b), fmt(value)]
            for panel, histogram in panels.items()
            for b, value in enumerate(histogram.bins)
        ),
    )


def write_calibration_report(path: Path, rows: Sequence[CalibrationRow]) -> None:
    _write_csv(
        path,
        ["name", "target", "actual", "abs_deviation"],
        ([r.name, fmt(r.target), fmt(r.actual), fmt(r.abs_deviation)] for r in rows),
    )
