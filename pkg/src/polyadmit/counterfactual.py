"""The six counterfactual scenarios: original/extended application lists
crossed with the three score table variants."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping, Optional, Sequence

from . import matching, metrics, scoring
from .errors import UnknownScenario
from .model import Application, Assignment, Panel

APPLICATIONS_ORIGINAL = "original"
APPLICATIONS_EXTENDED = "extended"

SCORES_ORIGINAL = scoring.PROVENANCE_ORIGINAL
SCORES_NO_FIRST_CHOICE = scoring.PROVENANCE_NO_FIRST_CHOICE
SCORES_EXAM_PROPAGATED = scoring.PROVENANCE_EXAM_PROPAGATED


@dataclass(frozen=True)
class Scenario:
    id: str
    applications: str
    scores: str


SCENARIOS: dict[str, Scenario] = {
    "S1": Scenario("S1", APPLICATIONS_ORIGINAL, SCORES_ORIGINAL),
    "S2": Scenario("S2", APPLICATIONS_EXTENDED, SCORES_ORIGINAL),
    "S3": Scenario("S3", APPLICATIONS_ORIGINAL, SCORES_NO_FIRST_CHOICE),
    "S4": Scenario("S4", APPLICATIONS_EXTENDED, SCORES_NO_FIRST_CHOICE),
    "S5": Scenario("S5", APPLICATIONS_ORIGINAL, SCORES_EXAM_PROPAGATED),
    "S6": Scenario("S6", APPLICATIONS_EXTENDED, SCORES_EXAM_PROPAGATED),
}

SCENARIO_IDS = tuple(sorted(SCENARIOS))


def extend_application_lists(panel: Panel) -> list[Application]:
    """Append each applicant's later-year applications to their base-year
    list, skipping programs already listed, and renumber ranks 1..k.

    Only applicants with a base-year list take part in the base-year
    match, so applicants first observed in a later year are skipped. All
    appended entries keep their own exam and other-points data but are
    re-dated to the base year; the first-choice bonus stays tied to the
    original base-year first choice because that entry remains rank 1.
    """
    by_year: dict[int, dict[str, list[Application]]] = {y: {} for y in panel.years}
    for app in panel.applications:
        by_year[app.year].setdefault(app.applicant_id, []).append(app)

    extended: list[Application] = []
    for applicant_id in sorted(by_year[panel.base_year]):
        listed: set[str] = set()
        rank = 0
        for year in panel.years:
            apps = by_year[year].get(applicant_id, [])
            for app in sorted(apps, key=lambda x: x.listed_rank):
                if app.program_key in listed:
                    continue
                listed.add(app.program_key)
                rank += 1
                extended.append(replace(app, year=panel.base_year, listed_rank=rank))
    return extended


def build_scenario(
    panel: Panel, scenario_id: str
) -> tuple[list[Application], scoring.ScoreTable]:
    if scenario_id not in SCENARIOS:
        raise UnknownScenario(f"unknown scenario {scenario_id!r}, expected one of {SCENARIO_IDS}")
    scenario = SCENARIOS[scenario_id]
    if scenario.applications == APPLICATIONS_EXTENDED:
        applications = extend_application_lists(panel)
    else:
        applications = list(panel.base_applications)
    table = scoring.compute_score_table(panel, applications)
    if scenario.scores in (SCORES_NO_FIRST_CHOICE, SCORES_EXAM_PROPAGATED):
        table = scoring.remove_first_choice_points(table)
    if scenario.scores == SCORES_EXAM_PROPAGATED:
        table = scoring.propagate_entrance_exams(panel, table)
    return applications, table


@dataclass(frozen=True)
class ScenarioResult:
    scenario_id: str
    assignment: Assignment
    applications_per_applicant: float
    diff_vs_baseline: matching.AssignmentDiff
    rank_improvement: float


def run_scenario(
    panel: Panel, scenario_id: str, quotas: Mapping[str, int]
) -> tuple[list[Application], Assignment]:
    applications, table = build_scenario(panel, scenario_id)
    instance = matching.build_instance(applications, table, quotas)
    assignment = matching.deferred_acceptance(instance, matching.PROPOSING_PROGRAMS)
    return applications, assignment


def run_scenario_suite(
    panel: Panel,
    quotas: Optional[Mapping[str, int]] = None,
    scenario_ids: Sequence[str] = SCENARIO_IDS,
) -> list[ScenarioResult]:
    """Run program-proposing deferred acceptance on each scenario and
    compare every assignment to the baseline S1."""
    if quotas is None:
        quotas = {p: prog.quota for p, prog in panel.programs.items()}
    universe = sorted({a.applicant_id for a in panel.base_applications})
    rank_table = metrics.field_gpa_percentile_ranks(panel)
    program_field = {p: prog.field for p, prog in panel.programs.items()}

    base_applications, baseline = run_scenario(panel, "S1", quotas)

    results = []
    for scenario_id in sorted(scenario_ids):
        if scenario_id == "S1":
            applications, assignment = base_applications, baseline
        else:
            applications, assignment = run_scenario(panel, scenario_id, quotas)
        diff = matching.compare_assignments(baseline, assignment, universe)
        if baseline.seat_of and assignment.seat_of:
            improvement = metrics.mean_rank_improvement(
                rank_table, baseline, assignment, program_field
            )
        else:
            improvement = 0.0
        results.append(
            ScenarioResult(
                scenario_id=scenario_id,
                assignment=assignment,
                applications_per_applicant=(
                    len(applications) / len(universe) if universe else 0.0
                ),
                diff_vs_baseline=diff,
                rank_improvement=improvement,
            )
        )
    return results
