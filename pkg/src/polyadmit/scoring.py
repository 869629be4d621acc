"""Admission score computation and its two counterfactual transforms."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import DegenerateTable, MissingFieldWeights, WrongProvenance
from .model import Application, Panel

PROVENANCE_ORIGINAL = "original"
PROVENANCE_NO_FIRST_CHOICE = "no_first_choice"
PROVENANCE_EXAM_PROPAGATED = "no_first_choice_exam_propagated"

# (applicant_id, program_key, year)
ScoreKey = tuple[str, str, int]


@dataclass(frozen=True)
class ScoreComponents:
    gpa_component: float
    exam_component: float
    first_choice_bonus: float
    other_points: float

    @property
    def total(self) -> float:
        return (
            self.gpa_component
            + self.exam_component
            + self.first_choice_bonus
            + self.other_points
        )


def adjusted_score(components: ScoreComponents) -> float:
    """Score with the exam result and the first-choice bonus subtracted."""
    return components.total - components.exam_component - components.first_choice_bonus


@dataclass(frozen=True)
class ScoreTable:
    """Per-application score components plus a provenance tag.

    ``own_exam`` records which applications carried their own valid exam
    result; exam propagation only fills in the others.
    """

    entries: Mapping[ScoreKey, ScoreComponents]
    provenance: str
    own_exam: frozenset[ScoreKey]

    def total(self, key: ScoreKey) -> float:
        return self.entries[key].total


def compute_score_table(panel: Panel, applications: Sequence[Application]) -> ScoreTable:
    """Build the original score table for an application set.

    The GPA component is the field-weighted dot product over matriculation
    grades (missing subjects count as zero); the bonus applies only to the
    first listed program of each list.
    """
    entries: dict[ScoreKey, ScoreComponents] = {}
    own_exam: set[ScoreKey] = set()
    for app in applications:
        field_label = panel.field_of(app.program_key)
        if field_label not in panel.field_weights:
            raise MissingFieldWeights(f"no GPA weights for field {field_label!r}")
        key = (app.applicant_id, app.program_key, app.year)
        entries[key] = ScoreComponents(
            gpa_component=panel.weighted_gpa(app.applicant_id, field_label),
            exam_component=app.exam_score if app.exam_taken else 0.0,
            first_choice_bonus=(
                panel.bonus_points[field_label] if app.listed_rank == 1 else 0.0
            ),
            other_points=app.other_points,
        )
        if app.exam_taken:
            own_exam.add(key)
    return ScoreTable(entries=entries, provenance=PROVENANCE_ORIGINAL, own_exam=frozenset(own_exam))


def remove_first_choice_points(table: ScoreTable) -> ScoreTable:
    """Zero out every first-choice bonus; all other components untouched."""
    if table.provenance != PROVENANCE_ORIGINAL:
        raise WrongProvenance(f"expected {PROVENANCE_ORIGINAL!r}, got {table.provenance!r}")
    entries = {
        key: ScoreComponents(c.gpa_component, c.exam_component, 0.0, c.other_points)
        for key, c in table.entries.items()
    }
    return ScoreTable(entries=entries, provenance=PROVENANCE_NO_FIRST_CHOICE, own_exam=table.own_exam)


def first_exam_by_field(panel: Panel) -> dict[tuple[str, str], float]:
    """Chronologically first exam score per (applicant, field).

    "First" is resolved by (year, listed_rank, program_key) so the rule is
    deterministic even when several exams fall in the same year.
    """
    first: dict[tuple[str, str], tuple[tuple[int, int, str], float]] = {}
    for app in panel.applications:
        if not app.exam_taken:
            continue
        field_label = panel.field_of(app.program_key)
        order = (app.year, app.listed_rank, app.program_key)
        slot = (app.applicant_id, field_label)
        if slot not in first or order < first[slot][0]:
            first[slot] = (order, app.exam_score)
    return {slot: score for slot, (_, score) in first.items()}


def propagate_entrance_exams(panel: Panel, table: ScoreTable) -> ScoreTable:
    """Make the first exam taken in a field valid for every exam-less
    application in that field.

    Applications with their own exam keep it. Idempotent: re-propagating
    rewrites the same scores.
    """
    if table.provenance not in (PROVENANCE_NO_FIRST_CHOICE, PROVENANCE_EXAM_PROPAGATED):
        raise WrongProvenance(
            f"expected {PROVENANCE_NO_FIRST_CHOICE!r}, got {table.provenance!r}"
        )
    sources = first_exam_by_field(panel)
    entries: dict[ScoreKey, ScoreComponents] = {}
    for key, c in table.entries.items():
        applicant_id, program_key, _year = key
        if key not in table.own_exam:
            field_label = panel.field_of(program_key)
            source = sources.get((applicant_id, field_label))
            if source is not None:
                c = ScoreComponents(c.gpa_component, source, c.first_choice_bonus, c.other_points)
        entries[key] = c
    return ScoreTable(entries=entries, provenance=PROVENANCE_EXAM_PROPAGATED, own_exam=table.own_exam)


WEIGHT_COMPONENTS = ("gpa", "exam", "first_choice_bonus", "residual")


@dataclass(frozen=True)
class WeightReport:
    """Effective weight of each score component in the priority ordering.

    Each entry is the standard deviation of one component across all
    applications, normalized by the sum of the four standard deviations,
    so the report sums to one. The residual maps to the other-points
    component, which is all the unmodeled variation the table carries.
    """

    sds: Mapping[str, float]
    weights: Mapping[str, float]


def effective_weights(table: ScoreTable) -> WeightReport:
    components = list(table.entries.values())
    n = len(components)
    if n < 2:
        raise DegenerateTable(f"need at least 2 score records, got {n}")
    columns = {
        "gpa": [c.gpa_component for c in components],
        "exam": [c.exam_component for c in components],
        "first_choice_bonus": [c.first_choice_bonus for c in components],
        "residual": [c.other_points for c in components],
    }
    sds = {}
    for name, values in columns.items():
        mean = sum(values) / n
        sds[name] = math.sqrt(sum((v - mean) ** 2 for v in values) / n)
    total_sd = sum(sds.values())
    if total_sd == 0.0:
        raise DegenerateTable("all score components are constant")
    weights = {name: sd / total_sd for name, sd in sds.items()}
    return WeightReport(sds=sds, weights=weights)
