from __future__ import annotations

import pytest

from polyadmit import synth
from polyadmit.model import Applicant, Application, Assignment, Panel, Program, validate_panel

BASE_YEAR = 2011


def mk_program(key_parts, field="field0", quota=1):
    poly, name = key_parts
    from polyadmit.model import canonical_program_key

    return Program(
        program_key=canonical_program_key(poly, name),
        polytechnic_name=poly,
        program_name=name,
        field=field,
        quota=quota,
    )


def mk_app(applicant_id, program_key, rank, year=BASE_YEAR, exam=False, exam_score=0.0, other=0.0):
    return Application(
        applicant_id=applicant_id,
        program_key=program_key,
        year=year,
        listed_rank=rank,
        exam_taken=exam,
        exam_score=exam_score,
        other_points=other,
    )


def mk_panel(
    programs,
    applications,
    grades=None,
    weights=None,
    bonus=None,
    observed=None,
    validate=True,
):
    """Small-panel builder: applicants inferred from applications/grades."""
    grades = grades or {}
    applicant_ids = sorted({a.applicant_id for a in applications} | set(grades))
    applicants = {
        a: Applicant(applicant_id=a, matriculation_grades=grades.get(a, {}), cohort_year=BASE_YEAR)
        for a in applicant_ids
    }
    fields = sorted({p.field for p in programs}) or ["field0"]
    panel = Panel(
        applicants=applicants,
        programs={p.program_key: p for p in programs},
        applications=tuple(applications),
        base_year=BASE_YEAR,
        field_weights=weights if weights is not None else {f: {"math": 1.0} for f in fields},
        bonus_points=bonus if bonus is not None else {f: 0.0 for f in fields},
        observed_assignment=observed,
    )
    return validate_panel(panel) if validate else panel


@pytest.fixture(scope="session")
def default_panel():
    """The default-seed desk-scale synthetic panel (5000 applicants)."""
    return synth.generate_panel(synth.SynthConfig())


@pytest.fixture(scope="session")
def small_panel():
    """A fast synthetic panel for end-to-end tests."""
    return synth.generate_panel(
        synth.SynthConfig(n_applicants=400, n_programs=12, n_fields=4, seats_total=130, seed=7)
    )


@pytest.fixture(scope="session")
def small_config_json(tmp_path_factory):
    path = tmp_path_factory.mktemp("cfg") / "synth.json"
    path.write_text(
        '{"n_applicants": 400, "n_programs": 12, "n_fields": 4, "seats_total": 130, "seed": 7}',
        encoding="utf-8",
    )
    return path
