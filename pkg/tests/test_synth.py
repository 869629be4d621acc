import pytest

from polyadmit import matching, synth
from polyadmit.errors import InvalidConfig
from polyadmit.model import validate_panel
from polyadmit.synth import SynthConfig, calibration_report, generate_panel


class TestDeterminism:
    def test_same_seed_identical(self):
        cfg = SynthConfig(n_applicants=200, n_programs=8, n_fields=4, seats_total=60, seed=5)
        assert generate_panel(cfg) == generate_panel(cfg)

    def test_different_seeds_differ(self):
        cfg1 = SynthConfig(n_applicants=200, n_programs=8, n_fields=4, seats_total=60, seed=5)
        cfg2 = SynthConfig(n_applicants=200, n_programs=8, n_fields=4, seats_total=60, seed=6)
        assert generate_panel(cfg1) != generate_panel(cfg2)


class TestValidity:
    def test_panel_validates(self, small_panel):
        assert validate_panel(small_panel) == small_panel

    def test_three_years_present(self, small_panel):
        years = {a.year for a in small_panel.applications}
        assert years == set(small_panel.years)

    def test_self_replication_exact(self, small_panel):
        table_quotas = {k: p.quota for k, p in small_panel.programs.items()}
        from polyadmit.scoring import compute_score_table

        table = compute_score_table(small_panel, small_panel.base_applications)
        instance = matching.build_instance(
            small_panel.base_applications, table, table_quotas
        )
        computed = matching.deferred_acceptance(instance, matching.PROPOSING_PROGRAMS)
        assert matching.replicate_assignment(small_panel, computed) == 1.0

    def test_quota_proxy_matches_generator_quotas_for_filled_programs(self, small_panel):
        inferred = matching.infer_quotas_from_observed(small_panel)
        for key, program in small_panel.programs.items():
            assert inferred[key] <= program.quota


class TestCalibration:
    def test_default_panel_hits_targets(self, default_panel):
        rows = {r.name: r for r in calibration_report(default_panel)}
        for rank in range(1, 5):
            assert rows[f"exam_share_rank{rank}"].abs_deviation <= 0.03
        assert rows["assigned_share"].abs_deviation <= 0.03
        assert rows["mean_list_length"].abs_deviation <= 0.15

    def test_report_renders(self, small_panel, tmp_path):
        from polyadmit.reports import write_calibration_report

        path = tmp_path / "calibration.csv"
        write_calibration_report(path, calibration_report(small_panel))
        lines = path.read_text().splitlines()
        assert lines[0] == "name,target,actual,abs_deviation"
        assert len(lines) == 7


class TestConfigValidation:
    def test_bad_probability(self):
        with pytest.raises(InvalidConfig):
            SynthConfig(reapply_unassigned=1.5).validate()

    def test_seats_exceed_applicants(self):
        with pytest.raises(InvalidConfig):
            SynthConfig(n_applicants=10, seats_total=11).validate()

    def test_more_fields_than_programs(self):
        with pytest.raises(InvalidConfig):
            SynthConfig(n_programs=4, n_fields=8).validate()

    def test_list_length_probs_must_sum_to_one(self):
        with pytest.raises(InvalidConfig):
            SynthConfig(list_length_probs=(0.5, 0.5, 0.5, 0.5)).validate()
