from collections import Counter

import pytest

from helpers import chain_case

from privarg.agents import (INDIFFERENT, Division, PrivacyBehavior, Scope,
                            UserPrivacyType, UserProfile, behavior_grid,
                            personalize)
from privarg.core import KnowledgeBase, Side
from privarg.datagen import GenParams, generate_dataset, serialize_dataset
from privarg.dispute import DisputeCase
from privarg.errors import ConfigError
from privarg.experiments import (DESK_SCALE, FULL_SCALE, MANIFEST_KIND,
                                 MANIFEST_VERSION, MPS_COMPOSITION, MetricsRow,
                                 PreparedCase, RESULTS_HEADER, ScaleConfig,
                                 build_manifest, experiment1, experiment2,
                                 format_results, grid_for, population_focals,
                                 population_roster, prepare_cases, rows_by_label,
                                 run_matchup, select_cases)
from privarg.seeds import derive_seed

MICRO_PARAMS = GenParams(dispute_amount=2, dispute_size=6, max_argument_size=4,
                         seed=11)


def personalize_type(privacy_type: UserPrivacyType) -> PrivacyBehavior:
    return personalize(UserProfile.for_type(privacy_type))


@pytest.fixture(scope="module")
def micro_dataset():
    return generate_dataset(MICRO_PARAMS)


class TestScaleConfig:
    def test_rejects_zero_cases(self):
        with pytest.raises(ConfigError):
            ScaleConfig(cases=0)

    def test_rejects_zero_step(self):
        with pytest.raises(ConfigError):
            ScaleConfig(grid_step=0)

    def test_presets(self):
        assert DESK_SCALE.cases == 20
        assert FULL_SCALE.cases is None
        assert FULL_SCALE.include_self_play

    def test_select_cases(self, micro_dataset):
        assert select_cases(micro_dataset, FULL_SCALE) == micro_dataset.cases
        assert select_cases(micro_dataset, ScaleConfig(cases=1)) == \
            micro_dataset.cases[:1]


class TestPreparedCase:
    def test_one_kb_per_side_required(self):
        case, _, _, _ = chain_case()
        doubled = DisputeCase("d", case.subject,
                              case.proponent_kbs + (KnowledgeBase(),),
                              case.opponent_kbs)
        with pytest.raises(ConfigError):
            PreparedCase(doubled)

    def test_plans_cover_both_sides(self, micro_dataset):
        prep = prepare_cases(micro_dataset, ScaleConfig(cases=1))[0]
        assert set(prep.plans) == {(Side.PROPONENT, 0), (Side.OPPONENT, 0)}


class TestGrid:
    def test_grid_has_eighty_behaviors(self):
        grid = behavior_grid()
        assert len(grid) == 80
        assert len(set(grid)) == 80
        assert grid[0] == PrivacyBehavior(Scope.ALL, Division.NONE, 0)

    def test_grid_step_subsamples(self):
        assert len(grid_for(ScaleConfig(grid_step=16))) == 5
        assert grid_for(FULL_SCALE) == behavior_grid()


class TestRunMatchup:
    def test_every_case_is_played_in_both_roles(self, micro_dataset):
        prepared = prepare_cases(micro_dataset, FULL_SCALE)
        amateur = personalize_type(UserPrivacyType.AMATEUR)
        result = run_matchup(prepared, INDIFFERENT, amateur, (0, "t"))
        assert result.disputes == 2 * len(prepared)
        assert result.a_wins + result.b_wins == result.disputes
        assert 0.0 <= result.a_concealment_total <= result.disputes
        assert 0.0 <= result.b_concealment_total <= result.disputes

    def test_proponent_favored_case_splits_one_win_each(self):
        case, _, _, _ = chain_case()
        prepared = [PreparedCase(case)]
        result = run_matchup(prepared, INDIFFERENT, INDIFFERENT, (0, "sym"))
        assert (result.a_wins, result.b_wins) == (1, 1)

    def test_matchup_is_deterministic(self, micro_dataset):
        prepared = prepare_cases(micro_dataset, FULL_SCALE)
        shy = PrivacyBehavior(Scope.SHORTEST, Division.ALL_CONTENT, 25)
        one = run_matchup(prepared, shy, INDIFFERENT, (7, "d"))
        two = run_matchup(prepared, shy, INDIFFERENT, (7, "d"))
        assert one == two


class TestPopulation:
    def test_roster_composition(self):
        roster = population_roster(0)
        assert len(roster) == 100
        counts = Counter(profile.privacy_type for profile in roster)
        assert counts == dict(MPS_COMPOSITION)

    def test_roster_order_is_seeded(self):
        assert population_roster(0) == population_roster(0)
        assert population_roster(0) != population_roster(1)

    def test_focals_are_indifferent_plus_personalized(self):
        focals = population_focals()
        assert len(focals) == 6
        assert focals[0] == ("indifferent", INDIFFERENT)
        assert [label for label, _ in focals[1:]] == \
            [privacy_type.value for privacy_type in UserPrivacyType]


class TestMetricsRow:
    def test_csv_line_golden(self):
        row = MetricsRow("x", "all", "none", 0, 0.5, 0.25, 0.375, 10)
        assert row.csv_line == "x,all,none,0,0.5000,0.2500,0.3750,10"
        assert row.metric_payload == "0.5000,0.2500,0.3750,10"

    def test_format_results_golden(self):
        row = MetricsRow("x", "all", "none", 0, 0.5, 0.25, 0.375, 10)
        assert format_results([row]) == (RESULTS_HEADER + "\n"
                                         "x,all,none,0,0.5000,0.2500,0.3750,10\n")

    def test_rows_by_label(self):
        row = MetricsRow("x", "all", "none", 0, 0.5, 0.25, 0.375, 10)
        assert rows_by_label([row]) == {"x": row}


class TestManifest:
    def test_contents(self, micro_dataset):
        text = serialize_dataset(micro_dataset)
        manifest = build_manifest(7, ScaleConfig(cases=2, grid_step=3,
                                                 include_self_play=False), text)
        lines = manifest.splitlines()
        assert lines[0] == f"{MANIFEST_KIND} {MANIFEST_VERSION}"
        assert lines[1] == "master-seed 7"
        assert lines[2] == "scale cases=2 step=3 self-play=off"
        assert lines[3].startswith("dataset-sha256 ")
        assert lines[4].startswith("code-version ")


class TestExperiment1:
    SCALE = ScaleConfig(cases=2, grid_step=16)

    def test_row_shape_and_bounds(self, micro_dataset):
        rows = experiment1(micro_dataset, 3, self.SCALE)
        grid = grid_for(self.SCALE)
        assert [row.label for row in rows] == [b.label for b in grid]
        for row in rows:
            assert row.disputes == len(grid) * 2 * 2
            assert 0.0 <= row.w_avg <= 1.0
            assert 0.0 <= row.c_avg <= 1.0
            assert row.combined == pytest.approx((row.w_avg + row.c_avg) / 2)

    def test_self_play_can_be_excluded(self, micro_dataset):
        scale = ScaleConfig(cases=1, grid_step=16, include_self_play=False)
        rows = experiment1(micro_dataset, 3, scale)
        assert all(row.disputes == (len(grid_for(scale)) - 1) * 2 for row in rows)

    def test_worker_count_does_not_change_results(self, micro_dataset):
        serial = experiment1(micro_dataset, 5, self.SCALE, workers=1)
        pooled = experiment1(micro_dataset, 5, self.SCALE, workers=2)
        assert format_results(serial) == format_results(pooled)


class TestExperiment2:
    def test_six_focal_rows(self):
        dataset = generate_dataset(GenParams(dispute_amount=1, dispute_size=6,
                                             max_argument_size=4, seed=23))
        rows = experiment2(dataset, 2, FULL_SCALE)
        assert [row.label for row in rows] == [label for label, _
                                               in population_focals()]
        for row in rows:
            assert row.disputes == 100 * 2
            assert 0.0 <= row.w_avg <= 1.0
            assert 0.0 <= row.c_avg <= 1.0


class TestSeeds:
    def test_derive_seed_is_stable_and_sensitive(self):
        assert derive_seed(1, "a") == derive_seed(1, "a")
        assert derive_seed(1, "a") != derive_seed(1, "b")
        assert derive_seed(1, "a") != derive_seed("1", "a", "")
        assert 0 <= derive_seed("x") < 2 ** 64
