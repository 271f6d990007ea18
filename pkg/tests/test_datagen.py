from collections import Counter
from hashlib import sha256

import pytest

from helpers import S

from privarg.agents import INDIFFERENT, make_plan
from privarg.core import PremiseKind, RuleKind, Side, construct_arguments
from privarg.datagen import (DATASET_KIND, DATASET_VERSION, Dataset, GenParams,
                             dataset_sha256, generate_case, generate_dataset,
                             parse_dataset, save_dataset, serialize_dataset)
from privarg.engine import play_case
from privarg.errors import InvalidInputError, ParseError
from privarg.seeds import derive_seed

SMALL = GenParams(dispute_amount=1, dispute_size=8, max_argument_size=4, seed=0)

FIXTURE = """\
privarg-dataset 1
params amount=1 size=4 max-arg=3 branches=2 ordinary=0.8 defeasible=0.8 seed=9

# a hand-written two-argument case
case demo
subject sky_blue
premise proponent light_scatters necessary
rule proponent r0 light_scatters -> sky_blue strict
premise opponent sunset_red ordinary
contrary sunset_red sky_blue
bias proponent prefers physics talk
end
"""


class TestGenParams:
    @pytest.mark.parametrize("field,value", [
        ("dispute_amount", 0), ("dispute_size", 0), ("max_argument_size", 0),
        ("max_branches", 0), ("ordinary_ratio", -0.1), ("ordinary_ratio", 1.1),
        ("defeasible_ratio", 2.0),
    ])
    def test_rejects_out_of_range(self, field, value):
        with pytest.raises(InvalidInputError):
            GenParams(**{field: value})

    def test_defaults(self):
        params = GenParams()
        assert (params.dispute_amount, params.dispute_size,
                params.max_argument_size, params.max_branches) == (200, 20, 10, 2)
        assert params.ordinary_ratio == params.defeasible_ratio == 0.8


class TestGenerateCase:
    def test_size_one_has_no_attackers(self):
        params = GenParams(dispute_amount=1, dispute_size=1, max_argument_size=4,
                           seed=0)
        for index in range(10):
            case = generate_case(params, index, derive_seed("one", index))
            assert case.opponent_kbs[0].is_empty
            assert len(case.contraries) == 0
            pool = construct_arguments(case.proponent_kbs[0], case.vocabulary)
            assert any(a.conclusion == case.subject for a in pool)

    def test_structural_bounds(self):
        params = GenParams(dispute_amount=1, dispute_size=12, max_argument_size=6,
                           max_branches=2, seed=0)
        for index in range(12):
            case = generate_case(params, index, derive_seed("bounds", index))
            # One contrary pair per generated attacker.
            assert len(case.contraries) <= params.dispute_size - 1
            per_target = Counter(target for _, target in case.contraries)
            assert all(n <= params.max_branches for n in per_target.values())
            for side in Side:
                kb = case.kbs_for(side)[0]
                if kb.is_empty:
                    continue
                plan = make_plan(kb, case.vocabulary)
                assert all(arg.size <= params.max_argument_size
                           for arg in plan.maximal)

    def test_root_gets_an_attacker_when_size_allows(self):
        params = GenParams(dispute_amount=1, dispute_size=6, max_argument_size=4,
                           seed=0)
        for index in range(10):
            case = generate_case(params, index, derive_seed("root", index))
            assert not case.opponent_kbs[0].is_empty

    def test_validates_vocabulary_closure(self):
        case = generate_case(SMALL, 0, derive_seed("closure", 0))
        case.validate()

    def test_case_determinism(self):
        one = generate_case(SMALL, 3, 12345)
        two = generate_case(SMALL, 3, 12345)
        assert one == two


class TestGenerateDataset:
    def test_amount_and_unique_ids(self):
        params = GenParams(dispute_amount=5, dispute_size=6, max_argument_size=4,
                           seed=2)
        dataset = generate_dataset(params)
        ids = [case.case_id for case in dataset.cases]
        assert len(ids) == 5
        assert len(set(ids)) == 5
        assert ids[0] == "c0000"

    def test_serialization_is_deterministic(self):
        params = GenParams(dispute_amount=3, dispute_size=8, max_argument_size=5,
                           seed=17)
        assert (serialize_dataset(generate_dataset(params))
                == serialize_dataset(generate_dataset(params)))

    def test_default_dataset_total_argument_bound(self):
        dataset = generate_dataset(GenParams(seed=1))
        total = sum(1 + len(case.contraries) for case in dataset.cases)
        assert 200 <= total <= 4000

    def test_default_dataset_is_not_one_sided(self):
        # Both sides must be able to win somewhere, otherwise the generator
        # degenerated into unwinnable or unlosable boards.
        dataset = generate_dataset(GenParams(dispute_amount=60, seed=1))
        winners = Counter(
            play_case(case, (INDIFFERENT,), (INDIFFERENT,), seed=0).winner
            for case in dataset.cases)
        assert winners[Side.PROPONENT] > 0
        assert winners[Side.OPPONENT] > 0


class TestRoundTrip:
    def test_parse_inverts_serialize(self):
        for seed in range(5):
            params = GenParams(dispute_amount=2, dispute_size=7,
                               max_argument_size=4, seed=seed)
            dataset = generate_dataset(params)
            assert parse_dataset(serialize_dataset(dataset)) == dataset

    def test_save_and_reload(self, tmp_path):
        dataset = generate_dataset(GenParams(dispute_amount=1, dispute_size=5,
                                             max_argument_size=3, seed=4))
        path = tmp_path / "data.txt"
        text = save_dataset(dataset, path)
        assert path.read_text(encoding="utf-8") == text
        assert parse_dataset(text) == dataset

    def test_sha_matches_hashlib(self):
        assert dataset_sha256("abc\n") == sha256(b"abc\n").hexdigest()


class TestFixture:
    def test_hand_written_case_parses(self):
        dataset = parse_dataset(FIXTURE)
        assert dataset.params.seed == 9
        case = dataset.cases[0]
        assert case.case_id == "demo"
        assert case.subject == S("sky_blue")
        pro = case.proponent_kbs[0]
        (premise,) = pro.premises
        assert premise.kind is PremiseKind.NECESSARY
        (r,) = pro.rules
        assert r.rule_id == "r0"
        assert r.antecedents == {S("light_scatters")}
        assert r.kind is RuleKind.STRICT
        opp = case.opponent_kbs[0]
        assert {p.statement for p in opp.premises} == {S("sunset_red")}
        assert case.contraries.is_contrary(S("sunset_red"), S("sky_blue"))
        assert pro.biases == ("prefers physics talk",)

    def test_fixture_survives_a_round_trip(self):
        dataset = parse_dataset(FIXTURE)
        assert parse_dataset(serialize_dataset(dataset)) == dataset


class TestParseErrors:
    def error_line(self, text: str) -> int:
        with pytest.raises(ParseError) as excinfo:
            parse_dataset(text)
        return excinfo.value.line

    def test_bad_header(self):
        assert self.error_line("wrong 1\n") == 1

    def test_unsupported_version(self):
        assert self.error_line(f"{DATASET_KIND} 99\n") == 1

    def test_missing_params(self):
        assert self.error_line(f"{DATASET_KIND} {DATASET_VERSION}\ncase c0\n") == 2

    def test_bad_param_integer(self):
        text = (f"{DATASET_KIND} {DATASET_VERSION}\n"
                "params amount=x size=4 max-arg=3 branches=2"
                " ordinary=0.8 defeasible=0.8 seed=0\n")
        assert self.error_line(text) == 2

    def test_out_of_range_params_carry_the_line(self):
        text = (f"{DATASET_KIND} {DATASET_VERSION}\n"
                "params amount=0 size=4 max-arg=3 branches=2"
                " ordinary=0.8 defeasible=0.8 seed=0\n")
        assert self.error_line(text) == 2

    def broken_fixture(self, needle: str, replacement: str) -> str:
        assert needle in FIXTURE
        return FIXTURE.replace(needle, replacement)

    def test_unknown_directive(self):
        text = self.broken_fixture("bias proponent prefers physics talk",
                                   "mystery field")
        assert self.error_line(text) == 11

    def test_unknown_side(self):
        text = self.broken_fixture("premise opponent sunset_red ordinary",
                                   "premise judge sunset_red ordinary")
        assert self.error_line(text) == 9

    def test_unknown_premise_kind(self):
        text = self.broken_fixture("premise opponent sunset_red ordinary",
                                   "premise opponent sunset_red hearsay")
        assert self.error_line(text) == 9

    def test_malformed_rule(self):
        text = self.broken_fixture(
            "rule proponent r0 light_scatters -> sky_blue strict",
            "rule proponent r0 light_scatters sky_blue strict")
        assert self.error_line(text) == 8

    def test_rule_needs_antecedents(self):
        text = self.broken_fixture(
            "rule proponent r0 light_scatters -> sky_blue strict",
            "rule proponent r0 , -> sky_blue strict")
        assert self.error_line(text) == 8

    def test_unknown_statement_in_contrary(self):
        text = self.broken_fixture("contrary sunset_red sky_blue",
                                   "contrary sunset_red ghost")
        with pytest.raises(ParseError, match="demo"):
            parse_dataset(text)

    def test_duplicate_case_id(self):
        body = FIXTURE[FIXTURE.index("case demo"):]
        text = (f"{DATASET_KIND} {DATASET_VERSION}\n"
                "params amount=2 size=4 max-arg=3 branches=2"
                " ordinary=0.8 defeasible=0.8 seed=9\n" + body + body)
        with pytest.raises(ParseError, match="duplicate case id"):
            parse_dataset(text)

    def test_case_count_must_match_params(self):
        text = FIXTURE.replace("amount=1", "amount=2")
        with pytest.raises(ParseError, match="declare 2 cases"):
            parse_dataset(text)

    def test_truncated_file(self):
        with pytest.raises(ParseError, match="unexpected end"):
            parse_dataset(FIXTURE.replace("end\n", ""))

    def test_conflicting_premise_kinds(self):
        text = self.broken_fixture(
            "premise opponent sunset_red ordinary",
            "premise opponent sunset_red ordinary\n"
            "premise opponent sunset_red necessary")
        with pytest.raises(ParseError, match="duplicate premise"):
            parse_dataset(text)
