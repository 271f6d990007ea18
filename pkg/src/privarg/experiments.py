"""Experiment harnesses over dispute datasets.

The grid experiment plays every privacy behavior against every other in
a round robin; the population experiment plays a handful of focal agents
against a model population of user profiles. Both report per-focal
average win rate and concealment, deterministically for a master seed
regardless of worker count.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Sequence

from ._version import __version__
from .agents import (INDIFFERENT, AgentPlan, PrivacyBehavior, UserProfile,
                     UserPrivacyType, behavior_grid, make_plan, personalize)
from .core import Side
from .datagen import Dataset, dataset_sha256, parse_dataset, serialize_dataset
from .dispute import AttackIndex, DisputeCase
from .engine import play_case
from .errors import ConfigError
from .seeds import derive_seed

RESULTS_HEADER = "label,scope,division,theta,w_avg,c_avg,combined,disputes"
MANIFEST_KIND = "privarg-manifest"
MANIFEST_VERSION = "1"

MPS_COMPOSITION = (
    (UserPrivacyType.FUNDAMENTALIST, 3),
    (UserPrivacyType.LAZY_EXPERT, 22),
    (UserPrivacyType.TECHNICIAN, 18),
    (UserPrivacyType.AMATEUR, 34),
    (UserPrivacyType.MARGINALLY_CONCERNED, 23),
)


@dataclass(frozen=True)
class ScaleConfig:
    """How much of the dataset and the grid an experiment run covers."""

    cases: int | None = None
    grid_step: int = 1
    include_self_play: bool = True

    def __post_init__(self):
        if self.cases is not None and self.cases < 1:
            raise ConfigError("scale must keep at least one case")
        if self.grid_step < 1:
            raise ConfigError("grid step must be at least 1")


DESK_SCALE = ScaleConfig(cases=20)
FULL_SCALE = ScaleConfig()


@dataclass(frozen=True)
class MetricsRow:
    """Aggregated metrics for one focal agent."""

    label: str
    scope: str
    division: str
    theta: int
    w_avg: float
    c_avg: float
    combined: float
    disputes: int

    @property
    def csv_line(self) -> str:
        return (f"{self.label},{self.scope},{self.division},{self.theta},"
                f"{self.w_avg:.4f},{self.c_avg:.4f},{self.combined:.4f},"
                f"{self.disputes}")

    @property
    def metric_payload(self) -> str:
        """The seed-determined part of the row, without the identity columns."""
        return f"{self.w_avg:.4f},{self.c_avg:.4f},{self.combined:.4f},{self.disputes}"


@dataclass(frozen=True)
class MatchupResult:
    """Tallies for one behavior pair across a list of cases, both roles."""

    behavior_a: PrivacyBehavior
    behavior_b: PrivacyBehavior
    disputes: int
    a_wins: int
    b_wins: int
    a_concealment_total: float
    b_concealment_total: float


class PreparedCase:
    """A dispute case with its agent plans and attack adjacency."""

    __slots__ = ("case", "plans", "attack_index")

    def __init__(self, case: DisputeCase):
        if len(case.proponent_kbs) != 1 or len(case.opponent_kbs) != 1:
            raise ConfigError("experiments expect one knowledge base per side")
        self.case = case
        self.plans: dict[tuple[Side, int], AgentPlan] = {
            (side, 0): make_plan(case.kbs_for(side)[0], case.vocabulary)
            for side in (Side.PROPONENT, Side.OPPONENT)}
        universe = (self.plans[(Side.PROPONENT, 0)].pool
                    + self.plans[(Side.OPPONENT, 0)].pool)
        self.attack_index = AttackIndex(universe, case.contraries)


def select_cases(dataset: Dataset, scale: ScaleConfig) -> tuple[DisputeCase, ...]:
    if scale.cases is None:
        return dataset.cases
    return dataset.cases[:scale.cases]


def prepare_cases(dataset: Dataset, scale: ScaleConfig) -> list[PreparedCase]:
    return [PreparedCase(case) for case in select_cases(dataset, scale)]


def run_matchup(prepared: Sequence[PreparedCase],
                behavior_a: PrivacyBehavior, behavior_b: PrivacyBehavior,
                seed_parts: tuple) -> MatchupResult:
    """Play every case twice, with agent a as proponent and as opponent."""
    disputes = a_wins = b_wins = 0
    a_conc = b_conc = 0.0
    for prep in prepared:
        for role in ("pro", "opp"):
            seed = derive_seed(*seed_parts, prep.case.case_id, role)
            if role == "pro":
                outcome = play_case(prep.case, (behavior_a,), (behavior_b,), seed,
                                    plans=prep.plans,
                                    attack_index=prep.attack_index)
                a_handle, b_handle = "p0", "o0"
            else:
                outcome = play_case(prep.case, (behavior_b,), (behavior_a,), seed,
                                    plans=prep.plans,
                                    attack_index=prep.attack_index)
                a_handle, b_handle = "o0", "p0"
            disputes += 1
            if outcome.won_by(a_handle):
                a_wins += 1
            else:
                b_wins += 1
            a_conc += outcome.concealment[a_handle]
            b_conc += outcome.concealment[b_handle]
    return MatchupResult(behavior_a, behavior_b, disputes,
                         a_wins, b_wins, a_conc, b_conc)


def grid_for(scale: ScaleConfig) -> tuple[PrivacyBehavior, ...]:
    return behavior_grid()[::scale.grid_step]


def _grid_row(prepared: Sequence[PreparedCase], grid: Sequence[PrivacyBehavior],
              focal_index: int, master_seed: int, scale: ScaleConfig) -> MetricsRow:
    focal = grid[focal_index]
    disputes = wins = 0
    concealment = 0.0
    for opponent in grid:
        if focal == opponent and not scale.include_self_play:
            continue
        result = run_matchup(prepared, focal, opponent,
                             (master_seed, "exp1", focal.seed_key, opponent.seed_key))
        disputes += result.disputes
        wins += result.a_wins
        concealment += result.a_concealment_total
    w_avg = wins / disputes
    c_avg = concealment / disputes
    return MetricsRow(focal.label, focal.scope.value, focal.division.value,
                      focal.dedication_theta, w_avg, c_avg,
                      (w_avg + c_avg) / 2, disputes)


def population_roster(master_seed: int) -> tuple[UserProfile, ...]:
    """The model population, shuffled into a seed-specific order."""
    roster = [UserProfile.for_type(privacy_type)
              for privacy_type, count in MPS_COMPOSITION
              for _ in range(count)]
    random.Random(derive_seed(master_seed, "mps")).shuffle(roster)
    return tuple(roster)


def population_focals() -> tuple[tuple[str, PrivacyBehavior], ...]:
    focals: list[tuple[str, PrivacyBehavior]] = [("indifferent", INDIFFERENT)]
    focals.extend((privacy_type.value, personalize(UserProfile.for_type(privacy_type)))
                  for privacy_type in UserPrivacyType)
    return tuple(focals)


def _population_row(prepared: Sequence[PreparedCase],
                    focals: Sequence[tuple[str, PrivacyBehavior]],
                    roster: Sequence[UserProfile],
                    focal_index: int, master_seed: int) -> MetricsRow:
    label, behavior = focals[focal_index]
    disputes = wins = 0
    concealment = 0.0
    for member_index, profile in enumerate(roster):
        opponent = personalize(profile)
        result = run_matchup(prepared, behavior, opponent,
                             (master_seed, "exp2", label,
                              f"{member_index}:{opponent.seed_key}"))
        disputes += result.disputes
        wins += result.a_wins
        concealment += result.a_concealment_total
    w_avg = wins / disputes
    c_avg = concealment / disputes
    return MetricsRow(label, behavior.scope.value, behavior.division.value,
                      behavior.dedication_theta, w_avg, c_avg,
                      (w_avg + c_avg) / 2, disputes)


_WORKER_STATE: dict = {}


def _worker_init(dataset_text: str, master_seed: int, scale: ScaleConfig,
                 which: int) -> None:
    dataset = parse_dataset(dataset_text)
    _WORKER_STATE["prepared"] = prepare_cases(dataset, scale)
    _WORKER_STATE["master_seed"] = master_seed
    _WORKER_STATE["scale"] = scale
    _WORKER_STATE["which"] = which
    if which == 1:
        _WORKER_STATE["grid"] = grid_for(scale)
    else:
        _WORKER_STATE["focals"] = population_focals()
        _WORKER_STATE["roster"] = population_roster(master_seed)


def _worker_row(index: int) -> MetricsRow:
    state = _WORKER_STATE
    if state["which"] == 1:
        return _grid_row(state["prepared"], state["grid"], index,
                         state["master_seed"], state["scale"])
    return _population_row(state["prepared"], state["focals"], state["roster"],
                           index, state["master_seed"])


def _run_rows(dataset: Dataset, master_seed: int, scale: ScaleConfig,
              which: int, count: int, workers: int) -> list[MetricsRow]:
    if workers <= 1:
        _worker_init(serialize_dataset(dataset), master_seed, scale, which)
        try:
            return [_worker_row(index) for index in range(count)]
        finally:
            _WORKER_STATE.clear()
    with ProcessPoolExecutor(
            max_workers=workers, initializer=_worker_init,
            initargs=(serialize_dataset(dataset), master_seed, scale, which)) as pool:
        return list(pool.map(_worker_row, range(count)))


def experiment1(dataset: Dataset, master_seed: int,
                scale: ScaleConfig = FULL_SCALE, workers: int = 1) -> list[MetricsRow]:
    """Round robin of the behavior grid against itself, one row per behavior."""
    return _run_rows(dataset, master_seed, scale, 1, len(grid_for(scale)), workers)


def experiment2(dataset: Dataset, master_seed: int,
                scale: ScaleConfig = FULL_SCALE, workers: int = 1) -> list[MetricsRow]:
    """Focal agents against the model population, one row per focal."""
    return _run_rows(dataset, master_seed, scale, 2, len(population_focals()), workers)


def format_results(rows: Sequence[MetricsRow]) -> str:
    lines = [RESULTS_HEADER]
    lines.extend(row.csv_line for row in rows)
    return "".join(line + "\n" for line in lines)


def build_manifest(master_seed: int, scale: ScaleConfig, dataset_text: str) -> str:
    cases = "all" if scale.cases is None else str(scale.cases)
    self_play = "on" if scale.include_self_play else "off"
    lines = [
        f"{MANIFEST_KIND} {MANIFEST_VERSION}",
        f"master-seed {master_seed}",
        f"scale cases={cases} step={scale.grid_step} self-play={self_play}",
        f"dataset-sha256 {dataset_sha256(dataset_text)}",
        f"code-version {__version__}",
    ]
    return "".join(line + "\n" for line in lines)


def rows_by_label(rows: Sequence[MetricsRow]) -> Mapping[str, MetricsRow]:
    return {row.label: row for row in rows}
