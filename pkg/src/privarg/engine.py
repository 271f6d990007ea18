"""Dispute runner: drives agents through the protocol until a forfeit.

Within a team the poll rotates round robin, starting after the member
who moved last. A polled member may chain drop requests; a declined drop
makes it unable for this turn. When every member is unable the team
forfeits.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property
from typing import Mapping, Sequence

from .agents import (AgentPlan, DisputeAgent, Move, MoveSignal, PrivacyBehavior,
                     decide_drop, make_agent, select_move)
from .core import ArgumentGraph, Side
from .dispute import (AttackIndex, DisputeCase, DisputeState, DisputeStatus,
                      MoveRecord, Team, compute_revealed, conclude_forfeit, extend,
                      initial_state)
from .errors import EngineInvariantError, InvalidInputError

TURN_CEILING_FACTOR = 10


@dataclass(frozen=True)
class DisputeOutcome:
    """Result of one finished dispute."""

    case_id: str
    winner: Side
    forfeited_by: Side
    final_state: DisputeState
    concealment: Mapping[str, float]

    @property
    def move_log(self) -> tuple[MoveRecord, ...]:
        return self.final_state.move_log

    @property
    def graph(self) -> ArgumentGraph:
        return self.final_state.graph

    def won_by(self, handle: str) -> bool:
        return self.final_state.side_of[handle] is self.winner


def make_dispute_agents(case: DisputeCase, teams: Sequence[Team],
                        behaviors: Mapping[str, PrivacyBehavior],
                        rng: random.Random,
                        plans: Mapping[tuple[Side, int], AgentPlan] | None = None,
                        ) -> dict[str, DisputeAgent]:
    """Build one agent per team member, proponent side first.

    Level shuffles draw from `rng` in that fixed order, which keeps a
    seeded dispute reproducible.
    """
    agents: dict[str, DisputeAgent] = {}
    by_side = {team.side: team for team in teams}
    for side in (Side.PROPONENT, Side.OPPONENT):
        team = by_side.get(side)
        if team is None:
            raise InvalidInputError(f"no team for {side.value}")
        kbs = case.kbs_for(side)
        if len(kbs) != len(team.members):
            raise InvalidInputError("one knowledge base per team member is required")
        for index, handle in enumerate(team.members):
            if handle not in behaviors:
                raise InvalidInputError(f"no behavior for {handle}")
            plan = plans.get((side, index)) if plans is not None else None
            agents[handle] = make_agent(handle, side, kbs[index], behaviors[handle],
                                        rng=rng, plan=plan,
                                        vocabulary=case.vocabulary)
    return agents


def _poll(agent: DisputeAgent, state: DisputeState, rng: random.Random) -> Move | None:
    """Ask one member for a move, resolving its drop requests inline."""
    while True:
        choice = select_move(agent, state, rng)
        if isinstance(choice, Move):
            return choice
        if choice is MoveSignal.PASS:
            return None
        if decide_drop(agent.behavior.dedication_theta, rng):
            agent.oskb.unlock_next()
        else:
            return None


def run_dispute(case: DisputeCase, teams: Sequence[Team],
                agents: Mapping[str, DisputeAgent], rng: random.Random,
                turn_ceiling: int | None = None,
                attack_index: AttackIndex | None = None) -> DisputeOutcome:
    """Play one dispute to completion and report the outcome."""
    state = initial_state(case, teams, attack_index=attack_index)
    team_of = {team.side: team for team in teams}
    last_mover = {Side.PROPONENT: -1, Side.OPPONENT: -1}
    ceiling = turn_ceiling if turn_ceiling is not None \
        else TURN_CEILING_FACTOR * max(1, case.total_content)
    while state.status is DisputeStatus.RUNNING:
        if len(state.move_log) > ceiling:
            raise EngineInvariantError(
                f"dispute exceeded the turn ceiling of {ceiling}")
        team = team_of[state.turn]
        size = len(team.members)
        start = (last_mover[state.turn] + 1) % size
        mover_index, move = -1, None
        for offset in range(size):
            index = (start + offset) % size
            move = _poll(agents[team.members[index]], state, rng)
            if move is not None:
                mover_index = index
                break
        if move is None:
            state = conclude_forfeit(state, state.turn)
            break
        handle = team.members[mover_index]
        record = MoveRecord(len(state.move_log), handle, move.arguments,
                            compute_revealed(state, handle, move.arguments))
        state = extend(state, record)
        agents[handle].ledger.reveal(record.revealed_content)
        last_mover[team.side] = mover_index
    concealment = {handle: agents[handle].ledger.concealment_ratio
                   for handle in sorted(agents)}
    return DisputeOutcome(case_id=case.case_id, winner=state.winner,
                          forfeited_by=state.forfeited_by,
                          final_state=state, concealment=concealment)


def play_case(case: DisputeCase,
              proponent_behaviors: Sequence[PrivacyBehavior],
              opponent_behaviors: Sequence[PrivacyBehavior],
              seed: int,
              handles: tuple[Sequence[str], Sequence[str]] | None = None,
              plans: Mapping[tuple[Side, int], AgentPlan] | None = None,
              attack_index: AttackIndex | None = None) -> DisputeOutcome:
    """Convenience wrapper: build teams and agents from behaviors and run."""
    if handles is None:
        pro = tuple(f"p{i}" for i in range(len(proponent_behaviors)))
        opp = tuple(f"o{i}" for i in range(len(opponent_behaviors)))
    else:
        pro, opp = tuple(handles[0]), tuple(handles[1])
    teams = (Team(Side.PROPONENT, pro), Team(Side.OPPONENT, opp))
    behaviors = dict(zip(pro, proponent_behaviors)) | dict(zip(opp, opponent_behaviors))
    rng = random.Random(seed)
    agents = make_dispute_agents(case, teams, behaviors, rng, plans=plans)
    return run_dispute(case, teams, agents, rng, attack_index=attack_index)
