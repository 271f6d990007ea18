"""Turn-based dispute protocol: cases, teams, moves and board state.

The proponent opens on the subject, sides alternate, and a side that
cannot extend the board forfeits. State transitions are pure so a move
log can be replayed into an identical final state.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .core import (Argument, ArgumentGraph, ContraryRelation, GroundedLabelling,
                   KnowledgeBase, Label, Side, Statement, attacks,
                   grounded_labelling, merge_contraries, subject_accepted)
from .errors import EngineInvariantError, InvalidInputError, ProtocolViolationError


@dataclass(frozen=True)
class DisputeCase:
    """A dispute subject plus one knowledge base per team member."""

    case_id: str
    subject: Statement
    proponent_kbs: tuple[KnowledgeBase, ...]
    opponent_kbs: tuple[KnowledgeBase, ...]

    def __post_init__(self):
        if not self.case_id:
            raise InvalidInputError("case id must be nonempty")
        if not self.proponent_kbs or not self.opponent_kbs:
            raise InvalidInputError("each side needs at least one knowledge base")

    def kbs_for(self, side: Side) -> tuple[KnowledgeBase, ...]:
        return self.proponent_kbs if side is Side.PROPONENT else self.opponent_kbs

    @cached_property
    def contraries(self) -> ContraryRelation:
        return merge_contraries(kb.contraries
                                for kb in self.proponent_kbs + self.opponent_kbs)

    @cached_property
    def vocabulary(self) -> frozenset[Statement]:
        out: set[Statement] = {self.subject}
        for kb in self.proponent_kbs + self.opponent_kbs:
            out.update(p.statement for p in kb.premises)
            out.update(r.consequent for r in kb.rules)
        return frozenset(out)

    @cached_property
    def total_content(self) -> int:
        return sum(len(kb.content) for kb in self.proponent_kbs + self.opponent_kbs)

    def validate(self) -> None:
        for kb in self.proponent_kbs + self.opponent_kbs:
            kb.validate(self.vocabulary)


@dataclass(frozen=True)
class Team:
    side: Side
    members: tuple[str, ...]

    def __post_init__(self):
        if not self.members:
            raise InvalidInputError("a team needs at least one member")
        if len(set(self.members)) != len(self.members):
            raise InvalidInputError("duplicate member handle in team")


@dataclass(frozen=True)
class MoveRecord:
    """One board extension: who moved, what was added, what became public."""

    turn_index: int
    actor: str
    added_arguments: tuple[Argument, ...]
    revealed_content: frozenset[str]


class DisputeStatus(Enum):
    RUNNING = "running"
    FINISHED = "finished"


class AttackIndex:
    """Precomputed attack adjacency over a fixed argument universe."""

    __slots__ = ("targets_by_attacker", "attackers_by_target")

    def __init__(self, arguments: Iterable[Argument], contraries: ContraryRelation):
        universe = list(arguments)
        self.targets_by_attacker: dict[Argument, frozenset[Argument]] = {}
        self.attackers_by_target: dict[Argument, frozenset[Argument]] = {}
        by_weak: dict[Statement, list[Argument]] = {}
        for target in universe:
            for stmt in target.weak_statements:
                by_weak.setdefault(stmt, []).append(target)
        attackers: dict[Argument, set[Argument]] = {target: set() for target in universe}
        for attacker in universe:
            hit: set[Argument] = set()
            for stmt in contraries.attackable_by(attacker.conclusion):
                hit.update(by_weak.get(stmt, ()))
            self.targets_by_attacker[attacker] = frozenset(hit)
            for target in hit:
                attackers[target].add(attacker)
        for target, atts in attackers.items():
            self.attackers_by_target[target] = frozenset(atts)

    def targets(self, attacker: Argument) -> frozenset[Argument] | None:
        return self.targets_by_attacker.get(attacker)

    def attackers(self, target: Argument) -> frozenset[Argument] | None:
        return self.attackers_by_target.get(target)


@dataclass(frozen=True)
class DisputeState:
    """Immutable snapshot of a dispute in progress."""

    case: DisputeCase
    side_of: Mapping[str, Side]
    graph: ArgumentGraph
    turn: Side
    move_log: tuple[MoveRecord, ...]
    revealed_by: Mapping[str, frozenset[str]]
    status: DisputeStatus = DisputeStatus.RUNNING
    winner: Side | None = None
    forfeited_by: Side | None = None
    attack_index: AttackIndex | None = None

    @cached_property
    def labelling(self) -> GroundedLabelling:
        return grounded_labelling(self.graph)

    @cached_property
    def proponent_concludes_subject(self) -> bool:
        return any(self.graph.owner[n] is Side.PROPONENT
                   and n.conclusion == self.case.subject
                   for n in self.graph.nodes)

    @property
    def subject_accepted(self) -> bool:
        return subject_accepted(self.graph, self.case.subject, self.labelling)


def initial_state(case: DisputeCase, teams: Sequence[Team],
                  attack_index: AttackIndex | None = None) -> DisputeState:
    sides = {team.side for team in teams}
    if sides != {Side.PROPONENT, Side.OPPONENT} or len(teams) != 2:
        raise InvalidInputError("exactly one team per side is required")
    side_of: dict[str, Side] = {}
    for team in teams:
        if len(team.members) != len(case.kbs_for(team.side)):
            raise InvalidInputError("one knowledge base per team member is required")
        for handle in team.members:
            if handle in side_of:
                raise InvalidInputError(f"handle {handle} appears on both teams")
            side_of[handle] = team.side
    return DisputeState(case=case, side_of=side_of, graph=ArgumentGraph(),
                        turn=Side.PROPONENT, move_log=(), revealed_by={},
                        attack_index=attack_index)


def _attack_targets(state: DisputeState, attacker: Argument,
                    pool: Iterable[Argument]) -> Iterable[Argument]:
    if state.attack_index is not None:
        cached = state.attack_index.targets(attacker)
        if cached is not None:
            return [t for t in pool if t in cached]
    contraries = state.case.contraries
    return [t for t in pool if attacks(attacker, t, contraries)]


def useful_arguments(state: DisputeState,
                     candidates: Iterable[Argument]) -> set[Argument]:
    """The candidates that would make a legal, relevant extension now.

    While the proponent has not yet put a subject argument on the board,
    only arguments concluding the subject are useful to it. Afterwards an
    argument is useful when it is new and attacks an opposing argument
    that is currently IN or UNDEC.
    """
    side = state.turn
    nodes = state.graph.nodes
    if side is Side.PROPONENT and not state.proponent_concludes_subject:
        return {a for a in candidates
                if a.conclusion == state.case.subject and a not in nodes}
    labelling = state.labelling
    live = [n for n in nodes
            if state.graph.owner[n] is not side and labelling[n] is not Label.OUT]
    if not live:
        return set()
    index = state.attack_index
    if index is not None:
        known: set[Argument] = set()
        covered = True
        for target in live:
            atts = index.attackers(target)
            if atts is None:
                covered = False
                break
            known.update(atts)
        if covered:
            pool = candidates if isinstance(candidates, (set, frozenset)) \
                else set(candidates)
            return {a for a in known if a in pool and a not in nodes}
    useful: set[Argument] = set()
    for a in candidates:
        if a in nodes:
            continue
        if _attack_targets(state, a, live):
            useful.add(a)
    return useful


def compute_revealed(state: DisputeState, actor: str,
                     added: Sequence[Argument]) -> frozenset[str]:
    content: set[str] = set()
    for arg in added:
        content.update(arg.content_ids)
    return frozenset(content) - state.revealed_by.get(actor, frozenset())


def _new_edges(state: DisputeState,
               added: Sequence[Argument]) -> frozenset[tuple[Argument, Argument]]:
    existing = list(state.graph.nodes)
    contraries = state.case.contraries
    index = state.attack_index
    edges: set[tuple[Argument, Argument]] = set()

    def hits(attacker: Argument, target: Argument) -> bool:
        if index is not None:
            cached = index.targets(attacker)
            if cached is not None:
                return target in cached
        return attacks(attacker, target, contraries)

    new_list = list(added)
    for a in new_list:
        for b in existing:
            if hits(a, b):
                edges.add((a, b))
            if hits(b, a):
                edges.add((b, a))
        for b in new_list:
            if hits(a, b):
                edges.add((a, b))
    return frozenset(edges)


def extend(state: DisputeState, move: MoveRecord) -> DisputeState:
    """Apply one validated move and hand the turn to the other side."""
    if state.status is not DisputeStatus.RUNNING:
        raise ProtocolViolationError("dispute is already finished")
    side = state.side_of.get(move.actor)
    if side is None:
        raise ProtocolViolationError(f"unknown actor {move.actor}")
    if side is not state.turn:
        raise ProtocolViolationError(f"it is not {move.actor}'s turn")
    if move.turn_index != len(state.move_log):
        raise ProtocolViolationError(
            f"expected turn index {len(state.move_log)}, got {move.turn_index}")
    if not move.added_arguments:
        raise ProtocolViolationError("a move must add at least one argument")
    if len(set(move.added_arguments)) != len(move.added_arguments):
        raise ProtocolViolationError("a move may not add the same argument twice")
    useful = useful_arguments(state, move.added_arguments)
    for arg in move.added_arguments:
        if arg in state.graph.nodes:
            raise ProtocolViolationError("argument is already on the board")
        if arg not in useful:
            raise ProtocolViolationError("argument does not extend the dispute")
    expected = compute_revealed(state, move.actor, move.added_arguments)
    if move.revealed_content != expected:
        raise ProtocolViolationError("revealed content does not match the move")

    graph = state.graph.with_additions(
        ((arg, side) for arg in move.added_arguments),
        _new_edges(state, move.added_arguments))
    revealed = dict(state.revealed_by)
    revealed[move.actor] = revealed.get(move.actor, frozenset()) | move.revealed_content
    return replace(state, graph=graph, turn=side.other,
                   move_log=state.move_log + (move,), revealed_by=revealed)


def conclude_forfeit(state: DisputeState, forfeiting: Side) -> DisputeState:
    """Finish the dispute after a side could not extend the board.

    An opponent forfeit lets the proponent win only if the subject is
    accepted on the final board; a proponent forfeit is an outright loss.
    """
    if state.status is not DisputeStatus.RUNNING:
        raise ProtocolViolationError("dispute is already finished")
    if forfeiting is Side.OPPONENT:
        winner = Side.PROPONENT if state.subject_accepted else Side.OPPONENT
    else:
        winner = Side.OPPONENT
    return replace(state, status=DisputeStatus.FINISHED,
                   winner=winner, forfeited_by=forfeiting)


def replay(case: DisputeCase, teams: Sequence[Team],
           move_log: Sequence[MoveRecord],
           forfeited_by: Side | None = None,
           attack_index: AttackIndex | None = None) -> DisputeState:
    """Rebuild a dispute state by re-validating a recorded move log."""
    state = initial_state(case, teams, attack_index=attack_index)
    for move in move_log:
        state = extend(state, move)
    if forfeited_by is not None:
        state = conclude_forfeit(state, forfeited_by)
    return state


def format_trace(move_log: Sequence[MoveRecord]) -> str:
    """One line per move: index, actor, argument hashes, revealed content."""
    lines = []
    for move in move_log:
        hashes = ",".join(arg.hash_hex for arg in move.added_arguments)
        revealed = ",".join(sorted(move.revealed_content)) or "-"
        lines.append(f"{move.turn_index}\t{move.actor}\t{hashes}\t{revealed}")
    return "".join(line + "\n" for line in lines)
