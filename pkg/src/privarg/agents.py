"""Concealing dispute agents.

An agent plays from a leveled view of its knowledge base, starting at
the first level and unlocking deeper ones only by explicit drops. Scope
controls how much it puts on the board per turn, division controls how
the levels are cut, and dedication controls how willing it is to drop.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, Sequence

from .core import (Argument, ContentPiece, KnowledgeBase, Side, Statement,
                   construct_arguments)
from .dispute import DisputeState, useful_arguments
from .errors import EngineInvariantError, InvalidInputError


class Scope(Enum):
    ALL = "all"
    SHORTEST = "shortest"
    LONGEST = "longest"
    RANDOM = "random"


class Division(Enum):
    NONE = "none"
    HALF_ARGS = "half_args"
    ALL_ARGS = "all_args"
    ALL_CONTENT = "all_content"


THETA_VALUES = (0, 25, 50, 75, 100)


@dataclass(frozen=True)
class PrivacyBehavior:
    """A point in the scope x division x dedication grid."""

    scope: Scope
    division: Division
    dedication_theta: int

    def __post_init__(self):
        if self.dedication_theta not in THETA_VALUES:
            raise InvalidInputError(
                f"dedication must be one of {THETA_VALUES}, got {self.dedication_theta}")

    @property
    def label(self) -> str:
        return f"{self.scope.value}/{self.division.value}/{self.dedication_theta}"

    @property
    def seed_key(self) -> str:
        """Label used for seed derivation.

        With an undivided knowledge base drops never happen, so dedication
        is normalized away to keep the played disputes identical.
        """
        theta = 100 if self.division is Division.NONE else self.dedication_theta
        return f"{self.scope.value}/{self.division.value}/{theta}"


INDIFFERENT = PrivacyBehavior(Scope.ALL, Division.NONE, 100)


def behavior_grid() -> tuple[PrivacyBehavior, ...]:
    """All eighty behaviors in canonical scope-major order."""
    return tuple(PrivacyBehavior(scope, division, theta)
                 for scope in Scope
                 for division in Division
                 for theta in THETA_VALUES)


def decide_drop(theta: int, rng: random.Random) -> bool:
    """One dedication roll; certain at 100, impossible at 0."""
    return rng.random() < theta / 100.0


def maximal_arguments(pool: Iterable[Argument]) -> list[Argument]:
    """Arguments in the pool that are not proper subarguments of another."""
    pool = list(pool)
    proper_subs: set[Argument] = set()
    for arg in pool:
        for node in arg.walk():
            if node is not arg:
                proper_subs.add(node)
    return [a for a in pool if a not in proper_subs]


@dataclass(frozen=True)
class AgentPlan:
    """Precomputed per-knowledge-base material for building agents fast.

    Everything here is dispute-independent, so a harness can derive it
    once per case and share it across thousands of seeded replays.
    """

    kb: KnowledgeBase
    pool: tuple[Argument, ...]
    sorted_content: tuple[ContentPiece, ...]
    maximal: tuple[Argument, ...]
    premise_ids: frozenset[str]
    rule_ids: frozenset[str]
    single_min_level: Mapping[Argument, int]


def make_plan(kb: KnowledgeBase,
              vocabulary: frozenset[Statement] | None = None,
              pool: Iterable[Argument] | None = None) -> AgentPlan:
    if pool is None:
        pool = construct_arguments(kb, vocabulary)
    pool = tuple(sorted(pool, key=lambda a: a.structural_hash))
    return AgentPlan(
        kb=kb,
        pool=pool,
        sorted_content=tuple(sorted(kb.content, key=lambda piece: piece.content_id)),
        maximal=tuple(maximal_arguments(pool)),
        premise_ids=frozenset(p.content_id for p in kb.premises),
        rule_ids=frozenset(r.content_id for r in kb.rules),
        single_min_level=dict.fromkeys(pool, 1),
    )


class OSKB:
    """Ordered levels over one knowledge base's content.

    Levels are nonempty, disjoint, and together cover the knowledge base.
    Play starts with only the first level unlocked.
    """

    __slots__ = ("levels", "unlocked_upto")

    def __init__(self, levels: Sequence[Iterable[ContentPiece]]):
        self.levels: tuple[frozenset[ContentPiece], ...] = tuple(
            frozenset(level) for level in levels)
        seen: set[ContentPiece] = set()
        for level in self.levels:
            if not level:
                raise InvalidInputError("levels must be nonempty")
            if not seen.isdisjoint(level):
                raise InvalidInputError("levels must be disjoint")
            seen.update(level)
        self.unlocked_upto = min(1, len(self.levels))

    @property
    def n_levels(self) -> int:
        return len(self.levels)

    @property
    def is_fully_unlocked(self) -> bool:
        return self.unlocked_upto >= len(self.levels)

    def unlock_next(self) -> None:
        if self.is_fully_unlocked:
            raise EngineInvariantError("no deeper level to unlock")
        self.unlocked_upto += 1

    @property
    def unlocked_content(self) -> frozenset[ContentPiece]:
        out: set[ContentPiece] = set()
        for level in self.levels[:self.unlocked_upto]:
            out.update(level)
        return frozenset(out)

    def level_of(self) -> dict[ContentPiece, int]:
        """One-based level index of every content piece."""
        return {piece: depth
                for depth, level in enumerate(self.levels, start=1)
                for piece in level}


def _content_order(sorted_content: Sequence[ContentPiece],
                   preference_order: Sequence[str] | None,
                   rng: random.Random | None) -> list[ContentPiece]:
    pieces = list(sorted_content)
    if preference_order is not None:
        ids = [piece.content_id for piece in pieces]
        if sorted(preference_order) != sorted(ids):
            raise InvalidInputError("preference order must cover the knowledge base")
        position = {cid: i for i, cid in enumerate(preference_order)}
        pieces.sort(key=lambda piece: position[piece.content_id])
    elif rng is not None:
        rng.shuffle(pieces)
    return pieces


def build_oskb(kb: KnowledgeBase, division: Division,
               pool: Iterable[Argument] | None = None,
               preference_order: Sequence[str] | None = None,
               rng: random.Random | None = None,
               plan: AgentPlan | None = None) -> OSKB:
    """Cut a knowledge base into levels according to a division.

    The ordering of levels follows the preference order when given and a
    seeded shuffle otherwise. Content shared between arguments lands in
    the earliest level that uses it; content in no argument trails at the
    end. An undivided knowledge base consumes no randomness.
    """
    if kb.is_empty:
        raise InvalidInputError("cannot divide an empty knowledge base")
    if division is Division.NONE:
        return OSKB((kb.content,))
    sorted_content = plan.sorted_content if plan is not None \
        else tuple(sorted(kb.content, key=lambda piece: piece.content_id))
    if division is Division.ALL_CONTENT:
        return OSKB(tuple(
            (piece,) for piece in _content_order(sorted_content, preference_order, rng)))

    if plan is not None:
        base = plan.maximal
    else:
        if pool is None:
            pool = construct_arguments(kb)
        base = maximal_arguments(pool)
    order = _content_order(sorted_content, preference_order, rng)
    rank = {piece: i for i, piece in enumerate(order)}
    maximal = sorted(base,
                     key=lambda a: tuple(sorted(rank[piece] for piece in a.content)))
    if division is Division.HALF_ARGS:
        cut = (len(maximal) + 1) // 2
        groups = [maximal[:cut], maximal[cut:]]
    else:
        groups = [[arg] for arg in maximal]

    levels: list[frozenset[ContentPiece]] = []
    assigned: set[ContentPiece] = set()
    for group in groups:
        fresh: set[ContentPiece] = set()
        for arg in group:
            fresh.update(arg.content)
        fresh -= assigned
        if fresh:
            levels.append(frozenset(fresh))
            assigned.update(fresh)
    leftover = kb.content - frozenset(assigned)
    if leftover:
        levels.append(frozenset(leftover))
    return OSKB(tuple(levels))


@dataclass
class ConcealmentLedger:
    """What one agent still conceals of its own knowledge base.

    The ledger starts full and shrinks only when the agent's own moves
    reveal content.
    """

    concealed_premises: set[str]
    concealed_rules: set[str]
    total_premises: int
    total_rules: int

    @classmethod
    def for_kb(cls, kb: KnowledgeBase) -> "ConcealmentLedger":
        premises = {p.content_id for p in kb.premises}
        rules = {r.content_id for r in kb.rules}
        return cls(premises, rules, len(premises), len(rules))

    def reveal(self, content_ids: Iterable[str]) -> None:
        for cid in content_ids:
            self.concealed_premises.discard(cid)
            self.concealed_rules.discard(cid)

    @property
    def concealment_ratio(self) -> float:
        total = self.total_premises + self.total_rules
        if total == 0:
            return 1.0
        return (len(self.concealed_premises) + len(self.concealed_rules)) / total


@dataclass
class DisputeAgent:
    """One participant: a knowledge base played under a privacy behavior."""

    handle: str
    side: Side
    kb: KnowledgeBase
    behavior: PrivacyBehavior
    oskb: OSKB
    ledger: ConcealmentLedger
    pool: tuple[Argument, ...]
    min_level: Mapping[Argument, int]


def make_agent(handle: str, side: Side, kb: KnowledgeBase,
               behavior: PrivacyBehavior,
               rng: random.Random | None = None,
               pool: Iterable[Argument] | None = None,
               preference_order: Sequence[str] | None = None,
               vocabulary: frozenset[Statement] | None = None,
               plan: AgentPlan | None = None) -> DisputeAgent:
    if plan is None:
        plan = make_plan(kb, vocabulary, pool)
    if plan.kb.is_empty:
        oskb = OSKB(())
    else:
        oskb = build_oskb(plan.kb, behavior.division, preference_order=preference_order,
                          rng=rng, plan=plan)
    if oskb.n_levels <= 1:
        min_level: Mapping[Argument, int] = plan.single_min_level
    else:
        depth_of = oskb.level_of()
        min_level = {arg: max(depth_of[piece] for piece in arg.content)
                     for arg in plan.pool}
    ledger = ConcealmentLedger(set(plan.premise_ids), set(plan.rule_ids),
                               len(plan.premise_ids), len(plan.rule_ids))
    return DisputeAgent(handle=handle, side=side, kb=plan.kb, behavior=behavior,
                        oskb=oskb, ledger=ledger, pool=plan.pool,
                        min_level=min_level)


@dataclass(frozen=True)
class Move:
    """A selected board extension, in play order."""

    arguments: tuple[Argument, ...]


class MoveSignal(Enum):
    REQUEST_DROP = "request_drop"
    PASS = "pass"


def select_move(agent: DisputeAgent, state: DisputeState,
                rng: random.Random) -> Move | MoveSignal:
    """Pick a move from the unlocked pool, or ask to drop, or pass.

    Scope decides between playing every useful argument, the shortest,
    the longest, or a uniformly random one. With nothing useful unlocked
    the agent requests a drop while deeper levels remain.
    """
    depth = agent.oskb.unlocked_upto
    candidates = [a for a in agent.pool if agent.min_level[a] <= depth]
    useful = useful_arguments(state, candidates)
    if useful:
        ordered = [a for a in candidates if a in useful]
        scope = agent.behavior.scope
        if scope is Scope.ALL:
            return Move(tuple(ordered))
        if scope is Scope.SHORTEST:
            pick = min(ordered, key=lambda a: (a.size, a.structural_hash))
        elif scope is Scope.LONGEST:
            pick = max(ordered, key=lambda a: (a.size, -a.structural_hash))
        else:
            pick = ordered[rng.randrange(len(ordered))]
        return Move((pick,))
    if not agent.oskb.is_fully_unlocked:
        return MoveSignal.REQUEST_DROP
    return MoveSignal.PASS


class UserPrivacyType(Enum):
    FUNDAMENTALIST = "fundamentalist"
    LAZY_EXPERT = "lazy_expert"
    TECHNICIAN = "technician"
    AMATEUR = "amateur"
    MARGINALLY_CONCERNED = "marginally_concerned"


_PROFILE_TRAITS: dict[UserPrivacyType, tuple[str, str]] = {
    UserPrivacyType.FUNDAMENTALIST: ("high", "high"),
    UserPrivacyType.LAZY_EXPERT: ("high", "low"),
    UserPrivacyType.TECHNICIAN: ("medium", "high"),
    UserPrivacyType.AMATEUR: ("medium", "medium"),
    UserPrivacyType.MARGINALLY_CONCERNED: ("low", "low"),
}

_DIVISION_BY_KNOWLEDGE = {
    "high": Division.ALL_CONTENT,
    "medium": Division.ALL_ARGS,
    "low": Division.HALF_ARGS,
}

_THETA_BY_MOTIVATION = {"high": 25, "medium": 50, "low": 75}


@dataclass(frozen=True)
class UserProfile:
    """A user privacy type with its knowledge and motivation traits."""

    privacy_type: UserPrivacyType
    knowledge: str
    motivation: str

    def __post_init__(self):
        if self.knowledge not in _DIVISION_BY_KNOWLEDGE:
            raise InvalidInputError(f"unknown knowledge level {self.knowledge!r}")
        if self.motivation not in _THETA_BY_MOTIVATION:
            raise InvalidInputError(f"unknown motivation level {self.motivation!r}")

    @classmethod
    def for_type(cls, privacy_type: UserPrivacyType) -> "UserProfile":
        knowledge, motivation = _PROFILE_TRAITS[privacy_type]
        return cls(privacy_type, knowledge, motivation)


def personalize(profile: UserProfile) -> PrivacyBehavior:
    """Behavior for a user profile.

    Personalized agents always play shortest scope; knowledge picks the
    division depth and motivation sets dedication inversely.
    """
    return PrivacyBehavior(Scope.SHORTEST,
                           _DIVISION_BY_KNOWLEDGE[profile.knowledge],
                           _THETA_BY_MOTIVATION[profile.motivation])
