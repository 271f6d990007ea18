"""Structured argumentation core.

Statements, premises, rules and contrariness make up a knowledge base.
Arguments are finite trees built from that material, they attack each
other on weak points, and attack graphs are evaluated under grounded
semantics.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from hashlib import blake2b
from typing import Iterable, Iterator, Mapping

from .errors import InvalidInputError, ResourceLimitError

ARGUMENT_BUDGET = 100_000


class PremiseKind(Enum):
    ORDINARY = "ordinary"
    NECESSARY = "necessary"


class RuleKind(Enum):
    STRICT = "strict"
    DEFEASIBLE = "defeasible"


class Side(Enum):
    PROPONENT = "proponent"
    OPPONENT = "opponent"

    @property
    def other(self) -> "Side":
        return Side.OPPONENT if self is Side.PROPONENT else Side.PROPONENT


class Label(Enum):
    IN = "in"
    OUT = "out"
    UNDEC = "undec"


@dataclass(frozen=True, order=True)
class Statement:
    """An atomic statement, identified by its name."""

    name: str

    def __post_init__(self):
        if not self.name or any(ch.isspace() or ch == "," for ch in self.name):
            raise InvalidInputError(f"bad statement name: {self.name!r}")

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Premise:
    """A statement asserted directly, either ordinary or necessary.

    Only ordinary premises are attackable.
    """

    statement: Statement
    kind: PremiseKind = PremiseKind.ORDINARY

    @property
    def content_id(self) -> str:
        return f"p:{self.statement.name}"


@dataclass(frozen=True)
class Rule:
    """An inference rule, either strict or defeasible.

    Only the consequents of defeasible rules are attackable.
    """

    rule_id: str
    antecedents: frozenset[Statement]
    consequent: Statement
    kind: RuleKind = RuleKind.DEFEASIBLE

    def __post_init__(self):
        if not self.rule_id or any(ch.isspace() or ch == "," for ch in self.rule_id):
            raise InvalidInputError(f"bad rule id: {self.rule_id!r}")
        if not isinstance(self.antecedents, frozenset):
            object.__setattr__(self, "antecedents", frozenset(self.antecedents))
        if not self.antecedents:
            raise InvalidInputError(f"rule {self.rule_id} has no antecedents")
        if self.consequent in self.antecedents:
            raise InvalidInputError(f"rule {self.rule_id} concludes its own antecedent")

    @property
    def content_id(self) -> str:
        return f"r:{self.rule_id}"


ContentPiece = Premise | Rule


class ContraryRelation:
    """Directed incompatibility between statements.

    A pair (a, b) reads "a is a contrary of b": an argument concluding a
    attacks b wherever b is a weak point.
    """

    __slots__ = ("pairs", "_by_source")

    def __init__(self, pairs: Iterable[tuple[Statement, Statement]] = ()):
        self.pairs = frozenset(pairs)
        for a, b in self.pairs:
            if a == b:
                raise InvalidInputError(f"statement {a} cannot be its own contrary")
        by_source: dict[Statement, set[Statement]] = {}
        for a, b in self.pairs:
            by_source.setdefault(a, set()).add(b)
        self._by_source = {a: frozenset(bs) for a, bs in by_source.items()}

    def is_contrary(self, a: Statement, b: Statement) -> bool:
        return (a, b) in self.pairs

    def attackable_by(self, conclusion: Statement) -> frozenset[Statement]:
        """Statements that an argument concluding `conclusion` can attack."""
        return self._by_source.get(conclusion, frozenset())

    def __iter__(self) -> Iterator[tuple[Statement, Statement]]:
        return iter(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ContraryRelation):
            return NotImplemented
        return self.pairs == other.pairs

    def __hash__(self) -> int:
        return hash(self.pairs)

    def __repr__(self) -> str:
        return f"ContraryRelation({sorted((a.name, b.name) for a, b in self.pairs)})"


@dataclass(frozen=True)
class KnowledgeBase:
    """Premises, rules, contrariness and free-form biases of one party.

    Biases are carried and serialized but never influence evaluation.
    """

    premises: frozenset[Premise] = frozenset()
    rules: frozenset[Rule] = frozenset()
    contraries: ContraryRelation = field(default_factory=ContraryRelation)
    biases: tuple[str, ...] = ()

    def __post_init__(self):
        if not isinstance(self.premises, frozenset):
            object.__setattr__(self, "premises", frozenset(self.premises))
        if not isinstance(self.rules, frozenset):
            object.__setattr__(self, "rules", frozenset(self.rules))
        seen: set[Statement] = set()
        for p in self.premises:
            if p.statement in seen:
                raise InvalidInputError(f"duplicate premise for statement {p.statement}")
            seen.add(p.statement)
        ids: set[str] = set()
        for r in self.rules:
            if r.rule_id in ids:
                raise InvalidInputError(f"duplicate rule id {r.rule_id}")
            ids.add(r.rule_id)

    @property
    def is_empty(self) -> bool:
        return not self.premises and not self.rules

    @cached_property
    def content(self) -> frozenset[ContentPiece]:
        return frozenset(self.premises) | frozenset(self.rules)

    @cached_property
    def content_ids(self) -> frozenset[str]:
        return frozenset(piece.content_id for piece in self.content)

    @cached_property
    def statements(self) -> frozenset[Statement]:
        out = {p.statement for p in self.premises}
        for r in self.rules:
            out.add(r.consequent)
            out.update(r.antecedents)
        return frozenset(out)

    def validate(self, vocabulary: frozenset[Statement] | None = None) -> None:
        """Check closedness against a vocabulary of known statements.

        When no vocabulary is given, one is derived from the premises and
        rule consequents; antecedents and contraries must stay inside it.
        """
        if vocabulary is None:
            vocabulary = frozenset({p.statement for p in self.premises}
                                   | {r.consequent for r in self.rules})
        for r in self.rules:
            for a in r.antecedents:
                if a not in vocabulary:
                    raise InvalidInputError(
                        f"rule {r.rule_id} uses unknown statement {a}")
            if r.consequent not in vocabulary:
                raise InvalidInputError(
                    f"rule {r.rule_id} concludes unknown statement {r.consequent}")
        for a, b in self.contraries:
            if a not in vocabulary or b not in vocabulary:
                raise InvalidInputError(f"contrary ({a}, {b}) uses unknown statement")


def merge_contraries(relations: Iterable[ContraryRelation]) -> ContraryRelation:
    pairs: set[tuple[Statement, Statement]] = set()
    for rel in relations:
        pairs.update(rel.pairs)
    return ContraryRelation(pairs)


@dataclass(frozen=True, eq=False)
class Argument:
    """A finite tree of premises and rule applications.

    A leaf wraps a single premise. A composite node applies its top rule
    to one subargument per antecedent; subarguments are kept in canonical
    order (sorted by conclusion name) so equal trees compare equal.
    """

    conclusion: Statement
    top_rule: Rule | None = None
    subarguments: tuple["Argument", ...] = ()
    premise_leaf: Premise | None = None

    def __post_init__(self):
        if self.premise_leaf is not None:
            if self.top_rule is not None or self.subarguments:
                raise InvalidInputError("a leaf argument cannot apply a rule")
            if self.conclusion != self.premise_leaf.statement:
                raise InvalidInputError("leaf conclusion must match its premise")
        else:
            if self.top_rule is None or not self.subarguments:
                raise InvalidInputError("a composite argument needs a rule and children")
            if self.conclusion != self.top_rule.consequent:
                raise InvalidInputError("conclusion must match the top rule consequent")
            child_conclusions = [s.conclusion for s in self.subarguments]
            if len(child_conclusions) != len(set(child_conclusions)):
                raise InvalidInputError("one subargument per antecedent is required")
            if set(child_conclusions) != set(self.top_rule.antecedents):
                raise InvalidInputError("children must prove exactly the antecedents")
            if child_conclusions != sorted(child_conclusions):
                raise InvalidInputError("subarguments must be in canonical order")

    @classmethod
    def from_premise(cls, premise: Premise) -> "Argument":
        return cls(conclusion=premise.statement, premise_leaf=premise)

    @classmethod
    def compose(cls, rule: Rule, subarguments: Iterable["Argument"]) -> "Argument":
        children = tuple(sorted(subarguments, key=lambda a: a.conclusion))
        return cls(conclusion=rule.consequent, top_rule=rule, subarguments=children)

    @property
    def is_leaf(self) -> bool:
        return self.premise_leaf is not None

    @cached_property
    def structural_hash(self) -> int:
        return int.from_bytes(self._digest(), "big")

    @cached_property
    def hash_hex(self) -> str:
        return self._digest().hex()

    def _digest(self) -> bytes:
        h = blake2b(digest_size=8)
        if self.is_leaf:
            h.update(b"leaf\x00")
            h.update(self.premise_leaf.statement.name.encode())
            h.update(b"\x00")
            h.update(self.premise_leaf.kind.value.encode())
        else:
            h.update(b"rule\x00")
            h.update(self.top_rule.rule_id.encode())
            h.update(b"\x00")
            h.update(self.top_rule.kind.value.encode())
            for child in self.subarguments:
                h.update(b"\x00")
                h.update(child._digest())
        return h.digest()

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, Argument):
            return NotImplemented
        if self.structural_hash != other.structural_hash:
            return False
        return (self.conclusion == other.conclusion
                and self.top_rule == other.top_rule
                and self.premise_leaf == other.premise_leaf
                and self.subarguments == other.subarguments)

    def __hash__(self) -> int:
        return self.structural_hash

    def walk(self) -> Iterator["Argument"]:
        """Yield every node of the tree, children before parents."""
        for child in self.subarguments:
            yield from child.walk()
        yield self

    @cached_property
    def content(self) -> frozenset[ContentPiece]:
        pieces: set[ContentPiece] = set()
        for node in self.walk():
            pieces.add(node.premise_leaf if node.is_leaf else node.top_rule)
        return frozenset(pieces)

    @cached_property
    def content_ids(self) -> frozenset[str]:
        return frozenset(piece.content_id for piece in self.content)

    @cached_property
    def size(self) -> int:
        return len(self.content)

    @cached_property
    def all_conclusions(self) -> frozenset[Statement]:
        return frozenset(node.conclusion for node in self.walk())

    @cached_property
    def weak_points(self) -> frozenset[tuple["Argument", Statement]]:
        """Attackable positions: ordinary premises and defeasible conclusions.

        Each position pairs the subargument rooted there with its statement.
        """
        points: set[tuple[Argument, Statement]] = set()
        for node in self.walk():
            if node.is_leaf:
                if node.premise_leaf.kind is PremiseKind.ORDINARY:
                    points.add((node, node.conclusion))
            elif node.top_rule.kind is RuleKind.DEFEASIBLE:
                points.add((node, node.conclusion))
        return frozenset(points)

    @cached_property
    def weak_statements(self) -> frozenset[Statement]:
        return frozenset(s for _, s in self.weak_points)

    def __repr__(self) -> str:
        return f"Argument({self.conclusion}, {self.hash_hex})"


def attacks(attacker: Argument, target: Argument, contraries: ContraryRelation) -> bool:
    """True when the attacker's conclusion is contrary to a weak point."""
    attackable = contraries.attackable_by(attacker.conclusion)
    if not attackable:
        return False
    return not attackable.isdisjoint(target.weak_statements)


def construct_arguments(kb: KnowledgeBase,
                        vocabulary: frozenset[Statement] | None = None,
                        max_arguments: int = ARGUMENT_BUDGET) -> frozenset[Argument]:
    """All arguments buildable from a knowledge base, to a fixpoint.

    Combinations that would repeat a statement along a branch are
    excluded, which keeps the set finite. Raises ResourceLimitError when
    the number of arguments exceeds `max_arguments`.
    """
    kb.validate(vocabulary)
    by_conclusion: dict[Statement, list[Argument]] = {}
    known: set[Argument] = set()

    def admit(arg: Argument) -> bool:
        if arg in known:
            return False
        if len(known) >= max_arguments:
            raise ResourceLimitError(
                f"argument construction exceeded the budget of {max_arguments}")
        known.add(arg)
        by_conclusion.setdefault(arg.conclusion, []).append(arg)
        return True

    for premise in sorted(kb.premises, key=lambda p: p.statement):
        admit(Argument.from_premise(premise))

    rules = sorted(kb.rules, key=lambda r: r.rule_id)
    changed = True
    while changed:
        changed = False
        for rule in rules:
            antecedents = sorted(rule.antecedents)
            pools = [by_conclusion.get(a) for a in antecedents]
            if any(pool is None for pool in pools):
                continue
            for combo in itertools.product(*[list(pool) for pool in pools]):
                if any(rule.consequent in sub.all_conclusions for sub in combo):
                    continue
                if admit(Argument.compose(rule, combo)):
                    changed = True
    return frozenset(known)


@dataclass(frozen=True)
class ArgumentGraph:
    """A directed attack graph over owned arguments."""

    nodes: frozenset[Argument] = frozenset()
    edges: frozenset[tuple[Argument, Argument]] = frozenset()
    owner: Mapping[Argument, Side] = field(default_factory=dict)

    def __post_init__(self):
        for a, b in self.edges:
            if a not in self.nodes or b not in self.nodes:
                raise InvalidInputError("edge endpoint is not a node")
        for node in self.nodes:
            if node not in self.owner:
                raise InvalidInputError(f"node {node!r} has no owner")

    def with_additions(self,
                       new_nodes: Iterable[tuple[Argument, Side]],
                       new_edges: Iterable[tuple[Argument, Argument]]) -> "ArgumentGraph":
        owner = dict(self.owner)
        nodes = set(self.nodes)
        for arg, side in new_nodes:
            nodes.add(arg)
            owner[arg] = side
        return ArgumentGraph(frozenset(nodes), self.edges | frozenset(new_edges), owner)

    def attackers_of(self, target: Argument) -> list[Argument]:
        return [a for a, b in self.edges if b == target]


@dataclass(frozen=True)
class GroundedLabelling:
    """Grounded labels for every node of an attack graph."""

    labels: Mapping[Argument, Label]

    def __getitem__(self, arg: Argument) -> Label:
        return self.labels[arg]

    def arguments_with(self, label: Label) -> frozenset[Argument]:
        return frozenset(a for a, lab in self.labels.items() if lab is label)


def grounded_labelling(graph: ArgumentGraph) -> GroundedLabelling:
    """Least-fixpoint grounded labelling of an attack graph.

    A node is IN once all its attackers are OUT, OUT once some attacker
    is IN; everything never forced either way stays UNDEC.
    """
    attackers: dict[Argument, list[Argument]] = {node: [] for node in graph.nodes}
    for a, b in graph.edges:
        attackers[b].append(a)
    labels: dict[Argument, Label] = {}
    pending = set(graph.nodes)
    while pending:
        newly_in = [n for n in pending
                    if all(labels.get(att) is Label.OUT for att in attackers[n])]
        if not newly_in:
            break
        for n in newly_in:
            labels[n] = Label.IN
            pending.discard(n)
        newly_out = [n for n in pending
                     if any(labels.get(att) is Label.IN for att in attackers[n])]
        for n in newly_out:
            labels[n] = Label.OUT
            pending.discard(n)
    for n in pending:
        labels[n] = Label.UNDEC
    return GroundedLabelling(labels)


def subject_accepted(graph: ArgumentGraph, subject: Statement,
                     labelling: GroundedLabelling | None = None) -> bool:
    """True when some proponent argument for the subject is labelled IN."""
    labelling = labelling or grounded_labelling(graph)
    return any(node.conclusion == subject
               and graph.owner[node] is Side.PROPONENT
               and labelling[node] is Label.IN
               for node in graph.nodes)
