"""Seeded generation of dispute datasets and their text serialization.

A case grows as an attack tree: a proponent root argument for the
subject, then attackers hooked onto open weak points with alternating
ownership, newest weak point first, until the argument budget is spent.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from hashlib import sha256

from .core import (Argument, ContraryRelation, KnowledgeBase, Premise, PremiseKind,
                   Rule, RuleKind, Side, Statement)
from .dispute import DisputeCase
from .errors import InvalidInputError, ParseError
from .seeds import derive_seed
from .textfmt import LineReader, expect_header, parse_float, parse_int, parse_kv

DATASET_KIND = "privarg-dataset"
DATASET_VERSION = "1"

MAX_RULE_BODY = 3


@dataclass(frozen=True)
class GenParams:
    """Knobs of the dataset generator."""

    dispute_amount: int = 200
    dispute_size: int = 20
    max_argument_size: int = 10
    max_branches: int = 2
    ordinary_ratio: float = 0.8
    defeasible_ratio: float = 0.8
    seed: int = 0

    def __post_init__(self):
        if self.dispute_amount < 1:
            raise InvalidInputError("dispute amount must be at least 1")
        if self.dispute_size < 1:
            raise InvalidInputError("dispute size must be at least 1")
        if self.max_argument_size < 1:
            raise InvalidInputError("max argument size must be at least 1")
        if self.max_branches < 1:
            raise InvalidInputError("max branches must be at least 1")
        for name in ("ordinary_ratio", "defeasible_ratio"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise InvalidInputError(f"{name} must be within [0, 1]")


@dataclass(frozen=True)
class Dataset:
    params: GenParams
    cases: tuple[DisputeCase, ...]


class _Names:
    """Fresh statement and rule names, unique within one case."""

    def __init__(self):
        self._statements = 0
        self._rules = 0

    def statement(self) -> Statement:
        name = f"s{self._statements}"
        self._statements += 1
        return Statement(name)

    def rule_id(self) -> str:
        rid = f"r{self._rules}"
        self._rules += 1
        return rid


def _split_budget(rng: random.Random, total: int, parts: int) -> list[int]:
    if parts == 1:
        return [total]
    cuts = sorted(rng.sample(range(1, total), parts - 1))
    edges = [0] + cuts + [total]
    return [b - a for a, b in zip(edges, edges[1:])]


def _build_argument(rng: random.Random, params: GenParams, names: _Names,
                    conclusion: Statement, budget: int) -> Argument:
    if budget == 1:
        kind = (PremiseKind.ORDINARY
                if rng.random() < params.ordinary_ratio else PremiseKind.NECESSARY)
        return Argument.from_premise(Premise(conclusion, kind))
    n_children = rng.randint(1, min(budget - 1, MAX_RULE_BODY))
    children = []
    antecedents = []
    for part in _split_budget(rng, budget - 1, n_children):
        statement = names.statement()
        antecedents.append(statement)
        children.append(_build_argument(rng, params, names, statement, part))
    kind = (RuleKind.DEFEASIBLE
            if rng.random() < params.defeasible_ratio else RuleKind.STRICT)
    rule = Rule(names.rule_id(), frozenset(antecedents), conclusion, kind)
    return Argument.compose(rule, children)


def _with_ordinary_leaf(arg: Argument, target: Statement) -> Argument:
    if arg.is_leaf:
        if arg.premise_leaf.statement == target:
            return Argument.from_premise(Premise(target, PremiseKind.ORDINARY))
        return arg
    return Argument.compose(arg.top_rule,
                            [_with_ordinary_leaf(c, target) for c in arg.subarguments])


def generate_case(params: GenParams, case_index: int, seed: int) -> DisputeCase:
    """Grow one dispute case from a per-case seed."""
    rng = random.Random(seed)
    names = _Names()
    subject = names.statement()
    root = _build_argument(rng, params, names, subject,
                           rng.randint(1, params.max_argument_size))
    if params.dispute_size >= 2 and not root.weak_points:
        leaf = min(n.premise_leaf.statement for n in root.walk() if n.is_leaf)
        root = _with_ordinary_leaf(root, leaf)

    built: list[tuple[Argument, Side]] = [(root, Side.PROPONENT)]
    pairs: set[tuple[Statement, Statement]] = set()
    frontier: deque[tuple[int, Statement]] = deque(
        (1, stmt) for stmt in sorted(root.weak_statements))
    count = 1
    first_point = True
    while frontier and count < params.dispute_size:
        depth, target = frontier.pop()
        side = Side.PROPONENT if depth % 2 == 0 else Side.OPPONENT
        cap = min(params.max_branches, params.dispute_size - count)
        n_attackers = rng.randint(1 if first_point else 0, cap)
        first_point = False
        for _ in range(n_attackers):
            statement = names.statement()
            pairs.add((statement, target))
            attacker = _build_argument(rng, params, names, statement,
                                       rng.randint(1, params.max_argument_size))
            built.append((attacker, side))
            count += 1
            for weak in sorted(attacker.weak_statements):
                frontier.append((depth + 1, weak))
            if count >= params.dispute_size:
                break

    contraries = ContraryRelation(pairs)
    kbs: dict[Side, KnowledgeBase] = {}
    for side in (Side.PROPONENT, Side.OPPONENT):
        premises: set[Premise] = set()
        rules: set[Rule] = set()
        for arg, owner in built:
            if owner is not side:
                continue
            for node in arg.walk():
                if node.is_leaf:
                    premises.add(node.premise_leaf)
                else:
                    rules.add(node.top_rule)
        kbs[side] = KnowledgeBase(frozenset(premises), frozenset(rules),
                                  contraries, ())
    case = DisputeCase(f"c{case_index:04d}", subject,
                       (kbs[Side.PROPONENT],), (kbs[Side.OPPONENT],))
    case.validate()
    return case


def generate_dataset(params: GenParams) -> Dataset:
    cases = tuple(
        generate_case(params, index, derive_seed(params.seed, "case", index))
        for index in range(params.dispute_amount))
    return Dataset(params, cases)


def _format_ratio(value: float) -> str:
    return repr(value)


def serialize_dataset(dataset: Dataset) -> str:
    """Render a dataset in its versioned line format, deterministically."""
    p = dataset.params
    lines = [
        f"{DATASET_KIND} {DATASET_VERSION}",
        (f"params amount={p.dispute_amount} size={p.dispute_size}"
         f" max-arg={p.max_argument_size} branches={p.max_branches}"
         f" ordinary={_format_ratio(p.ordinary_ratio)}"
         f" defeasible={_format_ratio(p.defeasible_ratio)} seed={p.seed}"),
    ]
    for case in dataset.cases:
        lines.append(f"case {case.case_id}")
        lines.append(f"subject {case.subject}")
        contraries: set[tuple[Statement, Statement]] = set()
        for side in (Side.PROPONENT, Side.OPPONENT):
            kb = case.kbs_for(side)[0]
            contraries.update(kb.contraries.pairs)
            for premise in sorted(kb.premises, key=lambda x: x.statement):
                lines.append(f"premise {side.value} {premise.statement}"
                             f" {premise.kind.value}")
            for rule in sorted(kb.rules, key=lambda x: x.rule_id):
                body = ",".join(sorted(a.name for a in rule.antecedents))
                lines.append(f"rule {side.value} {rule.rule_id} {body}"
                             f" -> {rule.consequent} {rule.kind.value}")
        for a, b in sorted(contraries):
            lines.append(f"contrary {a} {b}")
        for side in (Side.PROPONENT, Side.OPPONENT):
            for bias in case.kbs_for(side)[0].biases:
                lines.append(f"bias {side.value} {bias}")
        lines.append("end")
    return "".join(line + "\n" for line in lines)


def _parse_side(token: str, line: int) -> Side:
    try:
        return Side(token)
    except ValueError:
        raise ParseError(f"unknown side {token!r}", line) from None


def _parse_params(reader: LineReader) -> GenParams:
    no, tokens = reader.take()
    if not tokens or tokens[0] != "params":
        raise ParseError("expected params line", no)
    keys = ("amount", "size", "max-arg", "branches", "ordinary", "defeasible", "seed")
    kv = parse_kv(tokens[1:], keys, no)
    try:
        return GenParams(
            dispute_amount=parse_int(kv["amount"], "amount", no),
            dispute_size=parse_int(kv["size"], "size", no),
            max_argument_size=parse_int(kv["max-arg"], "max-arg", no),
            max_branches=parse_int(kv["branches"], "branches", no),
            ordinary_ratio=parse_float(kv["ordinary"], "ordinary", no),
            defeasible_ratio=parse_float(kv["defeasible"], "defeasible", no),
            seed=parse_int(kv["seed"], "seed", no),
        )
    except InvalidInputError as exc:
        raise ParseError(str(exc), no) from None


def _parse_case(reader: LineReader, case_line: int, case_id: str) -> DisputeCase:
    no, tokens = reader.take()
    if len(tokens) != 2 or tokens[0] != "subject":
        raise ParseError("expected subject line", no)
    subject = Statement(tokens[1])
    premises: dict[Side, set[Premise]] = {side: set() for side in Side}
    rules: dict[Side, set[Rule]] = {side: set() for side in Side}
    biases: dict[Side, list[str]] = {side: [] for side in Side}
    pairs: set[tuple[Statement, Statement]] = set()
    while True:
        no, tokens = reader.take()
        directive = tokens[0]
        try:
            if directive == "end":
                if len(tokens) != 1:
                    raise ParseError("end takes no fields", no)
                break
            elif directive == "premise":
                if len(tokens) != 4:
                    raise ParseError("expected: premise <side> <statement> <kind>", no)
                side = _parse_side(tokens[1], no)
                try:
                    kind = PremiseKind(tokens[3])
                except ValueError:
                    raise ParseError(f"unknown premise kind {tokens[3]!r}", no) from None
                premises[side].add(Premise(Statement(tokens[2]), kind))
            elif directive == "rule":
                if len(tokens) != 7 or tokens[4] != "->":
                    raise ParseError(
                        "expected: rule <side> <id> <antecedents> -> <consequent> <kind>",
                        no)
                side = _parse_side(tokens[1], no)
                antecedents = frozenset(Statement(name)
                                        for name in tokens[3].split(",") if name)
                if not antecedents:
                    raise ParseError("rule needs at least one antecedent", no)
                try:
                    kind = RuleKind(tokens[6])
                except ValueError:
                    raise ParseError(f"unknown rule kind {tokens[6]!r}", no) from None
                rules[side].add(Rule(tokens[2], antecedents, Statement(tokens[5]), kind))
            elif directive == "contrary":
                if len(tokens) != 3:
                    raise ParseError("expected: contrary <statement> <statement>", no)
                pairs.add((Statement(tokens[1]), Statement(tokens[2])))
            elif directive == "bias":
                if len(tokens) < 3:
                    raise ParseError("expected: bias <side> <text>", no)
                biases[_parse_side(tokens[1], no)].append(" ".join(tokens[2:]))
            else:
                raise ParseError(f"unknown directive {directive!r}", no)
        except InvalidInputError as exc:
            raise ParseError(str(exc), no) from None
    contraries = ContraryRelation(pairs)
    try:
        case = DisputeCase(
            case_id, subject,
            (KnowledgeBase(frozenset(premises[Side.PROPONENT]),
                           frozenset(rules[Side.PROPONENT]),
                           contraries, tuple(biases[Side.PROPONENT])),),
            (KnowledgeBase(frozenset(premises[Side.OPPONENT]),
                           frozenset(rules[Side.OPPONENT]),
                           contraries, tuple(biases[Side.OPPONENT])),))
        case.validate()
    except InvalidInputError as exc:
        raise ParseError(f"case {case_id}: {exc}", case_line) from None
    return case


def parse_dataset(text: str) -> Dataset:
    """Parse a serialized dataset, rejecting anything malformed."""
    reader = LineReader(text)
    expect_header(reader, DATASET_KIND, DATASET_VERSION)
    params = _parse_params(reader)
    cases: list[DisputeCase] = []
    seen_ids: set[str] = set()
    while not reader.at_end:
        no, tokens = reader.take()
        if len(tokens) != 2 or tokens[0] != "case":
            raise ParseError("expected case line", no)
        if tokens[1] in seen_ids:
            raise ParseError(f"duplicate case id {tokens[1]!r}", no)
        seen_ids.add(tokens[1])
        cases.append(_parse_case(reader, no, tokens[1]))
    if len(cases) != params.dispute_amount:
        raise ParseError(
            f"params declare {params.dispute_amount} cases but found {len(cases)}")
    return Dataset(params, tuple(cases))


def dataset_sha256(text: str) -> str:
    return sha256(text.encode()).hexdigest()


def load_dataset(path) -> Dataset:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_dataset(fh.read())


def save_dataset(dataset: Dataset, path) -> str:
    text = serialize_dataset(dataset)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return text
