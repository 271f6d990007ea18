"""Explainability artifacts for one agent's dispute sessions.

A history file records, per dispute, the final board, the move log and
the agent's own result. From a history the agent can summarize how it
did, point at the content pieces that kept losing, and export boards as
DOT graphs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .core import (Argument, ArgumentGraph, Label, Premise, PremiseKind, Rule,
                   RuleKind, Side, Statement, grounded_labelling)
from .dispute import MoveRecord
from .engine import DisputeOutcome
from .errors import InvalidInputError, ParseError
from .textfmt import LineReader, expect_header, parse_float, parse_int

HISTORY_KIND = "privarg-history"
HISTORY_VERSION = "1"

Edge = tuple[Argument, Argument]


@dataclass(frozen=True)
class HistoryOutcome:
    """One dispute as seen by one agent: board, moves and result."""

    case_id: str
    agent: str
    side: Side
    won: bool
    concealment: float
    graph: ArgumentGraph
    move_log: tuple[MoveRecord, ...]
    attacked_statements: Mapping[Edge, frozenset[Statement]]


@dataclass(frozen=True)
class DisputeHistory:
    outcomes: tuple[HistoryOutcome, ...]

    def extended(self, outcome: HistoryOutcome) -> "DisputeHistory":
        return DisputeHistory(self.outcomes + (outcome,))


def record_outcome(outcome: DisputeOutcome, handle: str) -> HistoryOutcome:
    """Project a finished dispute onto the agent identified by handle."""
    state = outcome.final_state
    if handle not in state.side_of:
        raise InvalidInputError(f"unknown handle {handle}")
    contraries = state.case.contraries
    attacked: dict[Edge, frozenset[Statement]] = {}
    for attacker, target in state.graph.edges:
        hit = frozenset(stmt for stmt in target.weak_statements
                        if contraries.is_contrary(attacker.conclusion, stmt))
        attacked[(attacker, target)] = hit
    return HistoryOutcome(
        case_id=outcome.case_id,
        agent=handle,
        side=state.side_of[handle],
        won=outcome.won_by(handle),
        concealment=float(f"{outcome.concealment[handle]:.4f}"),
        graph=state.graph,
        move_log=state.move_log,
        attacked_statements=attacked,
    )


def _argument_table(graph: ArgumentGraph) -> list[Argument]:
    """Every argument reachable from the board, children before parents."""
    table: list[Argument] = []
    seen: set[str] = set()
    for node in sorted(graph.nodes, key=lambda a: a.hash_hex):
        for part in node.walk():
            if part.hash_hex not in seen:
                seen.add(part.hash_hex)
                table.append(part)
    return table


def _argument_line(arg: Argument) -> str:
    if arg.is_leaf:
        return (f"arg {arg.hash_hex} premise {arg.premise_leaf.statement}"
                f" {arg.premise_leaf.kind.value}")
    rule = arg.top_rule
    body = ",".join(sorted(a.name for a in rule.antecedents))
    children = ",".join(child.hash_hex for child in arg.subarguments)
    return (f"arg {arg.hash_hex} rule {rule.rule_id} {body} -> {rule.consequent}"
            f" {rule.kind.value} children {children}")


def serialize_history(history: DisputeHistory) -> str:
    """Render a history in its versioned line format, deterministically."""
    lines = [f"{HISTORY_KIND} {HISTORY_VERSION}"]
    for outcome in history.outcomes:
        won = "yes" if outcome.won else "no"
        lines.append(f"outcome {outcome.case_id} agent {outcome.agent}"
                     f" side {outcome.side.value} won {won}"
                     f" concealment {outcome.concealment:.4f}")
        for arg in _argument_table(outcome.graph):
            lines.append(_argument_line(arg))
        for node in sorted(outcome.graph.nodes, key=lambda a: a.hash_hex):
            lines.append(f"node {node.hash_hex} {outcome.graph.owner[node].value}")
        for attacker, target in sorted(outcome.graph.edges,
                                       key=lambda e: (e[0].hash_hex, e[1].hash_hex)):
            statements = outcome.attacked_statements[(attacker, target)]
            at = ",".join(sorted(stmt.name for stmt in statements))
            lines.append(f"edge {attacker.hash_hex} {target.hash_hex} at {at}")
        for move in outcome.move_log:
            hashes = ",".join(arg.hash_hex for arg in move.added_arguments)
            revealed = ",".join(sorted(move.revealed_content)) or "-"
            lines.append(f"move {move.turn_index} {move.actor} {hashes} {revealed}")
        lines.append("end")
    return "".join(line + "\n" for line in lines)


def _parse_argument_line(tokens: list[str], no: int,
                         table: dict[str, Argument]) -> None:
    if len(tokens) < 3:
        raise ParseError("malformed arg line", no)
    hash_hex = tokens[1]
    if hash_hex in table:
        raise ParseError(f"duplicate argument {hash_hex}", no)
    try:
        if tokens[2] == "premise":
            if len(tokens) != 5:
                raise ParseError("expected: arg <hash> premise <statement> <kind>", no)
            try:
                kind = PremiseKind(tokens[4])
            except ValueError:
                raise ParseError(f"unknown premise kind {tokens[4]!r}", no) from None
            arg = Argument.from_premise(Premise(Statement(tokens[3]), kind))
        elif tokens[2] == "rule":
            if len(tokens) != 10 or tokens[5] != "->" or tokens[8] != "children":
                raise ParseError(
                    "expected: arg <hash> rule <id> <antecedents> -> <consequent>"
                    " <kind> children <hashes>", no)
            try:
                kind = RuleKind(tokens[7])
            except ValueError:
                raise ParseError(f"unknown rule kind {tokens[7]!r}", no) from None
            antecedents = frozenset(Statement(name)
                                    for name in tokens[4].split(",") if name)
            rule = Rule(tokens[3], antecedents, Statement(tokens[6]), kind)
            children = []
            for child_hash in tokens[9].split(","):
                if child_hash not in table:
                    raise ParseError(f"unknown child argument {child_hash}", no)
                children.append(table[child_hash])
            arg = Argument.compose(rule, children)
        else:
            raise ParseError(f"unknown argument form {tokens[2]!r}", no)
    except InvalidInputError as exc:
        raise ParseError(str(exc), no) from None
    if arg.hash_hex != hash_hex:
        raise ParseError(f"argument hash mismatch: {hash_hex} vs {arg.hash_hex}", no)
    table[hash_hex] = arg


def _parse_outcome(reader: LineReader, tokens: list[str], no: int) -> HistoryOutcome:
    if (len(tokens) != 10 or tokens[2] != "agent" or tokens[4] != "side"
            or tokens[6] != "won" or tokens[8] != "concealment"):
        raise ParseError("malformed outcome line", no)
    case_id, agent = tokens[1], tokens[3]
    try:
        side = Side(tokens[5])
    except ValueError:
        raise ParseError(f"unknown side {tokens[5]!r}", no) from None
    if tokens[7] not in ("yes", "no"):
        raise ParseError(f"won must be yes or no, got {tokens[7]!r}", no)
    won = tokens[7] == "yes"
    concealment = parse_float(tokens[9], "concealment", no)

    table: dict[str, Argument] = {}
    owner: dict[Argument, Side] = {}
    edges: set[Edge] = set()
    attacked: dict[Edge, frozenset[Statement]] = {}
    moves: list[MoveRecord] = []

    def known(hash_hex: str, line: int) -> Argument:
        arg = table.get(hash_hex)
        if arg is None:
            raise ParseError(f"unknown argument {hash_hex}", line)
        return arg

    while True:
        no, tokens = reader.take()
        directive = tokens[0]
        if directive == "end":
            break
        if directive == "arg":
            _parse_argument_line(tokens, no, table)
        elif directive == "node":
            if len(tokens) != 3:
                raise ParseError("expected: node <hash> <side>", no)
            try:
                owner[known(tokens[1], no)] = Side(tokens[2])
            except ValueError:
                raise ParseError(f"unknown side {tokens[2]!r}", no) from None
        elif directive == "edge":
            if len(tokens) != 5 or tokens[3] != "at":
                raise ParseError("expected: edge <hash> <hash> at <statements>", no)
            attacker, target = known(tokens[1], no), known(tokens[2], no)
            if attacker not in owner or target not in owner:
                raise ParseError("edge endpoint is not a node", no)
            edge = (attacker, target)
            edges.add(edge)
            attacked[edge] = frozenset(Statement(name)
                                       for name in tokens[4].split(",") if name)
        elif directive == "move":
            if len(tokens) != 5:
                raise ParseError("expected: move <index> <actor> <hashes> <revealed>",
                                 no)
            index = parse_int(tokens[1], "move index", no)
            added = tuple(known(h, no) for h in tokens[3].split(",") if h)
            if not added:
                raise ParseError("move adds no arguments", no)
            revealed = frozenset() if tokens[4] == "-" \
                else frozenset(tokens[4].split(","))
            moves.append(MoveRecord(index, tokens[2], added, revealed))
        else:
            raise ParseError(f"unknown directive {directive!r}", no)

    graph = ArgumentGraph(frozenset(owner), frozenset(edges), owner)
    return HistoryOutcome(case_id=case_id, agent=agent, side=side, won=won,
                          concealment=concealment, graph=graph,
                          move_log=tuple(moves), attacked_statements=attacked)


def parse_history(text: str) -> DisputeHistory:
    reader = LineReader(text)
    expect_header(reader, HISTORY_KIND, HISTORY_VERSION)
    outcomes: list[HistoryOutcome] = []
    while not reader.at_end:
        no, tokens = reader.take()
        if not tokens or tokens[0] != "outcome":
            raise ParseError("expected outcome line", no)
        outcomes.append(_parse_outcome(reader, tokens, no))
    return DisputeHistory(tuple(outcomes))


def summary_report(history: DisputeHistory) -> str:
    """One-sentence self-report over a session."""
    if not history.outcomes:
        return "No disputes recorded in this session."
    outcomes = history.outcomes
    win_pct = round(100 * sum(o.won for o in outcomes) / len(outcomes))
    kept_pct = round(100 * sum(o.concealment for o in outcomes) / len(outcomes))
    return (f"I won {win_pct}% of the disputes in this session"
            f" and concealed {kept_pct}% of your content.")


def _weak_content_id(argument: Argument, statement: Statement) -> str | None:
    for node in argument.walk():
        if node.conclusion != statement:
            continue
        if node.is_leaf:
            if node.premise_leaf.kind is PremiseKind.ORDINARY:
                return node.premise_leaf.content_id
        elif node.top_rule.kind is RuleKind.DEFEASIBLE:
            return node.top_rule.content_id
    return None


def advice_report(history: DisputeHistory) -> list[tuple[str, int]]:
    """Content pieces of the agent that were defeated, with dispute counts.

    A piece counts once per dispute when an opposing IN argument attacked
    it on one of the agent's OUT arguments.
    """
    counts: dict[str, int] = {}
    for outcome in history.outcomes:
        labelling = grounded_labelling(outcome.graph)
        defeated: set[str] = set()
        for (attacker, target), statements in outcome.attacked_statements.items():
            if outcome.graph.owner[target] is not outcome.side:
                continue
            if labelling[target] is not Label.OUT or labelling[attacker] is not Label.IN:
                continue
            for statement in statements:
                content_id = _weak_content_id(target, statement)
                if content_id is not None:
                    defeated.add(content_id)
        for content_id in defeated:
            counts[content_id] = counts.get(content_id, 0) + 1
    return sorted(counts.items(), key=lambda item: (-item[1], item[0]))


def format_advice(rows: Sequence[tuple[str, int]]) -> str:
    if not rows:
        return "No content of yours was defeated in this session.\n"
    lines = []
    for content_id, count in rows:
        times = "dispute" if count == 1 else "disputes"
        lines.append(f"{content_id} was defeated in {count} {times};"
                     f" consider keeping it out of play.")
    return "".join(line + "\n" for line in lines)


_FILL_BY_LABEL = {Label.IN: "palegreen", Label.OUT: "lightcoral",
                  Label.UNDEC: "lightgray"}


def export_graph(outcome: DisputeOutcome | HistoryOutcome) -> str:
    """Final board as a DOT digraph with grounded labels as colors."""
    graph = outcome.graph
    labelling = grounded_labelling(graph)
    lines = ["digraph dispute {", "  rankdir=LR;"]
    for node in sorted(graph.nodes, key=lambda a: a.hash_hex):
        shape = "box" if graph.owner[node] is Side.PROPONENT else "ellipse"
        fill = _FILL_BY_LABEL[labelling[node]]
        lines.append(f'  "{node.hash_hex}" [label="{node.conclusion} ({node.size})",'
                     f' shape={shape}, style=filled, fillcolor={fill}];')
    for attacker, target in sorted(graph.edges,
                                   key=lambda e: (e[0].hash_hex, e[1].hash_hex)):
        lines.append(f'  "{attacker.hash_hex}" -> "{target.hash_hex}";')
    lines.append("}")
    return "".join(line + "\n" for line in lines)


def save_history(history: DisputeHistory, path) -> str:
    text = serialize_history(history)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return text


def load_history(path) -> DisputeHistory:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_history(fh.read())
