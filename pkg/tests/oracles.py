"""Independent reference implementations used only by tests.

Each oracle recomputes a library result with a deliberately different
algorithm: grounded labelling by exhaustive search over all complete
labellings, attacks by a direct walk over the target tree, argument
construction by naive closure iteration, and the dispute protocol by a
straight-line transcript builder that never touches the engine.
"""

from __future__ import annotations

import itertools
import random
from collections import defaultdict
from typing import Iterable, Sequence

import numpy as np

from privarg.core import (Argument, ContraryRelation, KnowledgeBase, Label,
                          PremiseKind, RuleKind, Side, Statement)
from privarg.dispute import DisputeCase

IN, OUT, UNDEC = 0, 1, 2

_CODE_TO_LABEL = {IN: Label.IN, OUT: Label.OUT, UNDEC: Label.UNDEC}


def oracle_grounded_codes(n: int, edges: Iterable[tuple[int, int]]) -> list[int]:
    """Grounded labelling of an abstract graph by brute force.

    Enumerates all 3^n label assignments, keeps the complete ones, and
    returns the unique assignment with the fewest IN labels. Nodes are
    0..n-1; edges are (attacker, target) pairs.
    """
    if n == 0:
        return []
    attack = np.zeros((n, n), dtype=np.int16)
    for attacker, target in edges:
        attack[target, attacker] = 1
    n_attackers = attack.sum(axis=1)
    codes = np.arange(3 ** n)
    digits = (codes[:, None] // (3 ** np.arange(n))) % 3
    is_in = digits == IN
    is_out = digits == OUT
    in_attackers = is_in.astype(np.int16) @ attack.T
    out_attackers = is_out.astype(np.int16) @ attack.T
    ok_in = out_attackers == n_attackers
    ok_out = in_attackers > 0
    ok_undec = (in_attackers == 0) & (out_attackers != n_attackers)
    legal = np.where(is_in, ok_in, np.where(is_out, ok_out, ok_undec))
    complete_rows = np.nonzero(legal.all(axis=1))[0]
    best = complete_rows[np.argmin(is_in[complete_rows].sum(axis=1))]
    return [int(d) for d in digits[best]]


def oracle_grounded(nodes: Sequence, edges: Iterable[tuple]) -> dict:
    """Same brute force, keyed by node object instead of index."""
    index = {node: i for i, node in enumerate(nodes)}
    codes = oracle_grounded_codes(
        len(nodes), [(index[a], index[t]) for a, t in edges])
    return {node: _CODE_TO_LABEL[codes[i]] for node, i in index.items()}


def oracle_weak_statements(arg: Argument) -> set[Statement]:
    found: set[Statement] = set()

    def visit(node: Argument) -> None:
        if node.is_leaf:
            if node.premise_leaf.kind is PremiseKind.ORDINARY:
                found.add(node.premise_leaf.statement)
            return
        if node.top_rule.kind is RuleKind.DEFEASIBLE:
            found.add(node.top_rule.consequent)
        for child in node.subarguments:
            visit(child)

    visit(arg)
    return found


def oracle_attacks(attacker: Argument, target: Argument,
                   contraries: ContraryRelation) -> bool:
    return any((attacker.conclusion, weak) in contraries.pairs
               for weak in oracle_weak_statements(target))


def oracle_construct(kb: KnowledgeBase) -> set[Argument]:
    """All finite arguments over a KB, by closure iteration."""
    by_conclusion: dict[Statement, list[Argument]] = defaultdict(list)
    known: set[Argument] = set()
    for premise in kb.premises:
        arg = Argument.from_premise(premise)
        known.add(arg)
        by_conclusion[premise.statement].append(arg)
    changed = True
    while changed:
        changed = False
        for rule in sorted(kb.rules, key=lambda r: r.rule_id):
            pools = [by_conclusion.get(s, [])
                     for s in sorted(rule.antecedents)]
            if any(not pool for pool in pools):
                continue
            for combo in itertools.product(*pools):
                if any(rule.consequent in sub.all_conclusions for sub in combo):
                    continue
                arg = Argument.compose(rule, combo)
                if arg not in known:
                    known.add(arg)
                    by_conclusion[rule.consequent].append(arg)
                    changed = True
    return known


def _oracle_labels(board: list[tuple[Argument, Side]],
                   contraries: ContraryRelation) -> dict[Argument, Label]:
    nodes = [arg for arg, _ in board]
    edges = [(a, t) for a in nodes for t in nodes
             if oracle_attacks(a, t, contraries)]
    return oracle_grounded(nodes, edges)


def oracle_dispute_trace(case: DisputeCase, pro_scope: str, opp_scope: str,
                         seed: int) -> tuple[str, str, str]:
    """Straight-line protocol transcript for two undivided agents.

    Supports scope all/shortest/longest/random with division None, where
    no level shuffles or dedication rolls consume randomness. Returns
    (trace text, winner side value, forfeiting side value) built without
    the engine: one flat loop, oracle attacks, oracle labelling.
    """
    rng = random.Random(seed)
    pools = {}
    for side, kb in ((Side.PROPONENT, case.proponent_kbs[0]),
                     (Side.OPPONENT, case.opponent_kbs[0])):
        pool = oracle_construct(kb)
        pools[side] = sorted(pool, key=lambda a: a.structural_hash)
    scopes = {Side.PROPONENT: pro_scope, Side.OPPONENT: opp_scope}
    handles = {Side.PROPONENT: "p0", Side.OPPONENT: "o0"}
    revealed: dict[Side, set[str]] = {side: set() for side in Side}
    board: list[tuple[Argument, Side]] = []
    lines: list[str] = []
    turn = Side.PROPONENT
    turn_index = 0
    while True:
        on_board = {arg for arg, _ in board}
        labels = _oracle_labels(board, case.contraries)
        mine_concludes = any(owner is turn and arg.conclusion == case.subject
                             for arg, owner in board)
        if turn is Side.PROPONENT and not mine_concludes:
            useful = [a for a in pools[turn]
                      if a.conclusion == case.subject and a not in on_board]
        else:
            live = [arg for arg, owner in board
                    if owner is not turn and labels[arg] is not Label.OUT]
            useful = [a for a in pools[turn]
                      if a not in on_board
                      and any(oracle_attacks(a, t, case.contraries)
                              for t in live)]
        if not useful:
            forfeited = turn
            if turn is Side.PROPONENT:
                winner = Side.OPPONENT
            else:
                final = _oracle_labels(board, case.contraries)
                accepted = any(owner is Side.PROPONENT
                               and arg.conclusion == case.subject
                               and final[arg] is Label.IN
                               for arg, owner in board)
                winner = Side.PROPONENT if accepted else Side.OPPONENT
            break
        scope = scopes[turn]
        if scope == "all":
            picked = list(useful)
        elif scope == "shortest":
            picked = [min(useful, key=lambda a: (a.size, a.structural_hash))]
        elif scope == "longest":
            picked = [max(useful, key=lambda a: (a.size, -a.structural_hash))]
        else:
            picked = [useful[rng.randrange(len(useful))]]
        board.extend((arg, turn) for arg in picked)
        new_content = set().union(*(arg.content_ids for arg in picked))
        fresh = new_content - revealed[turn]
        revealed[turn] |= new_content
        hashes = ",".join(arg.hash_hex for arg in picked)
        content = ",".join(sorted(fresh)) if fresh else "-"
        lines.append(f"{turn_index}\t{handles[turn]}\t{hashes}\t{content}")
        turn = turn.other
        turn_index += 1
    trace = "".join(line + "\n" for line in lines)
    return trace, winner.value, forfeited.value
