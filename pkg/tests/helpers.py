"""Small builders shared across test modules."""

from __future__ import annotations

import random

from privarg.core import (Argument, ArgumentGraph, ContraryRelation,
                          KnowledgeBase, Premise, PremiseKind, Rule, RuleKind,
                          Side, Statement)
from privarg.dispute import DisputeCase


def S(name: str) -> Statement:
    return Statement(name)


def leaf(name: str, kind: PremiseKind = PremiseKind.ORDINARY) -> Argument:
    return Argument.from_premise(Premise(S(name), kind))


def rule(rule_id: str, antecedents: list[str], consequent: str,
         kind: RuleKind = RuleKind.DEFEASIBLE) -> Rule:
    return Rule(rule_id, frozenset(S(a) for a in antecedents), S(consequent), kind)


def graph_of(nodes: list[tuple[Argument, Side]],
             edges: list[tuple[Argument, Argument]]) -> ArgumentGraph:
    return ArgumentGraph(frozenset(a for a, _ in nodes), frozenset(edges),
                         {a: s for a, s in nodes})


def abstract_graph(rng: random.Random, max_nodes: int = 10,
                   density: float = 0.25) -> ArgumentGraph:
    """A random attack graph over distinct leaf arguments."""
    n = rng.randint(0, max_nodes)
    nodes = [leaf(f"n{i}") for i in range(n)]
    edges = [(a, b) for a in nodes for b in nodes if rng.random() < density]
    owner = {arg: (Side.PROPONENT if i % 2 == 0 else Side.OPPONENT)
             for i, arg in enumerate(nodes)}
    return ArgumentGraph(frozenset(nodes), frozenset(edges), owner)


def random_kb(rng: random.Random, n_statements: int = 8,
              necessary_ratio: float = 0.2,
              strict_ratio: float = 0.2) -> KnowledgeBase:
    """A derivable knowledge base: every statement is concluded by something."""
    names = [f"s{i}" for i in range(max(1, n_statements))]
    premises: list[Premise] = []
    rules: list[Rule] = []
    for i, name in enumerate(names):
        if i == 0 or rng.random() < 0.5:
            kind = (PremiseKind.NECESSARY if rng.random() < necessary_ratio
                    else PremiseKind.ORDINARY)
            premises.append(Premise(S(name), kind))
        else:
            body = rng.sample(names[:i], rng.randint(1, min(3, i)))
            kind = RuleKind.STRICT if rng.random() < strict_ratio \
                else RuleKind.DEFEASIBLE
            rules.append(Rule(f"r{i}", frozenset(S(b) for b in body),
                              S(name), kind))
    return KnowledgeBase(frozenset(premises), frozenset(rules))


def chain_case() -> tuple[DisputeCase, Argument, Argument, Argument]:
    """Subject argument, one attacker, one counter-attacker.

    The proponent holds the subject argument and the counter, the
    opponent holds the attacker; pairwise contraries wire the chain.
    """
    root = leaf("subject")
    attacker = leaf("doubt")
    counter = leaf("rebuttal")
    contraries = ContraryRelation({(S("doubt"), S("subject")),
                                   (S("rebuttal"), S("doubt"))})
    pro = KnowledgeBase(frozenset({Premise(S("subject")), Premise(S("rebuttal"))}),
                        frozenset(), contraries)
    opp = KnowledgeBase(frozenset({Premise(S("doubt"))}), frozenset(), contraries)
    case = DisputeCase("chain", S("subject"), (pro,), (opp,))
    return case, root, attacker, counter
