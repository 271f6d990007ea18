"""Concealment-aware structured argumentation agents for privacy disputes.

The package models multiuser privacy conflicts as turn-based structured
argumentation disputes. Agents defend or contest a subject while trying
to keep as much of their own knowledge concealed as the dispute allows,
and experiments measure the trade-off between winning and concealment
across privacy behaviors and user populations.
"""

from ._version import __version__
from .agents import (INDIFFERENT, AgentPlan, ConcealmentLedger, DisputeAgent,
                     Division, Move, MoveSignal, OSKB, PrivacyBehavior, Scope,
                     THETA_VALUES, UserProfile, UserPrivacyType, behavior_grid,
                     build_oskb, decide_drop, make_agent, make_plan,
                     maximal_arguments, personalize, select_move)
from .core import (Argument, ArgumentGraph, ContraryRelation, GroundedLabelling,
                   KnowledgeBase, Label, Premise, PremiseKind, Rule, RuleKind, Side,
                   Statement, attacks, construct_arguments, grounded_labelling,
                   subject_accepted)
from .datagen import (Dataset, GenParams, dataset_sha256, generate_case,
                      generate_dataset, load_dataset, parse_dataset, save_dataset,
                      serialize_dataset)
from .dispute import (AttackIndex, DisputeCase, DisputeState, DisputeStatus,
                      MoveRecord, Team, compute_revealed, conclude_forfeit, extend,
                      format_trace, initial_state, replay, useful_arguments)
from .engine import DisputeOutcome, make_dispute_agents, play_case, run_dispute
from .errors import (ConfigError, EngineInvariantError, InvalidInputError,
                     ParseError, PrivargError, ProtocolViolationError,
                     ResourceLimitError)
from .experiments import (DESK_SCALE, FULL_SCALE, MatchupResult, MetricsRow,
                          PreparedCase, ScaleConfig, build_manifest, experiment1,
                          experiment2, format_results, population_focals,
                          population_roster, prepare_cases, run_matchup)
from .explain import (DisputeHistory, HistoryOutcome, advice_report, export_graph,
                      format_advice, load_history, parse_history, record_outcome,
                      save_history, serialize_history, summary_report)
from .seeds import derive_seed

__all__ = [name for name in dir() if not name.startswith("_")]
