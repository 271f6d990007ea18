"""Command line interface for datasets, disputes, experiments and reports."""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from ._version import __version__
from .agents import (INDIFFERENT, Division, PrivacyBehavior, Scope, UserProfile,
                     UserPrivacyType, personalize)
from .datagen import (GenParams, dataset_sha256, generate_dataset, parse_dataset,
                      save_dataset)
from .dispute import format_trace
from .engine import play_case
from .errors import ConfigError, InvalidInputError, ParseError, PrivargError
from .experiments import (DESK_SCALE, FULL_SCALE, ScaleConfig, build_manifest,
                          experiment1, experiment2, format_results)
from .explain import (DisputeHistory, advice_report, export_graph, format_advice,
                      load_history, record_outcome, save_history, summary_report)
from .figures import render_grid_figures, render_population_figure
from .textfmt import LineReader, expect_header

CONFIG_ENV = "PRIVARG_CONFIG"
CONFIG_KIND = "privarg-config"
CONFIG_VERSION = "1"

_PRESETS: dict[str, PrivacyBehavior] = {"indifferent": INDIFFERENT}
_PRESETS.update((privacy_type.value, personalize(UserProfile.for_type(privacy_type)))
                for privacy_type in UserPrivacyType)


@dataclass(frozen=True)
class RosterConfig:
    """Agent handles and behaviors for both sides of a dispute."""

    proponents: tuple[tuple[str, PrivacyBehavior], ...]
    opponents: tuple[tuple[str, PrivacyBehavior], ...]


def behavior_from_fields(fields: dict[str, str]) -> PrivacyBehavior:
    """Build a behavior from key=value fields, or from a preset name."""
    if "preset" in fields:
        if len(fields) != 1:
            raise ConfigError("preset cannot be combined with other fields")
        preset = fields["preset"]
        if preset not in _PRESETS:
            raise ConfigError(f"unknown preset {preset!r}")
        return _PRESETS[preset]
    unknown = set(fields) - {"scope", "division", "theta"}
    if unknown:
        raise ConfigError(f"unknown behavior fields: {', '.join(sorted(unknown))}")
    missing = {"scope", "division", "theta"} - set(fields)
    if missing:
        raise ConfigError(f"missing behavior fields: {', '.join(sorted(missing))}")
    try:
        scope = Scope(fields["scope"])
    except ValueError:
        raise ConfigError(f"unknown scope {fields['scope']!r}") from None
    try:
        division = Division(fields["division"])
    except ValueError:
        raise ConfigError(f"unknown division {fields['division']!r}") from None
    try:
        theta = int(fields["theta"])
    except ValueError:
        raise ConfigError(f"theta must be an integer, got {fields['theta']!r}") from None
    try:
        return PrivacyBehavior(scope, division, theta)
    except InvalidInputError as exc:
        raise ConfigError(str(exc)) from None


def parse_behavior_flag(value: str) -> PrivacyBehavior:
    fields: dict[str, str] = {}
    for token in value.split(","):
        key, sep, val = token.partition("=")
        if not sep or not val:
            raise ConfigError(f"expected key=value, got {token!r}")
        if key in fields:
            raise ConfigError(f"duplicate field {key!r}")
        fields[key] = val
    return behavior_from_fields(fields)


def parse_config(text: str) -> RosterConfig:
    """Parse a roster config file into per-side handles and behaviors."""
    reader = LineReader(text)
    expect_header(reader, CONFIG_KIND, CONFIG_VERSION)
    rosters: dict[str, list[tuple[str, PrivacyBehavior]]] = {
        "proponent": [], "opponent": []}
    handles: set[str] = set()
    while not reader.at_end:
        no, tokens = reader.take()
        if len(tokens) < 3 or tokens[0] not in rosters:
            raise ParseError("expected: proponent|opponent <handle> <fields>", no)
        handle = tokens[1]
        if handle in handles:
            raise ParseError(f"duplicate handle {handle!r}", no)
        handles.add(handle)
        fields: dict[str, str] = {}
        for token in tokens[2:]:
            key, sep, val = token.partition("=")
            if not sep or not val:
                raise ParseError(f"expected key=value, got {token!r}", no)
            if key in fields:
                raise ParseError(f"duplicate field {key!r}", no)
            fields[key] = val
        try:
            behavior = behavior_from_fields(fields)
        except ConfigError as exc:
            raise ParseError(str(exc), no) from None
        rosters[tokens[0]].append((handle, behavior))
    if not rosters["proponent"] or not rosters["opponent"]:
        raise ParseError("config must declare at least one agent per side")
    return RosterConfig(tuple(rosters["proponent"]), tuple(rosters["opponent"]))


def _parse_handles(value: str | None, fallback: str) -> tuple[str, ...]:
    if not value:
        return (fallback,)
    handles = tuple(value.split(","))
    if any(not handle for handle in handles):
        raise ConfigError(f"empty handle in {value!r}")
    if len(set(handles)) != len(handles):
        raise ConfigError(f"duplicate handle in {value!r}")
    return handles


def _load_roster(args) -> RosterConfig:
    if args.pro or args.opp or args.team_p or args.team_o:
        pro = parse_behavior_flag(args.pro) if args.pro else INDIFFERENT
        opp = parse_behavior_flag(args.opp) if args.opp else INDIFFERENT
        pro_handles = _parse_handles(args.team_p, "p0")
        opp_handles = _parse_handles(args.team_o, "o0")
        if set(pro_handles) & set(opp_handles):
            raise ConfigError("a handle cannot appear on both teams")
        return RosterConfig(tuple((handle, pro) for handle in pro_handles),
                            tuple((handle, opp) for handle in opp_handles))
    config_path = args.config or os.environ.get(CONFIG_ENV)
    if config_path:
        with open(config_path, "r", encoding="utf-8") as fh:
            return parse_config(fh.read())
    return RosterConfig((("p0", INDIFFERENT),), (("o0", INDIFFERENT),))


def _cmd_generate(args) -> int:
    params = GenParams(dispute_amount=args.amount, dispute_size=args.size,
                       max_argument_size=args.max_arg, max_branches=args.branches,
                       ordinary_ratio=args.ordinary, defeasible_ratio=args.defeasible,
                       seed=args.seed)
    dataset = generate_dataset(params)
    text = save_dataset(dataset, args.out)
    print(f"wrote {len(dataset.cases)} cases to {args.out}")
    print(f"dataset-sha256 {dataset_sha256(text)}")
    return 0


def _cmd_dispute(args) -> int:
    with open(args.dataset, "r", encoding="utf-8") as fh:
        dataset = parse_dataset(fh.read())
    if args.case is None:
        case = dataset.cases[0]
    else:
        matches = [c for c in dataset.cases if c.case_id == args.case]
        if not matches:
            raise ConfigError(f"no case {args.case!r} in {args.dataset}")
        case = matches[0]
    roster = _load_roster(args)
    pro_handles = tuple(handle for handle, _ in roster.proponents)
    opp_handles = tuple(handle for handle, _ in roster.opponents)
    outcome = play_case(case,
                        tuple(b for _, b in roster.proponents),
                        tuple(b for _, b in roster.opponents),
                        args.seed, handles=(pro_handles, opp_handles))
    if args.trace:
        sys.stdout.write(format_trace(outcome.move_log))
    print(f"winner {outcome.winner.value}")
    print(f"forfeited-by {outcome.forfeited_by.value}")
    for handle in sorted(outcome.concealment):
        print(f"concealment {handle} {outcome.concealment[handle]:.4f}")
    if args.history:
        focal = args.focal or pro_handles[0]
        recorded = record_outcome(outcome, focal)
        path = Path(args.history)
        history = load_history(path) if path.exists() else DisputeHistory(())
        save_history(history.extended(recorded), path)
        print(f"history written to {path}")
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(export_graph(outcome))
        print(f"graph written to {args.dot}")
    return 0


def _scale_from_args(args) -> ScaleConfig:
    if args.scale == "desk":
        return DESK_SCALE
    if args.scale == "full":
        return FULL_SCALE
    return ScaleConfig(cases=args.cases, grid_step=args.grid_step,
                       include_self_play=not args.no_self_play)


def _cmd_experiment(args) -> int:
    with open(args.dataset, "r", encoding="utf-8") as fh:
        dataset_text = fh.read()
    dataset = parse_dataset(dataset_text)
    scale = _scale_from_args(args)
    runner = experiment1 if args.which == 1 else experiment2
    rows = runner(dataset, args.master_seed, scale, workers=args.workers)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    results_path = out_dir / f"exp{args.which}_results.csv"
    results_path.write_text(format_results(rows), encoding="utf-8")
    manifest_path = out_dir / f"exp{args.which}_manifest.txt"
    manifest_path.write_text(build_manifest(args.master_seed, scale, dataset_text),
                             encoding="utf-8")
    written = [results_path, manifest_path]
    if not args.no_figures:
        if args.which == 1:
            written.extend(render_grid_figures(rows, out_dir))
        else:
            written.append(render_population_figure(rows, out_dir))
    for row in rows:
        print(f"{row.label}: w_avg={row.w_avg:.4f} c_avg={row.c_avg:.4f}"
              f" combined={row.combined:.4f}")
    for path in written:
        print(f"wrote {path}")
    return 0


def _cmd_explain(args) -> int:
    history = load_history(args.history)
    wants_default = not (args.summary or args.advice or args.dot)
    if args.summary or wants_default:
        print(summary_report(history))
    if args.advice or wants_default:
        sys.stdout.write(format_advice(advice_report(history)))
    if args.dot:
        outcomes = history.outcomes
        if args.case is not None:
            outcomes = tuple(o for o in outcomes if o.case_id == args.case)
            if not outcomes:
                raise ConfigError(f"no outcome for case {args.case!r} in the history")
        out_dir = Path(args.dot)
        out_dir.mkdir(parents=True, exist_ok=True)
        for index, outcome in enumerate(outcomes):
            path = out_dir / f"{index:04d}_{outcome.case_id}.dot"
            path.write_text(export_graph(outcome), encoding="utf-8")
        print(f"wrote {len(outcomes)} graphs to {out_dir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="privarg",
        description="Concealment-aware argumentation agents for privacy disputes.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="generate a dispute dataset")
    gen.add_argument("--out", required=True, help="output dataset path")
    gen.add_argument("--amount", type=int, default=200)
    gen.add_argument("--size", type=int, default=20)
    gen.add_argument("--max-arg", type=int, default=10)
    gen.add_argument("--branches", type=int, default=2)
    gen.add_argument("--ordinary", type=float, default=0.8)
    gen.add_argument("--defeasible", type=float, default=0.8)
    gen.add_argument("--seed", type=int, default=0)
    gen.set_defaults(func=_cmd_generate)

    disp = sub.add_parser("dispute", help="play one dispute and print its trace")
    disp.add_argument("--dataset", required=True)
    disp.add_argument("--case", help="case id, default first case")
    disp.add_argument("--seed", type=int, default=0)
    disp.add_argument("--pro", help="proponent behavior, e.g. scope=all,"
                                    "division=none,theta=100 or preset=amateur")
    disp.add_argument("--opp", help="opponent behavior, same form as --pro")
    disp.add_argument("--team-p", help="comma-separated proponent handles")
    disp.add_argument("--team-o", help="comma-separated opponent handles")
    disp.add_argument("--trace", action="store_true", help="print the move log")
    disp.add_argument("--config", help=f"roster config path, default ${CONFIG_ENV}")
    disp.add_argument("--focal", help="handle recorded into the history")
    disp.add_argument("--history", help="append the outcome to this history file")
    disp.add_argument("--dot", help="write the final board as DOT")
    disp.set_defaults(func=_cmd_dispute)

    exp = sub.add_parser("experiment", help="run an experiment and write reports")
    exp.add_argument("--which", type=int, choices=(1, 2), required=True)
    exp.add_argument("--dataset", required=True)
    exp.add_argument("--master-seed", type=int, default=0)
    exp.add_argument("--scale", choices=("desk", "full", "custom"), default="full")
    exp.add_argument("--cases", type=int, help="custom scale: cases to keep")
    exp.add_argument("--grid-step", type=int, default=1,
                     help="custom scale: stride over the behavior grid")
    exp.add_argument("--no-self-play", action="store_true",
                     help="custom scale: skip same-behavior matchups")
    exp.add_argument("--workers", type=int, default=1)
    exp.add_argument("--out-dir", default="results")
    exp.add_argument("--no-figures", action="store_true")
    exp.set_defaults(func=_cmd_experiment)

    expl = sub.add_parser("explain", help="report on a recorded history")
    expl.add_argument("--history", required=True)
    expl.add_argument("--summary", action="store_true")
    expl.add_argument("--advice", action="store_true")
    expl.add_argument("--dot", help="write recorded boards as DOT into this directory")
    expl.add_argument("--case", help="case id filter for --dot")
    expl.set_defaults(func=_cmd_explain)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, ConfigError, InvalidInputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PrivargError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
