"""Batch command line: load JSON inputs, dispatch, print an exact report.

Each subcommand reads JSON files, prints one report to stdout as ``key:
value`` lines (or CSV rows with ``--format csv``), and exits 0 when the
checked property holds or the construction succeeds, 1 when a property
fails (the report carries a witness), 2 on malformed or invalid input.
Rationals are printed as num/den; ``--human`` appends decimal
approximations to six places, which are display-only and never
authoritative.  Commands that build an object (extend, markovize,
thm-a-construct, find-morphism, lift, counterexample) write it as JSON
to ``--out``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Sequence

from .algebra import GeneratorSet, ball, parse_word, word_to_string
from .errors import BudgetExhausted, ParseError, SemishiftError, ValidationError
from .markovize import MarkovizedMeasure, markovization_consistency, markovize
from .measure import (
    MarkovTreeChain,
    counterexample_analyze,
    counterexample_chain,
    extend_chain,
    is_invariant_chain,
    pushforward_check,
    shift_invariance_check,
    validate_chain,
    weak_star_distance,
)
from .orbit import (
    find_separating_morphism,
    is_periodic,
    is_transitive,
    lift_to_group,
    minimized,
    orbit_size,
    readout,
    theorem_a_point,
    transformation_monoid,
)
from .reversible import LatticeBernoulli, LatticeMarkov, LatticeTable, window_measure
from .serialize import (
    automaton_in,
    automaton_out,
    block_alphabet_out,
    chain_in,
    chain_out,
    lattice_pattern_in,
    measure_in,
    measure_out,
    morphism_in,
    morphism_out,
    parse_fraction,
    pattern_in,
    read_json,
    write_json,
)

Row = tuple[str, Any]
LATTICE_KINDS = (LatticeBernoulli, LatticeMarkov, LatticeTable)


@dataclass(frozen=True)
class RunConfig:
    """One resolved invocation: command, file roles, scalar parameters."""

    command: str
    inputs: dict[str, Path] = field(default_factory=dict)
    params: dict[str, Any] = field(default_factory=dict)
    out: Path | None = None
    fmt: str = "text"
    human: bool = False
    threads: int = 1


def _value_text(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    return str(v)


def _approx_text(v: Any) -> str:
    if isinstance(v, Fraction):
        return f"{float(v):.6f}"
    return ""


def _render(rows: list[Row], config: RunConfig) -> str:
    if config.fmt == "csv":
        sink = io.StringIO()
        writer = csv.writer(sink, lineterminator="\n")
        header = ["key", "value"] + (["approx"] if config.human else [])
        writer.writerow(header)
        for key, value in rows:
            record = [key, _value_text(value)]
            if config.human:
                record.append(_approx_text(value))
            writer.writerow(record)
        return sink.getvalue().rstrip("\n")
    lines = []
    for key, value in rows:
        line = f"{key}: {_value_text(value)}"
        if config.human and _approx_text(value):
            line += f" (~ {_approx_text(value)})"
        lines.append(line)
    return "\n".join(lines)


def _read_measure(config: RunConfig, role: str = "measure"):
    return measure_in(read_json(config.inputs[role]), where=str(config.inputs[role]))


def _semigroup_measure(config: RunConfig, role: str = "measure"):
    measure = _read_measure(config, role)
    if isinstance(measure, LATTICE_KINDS):
        raise ValidationError(
            f"{config.inputs[role]}: lattice measures go with window-eval"
        )
    return measure


def _cmd_validate_chain(config: RunConfig) -> tuple[int, list[Row]]:
    chain = chain_in(read_json(config.inputs["chain"]), str(config.inputs["chain"]))
    diag = validate_chain(chain)
    rows: list[Row] = [("valid", diag.ok)]
    for i, problem in enumerate(diag.problems):
        rows.append((f"problem[{i}]", problem))
    if not diag.ok:
        return 1, rows
    res = is_invariant_chain(chain)
    rows.append(("invariant", res.ok))
    if not res.ok:
        rows.append(("witness", res.witness))
    return (0 if res.ok else 1), rows


def _cmd_invariance_check(config: RunConfig) -> tuple[int, list[Row]]:
    measure = _semigroup_measure(config)
    radius = config.params["radius"]
    rows: list[Row] = []
    if isinstance(measure, MarkovTreeChain):
        rows.append(("method", "algebraic"))
        res = is_invariant_chain(measure)
        rows.append(("invariant", res.ok))
        if not res.ok:
            rows.append(("witness", res.witness))
        return (0 if res.ok else 1), rows
    rows.append(("method", "ball"))
    rows.append(("radius", radius))
    for sym in measure.gs.symbols():
        res = shift_invariance_check(measure, sym, radius)
        if not res.ok:
            rows.append(("invariant", False))
            rows.append(("witness", f"generator {sym}: {res.witness}"))
            return 1, rows
    rows.append(("invariant", True))
    return 0, rows


def _cmd_eval(config: RunConfig) -> tuple[int, list[Row]]:
    measure = _semigroup_measure(config)
    pattern = pattern_in(read_json(config.inputs["pattern"]))
    mass = measure.eval(pattern)
    return 0, [("sites", len(pattern)), ("mass", mass)]


def _cmd_extend(config: RunConfig) -> tuple[int, list[Row]]:
    chain = chain_in(read_json(config.inputs["chain"]), str(config.inputs["chain"]))
    extended = extend_chain(chain)
    res = is_invariant_chain(extended)
    rows: list[Row] = [
        ("sigma", ",".join(str(s.signed) for s in extended.gs.symbols())),
        ("symbols", len(extended.gs.sigma)),
        ("invariant", res.ok),
    ]
    if config.out is not None:
        write_json(config.out, measure_out(extended))
        rows.append(("out", config.out))
    return (0 if res.ok else 1), rows


def _cmd_pushforward_check(config: RunConfig) -> tuple[int, list[Row]]:
    extended = chain_in(
        read_json(config.inputs["extended"]), str(config.inputs["extended"])
    )
    original = chain_in(read_json(config.inputs["chain"]), str(config.inputs["chain"]))
    radius = config.params["radius"]
    res = pushforward_check(extended, original, radius)
    rows: list[Row] = [("radius", radius), ("agree", res.ok)]
    if not res.ok:
        rows.append(("witness", res.witness))
    return (0 if res.ok else 1), rows


def _cmd_markovize(config: RunConfig) -> tuple[int, list[Row]]:
    measure = _semigroup_measure(config)
    order = config.params["order"]
    result = markovize(measure, order)
    ok = result.diagnostics.ok and result.invariance.ok
    rows: list[Row] = [
        ("order", order),
        ("blocks", len(result.blocks.blocks)),
        ("valid", result.diagnostics.ok),
        ("invariant", result.invariance.ok),
    ]
    for i, problem in enumerate(result.diagnostics.problems):
        rows.append((f"problem[{i}]", problem))
    if not result.invariance.ok:
        rows.append(("witness", result.invariance.witness))
    if config.out is not None:
        chain = result.chain
        names = tuple(f"B{i}" for i in range(len(chain.alphabet)))
        renamed = MarkovTreeChain.make(
            chain.gs, names, chain.p, dict(chain.transitions)
        )
        payload = {
            "kind": "chain",
            **chain_out(renamed),
            "blocks": block_alphabet_out(result.blocks, measure.gs.d),
        }
        write_json(config.out, payload)
        rows.append(("out", config.out))
    return (0 if ok else 1), rows


def _cmd_consistency(config: RunConfig) -> tuple[int, list[Row]]:
    measure = _semigroup_measure(config)
    order = config.params["order"]
    pattern = pattern_in(read_json(config.inputs["pattern"]))
    result = markovize(measure, order)
    consistent = markovization_consistency(measure, order, pattern, result)
    rows: list[Row] = [
        ("order", order),
        ("oracle_mass", measure.eval(pattern)),
        ("chain_mass", MarkovizedMeasure(result).eval(pattern)),
        ("consistent", consistent),
    ]
    return (0 if consistent else 1), rows


def _cmd_orbit_analyze(config: RunConfig) -> tuple[int, list[Row]]:
    automaton = automaton_in(
        read_json(config.inputs["automaton"]), str(config.inputs["automaton"])
    )
    small = minimized(automaton)
    size, group = transformation_monoid(automaton)
    rows: list[Row] = [
        ("states", automaton.n_states()),
        ("states_minimized", small.n_states()),
        ("pre_periodic", True),
        ("periodic", is_periodic(automaton)),
        ("transitive", is_transitive(automaton)),
        ("orbit_size", orbit_size(automaton)),
        ("monoid_size", size),
        ("monoid_is_group", group),
    ]
    return 0, rows


def _scalar(text: str) -> Any:
    try:
        value = json.loads(text)
    except json.JSONDecodeError:
        return text
    return tuple(value) if isinstance(value, list) else value


def _cmd_thm_a_construct(config: RunConfig) -> tuple[int, list[Row]]:
    pattern = pattern_in(read_json(config.inputs["pattern"]))
    theta = morphism_in(
        read_json(config.inputs["morphism"]), str(config.inputs["morphism"])
    )
    gs = GeneratorSet.from_signed([s.signed for s in theta])
    alphabet_arg = config.params.get("alphabet")
    if alphabet_arg:
        alphabet = tuple(_scalar(x) for x in alphabet_arg.split(","))
    else:
        values = {c for _, c in pattern.items()}
        if not values:
            raise ValidationError("an empty pattern needs an explicit --alphabet")
        try:
            alphabet = tuple(sorted(values))
        except TypeError:
            alphabet = tuple(sorted(values, key=repr))
    fill_arg = config.params.get("fill")
    fill = _scalar(fill_arg) if fill_arg is not None else None
    automaton = theorem_a_point(pattern, theta, gs, alphabet, fill)
    matches = all(readout(automaton, w) == c for w, c in pattern.items())
    periodic = is_periodic(automaton)
    rows: list[Row] = [
        ("states", automaton.n_states()),
        ("periodic", periodic),
        ("readout_matches", matches),
    ]
    if config.out is not None:
        write_json(config.out, automaton_out(automaton))
        rows.append(("out", config.out))
    return (0 if matches and periodic else 1), rows


def _cmd_find_morphism(config: RunConfig) -> tuple[int, list[Row]]:
    try:
        signed = [int(x) for x in config.params["sigma"].split(",")]
    except ValueError as exc:
        raise ParseError(f"--sigma: {exc}") from exc
    gs = GeneratorSet.from_signed(signed)
    radius = config.params["radius"]
    degree = config.params["degree"]
    rows: list[Row] = [
        ("degree", degree),
        ("ball_size", len(ball(gs, radius))),
    ]
    try:
        theta = find_separating_morphism(
            gs,
            radius,
            degree,
            seed=config.params["seed"],
            budget=config.params["budget"],
        )
    except BudgetExhausted as exc:
        rows.append(("found", False))
        rows.append(("reason", str(exc)))
        return 1, rows
    rows.append(("found", True))
    if config.out is not None:
        write_json(config.out, morphism_out(theta))
        rows.append(("out", config.out))
    return 0, rows


def _cmd_lift(config: RunConfig) -> tuple[int, list[Row]]:
    automaton = automaton_in(
        read_json(config.inputs["automaton"]), str(config.inputs["automaton"])
    )
    lifted = lift_to_group(automaton)
    rows: list[Row] = [
        ("states", lifted.n_states()),
        ("sigma", ",".join(str(s.signed) for s in lifted.gs.symbols())),
        ("periodic", is_periodic(lifted)),
    ]
    if config.out is not None:
        write_json(config.out, automaton_out(lifted))
        rows.append(("out", config.out))
    return 0, rows


def _cmd_distance(config: RunConfig) -> tuple[int, list[Row]]:
    first = _semigroup_measure(config, "first")
    second = _semigroup_measure(config, "second")
    radius = config.params["radius"]
    value = weak_star_distance(first, second, radius)
    return 0, [("radius", radius), ("distance", value)]


def _load_matrices(source: str) -> list:
    if source.lstrip().startswith("["):
        try:
            data = json.loads(source)
        except json.JSONDecodeError as exc:
            raise ParseError(f"--matrices: {exc.msg}") from exc
    else:
        data = read_json(Path(source))
    if not isinstance(data, list) or not data:
        raise ParseError("--matrices: expected a nonempty list of integer matrices")
    for m in data:
        for row in m:
            for x in row:
                if not isinstance(x, int):
                    raise ParseError(f"--matrices: entry {x!r} is not an integer")
    return data


def _cmd_counterexample(config: RunConfig) -> tuple[int, list[Row]]:
    matrices = _load_matrices(config.params["matrices"])
    word = parse_word(config.params["word"])
    prime = config.params["prime"]
    report = counterexample_analyze(matrices, word, prime)
    compact = json.dumps(
        [list(row) for row in report.matrix_mod_p], separators=(",", ":")
    )
    rows: list[Row] = [
        ("word", word_to_string(word, len(matrices))),
        ("prime", prime),
        ("matrix_mod_p", compact),
        ("witness", json.dumps(list(report.witness), separators=(",", ":"))),
        ("witness_image", json.dumps(list(report.witness_image), separators=(",", ":"))),
        ("cycle_length", report.cycle_length),
        ("threshold", report.threshold),
        ("single_site_mass", report.single_site_mass),
        ("bound_coefficient", report.bound_coefficient),
    ]
    code = 0
    delta_arg = config.params.get("delta")
    if delta_arg is not None:
        delta = parse_fraction(delta_arg, "--delta")
        chain = counterexample_chain(matrices, prime, delta)
        violated = report.violated_by(delta)
        rows.append(("delta", delta))
        rows.append(("violates_bound", violated))
        rows.append(("chain_symbols", len(chain.alphabet)))
        rows.append(("chain_invariant", is_invariant_chain(chain).ok))
        if config.out is not None:
            write_json(config.out, measure_out(chain))
            rows.append(("out", config.out))
        code = 0 if violated else 1
    return code, rows


def _cmd_window_eval(config: RunConfig) -> tuple[int, list[Row]]:
    measure = _read_measure(config)
    if not isinstance(measure, LATTICE_KINDS):
        raise ValidationError(
            f"{config.inputs['measure']}: window-eval needs a lattice measure"
        )
    pattern = lattice_pattern_in(read_json(config.inputs["pattern"]))
    mass = window_measure(measure, pattern)
    return 0, [("sites", len(pattern)), ("mass", mass)]


_HANDLERS: dict[str, Callable[[RunConfig], tuple[int, list[Row]]]] = {
    "validate-chain": _cmd_validate_chain,
    "invariance-check": _cmd_invariance_check,
    "eval": _cmd_eval,
    "extend": _cmd_extend,
    "pushforward-check": _cmd_pushforward_check,
    "markovize": _cmd_markovize,
    "consistency": _cmd_consistency,
    "orbit-analyze": _cmd_orbit_analyze,
    "thm-a-construct": _cmd_thm_a_construct,
    "find-morphism": _cmd_find_morphism,
    "lift": _cmd_lift,
    "distance": _cmd_distance,
    "counterexample": _cmd_counterexample,
    "window-eval": _cmd_window_eval,
}


def run(config: RunConfig) -> tuple[int, str]:
    """Dispatch one command; return (exit code, report text)."""
    handler = _HANDLERS.get(config.command)
    if handler is None:
        return 2, _render([("error", f"unknown command {config.command!r}")], config)
    try:
        code, rows = handler(config)
    except (ParseError, ValidationError) as exc:
        return 2, _render([("error", f"{type(exc).__name__}: {exc}")], config)
    except SemishiftError as exc:
        return 1, _render([("error", f"{type(exc).__name__}: {exc}")], config)
    except OSError as exc:
        return 2, _render([("error", str(exc))], config)
    return code, _render(rows, config)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semishift",
        description=(
            "Exact computations with invariant measures and periodic orbits "
            "of semigroup shift actions."
        ),
        epilog=(
            "exit codes: 0 success or property true; 1 property false "
            "(witness in the report); 2 input error"
        ),
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--format",
        dest="fmt",
        choices=["text", "csv"],
        default="text",
        help="report format (default text)",
    )
    common.add_argument(
        "--human",
        action="store_true",
        help="append non-authoritative decimal approximations",
    )
    common.add_argument(
        "--threads",
        type=int,
        default=1,
        help="worker threads to use (evaluations run sequentially)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "validate-chain",
        parents=[common],
        help="structural checks plus the invariance certificate for a chain",
    )
    p.add_argument("--chain", type=Path, required=True)

    p = sub.add_parser(
        "invariance-check",
        parents=[common],
        help="is the measure shift-invariant (algebraic for chains, ball scan else)",
    )
    p.add_argument("--measure", type=Path, required=True)
    p.add_argument("--radius", type=int, default=2)

    p = sub.add_parser(
        "eval", parents=[common], help="exact mass of one cylinder pattern"
    )
    p.add_argument("--measure", type=Path, required=True)
    p.add_argument("--pattern", type=Path, required=True)

    p = sub.add_parser(
        "extend",
        parents=[common],
        help="extend an invariant chain to the full signed generator set",
    )
    p.add_argument("--chain", type=Path, required=True)
    p.add_argument("--out", type=Path)

    p = sub.add_parser(
        "pushforward-check",
        parents=[common],
        help="does the extended chain restrict back to the original",
    )
    p.add_argument("--extended", type=Path, required=True)
    p.add_argument("--chain", type=Path, required=True)
    p.add_argument("--radius", type=int, default=2)

    p = sub.add_parser(
        "markovize",
        parents=[common],
        help="recode a measure as a Markov chain over order-m blocks",
    )
    p.add_argument("--measure", type=Path, required=True)
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--out", type=Path)

    p = sub.add_parser(
        "consistency",
        parents=[common],
        help="does the markovization reproduce the measure on a ball pattern",
    )
    p.add_argument("--measure", type=Path, required=True)
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--pattern", type=Path, required=True)

    p = sub.add_parser(
        "orbit-analyze",
        parents=[common],
        help="periodicity, transitivity, orbit size, transformation monoid",
    )
    p.add_argument("--automaton", type=Path, required=True)

    p = sub.add_parser(
        "thm-a-construct",
        parents=[common],
        help="periodic point through a pattern, via a permutation morphism",
    )
    p.add_argument("--pattern", type=Path, required=True)
    p.add_argument("--morphism", type=Path, required=True)
    p.add_argument("--alphabet", help="comma-separated symbols (default: from pattern)")
    p.add_argument("--fill", help="label for states off the pattern")
    p.add_argument("--out", type=Path)

    p = sub.add_parser(
        "find-morphism",
        parents=[common],
        help="seeded search for a permutation morphism injective on a ball",
    )
    p.add_argument("--sigma", required=True, help="signed generator indices, e.g. 1,2")
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--budget", type=int, default=10000)
    p.add_argument("--out", type=Path)

    p = sub.add_parser(
        "lift",
        parents=[common],
        help="lift a periodic automaton to a group orbit automaton",
    )
    p.add_argument("--automaton", type=Path, required=True)
    p.add_argument("--out", type=Path)

    p = sub.add_parser(
        "distance",
        parents=[common],
        help="total variation of two measures over full ball patterns",
    )
    p.add_argument("--first", type=Path, required=True)
    p.add_argument("--second", type=Path, required=True)
    p.add_argument("--radius", type=int, default=2)

    p = sub.add_parser(
        "counterexample",
        parents=[common],
        help="non-extensible chain from linear maps and a kernel word",
    )
    p.add_argument(
        "--matrices",
        required=True,
        help="JSON list of integer matrices, inline or a file path",
    )
    p.add_argument("--word", required=True, help="kernel word, e.g. a1a2A1A2")
    p.add_argument("--prime", type=int, required=True)
    p.add_argument("--delta", help="off-map probability, e.g. 1/100")
    p.add_argument("--out", type=Path)

    p = sub.add_parser(
        "window-eval",
        parents=[common],
        help="mass of a lattice-window pattern under an orthant oracle",
    )
    p.add_argument("--measure", type=Path, required=True)
    p.add_argument("--pattern", type=Path, required=True)

    return parser


_FILE_ROLES = ("chain", "measure", "pattern", "automaton", "morphism",
               "extended", "first", "second")


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    inputs = {}
    params = {}
    for key, value in vars(args).items():
        if key in ("command", "fmt", "human", "threads", "out"):
            continue
        if key in _FILE_ROLES:
            inputs[key] = value
        else:
            params[key] = value
    return RunConfig(
        command=args.command,
        inputs=inputs,
        params=params,
        out=getattr(args, "out", None),
        fmt=args.fmt,
        human=args.human,
        threads=args.threads,
    )


def execute(argv: Sequence[str] | None = None) -> tuple[int, str]:
    """Parse arguments and run; returns (exit code, report text)."""
    args = build_parser().parse_args(argv)
    return run(_config_from_args(args))


def main(argv: Sequence[str] | None = None) -> int:
    code, text = execute(argv)
    if text:
        print(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
