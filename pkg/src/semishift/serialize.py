"""JSON reading and writing for every object the command line touches.

Rationals are always written as ``num/den`` strings, never as decimals.
Words use the letter syntax from ``algebra`` (empty string for the
identity).  Alphabet symbols may be strings, integers, or integer pairs;
pairs are written as two-element lists.  Measure files carry a ``kind``
tag: chain, bernoulli, periodic, mixture, lattice-bernoulli,
lattice-markov, or lattice-table.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from pathlib import Path
from typing import Any

from .algebra import GeneratorSet, Symbol, Word, parse_word, word_to_string
from .errors import ParseError, SemishiftError
from .markovize import BlockAlphabet
from .measure import (
    BernoulliMeasure,
    MarkovTreeChain,
    MixtureMeasure,
    Pattern,
)
from .orbit import GroupOrbitAutomaton, OrbitAutomaton, PeriodicMeasure
from .reversible import (
    LatticeBernoulli,
    LatticeMarkov,
    LatticePattern,
    LatticeTable,
)


def fraction_to_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


_RATIONAL = re.compile(r"-?[0-9]+(/[0-9]+)?")


def parse_fraction(text: Any, where: str = "value") -> Fraction:
    # only "num" or "num/den"; decimals would hide rounding in the files
    if not isinstance(text, str) or not _RATIONAL.fullmatch(text):
        raise ParseError(f"{where}: cannot read rational {text!r}")
    try:
        return Fraction(text)
    except ZeroDivisionError as exc:
        raise ParseError(f"{where}: cannot read rational {text!r}: {exc}") from exc


def _symbol_out(value: Any) -> Any:
    if isinstance(value, tuple):
        return [_symbol_out(v) for v in value]
    return value


def _symbol_in(value: Any) -> Any:
    if isinstance(value, list):
        return tuple(_symbol_in(v) for v in value)
    return value


def read_json(path: str | Path) -> Any:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def write_json(path: str | Path, data: Any) -> None:
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


def _need(data: dict, key: str, where: str) -> Any:
    if key not in data:
        raise ParseError(f"{where}: missing key {key!r}")
    return data[key]


def generator_set_out(gs: GeneratorSet) -> dict:
    return {"d": gs.d, "sigma": [s.signed for s in gs.symbols()]}


def generator_set_in(data: dict, where: str) -> GeneratorSet:
    try:
        return GeneratorSet.from_signed(
            _need(data, "sigma", where), d=int(_need(data, "d", where))
        )
    except (ValueError, SemishiftError) as exc:
        raise ParseError(f"{where}: {exc}") from exc


def chain_out(chain: MarkovTreeChain) -> dict:
    return {
        **generator_set_out(chain.gs),
        "alphabet": [_symbol_out(c) for c in chain.alphabet],
        "p": [fraction_to_str(x) for x in chain.p],
        "P": {
            str(sym.signed): [[fraction_to_str(x) for x in row] for row in rows]
            for sym, rows in chain.transitions
        },
    }


def chain_in(data: dict, where: str = "chain") -> MarkovTreeChain:
    gs = generator_set_in(data, where)
    alphabet = tuple(_symbol_in(c) for c in _need(data, "alphabet", where))
    p = [parse_fraction(x, f"{where}: p") for x in _need(data, "p", where)]
    raw = _need(data, "P", where)
    matrices = {}
    for key, rows in raw.items():
        try:
            signed = int(key)
        except ValueError as exc:
            raise ParseError(f"{where}: bad generator key {key!r}") from exc
        matrices[signed] = [
            [parse_fraction(x, f"{where}: P[{key}]") for x in row] for row in rows
        ]
    try:
        return MarkovTreeChain.make(gs, alphabet, p, matrices)
    except (ValueError, SemishiftError) as exc:
        raise ParseError(f"{where}: {exc}") from exc


def pattern_out(pattern: Pattern, d: int) -> dict:
    return {
        "entries": [
            [word_to_string(w, d), _symbol_out(c)] for w, c in pattern.items()
        ]
    }


def pattern_in(data: dict, where: str = "pattern") -> Pattern:
    entries = _need(data, "entries", where)
    if isinstance(entries, dict):
        items = entries.items()
    else:
        items = ((k, v) for k, v in entries)
    try:
        return Pattern.of([(parse_word(k), _symbol_in(v)) for k, v in items])
    except (ValueError, SemishiftError) as exc:
        raise ParseError(f"{where}: {exc}") from exc


def automaton_out(o: OrbitAutomaton) -> dict:
    return {
        **generator_set_out(o.gs),
        "alphabet": [_symbol_out(c) for c in o.alphabet],
        "labels": [_symbol_out(c) for c in o.labels],
        "base": o.base,
        "delta": {
            str(sym.signed): list(o.delta[sym]) for sym in o.gs.symbols()
        },
    }


def automaton_in(data: dict, where: str = "automaton") -> OrbitAutomaton:
    gs = generator_set_in(data, where)
    alphabet = tuple(_symbol_in(c) for c in _need(data, "alphabet", where))
    labels = tuple(_symbol_in(c) for c in _need(data, "labels", where))
    raw = _need(data, "delta", where)
    delta = {}
    for key, row in raw.items():
        try:
            delta[Symbol.from_signed(int(key))] = tuple(int(q) for q in row)
        except ValueError as exc:
            raise ParseError(f"{where}: bad delta entry {key!r}") from exc
    cls = (
        GroupOrbitAutomaton
        if gs.sigma == {s.inverse() for s in gs.sigma}
        else OrbitAutomaton
    )
    try:
        return cls(
            gs=gs,
            alphabet=alphabet,
            labels=labels,
            delta=delta,
            base=int(_need(data, "base", where)),
        )
    except SemishiftError as exc:
        raise ParseError(f"{where}: {exc}") from exc


def morphism_out(theta: dict[Symbol, tuple[int, ...]]) -> dict:
    degree = len(next(iter(theta.values())))
    return {
        "k": degree,
        "theta": {
            str(sym.signed): list(p)
            for sym, p in sorted(theta.items(), key=lambda kv: kv[0].key())
        },
    }


def morphism_in(data: dict, where: str = "morphism") -> dict[Symbol, tuple[int, ...]]:
    raw = _need(data, "theta", where)
    out = {}
    for key, p in raw.items():
        try:
            out[Symbol.from_signed(int(key))] = tuple(int(i) for i in p)
        except ValueError as exc:
            raise ParseError(f"{where}: bad permutation for {key!r}") from exc
    if not out:
        raise ParseError(f"{where}: empty morphism")
    return out


def lattice_pattern_out(pattern: LatticePattern) -> dict:
    return {"entries": [[list(v), _symbol_out(c)] for v, c in pattern.items()]}


def lattice_pattern_in(data: dict, where: str = "lattice pattern") -> LatticePattern:
    entries = _need(data, "entries", where)
    try:
        return LatticePattern.of(
            [(tuple(int(x) for x in v), _symbol_in(c)) for v, c in entries]
        )
    except (ValueError, SemishiftError) as exc:
        raise ParseError(f"{where}: {exc}") from exc


def measure_out(measure: Any) -> dict:
    if isinstance(measure, MarkovTreeChain):
        return {"kind": "chain", **chain_out(measure)}
    if isinstance(measure, BernoulliMeasure):
        return {
            "kind": "bernoulli",
            **generator_set_out(measure.gs),
            "alphabet": [_symbol_out(c) for c in measure.alphabet],
            "probs": [fraction_to_str(x) for x in measure.probs],
        }
    if isinstance(measure, PeriodicMeasure):
        return {
            "kind": "periodic",
            "orbits": [automaton_out(o) for o in measure.orbits],
            "weights": [fraction_to_str(w) for w in measure.weights],
        }
    if isinstance(measure, MixtureMeasure):
        return {
            "kind": "mixture",
            "components": [measure_out(m) for m in measure.components],
            "weights": [fraction_to_str(w) for w in measure.weights],
        }
    if isinstance(measure, LatticeBernoulli):
        return {
            "kind": "lattice-bernoulli",
            "d": measure.d,
            "alphabet": [_symbol_out(c) for c in measure.alphabet],
            "probs": [fraction_to_str(x) for x in measure.probs],
        }
    if isinstance(measure, LatticeMarkov):
        return {
            "kind": "lattice-markov",
            "alphabet": [_symbol_out(c) for c in measure.alphabet],
            "p": [fraction_to_str(x) for x in measure.p],
            "P": [[fraction_to_str(x) for x in row] for row in measure.P],
        }
    if isinstance(measure, LatticeTable):
        return {
            "kind": "lattice-table",
            "d": measure.d,
            "alphabet": [_symbol_out(c) for c in measure.alphabet],
            "box": list(measure.box),
            "table": [
                [lattice_pattern_out(pat), fraction_to_str(mass)]
                for pat, mass in measure.table
            ],
        }
    raise ParseError(f"cannot serialize measure of type {type(measure).__name__}")


def measure_in(data: dict, where: str = "measure") -> Any:
    kind = _need(data, "kind", where)
    try:
        if kind == "chain":
            return chain_in(data, where)
        if kind == "bernoulli":
            return BernoulliMeasure(
                gs=generator_set_in(data, where),
                alphabet=tuple(_symbol_in(c) for c in _need(data, "alphabet", where)),
                probs=tuple(
                    parse_fraction(x, f"{where}: probs")
                    for x in _need(data, "probs", where)
                ),
            )
        if kind == "periodic":
            return PeriodicMeasure(
                orbits=tuple(
                    automaton_in(o, f"{where}: orbit {i}")
                    for i, o in enumerate(_need(data, "orbits", where))
                ),
                weights=tuple(
                    parse_fraction(w, f"{where}: weights")
                    for w in _need(data, "weights", where)
                ),
            )
        if kind == "mixture":
            return MixtureMeasure(
                components=tuple(
                    measure_in(m, f"{where}: component {i}")
                    for i, m in enumerate(_need(data, "components", where))
                ),
                weights=tuple(
                    parse_fraction(w, f"{where}: weights")
                    for w in _need(data, "weights", where)
                ),
            )
        if kind == "lattice-bernoulli":
            return LatticeBernoulli(
                d=int(_need(data, "d", where)),
                alphabet=tuple(_symbol_in(c) for c in _need(data, "alphabet", where)),
                probs=tuple(
                    parse_fraction(x, f"{where}: probs")
                    for x in _need(data, "probs", where)
                ),
            )
        if kind == "lattice-markov":
            return LatticeMarkov(
                alphabet=tuple(_symbol_in(c) for c in _need(data, "alphabet", where)),
                p=tuple(
                    parse_fraction(x, f"{where}: p") for x in _need(data, "p", where)
                ),
                P=tuple(
                    tuple(parse_fraction(x, f"{where}: P") for x in row)
                    for row in _need(data, "P", where)
                ),
            )
        if kind == "lattice-table":
            return LatticeTable(
                d=int(_need(data, "d", where)),
                alphabet=tuple(_symbol_in(c) for c in _need(data, "alphabet", where)),
                box=tuple(int(b) for b in _need(data, "box", where)),
                table=tuple(
                    (lattice_pattern_in(pat, f"{where}: table"), parse_fraction(mass))
                    for pat, mass in _need(data, "table", where)
                ),
            )
    except ParseError:
        raise
    except (ValueError, SemishiftError) as exc:
        raise ParseError(f"{where}: {exc}") from exc
    raise ParseError(f"{where}: unknown measure kind {kind!r}")


def block_alphabet_out(blocks: BlockAlphabet, d: int) -> dict:
    return {
        "order": blocks.order,
        "sites": [word_to_string(w, d) for w in blocks.sites],
        "blocks": [pattern_out(b, d) for b in blocks.blocks],
        "masses": [fraction_to_str(m) for m in blocks.masses],
    }
