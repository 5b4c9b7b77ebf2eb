"""Higher-block recoding of an arbitrary cylinder measure to a chain.

The order-m blocks of a measure are the positive-mass full patterns on
the m-ball of S.  Reading a configuration through the sliding m-block
window turns the measure into a chain over the block alphabet whose
single-site marginals are the block masses and whose transition along a
generator is the conditioned mass of the joint pattern on the ball and
its translate.  Pulling the block chain back through the window is done
symbolically: a constraint at site s allows every block whose symbol at
the identity matches, so no configurations are ever materialized.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra import EPSILON, GeneratorSet, Word, ball, sorted_words
from .errors import MembershipError, OracleNotNormalized
from .measure import (
    CheckResult,
    ChainDiagnostics,
    CylinderMeasure,
    MarkovTreeChain,
    Pattern,
    all_patterns,
    eval_constrained,
    is_invariant_chain,
    validate_chain,
)


@dataclass(frozen=True)
class BlockAlphabet:
    """Positive-mass full patterns on the m-ball, with their masses."""

    order: int
    sites: tuple[Word, ...]
    blocks: tuple[Pattern, ...]
    masses: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.blocks) != len(self.masses):
            raise ValueError("one mass per block required")
        for b, m in zip(self.blocks, self.masses):
            if b.domain() != self.sites:
                raise ValueError(f"block {b.render()} is not a full pattern")
            if m <= 0:
                raise ValueError(f"block {b.render()} has nonpositive mass {m}")

    def __len__(self) -> int:
        return len(self.blocks)


def support_alphabet(measure: CylinderMeasure, order: int) -> BlockAlphabet:
    """Enumerate the order-m blocks the measure actually charges."""
    sites = sorted_words(ball(measure.gs, order))
    blocks = []
    masses = []
    for pattern in all_patterns(sites, measure.alphabet):
        mass = measure.eval(pattern)
        if mass > 0:
            blocks.append(pattern)
            masses.append(mass)
    return BlockAlphabet(order, sites, tuple(blocks), tuple(masses))


@dataclass(frozen=True)
class MarkovizationResult:
    """Block chain plus its structural and invariance check results."""

    chain: MarkovTreeChain
    blocks: BlockAlphabet
    base_alphabet: tuple
    diagnostics: ChainDiagnostics
    invariance: CheckResult


def markovize(measure: CylinderMeasure, order: int) -> MarkovizationResult:
    """Recode a measure as a chain over its order-m block alphabet.

    Transition masses condition the joint pattern on the ball union its
    translate; blocks whose overlap disagrees get mass zero.  A
    non-invariant source measure is not an error: the result simply
    reports the failed invariance check.
    """
    ba = support_alphabet(measure, order)
    total = sum(ba.masses, Fraction(0))
    if total != 1:
        raise OracleNotNormalized(f"block masses sum to {total}, not 1")
    matrices = {}
    for sym in measure.gs.symbols():
        rows = []
        for alpha, mass in zip(ba.blocks, ba.masses):
            row = []
            for beta in ba.blocks:
                joint = alpha.union(beta.translated(sym))
                row.append(Fraction(0) if joint is None else measure.eval(joint) / mass)
            rows.append(tuple(row))
        matrices[sym] = tuple(rows)
    chain = MarkovTreeChain.make(measure.gs, ba.blocks, ba.masses, matrices)
    diag = validate_chain(chain)
    if diag:
        invariance = is_invariant_chain(chain)
    else:
        invariance = CheckResult(False, "block chain is not structurally valid")
    return MarkovizationResult(
        chain=chain,
        blocks=ba,
        base_alphabet=tuple(measure.alphabet),
        diagnostics=diag,
        invariance=invariance,
    )


@dataclass(frozen=True)
class MarkovizedMeasure:
    """The block chain pulled back through the sliding-window recoding."""

    result: MarkovizationResult

    @property
    def gs(self) -> GeneratorSet:
        return self.result.chain.gs

    @property
    def alphabet(self) -> tuple:
        return self.result.base_alphabet

    def eval(self, pattern: Pattern) -> Fraction:
        constraints = {}
        for w, c in pattern.items():
            allowed = tuple(
                b for b in self.result.blocks.blocks if b[EPSILON] == c
            )
            constraints[w] = allowed
        return eval_constrained(self.result.chain, constraints)


def markovization_consistency(
    measure: CylinderMeasure,
    order: int,
    pattern: Pattern,
    result: MarkovizationResult | None = None,
) -> bool:
    """Does the recoded chain reproduce the measure on a ball pattern?

    Pattern sites must lie inside the order-m ball; pass a precomputed
    markovization to avoid rebuilding the block chain per pattern.
    """
    sites = ball(measure.gs, order)
    for w, _ in pattern.items():
        if w not in sites:
            raise MembershipError(
                f"site {w or 'the empty word'} is outside the order-{order} ball"
            )
    if result is None:
        result = markovize(measure, order)
    recoded = MarkovizedMeasure(result)
    return recoded.eval(pattern) == measure.eval(pattern)
