"""Extending invariant measures on the nonnegative orthant to the lattice.

A measure on configurations over N^d determines, for each finite window
F in Z^d, the mass obtained by sliding F back into the orthant: subtract
the componentwise minimum and evaluate.  For translation-invariant
sources this is independent of the chosen lower bound and defines a
consistent family over all of Z^d.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Collection, Iterable, Mapping, Protocol, Sequence

from .algebra import LatticeVector, vec_add, vec_min, vec_sub
from .errors import MembershipError, ValidationError
from .measure import ONE, ZERO, CheckResult


@dataclass(frozen=True)
class LatticePattern:
    """Finitely many lattice sites with symbols."""

    entries: tuple[tuple[LatticeVector, object], ...]

    def __post_init__(self) -> None:
        keys = [v for v, _ in self.entries]
        if len(set(keys)) != len(keys):
            raise ValueError("pattern has a repeated site")
        dims = {len(v) for v in keys}
        if len(dims) > 1:
            raise ValueError("pattern sites have mixed dimensions")
        object.__setattr__(self, "entries", tuple(sorted(self.entries)))

    @classmethod
    def of(
        cls, assignment: Mapping[LatticeVector, object] | Iterable[tuple[LatticeVector, object]]
    ) -> "LatticePattern":
        items = assignment.items() if isinstance(assignment, Mapping) else assignment
        return cls(tuple((tuple(v), c) for v, c in items))

    def domain(self) -> tuple[LatticeVector, ...]:
        return tuple(v for v, _ in self.entries)

    def items(self) -> tuple[tuple[LatticeVector, object], ...]:
        return self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def translated(self, g: LatticeVector) -> "LatticePattern":
        return LatticePattern(tuple((vec_add(v, g), c) for v, c in self.entries))

    def render(self) -> str:
        return "{" + ", ".join(f"{v}={c!r}" for v, c in self.entries) + "}"


class LatticeMeasure(Protocol):
    """Evaluates cylinder patterns whose sites lie in the orthant."""

    d: int
    alphabet: tuple

    def eval(self, pattern: LatticePattern) -> Fraction: ...


def _check_orthant(pattern: LatticePattern, d: int) -> None:
    for v, _ in pattern.items():
        if len(v) != d:
            raise ValidationError(f"site {v} does not have dimension {d}")
        if any(x < 0 for x in v):
            raise MembershipError(f"site {v} is outside the nonnegative orthant")


@dataclass(frozen=True)
class LatticeBernoulli:
    """Product measure on the orthant."""

    d: int
    alphabet: tuple
    probs: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.probs) != len(self.alphabet):
            raise ValidationError("one probability per alphabet symbol required")
        if any(q < 0 for q in self.probs) or sum(self.probs, ZERO) != 1:
            raise ValidationError("probabilities must be nonnegative and sum to 1")

    def eval(self, pattern: LatticePattern) -> Fraction:
        _check_orthant(pattern, self.d)
        index = {c: i for i, c in enumerate(self.alphabet)}
        out = ONE
        for _, c in pattern.items():
            if c not in index:
                raise ValidationError(f"symbol {c!r} is not in the alphabet")
            out *= self.probs[index[c]]
        return out


@lru_cache(maxsize=None)
def _matrix_power(rows: tuple[tuple[Fraction, ...], ...], n: int) -> tuple[tuple[Fraction, ...], ...]:
    size = len(rows)
    if n == 0:
        return tuple(
            tuple(ONE if i == j else ZERO for j in range(size)) for i in range(size)
        )
    prev = _matrix_power(rows, n - 1)
    return tuple(
        tuple(
            sum((prev[i][k] * rows[k][j] for k in range(size)), ZERO)
            for j in range(size)
        )
        for i in range(size)
    )


@dataclass(frozen=True)
class LatticeMarkov:
    """Stationary one-dimensional chain: p positive with p P = p."""

    alphabet: tuple
    p: tuple[Fraction, ...]
    P: tuple[tuple[Fraction, ...], ...]

    d: int = 1

    def __post_init__(self) -> None:
        n = len(self.alphabet)
        if len(self.p) != n or len(self.P) != n or any(len(r) != n for r in self.P):
            raise ValidationError("p and P must match the alphabet size")
        if any(x <= 0 for x in self.p) or sum(self.p, ZERO) != 1:
            raise ValidationError("p must be positive and sum to 1")
        for k, row in enumerate(self.P):
            if any(x < 0 for x in row) or sum(row, ZERO) != 1:
                raise ValidationError(f"P row {k} is not stochastic")
        for l in range(n):
            if sum((self.p[k] * self.P[k][l] for k in range(n)), ZERO) != self.p[l]:
                raise ValidationError("p is not a fixed vector of P")

    def eval(self, pattern: LatticePattern) -> Fraction:
        _check_orthant(pattern, 1)
        if len(pattern) == 0:
            return ONE
        index = {c: i for i, c in enumerate(self.alphabet)}
        sites = sorted((v[0], index[c]) for v, c in pattern.items())
        out = self.p[sites[0][1]]
        for (s, k), (t, l) in zip(sites, sites[1:]):
            out *= _matrix_power(self.P, t - s)[k][l]
        return out


@dataclass(frozen=True)
class LatticeTable:
    """User-supplied masses for the full patterns on a declared box."""

    d: int
    alphabet: tuple
    box: tuple[int, ...]
    table: tuple[tuple[LatticePattern, Fraction], ...]

    def __post_init__(self) -> None:
        if len(self.box) != self.d or any(b < 1 for b in self.box):
            raise ValidationError("box must list one positive extent per dimension")
        if sum((mass for _, mass in self.table), ZERO) != 1:
            raise ValidationError("table masses must sum to 1")
        sites = self._box_sites()
        for pat, mass in self.table:
            if mass < 0:
                raise ValidationError(f"table mass {mass} is negative")
            if pat.domain() != sites:
                raise ValidationError(f"table pattern {pat.render()} must fill the box")

    def _box_sites(self) -> tuple[LatticeVector, ...]:
        return tuple(
            sorted(itertools.product(*(range(b) for b in self.box)))
        )

    def eval(self, pattern: LatticePattern) -> Fraction:
        _check_orthant(pattern, self.d)
        for v, _ in pattern.items():
            if any(x >= b for x, b in zip(v, self.box)):
                raise ValidationError(f"site {v} is outside the declared box {self.box}")
        wanted = dict(pattern.items())
        total = ZERO
        for pat, mass in self.table:
            full = dict(pat.items())
            if all(full[v] == c for v, c in wanted.items()):
                total += mass
        return total


def lower_bound(window: Collection[LatticeVector]) -> LatticeVector:
    """Componentwise minimum of a nonempty window."""
    if not window:
        raise ValidationError("window must be nonempty")
    return vec_min(window)


def window_measure(measure: LatticeMeasure, pattern: LatticePattern) -> Fraction:
    """Slide the pattern into the orthant and evaluate the source measure.

    The anchor is the componentwise minimum clamped at zero, so a window
    already inside the orthant is evaluated in place.  Every anchor gives
    the same value when the source is invariant; fixing orthant windows
    lets the translation and consistency checks expose sources that are
    not.
    """
    if len(pattern) == 0:
        return ONE
    base = tuple(min(x, 0) for x in lower_bound(pattern.domain()))
    if all(x == 0 for x in base):
        return measure.eval(pattern)
    moved = LatticePattern(tuple((vec_sub(v, base), c) for v, c in pattern.items()))
    return measure.eval(moved)


def _sample_patterns(
    sites: Sequence[LatticeVector], alphabet: Sequence, trials: int, rng: random.Random
) -> Iterable[LatticePattern]:
    count = len(alphabet) ** len(sites)
    if count <= trials:
        for combo in itertools.product(tuple(alphabet), repeat=len(sites)):
            yield LatticePattern(tuple(zip(sites, combo)))
    else:
        for _ in range(trials):
            combo = tuple(rng.choice(tuple(alphabet)) for _ in sites)
            yield LatticePattern(tuple(zip(sites, combo)))


def window_consistency(
    measure: LatticeMeasure,
    window: Collection[LatticeVector],
    cover: Collection[LatticeVector],
    trials: int,
    seed: int = 0,
) -> CheckResult:
    """Marginalizing the cover back down must reproduce the window mass."""
    window = tuple(sorted(tuple(v) for v in window))
    cover = tuple(sorted(tuple(v) for v in cover))
    if not set(window) <= set(cover):
        raise ValidationError("the cover must contain the window")
    extra = tuple(v for v in cover if v not in set(window))
    rng = random.Random(seed)
    for pattern in _sample_patterns(window, measure.alphabet, trials, rng):
        lhs = window_measure(measure, pattern)
        rhs = ZERO
        for combo in itertools.product(tuple(measure.alphabet), repeat=len(extra)):
            rhs += window_measure(
                measure, LatticePattern(pattern.items() + tuple(zip(extra, combo)))
            )
        if lhs != rhs:
            return CheckResult(
                False,
                f"pattern {pattern.render()} has mass {lhs} but its completions "
                f"over {extra} sum to {rhs}",
            )
    return CheckResult(True)


def window_translation_invariance(
    measure: LatticeMeasure, pattern: LatticePattern, g: LatticeVector
) -> CheckResult:
    """Compare a window pattern with its g-translate."""
    moved = LatticePattern(
        tuple((tuple(x + y for x, y in zip(v, g)), c) for v, c in pattern.items())
    )
    lhs = window_measure(measure, pattern)
    rhs = window_measure(measure, moved)
    if lhs != rhs:
        return CheckResult(
            False, f"{pattern.render()} has mass {lhs}, its {g}-translate {rhs}"
        )
    return CheckResult(True)
