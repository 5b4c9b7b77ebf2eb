"""Finite orbits of the shift action, encoded as labelled automata.

A state stands for a configuration in the orbit; following the a-arrow
moves to the a-shifted configuration, and the label is the symbol the
configuration shows at the identity.  Reading a word right to left from
the base state therefore recovers the base configuration's symbol at
that word.  All semantic questions (orbit size, periodicity,
transitivity, the transformation monoid) are asked of the minimized
automaton, where distinct states are distinct configurations.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .algebra import GeneratorSet, Symbol, Word, ball, in_semigroup, sorted_words
from .errors import (
    BudgetExhausted,
    FactorizationError,
    MembershipError,
    NotPeriodic,
    ValidationError,
)
from .measure import ZERO, Pattern

Perm = tuple[int, ...]


def compose(outer: Perm, inner: Perm) -> Perm:
    """Apply inner first, then outer."""
    return tuple(outer[i] for i in inner)


def perm_inverse(p: Perm) -> Perm:
    out = [0] * len(p)
    for i, img in enumerate(p):
        out[img] = i
    return tuple(out)


def _is_permutation(row: Sequence[int]) -> bool:
    return sorted(row) == list(range(len(row)))


@dataclass(frozen=True, eq=True)
class OrbitAutomaton:
    """Deterministic, fully reachable, label-carrying transition system."""

    gs: GeneratorSet
    alphabet: tuple
    labels: tuple
    delta: dict[Symbol, tuple[int, ...]]
    base: int = 0

    def __post_init__(self) -> None:
        n = len(self.labels)
        if n == 0:
            raise ValidationError("automaton needs at least one state")
        if set(self.delta) != set(self.gs.sigma):
            raise ValidationError("delta must cover Sigma exactly")
        for sym, row in self.delta.items():
            if len(row) != n or any(not (0 <= q < n) for q in row):
                raise ValidationError(f"delta[{sym}] is not a total map on {n} states")
        for c in self.labels:
            if c not in self.alphabet:
                raise ValidationError(f"label {c!r} is not in the alphabet")
        if not (0 <= self.base < n):
            raise ValidationError(f"base state {self.base} out of range")
        # When Sigma holds both signs of a generator, the two arrows must
        # be mutually inverse or the states cannot encode one orbit.
        for sym in self.gs.sigma:
            inv = sym.inverse()
            if sym.sign > 0 and inv in self.gs.sigma:
                fwd, bwd = self.delta[sym], self.delta[inv]
                if not _is_permutation(fwd) or perm_inverse(fwd) != bwd:
                    raise ValidationError(
                        f"delta[{sym}] and delta[{inv}] are not inverse bijections"
                    )
        reached = {self.base}
        frontier = [self.base]
        while frontier:
            q = frontier.pop()
            for row in self.delta.values():
                nxt = row[q]
                if nxt not in reached:
                    reached.add(nxt)
                    frontier.append(nxt)
        if len(reached) != n:
            raise ValidationError("every state must be reachable from the base")

    def n_states(self) -> int:
        return len(self.labels)


@dataclass(frozen=True, eq=True)
class GroupOrbitAutomaton(OrbitAutomaton):
    """Orbit automaton with bijective moves for every signed generator."""

    def __post_init__(self) -> None:
        super().__post_init__()
        if self.gs.sigma != {s.inverse() for s in self.gs.sigma}:
            raise ValidationError("Sigma must be closed under inverses")
        for sym, row in self.delta.items():
            if not _is_permutation(row):
                raise ValidationError(f"delta[{sym}] is not a bijection")


def _walk(o: OrbitAutomaton, start: int, w: Word) -> int:
    q = start
    for s in reversed(w.letters):
        q = o.delta[s][q]
    return q


def readout(o: OrbitAutomaton, w: Word) -> object:
    """The base configuration's symbol at site w."""
    if not in_semigroup(w, o.gs):
        raise MembershipError(f"site {w or 'the empty word'} is not in <Sigma>+")
    return o.labels[_walk(o, o.base, w)]


def minimized(o: OrbitAutomaton) -> OrbitAutomaton:
    """Merge states indistinguishable by labels along every word."""
    syms = o.gs.symbols()
    n = o.n_states()
    block = []
    seen: dict = {}
    for q in range(n):
        key = o.labels[q]
        if key not in seen:
            seen[key] = len(seen)
        block.append(seen[key])
    while True:
        seen2: dict = {}
        nxt = []
        for q in range(n):
            key = (block[q], tuple(block[o.delta[s][q]] for s in syms))
            if key not in seen2:
                seen2[key] = len(seen2)
            nxt.append(seen2[key])
        if nxt == block:
            break
        block = nxt
    classes = len(set(block))
    rep = {}
    for q in range(n):
        rep.setdefault(block[q], q)
    labels = tuple(o.labels[rep[b]] for b in range(classes))
    delta = {
        s: tuple(block[o.delta[s][rep[b]]] for b in range(classes)) for s in syms
    }
    return type(o)(
        gs=o.gs,
        alphabet=o.alphabet,
        labels=labels,
        delta=delta,
        base=block[o.base],
    )


def orbit_size(o: OrbitAutomaton) -> int:
    """Number of distinct configurations in the orbit of the base point."""
    return minimized(o).n_states()


def is_periodic(o: OrbitAutomaton) -> bool:
    """True iff every generator acts bijectively on the orbit."""
    m = minimized(o)
    return all(_is_permutation(row) for row in m.delta.values())


def is_transitive(o: OrbitAutomaton) -> bool:
    """True iff every configuration in the orbit reaches every other."""
    m = minimized(o)
    n = m.n_states()
    # All states are reachable from the base, so strong connectivity is
    # equivalent to the base being reachable from every state.
    reverse: dict[int, set[int]] = {q: set() for q in range(n)}
    for row in m.delta.values():
        for q, nxt in enumerate(row):
            reverse[nxt].add(q)
    seen = {m.base}
    frontier = [m.base]
    while frontier:
        q = frontier.pop()
        for prev in reverse[q]:
            if prev not in seen:
                seen.add(prev)
                frontier.append(prev)
    return len(seen) == n


def transformation_monoid(o: OrbitAutomaton) -> tuple[int, bool]:
    """Size of the monoid of orbit maps induced by S, and whether it is a group."""
    m = minimized(o)
    n = m.n_states()
    syms = m.gs.symbols()
    gens = [m.delta[s] for s in syms]
    identity = tuple(range(n))
    seen = {identity}
    frontier = [identity]
    while frontier:
        f = frontier.pop()
        for g in gens:
            h = tuple(f[g[q]] for q in range(n))
            if h not in seen:
                seen.add(h)
                frontier.append(h)
    return len(seen), all(_is_permutation(f) for f in seen)


def _morphism_image(theta: Mapping[Symbol, Perm], w: Word, degree: int) -> Perm:
    img: Perm = tuple(range(degree))
    for s in w.letters:
        img = compose(img, theta[s])
    return img


def _validate_morphism(
    theta: Mapping[Symbol, Perm], gs: GeneratorSet
) -> tuple[dict[Symbol, Perm], int]:
    if set(theta) != set(gs.sigma):
        raise ValidationError("morphism must assign one permutation per generator")
    degrees = {len(p) for p in theta.values()}
    if len(degrees) != 1:
        raise ValidationError("morphism permutations must share one degree")
    (degree,) = degrees
    out = {}
    for sym, p in theta.items():
        p = tuple(p)
        if not _is_permutation(p):
            raise ValidationError(f"theta[{sym}] = {p} is not a permutation")
        out[sym] = p
    for sym in gs.sigma:
        inv = sym.inverse()
        if sym.sign > 0 and inv in gs.sigma:
            if out[inv] != perm_inverse(out[sym]):
                raise ValidationError(
                    f"theta[{inv}] must be the inverse of theta[{sym}]"
                )
    return out, degree


def theorem_a_point(
    pattern: Pattern,
    theta: Mapping[Symbol, Perm],
    gs: GeneratorSet,
    alphabet: Sequence,
    fill: object | None = None,
) -> OrbitAutomaton:
    """Periodic point through a finite pattern, via a permutation morphism.

    States are the finite group generated by the images of the
    generators; the a-arrow left-multiplies by theta(a).  Labels copy the
    pattern through theta and default to ``fill`` (the first alphabet
    symbol when omitted) elsewhere.  The construction requires the
    pattern to factor through theta: two sites with different symbols
    must not collapse to the same group element.
    """
    theta_map, degree = _validate_morphism(theta, gs)
    alphabet = tuple(alphabet)
    fill = alphabet[0] if fill is None else fill
    if fill not in alphabet:
        raise ValidationError(f"fill symbol {fill!r} is not in the alphabet")
    word_labels: dict[Perm, object] = {}
    for w, c in pattern.items():
        if not in_semigroup(w, gs):
            raise MembershipError(f"site {w or 'the empty word'} is not in <Sigma>+")
        if c not in alphabet:
            raise ValidationError(f"pattern symbol {c!r} is not in the alphabet")
        img = _morphism_image(theta_map, w, degree)
        if word_labels.get(img, c) != c:
            raise FactorizationError(
                f"pattern does not factor: sites {w} and an earlier site share "
                f"theta-image {img} but carry different symbols"
            )
        word_labels[img] = c
    identity = tuple(range(degree))
    group = {identity}
    frontier = [identity]
    gens = [theta_map[s] for s in gs.symbols()]
    while frontier:
        f = frontier.pop()
        for g in gens:
            h = compose(g, f)
            if h not in group:
                group.add(h)
                frontier.append(h)
    states = sorted(group)
    index = {f: i for i, f in enumerate(states)}
    labels = tuple(word_labels.get(f, fill) for f in states)
    delta = {
        s: tuple(index[compose(theta_map[s], f)] for f in states)
        for s in gs.symbols()
    }
    return OrbitAutomaton(
        gs=gs, alphabet=alphabet, labels=labels, delta=delta, base=index[identity]
    )


def find_separating_morphism(
    gs: GeneratorSet, r: int, k: int, seed: int, budget: int = 10000
) -> dict[Symbol, Perm]:
    """Search for a degree-k permutation morphism injective on the r-ball.

    Deterministic for a fixed seed.  One permutation is drawn per
    generator index; when Sigma holds both signs, the negative one is the
    inverse, as any morphism into a group requires.
    """
    if k < 1:
        raise ValidationError(f"degree k must be >= 1, got {k}")
    words = sorted_words(ball(gs, r))
    if math.factorial(k) < len(words):
        raise BudgetExhausted(
            f"no injection possible: the {r}-ball has {len(words)} elements "
            f"but Sym({k}) has only {math.factorial(k)}"
        )
    rng = random.Random(seed)
    indices = sorted({s.index for s in gs.sigma})
    for _ in range(budget):
        chosen: dict[int, Perm] = {}
        for i in indices:
            p = list(range(k))
            rng.shuffle(p)
            chosen[i] = tuple(p)
        theta = {}
        for s in gs.sigma:
            theta[s] = chosen[s.index] if s.sign > 0 else perm_inverse(chosen[s.index])
        images = {_morphism_image(theta, w, k) for w in words}
        if len(images) == len(words):
            return {s: theta[s] for s in gs.symbols()}
    raise BudgetExhausted(f"no separating morphism found in {budget} trials")


def lift_to_group(o: OrbitAutomaton) -> GroupOrbitAutomaton:
    """Extend a periodic orbit to moves by every signed generator.

    On a periodic orbit each generator acts bijectively, so the inverse
    generator must act as the inverse map; the lifted automaton reads out
    a configuration over the whole group whose restriction to S is the
    original configuration.
    """
    m = minimized(o)
    if not all(_is_permutation(row) for row in m.delta.values()):
        bad = next(s for s in m.gs.symbols() if not _is_permutation(m.delta[s]))
        raise NotPeriodic(f"delta[{bad}] is not a bijection on the orbit")
    delta: dict[Symbol, tuple[int, ...]] = dict(m.delta)
    for sym in m.gs.sigma:
        inv = sym.inverse()
        if inv not in delta:
            delta[inv] = perm_inverse(m.delta[sym])
    return GroupOrbitAutomaton(
        gs=m.gs.extended(),
        alphabet=m.alphabet,
        labels=m.labels,
        delta=delta,
        base=m.base,
    )


@dataclass(frozen=True)
class PeriodicMeasure:
    """Convex combination of uniform measures on finite periodic orbits."""

    orbits: tuple[OrbitAutomaton, ...]
    weights: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.orbits) != len(self.weights) or not self.orbits:
            raise ValidationError("need matching, nonempty orbits and weights")
        if any(w <= 0 for w in self.weights) or sum(self.weights, ZERO) != 1:
            raise ValidationError("weights must be positive and sum to 1")
        first = self.orbits[0]
        for o in self.orbits[1:]:
            if o.gs != first.gs or tuple(o.alphabet) != tuple(first.alphabet):
                raise ValidationError("orbits must share S and alphabet")
        for o in self.orbits:
            if not is_periodic(o):
                raise NotPeriodic("every orbit in a periodic measure must be periodic")

    @property
    def gs(self) -> GeneratorSet:
        return self.orbits[0].gs

    @property
    def alphabet(self) -> tuple:
        return tuple(self.orbits[0].alphabet)

    def eval(self, pattern: Pattern) -> Fraction:
        return periodic_measure_eval(self, pattern)


def periodic_measure_eval(pm: PeriodicMeasure, pattern: Pattern) -> Fraction:
    """Weighted fraction of orbit points whose configuration shows the pattern."""
    for w, _ in pattern.items():
        if not in_semigroup(w, pm.gs):
            raise MembershipError(f"site {w or 'the empty word'} is not in <Sigma>+")
    total = ZERO
    for o, weight in zip(pm.orbits, pm.weights):
        m = minimized(o)
        hits = 0
        for q in range(m.n_states()):
            if all(m.labels[_walk(m, q, w)] == c for w, c in pattern.items()):
                hits += 1
        total += weight * Fraction(hits, m.n_states())
    return total
