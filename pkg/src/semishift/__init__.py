"""Exact arithmetic for shift actions of finitely generated free
subsemigroups: invariant Markov chains on generator trees, periodic
orbits through finite automata, markovization of cylinder measures, and
window measures on lattice orthants.
"""

from .algebra import (
    EPSILON,
    Edge,
    GeneratorSet,
    Symbol,
    Tree,
    TreeCheck,
    Word,
    ball,
    factorization,
    in_semigroup,
    parse_word,
    sorted_words,
    tree_hull,
    tree_validate,
    word_mul,
    word_to_string,
)
from .errors import (
    BudgetExhausted,
    DeltaOutOfRange,
    EmptyWord,
    FactorizationError,
    InvalidChain,
    MembershipError,
    NonInvertibleModP,
    NoWitness,
    NotInvariant,
    NotPeriodic,
    OracleNotNormalized,
    ParseError,
    SemishiftError,
    SigmaIncomplete,
    ValidationError,
)
from .markovize import (
    BlockAlphabet,
    MarkovizationResult,
    MarkovizedMeasure,
    markovization_consistency,
    markovize,
    support_alphabet,
)
from .measure import (
    BernoulliMeasure,
    ChainDiagnostics,
    CheckResult,
    CounterexampleReport,
    CylinderMeasure,
    MarkovTreeChain,
    MixtureMeasure,
    Pattern,
    all_patterns,
    counterexample_analyze,
    counterexample_chain,
    eval_constrained,
    eval_cylinder,
    eval_cylinder_bruteforce,
    extend_chain,
    is_invariant_chain,
    pushforward_check,
    shift_invariance_check,
    validate_chain,
    weak_star_distance,
)
from .orbit import (
    GroupOrbitAutomaton,
    OrbitAutomaton,
    PeriodicMeasure,
    find_separating_morphism,
    is_periodic,
    is_transitive,
    lift_to_group,
    minimized,
    orbit_size,
    periodic_measure_eval,
    readout,
    theorem_a_point,
    transformation_monoid,
)
from .reversible import (
    LatticeBernoulli,
    LatticeMarkov,
    LatticeMeasure,
    LatticePattern,
    LatticeTable,
    lower_bound,
    window_consistency,
    window_measure,
    window_translation_invariance,
)

__version__ = "0.1.0"

__all__ = [
    "BernoulliMeasure",
    "BlockAlphabet",
    "BudgetExhausted",
    "ChainDiagnostics",
    "CheckResult",
    "CounterexampleReport",
    "CylinderMeasure",
    "DeltaOutOfRange",
    "EPSILON",
    "Edge",
    "EmptyWord",
    "FactorizationError",
    "GeneratorSet",
    "GroupOrbitAutomaton",
    "InvalidChain",
    "LatticeBernoulli",
    "LatticeMarkov",
    "LatticeMeasure",
    "LatticePattern",
    "LatticeTable",
    "MarkovTreeChain",
    "MarkovizationResult",
    "MarkovizedMeasure",
    "MembershipError",
    "MixtureMeasure",
    "NoWitness",
    "NonInvertibleModP",
    "NotInvariant",
    "NotPeriodic",
    "OracleNotNormalized",
    "OrbitAutomaton",
    "ParseError",
    "Pattern",
    "PeriodicMeasure",
    "SemishiftError",
    "SigmaIncomplete",
    "Symbol",
    "Tree",
    "TreeCheck",
    "ValidationError",
    "Word",
    "all_patterns",
    "ball",
    "counterexample_analyze",
    "counterexample_chain",
    "eval_constrained",
    "eval_cylinder",
    "eval_cylinder_bruteforce",
    "extend_chain",
    "factorization",
    "find_separating_morphism",
    "in_semigroup",
    "is_invariant_chain",
    "is_periodic",
    "is_transitive",
    "lift_to_group",
    "lower_bound",
    "markovization_consistency",
    "markovize",
    "minimized",
    "orbit_size",
    "parse_word",
    "periodic_measure_eval",
    "pushforward_check",
    "readout",
    "shift_invariance_check",
    "sorted_words",
    "support_alphabet",
    "theorem_a_point",
    "transformation_monoid",
    "tree_hull",
    "tree_validate",
    "validate_chain",
    "weak_star_distance",
    "window_consistency",
    "window_measure",
    "window_translation_invariance",
    "word_mul",
    "word_to_string",
]
