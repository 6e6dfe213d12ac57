"""Default reasoning with infinitesimal probabilities.

Defaults ``premise ~> conclusion`` are read as conditional probabilities
infinitesimally close to 1.  The package provides an exact ordered field of
rational functions in an infinitesimal ``e``, kappa rankings with System Z,
lexicographic and preferential entailment, maximum-entropy entailment via a
weight fixpoint, and a benchmark harness comparing them.
"""

from __future__ import annotations

from .bench import (
    BenchInstance,
    BenchReport,
    QueryResult,
    builtin_instances,
    run_benchmarks,
    run_query,
)
from .distribution import (
    CLASSICAL,
    ConstraintMode,
    NPDistribution,
    cond_prob,
    is_coherent,
    prob,
    satisfies_default,
)
from .entropy import EntropyVerdict, entropy_compare, entropy_numeric
from .errors import *  # noqa: F401,F403
from .field import (
    EPS,
    INF,
    ONE,
    ZERO,
    EpsPoly,
    EpsRatio,
    eps,
    eval_numeric,
    magnitude,
    much_smaller,
    parse_eps,
    ratio_compare,
)
from .klm import check_meta_properties, random_kb
from .logic import (
    BOTTOM,
    TOP,
    Default,
    Formula,
    KnowledgeBase,
    Vocabulary,
    evaluate,
    fact_formula,
    parse_formula,
    parse_kb,
    to_text,
)
from .maxent import (
    MEWeights,
    PluralSampler,
    construct_me_distribution,
    me_entails,
    me_entails_plural,
    me_ranking,
    me_weights,
    numeric_me_oracle,
)
from .oracle import p_entails_oracle
from .rankings import (
    RankingFn,
    TolerancePartition,
    cond_kappa,
    kappa,
    lex_entails,
    p_entails,
    ranking_satisfies,
    rc_entails,
    spohn_ranking,
    tolerance_partition,
    z_ranking,
)

__version__ = "0.1.0"
