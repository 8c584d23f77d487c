"""Maximizing expected choiceworthiness across normative theories."""

from .core import (
    MERGED_KEY,
    Action,
    CoverageError,
    DecisionSituation,
    DuplicateActionError,
    MecError,
    MecOptions,
    MecResult,
    NonFiniteScoreError,
    ScoreTable,
    TheoryKind,
    TheorySpec,
    aggregate,
    borda,
    merge_comparable,
    normalize,
    ordinalize,
    rank,
    run_mec,
    select,
)
from .evaluators import (
    SentimentMap,
    TraitDistribution,
    calibrate_threshold,
    classify,
    deontology_prompt,
    load_score_table,
    remote_score,
    utilitarian_score,
    virtue_choiceworthiness,
)
from .harness import (
    ExperimentReport,
    SynthConfig,
    brute_force_mec,
    generate_trial,
    render_explanation,
    run_experiment,
)
from .schema import SchemaError, load_situation

__version__ = "0.1.0"
