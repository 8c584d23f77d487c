"""Synthetic ensemble experiments, a reference oracle, and explanations.

Synthetic score model
---------------------
Each trial has ``n_actions`` actions and a uniformly drawn true best action.
Every evaluator independently puts the truth on top with probability
``evaluator_accuracy``; otherwise a uniformly chosen wrong action goes on
top.  The rest of its ranking is a random permutation.  Scores are the rank
levels ``n_actions - 1, ..., 0`` plus an evaluator-specific random offset,
so all evaluators share one unit scale (they are genuinely comparable) while
their raw numbers differ.  With two actions and equal credences, MEC then
reduces to a majority vote.
"""

from __future__ import annotations

import json
import math
from collections.abc import Mapping, Sequence
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from .core import (
    MERGED_KEY,
    Action,
    DecisionSituation,
    MecError,
    MecResult,
    TheoryKind,
    TheorySpec,
    run_mec,
)

BRUTE_FORCE_MAX_ACTIONS = 8
BRUTE_FORCE_MAX_THEORIES = 6


@dataclass(frozen=True)
class SynthConfig:
    seed: int = 0
    trials: int = 1000
    n_evaluators: int = 3
    evaluator_accuracy: float = 0.75
    n_actions: int = 2
    credences: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.seed < 0:
            raise MecError("seed must be non-negative")
        if self.trials < 1:
            raise MecError("trials must be >= 1")
        if self.n_evaluators < 1:
            raise MecError("n_evaluators must be >= 1")
        if self.n_actions < 2:
            raise MecError("n_actions must be >= 2")
        # 1.0 is admitted as the noise-free limit.
        if not 0.5 < self.evaluator_accuracy <= 1.0:
            raise MecError("evaluator_accuracy must lie in (0.5, 1]")
        if self.credences is not None:
            object.__setattr__(self, "credences", tuple(float(c) for c in self.credences))
            if len(self.credences) != self.n_evaluators:
                raise MecError("need one credence per evaluator")

    @property
    def evaluator_ids(self) -> list[str]:
        width = len(str(self.n_evaluators - 1))
        return [f"e{i:0{width}d}" for i in range(self.n_evaluators)]


@dataclass
class ExperimentReport:
    per_evaluator_accuracy: list[float]
    mec_accuracy: float
    trials: int
    seed: int
    evaluator_ids: list[str] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)

    def to_table(self) -> str:
        ids = self.evaluator_ids or [f"e{i}" for i in range(len(self.per_evaluator_accuracy))]
        rows = list(zip(ids, self.per_evaluator_accuracy)) + [("MEC", self.mec_accuracy)]
        width = max(len("evaluator"), *(len(r[0]) for r in rows))
        lines = [f"{'evaluator':<{width}}  accuracy"]
        lines += [f"{name:<{width}}  {acc:.6f}" for name, acc in rows]
        return "\n".join(lines) + "\n"


def trial_rng(seed: int, index: int) -> np.random.Generator:
    """Independent, reproducible stream for one trial."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, index])))


def generate_trial(rng: np.random.Generator, config: SynthConfig
                   ) -> tuple[DecisionSituation, str]:
    k = config.n_actions
    action_ids = [f"a{i}" for i in range(k)]
    truth = action_ids[int(rng.integers(k))]
    credences = config.credences or (1.0,) * config.n_evaluators

    theories, tables = [], {}
    for tid, credence in zip(config.evaluator_ids, credences):
        if rng.random() < config.evaluator_accuracy:
            top = truth
        else:
            wrong = [a for a in action_ids if a != truth]
            top = wrong[int(rng.integers(len(wrong)))]
        rest = [a for a in action_ids if a != top]
        order = [top] + [rest[i] for i in rng.permutation(len(rest))]
        offset = float(rng.uniform(-1.0, 1.0))
        tables[tid] = {a: offset + (k - 1 - pos) for pos, a in enumerate(order)}
        theories.append(TheorySpec(tid, TheoryKind.CARDINAL_COMPARABLE, credence))

    situation = DecisionSituation(
        actions=[Action(a) for a in action_ids], theories=theories, score_tables=tables)
    return situation, truth


def run_experiment(config: SynthConfig) -> ExperimentReport:
    """Top-1 accuracy of each evaluator alone and of MEC over all of them."""
    ids = config.evaluator_ids
    hits = dict.fromkeys(ids, 0)
    mec_hits = 0
    for t in range(config.trials):
        situation, truth = generate_trial(trial_rng(config.seed, t), config)
        for tid in ids:
            table = situation.score_tables[tid]
            if max(table, key=table.__getitem__) == truth:
                hits[tid] += 1
        if run_mec(situation).selected == truth:
            mec_hits += 1
    return ExperimentReport(
        per_evaluator_accuracy=[hits[tid] / config.trials for tid in ids],
        mec_accuracy=mec_hits / config.trials,
        trials=config.trials,
        seed=config.seed,
        evaluator_ids=ids,
    )


# --------------------------------------------------------------------------
# reference oracle

def _exact_sigma(values: list[Fraction]) -> float:
    n = len(values)
    mean = sum(values, Fraction(0)) / n
    var = sum(((v - mean) ** 2 for v in values), Fraction(0)) / n
    return math.sqrt(var)


def brute_force_mec(situation: DecisionSituation, threshold: float | None = None
                    ) -> MecResult:
    """Slow, literal re-derivation of the pipeline for cross-checking.

    Raw scores are converted to exact fractions; the only inexact steps are
    the square root in each standard deviation and the divisions by it.
    """
    actions = [a.id for a in situation.actions]
    if len(actions) > BRUTE_FORCE_MAX_ACTIONS:
        raise MecError(f"brute force limited to {BRUTE_FORCE_MAX_ACTIONS} actions")
    if len(situation.theories) > BRUTE_FORCE_MAX_THEORIES:
        raise MecError(f"brute force limited to {BRUTE_FORCE_MAX_THEORIES} theories")
    general = actions if situation.general_set is None else list(situation.general_set)
    everyone = []
    for a in actions + general:
        if a not in everyone:
            everyone.append(a)

    def raw(theory):
        return {a: Fraction(situation.score_tables[theory.id][a]) for a in everyone}

    # (key, credence, exact scores over everyone)
    parts = []
    merged_credence = None
    comparable = [t for t in situation.theories if t.kind == TheoryKind.CARDINAL_COMPARABLE]
    if comparable:
        total = sum(Fraction(t.credence) for t in comparable)
        merged = {}
        for a in everyone:
            if total == 0:
                merged[a] = Fraction(0)
            else:
                merged[a] = sum(raw(t)[a] * Fraction(t.credence) for t in comparable) / total
        merged_credence = float(total)
        parts.append((MERGED_KEY, total, merged))

    for t in situation.theories:
        if t.kind == TheoryKind.CARDINAL_INCOMPARABLE:
            parts.append((t.id, Fraction(t.credence), raw(t)))
        elif t.kind == TheoryKind.ORDINAL:
            levels = raw(t)
            if t.scores_are_probabilities and threshold is not None:
                cut = Fraction(threshold)
                levels = {a: Fraction(1) if v >= cut else Fraction(0)
                          for a, v in levels.items()}
            points = {}
            for a in everyone:
                wins = 0
                losses = 0
                for b in everyone:
                    if levels[b] < levels[a]:
                        wins += 1
                    if levels[b] > levels[a]:
                        losses += 1
                points[a] = Fraction(wins - losses)
            parts.append((t.id, Fraction(t.credence), points))

    contributions = {}
    for key, credence, scores in parts:
        sigma = _exact_sigma([scores[g] for g in general])
        contributions[key] = {}
        for a in actions:
            normalized = 0.0 if sigma == 0.0 else float(scores[a]) / sigma
            contributions[key][a] = float(credence) * normalized

    expected = {a: math.fsum(c[a] for c in contributions.values()) for a in actions}
    ranking = sorted(actions, key=lambda a: (-expected[a], a))
    return MecResult(expected=expected, ranking=ranking, contributions=contributions,
                     selected=ranking[0], merged_credence=merged_credence)


# --------------------------------------------------------------------------
# explanations

EXPLANATION_TEMPLATE = ("Action {better} is more choiceworthy than action {worse} "
                        "because action {better} has {phrase} than action {worse}.")

DEFAULT_PHRASES = {
    "utilitarianism": "higher utility",
    "deontology": "greater permissibility",
    "virtue": "a more virtuous character",
}


def render_explanation(better: str, worse: str, theory_id: str,
                       vocabulary: Mapping[str, str] | None = None,
                       scores: Mapping[str, float] | None = None) -> str:
    """Fill the comparative explanation template for one theory.

    When ``scores`` (the theory's raw table) is given, the explanation is
    refused unless ``better`` strictly outscores ``worse`` under it.
    """
    if better == worse:
        raise MecError("not supported by theory: an action cannot beat itself")
    if scores is not None:
        for a in (better, worse):
            if a not in scores:
                raise MecError(f"theory {theory_id!r} does not score action {a!r}")
        if not scores[better] > scores[worse]:
            raise MecError(
                f"not supported by theory {theory_id!r}: "
                f"{better} does not outscore {worse}")
    vocab = DEFAULT_PHRASES if vocabulary is None else vocabulary
    phrase = vocab.get(theory_id, f"a higher {theory_id} score")
    return EXPLANATION_TEMPLATE.format(better=better, worse=worse, phrase=phrase)


def ranks_from(table: Mapping[str, float], ids: Sequence[str]) -> list[str]:
    """Ranking of ``ids`` induced by raw scores, using the same tie-break as MEC."""
    return sorted(ids, key=lambda a: (-table[a], a))
