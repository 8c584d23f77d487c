"""Expected-choiceworthiness aggregation over normative theories.

A decision situation pairs a set of candidate actions with several theories.
Each theory scores every action and carries a credence.  Scores are combined
in four steps:

1. Cardinal theories whose scales are mutually comparable are merged into a
   single theory, a credence-weighted average whose credence is the sum of
   the members' credences.
2. Ordinal theories are turned into numbers with a tie-aware Borda rule:
   (# actions strictly worse) - (# actions strictly better).  Probability
   outputs may first be cut at a threshold into two ordinal levels.
3. Every resulting table is divided by its population standard deviation
   over the general (reference) set of actions.  No centering is done.
4. Normalized tables are summed with credence weights and the action with
   the largest total is selected.

Everything here is a pure function of its inputs.
"""

from __future__ import annotations

import enum
import math
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass
from datetime import datetime

import numpy as np

#: Contribution key used for the merged comparable-cardinal theory.
MERGED_KEY = "𝒦"


class MecError(ValueError):
    """Base class for invalid inputs to the aggregation pipeline."""


class CoverageError(MecError):
    """A score table is missing actions it is required to score."""


class NonFiniteScoreError(MecError):
    """A score is NaN or infinite."""


class DuplicateActionError(MecError):
    """The same action id was scored twice."""


class TheoryKind(enum.Enum):
    CARDINAL_COMPARABLE = "cardinal_comparable"
    CARDINAL_INCOMPARABLE = "cardinal_incomparable"
    ORDINAL = "ordinal"


@dataclass(frozen=True)
class TheorySpec:
    """One normative theory.

    ``scores_are_probabilities`` only matters for ordinal theories: when set
    and a threshold is supplied to :func:`run_mec`, the raw scores are
    ordinalized before Borda scoring.
    """

    id: str
    kind: TheoryKind = TheoryKind.CARDINAL_COMPARABLE
    credence: float = 1.0
    scores_are_probabilities: bool = False

    def __post_init__(self):
        if not isinstance(self.id, str) or not self.id:
            raise MecError("theory id must be a nonempty string")
        if self.id == MERGED_KEY:
            raise MecError(f"theory id {MERGED_KEY!r} is reserved")
        if not isinstance(self.kind, TheoryKind):
            object.__setattr__(self, "kind", TheoryKind(self.kind))
        c = float(self.credence)
        if not math.isfinite(c) or not 0.0 <= c <= 1.0:
            raise MecError(
                f"theory {self.id!r}: credence {self.credence} outside [0, 1]")
        object.__setattr__(self, "credence", c)


class ScoreTable(Mapping):
    """Immutable mapping from action id to a finite real score."""

    __slots__ = ("theory_id", "_scores")

    def __init__(self, scores: Mapping[str, float] | Iterable[tuple[str, float]] = (),
                 theory_id: str = ""):
        items = scores.items() if isinstance(scores, Mapping) else scores
        data: dict[str, float] = {}
        for key, value in items:
            if key in data:
                raise DuplicateActionError(f"duplicate action id {key!r}")
            v = float(value)
            if not math.isfinite(v):
                raise NonFiniteScoreError(
                    f"nonfinite score {value!r} for action {key!r}")
            data[key] = v
        self.theory_id = theory_id
        self._scores = data

    def __getitem__(self, key: str) -> float:
        return self._scores[key]

    def __iter__(self) -> Iterator[str]:
        return iter(self._scores)

    def __len__(self) -> int:
        return len(self._scores)

    def __eq__(self, other):
        if isinstance(other, Mapping):
            return dict(self._scores) == dict(other)
        return NotImplemented

    __hash__ = None

    def __repr__(self):
        return f"ScoreTable({self._scores!r}, theory_id={self.theory_id!r})"

    def to_dict(self) -> dict[str, float]:
        return dict(self._scores)


@dataclass(frozen=True)
class Action:
    id: str
    text: str | None = None


@dataclass
class DecisionSituation:
    """The tuple (decision maker, time, actions, theories, credences).

    ``general_set`` is the reference set used for normalization; when omitted
    it is the action set itself.  Construction validates every invariant.
    """

    actions: Sequence[Action]
    theories: Sequence[TheorySpec]
    score_tables: Mapping[str, Mapping[str, float]]
    general_set: Sequence[str] | None = None
    decision_maker: str | None = None
    time: datetime | str | None = None

    def __post_init__(self):
        self.actions = [a if isinstance(a, Action) else Action(a) for a in self.actions]
        if not self.actions:
            raise MecError("a decision situation needs at least one action")
        ids = [a.id for a in self.actions]
        if len(set(ids)) != len(ids):
            raise MecError("action ids must be unique")
        if not self.theories:
            raise MecError("a decision situation needs at least one theory")
        theory_ids = [t.id for t in self.theories]
        if len(set(theory_ids)) != len(theory_ids):
            raise MecError("theory ids must be unique")
        if set(self.score_tables) != set(theory_ids):
            raise MecError("each theory needs exactly one score table")
        if self.general_set is not None:
            self.general_set = list(self.general_set)
            if not self.general_set:
                raise MecError("general set must be nonempty when given")
            if len(set(self.general_set)) != len(self.general_set):
                raise MecError("general set ids must be unique")
        needed = self.scored_ids
        tables = {}
        for tid in theory_ids:
            table = self.score_tables[tid]
            if not isinstance(table, ScoreTable):
                table = ScoreTable(table, theory_id=tid)
            missing = [a for a in needed if a not in table]
            if missing:
                raise CoverageError(
                    f"theory {tid!r}: inconsistent score coverage, "
                    f"missing {missing}")
            tables[tid] = table
        self.score_tables = tables

    @property
    def action_ids(self) -> list[str]:
        return [a.id for a in self.actions]

    @property
    def general_ids(self) -> list[str]:
        return self.action_ids if self.general_set is None else list(self.general_set)

    @property
    def scored_ids(self) -> list[str]:
        """Actions and general-set members, in first-seen order."""
        return list(dict.fromkeys([*self.action_ids, *self.general_ids]))


@dataclass
class MecResult:
    expected: dict[str, float]
    ranking: list[str]
    contributions: dict[str, dict[str, float]]
    selected: str
    merged_credence: float | None = None

    def to_dict(self) -> dict:
        return {
            "expected": dict(self.expected),
            "ranking": list(self.ranking),
            "contributions": {k: dict(v) for k, v in self.contributions.items()},
            "selected": self.selected,
            "merged_credence": self.merged_credence,
        }


@dataclass(frozen=True)
class MecOptions:
    threshold: float | None = None

    def __post_init__(self):
        if self.threshold is not None and not 0.0 < self.threshold < 1.0:
            raise MecError(f"threshold {self.threshold} outside (0, 1)")


def _check_finite(table: Mapping[str, float]) -> None:
    for key, value in table.items():
        if not math.isfinite(value):
            raise NonFiniteScoreError(f"nonfinite score {value!r} for action {key!r}")


def _require(table: Mapping[str, float], ids: Iterable[str]) -> None:
    missing = [a for a in ids if a not in table]
    if missing:
        raise CoverageError(f"inconsistent score coverage, missing {missing}")


def merge_comparable(
    theories: Sequence[tuple[float, Mapping[str, float]]],
) -> tuple[float, ScoreTable]:
    """Merge intertheoretically comparable cardinal theories.

    Returns the summed credence and the credence-weighted mean table.  A zero
    total credence yields an all-zero table.
    """
    if not theories:
        raise MecError("nothing to merge")
    ids = list(theories[0][1])
    id_set = set(ids)
    for credence, table in theories:
        if not 0.0 <= credence <= 1.0:
            raise MecError(f"credence {credence} outside [0, 1]")
        if set(table) != id_set:
            raise CoverageError("inconsistent score coverage")
        _check_finite(table)
    total = math.fsum(c for c, _ in theories)
    if total == 0.0:
        return 0.0, ScoreTable({a: 0.0 for a in ids}, theory_id=MERGED_KEY)
    weights = [(c / total, table) for c, table in theories]
    merged = {a: math.fsum(table[a] * w for w, table in weights) for a in ids}
    return total, ScoreTable(merged, theory_id=MERGED_KEY)


def borda(ordinal_scores: Mapping[str, float], over: Iterable[str]) -> ScoreTable:
    """Tie-aware Borda scores of ``over``: #strictly-worse minus #strictly-better."""
    ids = list(dict.fromkeys(over))
    if not ids:
        raise MecError("cannot Borda-score an empty action set")
    _require(ordinal_scores, ids)
    values = np.array([ordinal_scores[a] for a in ids], dtype=float)
    ordered = np.sort(values)
    below = np.searchsorted(ordered, values, side="left")
    above = len(values) - np.searchsorted(ordered, values, side="right")
    theory_id = getattr(ordinal_scores, "theory_id", "")
    return ScoreTable(
        {a: float(int(lo) - int(hi)) for a, lo, hi in zip(ids, below, above)},
        theory_id=theory_id)


def ordinalize(probabilities: Mapping[str, float], threshold: float) -> ScoreTable:
    """Cut probabilities into two ordinal levels: 1 when p >= threshold, else 0."""
    if not 0.0 < threshold < 1.0:
        raise MecError(f"threshold {threshold} outside (0, 1)")
    out = {}
    for a, p in probabilities.items():
        if not 0.0 <= p <= 1.0:
            raise MecError(f"probability {p!r} for action {a!r} outside [0, 1]")
        out[a] = 1.0 if p >= threshold else 0.0
    return ScoreTable(out, theory_id=getattr(probabilities, "theory_id", ""))


def _pop_std(values: Sequence[float]) -> float:
    # A constant table is exactly indifferent; float noise must not turn it
    # into a huge normalized score.
    if max(values) == min(values):
        return 0.0
    return float(np.std(np.asarray(values, dtype=float)))


def normalize(
    scores: Mapping[str, float],
    general_ids: Iterable[str],
    action_ids: Iterable[str] | None = None,
) -> ScoreTable:
    """Divide scores by their population standard deviation over ``general_ids``.

    The output covers ``action_ids`` (all scored ids when omitted).  An
    indifferent theory (zero deviation) normalizes to all zeros.
    """
    general = list(general_ids)
    if not general:
        raise MecError("general set is empty")
    targets = list(scores) if action_ids is None else list(action_ids)
    _require(scores, [*general, *targets])
    _check_finite(scores)
    sigma = _pop_std([scores[g] for g in general])
    theory_id = getattr(scores, "theory_id", "")
    if sigma == 0.0:
        return ScoreTable({a: 0.0 for a in targets}, theory_id=theory_id)
    return ScoreTable({a: scores[a] / sigma for a in targets}, theory_id=theory_id)


def aggregate(normalized: Sequence[tuple[float, Mapping[str, float]]]) -> ScoreTable:
    """Credence-weighted sum of normalized tables."""
    if not normalized:
        raise MecError("nothing to aggregate")
    ids = list(normalized[0][1])
    id_set = set(ids)
    for _, table in normalized:
        if set(table) != id_set:
            raise CoverageError("inconsistent score coverage")
    return ScoreTable(
        {a: math.fsum(c * table[a] for c, table in normalized) for a in ids})


def rank(expected: Mapping[str, float]) -> list[str]:
    """Action ids by descending score; ties go to the lexicographically smaller id."""
    return sorted(expected, key=lambda a: (-expected[a], a))


def select(expected: Mapping[str, float]) -> str:
    if not expected:
        raise MecError("cannot select from an empty table")
    return rank(expected)[0]


def run_mec(situation: DecisionSituation, options: MecOptions | None = None,
            *, threshold: float | None = None) -> MecResult:
    """Run the full pipeline on a validated decision situation."""
    if options is None:
        options = MecOptions(threshold=threshold)
    actions = situation.action_ids
    general = situation.general_ids
    scored = situation.scored_ids
    tables = situation.score_tables

    entries: list[tuple[str, float, ScoreTable]] = []
    merged_credence = None

    comparable = [t for t in situation.theories
                  if t.kind is TheoryKind.CARDINAL_COMPARABLE]
    if comparable:
        merged_credence, merged = merge_comparable(
            [(t.credence, {a: tables[t.id][a] for a in scored}) for t in comparable])
        entries.append((MERGED_KEY, merged_credence, merged))

    for t in situation.theories:
        raw = ScoreTable({a: tables[t.id][a] for a in scored}, theory_id=t.id)
        if t.kind is TheoryKind.CARDINAL_INCOMPARABLE:
            entries.append((t.id, t.credence, raw))
        elif t.kind is TheoryKind.ORDINAL:
            if t.scores_are_probabilities and options.threshold is not None:
                raw = ordinalize(raw, options.threshold)
            entries.append((t.id, t.credence, borda(raw, scored)))

    contributions: dict[str, dict[str, float]] = {}
    weighted = []
    for key, credence, table in entries:
        norm = normalize(table, general, actions)
        weighted.append((credence, norm))
        contributions[key] = {a: credence * norm[a] for a in actions}

    expected = aggregate(weighted).to_dict()
    ranking = rank(expected)
    return MecResult(
        expected=expected,
        ranking=ranking,
        contributions=contributions,
        selected=ranking[0],
        merged_credence=merged_credence,
    )
