"""Score sources for theories: files, model-output conventions, a remote scorer.

The conventions mirror how three theory-specific classifiers are read as
choiceworthiness:

* utilitarian models emit a scalar that is used as-is;
* deontology models are queried with ``"I am a human [SEP] <action>"`` and
  the returned probability of permissibility is the score;
* virtue models score ``"<action> [SEP] <trait>"`` pairs and the action takes
  the sentiment of its most probable trait.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import requests

from .core import (
    Action,
    DuplicateActionError,
    MecError,
    NonFiniteScoreError,
    ScoreTable,
)

logger = logging.getLogger(__name__)

SEP = " [SEP] "
DEONTOLOGY_PREFIX = "I am a human"


class ScoreFileError(MecError):
    """A score file could not be parsed."""


class CalibrationError(MecError):
    pass


class RemoteScoreError(MecError):
    """Base class for remote scorer failures."""


class ScorerUnavailableError(RemoteScoreError):
    pass


class ScorerStatusError(RemoteScoreError):
    def __init__(self, status: int, body: str = ""):
        super().__init__(f"scorer returned HTTP {status}: {body[:200]}")
        self.status = status


class ScorerResponseError(RemoteScoreError):
    """The response body was not the expected JSON shape."""


class IncompleteScoresError(RemoteScoreError):
    pass


# --------------------------------------------------------------------------
# files

def _reject_duplicate_keys(pairs):
    seen = {}
    for key, value in pairs:
        if key in seen:
            raise DuplicateActionError(f"duplicate action id {key!r}")
        seen[key] = value
    return seen


def _parse_number(text: str, where: str) -> float:
    try:
        value = float(text)
    except (TypeError, ValueError):
        raise ScoreFileError(f"{where}: not a number: {text!r}") from None
    if not math.isfinite(value):
        raise NonFiniteScoreError(f"{where}: nonfinite score {text!r}")
    return value


def parse_score_csv(text: str, theory_id: str = "") -> ScoreTable:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ScoreFileError("empty score file") from None
    if [h.strip() for h in header] != ["action", "score"]:
        raise ScoreFileError(f"line 1: expected header 'action,score', got {header}")
    scores: dict[str, float] = {}
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != 2:
            raise ScoreFileError(f"line {lineno}: expected 2 columns, got {len(row)}")
        action, raw = row[0].strip(), row[1].strip()
        if not action:
            raise ScoreFileError(f"line {lineno}: empty action id")
        if action in scores:
            raise DuplicateActionError(f"line {lineno}: duplicate action id {action!r}")
        scores[action] = _parse_number(raw, f"line {lineno}")
    return ScoreTable(scores, theory_id=theory_id)


def parse_score_json(text: str) -> ScoreTable:
    try:
        doc = json.loads(text, object_pairs_hook=_reject_duplicate_keys,
                         parse_constant=lambda c: float(c))
    except json.JSONDecodeError as exc:
        raise ScoreFileError(f"line {exc.lineno}: {exc.msg}") from None
    if not isinstance(doc, dict) or not isinstance(doc.get("scores"), dict):
        raise ScoreFileError('expected an object with a "scores" object')
    scores = {}
    for action, value in doc["scores"].items():
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ScoreFileError(f"score for {action!r} is not a number")
        if not math.isfinite(value):
            raise NonFiniteScoreError(f"nonfinite score for {action!r}")
        scores[action] = float(value)
    return ScoreTable(scores, theory_id=str(doc.get("theory", "")))


def load_score_table(path: str | os.PathLike, format: str | None = None) -> ScoreTable:
    """Read a score table from a ``.csv`` (``action,score``) or ``.json`` file."""
    path = Path(path)
    fmt = (format or path.suffix.lstrip(".")).lower()
    text = path.read_text(encoding="utf-8")
    if fmt == "csv":
        return parse_score_csv(text, theory_id=path.stem)
    if fmt == "json":
        return parse_score_json(text)
    raise ScoreFileError(f"unknown score file format {fmt!r}")


def dump_score_table(table: Mapping[str, float], format: str = "json",
                     theory_id: str | None = None) -> str:
    """Serialize a table so that :func:`load_score_table` reads it back equal."""
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["action", "score"])
        for action, score in table.items():
            writer.writerow([action, repr(float(score))])
        return buf.getvalue()
    if format == "json":
        tid = theory_id if theory_id is not None else getattr(table, "theory_id", "")
        return json.dumps({"theory": tid, "scores": dict(table)}, indent=2)
    raise ScoreFileError(f"unknown score file format {format!r}")


# --------------------------------------------------------------------------
# theory conventions

def utilitarian_score(raw: Mapping[str, float]) -> ScoreTable:
    """Scalar model outputs are choiceworthiness scores as they stand."""
    if not raw:
        raise MecError("empty table")
    return ScoreTable(raw, theory_id=getattr(raw, "theory_id", ""))


def deontology_prompt(action_text: str) -> str:
    if not action_text:
        raise MecError("action text must be nonempty")
    return DEONTOLOGY_PREFIX + SEP + action_text


def virtue_prompt(action_text: str, trait: str) -> str:
    if not action_text or not trait:
        raise MecError("action text and trait must be nonempty")
    return action_text + SEP + trait


class SentimentMap(Mapping):
    """Character-trait term to sentiment in [-1, 1]; terms are lower-cased."""

    def __init__(self, entries: Mapping[str, float]):
        data = {}
        for term, value in entries.items():
            key = str(term).strip().lower()
            if not key:
                raise MecError("sentiment terms must be nonempty")
            if key in data:
                raise MecError(f"duplicate sentiment term {key!r}")
            v = float(value)
            if not -1.0 <= v <= 1.0:
                raise MecError(f"sentiment for {key!r} outside [-1, 1]: {value}")
            data[key] = v
        self._entries = data

    def __getitem__(self, term: str) -> float:
        return self._entries[term.lower()]

    def __contains__(self, term) -> bool:
        return isinstance(term, str) and term.lower() in self._entries

    def __iter__(self):
        return iter(self._entries)

    def __len__(self):
        return len(self._entries)

    @classmethod
    def load(cls, path: str | os.PathLike) -> SentimentMap:
        text = Path(path).read_text(encoding="utf-8")
        try:
            doc = json.loads(text, object_pairs_hook=_reject_duplicate_keys)
        except json.JSONDecodeError as exc:
            raise ScoreFileError(f"line {exc.lineno}: {exc.msg}") from None
        if not isinstance(doc, dict):
            raise ScoreFileError("sentiment map must be a JSON object")
        return cls(doc)


@dataclass
class TraitDistribution:
    """Per-trait probabilities for one action; not required to sum to one."""

    action_id: str
    probs: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if not self.probs:
            raise MecError(f"action {self.action_id!r}: no trait probabilities")
        for trait, p in self.probs.items():
            if not 0.0 <= p <= 1.0:
                raise MecError(f"probability for trait {trait!r} outside [0, 1]")


def virtue_choiceworthiness(dist: TraitDistribution, sentiments: SentimentMap) -> float:
    """Sentiment of the most probable trait that the map knows about."""
    scorable = [(t.lower(), p) for t, p in dist.probs.items() if t in sentiments]
    if not scorable:
        raise MecError(f"action {dist.action_id!r}: no scorable trait")
    best, _ = min(scorable, key=lambda tp: (-tp[1], tp[0]))
    return sentiments[best]


def virtue_scores(dists: Iterable[TraitDistribution], sentiments: SentimentMap,
                  theory_id: str = "virtue") -> ScoreTable:
    return ScoreTable(((d.action_id, virtue_choiceworthiness(d, sentiments))
                       for d in dists), theory_id=theory_id)


# --------------------------------------------------------------------------
# thresholds

def calibrate_threshold(labeled: Sequence[tuple[float, int]]) -> float:
    """Accuracy-maximizing threshold for the rule ``score >= threshold -> 1``.

    Candidates are midpoints between adjacent distinct scores, plus
    ``min - 1`` and ``max + 1``.  Equal accuracies resolve to the smallest
    candidate.
    """
    if not labeled:
        raise CalibrationError("degenerate calibration set")
    scores = np.array([float(s) for s, _ in labeled])
    labels = np.array([int(y) for _, y in labeled])
    if not np.all(np.isfinite(scores)):
        raise NonFiniteScoreError("nonfinite calibration score")
    if not set(labels.tolist()) <= {0, 1}:
        raise CalibrationError("labels must be 0 or 1")
    if labels.min() == labels.max():
        raise CalibrationError("degenerate calibration set")

    distinct, inverse = np.unique(scores, return_inverse=True)
    pos = np.bincount(inverse, weights=labels, minlength=len(distinct)).astype(int)
    neg = np.bincount(inverse, minlength=len(distinct)) - pos
    # Candidate j sits just below distinct[j] (j = len means above everything):
    # correct = negatives strictly below + positives at or above.
    neg_below = np.concatenate([[0], np.cumsum(neg)])
    pos_at_or_above = pos.sum() - np.concatenate([[0], np.cumsum(pos)])
    correct = neg_below + pos_at_or_above
    candidates = np.concatenate([
        [distinct[0] - 1.0],
        (distinct[:-1] + distinct[1:]) / 2.0,
        [distinct[-1] + 1.0],
    ])
    return float(candidates[int(np.argmax(correct))])


def classify(score: float, zero_rule: bool = True, threshold: float | None = None) -> int:
    """Binary label for a model output.

    With ``zero_rule`` the label is 1 iff the score is strictly positive.
    Otherwise ``threshold`` (e.g. from :func:`calibrate_threshold`) is used
    inclusively.
    """
    if not math.isfinite(score):
        raise NonFiniteScoreError(f"nonfinite score {score!r}")
    if zero_rule:
        return int(score > 0.0)
    if threshold is None:
        raise MecError("a threshold is required when zero_rule is off")
    return int(score >= threshold)


# --------------------------------------------------------------------------
# remote scorer

def _as_action(a) -> Action:
    if isinstance(a, Action):
        return a
    if isinstance(a, Mapping):
        return Action(a["id"], a.get("text"))
    return Action(str(a))


def remote_score(
    endpoint: str,
    theory_id: str,
    actions: Sequence[Action | Mapping],
    timeout: float = 10.0,
    *,
    batch_size: int | None = None,
    session: requests.Session | None = None,
) -> ScoreTable:
    """POST actions to a JSON scoring endpoint and collect the returned scores.

    Request body: ``{"theory": id, "actions": [{"id", "text"}, ...]}``.
    Response body: ``{"scores": {id: number}}``.  Each batch is retried once
    on timeout.
    """
    acts = [_as_action(a) for a in actions]
    if not acts:
        raise MecError("no actions to score")
    if not endpoint.startswith(("http://", "https://")):
        raise MecError(f"malformed scorer endpoint {endpoint!r}")
    size = batch_size or len(acts)
    http = session or requests

    scores: dict[str, float] = {}
    for start in range(0, len(acts), size):
        batch = acts[start:start + size]
        body = {"theory": theory_id,
                "actions": [{"id": a.id, "text": a.text} for a in batch]}
        scores.update(_score_batch(http, endpoint, body, timeout, [a.id for a in batch]))
    return ScoreTable({a.id: scores[a.id] for a in acts}, theory_id=theory_id)


def _score_batch(http, endpoint, body, timeout, ids) -> dict[str, float]:
    for attempt in (1, 2):
        try:
            resp = http.post(endpoint, json=body, timeout=timeout)
            break
        except requests.Timeout:
            logger.warning("scorer timeout at %s (attempt %d)", endpoint, attempt)
        except requests.ConnectionError as exc:
            raise ScorerUnavailableError(f"scorer unavailable: {exc}") from exc
    else:
        raise ScorerUnavailableError(f"scorer unavailable: {endpoint} timed out twice")

    if not 200 <= resp.status_code < 300:
        raise ScorerStatusError(resp.status_code, resp.text)
    try:
        payload = resp.json()
    except ValueError:
        raise ScorerResponseError("scorer response is not JSON") from None
    got = payload.get("scores") if isinstance(payload, dict) else None
    if not isinstance(got, dict):
        raise ScorerResponseError('scorer response lacks a "scores" object')
    missing = [a for a in ids if a not in got]
    if missing:
        raise IncompleteScoresError(f"incomplete scores: missing {missing}")
    out = {}
    for a in ids:
        value = got[a]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ScorerResponseError(f"score for {a!r} is not a number")
        if not math.isfinite(value):
            raise NonFiniteScoreError(f"nonfinite score for {a!r}")
        out[a] = float(value)
    return out
