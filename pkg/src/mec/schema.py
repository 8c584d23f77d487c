"""Decision-situation JSON files: validation with line-numbered diagnostics."""

from __future__ import annotations

import json
import json.decoder
import json.scanner
import math
import os
from collections.abc import Callable, Mapping
from pathlib import Path

import jsonschema

from .core import Action, DecisionSituation, MecError, TheoryKind, TheorySpec
from .evaluators import remote_score

SCORER_URL_ENV = "MEC_SCORER_URL"

SITUATION_SCHEMA = {
    "type": "object",
    "required": ["actions", "theories"],
    "additionalProperties": False,
    "properties": {
        "decision_maker": {"type": "string"},
        "time": {"type": "string"},
        "actions": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["id"],
                "additionalProperties": False,
                "properties": {
                    "id": {"type": "string", "minLength": 1},
                    "text": {"type": "string"},
                },
            },
        },
        "general_set": {
            "type": "array",
            "minItems": 1,
            "items": {"type": "string", "minLength": 1},
        },
        "theories": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["id", "kind", "credence"],
                "additionalProperties": False,
                "properties": {
                    "id": {"type": "string", "minLength": 1},
                    "kind": {"enum": [k.value for k in TheoryKind]},
                    "credence": {"type": "number", "minimum": 0, "maximum": 1},
                    "scores": {
                        "type": "object",
                        "additionalProperties": {"type": "number"},
                    },
                    "scores_are_probabilities": {"type": "boolean"},
                    "remote": {"type": "boolean"},
                    "endpoint": {"type": "string"},
                },
                "oneOf": [
                    {"required": ["scores"]},
                    {"required": ["remote"], "properties": {"remote": {"const": True}}},
                ],
            },
        },
    },
}


class SchemaError(MecError):
    """A situation file violates the input schema."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        self.detail = message
        super().__init__(f"line {line}: {message}" if line else message)


class _LineDict(dict):
    line = 0


def _line_tracking_decoder() -> json.JSONDecoder:
    # Pure-Python scanner so every object can record the line it starts on.
    decoder = json.JSONDecoder(parse_constant=float, object_pairs_hook=list)
    plain = json.decoder.JSONObject

    def parse_object(s_and_end, *args):
        s, end = s_and_end
        pairs, new_end = plain(s_and_end, *args)
        tracked = _LineDict()
        tracked.line = s.count("\n", 0, end) + 1
        for key, value in pairs:
            if key in tracked:
                raise SchemaError(f"duplicate key {key!r}", tracked.line)
            tracked[key] = value
        return tracked, new_end

    decoder.parse_object = parse_object
    decoder.scan_once = json.scanner.py_make_scanner(decoder)
    return decoder


def _line_of(doc, path) -> int | None:
    line = getattr(doc, "line", None)
    node = doc
    for key in path:
        try:
            node = node[key]
        except (KeyError, IndexError, TypeError):
            break
        line = getattr(node, "line", line)
    return line


def _describe(doc, path) -> str:
    parts = list(path)
    if len(parts) >= 2 and parts[0] == "theories" and isinstance(parts[1], int):
        theory = doc["theories"][parts[1]]
        name = theory.get("id") if isinstance(theory, dict) else None
        where = f"theory {name!r}" if name else f"theories[{parts[1]}]"
        rest = "".join(f".{p}" if isinstance(p, str) else f"[{p}]" for p in parts[2:])
        return f"{where} {rest.lstrip('.')}".rstrip()
    return "".join(f".{p}" if isinstance(p, str) else f"[{p}]" for p in parts).lstrip(".") or "document"


def parse_situation_document(text: str) -> dict:
    """Parse and schema-check a situation document, returning the raw JSON."""
    start = len(text) - len(text.lstrip())
    if start == len(text):
        raise SchemaError("empty situation file", 1)
    try:
        doc, end = _line_tracking_decoder().raw_decode(text, start)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc.msg}", exc.lineno) from None
    if text[end:].strip():
        raise SchemaError("trailing data after JSON document")

    validator = jsonschema.Draft202012Validator(SITUATION_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(map(str, e.path)))
    if errors:
        err = errors[0]
        line = _line_of(doc, err.path)
        raise SchemaError(f"{_describe(doc, err.path)}: {err.message}", line)

    for theory in doc["theories"]:
        for action, value in theory.get("scores", {}).items():
            if not math.isfinite(value):
                raise SchemaError(
                    f"theory {theory['id']!r}: nonfinite score for {action!r}", theory.line)
    return doc


def situation_from_document(
    doc: Mapping,
    remote: Callable[[str, str, list[Action]], Mapping[str, float]] | None = None,
) -> DecisionSituation:
    """Build a :class:`DecisionSituation` from a schema-valid document.

    ``remote(endpoint, theory_id, actions)`` supplies scores for theories
    declared with ``"remote": true``.
    """
    actions = [Action(a["id"], a.get("text")) for a in doc["actions"]]
    theories, tables = [], {}
    seen_actions = set()
    for a in doc["actions"]:
        if a["id"] in seen_actions:
            raise SchemaError(f"duplicate action id {a['id']!r}", a.line)
        seen_actions.add(a["id"])

    general = doc.get("general_set")
    needed = list(dict.fromkeys([a.id for a in actions] + list(general or [])))
    by_id = {a.id: a for a in actions}

    for t in doc["theories"]:
        line = getattr(t, "line", None)
        tid = t["id"]
        if tid in tables:
            raise SchemaError(f"duplicate theory id {tid!r}", line)
        try:
            spec = TheorySpec(tid, TheoryKind(t["kind"]), t["credence"],
                              bool(t.get("scores_are_probabilities", False)))
        except MecError as exc:
            raise SchemaError(str(exc), line) from None
        if t.get("remote"):
            endpoint = t.get("endpoint") or os.environ.get(SCORER_URL_ENV)
            if not endpoint:
                raise SchemaError(
                    f"theory {tid!r} is remote but no endpoint is given and "
                    f"{SCORER_URL_ENV} is unset", line)
            scores = dict((remote or remote_score)(endpoint, tid, [by_id.get(a, Action(a)) for a in needed]))
        else:
            scores = dict(t["scores"])
        missing = [a for a in needed if a not in scores]
        if missing:
            raise SchemaError(
                f"theory {tid!r}: inconsistent score coverage, missing {missing}", line)
        theories.append(spec)
        tables[tid] = scores

    return DecisionSituation(
        actions=actions,
        theories=theories,
        score_tables=tables,
        general_set=general,
        decision_maker=doc.get("decision_maker"),
        time=doc.get("time"),
    )


def load_situation(path: str | os.PathLike, remote=None) -> DecisionSituation:
    text = Path(path).read_text(encoding="utf-8")
    return situation_from_document(parse_situation_document(text), remote=remote)


def situation_to_document(situation: DecisionSituation) -> dict:
    doc: dict = {}
    if situation.decision_maker is not None:
        doc["decision_maker"] = situation.decision_maker
    if situation.time is not None:
        doc["time"] = str(situation.time)
    doc["actions"] = [{"id": a.id, **({"text": a.text} if a.text else {})}
                      for a in situation.actions]
    if situation.general_set is not None:
        doc["general_set"] = list(situation.general_set)
    doc["theories"] = [
        {
            "id": t.id,
            "kind": t.kind.value,
            "credence": t.credence,
            "scores": situation.score_tables[t.id].to_dict(),
            **({"scores_are_probabilities": True} if t.scores_are_probabilities else {}),
        }
        for t in situation.theories
    ]
    return doc
