"""JSON instance files with rationals written as "p/q" strings.

Layout::

    {
      "t1": ["a", "b"], "t2": ["c", "d"],
      "lambda1": ["1/2", "1/2"], "lambda2": ["1/2", "1/2"],
      "alternatives": ["k0", "k1"], "k0": "k0",
      "interim": {"1": {"k1": {"a": "1", "b": "0"}}, "2": {"k1": {"c": "1", "d": "0"}}},
      "expost": {"k1": {"a": {"c": "1", "d": "0"}, "b": {...}}, ...}
    }

``interim`` may list only the non-slack alternatives. ``expost`` is keyed
alternative -> player-1 type -> player-2 type.
"""
from __future__ import annotations

import hashlib
import json
import re
from fractions import Fraction
from typing import Optional

from .core import ExPostRule, Instance, InstanceError, InterimRule, validate_instance

_RATIONAL = re.compile(r"^\s*(-?\d+)(?:\s*/\s*(\d+))?\s*$")


class FormatError(ValueError):
    """Malformed instance document; the message names the offending field."""


def parse_rational(text, where: str = "value") -> Fraction:
    if isinstance(text, bool) or not isinstance(text, (str, int)):
        raise FormatError(f"{where}: expected a rational string like \"1/2\", got {text!r}")
    m = _RATIONAL.match(str(text))
    if not m:
        raise FormatError(f"{where}: {text!r} is not of the form p or p/q")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise FormatError(f"{where}: zero denominator in {text!r}")
    return Fraction(num, den)


def format_rational(x: Fraction) -> str:
    return str(Fraction(x))


def _labels(doc: dict, key: str) -> tuple:
    if key not in doc:
        raise FormatError(f"{key}: missing")
    value = doc[key]
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise FormatError(f"{key}: expected a list of strings")
    if len(set(value)) != len(value):
        raise FormatError(f"{key}: labels are not unique")
    return tuple(value)


def _prior(doc: dict, key: str, labels: tuple) -> dict:
    if key not in doc:
        raise FormatError(f"{key}: missing")
    values = doc[key]
    if not isinstance(values, list) or len(values) != len(labels):
        raise FormatError(f"{key}: expected {len(labels)} rationals aligned with the type labels")
    return {t: parse_rational(v, f"{key}[{i}]") for i, (t, v) in enumerate(zip(labels, values))}


def instance_from_doc(doc: dict) -> Instance:
    if not isinstance(doc, dict):
        raise FormatError("document: expected a JSON object")
    t1 = _labels(doc, "t1")
    t2 = _labels(doc, "t2")
    alts = _labels(doc, "alternatives")
    if "k0" not in doc or not isinstance(doc["k0"], str):
        raise FormatError("k0: missing or not a string")
    inst = Instance(t1, t2, _prior(doc, "lambda1", t1), _prior(doc, "lambda2", t2), alts, doc["k0"])
    try:
        validate_instance(inst)
    except InstanceError as exc:
        raise FormatError(f"instance: {exc}") from exc
    return inst


def interim_from_doc(inst: Instance, doc: dict) -> Optional[InterimRule]:
    raw = doc.get("interim")
    if raw is None:
        return None
    if not isinstance(raw, dict):
        raise FormatError("interim: expected an object keyed by player")
    tables = []
    for player in (1, 2):
        part = raw.get(str(player), {})
        types = inst.types(player)
        table = {}
        if not isinstance(part, dict):
            raise FormatError(f"interim.{player}: expected an object keyed by alternative")
        for k, row in part.items():
            if k not in inst.alternatives:
                raise FormatError(f"interim.{player}.{k}: unknown alternative")
            if not isinstance(row, dict):
                raise FormatError(f"interim.{player}.{k}: expected an object keyed by type")
            for t, v in row.items():
                if t not in types:
                    raise FormatError(f"interim.{player}.{k}.{t}: unknown type of player {player}")
                table[(k, t)] = parse_rational(v, f"interim.{player}.{k}.{t}")
        tables.append(table)
    return InterimRule(*tables)


def expost_from_doc(inst: Instance, doc: dict) -> Optional[ExPostRule]:
    raw = doc.get("expost")
    if raw is None:
        return None
    if not isinstance(raw, dict):
        raise FormatError("expost: expected an object keyed by alternative")
    q = {}
    for k, by_a in raw.items():
        if k not in inst.alternatives:
            raise FormatError(f"expost.{k}: unknown alternative")
        if not isinstance(by_a, dict):
            raise FormatError(f"expost.{k}: expected an object keyed by player-1 type")
        for a, by_b in by_a.items():
            if a not in inst.t1 or not isinstance(by_b, dict):
                raise FormatError(f"expost.{k}.{a}: unknown player-1 type or not an object")
            for b, v in by_b.items():
                if b not in inst.t2:
                    raise FormatError(f"expost.{k}.{a}.{b}: unknown player-2 type")
                q[(k, a, b)] = parse_rational(v, f"expost.{k}.{a}.{b}")
    return ExPostRule(q)


def loads(text: str):
    """(instance, interim or None, expost or None) from a JSON document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    inst = instance_from_doc(doc)
    return inst, interim_from_doc(inst, doc), expost_from_doc(inst, doc)


def load(path: str):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def to_doc(inst: Instance, interim: Optional[InterimRule] = None,
           expost: Optional[ExPostRule] = None) -> dict:
    doc = {
        "t1": list(inst.t1),
        "t2": list(inst.t2),
        "lambda1": [format_rational(inst.lambda1[t]) for t in inst.t1],
        "lambda2": [format_rational(inst.lambda2[t]) for t in inst.t2],
        "alternatives": list(inst.alternatives),
        "k0": inst.k0,
    }
    if interim is not None:
        doc["interim"] = {
            str(player): {
                k: {t: format_rational(interim.get(player, k, t)) for t in inst.types(player)}
                for k in inst.alternatives
                if any((k, t) in (interim.q1 if player == 1 else interim.q2)
                       for t in inst.types(player))
            }
            for player in (1, 2)
        }
    if expost is not None:
        doc["expost"] = {
            k: {a: {b: format_rational(expost[(k, a, b)]) for b in inst.t2} for a in inst.t1}
            for k in inst.alternatives
        }
    return doc


def dumps(inst: Instance, interim: Optional[InterimRule] = None,
          expost: Optional[ExPostRule] = None) -> str:
    return json.dumps(to_doc(inst, interim, expost), indent=2) + "\n"


def digest(inst: Instance, interim: Optional[InterimRule] = None,
           expost: Optional[ExPostRule] = None) -> str:
    """SHA-256 over the canonical JSON form; stable across runs and platforms."""
    canon = json.dumps(to_doc(inst, interim, expost), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()
