"""JSON file formats for pmfs, joint pmfs, list rules, cluster maps and codes.

Masses may be given as numbers or as ``[numerator, denominator]`` pairs;
pairs are read exactly and converted to float once.

    pmf:      {"labels": [...], "p": [0.5, [1, 4], ...]}
    joint:    {"x": [...], "y": [...], "pxy": [[row for each x], ...]}
    rule:     {"lists": {"y_label": ["x_label", ...], ...}}
    map:      {"map": {"src_label": "cluster_label", ...}}
    code:     {"D": 2, "lengths": {"label": 3, ...}}
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from pathlib import Path
from typing import Any, Union

from .errors import InvalidArgument
from .listdecoding import FixedListRule, VariableListRule
from .majorization import ClusterMap
from .prob import DEFAULT_TOL, JointPMF, ProbVector, validate
from .sourcecoding import CodeSpec

Source = Union[str, Path, dict]


def _load(src: Source) -> dict:
    if isinstance(src, dict):
        return src
    try:
        with open(src) as fh:
            data = json.load(fh)
    except OSError as e:
        raise InvalidArgument(f"cannot read {src}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise InvalidArgument(f"{src}: not valid JSON ({e})") from None
    if not isinstance(data, dict):
        raise InvalidArgument(f"{src}: top-level JSON value must be an object")
    return data


def _field(data: dict, key: str, what: str):
    if key not in data:
        raise InvalidArgument(f"{what} file is missing the {key!r} field")
    return data[key]


def parse_number(v: Any) -> float:
    """A JSON number or an exact ``[num, den]`` pair."""
    if isinstance(v, bool):
        raise InvalidArgument(f"not a number: {v!r}")
    if isinstance(v, (int, float)):
        return float(v)
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(isinstance(t, int) and not isinstance(t, bool) for t in v):
        if v[1] == 0:
            raise InvalidArgument(f"zero denominator in {v!r}")
        return float(Fraction(v[0], v[1]))
    raise InvalidArgument(f"not a number or [num, den] pair: {v!r}")


def load_pmf(src: Source, tolerance: float = DEFAULT_TOL) -> ProbVector:
    data = _load(src)
    p = [parse_number(v) for v in _field(data, "p", "pmf")]
    labels = data.get("labels")
    return validate(p, tolerance, labels)


def load_joint(src: Source, tolerance: float = DEFAULT_TOL) -> JointPMF:
    data = _load(src)
    rows = _field(data, "pxy", "joint")
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise InvalidArgument("joint 'pxy' must be a list of rows")
    width = {len(r) for r in rows}
    if len(width) != 1:
        raise InvalidArgument("joint 'pxy' rows have different lengths")
    mass = [[parse_number(v) for v in r] for r in rows]
    return JointPMF(mass, data.get("x"), data.get("y"), tolerance)


def load_rule(src: Source, J: JointPMF) -> VariableListRule:
    """Rule keyed by labels; returns a FixedListRule when every list has the same size below M."""
    data = _load(src)
    lists = _field(data, "lists", "rule")
    if not isinstance(lists, dict):
        raise InvalidArgument("rule 'lists' must map y labels to lists of x labels")
    x_index = {lab: i for i, lab in enumerate(J.x_labels)}
    unknown_y = set(map(str, lists)) - set(J.y_labels)
    if unknown_y:
        raise InvalidArgument(f"rule names unknown observations {sorted(unknown_y)}")
    out = []
    for y in J.y_labels:
        if y not in {str(k) for k in lists}:
            raise InvalidArgument(f"rule has no list for observation {y!r}")
        xs = next(v for k, v in lists.items() if str(k) == y)
        try:
            out.append(frozenset(x_index[str(x)] for x in xs))
        except KeyError as e:
            raise InvalidArgument(f"rule names unknown symbol {e.args[0]!r}") from None
    sizes = {len(s) for s in out}
    if len(sizes) == 1 and next(iter(sizes)) < J.M:
        return FixedListRule(tuple(out))
    return VariableListRule(tuple(out))


def load_cluster_map(src: Source) -> ClusterMap:
    data = _load(src)
    mapping = _field(data, "map", "cluster map")
    if not isinstance(mapping, dict):
        raise InvalidArgument("'map' must be an object")
    return ClusterMap(mapping)


def load_code(src: Source, P: ProbVector) -> CodeSpec:
    """Code lengths ordered to match the atoms of ``P``."""
    data = _load(src)
    D = _field(data, "D", "code")
    lengths = _field(data, "lengths", "code")
    if not isinstance(D, int) or isinstance(D, bool):
        raise InvalidArgument("code 'D' must be an integer")
    if not isinstance(lengths, dict):
        raise InvalidArgument("code 'lengths' must map labels to integers")
    missing = [lab for lab in P.labels if lab not in lengths]
    if missing:
        raise InvalidArgument(f"code has no length for {missing}")
    vals = [lengths[lab] for lab in P.labels]
    if not all(isinstance(v, int) and not isinstance(v, bool) for v in vals):
        raise InvalidArgument("code lengths must be integers")
    return CodeSpec(D, tuple(vals), P.labels)


def rule_to_json(rule: VariableListRule, J: JointPMF) -> dict:
    return {"lists": {y: [J.x_labels[i] for i in sorted(s)] for y, s in zip(J.y_labels, rule.lists)}}


def _clean(obj):
    if isinstance(obj, float):
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        if math.isnan(obj):
            return "nan"
        return obj
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item"):  # numpy scalar
        return _clean(obj.item())
    return obj


def dumps(report: dict) -> str:
    """Deterministic JSON with full-precision floats; infinities become strings."""
    return json.dumps(_clean(report), indent=2, sort_keys=False) + "\n"
