"""Result records returned by the decision procedures."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Any

import numpy as np


@dataclass
class OrthoVerdict:
    """A yes/no answer together with the number that decided it.

    ``margin`` is the quantity compared against the tolerance (for the
    definition-level test: inf ||x + lam y|| - ||x||). ``witness`` holds the
    minimizing scalar, a dual functional or an attainment point, depending
    on the procedure. ``exhaustive`` is False when the answer rests on
    sampling or a heuristic search.
    """

    decision: bool | None
    margin: float
    witness: Any = None
    exhaustive: bool = True
    details: dict = field(default_factory=dict)

    def __bool__(self):
        return bool(self.decision)

    def to_json(self):
        return {
            "decision": self.decision,
            "margin": float(self.margin),
            "witness": encode(self.witness),
            "exhaustive": bool(self.exhaustive),
            "details": encode(self.details),
        }


def encode(obj):
    """Convert numpy and complex values into JSON-ready structures."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if np.isinf(v):
            return "inf" if v > 0 else "-inf"
        if np.isnan(v):
            return "nan"
        return v
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return encode(obj.tolist())
        return encode(obj.tolist())
    if isinstance(obj, dict):
        return {str(k): encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [encode(v) for v in obj]
    if hasattr(obj, "to_json"):
        return encode(obj.to_json())
    if dataclasses.is_dataclass(obj):
        return {f.name: encode(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    return repr(obj)
