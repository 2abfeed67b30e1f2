"""JSON encoding helpers.

Exact quantities travel as ``{"num": p, "den": q}``; floating values that
came out of a fixed-precision computation travel as
``{"value": x, "precision_bits": b}``.  Nothing exact is ever coerced to a
float on the way out.
"""

from __future__ import annotations

import json
import os
import tempfile
from fractions import Fraction
from typing import Any

import numpy as np

SCHEMA_VERSION = "sumsetlab/1"


def rational(x: Fraction | int) -> dict:
    x = Fraction(x)
    return {"num": x.numerator, "den": x.denominator}


def real(x: float, precision_bits: int = 53) -> dict:
    return {"value": float(x), "precision_bits": int(precision_bits)}


def complex_real(z: complex, precision_bits: int = 53) -> dict:
    return {"re": float(z.real), "im": float(z.imag), "precision_bits": int(precision_bits)}


def to_fraction(obj: Any) -> Fraction:
    """Inverse of :func:`rational`; also accepts ints and decimal strings."""
    if isinstance(obj, dict):
        return Fraction(int(obj["num"]), int(obj["den"]))
    if isinstance(obj, float):
        raise TypeError("refusing to read an exact quantity from a float")
    return Fraction(obj)


def to_jsonable(obj: Any) -> Any:
    if isinstance(obj, Fraction):
        return rational(obj)
    if hasattr(obj, "to_json"):
        return obj.to_json()
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, complex):
        return complex_real(obj)
    return obj


def dumps(obj: Any) -> str:
    # sort_keys + fixed separators keep machine output byte-stable
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2, separators=(",", ": "))


def write_atomic(path: str | os.PathLike, text: str) -> None:
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
