"""Parsers for the small spec languages shared by the harness and the CLI.

family   interval | power:<real> | genpoly:<poly> | explicit:<kind>[:k] | list:<n,...> | file:<path>
set B    bohr:<rotation>@<region> | random:<p> | file:<path> | all | single:<n> | kind:<kind>[:k]
window   <lo>:<hi>
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .averaging import SequenceFamily
from .integersets import KINDS, example_set
from .kronecker import bohr_set, parse_region, parse_rotation
from .reals import DEFAULT_PRECISION_BITS
from .windowsets import WindowSet, read_setfile


def _integer(tok: str) -> int:
    # accepts 1000000 and 1e6
    v = Fraction(tok.strip())
    if v.denominator != 1:
        raise ValueError(tok)
    return int(v)


def parse_window(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition(":")
    try:
        if not sep:
            raise ValueError
        a, b = _integer(lo), _integer(hi)
    except ValueError:
        raise ValueError(f"window grammar: expected '<lo>:<hi>', got {text!r}") from None
    if b < a:
        raise ValueError(f"window grammar: hi < lo in {text!r}")
    return a, b


def parse_family(text: str) -> SequenceFamily:
    kind, _, body = text.partition(":")
    if kind == "interval":
        return SequenceFamily.interval()
    if kind == "power":
        return SequenceFamily.power_floor(body)
    if kind == "genpoly":
        return SequenceFamily.genpoly(body)
    if kind == "explicit":
        name, _, k = body.partition(":")
        return SequenceFamily.explicit_set(name, int(k) if k else 2)
    if kind == "list":
        return SequenceFamily.explicit([_integer(v) for v in body.split(",")], text)
    if kind == "file":
        with open(body) as fh:
            vals = [int(tok) for line in fh for tok in line.split("#", 1)[0].replace(",", " ").split()]
        return SequenceFamily.explicit(vals, f"file:{body}")
    raise ValueError("family grammar: expected interval | power:<a> | genpoly:<poly> | "
                     f"explicit:<kind> | list:<n,...> | file:<path>, got {text!r}")


def family_set(family: SequenceFamily, j: int) -> WindowSet:
    """Support of the ``j``-th measure as a set on its own hull."""
    vals, _ = family.terms(j)
    return WindowSet.from_elements(vals, int(vals.min()), int(vals.max()), f"{family.description}, j={j}")


def parse_bset(text: str, window: tuple[int, int], seed: int = 0,
               precision: int = DEFAULT_PRECISION_BITS) -> WindowSet:
    """Build the set ``B`` on ``window`` from its spec string."""
    lo, hi = window
    kind, _, body = text.partition(":")
    if kind == "bohr":
        rot_s, sep, reg_s = body.rpartition("@")
        if not sep:
            raise ValueError(f"set grammar: expected 'bohr:<rotation>@<region>', got {text!r}")
        rot = parse_rotation(rot_s, precision)
        return bohr_set(rot, parse_region(reg_s, rot.dimension), window)
    if kind == "random":
        p = Fraction(body)
        rng = np.random.default_rng(seed)
        return WindowSet(lo, hi, rng.random(hi - lo + 1) < float(p), f"random p={p} seed={seed}")
    if kind == "file":
        with open(body) as fh:
            S = read_setfile(fh)
        return WindowSet.from_elements(S.elements(), lo, hi, S.provenance)
    if kind == "all":
        return WindowSet.full(lo, hi)
    if kind == "single":
        return WindowSet.from_elements([int(body)], lo, hi, f"{{{int(body)}}}")
    if kind == "kind":
        name, _, k = body.partition(":")
        return example_set(name, window, k=int(k) if k else 2)
    raise ValueError("set grammar: expected bohr:<rotation>@<region> | random:<p> | file:<path> | "
                     f"all | single:<n> | kind:<{'|'.join(KINDS)}>, got {text!r}")
