"""``sumsetlab`` command line.

Exit status: 0 on success, 1 on usage or input errors, 2 when an
experiment or replay does not meet its criteria.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import finitegroup as fg
from . import verify
from .averaging import equidistribution_profile, measure_at, weyl_sums_uniform_grid
from .integersets import KINDS, example_set
from .kronecker import TrigPolynomial, bohr_set, parse_region, parse_rotation, rotation_average
from .reals import DEFAULT_PRECISION_BITS
from .serial import SCHEMA_VERSION, complex_real, dumps, write_atomic
from .specs import parse_family, parse_window
from .windowsets import (banach_density_estimate, piecewise_syndetic_scan, read_setfile, sumset,
                         syndetic_at_scale, upper_density_estimate, write_setfile)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _read_set(path: str):
    if path == "-":
        return read_setfile(sys.stdin.read())
    with open(path) as fh:
        return read_setfile(fh)


def _envelope(kind: str, payload: dict) -> dict:
    return {"schema": SCHEMA_VERSION, "kind": kind, **payload}


def parse_trig(text: str, d: int) -> TrigPolynomial:
    """``k1[,k2..]:coef`` terms joined by ``;``, e.g. ``1:1`` or ``0:1/2;1:1/4``."""
    terms = []
    for part in text.split(";"):
        ks, sep, c = part.partition(":")
        if not sep:
            raise ValueError(f"trig grammar: expected '<k>[,<k>...]:<coef>', got {part!r}")
        k = tuple(int(v) for v in ks.split(","))
        if len(k) != d:
            raise ValueError(f"trig grammar: frequency {k} has wrong dimension for T^{d}")
        coef = complex(c.replace("i", "j")) if ("i" in c or "j" in c) else complex(float(Fraction(c)))
        terms.append((k, coef))
    return TrigPolynomial(tuple(terms))


# ---------------------------------------------------------------------------
# subcommands


def cmd_gen(a) -> str:
    lo, hi = parse_window(a.window)
    digits = [int(v) for v in a.digits.split(",")] if a.digits else ()
    S = example_set(a.kind, (lo, hi), k=a.k, digits=digits)
    return write_setfile(S, fmt=a.set_format)


def cmd_density(a) -> dict:
    S = _read_set(a.set)
    out = {"window": [S.lo, S.hi], "cardinality": len(S)}
    if a.M is not None:
        out["banach"] = banach_density_estimate(S, a.M).to_json()
    if a.N is not None:
        out["upper"] = upper_density_estimate(S, a.N, a.n_min).to_json()
    if a.M is None and a.N is None:
        out["banach"] = banach_density_estimate(S, min(S.length, 10**4)).to_json()
    return _envelope("density", out)


def cmd_sumset(a) -> str:
    A, B = _read_set(a.a), _read_set(a.b)
    w = parse_window(a.window) if a.window else None
    return write_setfile(sumset(A, B, w, a.method), fmt=a.set_format)


def cmd_scan(a) -> dict:
    S = _read_set(a.set)
    out = {"pws": piecewise_syndetic_scan(S, a.L_max, a.W).to_json()}
    if a.syndetic is not None:
        syn = syndetic_at_scale(S, a.syndetic)
        out["syndetic"] = {"L": a.syndetic, "syndetic": syn.syndetic, "worst_gap": syn.worst_gap,
                           "hole": list(syn.hole) if syn.hole else None}
    return _envelope("scan", out)


def cmd_weyl(a):
    fam = parse_family(a.family)
    nu = measure_at(fam, a.j)
    W = weyl_sums_uniform_grid(nu, a.theta_grid)
    if a.format == "json":
        return _envelope("weyl", {"family": fam.description, "j": a.j, "grid": a.theta_grid,
                                  "values": [complex_real(z) for z in W[1:]]})
    lines = ["k,theta,abs"]
    for k in range(1, a.theta_grid):
        lines.append(f"{k},{2 * np.pi * k / a.theta_grid:.17g},{abs(W[k]):.17g}")
    return "\n".join(lines) + "\n"


def cmd_profile(a):
    fam = parse_family(a.family)
    j_list = [int(Fraction(v)) for v in a.j.split(",")]
    prof = equidistribution_profile(fam, a.theta_grid, j_list)
    if a.format == "json":
        return _envelope("profile", prof.to_json())
    return prof.to_csv()


def cmd_bohr(a):
    rot = parse_rotation(a.rotation, a.precision_bits)
    region = parse_region(a.region, rot.dimension)
    S, flags = bohr_set(rot, region, parse_window(a.window), return_flags=True)
    if a.format == "json":
        return _envelope("bohr", {"rotation": rot.to_json(), "region": region.to_json(), "set": S.to_json(),
                                  "boundary_flagged": flags.tolist()})
    return write_setfile(S, fmt=a.set_format)


def cmd_rotavg(a) -> dict:
    rot = parse_rotation(a.rotation, a.precision_bits)
    f = parse_trig(a.f, rot.dimension)
    nu = measure_at(parse_family(a.family), a.j)
    z = [v for v in a.z.split(",")] if a.z else None
    val = rotation_average(f, rot, nu, z)
    return _envelope("rotavg", {"value": complex_real(val), "integral": complex_real(f.constant_term),
                                "j": a.j, "rotation": rot.to_json()})


def cmd_steinhaus(a) -> dict:
    G = fg.parse_group(a.group)
    f, g = fg.parse_function(a.f, G), fg.parse_function(a.g, G)
    return _envelope("steinhaus", fg.steinhaus_check(f, g).to_json())


def _basis(text: str | None):
    if text is None:
        return None
    if text.startswith("index<="):
        return int(text[7:])
    return [tuple(int(v) for v in m.split(",")) for m in text.split(";")]


def _project(a, G):
    if a.E:
        return fg.GroupSubset.from_residues(G, [tuple(int(v) for v in e.split(";")) for e in a.E.split(",")])
    return fg.project_set(a.set, G, a.scan_bound, a.k)


def cmd_converse(a):
    G = fg.parse_group(a.group)
    cert = fg.steinhaus_converse(_project(a, G), Fraction(a.eps), _basis(a.basis))
    return _envelope("converse", {"certificate": cert.to_json(), "replay": cert.replay()})


def cmd_blocker(a):
    rep = verify.verify_blocker(a.kind, a.group, Fraction(a.eps), parse_window(a.window), a.L_max, a.W, a.M,
                                Fraction(a.slack), a.k, a.family or (), a.family_j, _basis(a.basis),
                                a.seed, a.precision_bits)
    if a.set_out:
        G = fg.parse_group(a.group)
        B, _ = fg.build_blocker(a.kind, G, Fraction(a.eps), 0, parse_window(a.window), _basis(a.basis), k=a.k)
        write_atomic(a.set_out, write_setfile(B))
    return rep.to_json(), (0 if rep.passed else 2)


def cmd_experiment(a):
    if a.preset:
        if a.preset not in verify.PRESETS:
            raise ValueError(f"unknown preset {a.preset!r}; choose from {', '.join(verify.PRESETS)}")
        spec = verify.PRESETS[a.preset]
        spec = verify.ExperimentSpec(spec.name, spec.kind, dict(spec.params), a.seed, a.precision_bits,
                                     spec.thresholds)
    elif a.spec:
        with open(a.spec) as fh:
            spec = verify.ExperimentSpec.from_json(json.load(fh))
    else:
        raise UsageError("experiment: give --preset NAME or --spec FILE")
    rep = verify.run_experiment(spec)
    return rep.to_json(), (0 if rep.passed else 2)


def cmd_replay(a):
    with open(a.file) as fh:
        obj = json.load(fh)
    res = verify.replay(obj)
    return res.to_json(), (0 if res.ok else 2)


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sumsetlab", description=__doc__.splitlines()[0])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--precision-bits", type=int,
                   default=int(os.environ.get("SUMSETLAB_PRECISION_BITS", DEFAULT_PRECISION_BITS)))
    p.add_argument("--threads", type=int, default=1, help="thread budget (work is single-threaded numpy)")
    p.add_argument("--output", "-o", help="write output here atomically instead of stdout")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, fn, help_):
        s = sub.add_parser(name, help=help_)
        s.set_defaults(fn=fn)
        return s

    s = add("gen", cmd_gen, "enumerate an example set as a set file")
    s.add_argument("kind", choices=KINDS)
    s.add_argument("--window", required=True)
    s.add_argument("--k", type=int, default=2)
    s.add_argument("--digits", help="n_1,n_2,... for sparse_digit")
    s.add_argument("--set-format", choices=["auto", "list", "runs"], default="auto")

    s = add("density", cmd_density, "Banach / upper density estimates of a set file")
    s.add_argument("set", nargs="?", default="-")
    s.add_argument("--M", type=int)
    s.add_argument("--N", type=int)
    s.add_argument("--n-min", type=int, default=1)

    s = add("sumset", cmd_sumset, "A + B of two set files")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("--window")
    s.add_argument("--method", choices=["auto", "shift", "fft"], default="auto")
    s.add_argument("--set-format", choices=["auto", "list", "runs"], default="auto")

    s = add("scan", cmd_scan, "piecewise-syndetic scan at a stated scale")
    s.add_argument("set", nargs="?", default="-")
    s.add_argument("--L-max", type=int, required=True)
    s.add_argument("--W", type=int, required=True)
    s.add_argument("--syndetic", type=int, help="also test syndeticity at this gap scale")

    s = add("weyl", cmd_weyl, "|Weyl sum| on the grid 2 pi k / G")
    s.add_argument("--family", required=True)
    s.add_argument("--j", type=lambda v: int(Fraction(v)), required=True)
    s.add_argument("--theta-grid", type=int, default=1024)
    s.add_argument("--format", choices=["csv", "json"], default="csv")

    s = add("profile", cmd_profile, "max |Weyl sum| per j")
    s.add_argument("--family", required=True)
    s.add_argument("--j", default="1000,10000,100000", help="comma separated list")
    s.add_argument("--theta-grid", type=int, default=1024)
    s.add_argument("--format", choices=["csv", "json"], default="csv")

    s = add("bohr", cmd_bohr, "entry times of a torus rotation into a region")
    s.add_argument("--rotation", required=True)
    s.add_argument("--region", required=True)
    s.add_argument("--window", required=True)
    s.add_argument("--format", choices=["set", "json"], default="set")
    s.add_argument("--set-format", choices=["auto", "list", "runs"], default="auto")

    s = add("rotavg", cmd_rotavg, "average of a trigonometric polynomial along the orbit")
    s.add_argument("--rotation", required=True)
    s.add_argument("--f", required=True, help="e.g. '1:1' or '0:1/2;1:1/4'")
    s.add_argument("--family", default="interval")
    s.add_argument("--j", type=lambda v: int(Fraction(v)), required=True)
    s.add_argument("--z")

    s = add("steinhaus", cmd_steinhaus, "exact Steinhaus bounds for f * g")
    s.add_argument("--group", required=True)
    s.add_argument("--f", required=True)
    s.add_argument("--g", required=True)

    for name, fn, help_ in (("converse", cmd_converse, "greedy coset blocker certificate"),):
        s = add(name, fn, help_)
        s.add_argument("--group", required=True)
        s.add_argument("--set", default="squares", help="kind of integer set to project")
        s.add_argument("--E", help="explicit residues, e.g. '0,1,4' (';' inside product elements)")
        s.add_argument("--eps", required=True)
        s.add_argument("--basis", help="'index<=N' or subgroup moduli 'm1,m2;m1,m2'")
        s.add_argument("--scan-bound", type=int)
        s.add_argument("--k", type=int, default=2)

    s = add("blocker", cmd_blocker, "blocker pipeline: certificate, density, scan")
    s.add_argument("--kind", required=True, choices=KINDS)
    s.add_argument("--group", required=True)
    s.add_argument("--eps", required=True)
    s.add_argument("--window", default="0:1000000")
    s.add_argument("--L-max", type=int, default=24)
    s.add_argument("--W", type=int, default=200)
    s.add_argument("--M", type=int, default=10**4)
    s.add_argument("--slack", default="1/50")
    s.add_argument("--k", type=int, default=2)
    s.add_argument("--family", action="append", help="also check d_nu(B) along this family")
    s.add_argument("--family-j", type=int, default=10**4)
    s.add_argument("--basis")
    s.add_argument("--set-out", help="also write B as a set file")

    s = add("experiment", cmd_experiment, "run a preset or a JSON experiment spec")
    s.add_argument("--preset")
    s.add_argument("--spec")

    s = add("replay", cmd_replay, "re-verify a stored report or certificate")
    s.add_argument("file")
    return p


def run(argv: Sequence[str] | None = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
        if not getattr(a, "command", None):
            raise UsageError("sumsetlab: a subcommand is required")
        result = a.fn(a)
        code = 0
        if isinstance(result, tuple):
            result, code = result
        text = result if isinstance(result, str) else dumps(result) + "\n"
        if a.output:
            write_atomic(a.output, text)
        else:
            stdout.write(text)
        return code
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError, MemoryError, OverflowError, ArithmeticError, fg.BlockerError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
