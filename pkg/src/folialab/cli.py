"""Batch front end: ``python -m folialab <subcommand> ...``.

Representations are given either as a path to a representation JSON file or
as a builtin name:

    builtin:bolza
    builtin:trivial
    builtin:rotation:a1,b1,a2,b2          rotation angles in radians
    builtin:twist:bolza,k                 b1 -> b1 a1^k applied to a builtin base
    builtin:free_quotient:l1,l2[,phi]     translations of lengths l1, l2 whose
                                          axes cross at i with angle phi
                                          (default pi/2)

Exit status is 0 on success, 1 on a validation error and 2 when a numerical
guard of an inner module trips.  JSON output is deterministic for a given
configuration and seed.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .fuchsian_pair import theorem_e_check
from .geoflow import ReductionError, frame_at, triple_coords
from .length_spectrum import HARD_MAX_LEN, domination_report, enumerate_classes, marked_length
from .moebius import MoebiusElement, hyperbolic_translation, rotation
from .skewflow import (
    MAX_DT,
    ContractionError,
    FiberChart,
    attracting_section,
    detect_invariant_measure,
    srb_histogram,
    transverse_exponent,
)
from .surface_rep import (
    Representation,
    bolza,
    euler_number,
    format_word,
    free_quotient_rep,
    rotation_rep,
    trivial_rep,
    twist,
)

WORKERS_ENV = "FOLIALAB_WORKERS"

# numerical guards, reported with exit status 2
GUARDS = (ReductionError, ContractionError, OverflowError, FloatingPointError, ZeroDivisionError)


class ValidationError(ValueError):
    pass


def free_quotient_pair(l1: float, l2: float, phi: float = math.pi / 2) -> tuple[MoebiusElement, MoebiusElement]:
    g1 = hyperbolic_translation(l1)
    r = rotation(-phi / 2)  # turns directions at i by phi
    return g1, r @ hyperbolic_translation(l2) @ r.inverse()


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x]
    except ValueError:
        raise ValidationError(f"bad number list {text!r}") from None


def load_rep(spec: str) -> Representation:
    """Resolve a builtin name or read a representation JSON file."""
    if not spec.startswith("builtin:"):
        try:
            with open(spec, encoding="utf-8") as fh:
                return Representation.from_json(fh.read())
        except OSError as exc:
            raise ValidationError(f"cannot read {spec}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{spec} is not JSON: {exc}") from None
    name, _, arg = spec[len("builtin:"):].partition(":")
    if name == "bolza" and not arg:
        return bolza()
    if name == "trivial":
        return trivial_rep(int(arg) if arg else 2)
    if name == "rotation":
        angles = _floats(arg)
        if len(angles) % 2 or len(angles) < 4:
            raise ValidationError("rotation needs 2*genus angles")
        return rotation_rep(len(angles) // 2, angles)
    if name == "twist":
        base, _, k = arg.rpartition(",")
        try:
            k = int(k)
        except ValueError:
            raise ValidationError(f"bad twist count in {spec!r}") from None
        rep = twist(load_rep("builtin:" + base), k)
        return rep
    if name == "free_quotient":
        vals = _floats(arg)
        if len(vals) not in (2, 3):
            raise ValidationError("free_quotient needs l1,l2[,phi]")
        rep = free_quotient_rep(*free_quotient_pair(*vals))
        return Representation(rep.genus, rep.gens, f"free_quotient:{arg}")
    raise ValidationError(f"unknown builtin {spec!r}")


def provenance(args: argparse.Namespace) -> dict:
    config = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out")}
    return {"config": config,
            "versions": {"folialab": __version__, "numpy": np.__version__}}


def _check(cond: bool, message: str) -> None:
    if not cond:
        raise ValidationError(message)


def _range_checks(args: argparse.Namespace) -> None:
    if getattr(args, "max_len", None) is not None:
        _check(1 <= args.max_len <= HARD_MAX_LEN, f"--max-len must lie in [1, {HARD_MAX_LEN}]")
    if getattr(args, "T", None) is not None:
        _check(args.T >= 100, "--T must be at least 100")
    if getattr(args, "dt", None) is not None:
        _check(0 < args.dt <= MAX_DT, f"--dt must lie in (0, {MAX_DT}]")
    if getattr(args, "bins", None) is not None:
        _check(args.bins >= 1, "--bins must be positive")
    if getattr(args, "n_orbits", None) is not None:
        _check(args.n_orbits >= 2, "--n-orbits must be at least 2")
    _check(args.seed >= 0, "--seed must be non-negative")


# --- subcommands ---------------------------------------------------------
# each returns (document, csv_rows or None)

def cmd_spectrum(args):
    rep = load_rep(args.rep)
    census = enumerate_classes(rep.genus, args.max_len)
    rows = [["class", "word_length", "length"]]
    lengths = []
    for w in census:
        lengths.append(marked_length(rep, w))
        rows.append([format_word(w), len(w), repr(lengths[-1])])
    doc = {"label": rep.label, "census_size": len(census),
           "classes": [{"class": r[0], "word_length": r[1], "length": x}
                       for r, x in zip(rows[1:], lengths)]}
    return doc, rows


def cmd_dominate(args):
    rho, hol = load_rep(args.rho), load_rep(args.hol)
    report = domination_report(rho, hol, args.max_len)
    rows = list(csv.reader(io.StringIO(report.to_csv())))
    return report.to_dict(), rows


def cmd_euler(args):
    rep = load_rep(args.rep)
    e = euler_number(rep)
    return {"euler": e, "label": rep.label}, [["euler"], [e]]


def _exponent_one(rho, hol, args, seed):
    return transverse_exponent(rho, hol, args.T, seed, dt=args.dt,
                               record_every=args.record_every)


def cmd_exponent(args):
    rho, hol = load_rep(args.rho), load_rep(args.hol)
    seeds = [args.seed + i for i in range(args.replicas)]
    workers = int(os.environ.get(WORKERS_ENV, "1") or 1)
    if workers > 1 and len(seeds) > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(lambda s: _exponent_one(rho, hol, args, s), seeds))
    else:
        results = [_exponent_one(rho, hol, args, s) for s in seeds]
    doc = {"estimates": [r.to_dict() for r in results]}
    rows = [["seed", "t", "running_mean", "batch_id"]]
    for r in results:
        for t, m, b in r.series:
            rows.append([r.seed, repr(t), repr(m), b])
    return doc, rows


def cmd_srb(args):
    rho, hol = load_rep(args.rho), load_rep(args.hol)
    m = srb_histogram(rho, hol, args.T, args.n_orbits, args.bins, args.seed,
                      base_cells=args.base_cells, dt=args.dt, chart=args.chart)
    rows = [["base_cell", "fiber_bin", "count"]]
    for c in range(m.counts.shape[0]):
        for k in range(m.counts.shape[1]):
            rows.append([c, k, int(m.counts[c, k])])
    return m.to_dict(), rows


def cmd_sections(args):
    rho, hol = load_rep(args.rho), load_rep(args.hol)
    rows = [["re_z", "im_z", "direction", "section", "canonical"]]
    table = []
    n = args.grid
    for i in range(n):
        # basepoints on a small circle about i, directions spread around
        phi = 2 * math.pi * i / n
        r = 0.5 * math.tanh(0.5)
        w = r * complex(math.cos(phi), math.sin(phi))
        z = 1j * (1 + w) / (1 - w)
        for j in range(n):
            direction = 2 * math.pi * j / n
            f = frame_at(z, direction)
            s = attracting_section(rho, hol, f, args.T_back)
            entry = {"re_z": z.real, "im_z": z.imag, "direction": direction,
                     "section": s, "canonical": triple_coords(f).xi_plus}
            table.append(entry)
            rows.append([repr(entry[k]) for k in rows[0]])
    return {"frames": table, "T_back": args.T_back}, rows


def cmd_pair(args):
    rho, hol = load_rep(args.rho), load_rep(args.hol)
    _check(args.T >= 1e4, "--T must be at least 10000 for pair")
    report = theorem_e_check(rho, hol, args.T, args.max_len, args.seed)
    rows = [["lambda_hat", "stderr", "chi_hat", "spread", "discrepancy", "pass"],
            [repr(report[k]) for k in ("lambda_hat", "stderr", "chi_hat", "spread", "discrepancy")]
            + [report["pass"]]]
    return report, rows


def cmd_detect(args):
    hol = load_rep(args.hol)
    w = detect_invariant_measure(hol)
    return w.to_dict(), [["witness"], [w.kind.value]]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="folialab", description="Suspension-foliation experiments.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="subcommand", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=func)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--out", default="-", help="output path, '-' for stdout")
        sp.add_argument("--no-meta", action="store_true",
                        help="omit the timestamp line of CSV output")
        return sp

    sp = add("spectrum", cmd_spectrum, "census and marked lengths")
    sp.add_argument("--rep", required=True)
    sp.add_argument("--max-len", type=int, default=4)

    sp = add("dominate", cmd_dominate, "domination report")
    sp.add_argument("--rho", required=True)
    sp.add_argument("--hol", required=True)
    sp.add_argument("--max-len", type=int, default=6)

    sp = add("euler", cmd_euler, "Euler number")
    sp.add_argument("--rep", required=True)

    sp = add("exponent", cmd_exponent, "transverse Lyapunov exponent")
    sp.add_argument("--rho", required=True)
    sp.add_argument("--hol", required=True)
    sp.add_argument("--T", type=float, default=1e4)
    sp.add_argument("--dt", type=float, default=MAX_DT)
    sp.add_argument("--replicas", type=int, default=1, help="seeds seed, seed+1, ...")
    sp.add_argument("--record-every", type=float, default=0.0)

    sp = add("srb", cmd_srb, "empirical SRB histogram")
    sp.add_argument("--rho", required=True)
    sp.add_argument("--hol", required=True)
    sp.add_argument("--T", type=float, default=1e4)
    sp.add_argument("--dt", type=float, default=MAX_DT)
    sp.add_argument("--n-orbits", type=int, default=8)
    sp.add_argument("--bins", type=int, default=16)
    sp.add_argument("--base-cells", type=int, default=4)
    sp.add_argument("--chart", choices=[c.value for c in FiberChart], default="absolute")

    sp = add("sections", cmd_sections, "attracting sections over a frame grid")
    sp.add_argument("--rho", required=True)
    sp.add_argument("--hol", required=True)
    sp.add_argument("--grid", type=int, default=4)
    sp.add_argument("--T-back", type=float, default=40.0)

    sp = add("pair", cmd_pair, "transverse exponent versus minus chi")
    sp.add_argument("--rho", required=True)
    sp.add_argument("--hol", required=True)
    sp.add_argument("--T", type=float, default=1e4)
    sp.add_argument("--max-len", type=int, default=6)

    sp = add("detect", cmd_detect, "invariant-measure witness for the holonomy")
    sp.add_argument("--hol", required=True)
    return p


def _render(args, doc, rows) -> str:
    if args.format == "json":
        doc = dict(doc)
        doc["provenance_cli"] = provenance(args)
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    if not args.no_meta:
        stamp = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
        buf.write(f"# generated {stamp}\n")
    buf.write("# provenance " + json.dumps(provenance(args), sort_keys=True) + "\n")
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        _range_checks(args)
        doc, rows = args.func(args)
        text = _render(args, doc, rows)
    except GUARDS as exc:
        print(f"folialab {args.subcommand}: numerical guard ({type(exc).__name__}): {exc}",
              file=sys.stderr)
        return 2
    except (ValueError, IndexError) as exc:
        print(f"folialab {args.subcommand}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
