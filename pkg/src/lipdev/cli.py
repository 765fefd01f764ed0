"""Command-line entry point: ``lipdev {compute,compare,profile,verify}``.

Exit codes: 0 ok, 2 configuration error, 3 enumeration cap exceeded,
4 verification failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import cube, gaussian, oracle, sphere, verify
from .space import (
    CapExceededError,
    FiniteSpace,
    SpaceError,
    as_fraction,
    cube_space,
    cycle_space,
    diamond,
    hamming_power,
    load_space,
    path_space,
    two_point,
)

COLUMNS = ["space", "n", "x", "D_exact", "D_decimal", "witness", "mcdiarmid", "gauss_tail"]
EXIT_CONFIG, EXIT_CAP, EXIT_VERIFY = 2, 3, 4


class ConfigError(ValueError):
    pass


@dataclass
class Target:
    """A resolved space selector."""

    selector: str
    kind: str  # cube | gauss | sphere | finite
    n: Optional[int] = None
    space: Optional[FiniteSpace] = None
    mcdiarmid_n: Optional[int] = None  # product dimension when the bounded-differences bound applies


_POWER = re.compile(r"^power:([a-z]+)(\d*)\^(\d+)(?::(count|sum))?$")


def base_space(name: str, size: str) -> FiniteSpace:
    if name == "two" and not size:
        return two_point()
    if name == "diamond" and not size:
        return diamond()
    if name in ("cycle", "path") and size:
        k = int(size)
        if k < 2:
            raise ConfigError(f"{name} base needs at least 2 points")
        return cycle_space(k) if name == "cycle" else path_space(k)
    raise ConfigError(f"unknown power base {name + size!r} (use two, diamond, cycleK, pathK)")


def resolve(selector: str, n: Optional[int], power_cap: int) -> Target:
    if selector == "gauss":
        return Target(selector, "gauss")
    if selector in ("cube", "sphere", "cycle"):
        if n is None:
            raise ConfigError(f"--space {selector} needs -n")
        if selector == "cube":
            if not 1 <= n <= cube.MAX_N:
                raise ConfigError(f"cube dimension must lie in 1..{cube.MAX_N}")
            return Target(selector, "cube", n=n, mcdiarmid_n=n)
        if selector == "sphere":
            if n < 2:
                raise ConfigError("sphere needs n >= 2 (ambient dimension)")
            return Target(selector, "sphere", n=n)
        if n < 2:
            raise ConfigError("cycle needs at least 2 points")
        return Target(selector, "finite", n=n, space=cycle_space(n))
    if selector.startswith("file:"):
        try:
            space = load_space(selector[5:])
        except OSError as exc:
            raise ConfigError(f"cannot read {selector[5:]}: {exc.strerror}") from None
        return Target(selector, "finite", space=space)
    m = _POWER.match(selector)
    if m:
        name, size, k, mode = m.group(1), m.group(2), int(m.group(3)), m.group(4) or "count"
        space = hamming_power(base_space(name, size), k, mode, cap=power_cap)
        return Target(selector, "finite", n=k, space=space, mcdiarmid_n=k if mode == "count" else None)
    raise ConfigError(f"unknown space selector {selector!r}")


def parse_xs(args) -> list[Fraction]:
    xs: list[Fraction] = []
    if args.x:
        for part in args.x.split(","):
            xs.append(as_fraction(part, "x"))
    if args.xrange:
        pieces = args.xrange.split(":")
        if len(pieces) != 3:
            raise ConfigError("--xrange must be START:STOP:STEP")
        start, stop, step = (as_fraction(p, "--xrange") for p in pieces)
        if step <= 0:
            raise ConfigError("--xrange step must be positive")
        v = start
        while v <= stop:
            xs.append(v)
            v += step
    if not xs:
        raise ConfigError("give deviation levels with -x or --xrange")
    return xs


def _qs(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def _dec(v) -> str:
    return f"{float(v):.12g}"


def compute_row(target: Target, x: Fraction, cap: int, workers: int, tol: float) -> dict:
    row = dict.fromkeys(COLUMNS, "")
    row["space"] = target.selector
    row["n"] = "" if target.n is None else str(target.n)
    if target.kind == "gauss":
        w = gaussian.D_gauss(float(x), tol)
        row.update(x=_dec(x), D_decimal=_dec(w.value), witness=w.describe(), gauss_tail=_dec(gaussian.gauss_tail_bound(x)))
        return row
    if target.kind == "sphere":
        w = sphere.D_sphere(target.n, float(x), tol)
        row.update(x=_dec(x), D_decimal=_dec(w.value), witness=w.describe())
        return row
    if target.kind == "cube":
        w = cube.D_cube(target.n, x)
        desc = w.describe()
    else:
        w = oracle.exact_deviation_sup(target.space, x, cap=cap, workers=workers)
        desc = w.describe(target.space)
    row.update(x=_qs(x), D_exact=_qs(w.value), D_decimal=_dec(w.value), witness=desc)
    if target.mcdiarmid_n is not None:
        row["mcdiarmid"] = _dec(cube.mcdiarmid_bound(target.mcdiarmid_n, x))
    return row


def emit(rows: list[dict], columns: list[str], fmt: str, out) -> None:
    if fmt == "json":
        json.dump(rows, out, indent=1)
        out.write("\n")
    elif fmt == "md":
        out.write("| " + " | ".join(columns) + " |\n")
        out.write("|" + "---|" * len(columns) + "\n")
        for r in rows:
            out.write("| " + " | ".join(str(r[c]) for c in columns) + " |\n")
    else:
        writer = csv.DictWriter(out, columns, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)


def cmd_compute(args, out) -> int:
    target = resolve(args.space, args.n, args.power_cap)
    rows = [compute_row(target, x, args.cap, args.workers, args.tol) for x in parse_xs(args)]
    emit(rows, COLUMNS, args.format, out)
    return 0


def cmd_compare(args, out) -> int:
    target = resolve(args.space, args.n, args.power_cap)
    rows = []
    for x in parse_xs(args):
        row = compute_row(target, x, args.cap, args.workers, args.tol)
        bound = row["mcdiarmid"] or row["gauss_tail"]
        if bound:
            row["ratio"] = _dec(float(row["D_decimal"]) / float(bound))
            if row["D_exact"]:
                ok = Fraction(row["D_exact"]) <= float(bound)
            else:
                ok = float(row["D_decimal"]) <= float(bound) + 1e-12
            row["bound_ok"] = "yes" if ok else "no"
        else:
            row["ratio"] = row["bound_ok"] = ""
        rows.append(row)
    emit(rows, COLUMNS + ["ratio", "bound_ok"], args.format, out)
    return 0


def cmd_profile(args, out) -> int:
    target = resolve(args.space, args.n, args.power_cap)
    if target.kind in ("gauss", "sphere"):
        raise ConfigError("profile needs a finite space (cube, cycle, file:, power:)")
    space = target.space
    if target.kind == "cube":
        if (1 << target.n) > args.cap:
            raise CapExceededError(f"C_{target.n} has {1 << target.n} points; enumeration cap is {args.cap}")
        space = cube_space(target.n)
    prof = oracle.iso_profile(space, cap=args.cap, workers=args.workers)
    emit(list(prof.rows()), ["k", "h", "min_measure", "witness_bits", "t"], args.format, out)
    return 0


def cmd_verify(args, out) -> int:
    results = verify.run_all(trials=args.trials, seed=args.seed, workers=args.workers)
    if args.space:
        target = resolve(args.space, args.n, args.power_cap)
        if target.space is None:
            raise ConfigError("verify --space takes a finite space selector")
        results.append(verify.isoperimetric_report(args.space, target.space, args.cap))
    if args.format == "json":
        json.dump(
            [{"check": r.name, "status": r.status, "detail": r.detail, "counterexample": r.counterexample} for r in results],
            out, indent=1,
        )
        out.write("\n")
    else:
        for r in results:
            out.write(f"{r.status}  {r.name}: {r.detail}\n")
            if r.counterexample is not None:
                out.write("      " + json.dumps(r.counterexample, sort_keys=True) + "\n")
        failed = sum(r.passed is False for r in results)
        out.write(f"{len(results) - failed}/{len(results)} checks without failure\n")
    return EXIT_VERIFY if any(r.passed is False for r in results) else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lipdev", description="Exact extremal deviation D(x) for 1-Lipschitz functions.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, need_x: bool, need_space: bool = True, formats=("csv", "md", "json")):
        p.add_argument("--space", required=need_space, help="cube | gauss | sphere | cycle | file:PATH | power:BASE^k[:count|sum]")
        p.add_argument("-n", type=int, help="cube dimension, sphere ambient dimension, or cycle size")
        if need_x:
            p.add_argument("-x", help="comma-separated deviation levels (p/q or decimals)")
            p.add_argument("--xrange", help="inclusive START:STOP:STEP")
        p.add_argument("--format", choices=formats, default=formats[0])
        p.add_argument("--cap", type=int, default=oracle.DEFAULT_CAP, help="enumeration cap in points (default %(default)s)")
        p.add_argument("--power-cap", type=int, default=256, help="point cap for power:... spaces")
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--tol", type=float, default=gaussian.DEFAULT_TOL, help="root-finding tolerance (continuous spaces)")

    common(sub.add_parser("compute", help="D(x) for a list of x"), need_x=True)
    common(sub.add_parser("compare", help="D(x) against classical concentration bounds"), need_x=True)
    common(sub.add_parser("profile", help="brute-force isoperimetric profile"), need_x=False)
    v = sub.add_parser("verify", help="run the cross-check suite")
    common(v, need_x=False, need_space=False, formats=("text", "json"))
    v.add_argument("--trials", type=int, default=10_000, help="random Lipschitz functions per (space, x)")
    v.add_argument("--seed", type=int, default=0)
    return parser


COMMANDS = {"compute": cmd_compute, "compare": cmd_compare, "profile": cmd_profile, "verify": cmd_verify}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    buf = io.StringIO()
    try:
        code = COMMANDS[args.command](args, buf)
    except CapExceededError as exc:
        print(f"lipdev: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (ConfigError, SpaceError, ValueError) as exc:
        print(f"lipdev: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out.write(buf.getvalue())
    return code


if __name__ == "__main__":
    sys.exit(main())
