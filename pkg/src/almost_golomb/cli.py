"""Command-line front end.  Exit codes: 0 pass, 1 verification failure, 2 usage error, 3 internal error."""
from __future__ import annotations

import argparse
import logging
import math
import sys
from contextlib import contextmanager
from fractions import Fraction

from . import defect, golomb, nested, oeis, ostrowski, sawtooth
from .beatty import BeattyParams
from .errors import ConstructionError, InternalConsistencyError, OstrowskiError, UsageError
from .qfield import QuadExpr, parse_quad

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


@contextmanager
def _output(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _shift(text: str | None, r: int) -> QuadExpr:
    if text is None:
        return BeattyParams.canonical(r).d
    return parse_quad(text, radicand=r)


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a rational number: {text!r}") from None


def _status(ok: bool) -> str:
    return "pass" if ok else "FAIL"


def cmd_greedy(args) -> int:
    prefix = golomb.greedy(args.r, args.count)
    with _output(args.out) as fh:
        fh.write(", ".join(map(str, prefix)) + "\n")
    ok = True
    rep = golomb.verify_strong_prefix(prefix, args.r)
    print(f"strong identity (self-check): {_status(rep.passed)} ({rep.checked} checked)")
    ok &= rep.passed
    if args.check_dyadic:
        if args.r != 2:
            raise UsageError("dyadic recurrences apply to r = 2")
        rep = golomb.dyadic_check(prefix)
        print(f"dyadic: {_status(rep.passed)}" + ("" if rep.passed else f" {rep.witness}"))
        ok &= rep.passed
    return EXIT_PASS if ok else EXIT_FAIL


def _expected_offset(r: int) -> int:
    s = math.isqrt(r)
    return 1 if s * s == r and s % 2 == 0 else 0


def cmd_verify_strong(args) -> int:
    params = BeattyParams(args.r, _shift(args.d, args.r))
    offset = _expected_offset(args.r) if args.offset is None else args.offset
    rep = golomb.verify_strong(params, args.r, args.r, args.nmax, expected_offset=offset)
    print(f"verify-strong r={args.r} d={params.d} n<={args.nmax}: {_status(rep.passed)}, offset {offset}")
    if not rep.passed:
        print(f"witness: {rep.witness}")
    return EXIT_PASS if rep.passed else EXIT_FAIL


def cmd_verify_nested(args) -> int:
    ctx = nested.NestedContext.for_shift(args.r, _shift(args.d, args.r))
    inside = ctx.in_interval()
    rep = nested.verify_nested(ctx, args.r, args.nmax, threads=args.threads)
    where = "" if inside is None else (" (inside proven interval)" if inside else " (outside proven interval)")
    print(f"verify-nested r={args.r} d={ctx.params.d}{where} n<={args.nmax}: {_status(rep.passed)}")
    print(f"m(n) counts: {rep.counters['m_counts']}")
    if rep.passed:
        return EXIT_PASS
    n = rep.witness["n"]
    side, in_window = nested.predicted_window(ctx, n)
    print("witness: " + ", ".join(f"{k}={v}" for k, v in rep.witness.items()))
    if side is not None:
        print(f"predicted {side} failure window: {'contains' if in_window else 'MISSES'} n={n}")
    return EXIT_FAIL


def cmd_table1(args) -> int:
    profiles = sawtooth.table1(args.rmax)
    with _output(args.out) as fh:
        sawtooth.write_table1_csv(profiles, fh)
    ok = True
    for p in profiles:
        ok &= sawtooth.parity_identities(p.r).passed and sawtooth.profile_invariants(p).passed
    if args.out not in (None, "-"):
        print(f"table1: {len(profiles)} rows, margin > 0 in all: {all(p.margin > 0 for p in profiles)}")
    return EXIT_PASS if ok else EXIT_FAIL


def cmd_defect(args) -> int:
    ds = defect.compute_defects(args.r, args.cap)
    el = ds.elements.tolist()
    shown = el if len(el) <= 40 else el[:40] + ["..."]
    print(f"defects r={args.r} n<={args.cap}: {len(el)} elements, density {ds.density():.6f}")
    print(", ".join(map(str, shown)))
    ok = True
    gw = None
    if args.gaps or args.check_substitution:
        gw = defect.gap_word(ds)
        print("gap counts: " + ", ".join(f"{k}:{v}" for k, v in gw.counts.items()))
        if len(gw.letters) >= 100:
            fr = defect.gap_frequencies(gw)
            print("gap frequencies: " + ", ".join(f"{k}:{v:.6f}" for k, v in fr["frequencies"].items())
                  + f"; mean gap {fr['mean_gap']:.6f}")
    if args.check_substitution:
        rep = defect.substitution_check(gw, args.max_factor_len)
        word = "consistent" if rep.passed else "INCONSISTENT"
        print(f"substitution: {word} (L={args.max_factor_len})")
        if not rep.passed:
            print(f"details: {rep.witness}")
        ok &= rep.passed
    if args.out:
        with _output(args.out) as fh:
            if args.format == "bfile":
                defect.export_bfiles(ds, fh)
            else:
                fh.write("n\n" + "".join(f"{n}\n" for n in el))
    return EXIT_PASS if ok else EXIT_FAIL


def cmd_ostrowski(args) -> int:
    if args.convention == "auto":
        conv, rep = ostrowski.choose_convention(args.nmax)
    else:
        conv, rep = args.convention, ostrowski.digit_swap_check(args.nmax, args.convention)
    matched = rep.counters["matched"]
    print(f"digit-swap: {matched}/{args.nmax} under convention {conv if conv != 'none' else rep.counters['convention']}")
    if not rep.passed:
        print(f"first mismatches (n, sum e_k p_k, a(n)): {rep.counters['mismatches'][:5]}")
    if args.out:
        with _output(args.out) as fh:
            ostrowski.write_swap_csv(args.nmax, fh, conv if conv != "none" else "standard")
    return EXIT_PASS if rep.passed else EXIT_FAIL


def cmd_scan(args) -> int:
    grid = nested.rational_grid(args.r, _fraction(args.lo), _fraction(args.hi), _fraction(args.step))
    res = nested.scan_interval(args.r, grid, args.cap, threads=args.threads)
    if args.out:
        with _output(args.out) as fh:
            nested.write_scan_csv(res, fh)
    b = res.boundaries()
    if b.get("first_pass") is None:
        print(f"scan r={args.r}: no passing shift in grid")
        return EXIT_FAIL
    fmt = lambda x: "-" if x is None else f"{x} ({float(x):.4f})"
    print(f"scan r={args.r} cap={args.cap}: passing shifts {fmt(b['first_pass'])} .. {fmt(b['last_pass'])}")
    print(f"last failing below: {fmt(b['last_fail_below'])}; first failing above: {fmt(b['first_fail_above'])}")
    print(f"contiguous: {b['contiguous']}")
    return EXIT_PASS


def cmd_oeis(args) -> int:
    rep = oeis.check_against(args.id, args.against, network=args.fetch)
    if rep.passed:
        print(f"{args.id} vs {rep.counters['generator']}: match (offset {rep.counters['offset']}, "
              f"{rep.checked} terms, source {rep.counters['source']})")
        return EXIT_PASS
    print(f"{args.id}: mismatch {rep.witness}")
    return EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="almost-golomb", description=__doc__)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("greedy")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--check-dyadic", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_greedy)

    p = sub.add_parser("verify-strong")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--d", help='shift, e.g. "0/1+1/2*sqrt(2)"; default sqrt(r)/2')
    p.add_argument("--offset", type=int, choices=(0, 1))
    p.set_defaults(func=cmd_verify_strong)

    p = sub.add_parser("verify-nested")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--d")
    p.add_argument("--nmax", type=int, default=100_000)
    p.add_argument("--witness-cap", type=int, help="alias for --nmax when hunting failures")
    p.set_defaults(func=cmd_verify_nested)

    p = sub.add_parser("table1")
    p.add_argument("--rmax", type=int, default=8)
    p.add_argument("--out")
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("defect")
    p.add_argument("--r", type=int, choices=(2, 3), required=True)
    p.add_argument("--cap", type=int, required=True)
    p.add_argument("--gaps", action="store_true")
    p.add_argument("--check-substitution", action="store_true")
    p.add_argument("--max-factor-len", type=int, default=20)
    p.add_argument("--out")
    p.add_argument("--format", choices=("bfile", "csv"), default="bfile")
    p.set_defaults(func=cmd_defect)

    p = sub.add_parser("ostrowski")
    p.add_argument("--nmax", type=int, default=10_000)
    p.add_argument("--convention", choices=("auto",) + ostrowski.CONVENTIONS, default="auto")
    p.add_argument("--out")
    p.set_defaults(func=cmd_ostrowski)

    p = sub.add_parser("scan")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--lo", required=True)
    p.add_argument("--hi", required=True)
    p.add_argument("--step", required=True)
    p.add_argument("--cap", type=int, default=10_000)
    p.add_argument("--out")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("oeis")
    p.add_argument("--id", required=True)
    p.add_argument("--against", choices=sorted(oeis.GENERATORS))
    p.add_argument("--fetch", action="store_true", help="allow network access")
    p.set_defaults(func=cmd_oeis)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_PASS
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    if getattr(args, "witness_cap", None):
        args.nmax = args.witness_cap
    try:
        return args.func(args)
    except (UsageError, OstrowskiError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConstructionError as exc:
        print(f"construction failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except InternalConsistencyError as exc:
        print(f"internal consistency error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
