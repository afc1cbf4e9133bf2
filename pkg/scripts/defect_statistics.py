"""Defect sets at the right endpoint: density, gap statistics, substitution and S/L diagnostics.

    python3 scripts/defect_statistics.py --cap 1000000
"""
import argparse
import math

from almost_golomb.defect import (coarsen_SL, compute_defects, gap_frequencies, gap_word, substitution_check,
                                  transition_report)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--cap", type=int, default=10**6)
    ap.add_argument("--max-factor-len", type=int, default=20)
    args = ap.parse_args()

    ds = compute_defects(2, args.cap)
    gw = gap_word(ds)
    fr = gap_frequencies(gw)
    print(f"r=2: {len(ds)} defects, density {ds.density():.6f} (target {(math.sqrt(2) - 1) / 2:.6f})")
    for k, v in fr["frequencies"].items():
        print(f"  f_{k} = {v:.6f} (target {fr['targets'][k]:.6f})")
    print(f"  mean gap {fr['mean_gap']:.6f} (target {fr['mean_target']:.6f})")
    rep = substitution_check(gw, args.max_factor_len)
    print(f"  {rep.summary()}; distinct factors of length {args.max_factor_len}: "
          f"{rep.counters['distinct_factors_L']}")
    _, sl = coarsen_SL(gw)
    print(f"  S/L: freq_S {float(sl['freq_S']):.6f} (target {sl['target_S']:.6f}), "
          f"balanced up to 30: {sl['balanced']}")
    worst = {k: v for k, v in sl["balance"].items() if v > 1}
    if worst:
        print(f"  S/L imbalance by window length: {dict(list(worst.items())[:8])}")

    d3 = compute_defects(3, args.cap)
    g3 = gap_word(d3)
    print(f"r=3: {len(d3)} defects, density {d3.density():.6f} (target {(2 - math.sqrt(3)) / 3:.6f})")
    tr = transition_report(g3)
    print(f"  letters {tr['letters']}; pairs {tr['pairs']}")


if __name__ == "__main__":
    main()
