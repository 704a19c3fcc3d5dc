"""Violation measure of the robot pair as the second robot's acceleration rate varies.

With a1 = -1 + t and a2 = -1 + r*t both robots are in the bad region
a1 <= 0 & a2 >= 0 on [1/r, 1], so the measure should be 1 - 1/r for r >= 1
and 0 otherwise.  Pass --numeric to also run the sampled estimate.
"""

import argparse
from fractions import Fraction

from pdtl import parse_state_formula
from pdtl.sim import EnumConfig, State, eval_box_tae

RATES = ["1/2", "1", "5/4", "3/2", "2", "3", "4", "8"]


def measure(rate: Fraction, cfg: EnumConfig):
    f = parse_state_formula(f"[a1 := -1; a2 := -1; {{a1' = 1, a2' = {rate}}}] tae: !(a1 <= 0 & a2 >= 0)")
    verdict = eval_box_tae(f.prog, State(a1=0, a2=0), f.post.body, cfg)
    reports = [r for _, v in verdict.traces for _, r in v.reports]
    return max(reports, key=lambda r: r.measure)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rates", default=",".join(RATES))
    ap.add_argument("--numeric", action="store_true", help="also estimate by sampling")
    args = ap.parse_args()
    durations = (Fraction(0), Fraction(1, 2), Fraction(1), Fraction(2))
    exact = EnumConfig(durations=durations)
    sampled = EnumConfig(durations=durations, symbolic=False, mc_samples=20_000)
    print(f"{'rate':>6} {'expected':>9} {'measure':>9}  witness" + ("   sampled" if args.numeric else ""))
    for text in args.rates.split(","):
        r = Fraction(text)
        expected = max(Fraction(0), 1 - 1 / r)
        rep = measure(r, exact)
        w = " ".join(f"[{i.lo}, {i.hi}]" for i in rep.witnesses) or "-"
        line = f"{str(r):>6} {str(expected):>9} {str(rep.measure):>9}  {w}"
        if args.numeric:
            line += f"   {float(measure(r, sampled).measure):.4f}"
        print(line)


if __name__ == "__main__":
    main()
