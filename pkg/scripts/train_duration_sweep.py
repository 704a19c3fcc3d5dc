"""How the bounded train simulation scales with the loop bound and the duration grid."""

import argparse
import time
from fractions import Fraction

from pdtl.models import corpus_model
from pdtl.sim import EnumConfig, State, eval_box_tae

GRIDS = {
    "coarse": "0,1,10",
    "default": None,
    "fine": "0,1/4,1/2,1,2,5,10,50,100",
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-unroll", type=int, default=4)
    args = ap.parse_args()
    model = corpus_model("train")
    _, prog, post = model.parts
    start = State(model.initial_values())
    print(f"{'grid':>8} {'N':>2} {'traces':>7} {'verdict':>8} {'seconds':>8}")
    for label, grid in GRIDS.items():
        extra = {} if grid is None else {"durations": tuple(Fraction(d) for d in grid.split(","))}
        for n in range(args.max_unroll + 1):
            cfg = EnumConfig(unroll=n, **extra)
            t0 = time.perf_counter()
            verdict = eval_box_tae(prog, start, post, cfg)
            dt = time.perf_counter() - t0
            print(f"{label:>8} {n:>2} {len(verdict.traces):>7} {verdict.status:>8} {dt:>8.3f}")


if __name__ == "__main__":
    main()
