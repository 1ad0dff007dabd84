"""Sweep the active-interval budget K and outer cap T over a random program corpus.

Prints one JSON line per (K, T) with IR-call totals, the worst ratio to the
2KT+1 bound, and how many runs still resolved every stable model exactly.
"""

import argparse
import json

from aftbound import asp, gen
from aftbound.bnb import BnbConfig, bnb_run
from aftbound.lattice import Interval


def sweep(corpus, models, k, t):
    calls = worst = resolved = 0
    for prog, ms in zip(corpus, models):
        u = prog.universe
        st = bnb_run(asp.gl_operator(prog), Interval(u.bottom, u.top), BnbConfig(budget=k, outer_cap=t))
        calls += st.ir_calls
        worst = max(worst, st.ir_calls / (2 * k * t + 1))
        exact = not st.bounds and all(b.is_singleton for b in st.final)
        resolved += exact and sorted(b.lo.bits for b in st.final) == [m.bits for m in ms]
    return {"K": k, "T": t, "ir_calls": calls, "worst_ratio": round(worst, 4), "resolved": resolved}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--count", type=int, default=200)
    ap.add_argument("--max-atoms", type=int, default=10)
    ap.add_argument("--budgets", type=int, nargs="+", default=[1, 2, 4, 8])
    ap.add_argument("--caps", type=int, nargs="+", default=[1, 4, 16])
    args = ap.parse_args()
    corpus = gen.program_corpus(args.seed, args.count, max_atoms=args.max_atoms)
    models = [asp.brute_force_stable_models(p) for p in corpus]
    for k in args.budgets:
        for t in args.caps:
            print(json.dumps(sweep(corpus, models, k, t)))


if __name__ == "__main__":
    main()
