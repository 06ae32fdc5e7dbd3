"""Search every marked state on random strongly coupled instances and report
success rate, matching statistics and wall time.

    python scripts/random_sweep.py --spins 4 --count 50 --seed 0
"""

import argparse
import time
from collections import Counter

from liouville_search.instances import random_labeled_instances
from liouville_search.search import OracleSpec, run_search


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--spins", type=int, default=4)
    ap.add_argument("--count", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threshold", type=float, default=0.01)
    args = ap.parse_args()

    start = time.perf_counter()
    instances = random_labeled_instances(args.spins, args.count, seed=args.seed, threshold=args.threshold)
    built = time.perf_counter() - start
    n = args.spins - 1
    ok = total = 0
    gaps = Counter()
    lines = Counter()
    for inst in instances:
        lines[len(inst.table.observed())] += 1
        for w in range(2**n):
            m = format(w, f"0{n}b")
            res = run_search(inst, OracleSpec(m))
            ok += res.bits == m
            total += 1
            gaps.update(abs(p - q) for p, q in res.counts)
    elapsed = time.perf_counter() - start
    print(f"{len(instances)} instances with {args.spins} spins (built in {built:.2f} s)")
    print(f"observed-line counts: {dict(sorted(lines.items()))}")
    print(f"recovered {ok}/{total} marked states; |pos - neg| histogram {dict(sorted(gaps.items()))}")
    print(f"total {elapsed:.2f} s")


if __name__ == "__main__":
    main()
