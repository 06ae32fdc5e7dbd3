"""Scan random 4-spin seeds for instances whose best ancilla matching has 7
lines, with the unmatched pair labeled 111, and report the preparation shape.

This is how the fixed missing-pair instance was chosen (seed 12239).

    python scripts/find_missing_pair.py --start 12000 --stop 12300
"""

import argparse

from liouville_search.engine import compile_swap, prepare_initial, readout_small_angle
from liouville_search.errors import ConstraintViolation, NoMatching, Unpreparable
from liouville_search.instances import random_strong_system
from liouville_search.labeler import label_system, maximum_matching_size
from liouville_search.spin_core import analyze


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--start", type=int, default=0)
    ap.add_argument("--stop", type=int, default=20000)
    ap.add_argument("--min-lines", type=int, default=28)
    ap.add_argument("--max-lines", type=int, default=32)
    args = ap.parse_args()

    for seed in range(args.start, args.stop):
        _, table = analyze(random_strong_system(4, seed))
        n_obs = len(table.observed())
        if not args.min_lines <= n_obs <= args.max_lines or maximum_matching_size(table) != 7:
            continue
        try:
            lab = label_system(table)
            preps = [prepare_initial(k, lab, table) for k in (1, 2, 3)]
        except (ConstraintViolation, NoMatching, Unpreparable):
            continue
        if lab.missing_pairs != ("111",):
            continue
        first = [int(preps[0].rho_in[lab.state(w)]) for w in ("0000", "0001", "0010", "0011")]
        if first != [1, 2, -1, -2]:
            continue
        shape = [[len(compile_swap(lab.state(a), lab.state(b), table)) for a, b in p.pairs] for p in preps]
        isolated = lab.state("0111") in table.isolated_levels()
        pos, neg = readout_small_angle(preps[0].rho_in, table).counts()
        print(f"seed {seed}: {n_obs} lines, cascade lengths {shape}, |0111> isolated {isolated}, rho_in^1 {pos}+/{neg}-")


if __name__ == "__main__":
    main()
