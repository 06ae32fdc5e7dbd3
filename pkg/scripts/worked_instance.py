"""Walk through the fixed 4-spin instance: matching, labels, the three initial
states and the search for every marked state.

    python scripts/worked_instance.py [--marked 101]
"""

import argparse

from liouville_search.engine import prepare_initial, readout_small_angle
from liouville_search.errors import UnsearchableState
from liouville_search.instances import missing_pair_instance
from liouville_search.search import OracleSpec, run_search


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--marked", default=None, help="only search this work bit-string")
    args = ap.parse_args()

    inst = missing_pair_instance()
    lab, table = inst.labeling, inst.table
    print(f"{len(table.observed())} observed lines, ancilla matching {list(lab.ancilla_matching)}")
    print(f"missing ancilla pair(s): {list(lab.missing_pairs)}, isolated levels: "
          f"{[lab.labels[s] for s in table.isolated_levels()]}")
    for s, label in enumerate(lab.labels):
        print(f"  state {s:2d}  M={table.mz[s]:+.0f}  E={table.energies[s]:10.3f} Hz  |{label}>")

    for k in range(1, lab.n_work + 1):
        prep = prepare_initial(k, lab, table)
        pops = {lab.labels[s]: int(prep.rho_in[s]) for s in prep.rho_in.support()}
        pos, neg = readout_small_angle(prep.rho_in, table).counts()
        print(f"rho_in^{k}: partner bit {prep.partner_bit}, pulses {list(prep.plan)}")
        print(f"  populations {pops}; small-angle spectrum {pos}+ / {neg}-")

    marked = [args.marked] if args.marked else [format(w, f"0{lab.n_work}b") for w in range(2**lab.n_work)]
    for m in marked:
        try:
            res = run_search(inst, OracleSpec(m))
        except UnsearchableState as exc:
            print(f"marked {m}: unsearchable ({exc})")
            continue
        print(f"marked {m}: counts {res.counts} -> {res.bits}")


if __name__ == "__main__":
    main()
