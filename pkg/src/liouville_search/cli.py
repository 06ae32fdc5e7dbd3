"""Command-line entry point.

Exit codes
----------
0  success
1  unexpected error
2  usage error (argparse)
3  config ParseError / ValidationError
4  Unreachable / Unpreparable (a required level cannot be reached)
5  UnsearchableState (the marked state has no ancilla line)
6  ConstraintViolation (no admissible labeling)
7  NoMatching
8  EmptySpectrum
9  crosscheck disagreement
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import errors
from .cli_io import (
    labeling_to_csv,
    labels_from_csv,
    levels_to_csv,
    load_config,
    spectrum_to_csv,
    spectrum_to_svg,
    to_json,
    transitions_to_csv,
)
from .engine import equilibrium_populations, prepare_initial, readout_small_angle
from .labeler import label_system, labeling_from_labels, validate_labeling
from .search import LabeledInstance, OracleSpec, cross_check, run_search, run_weak_search
from .spin_core import analyze

EXIT_CODES = [
    (errors.ConfigError, 3),
    (errors.Unreachable, 4),
    (errors.Unpreparable, 4),
    (errors.UnsearchableState, 5),
    (errors.ConstraintViolation, 6),
    (errors.NoMatching, 7),
    (errors.EmptySpectrum, 8),
]
EXIT_CROSSCHECK = 9


def _write(outdir: Path, name: str, text: str) -> Path:
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / name
    path.write_text(text)
    return path


def _context(args):
    cfg = load_config(args.config)
    outdir = Path(args.output) if args.output else cfg.output_dir
    eig, table = analyze(cfg.system)
    return cfg, outdir, eig, table


def _instance(cfg, eig, table) -> LabeledInstance:
    if cfg.labeling_path is not None:
        labels = labels_from_csv(cfg.labeling_path.read_text(), table)
        labeling = labeling_from_labels(labels, table)
    else:
        labeling = label_system(table)
    return LabeledInstance(cfg.system, eig, table, labeling)


def _marked(text: str, n_work: int, as_index: bool) -> OracleSpec:
    if as_index:
        return OracleSpec.from_index(int(text), n_work)
    spec = OracleSpec(text)
    if spec.n_work != n_work:
        raise errors.ValidationError(f"marked state {text!r} needs {n_work} bits", "marked")
    return spec


def cmd_levels(args):
    cfg, outdir, eig, table = _context(args)
    _write(outdir, "levels.csv", levels_to_csv(table))
    _write(outdir, "transitions.csv", transitions_to_csv(table))
    print(f"{table.dim} levels, {len(table.observed())} observed of {len(table.transitions)} transitions")


def cmd_spectrum(args):
    cfg, outdir, eig, table = _context(args)
    spec = readout_small_angle(equilibrium_populations(eig), table)
    _write(outdir, "equilibrium.csv", spectrum_to_csv(spec))
    _write(outdir, "equilibrium.svg", spectrum_to_svg(spec, "equilibrium, small flip angle"))
    print(f"{len(spec)} lines written")


def cmd_label(args):
    cfg, outdir, eig, table = _context(args)
    inst = _instance(cfg, eig, table)
    rep = validate_labeling(inst.labeling, table)
    _write(outdir, "labeling.csv", labeling_to_csv(inst.labeling, table))
    _write(
        outdir,
        "label.json",
        to_json(
            {
                "ancilla_matching": list(inst.labeling.ancilla_matching),
                "matching_size": len(inst.labeling.ancilla_matching),
                "missing_pairs": list(inst.labeling.missing_pairs),
                "isolated_levels": table.isolated_levels(),
                "violations": rep.violations,
                "unsearchable": rep.unsearchable,
            }
        ),
    )
    print(f"ancilla matching of size {len(inst.labeling.ancilla_matching)}: {list(inst.labeling.ancilla_matching)}")
    if rep.missing_pairs:
        print(f"missing ancilla pairs: {rep.missing_pairs}")
    if rep.violations:
        for v in rep.violations:
            print(f"violation: {v}")
        raise errors.ConstraintViolation("labeling fails validation")


def cmd_prepare(args):
    cfg, outdir, eig, table = _context(args)
    inst = _instance(cfg, eig, table)
    prep = prepare_initial(args.k, inst.labeling, table)
    _write(outdir, f"prepare_k{args.k}.pulse", prep.plan.to_text(f"rho_{args.k}: pairs {list(prep.pairs)}"))
    spec = readout_small_angle(prep.rho_in, table)
    _write(outdir, f"rho_in_k{args.k}.csv", spectrum_to_csv(spec))
    _write(outdir, f"rho_in_k{args.k}.svg", spectrum_to_svg(spec, f"rho_in^{args.k} = rho_eq - rho_{args.k}"))
    pops = {inst.labeling.labels[s]: float(prep.rho_in[s]) for s in prep.rho_in.support()}
    pos, neg = spec.counts(cfg.peak_epsilon)
    print(f"plan: {list(prep.plan)}")
    print(f"rho_in populations: {pops}")
    print(f"spectrum: {pos} positive, {neg} negative peaks")


def cmd_search(args):
    cfg, outdir, eig, table = _context(args)
    inst = _instance(cfg, eig, table)
    spec = _marked(args.marked, inst.n_work, args.index)
    res = run_search(inst, spec, cfg.peak_epsilon)
    record = {
        "command": "search",
        "experiments": [
            {
                "k": r.k,
                "partner_bit": r.partner_bit,
                "preparation_plan": list(r.plan),
                "peak_signs": {str(t): s for t, s in r.signs.items()},
                "positive": r.counts[0],
                "negative": r.counts[1],
                "bit": r.bit,
            }
            for r in res.records
        ],
        "experiments_run": res.experiments_run,
        "oracle_pulses": res.oracle_pulses,
        "counts": [list(c) for c in res.counts],
        "bits": res.bits,
    }
    _write(outdir, "search.json", to_json(record))
    for r in res.records:
        print(f"k={r.k}: {r.counts[0]} positive, {r.counts[1]} negative -> x{r.k} = {r.bit}")
    print(f"decided bits: {res.bits}")


def cmd_weak_search(args):
    spec = _marked(args.m, args.n, args.index)
    res = run_weak_search(args.n, spec)
    record = {
        "command": "weak-search",
        "n_work": args.n,
        "oracle_queries": res.oracle_queries,
        "counts": [list(c) for c in res.counts],
        "bits": res.bits,
    }
    _write(Path(args.output or "out"), f"weak_search_n{args.n}.json", to_json(record))
    print(f"decided bits: {res.bits} in {res.oracle_queries} queries")


def cmd_crosscheck(args):
    rep = cross_check(args.n, seed=args.seed)
    record = {"command": "crosscheck", "n_work": rep.n_work, "total": rep.total, "agree": rep.agree, "mismatches": rep.mismatches}
    _write(Path(args.output or "out"), f"crosscheck_n{args.n}.json", to_json(record))
    print(f"{rep.agree}/{rep.total} marked states agree")
    return 0 if rep.ok else EXIT_CROSSCHECK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lsearch", description="Liouville-space search on coupled spin-1/2 systems")
    p.add_argument("-o", "--output", help="artifact directory (overrides the config)")
    sub = p.add_subparsers(dest="command", required=True)

    def with_config(name, func, help):
        sp = sub.add_parser(name, help=help)
        sp.add_argument("-c", "--config", required=True, help="run configuration file")
        sp.set_defaults(func=func)
        return sp

    with_config("levels", cmd_levels, "energy levels and transition table")
    with_config("spectrum", cmd_spectrum, "equilibrium stick spectrum")
    with_config("label", cmd_label, "ancilla matching and eigenstate labels")
    sp = with_config("prepare", cmd_prepare, "prepare initial state k")
    sp.add_argument("k", type=int)
    sp = with_config("search", cmd_search, "run the generalized search")
    sp.add_argument("marked", help="marked work bit-string, or 1-based index with --index")
    sp.add_argument("--index", action="store_true")

    sp = sub.add_parser("weak-search", help="operator-level search on n work qubits")
    sp.add_argument("n", type=int)
    sp.add_argument("m", help="marked work bit-string, or 1-based index with --index")
    sp.add_argument("--index", action="store_true")
    sp.set_defaults(func=cmd_weak_search)

    sp = sub.add_parser("crosscheck", help="generalized vs weak search on a weakly coupled system")
    sp.add_argument("n", type=int)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_crosscheck)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args) or 0
    except errors.LiouvilleSearchError as exc:
        for cls, code in EXIT_CODES:
            if isinstance(exc, cls):
                print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
                return code
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
