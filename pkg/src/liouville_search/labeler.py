"""Eigenstate labeling for strongly coupled spins.

Labels are (n+1)-character bit-strings, ancilla bit first. The ancilla qubit
is defined by a set of pairwise unconnected observed transitions (a matching
of the level graph): the lower level of every matched line is ``0w`` and its
upper level ``1w`` for some work label ``w``. Work labels are then distributed
over the matched pairs so that every initial state of the search can be
prepared by pulse cascades.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import islice

import numpy as np

from .errors import ConstraintViolation, NoMatching
from .spin_core import EigenSystem, TransitionTable

MATCHING_LIMIT = 10_000
ASSIGNMENT_NODE_LIMIT = 200_000


def popcount(x: int) -> int:
    return bin(x).count("1")


def work_bit(w: int, j: int, n_work: int) -> int:
    """Work bit j (1-based, bit 1 leftmost) of the integer label w."""
    return (w >> (n_work - j)) & 1


def pops_pairs(k: int, n_work: int, j: int) -> list[tuple[int, int]]:
    """Work-label pairs of the k-th initial state when partnering via bit j.

    The support is every work label with bit k = 0; each support label is
    paired with the one differing in bit j alone.
    """
    flip = 1 << (n_work - j)
    return [
        (w, w ^ flip)
        for w in range(2**n_work)
        if work_bit(w, k, n_work) == 0 and work_bit(w, j, n_work) == 0
    ]


def support_labels(k: int, n_work: int) -> list[int]:
    return [w for w in range(2**n_work) if work_bit(w, k, n_work) == 0]


@dataclass(frozen=True)
class LabelingConstraints:
    """Work labels whose ``0w`` level must take part in initial-state preparation."""

    required_states: frozenset[str]

    @classmethod
    def default(cls, n_work: int) -> "LabelingConstraints":
        req = {format(w, f"0{n_work}b") for k in range(1, n_work + 1) for w in support_labels(k, n_work)}
        return cls(frozenset(req))


@dataclass(frozen=True)
class Labeling:
    labels: tuple[str, ...]
    ancilla_matching: tuple[int, ...]
    missing_pairs: tuple[str, ...] = ()

    @property
    def n_work(self) -> int:
        return len(self.labels[0]) - 1

    @cached_property
    def _index(self) -> dict[str, int]:
        return {lab: s for s, lab in enumerate(self.labels)}

    def state(self, label: str) -> int:
        return self._index[label]

    def pair(self, work: str) -> tuple[int, int]:
        """(|0 w>, |1 w>) eigenstate indices."""
        return self._index["0" + work], self._index["1" + work]

    def work_labels(self) -> list[str]:
        return [format(w, f"0{self.n_work}b") for w in range(2**self.n_work)]


@dataclass
class LabelingReport:
    violations: list[str] = field(default_factory=list)
    missing_pairs: list[str] = field(default_factory=list)
    unsearchable: list[str] = field(default_factory=list)
    isolated_required: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


# -- matchings ---------------------------------------------------------------


def maximum_matching_size(table: TransitionTable) -> int:
    """Size of a maximum set of disjoint observed transitions (augmenting paths).

    The level graph is bipartite: every line joins an even-rank and an odd-rank
    M block.
    """
    top = float(np.max(table.mz))
    left = [s for s in range(table.dim) if int(round(top - table.mz[s])) % 2 == 0]
    mate: dict[int, int] = {}

    def augment(v, seen):
        for _, u in table.neighbors[v]:
            if u in seen:
                continue
            seen.add(u)
            if u not in mate or augment(mate[u], seen):
                mate[u] = v
                return True
        return False

    return sum(augment(v, set()) for v in left)


def iter_ancilla_matchings(table: TransitionTable):
    """Yield every maximum matching of the observed-line graph.

    Branch and bound over levels in canonical order: the lowest undecided level
    is either matched through one of its lines (tried in id order) or left
    unmatched while the unmatched budget allows. A branch is cut as soon as more
    levels are stranded (no free neighbour left) than the budget can absorb.
    Matchings come out in that depth-first order, as sorted tuples of ids.
    """
    if not table.observed():
        raise NoMatching("no observed transition")
    best = maximum_matching_size(table)
    dim = table.dim
    active = [s for s in range(dim) if table.neighbors[s]]
    budget0 = dim - 2 * best - (dim - len(active))
    free = np.zeros(dim, dtype=bool)
    free[active] = True
    chosen: list[int] = []

    def stranded(pos):
        return sum(
            1 for s in active[pos:] if free[s] and not any(free[u] for _, u in table.neighbors[s])
        )

    def search(pos, budget):
        while pos < len(active) and not free[active[pos]]:
            pos += 1
        if pos == len(active):
            yield tuple(sorted(chosen))
            return
        if budget < len(active) - pos and stranded(pos) > budget:
            return
        v = active[pos]
        free[v] = False
        for tid, u in table.neighbors[v]:
            if free[u]:
                free[u] = False
                chosen.append(tid)
                yield from search(pos + 1, budget)
                chosen.pop()
                free[u] = True
        if budget > 0:
            yield from search(pos + 1, budget - 1)
        free[v] = True

    yield from search(0, budget0)


def find_ancilla_matchings(table: TransitionTable, limit: int = MATCHING_LIMIT) -> list[tuple[int, ...]]:
    """The first ``limit`` maximum matchings, in enumeration order."""
    return list(islice(iter_ancilla_matchings(table), limit))


def _check_matching(matching, table: TransitionTable) -> list[tuple[int, int, int]]:
    pairs = []
    used: set[int] = set()
    for tid in matching:
        t = table[tid]
        if not t.observed:
            raise ValueError(f"transition {tid} is not observed")
        if t.lower in used or t.upper in used:
            raise ValueError(f"transition {tid} shares a level with another matched line")
        used.update(t.levels)
        pairs.append((t.lower, t.upper, tid))
    return pairs


def _pair_leftovers(states: list[int], table: TransitionTable) -> list[tuple[int, int]]:
    """Pair unmatched levels, preferring Delta M = 1 partners (unobserved lines)."""
    mz = table.mz
    order = sorted(states, key=lambda s: (-mz[s], table.energies[s], s))

    def rec(rest):
        if not rest:
            return []
        a = rest[0]
        for b in rest[1:]:
            if table.between(a, b) is not None:
                sub = rec([x for x in rest if x not in (a, b)])
                if sub is not None:
                    return [(a, b)] + sub
        return None

    paired = rec(order) if len(order) <= 16 else None
    if paired is None:
        paired = [(order[i], order[i + 1]) for i in range(0, len(order), 2)]
    return [(a, b) if (mz[a], -a) >= (mz[b], -b) else (b, a) for a, b in paired]


# -- label assignment --------------------------------------------------------


class _Assigner:
    def __init__(self, pairs, missing_flags, table, constraints, n_work):
        self.pairs = pairs  # list of (lower, upper)
        self.missing = missing_flags
        self.table = table
        self.n = n_work
        self.mz = table.mz
        self.comp = table.components
        width = f"0{n_work}b"
        self.required = {int(w, 2) for w in constraints.required_states}
        req_str = {format(w, width) for w in self.required}
        self.checked_k = [
            k for k in range(1, n_work + 1) if {format(w, width) for w in support_labels(k, n_work)} <= req_str
        ]
        self.options = {
            k: [(j, pops_pairs(k, n_work, j)) for j in range(1, n_work + 1) if j != k] for k in self.checked_k
        }
        self.order = sorted(range(2**n_work), key=lambda w: (popcount(w), -w))
        self.slot_of: dict[int, int] = {}
        self.nodes = 0

    def _pair_ok(self, wa, wb):
        pa, pb = self.slot_of[wa], self.slot_of[wb]
        if self.missing[pa] or self.missing[pb]:
            return False
        a, b = self.pairs[pa][0], self.pairs[pb][0]
        return self.comp[a] == self.comp[b] and self.mz[a] != self.mz[b]

    def _feasible(self):
        for k in self.checked_k:
            if not self.options[k]:
                # single work qubit: the support level is swapped with its ancilla partner
                continue
            alive = False
            for _, prs in self.options[k]:
                if all(self._pair_ok(a, b) for a, b in prs if a in self.slot_of and b in self.slot_of):
                    alive = True
                    break
            if not alive:
                return False
        return True

    def run(self):
        assignment = [None] * len(self.pairs)
        used: set[int] = set()

        def rec(i):
            if i == len(self.pairs):
                return True
            self.nodes += 1
            if self.nodes > ASSIGNMENT_NODE_LIMIT:
                return False
            for w in self.order:
                if w in used or (self.missing[i] and w in self.required):
                    continue
                assignment[i] = w
                self.slot_of[w] = i
                used.add(w)
                if self._feasible() and rec(i + 1):
                    return True
                used.discard(w)
                del self.slot_of[w]
            return False

        return assignment if rec(0) else None


def assign_labels(matching, table: TransitionTable, constraints: LabelingConstraints | None = None) -> Labeling:
    """Give every eigenstate an (n+1)-bit label compatible with ``matching``.

    Matched pairs are ranked by (M, energy) of their lower level, highest M
    first, and receive work labels in order of increasing Hamming weight (ties:
    larger integer first). Backtracking departs from that order only where the
    preparation constraints demand it.
    """
    dim = table.dim
    n_work = int(round(np.log2(dim))) - 1
    if n_work < 1:
        raise ValueError("labeling needs at least one work qubit")
    if constraints is None:
        constraints = LabelingConstraints.default(n_work)
    matched = _check_matching(matching, table)
    if len(matched) > 2**n_work:
        raise ValueError("matching larger than the number of work labels")
    used = {s for lo, up, _ in matched for s in (lo, up)}
    leftovers = _pair_leftovers([s for s in range(dim) if s not in used], table)
    pairs = [(lo, up) for lo, up, _ in matched] + leftovers
    missing = [False] * len(matched) + [True] * len(leftovers)
    order = sorted(range(len(pairs)), key=lambda i: (-table.mz[pairs[i][0]], table.energies[pairs[i][0]], pairs[i][0]))
    pairs = [pairs[i] for i in order]
    missing = [missing[i] for i in order]

    assignment = _Assigner(pairs, missing, table, constraints, n_work).run()
    if assignment is None:
        raise ConstraintViolation("no work-label assignment keeps every required state preparable")
    width = f"0{n_work}b"
    labels = [""] * dim
    missing_pairs = []
    for (lo, up), w, miss in zip(pairs, assignment, missing):
        labels[lo] = "0" + format(w, width)
        labels[up] = "1" + format(w, width)
        if miss:
            missing_pairs.append(format(w, width))
    return Labeling(tuple(labels), tuple(sorted(tid for _, _, tid in matched)), tuple(sorted(missing_pairs)))


def label_system(
    table: TransitionTable, constraints: LabelingConstraints | None = None, limit: int = MATCHING_LIMIT
) -> Labeling:
    """First labeling, over maximum matchings in enumeration order, that satisfies the constraints.

    Feasibility depends only on the (M, component) of each matched lower level
    and on the unmatched levels, so matchings sharing that signature with a
    failed one are skipped.
    """
    n_work = int(round(np.log2(table.dim))) - 1
    if constraints is None:
        constraints = LabelingConstraints.default(n_work)
    gap = 2**n_work - maximum_matching_size(table)
    if gap > 2**n_work - len(constraints.required_states):
        raise ConstraintViolation(f"{gap} ancilla pairs cannot be matched; required states would lack their line")
    last = None
    failed: set = set()
    comp = table.components
    for matching in islice(iter_ancilla_matchings(table), limit):
        lowers = sorted((float(table.mz[table[t].lower]), int(comp[table[t].lower])) for t in matching)
        used = {s for t in matching for s in table[t].levels}
        key = (tuple(lowers), tuple(s for s in range(table.dim) if s not in used))
        if key in failed:
            continue
        try:
            return assign_labels(matching, table, constraints)
        except ConstraintViolation as exc:
            failed.add(key)
            last = exc
    raise ConstraintViolation(f"every ancilla matching leaves a required state unpreparable ({last})")


def labeling_from_labels(labels, table: TransitionTable) -> Labeling:
    """Rebuild ancilla matching and missing pairs from explicit per-state labels."""
    labels = tuple(labels)
    if len(labels) != table.dim:
        raise ValueError(f"expected {table.dim} labels, got {len(labels)}")
    n_work = len(labels[0]) - 1
    index = {lab: s for s, lab in enumerate(labels)}
    matching, missing = [], []
    for w in range(2**n_work):
        ws = format(w, f"0{n_work}b")
        lo, up = index.get("0" + ws), index.get("1" + ws)
        t = table.between(lo, up) if lo is not None and up is not None else None
        if t is not None and t.observed and t.lower == lo:
            matching.append(t.tid)
        else:
            missing.append(ws)
    return Labeling(labels, tuple(sorted(matching)), tuple(missing))


def conventional_labeling(eig: EigenSystem, table: TransitionTable) -> Labeling:
    """Label each eigenstate by its dominant Zeeman product component.

    Meaningful in the weak-coupling limit, where spin 0 becomes the ancilla.
    """
    n = eig.n_total
    dominant = np.argmax(eig.vectors**2, axis=1)
    if len(set(dominant.tolist())) != eig.dim:
        raise ConstraintViolation("eigenstates do not map one-to-one onto product states")
    return labeling_from_labels([format(int(b), f"0{n}b") for b in dominant], table)


def validate_labeling(
    labeling: Labeling, table: TransitionTable, constraints: LabelingConstraints | None = None
) -> LabelingReport:
    """Independently re-check every labeling invariant."""
    rep = LabelingReport()
    labels = labeling.labels
    n_work = labeling.n_work
    width = n_work + 1
    if len(labels) != table.dim:
        rep.violations.append(f"{len(labels)} labels for {table.dim} states")
        return rep
    if any(len(lab) != width or set(lab) - {"0", "1"} for lab in labels):
        rep.violations.append("labels are not bit-strings of equal length")
        return rep
    if len(set(labels)) != len(labels):
        rep.violations.append("labels are not a bijection")
        return rep

    seen: dict[int, int] = {}
    matched_work = set()
    for tid in labeling.ancilla_matching:
        try:
            t = table[tid]
        except KeyError:
            rep.violations.append(f"transition {tid} does not exist")
            continue
        if not t.observed:
            rep.violations.append(f"transition {tid} is not observed")
        for s in t.levels:
            if s in seen:
                rep.violations.append(f"transitions {seen[s]} and {tid} share level {s}")
            seen[s] = tid
        lo, up = labels[t.lower], labels[t.upper]
        if lo[1:] != up[1:] or lo[0] != "0" or up[0] != "1":
            rep.violations.append(f"transition {tid} joins {lo} and {up}, not an ancilla pair 0w->1w")
        else:
            matched_work.add(lo[1:])
        if abs(table.mz[t.lower] - table.mz[t.upper] - 1) > 1e-9:
            rep.violations.append(f"transition {tid} does not change M by one")

    all_work = [format(w, f"0{n_work}b") for w in range(2**n_work)]
    missing = [w for w in all_work if w not in matched_work]
    rep.missing_pairs = missing
    rep.unsearchable = list(missing)
    if sorted(labeling.missing_pairs) != sorted(missing):
        rep.violations.append(f"declared missing pairs {list(labeling.missing_pairs)} differ from actual {missing}")

    if constraints is None:
        constraints = LabelingConstraints.default(n_work)
    for w in sorted(constraints.required_states):
        s = labels.index("0" + w)
        if not table.neighbors[s]:
            rep.isolated_required.append(w)
    return rep
