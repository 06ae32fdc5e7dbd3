"""Diagonal density operators as population vectors, ideal transition-selective
pi pulses, pulse cascades, POPS preparation and stick-spectrum readouts.

A selective pi pulse on a line exchanges the populations of its two levels;
nothing else is modelled. Spectrum amplitudes are the population difference
across a line (lower minus upper level) times the line intensity.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import UnknownTransition, UnobservedTransition, Unpreparable, Unreachable
from .labeler import Labeling, pops_pairs
from .spin_core import EigenSystem, TransitionTable

PEAK_EPSILON = 1e-9


@dataclass(frozen=True, eq=False)
class PopulationState:
    """Deviation populations, one per eigenstate in canonical order."""

    pop: np.ndarray

    def __post_init__(self):
        arr = np.array(self.pop, dtype=float).reshape(-1)
        arr.flags.writeable = False
        object.__setattr__(self, "pop", arr)

    def __len__(self):
        return self.pop.size

    def __getitem__(self, s):
        return self.pop[s]

    def __eq__(self, other):
        return isinstance(other, PopulationState) and np.array_equal(self.pop, other.pop)

    __hash__ = None

    def __add__(self, other: "PopulationState") -> "PopulationState":
        return PopulationState(self.pop + other.pop)

    def __sub__(self, other: "PopulationState") -> "PopulationState":
        return PopulationState(self.pop - other.pop)

    def __mul__(self, c: float) -> "PopulationState":
        return PopulationState(c * self.pop)

    __rmul__ = __mul__

    def swapped(self, a: int, b: int) -> "PopulationState":
        p = self.pop.copy()
        p[a], p[b] = p[b], p[a]
        return PopulationState(p)

    def total(self) -> float:
        return float(self.pop.sum())

    def support(self) -> list[int]:
        return np.flatnonzero(self.pop).tolist()


@dataclass(frozen=True)
class PulsePlan:
    """Selective pi pulses, applied in order."""

    steps: tuple[int, ...] = ()

    def __len__(self):
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def __add__(self, other: "PulsePlan") -> "PulsePlan":
        return PulsePlan(self.steps + other.steps)

    def to_text(self, title: str = "") -> str:
        """Pulse program: ``#`` comment lines, then one transition id per line."""
        lines = [f"# {title}"] if title else []
        lines.append(f"# {len(self.steps)} selective pi pulse(s)")
        lines.extend(f"pi {tid}" for tid in self.steps)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "PulsePlan":
        steps = []
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            kind, _, tid = line.partition(" ")
            if kind != "pi" or not tid.strip().isdigit():
                raise ValueError(f"bad pulse program line: {raw!r}")
            steps.append(int(tid))
        return cls(tuple(steps))


@dataclass(frozen=True)
class Peak:
    tid: int
    frequency: float
    amplitude: float


@dataclass(frozen=True)
class Spectrum:
    """Stick spectrum, ordered by decreasing frequency."""

    peaks: tuple[Peak, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "peaks", tuple(sorted(self.peaks, key=lambda p: (-p.frequency, p.tid))))

    def __len__(self):
        return len(self.peaks)

    def amplitudes(self) -> dict[int, float]:
        return {p.tid: p.amplitude for p in self.peaks}

    def _combine(self, other, op):
        mine, theirs = self.amplitudes(), other.amplitudes()
        if mine.keys() != theirs.keys():
            raise ValueError("spectra cover different transitions")
        return Spectrum(tuple(Peak(p.tid, p.frequency, op(p.amplitude, theirs[p.tid])) for p in self.peaks))

    def __sub__(self, other: "Spectrum") -> "Spectrum":
        return self._combine(other, lambda a, b: a - b)

    def __add__(self, other: "Spectrum") -> "Spectrum":
        return self._combine(other, lambda a, b: a + b)

    def __mul__(self, c: float) -> "Spectrum":
        return Spectrum(tuple(Peak(p.tid, p.frequency, c * p.amplitude) for p in self.peaks))

    __rmul__ = __mul__

    def signs(self, eps: float = PEAK_EPSILON) -> dict[int, int]:
        """+1 / -1 per peak, 0 where |amplitude| <= eps * max|amplitude|."""
        top = max((abs(p.amplitude) for p in self.peaks), default=0.0)
        cut = eps * top
        out = {}
        for p in self.peaks:
            if top == 0 or abs(p.amplitude) <= cut:
                out[p.tid] = 0
            else:
                out[p.tid] = 1 if p.amplitude > 0 else -1
        return out

    def counts(self, eps: float = PEAK_EPSILON) -> tuple[int, int]:
        s = list(self.signs(eps).values())
        return s.count(1), s.count(-1)


def equilibrium_populations(eig: EigenSystem | TransitionTable) -> PopulationState:
    """High-temperature deviation populations in units where pop = M."""
    return PopulationState(np.asarray(eig.mz, dtype=float))


def _line(table: TransitionTable, tid: int):
    try:
        t = table[tid]
    except KeyError:
        raise UnknownTransition(f"no transition {tid}") from None
    if not t.observed:
        raise UnobservedTransition(f"transition {tid} is not observed")
    return t


def apply_pi(state: PopulationState, table: TransitionTable, tid: int) -> PopulationState:
    t = _line(table, tid)
    return state.swapped(t.lower, t.upper)


def apply_plan(state: PopulationState, table: TransitionTable, plan: PulsePlan) -> PopulationState:
    for tid in plan:
        state = apply_pi(state, table, tid)
    return state


def shortest_path(table: TransitionTable, a: int, b: int) -> list[int]:
    """Transition ids of a shortest observed path from level a to level b."""
    prev: dict[int, tuple[int, int] | None] = {a: None}
    queue = deque([a])
    while queue:
        s = queue.popleft()
        if s == b:
            break
        for tid, o in table.neighbors[s]:
            if o not in prev:
                prev[o] = (s, tid)
                queue.append(o)
    if b not in prev:
        raise Unreachable(f"levels {a} and {b} are not connected by observed transitions")
    path = []
    s = b
    while prev[s] is not None:
        s, tid = prev[s]
        path.append(tid)
    return path[::-1]


def compile_swap(a: int, b: int, table: TransitionTable) -> PulsePlan:
    """Cascade t1 .. t(m-1), t(m), t(m-1) .. t1 exchanging the populations of a and b.

    Conjugating the last line of the path by the earlier ones moves its action
    onto the end levels; every intermediate level is restored.
    """
    if a == b:
        return PulsePlan()
    path = shortest_path(table, a, b)
    return PulsePlan(tuple(path + path[-2::-1]))


@dataclass(frozen=True)
class Preparation:
    """One initial state of the generalized search: rho_in = rho_eq - rho_k."""

    k: int
    partner_bit: int | None  # work bit flipped to pair support states; None for one work qubit
    pairs: tuple[tuple[str, str], ...]  # full labels exchanged by the plan
    plan: PulsePlan
    rho_k: PopulationState
    rho_in: PopulationState

    def __iter__(self):
        return iter((self.rho_k, self.rho_in, self.plan))


def _label_pairs(k: int, n_work: int, j: int | None) -> list[tuple[str, str]]:
    width = f"0{n_work}b"
    if j is None:
        # a lone support state is paired with its own ancilla partner
        return [("0" + format(0, width), "1" + format(0, width))]
    return [("0" + format(a, width), "0" + format(b, width)) for a, b in pops_pairs(k, n_work, j)]


def prepare_initial(
    k: int, labeling: Labeling, table: TransitionTable, eq: PopulationState | None = None
) -> Preparation:
    """Prepare rho_in^k as a sum of POPS on the levels with ancilla 0 and work bit k = 0.

    Support levels are paired through the lowest-index other work bit for which
    every pair is connected and has unequal equilibrium populations.
    """
    n_work = labeling.n_work
    if not 1 <= k <= n_work:
        raise ValueError(f"k must lie in 1..{n_work}")
    if eq is None:
        eq = equilibrium_populations(table)
    candidates = [j for j in range(1, n_work + 1) if j != k] or [None]
    reasons = []
    for j in candidates:
        pairs = _label_pairs(k, n_work, j)
        plan = PulsePlan()
        try:
            for la, lb in pairs:
                a, b = labeling.state(la), labeling.state(lb)
                if eq[a] == eq[b]:
                    raise Unpreparable(f"|{la}> and |{lb}> have equal equilibrium populations")
                plan = plan + compile_swap(a, b, table)
        except (Unreachable, Unpreparable) as exc:
            reasons.append(f"partner bit {j}: {exc}")
            continue
        rho_k = apply_plan(eq, table, plan)
        return Preparation(k, j, tuple(pairs), plan, rho_k, eq - rho_k)
    raise Unpreparable(f"initial state {k} cannot be prepared; " + "; ".join(reasons))


def readout_small_angle(state: PopulationState, table: TransitionTable) -> Spectrum:
    """Linear-response spectrum: one stick per observed line."""
    return Spectrum(
        tuple(
            Peak(t.tid, float(t.frequency), float((state[t.lower] - state[t.upper]) * t.intensity))
            for t in table.observed()
        )
    )


def readout_mf(state: PopulationState, labeling: Labeling, table: TransitionTable) -> Spectrum:
    """Multi-frequency (pi/2) readout restricted to the ancilla matching."""
    peaks = []
    for tid in labeling.ancilla_matching:
        t = table[tid]
        peaks.append(Peak(tid, float(t.frequency), float((state[t.lower] - state[t.upper]) * t.intensity)))
    return Spectrum(tuple(peaks))
