"""Secular spin Hamiltonian, block-wise diagonalization and the single-quantum
transition table.

Conventions
-----------
Zeeman basis state ``b`` (an integer in ``[0, 2**n)``) stores spin ``i`` in bit
``n-1-i``, so spin 0 is the most significant bit and ``format(b, "0nb")`` reads
spins left to right. Bit value 0 is alpha (m = +1/2), 1 is beta.

All energies are in Hz with ``H = sum_i nu_i I_iz + ...``. A transition joins a
``lower_state`` of magnetic quantum number M with an ``upper_state`` of M - 1
(lower/upper follow the Zeeman ladder of positive-gyromagnetic nuclei, where the
alpha-rich level is the ground level and carries the larger equilibrium
population). Its line frequency is ``E(lower_state) - E(upper_state)``, which is
``+nu_i`` for an isolated spin, and its intensity is
``|<lower_state| F+ |upper_state>|**2``.

Transition ids are 1-based: observed lines are numbered first in order of
decreasing frequency (left to right on a conventional NMR plot), then the
unobserved ones in the same order.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import ConvergenceFailure

DEFAULT_INTENSITY_THRESHOLD = 0.01
_DEGENERACY_TOL = 1e-8


def _as_matrix(values, n, name):
    if values is None:
        return np.zeros((n, n))
    m = np.array(values, dtype=float)
    if m.shape != (n, n):
        raise ValueError(f"{name} must be {n}x{n}, got shape {m.shape}")
    return m


@dataclass(frozen=True, eq=False)
class SpinSystem:
    """Chemical shifts and pairwise couplings (all in Hz) of ``n_total`` spins.

    Spin 0 is the ancilla in the conventional (weak-coupling) labeling.
    """

    shifts: np.ndarray
    dipolar: np.ndarray | None = None
    scalar: np.ndarray | None = None
    intensity_threshold: float = DEFAULT_INTENSITY_THRESHOLD

    def __post_init__(self):
        shifts = np.array(self.shifts, dtype=float).reshape(-1)
        n = shifts.size
        if n < 1:
            raise ValueError("at least one spin is required")
        dip = _as_matrix(self.dipolar, n, "dipolar")
        sca = _as_matrix(self.scalar, n, "scalar")
        for name, m in (("dipolar", dip), ("scalar", sca)):
            if np.any(np.diag(m) != 0):
                raise ValueError(f"{name} coupling matrix must have a zero diagonal")
            if not np.array_equal(m, m.T):
                raise ValueError(f"{name} coupling matrix must be symmetric")
        if not 0 <= self.intensity_threshold < 1:
            raise ValueError("intensity_threshold must lie in [0, 1)")
        for a in (shifts, dip, sca):
            a.flags.writeable = False
        object.__setattr__(self, "shifts", shifts)
        object.__setattr__(self, "dipolar", dip)
        object.__setattr__(self, "scalar", sca)

    @property
    def n_total(self) -> int:
        return self.shifts.size

    @property
    def dim(self) -> int:
        return 2**self.n_total

    def with_threshold(self, threshold: float) -> "SpinSystem":
        return SpinSystem(self.shifts, self.dipolar, self.scalar, threshold)


def basis_m(n: int) -> np.ndarray:
    """Total magnetic quantum number of every Zeeman basis state."""
    counts = np.array([bin(b).count("1") for b in range(2**n)])
    return n / 2 - counts


def raising_operator(n: int) -> np.ndarray:
    """Total F+ = sum_i I_i^+ in the Zeeman basis."""
    dim = 2**n
    fp = np.zeros((dim, dim))
    for b in range(dim):
        for i in range(n):
            bit = 1 << (n - 1 - i)
            if b & bit:
                fp[b ^ bit, b] = 1.0
    return fp


def total_fz(n: int) -> np.ndarray:
    return np.diag(basis_m(n))


def build_hamiltonian(system: SpinSystem) -> np.ndarray:
    """Secular Hamiltonian in the Zeeman basis, in Hz.

    H = sum_i nu_i I_iz + sum_{i<j} [D_ij (3 I_iz I_jz - I_i.I_j) + J_ij I_i.I_j]

    Each coupling contributes ``(2 D + J) I_iz I_jz`` on the diagonal and
    ``(J - D) / 2`` between basis states related by an alpha/beta exchange
    of spins i and j.
    """
    n = system.n_total
    dim = system.dim
    zz = 2 * system.dipolar + system.scalar
    flip = (system.scalar - system.dipolar) / 2
    h = np.zeros((dim, dim))
    for b in range(dim):
        m = np.array([0.5 - ((b >> (n - 1 - i)) & 1) for i in range(n)])
        h[b, b] = system.shifts @ m + 0.5 * m @ zz @ m
        for i in range(n):
            for j in range(i + 1, n):
                if m[i] != m[j] and flip[i, j] != 0:
                    partner = b ^ (1 << (n - 1 - i)) ^ (1 << (n - 1 - j))
                    h[partner, b] = flip[i, j]
    return h


@dataclass(frozen=True, eq=False)
class EigenSystem:
    """Eigenstates in canonical order: M descending, energy ascending within a block."""

    energies: np.ndarray
    vectors: np.ndarray  # vectors[s] is eigenstate s in the Zeeman basis
    mz: np.ndarray

    @property
    def dim(self) -> int:
        return self.energies.size

    @property
    def n_total(self) -> int:
        return int(round(np.log2(self.dim)))

    def block_sizes(self) -> list[int]:
        _, counts = np.unique(-self.mz, return_counts=True)
        return counts.tolist()

    def reconstruct(self) -> np.ndarray:
        return (self.vectors.T * self.energies) @ self.vectors


def _canonical_sign(v: np.ndarray) -> np.ndarray:
    mag = np.round(np.abs(v), 8)
    k = int(np.argmax(mag))
    return -v if v[k] < 0 else v


def _order_block(vals: np.ndarray, vecs: np.ndarray, scale: float) -> list[int]:
    # vecs columns are eigenvectors; ties within the degeneracy tolerance are
    # broken by the rounded vector components.
    order = list(np.argsort(vals, kind="stable"))
    tol = _DEGENERACY_TOL * max(scale, 1.0)
    out: list[int] = []
    group: list[int] = []
    for idx in order:
        if group and vals[idx] - vals[group[0]] > tol:
            out.extend(sorted(group, key=lambda c: tuple(np.round(vecs[:, c], 8))))
            group = []
        group.append(idx)
    out.extend(sorted(group, key=lambda c: tuple(np.round(vecs[:, c], 8))))
    return out


def diagonalize(h: np.ndarray) -> EigenSystem:
    """Diagonalize each total-M block of ``h`` independently."""
    h = np.asarray(h, dtype=float)
    dim = h.shape[0]
    n = int(round(np.log2(dim)))
    if 2**n != dim or h.shape != (dim, dim):
        raise ValueError("Hamiltonian must be square with dimension 2**n")
    scale = float(np.max(np.abs(h))) if h.size else 0.0
    mz_basis = basis_m(n)
    if scale and np.max(np.abs(h[mz_basis[:, None] != mz_basis[None, :]])) > 1e-12 * scale:
        raise ValueError("Hamiltonian does not commute with total Fz")

    energies, vectors, mz = [], [], []
    for m in sorted(set(mz_basis.tolist()), reverse=True):
        idx = np.flatnonzero(mz_basis == m)
        try:
            vals, vecs = np.linalg.eigh(h[np.ix_(idx, idx)])
        except np.linalg.LinAlgError as exc:
            raise ConvergenceFailure(f"eigensolver failed in the M={m:+g} block") from exc
        for c in range(vecs.shape[1]):
            vecs[:, c] = _canonical_sign(vecs[:, c])
        for c in _order_block(vals, vecs, scale):
            full = np.zeros(dim)
            full[idx] = vecs[:, c]
            energies.append(vals[c])
            vectors.append(full)
            mz.append(m)
    return EigenSystem(np.array(energies), np.array(vectors), np.array(mz))


@dataclass(frozen=True)
class Transition:
    tid: int
    lower: int
    upper: int
    frequency: float
    intensity: float
    observed: bool

    @property
    def levels(self) -> tuple[int, int]:
        return (self.lower, self.upper)


@dataclass(frozen=True, eq=False)
class TransitionTable:
    """All Delta M = 1 state pairs plus the graph of observed transitions."""

    transitions: tuple[Transition, ...]
    mz: np.ndarray
    energies: np.ndarray
    intensity_threshold: float = DEFAULT_INTENSITY_THRESHOLD
    connectivity: dict[int, tuple[int, ...]] = field(init=False)

    def __post_init__(self):
        by_level: dict[int, list[int]] = {}
        for t in self.observed():
            for s in t.levels:
                by_level.setdefault(s, []).append(t.tid)
        conn = {}
        for t in self.observed():
            linked = set(by_level[t.lower]) | set(by_level[t.upper])
            linked.discard(t.tid)
            conn[t.tid] = tuple(sorted(linked))
        object.__setattr__(self, "connectivity", conn)

    @property
    def dim(self) -> int:
        return self.mz.size

    def __getitem__(self, tid: int) -> Transition:
        if not 1 <= tid <= len(self.transitions):
            raise KeyError(tid)
        return self.transitions[tid - 1]

    def observed(self) -> list[Transition]:
        return [t for t in self.transitions if t.observed]

    def between(self, a: int, b: int) -> Transition | None:
        return self._pair_index.get((min(a, b), max(a, b)))

    @cached_property
    def _pair_index(self) -> dict[tuple[int, int], Transition]:
        return {(min(t.levels), max(t.levels)): t for t in self.transitions}

    @cached_property
    def neighbors(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """``neighbors[s]``: (tid, other level) pairs over observed lines, by tid."""
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.dim)]
        for t in self.observed():
            adj[t.lower].append((t.tid, t.upper))
            adj[t.upper].append((t.tid, t.lower))
        return tuple(tuple(sorted(a)) for a in adj)

    @cached_property
    def components(self) -> np.ndarray:
        """Connected-component id per level; isolated levels get their own id."""
        comp = np.full(self.dim, -1)
        label = 0
        for start in range(self.dim):
            if comp[start] >= 0:
                continue
            comp[start] = label
            queue = deque([start])
            while queue:
                s = queue.popleft()
                for _, o in self.neighbors[s]:
                    if comp[o] < 0:
                        comp[o] = label
                        queue.append(o)
            label += 1
        return comp

    def isolated_levels(self) -> list[int]:
        return [s for s in range(self.dim) if not self.neighbors[s]]


def transition_amplitudes(eig: EigenSystem) -> dict[tuple[int, int], float]:
    """<lower|F+|upper> for every pair with M(lower) = M(upper) + 1."""
    fp = raising_operator(eig.n_total)
    out = {}
    for m in sorted(set(eig.mz.tolist()), reverse=True):
        lo = np.flatnonzero(eig.mz == m)
        up = np.flatnonzero(eig.mz == m - 1)
        if up.size == 0:
            continue
        amp = eig.vectors[lo] @ fp @ eig.vectors[up].T
        for a, s in enumerate(lo):
            for b, t in enumerate(up):
                out[(int(s), int(t))] = float(amp[a, b])
    return out


def transitions(eig: EigenSystem, system: SpinSystem | None = None, threshold: float | None = None) -> TransitionTable:
    """Enumerate every Delta M = 1 pair, flag observed lines and number them."""
    if threshold is None:
        threshold = system.intensity_threshold if system is not None else DEFAULT_INTENSITY_THRESHOLD
    amps = transition_amplitudes(eig)
    raw = []
    for (s, t), a in amps.items():
        raw.append((s, t, float(eig.energies[s] - eig.energies[t]), a * a))
    imax = max((r[3] for r in raw), default=0.0)
    cut = threshold * imax
    obs = [r for r in raw if r[3] >= cut and r[3] > 0]
    unobs = [r for r in raw if not (r[3] >= cut and r[3] > 0)]

    def key(r):
        return (-round(r[2], 6), r[0], r[1])

    rows = [(r, True) for r in sorted(obs, key=key)] + [(r, False) for r in sorted(unobs, key=key)]
    trs = tuple(
        Transition(tid=i + 1, lower=r[0], upper=r[1], frequency=r[2], intensity=r[3], observed=o)
        for i, (r, o) in enumerate(rows)
    )
    return TransitionTable(trs, eig.mz.copy(), eig.energies.copy(), threshold)


def analyze(system: SpinSystem) -> tuple[EigenSystem, TransitionTable]:
    eig = diagonalize(build_hamiltonian(system))
    return eig, transitions(eig, system)
