"""Products of single-spin polarization operators and the original (weak
coupling) Liouville-space search built on them.

A product is written as one character per spin, ancilla first:
``"0"`` for I^alpha = |0><0|, ``"1"`` for I^beta = |1><1| and ``"*"`` for the
identity of that spin. ``"00*"`` is I_0^0 I_1^0 1_2.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

ALPHA, BETA, IDENTITY = "0", "1", "*"

ALPHA_PROJECTOR = np.array([[1.0, 0.0], [0.0, 0.0]])
BETA_PROJECTOR = np.array([[0.0, 0.0], [0.0, 1.0]])


def iz() -> np.ndarray:
    return np.diag([0.5, -0.5])


@dataclass(frozen=True)
class PolarizationProduct:
    factors: str

    def __post_init__(self):
        if not self.factors or set(self.factors) - {ALPHA, BETA, IDENTITY}:
            raise ValueError(f"invalid polarization product {self.factors!r}")

    @classmethod
    def initial(cls, n_work: int, k: int) -> "PolarizationProduct":
        """I_0^0 I_k^0 with identities on every other work spin."""
        f = [IDENTITY] * (n_work + 1)
        f[0] = ALPHA
        f[k] = ALPHA
        return cls("".join(f))

    @property
    def n_spins(self) -> int:
        return len(self.factors)

    def __mul__(self, other: "PolarizationProduct") -> "PolarizationProduct | None":
        """Operator product; None when the result vanishes (I^alpha I^beta = 0)."""
        if self.n_spins != other.n_spins:
            raise ValueError("products act on different spin counts")
        out = []
        for a, b in zip(self.factors, other.factors):
            if a == IDENTITY:
                out.append(b)
            elif b == IDENTITY or a == b:
                out.append(a)
            else:
                return None
        return PolarizationProduct("".join(out))

    def support(self):
        """Basis bit-strings with unit population, generated lazily."""
        choices = [(f,) if f != IDENTITY else (ALPHA, BETA) for f in self.factors]
        for bits in product(*choices):
            yield "".join(bits)

    def support_size(self) -> int:
        return 2 ** self.factors.count(IDENTITY)

    def contains(self, bits: str) -> bool:
        return len(bits) == self.n_spins and all(f in (IDENTITY, b) for f, b in zip(self.factors, bits))

    def matrix(self) -> np.ndarray:
        """Dense Kronecker product of the single-spin factors."""
        mats = {ALPHA: ALPHA_PROJECTOR, BETA: BETA_PROJECTOR, IDENTITY: np.eye(2)}
        out = np.ones((1, 1))
        for f in self.factors:
            out = np.kron(out, mats[f])
        return out


def expand(prod_op: PolarizationProduct) -> np.ndarray:
    """Diagonal of the product in the Zeeman basis."""
    pop = np.zeros(2**prod_op.n_spins)
    for bits in prod_op.support():
        pop[int(bits, 2)] = 1.0
    return pop


def oracle_weak(pop: np.ndarray, marked_bits: str) -> np.ndarray:
    """Swap the populations of |0 psi_m> and |1 psi_m>."""
    n_work = len(marked_bits)
    if pop.size != 2 ** (n_work + 1):
        raise ValueError("state size does not match the marked bit-string")
    out = np.array(pop, dtype=float)
    lo = int("0" + marked_bits, 2)
    hi = int("1" + marked_bits, 2)
    out[lo], out[hi] = out[hi], out[lo]
    return out


def readout_ancilla(pop: np.ndarray) -> list[tuple[str, float]]:
    """Ancilla spectrum: one signed peak per work configuration carrying population."""
    pop = np.asarray(pop, dtype=float)
    n_work = int(round(np.log2(pop.size))) - 1
    rows = pop.reshape(2, -1)
    present = (rows[0] != 0) | (rows[1] != 0)
    diff = rows[0] - rows[1]
    return [(format(w, f"0{n_work}b"), float(diff[w])) for w in np.flatnonzero(present)]


class WeakOracle:
    """Hidden-state oracle for the weak path; counts its invocations."""

    def __init__(self, marked_bits: str):
        self._marked = marked_bits
        self.calls = 0

    @property
    def n_work(self) -> int:
        return len(self._marked)

    def __call__(self, pop: np.ndarray) -> np.ndarray:
        self.calls += 1
        return oracle_weak(pop, self._marked)


def decide_weak(peaks: list[tuple[str, float]]) -> int:
    """All peaks positive: the probed work bit is 1; a negative peak: it is 0."""
    return 0 if any(a < 0 for _, a in peaks) else 1
