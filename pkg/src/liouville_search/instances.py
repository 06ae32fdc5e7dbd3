"""Synthetic spin systems: random strongly coupled sets, weakly coupled
reference systems and a fixed 4-spin instance with one missing ancilla pair."""

from __future__ import annotations

import numpy as np

from .errors import ConstraintViolation, NoMatching
from .labeler import conventional_labeling, find_ancilla_matchings, label_system, maximum_matching_size
from .search import LabeledInstance
from .spin_core import DEFAULT_INTENSITY_THRESHOLD, SpinSystem, analyze


def _symmetric(rng, n, scale):
    m = np.zeros((n, n))
    iu = np.triu_indices(n, 1)
    m[iu] = rng.uniform(-scale, scale, size=len(iu[0]))
    return m + m.T


def random_strong_system(
    n_total: int,
    seed: int | np.random.Generator = 0,
    shift_spread: float = 1000.0,
    dipolar_scale: float = 600.0,
    scalar_scale: float = 10.0,
    threshold: float = DEFAULT_INTENSITY_THRESHOLD,
) -> SpinSystem:
    """Shifts and dipolar couplings of comparable size, so spins mix strongly."""
    rng = np.random.default_rng(seed)
    shifts = rng.uniform(-shift_spread / 2, shift_spread / 2, size=n_total)
    return SpinSystem(
        shifts,
        _symmetric(rng, n_total, dipolar_scale),
        _symmetric(rng, n_total, scalar_scale),
        threshold,
    )


def weak_system(
    n_total: int,
    seed: int | np.random.Generator = 0,
    spacing: float = 2000.0,
    threshold: float = DEFAULT_INTENSITY_THRESHOLD,
) -> SpinSystem:
    """Well-separated shifts, small J couplings and no dipolar couplings."""
    rng = np.random.default_rng(seed)
    shifts = spacing * (n_total - np.arange(n_total)) + rng.uniform(-spacing / 10, spacing / 10, size=n_total)
    scalar = np.abs(_symmetric(rng, n_total, 12.0)) + 2.0 - 2.0 * np.eye(n_total)
    return SpinSystem(shifts, None, scalar, threshold)


def conventional_instance(system: SpinSystem) -> LabeledInstance:
    eig, table = analyze(system)
    return LabeledInstance(system, eig, table, conventional_labeling(eig, table))


def random_labeled_instances(n_total: int, count: int, seed: int = 0, max_tries: int = 10_000, **kw):
    """First ``count`` random strongly coupled systems whose observed lines admit a
    perfect ancilla matching and a constraint-satisfying labeling."""
    rng = np.random.default_rng(seed)
    out = []
    tries = 0
    while len(out) < count:
        tries += 1
        if tries > max_tries:
            raise RuntimeError(f"found only {len(out)} of {count} instances")
        system = random_strong_system(n_total, rng, **kw)
        eig, table = analyze(system)
        if maximum_matching_size(table) != 2 ** (n_total - 1):
            continue
        try:
            labeling = label_system(table)
        except (ConstraintViolation, NoMatching):
            continue
        out.append(LabeledInstance(system, eig, table, labeling))
    return out


def count_matchings(system: SpinSystem) -> int:
    _, table = analyze(system)
    return len(find_ancilla_matchings(table))


# Draw 12239 of random_strong_system(4, seed). Its 32 observed lines admit at
# most 7 disjoint ones, the unmatched pair receives work label 111 and |0111>
# has no observed line at all. scripts/find_missing_pair.py reproduces the search.
_MISSING_PAIR_SHIFTS = [259.89532238642846, -374.3847715893579, -383.49594727952217, 175.7822567910182]
_MISSING_PAIR_DIPOLAR = [
    [0.0, 331.90388830160623, 341.14163159785517, 436.72903909717115],
    [331.90388830160623, 0.0, 408.8697238106424, -109.65373924380697],
    [341.14163159785517, 408.8697238106424, 0.0, -120.29111838664704],
    [436.72903909717115, -109.65373924380697, -120.29111838664704, 0.0],
]
_MISSING_PAIR_SCALAR = [
    [0.0, 8.684458887879533, -6.843708074066253, 4.294357514992113],
    [8.684458887879533, 0.0, 9.722377582673552, 5.396333442405387],
    [-6.843708074066253, 9.722377582673552, 0.0, 3.275589434206541],
    [4.294357514992113, 5.396333442405387, 3.275589434206541, 0.0],
]


def missing_pair_system(threshold: float = DEFAULT_INTENSITY_THRESHOLD) -> SpinSystem:
    """Fixed strongly coupled 4-spin system whose best ancilla matching has 7 lines."""
    return SpinSystem(_MISSING_PAIR_SHIFTS, _MISSING_PAIR_DIPOLAR, _MISSING_PAIR_SCALAR, threshold)


def missing_pair_instance() -> LabeledInstance:
    return LabeledInstance.build(missing_pair_system())
