import inspect
from itertools import product

import numpy as np
import pytest

from liouville_search.engine import Peak, Spectrum, equilibrium_populations, prepare_initial, readout_mf
from liouville_search.errors import EmptySpectrum, UnsearchableState
from liouville_search.instances import conventional_instance, random_labeled_instances, weak_system
from liouville_search.search import (
    Oracle,
    OracleSpec,
    apply_oracle,
    cross_check,
    decide_bit,
    run_search,
    run_weak_search,
)


def _all(n):
    return ["".join(b) for b in product("01", repeat=n)]


def test_index_maps_to_bits():
    assert OracleSpec.from_index(6, 3).marked_bits == "101"
    assert OracleSpec.from_index(1, 2).marked_bits == "00"
    with pytest.raises(ValueError):
        OracleSpec.from_index(9, 3)
    with pytest.raises(ValueError):
        OracleSpec("10a")


def test_fixed_instance_finds_101(missing_pair_instance):
    res = run_search(missing_pair_instance, OracleSpec.from_index(6, 3))
    assert res.bits == "101"
    assert res.counts == [(2, 2), (3, 1), (2, 2)]
    assert res.experiments_run == 4
    assert res.oracle_pulses == 4
    assert [r.k for r in res.records] == [1, 2, 3]


def test_fixed_instance_searchable_states(missing_pair_instance):
    for m in _all(3):
        if m == "111":
            with pytest.raises(UnsearchableState):
                run_search(missing_pair_instance, OracleSpec(m))
        else:
            assert run_search(missing_pair_instance, OracleSpec(m)).bits == m


def test_oracle_is_local(missing_pair_instance):
    lab, table = missing_pair_instance.labeling, missing_pair_instance.table
    eq = equilibrium_populations(table)
    for m in _all(3)[:-1]:
        out = apply_oracle(eq, OracleSpec(m), lab, table)
        changed = np.flatnonzero(out.pop != eq.pop).tolist()
        assert changed == sorted(lab.pair(m))


def test_oracle_counts_applications(missing_pair_instance):
    oracle = Oracle(OracleSpec("010"), missing_pair_instance.labeling, missing_pair_instance.table)
    eq = equilibrium_populations(missing_pair_instance.table)
    assert oracle(oracle(eq)) == eq
    assert oracle.applications == 2
    assert len(oracle.pulse()) == 1


class OneShotSpec:
    """Marked state that may be read once, by the oracle constructor."""

    def __init__(self, bits):
        self._bits = bits
        self.reads = 0

    @property
    def marked_bits(self):
        self.reads += 1
        if self.reads > 1:
            raise AssertionError("marked state read outside the oracle")
        return self._bits


def test_decision_never_sees_marked_state(random_instances):
    params = list(inspect.signature(decide_bit).parameters)
    assert params == ["spectrum", "eps", "single_work_qubit"]
    inst = random_instances[4][0]
    spec = OneShotSpec("110")
    assert run_search(inst, spec).bits == "110"
    assert spec.reads == 1


def test_decide_bit_rules():
    balanced = Spectrum((Peak(1, 3.0, 1.0), Peak(2, 2.0, -1.0)))
    skewed = Spectrum((Peak(1, 3.0, 1.0), Peak(2, 2.0, 1.0)))
    assert decide_bit(balanced) == 1
    assert decide_bit(skewed) == 0
    assert decide_bit(Spectrum((Peak(1, 3.0, 2.0),)), single_work_qubit=True) == 1
    with pytest.raises(EmptySpectrum):
        decide_bit(Spectrum((Peak(1, 3.0, 0.0),)))


@pytest.mark.parametrize("n", range(1, 7))
def test_weak_search_exhaustive(n):
    for m in _all(n):
        res = run_weak_search(n, OracleSpec(m))
        assert res.bits == m
        assert res.oracle_queries == n


def test_weak_search_argument_checks():
    with pytest.raises(ValueError):
        run_weak_search(3, OracleSpec("10"))
    with pytest.raises(ValueError):
        run_weak_search(0, OracleSpec("1"))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_cross_check(n):
    rep = cross_check(n)
    assert rep.ok and rep.agree == rep.total == 2**n


def test_all_zero_marked_state_flips_every_count():
    inst = conventional_instance(weak_system(4, seed=1))
    res = run_search(inst, OracleSpec("000"))
    assert res.bits == "000"
    assert all(pos != neg for pos, neg in res.counts)


def test_counts_dichotomy(random_instances):
    for insts in random_instances.values():
        for inst in insts[:10]:
            for m in _all(inst.n_work):
                res = run_search(inst, OracleSpec(m))
                assert res.bits == m
                for (pos, neg), bit in zip(res.counts, res.bits):
                    assert abs(pos - neg) == (0 if bit == "1" else 2)


def test_search_is_repeatable(random_instances):
    inst = random_instances[3][5]
    a = run_search(inst, OracleSpec("01"))
    b = run_search(inst, OracleSpec("01"))
    assert a.counts == b.counts and a.bits == b.bits


def test_exhaustive_four_work_qubits():
    for inst in random_labeled_instances(5, 4, seed=8):
        for m in _all(4):
            assert run_search(inst, OracleSpec(m)).bits == m


@pytest.mark.parametrize("n_total", [6, 7])
def test_sampled_large_instances(n_total):
    rng = np.random.default_rng(n_total)
    for inst in random_labeled_instances(n_total, 2, seed=1):
        for w in rng.choice(2**inst.n_work, size=8, replace=False):
            m = format(int(w), f"0{inst.n_work}b")
            res = run_search(inst, OracleSpec(m))
            assert res.bits == m
            assert res.experiments_run == inst.n_work + 1


def test_oracle_flips_one_peak(missing_pair_instance):
    lab, table = missing_pair_instance.labeling, missing_pair_instance.table
    res = run_search(missing_pair_instance, OracleSpec("101"))
    tid = Oracle(OracleSpec("101"), lab, table).pulse().steps[0]
    for rec in res.records:
        before = readout_mf(prepare_initial(rec.k, lab, table).rho_in, lab, table).signs()
        flipped = [t for t in before if before[t] != rec.signs[t]]
        assert flipped == ([tid] if rec.k == 2 else [])
