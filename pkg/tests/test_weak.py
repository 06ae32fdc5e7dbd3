from itertools import product

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import IZ

from liouville_search.weak import (
    ALPHA_PROJECTOR,
    BETA_PROJECTOR,
    PolarizationProduct,
    WeakOracle,
    decide_weak,
    expand,
    iz,
    oracle_weak,
    readout_ancilla,
)

factor_strings = st.text(alphabet="01*", min_size=1, max_size=6)


def test_projectors():
    assert ALPHA_PROJECTOR.tolist() == [[1, 0], [0, 0]]
    assert BETA_PROJECTOR.tolist() == [[0, 0], [0, 1]]
    assert np.array_equal(ALPHA_PROJECTOR, 0.5 * np.eye(2) + iz())
    assert np.array_equal(BETA_PROJECTOR, 0.5 * np.eye(2) - iz())
    assert np.array_equal(iz(), IZ.real)


def test_expand_examples():
    assert np.flatnonzero(expand(PolarizationProduct("00*"))).tolist() == [0b000, 0b001]
    assert np.flatnonzero(expand(PolarizationProduct("0101"))).tolist() == [0b0101]
    assert expand(PolarizationProduct("***")).tolist() == [1.0] * 8


@given(factor_strings)
def test_expand_matches_kronecker(f):
    p = PolarizationProduct(f)
    assert np.array_equal(np.diag(p.matrix()), expand(p))
    assert expand(p).sum() == p.support_size() == 2 ** f.count("*")


@given(factor_strings.flatmap(lambda f: st.tuples(st.just(f), st.text(alphabet="01*", min_size=len(f), max_size=len(f)))))
def test_product_is_intersection(pair):
    a, b = (PolarizationProduct(x) for x in pair)
    ab = a * b
    inter = expand(a) * expand(b)
    if ab is None:
        assert not inter.any()
    else:
        assert np.array_equal(expand(ab), inter)
        assert np.array_equal(ab.matrix(), a.matrix() @ b.matrix())


def test_contains():
    p = PolarizationProduct("0*1")
    assert [b for b in ("".join(x) for x in product("01", repeat=3)) if p.contains(b)] == ["001", "011"]
    with pytest.raises(ValueError):
        PolarizationProduct("0x")


def test_initial_products():
    assert PolarizationProduct.initial(3, 1).factors == "00**"
    assert PolarizationProduct.initial(3, 3).factors == "0**0"
    for n in range(1, 6):
        for k in range(1, n + 1):
            assert PolarizationProduct.initial(n, k).support_size() == 2 ** (n - 1)


def test_oracle_weak():
    pop = expand(PolarizationProduct("00*"))
    untouched = oracle_weak(pop, "10")
    assert np.array_equal(untouched, pop)
    moved = oracle_weak(pop, "01")
    assert moved[0b001] == 0 and moved[0b101] == 1
    assert np.array_equal(oracle_weak(moved, "01"), pop)
    with pytest.raises(ValueError):
        oracle_weak(pop, "1")


def test_readout_ancilla():
    pop = expand(PolarizationProduct("00*"))
    peaks = readout_ancilla(pop)
    assert peaks == [("00", 1.0), ("01", 1.0)]
    assert decide_weak(peaks) == 1
    after = readout_ancilla(oracle_weak(pop, "01"))
    assert after == [("00", 1.0), ("01", -1.0)]
    assert decide_weak(after) == 0
    assert readout_ancilla(np.zeros(8)) == []


def test_weak_oracle_counts_calls():
    oracle = WeakOracle("101")
    pop = expand(PolarizationProduct.initial(3, 2))
    oracle(pop)
    oracle(pop)
    assert oracle.calls == 2 and oracle.n_work == 3


def test_lazy_support_for_many_spins():
    p = PolarizationProduct.initial(20, 4)
    first = next(iter(p.support()))
    assert first == "0" * 21
    assert p.support_size() == 2**19
