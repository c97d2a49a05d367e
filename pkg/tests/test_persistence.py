import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from oracles import betti_bruteforce, random_filtration
from sparsedtm import Filtration, MetricSpace, PersistenceDiagram, betti_at, build_rips, reduce
from sparsedtm.filtration import FiltrationError

SQUARE = MetricSpace(np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]))


def test_single_vertex():
    assert reduce(Filtration([(0,)], [0.0])).points == [(0, 0.0, math.inf)]


def test_one_merge():
    F = Filtration([(0,), (1,), (0, 1)], [0.0, 0.0, 0.5])
    assert reduce(F).points == [(0, 0.0, 0.5), (0, 0.0, math.inf)]


def test_unit_square():
    F = build_rips(SQUARE, range(4), 2)
    D = reduce(F, 1)
    assert D.in_dim(1).tolist() == [[0.5, math.sqrt(2) / 2]]
    simplices, values = F.simplices, F.values
    for alpha, b1 in ((0.4, 0), (0.6, 1), (0.75, 0)):
        assert betti_bruteforce(simplices, values, alpha, 1)[1] == b1
        assert betti_at(D, 1, alpha) == b1
    assert betti_at(D, 1, -1.0) == 0
    assert betti_at(D, 0, 1e9) == 1


def test_keep_zero_and_sorting():
    F = build_rips(SQUARE, range(4), 2)
    full = reduce(F, 1, keep_zero=True)
    assert any(b == e for _, b, e in full)
    D = reduce(F, 1)
    assert all(b < e for _, b, e in D)
    assert D.points == sorted(D.points)


def test_malformed_filtration():
    F = Filtration([(0,), (0, 1)], [0.0, 1.0])
    with pytest.raises(FiltrationError):
        reduce(F)
    F = Filtration([(0,), (1,), (0, 1)], [0.0, 2.0, 1.0])
    with pytest.raises(FiltrationError):
        reduce(F)


def test_csv_round_trip():
    D = PersistenceDiagram([(0, 0.0, math.inf), (1, 0.5, 0.75), (0, 0.1, 0.3)])
    text = D.to_csv()
    assert text.splitlines()[0] == "dim,birth,death"
    assert "inf" in text
    assert PersistenceDiagram.from_csv(text) == D
    with pytest.raises(ValueError):
        PersistenceDiagram.from_csv("a,b,c\n")
    with pytest.raises(ValueError):
        PersistenceDiagram([(0, 1.0, 0.5)])


def test_random_small_filtrations_match_rank_computation():
    rng = np.random.default_rng(99)
    for _ in range(300):
        simplices, values = random_filtration(rng)
        F = Filtration(simplices, values)
        top = F.dimension
        D = reduce(F, top)
        for alpha in (-0.5, 0.0, 1.0, 2.0, 3.0, 10.0):
            want = betti_bruteforce(F.simplices, F.values, alpha, top)
            got = [betti_at(D, d, alpha) for d in range(top + 1)]
            assert got == want


def _euler(F, alpha):
    return sum((-1) ** (len(s) - 1) for s, v in F if v <= alpha)


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 9), st.just(2)), elements=st.floats(-2, 2, allow_nan=False)))
def test_euler_characteristic(X):
    F = build_rips(MetricSpace(X), range(len(X)), 3)
    D = reduce(F, 3)
    for alpha in np.linspace(0, 3, 7):
        assert _euler(F, alpha) == sum((-1) ** d * betti_at(D, d, alpha) for d in range(4))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_equal_value_reordering_does_not_change_diagram(seed):
    rng = np.random.default_rng(seed)
    simplices, values = random_filtration(rng, max_simplices=12)
    F = Filtration(simplices, values)
    # any order that keeps values sorted and faces before cofaces
    perm = sorted(range(len(F)), key=lambda i: (F.values[i], len(F.simplices[i]), rng.random()))
    G = Filtration([F.simplices[i] for i in perm], F.values[perm], presorted=True)
    assert reduce(G, 3) == reduce(F, 3)


def test_one_essential_class_per_component():
    X = np.array([[0.0, 0.0], [0.1, 0.0], [5.0, 5.0], [5.1, 5.0], [9.0, 0.0]])
    F = build_rips(MetricSpace(X), range(5), 1, alpha_max=1.0)
    D = reduce(F, 1)
    assert sum(1 for d, b, e in D if d == 0 and math.isinf(e)) == 3
