import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qplaquette import qalgebra
from qplaquette.qalgebra import Truncation, admissible, f_symbol, q_factorial, q_number, six_j, triangle_delta


def test_frozen_f_symbols(derived):
    worst = 0.0
    for k, spins, value in derived["f_symbols"]:
        worst = max(worst, abs(f_symbol(*spins, k) - value))
    assert worst < 1e-12


def test_small_values():
    assert q_number(2, 1) == pytest.approx(1.0, abs=1e-14)
    assert q_factorial(2, 2) == pytest.approx(math.sqrt(2), abs=1e-14)
    assert triangle_delta((1, 1, 2), 2) == pytest.approx(1 / math.sqrt(2), abs=1e-14)


def test_q_number_vanishes_at_root():
    for k in range(6):
        assert abs(q_number(k + 2, k)) < 1e-14
        assert q_number(1, k) == pytest.approx(1.0)


def test_truncation_rejects_negative():
    with pytest.raises(ValueError):
        Truncation(-1)


def test_spins_out_of_range():
    with pytest.raises(ValueError):
        f_symbol(0, 0, 0, 0, 0, 3, 2)


def test_zero_outside_fusion():
    # (1, 1, 1) never fuses since the doubled sum is odd
    assert f_symbol(1, 1, 1, 1, 1, 1, 3) == 0.0
    assert not admissible((2, 2, 2), 2)  # a + b + c > 2k
    assert admissible((2, 2, 2), 3)


@settings(max_examples=60, deadline=None)
@given(k=st.integers(0, 40), data=st.data())
def test_q_number_inversion(k, data):
    n = data.draw(st.integers(0, k + 2))
    assert q_number(n, k) == pytest.approx(q_number(k + 2 - n, k), abs=1e-12)


@st.composite
def admissible_tuple(draw):
    k = draw(st.integers(1, 8))
    spin = st.integers(0, k)
    while True:
        a, b, e, c, d, f = (draw(spin) for _ in range(6))
        triads = [(a, b, e), (c, d, e), (a, d, f), (c, b, f)]
        if all(admissible(t, k) for t in triads):
            return k, (a, b, e, c, d, f)


@settings(max_examples=80, deadline=None)
@given(admissible_tuple())
def test_tetrahedral_symmetry_of_six_j(case):
    k, (a, b, e, c, d, f) = case
    v = six_j(a, b, e, c, d, f, k)
    assert six_j(b, a, e, d, c, f, k) == pytest.approx(v, abs=1e-12)
    assert six_j(e, a, b, f, c, d, k) == pytest.approx(v, abs=1e-12)
    assert six_j(c, d, e, a, b, f, k) == pytest.approx(v, abs=1e-12)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_unitarity_and_pentagon(k):
    assert qalgebra.orthogonality_deviation(k) < 1e-12
    assert qalgebra.pentagon_deviation(k) < 1e-12
    assert qalgebra.exchange_deviation(k) < 1e-12


def test_sampled_pentagon_k6():
    assert qalgebra.pentagon_deviation(6, samples=2000, seed=3) < 1e-12


def test_f_table_matches_scalar():
    k = 2
    tab = qalgebra.f_table(k)
    rng = np.random.default_rng(0)
    for idx in rng.integers(0, k + 1, size=(50, 6)):
        assert tab[tuple(idx)] == pytest.approx(f_symbol(*map(int, idx), k), abs=1e-14)
