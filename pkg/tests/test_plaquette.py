import math

import numpy as np
import pytest

from qplaquette.plaquette import (
    EvolutionParams,
    box_triple_prime,
    fhi_check,
    fhi_deviation,
    g_move,
    phased_f_block,
    physical_plaquette,
    source_levels,
    target_levels,
    verify_f_sequence,
)
from qplaquette.synth import control_sectors


def test_params_validation():
    with pytest.raises(ValueError):
        EvolutionParams(float("nan"))
    with pytest.raises(ValueError):
        EvolutionParams(0.1, g_squared=0)
    p = EvolutionParams.from_time(1.0, 2.0, 4)
    assert p.tau == pytest.approx(0.125)


def test_box_matches_tables(tables):
    for k in (1, 2):
        printed = np.array([[complex(*z) for z in row] for row in tables[str(k)]["box"]["0"]["matrix"]])
        assert np.abs(box_triple_prime(0, k) - printed).max() < 1e-12


def test_box_k1():
    assert np.allclose(g_move(0, 1).spectrum, [1, -1])


def test_box_k2_spectrum():
    gm = g_move(0, 2)
    assert np.allclose(gm.spectrum, [math.sqrt(2), 0, -math.sqrt(2)])
    box = box_triple_prime(0, 2)
    assert np.allclose(gm.G @ box @ gm.G.conj().T, np.diag(gm.diagonal), atol=1e-12)


@pytest.mark.parametrize("k", range(1, 9))
def test_spectrum_antisymmetric(k):
    for J in range(0, k + 1, 2):
        s = g_move(J, k).spectrum
        assert np.allclose(s, -s[::-1], atol=1e-10)


@pytest.mark.parametrize("k", range(1, 13))
def test_persymmetry(k):
    assert fhi_deviation(k) < 1e-12
    assert fhi_check(k)


def test_fhi_needs_positive_k():
    with pytest.raises(ValueError):
        fhi_check(0)


def test_plaquette_hermitian_k1():
    h = physical_plaquette(1)
    assert h.shape == (16, 16)
    assert np.abs(h - h.conj().T).max() < 1e-12


@pytest.mark.parametrize("move", ["F1", "F2", "F3"])
@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_f_blocks_are_isometries(move, k):
    for sec in control_sectors(move, k):
        src = source_levels(move, sec.spins, k)
        tgt = target_levels(move, sec.spins, k)
        assert len(src) == len(tgt)
        blk = phased_f_block(move, sec.spins, k)[np.ix_(tgt, src)]
        assert np.abs(blk.conj().T @ blk - np.eye(len(src))).max() < 1e-12


@pytest.mark.parametrize("k", [1, 2])
def test_f_sequence(k):
    rep = verify_f_sequence(k)
    assert rep.passed, [c for c in rep.checks if not c["passed"]]


def test_f_sequence_independent_of_completion():
    rep = verify_f_sequence(1, gvc="random")
    assert rep.passed


def test_f_sequence_guard():
    with pytest.raises(ValueError):
        verify_f_sequence(4)
