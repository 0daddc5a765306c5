from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qplaquette import synth
from qplaquette.gates import GCX, GateList
from qplaquette.plaquette import EvolutionParams, basis_index, phased_f_block, target_levels
from qplaquette.sim import basis_columns, circuit_unitary, run


def test_sector_counts_k1():
    assert len(synth.control_sectors("F1", 1)) == 8
    assert len(synth.control_sectors("F2", 1)) == 8
    assert len(synth.control_sectors("F3", 1)) == 4


def test_sector_counts_k2():
    assert len(synth.control_sectors("F1", 2)) == 33
    assert len(synth.control_sectors("F3", 2)) == 11


def test_unphysical_control_excluded():
    spins = {s.spins for s in synth.control_sectors("F1", 3)}
    assert (0, 2, 3, 3) not in spins
    assert (2, 1, 2, 1) in spins


def test_k3_block_values():
    a = (np.sqrt(5) - 1) / 2
    b = ((3 - np.sqrt(5)) / 2) ** 0.25
    blk = phased_f_block("F1", (2, 1, 2, 1), 3)[np.ix_([1, 3], [1, 3])]
    assert np.allclose(blk, [[a, b], [b, -a]], atol=1e-12)


def test_k3_centered_completion():
    a = (np.sqrt(5) - 1) / 2
    b = ((3 - np.sqrt(5)) / 2) ** 0.25
    u = synth.gvc_complete(synth.ControlSector("F1", (2, 2, 1, 1), (), 0), 3)
    assert u.centering == [(0, 1), (2, 3)]
    x01x23 = np.eye(4)[[1, 0, 3, 2]]
    centred = u.matrix @ x01x23
    want = np.eye(4, dtype=complex)
    want[np.ix_([0, 2], [0, 2])] = [[1j * b, 1j * a], [1j * a, -1j * b]]
    assert np.allclose(centred, want, atol=1e-12)


def test_totals_match_formulas(derived):
    for row in derived["level_distribution"]:
        k = row["k"]
        assert sum(row["n4"]) == synth.sector_total(4, k)
        assert sum(row["n3"]) == synth.sector_total(3, k)
        if 1 <= k <= 6:
            assert len(synth.control_sectors("F1", k)) == synth.sector_total(4, k)
            assert len(synth.control_sectors("F3", k)) == synth.sector_total(3, k)
            assert len(synth.control_sectors("G", k)) == sum(
                synth.level_distribution(1, m, k) for m in range(1, k + 2)
            )


def test_gcx_formula_table(derived):
    for row in derived["gcx"]:
        k = row["k"]
        for scheme in ("nondeformed_reference", "baseline", "reduced"):
            assert synth.gcx_count(scheme, k) == row[scheme]


def test_published_counts():
    assert synth.gcx_count("nondeformed_reference", 1) == 62
    assert synth.gcx_count("reduced", 1) == 306
    assert synth.gcx_count("parity_k1", 1) == 48
    with pytest.raises(ValueError):
        synth.gcx_count("parity_k1", 2)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_baseline_emission_matches_formula(k):
    assert synth.emit_trotter_step(k, EvolutionParams(0.2), "baseline").gcx_count() == synth.gcx_count("baseline", k)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_reduced_emission_is_formula_plus_centering(k):
    emitted = synth.emit_trotter_step(k, EvolutionParams(0.2), "reduced").gcx_count()
    assert emitted == synth.gcx_count("reduced", k) + synth.centering_count(k)


def test_parity_circuit_size():
    gl = synth.emit_parity_circuit_k1(EvolutionParams(0.4))
    assert gl.gcx_count() == 48
    with pytest.raises(ValueError):
        synth.emit_trotter_step(2, EvolutionParams(0.4), "parity_k1")


@pytest.mark.parametrize("move", ["F1", "F2", "F3"])
@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_completion_contains_physical_block(move, k):
    for s in synth.control_sectors(move, k):
        for gvc in ("canonical", "random"):
            u = synth.gvc_complete(s, k, gvc, seed=5)
            blk = phased_f_block(move, s.spins, k)
            assert np.allclose(u.matrix[:, u.source], blk[:, u.source], atol=1e-12)
            assert np.abs(u.matrix.conj().T @ u.matrix - np.eye(k + 1)).max() < 1e-12


def test_transpositions_realize_permutation():
    rng = np.random.default_rng(1)
    for _ in range(50):
        perm = list(rng.permutation(7))
        at = list(range(7))
        for a, b in synth._transpositions(perm):
            at[a], at[b] = at[b], at[a]
        assert all(at[perm[i]] == i for i in range(7))


def _gates_unitary(gates, dims):
    gl = GateList(dims, [])
    gl.extend(gates)
    return circuit_unitary(gl)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 5), st.integers(0, 2**31))
def test_givens_lowering_reassembles(m, seed):
    rng = np.random.default_rng(seed)
    z = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
    V, _ = np.linalg.qr(z)
    d = m + 1
    levels = sorted(rng.choice(d, size=m, replace=False).tolist())
    U = _gates_unitary(synth.givens_lower(V, 0, levels, d), (d,))
    want = np.eye(d, dtype=complex)
    want[np.ix_(levels, levels)] = V
    assert np.abs(U - want).max() < 1e-10


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=2, max_size=4), st.integers(0, 1))
def test_controlled_diag_reassembles(betas, ctrl_level):
    m = len(betas)
    d = m
    gates = synth.controlled_diag(betas, list(range(m)), (0, ctrl_level), 1, d)
    U = _gates_unitary(gates, (2, d))
    want = np.ones(2 * d, dtype=complex)
    want[ctrl_level * d:(ctrl_level + 1) * d] = np.exp(1j * np.array(betas))
    assert np.abs(U - np.diag(want)).max() < 1e-10
    assert sum(isinstance(g, GCX) for g in gates) == 2 * (m - 1)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=1, max_size=3), st.booleans())
def test_antisym_diag_reassembles(half, odd):
    spectrum = np.array(half + ([0.0] if odd else []) + [-x for x in reversed(half)])
    m = len(spectrum)
    gates = synth.decompose_antisym_diag(spectrum, list(range(m)), (0, 1), 1, m)
    U = _gates_unitary(gates, (2, m))
    want = np.ones(2 * m, dtype=complex)
    want[m:] = np.exp(1j * spectrum)
    assert np.abs(U - np.diag(want)).max() < 1e-10
    assert sum(isinstance(g, GCX) for g in gates) == 2 * (m // 2)


def test_antisym_diag_rejects_general_spectrum():
    with pytest.raises(ValueError):
        synth.decompose_antisym_diag([0.1, 0.3], [0, 1], (0, 1), 1, 2)


def test_decompose_controlled_reassembles_k1():
    k = 1
    dims = synth.register_dims(k)
    for move in ("F1", "F3"):
        nc = len(synth.MOVES[move].controls)
        for s in synth.control_sectors(move, k):
            u = synth.gvc_complete(s, k)
            for scheme in ("reduced", "baseline"):
                gates = synth.decompose_controlled(u, nc, k, scheme)
                gl = GateList(dims, [])
                gl.extend(gates)
                # the reduced circuit may complete the unphysical levels differently,
                # so only the physical source columns are compared there
                cols = u.source if scheme == "reduced" else range(k + 1)
                for lv in cols:
                    state = [0] * 8
                    for c, v in zip(s.controls, s.spins):
                        state[c] = v
                    state[s.target] = lv
                    col = basis_columns(dims, [basis_index(state, k + 1) * synth.AUX_DIM])
                    out = run(gl, col).reshape(-1, synth.AUX_DIM)
                    assert np.sum(np.abs(out[:, 1:]) ** 2) < 1e-20
                    for lo in range(k + 1):
                        state[s.target] = lo
                        got = out[basis_index(state, k + 1), 0]
                        assert abs(got - u.matrix[lo, lv]) < 1e-10


def test_resource_report():
    rep = synth.resource_report("reduced", 1, emit=True)
    assert rep.gcx_total == 306
    assert rep.emitted == 306 + rep.centering
    assert sum(synth.resource_breakdown("baseline", 3).values()) == synth.gcx_count("baseline", 3)
