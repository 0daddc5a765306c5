"""Row-by-row comparison with the transcribed k=1 and k=2 gate tables."""

import json
from pathlib import Path

import numpy as np
import pytest

from qplaquette import synth
from qplaquette.plaquette import box_triple_prime, g_move, phased_f_element

TABLES = json.loads((Path(__file__).parent / "fixtures" / "gate_tables.json").read_text())
GATES = {
    "I": np.eye(2),
    "Y": np.array([[0, -1j], [1j, 0]]),
    "X": np.array([[0, 1], [1, 0]]),
    "H": np.array([[1, 1], [1, -1]]) / np.sqrt(2),
}


def named_gate(name, d):
    sign = -1 if name.startswith("-") else 1
    base = name.lstrip("-")
    U = np.eye(d, dtype=complex)
    if base != "I":
        lv = [int(base[1]), int(base[2])]
        U[np.ix_(lv, lv)] = GATES[base[0]]
    return sign * U


def rows(part):
    for k in ("1", "2"):
        for row in TABLES[k][part]:
            yield pytest.param(int(k), row, id=f"k{k}-{row['controls']}-{row['j']}to{row['J']}")


@pytest.mark.parametrize("k,row", list(rows("F12")))
def test_f12_rows(k, row):
    want = complex(*row["amplitude"])
    for move in ("F1", "F2"):
        ctl = tuple(row["controls"])
        assert abs(phased_f_element(move, ctl, row["J"], row["j"], k) - want) < 1e-12
        u = synth.gvc_complete(synth.ControlSector(move, ctl, (), 0), k).matrix
        assert abs(u[row["J"], row["j"]] - named_gate(row["gate"], k + 1)[row["J"], row["j"]]) < 1e-12


@pytest.mark.parametrize("k,row", list(rows("F3")))
def test_f3_rows(k, row):
    ctl = tuple(row["controls"])
    assert abs(phased_f_element("F3", ctl, row["J"], row["j"], k) - complex(*row["amplitude"])) < 1e-12
    u = synth.gvc_complete(synth.ControlSector("F3", ctl, (), 0), k).matrix
    assert abs(u[row["J"], row["j"]] - named_gate(row["gate"], k + 1)[row["J"], row["j"]]) < 1e-12


@pytest.mark.parametrize("k", [1, 2])
def test_box_and_diagonal(k):
    entry = TABLES[str(k)]["box"]["0"]
    printed = np.array([[complex(*z) for z in r] for r in entry["matrix"]])
    box = box_triple_prime(0, k)
    assert np.abs(box - printed).max() < 1e-12
    gm = g_move(0, k)
    assert np.abs(gm.G @ box @ gm.G.conj().T - np.diag(entry["diagonal"])).max() < 1e-12


def test_k1_minus_y_physical_entry():
    # the physical transition of sector {1,0,0,1} carries the -Y amplitude
    u = synth.gvc_complete(synth.ControlSector("F1", (1, 0, 0, 1), (), 0), 1)
    j = u.source[0]
    J = u.active_levels[0]
    assert abs(u.matrix[J, j] - named_gate("-Y01", 2)[J, j]) < 1e-12
