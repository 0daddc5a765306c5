"""Self-check suites shared by ``qplaquette verify`` and the test suite.

Every check yields one row (suite, check, passed, max_dev). Suites take the
truncation k and stay within desk-scale runtimes for k <= 2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import gauge, qalgebra, synth
from .plaquette import EvolutionParams, fhi_deviation, verify_f_sequence
from .sim import compare_on_physical, reference_evolution


@dataclass
class CheckRow:
    suite: str
    check: str
    passed: bool
    max_dev: float

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"


def _row(suite, check, dev, tol):
    return CheckRow(suite, check, bool(dev < tol), float(dev))


def qalgebra_suite(k: int) -> list[CheckRow]:
    rows = []
    for kk in range(1, min(k, 4) + 1):
        rows.append(_row("qalgebra", f"orthogonality k={kk}", qalgebra.orthogonality_deviation(kk), 1e-10))
        rows.append(_row("qalgebra", f"pentagon exhaustive k={kk}", qalgebra.pentagon_deviation(kk), 1e-10))
        rows.append(_row("qalgebra", f"column symmetries k={kk}", qalgebra.exchange_deviation(kk), 1e-10))
    for kk in range(5, min(k, 6) + 1):
        rows.append(_row("qalgebra", f"orthogonality k={kk}", qalgebra.orthogonality_deviation(kk), 1e-10))
        rows.append(
            _row("qalgebra", f"pentagon 10^4 samples k={kk}", qalgebra.pentagon_deviation(kk, samples=10_000), 1e-10)
        )
    inv = max(
        abs(qalgebra.q_number(n, kk) - qalgebra.q_number(kk + 2 - n, kk)) for kk in range(0, k + 1) for n in range(kk + 3)
    )
    rows.append(_row("qalgebra", "q-number inversion", inv, 1e-12))
    return rows


def gauge_suite(k: int) -> list[CheckRow]:
    rows = []
    for kk in range(0, min(k, 5) + 1):
        for deformed in (True, False):
            brute = len(gauge.enumerate_physical(kk, deformed))
            rows.append(
                _row("gauge", f"trace equals enumeration k={kk} deformed={deformed}", abs(gauge.phys_dim(kk, deformed) - brute), 0.5)
            )
    for kk in range(0, max(k, 1) * 10 + 1):
        rows.append(
            _row("gauge", f"closed form k={kk}", abs(gauge.phys_dim_closed_form(kk) - gauge.phys_dim(kk, True)), 0.5)
        )
    return rows


def plaquette_suite(k: int) -> list[CheckRow]:
    rows = []
    if 1 <= k <= 3:
        rep = verify_f_sequence(k)
        for c in rep.checks:
            rows.append(CheckRow("plaquette", f"k={k} {c['check']}", c["passed"], c["max_dev"]))
    for kk in range(1, max(k, 1) * 4 + 1):
        rows.append(_row("fhi", f"persymmetry k={kk}", fhi_deviation(kk), 1e-12))
    return rows


def synth_suite(k: int) -> list[CheckRow]:
    rows = []
    params = EvolutionParams(0.1)
    for scheme in ("baseline", "reduced"):
        emitted = synth.emit_trotter_step(k, params, scheme).gcx_count()
        formula = synth.gcx_count(scheme, k)
        rows.append(_row("synth", f"k={k} {scheme} emitted GCX equals formula", abs(emitted - formula), 0.5))
        if scheme == "reduced":
            extra = synth.centering_count(k)
            rows.append(
                _row("synth", f"k={k} reduced emitted GCX equals formula plus centring", abs(emitted - formula - extra), 0.5)
            )
    for move, nc in (("F1", 4), ("F2", 4), ("F3", 3)):
        hist = {}
        worst = 0.0
        for s in synth.control_sectors(move, k):
            u = synth.gvc_complete(s, k)
            hist[u.m] = hist.get(u.m, 0) + 1
            worst = max(worst, float(np.abs(u.matrix.conj().T @ u.matrix - np.eye(k + 1)).max()))
        mismatch = sum(abs(hist.get(m, 0) - synth.level_distribution(nc, m, k)) for m in range(1, k + 2))
        rows.append(_row("synth", f"k={k} {move} active-level histogram", mismatch, 0.5))
        rows.append(_row("synth", f"k={k} {move} completions unitary", worst, 1e-12))
    return rows


def sim_suite(k: int, tau: float = 0.3) -> list[CheckRow]:
    rows = []
    if k > 2:
        return rows
    params = EvolutionParams(tau)
    ref = reference_evolution(k, params)
    schemes = ["reduced", "baseline"] + (["parity_k1"] if k == 1 else [])
    for scheme in schemes:
        cmp = compare_on_physical(synth.emit_trotter_step(k, params, scheme), ref, k)
        rows.append(_row("sim", f"k={k} {scheme} deviation", cmp.max_deviation, 1e-8))
        rows.append(_row("sim", f"k={k} {scheme} aux leakage", cmp.aux_leakage, 1e-10))
    return rows


SUITES = {
    "qalgebra": qalgebra_suite,
    "gauge": gauge_suite,
    "plaquette": plaquette_suite,
    "synth": synth_suite,
    "sim": sim_suite,
}


def run_suites(names, k: int) -> list[CheckRow]:
    rows = []
    for name in names:
        rows += SUITES[name](k)
    return rows
