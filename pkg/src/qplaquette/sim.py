"""Mixed-dimension qudit statevector simulator and the physical-subspace comparison.

States are arrays of shape ``dims + (batch,)``; a batch of basis columns is how
circuit actions on the physical subspace are evaluated without ever forming
the full unitary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .gates import GCX, Diag, GateList, Givens, Phase1
from .gauge import enumerate_physical
from .plaquette import EvolutionParams, basis_index, physical_plaquette
from .qalgebra import Truncation, _k
from .synth import register_dims

# Full circuit unitaries are dense; above this total dimension use compare_on_physical.
DENSE_GUARD = 4096
UNITARITY_TOL = 1e-10
LEAK_TOL = 1e-10


@dataclass(frozen=True)
class RegisterSpec:
    dims: tuple[int, ...]

    @property
    def total(self) -> int:
        return math.prod(self.dims)

    def index(self, levels) -> int:
        if len(levels) != len(self.dims):
            raise ValueError("one level per register required")
        idx = 0
        for lv, d in zip(levels, self.dims):
            if not 0 <= lv < d:
                raise ValueError(f"level {lv} outside register of dimension {d}")
            idx = idx * d + lv
        return idx


def _check(gate, dims):
    GateList(tuple(dims)).append(gate)


def apply_gate(state: np.ndarray, gate, dims) -> np.ndarray:
    """Apply one gate in place to a state of shape ``dims + (batch,)`` and return it."""
    dims = tuple(dims)
    if state.shape[: len(dims)] != dims:
        raise ValueError(f"state shape {state.shape} does not match registers {dims}")
    _check(gate, dims)
    n = len(dims)

    def at(reg, level):
        idx = [slice(None)] * (n + 1)
        idx[reg] = level
        return tuple(idx)

    if isinstance(gate, GCX):
        sub = state[at(gate.c, gate.cl)]  # view with the control axis removed
        t = gate.t - (gate.t > gate.c)
        i0 = [slice(None)] * sub.ndim
        i1 = [slice(None)] * sub.ndim
        i0[t], i1[t] = gate.x
        tmp = sub[tuple(i0)].copy()
        sub[tuple(i0)] = sub[tuple(i1)]
        sub[tuple(i1)] = tmp
    elif isinstance(gate, Givens):
        u = gate.matrix()
        a0 = state[at(gate.t, gate.l[0])].copy()
        a1 = state[at(gate.t, gate.l[1])]
        state[at(gate.t, gate.l[0])] = u[0, 0] * a0 + u[0, 1] * a1
        state[at(gate.t, gate.l[1])] = u[1, 0] * a0 + u[1, 1] * a1
    elif isinstance(gate, Diag):
        for level, phi in enumerate(gate.p):
            if phi != 0.0:
                state[at(gate.t, level)] *= np.exp(1j * phi)
    elif isinstance(gate, Phase1):
        state[at(gate.t, gate.l)] *= np.exp(1j * gate.p)
    return state


def run(circuit: GateList, columns: np.ndarray) -> np.ndarray:
    """Apply the circuit to a (total, batch) array of column vectors."""
    dims = circuit.dims
    state = np.array(columns, dtype=complex).reshape(dims + (-1,))
    for g in circuit.gates:
        apply_gate(state, g, dims)
    return state.reshape(math.prod(dims), -1)


def basis_columns(dims, indices) -> np.ndarray:
    cols = np.zeros((math.prod(dims), len(indices)), dtype=complex)
    cols[np.asarray(indices, dtype=int), np.arange(len(indices))] = 1.0
    return cols


def circuit_unitary(circuit: GateList) -> np.ndarray:
    total = math.prod(circuit.dims)
    if total > DENSE_GUARD:
        raise ValueError(f"dense unitary of dimension {total} exceeds the guard {DENSE_GUARD}")
    U = run(circuit, np.eye(total, dtype=complex))
    err = np.abs(U.conj().T @ U - np.eye(total)).max() if total else 0.0
    if err > UNITARITY_TOL:
        raise ArithmeticError(f"circuit not unitary: max |U^dag U - I| = {err:.3e}")
    return U


@dataclass(frozen=True)
class PhysicalProjector:
    """Physical basis states (lexicographic) with the auxiliary register at level 0."""

    k: int
    states: tuple[tuple[int, ...], ...]

    @property
    def dims(self) -> tuple[int, ...]:
        return register_dims(self.k)

    @property
    def system_indices(self) -> np.ndarray:
        d = self.k + 1
        return np.array([basis_index(s, d) for s in self.states], dtype=int)

    @property
    def indices(self) -> np.ndarray:
        # the auxiliary register is the last, fastest index
        return self.system_indices * self.dims[-1]

    def matrix(self) -> np.ndarray:
        return basis_columns(self.dims, self.indices)


def physical_projector(trunc: Truncation | int) -> PhysicalProjector:
    k = _k(trunc)
    return PhysicalProjector(k, tuple(enumerate_physical(k)))


def reference_evolution(trunc: Truncation | int, params: EvolutionParams) -> sp.csr_matrix:
    """exp(i tau plaquette) on the 8 system registers.

    The plaquette vanishes outside the physical block, so the exponential is the
    identity there and a dense Hermitian eigendecomposition inside it.
    """
    k = _k(trunc)
    d = k + 1
    n = d**8
    proj = physical_projector(k)
    block = physical_plaquette(k)
    herm = np.abs(block - block.conj().T).max() if block.size else 0.0
    if herm > 1e-10:
        raise ArithmeticError(f"plaquette not Hermitian: max deviation {herm:.3e}")
    evals, evecs = np.linalg.eigh(block)
    evo = (evecs * np.exp(1j * params.tau * evals)) @ evecs.conj().T
    idx = proj.system_indices
    mask = np.ones(n, dtype=bool)
    mask[idx] = False
    rest = np.nonzero(mask)[0]
    rows = np.concatenate([np.repeat(idx, len(idx)), rest])
    cols = np.concatenate([np.tile(idx, len(idx)), rest])
    vals = np.concatenate([evo.reshape(-1), np.ones(len(rest), dtype=complex)])
    return sp.csr_matrix((vals, (rows, cols)), shape=(n, n))


@dataclass
class Comparison:
    max_deviation: float
    aux_leakage: float
    n_physical: int

    @property
    def amplitude_ok(self) -> bool:
        return self.max_deviation < 1e-8

    @property
    def aux_ok(self) -> bool:
        return self.aux_leakage < LEAK_TOL

    def as_dict(self) -> dict:
        return {
            "max_deviation": self.max_deviation,
            "aux_leakage": self.aux_leakage,
            "n_physical": self.n_physical,
            "amplitude_ok": self.amplitude_ok,
            "aux_ok": self.aux_ok,
        }


def compare_on_physical(circuit: GateList, reference, trunc: Truncation | int, repeats: int = 1) -> Comparison:
    """Column-wise distance between the circuit and the reference on physical inputs.

    Physical basis states (auxiliary at 0) are pushed through the circuit
    ``repeats`` times. Amplitudes on physical rows with the auxiliary at 0 are
    compared with the reference, with no phase freedom; the population left
    outside auxiliary level 0 is reported separately as leakage.
    """
    k = _k(trunc)
    proj = physical_projector(k)
    if tuple(circuit.dims) != proj.dims:
        raise ValueError(f"circuit registers {circuit.dims} do not match k={k} layout {proj.dims}")
    aux_dim = proj.dims[-1]
    out = basis_columns(proj.dims, proj.indices)
    for _ in range(repeats):
        out = run(circuit, out)
    by_aux = out.reshape(-1, aux_dim, out.shape[1])
    leak = float(np.max(np.sum(np.abs(by_aux[:, 1:, :]) ** 2, axis=(0, 1)))) if aux_dim > 1 else 0.0
    sys_idx = proj.system_indices
    got = by_aux[sys_idx, 0, :]
    ref = reference[sys_idx, :][:, sys_idx]
    ref = ref.toarray() if sp.issparse(ref) else np.asarray(ref)
    if repeats > 1:
        ref = np.linalg.matrix_power(ref, repeats)
    dev = float(np.max(np.linalg.norm(got - ref, axis=0))) if got.size else 0.0
    return Comparison(dev, leak, len(sys_idx))
