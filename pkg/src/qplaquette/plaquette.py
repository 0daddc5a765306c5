"""The plaquette operator, the phased F-moves that compress it, and the G-moves.

Register order is the link order of :mod:`qplaquette.gauge`. A basis state is an
8-tuple of doubled spins and its index is row-major with every register of
dimension d = k+1.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .gauge import JAB, JAT, JLB, JLT, JRB, JRT, QL, QR, enumerate_physical
from .qalgebra import Truncation, _k, admissible, f_symbol

HERMITIAN_TOL = 1e-10

# Dense d^8 x d^8 complex matrices: k=2 is already ~690 MB, so dense stops at k=1.
DENSE_MAX_K = 1


def i_power(n: int) -> complex:
    """i**n for integer n, exactly."""
    return (1, 1j, -1, -1j)[n % 4]


def sign_power(two_x: int) -> complex:
    """(-1)^x for a doubled exponent 2x, taken as i^(2x)."""
    return i_power(two_x)


@dataclass(frozen=True)
class EvolutionParams:
    tau: float
    g_squared: float = 1.0
    n_trotter: int = 1

    def __post_init__(self):
        if not math.isfinite(self.tau):
            raise ValueError("tau must be finite")
        if not self.g_squared > 0:
            raise ValueError("g_squared must be positive")
        if self.n_trotter < 1:
            raise ValueError("n_trotter must be >= 1")

    @classmethod
    def from_time(cls, t: float, g_squared: float, n_trotter: int) -> "EvolutionParams":
        return cls(tau=t / (g_squared * n_trotter), g_squared=g_squared, n_trotter=n_trotter)


# ---------------------------------------------------------------- plaquette


def _plaquette_phase_twice(bra, ket) -> int:
    # 2 * (-d j_a^t - d j_a^b + d q_l + d q_r); always even for nonzero elements
    return -(bra[JAT] - ket[JAT]) - (bra[JAB] - ket[JAB]) + (bra[QL] - ket[QL]) + (bra[QR] - ket[QR])


def plaquette_element(bra, ket, trunc: Truncation | int) -> float:
    """<bra| plaquette |ket> from the four F-symbols with a spin-1/2 column."""
    k = _k(trunc)
    for r in (JLT, JLB, JRT, JRB):
        if bra[r] != ket[r]:
            return 0.0
    jlt, jlb, jrt, jrb = ket[JLT], ket[JLB], ket[JRT], ket[JRB]
    ql, jat, jab, qr = ket[QL], ket[JAT], ket[JAB], ket[QR]
    qlp, jatp, jabp, qrp = bra[QL], bra[JAT], bra[JAB], bra[QR]
    val = f_symbol(jlt, jat, ql, 1, qlp, jatp, k)
    if val == 0.0:
        return 0.0
    val *= f_symbol(jlb, ql, jab, 1, jabp, qlp, k)
    val *= f_symbol(jrt, qr, jat, 1, jatp, qrp, k)
    val *= f_symbol(jrb, jab, qr, 1, qrp, jabp, k)
    if val == 0.0:
        return 0.0
    two_x = _plaquette_phase_twice(bra, ket)
    assert two_x % 2 == 0, "plaquette phase exponent must be an integer"
    return -val if (two_x // 2) % 2 else val


def basis_index(state, d: int) -> int:
    idx = 0
    for s in state:
        idx = idx * d + s
    return idx


def _plaquette_entries(k: int):
    """Nonzero (row_state, col_state, value) triples, ket running over physical states."""
    out = []
    for ket in enumerate_physical(k):
        for shifts in itertools.product((-1, 1), repeat=4):
            bra = list(ket)
            for r, s in zip((QL, JAT, JAB, QR), shifts):
                bra[r] += s
            if min(bra) < 0 or max(bra) > k:
                continue
            val = plaquette_element(bra, ket, k)
            if val != 0.0:
                out.append((tuple(bra), ket, val))
    return out


def plaquette_matrix(trunc: Truncation | int, sparse: bool = False):
    """The plaquette operator on all d^8 basis states.

    Elements only connect physical states, so the matrix is assembled from the
    enumerated physical basis. Dense output is limited to ``DENSE_MAX_K``.
    """
    k = _k(trunc)
    d = k + 1
    n = d**8
    if not sparse and k > DENSE_MAX_K:
        raise ValueError(f"dense plaquette matrix limited to k <= {DENSE_MAX_K}; pass sparse=True")
    entries = _plaquette_entries(k)
    rows = [basis_index(b, d) for b, _, _ in entries]
    cols = [basis_index(c, d) for _, c, _ in entries]
    vals = [v for _, _, v in entries]
    mat = sp.csr_matrix((np.array(vals, dtype=complex), (rows, cols)), shape=(n, n))
    herm = abs(mat - mat.conj().T).max() if mat.nnz else 0.0
    if herm > HERMITIAN_TOL:
        raise ArithmeticError(f"plaquette matrix not Hermitian: max deviation {herm:.3e}")
    return mat if sparse else mat.toarray()


def physical_plaquette(trunc: Truncation | int) -> np.ndarray:
    """Plaquette operator restricted to the lexicographic physical basis."""
    k = _k(trunc)
    basis = enumerate_physical(k)
    pos = {s: i for i, s in enumerate(basis)}
    out = np.zeros((len(basis), len(basis)))
    for bra, ket, val in _plaquette_entries(k):
        out[pos[bra], pos[ket]] = val
    return out


# ---------------------------------------------------------------- phased F-moves


@dataclass(frozen=True)
class Move:
    """Which registers an F-move reads and writes, and how it maps to an F-symbol.

    ``fargs(sector)`` returns the four fixed entries (A, B, C, D) of
    F[A B J; C D j]; ``phase_sign`` is -1 for (-1)^(-j-J) and +1 for (-1)^(j+J).
    """

    name: str
    controls: tuple[int, ...]
    target: int
    phase_sign: int

    def fargs(self, sector):
        if self.name == "F3":
            jab, ql, qr = sector
            return ql, qr, jab, jab
        return tuple(sector)


MOVES = {
    "F1": Move("F1", (JLT, JLB, JAB, JAT), QL, -1),
    "F2": Move("F2", (JAT, JAB, JRB, JRT), QR, -1),
    # sector labels follow the (a, c, d) = (j_a^b, q_l, q_r) ordering of the gate tables
    "F3": Move("F3", (JAB, QL, QR), JAT, +1),
}


def source_levels(move: str, sector, trunc: Truncation | int) -> list[int]:
    """Active-link values that are physical on the lattice before the move."""
    k = _k(trunc)
    a, b, c, d = MOVES[move].fargs(sector)
    return [j for j in range(k + 1) if admissible((a, d, j), k) and admissible((c, b, j), k)]


def target_levels(move: str, sector, trunc: Truncation | int) -> list[int]:
    """Active-link values that are physical on the lattice after the move."""
    k = _k(trunc)
    a, b, c, d = MOVES[move].fargs(sector)
    return [J for J in range(k + 1) if admissible((a, b, J), k) and admissible((c, d, J), k)]


def phased_f_element(move: str, sector, J: int, j: int, trunc: Truncation | int) -> complex:
    """<J| F_move |j> in the given control sector (all doubled spins)."""
    k = _k(trunc)
    mv = MOVES[move]
    a, b, c, d = mv.fargs(sector)
    val = f_symbol(a, b, J, c, d, j, k)
    if val == 0.0:
        return 0j
    return sign_power(mv.phase_sign * (j + J)) * val


def phased_f_block(move: str, sector, trunc: Truncation | int) -> np.ndarray:
    """d x d matrix of phased amplitudes (zero outside the physical block)."""
    k = _k(trunc)
    out = np.zeros((k + 1, k + 1), dtype=complex)
    for J in target_levels(move, sector, k):
        for j in source_levels(move, sector, k):
            out[J, j] = phased_f_element(move, sector, J, j, k)
    return out


# ---------------------------------------------------------------- compressed operator


def active_levels_box(J_two: int, trunc: Truncation | int) -> list[int]:
    k = _k(trunc)
    return [j for j in range(k + 1) if admissible((j, J_two, j), k)]


def box_triple_prime(J_two: int, trunc: Truncation | int) -> np.ndarray:
    """The compressed plaquette operator acting on j_a^b, for control J_a^t = J_two/2."""
    k = _k(trunc)
    out = np.zeros((k + 1, k + 1), dtype=complex)
    for j in range(k + 1):
        for jp in range(k + 1):
            val = f_symbol(j, 1, jp, jp, J_two, j, k)
            if val != 0.0:
                out[jp, j] = sign_power(-(jp - j)) * val
    if J_two % 2:
        assert not out.any(), "half-integer control sector must vanish"
    herm = np.abs(out - out.conj().T).max() if out.size else 0.0
    assert herm < HERMITIAN_TOL, f"box''' not Hermitian ({herm:.2e})"
    return out


@dataclass
class GMove:
    J_two: int
    levels: list[int]
    G: np.ndarray
    spectrum: np.ndarray
    diagonal: np.ndarray = field(repr=False)


def g_move(J_two: int, trunc: Truncation | int) -> GMove:
    """Unitary G with G box''' G^dag diagonal; eigenvalues descending.

    Each eigenvector is rotated so that its largest-magnitude component (first
    one on ties at 1e-9) is real and positive.
    """
    k = _k(trunc)
    if J_two % 2:
        raise ValueError("G-moves are defined for integer J_a^t only")
    box = box_triple_prime(J_two, k)
    levels = active_levels_box(J_two, k)
    sub = box[np.ix_(levels, levels)]
    evals, evecs = np.linalg.eigh(sub)
    order = _descending_order(evals, evecs)
    evals, evecs = evals[order], evecs[:, order]
    for c in range(evecs.shape[1]):
        mags = np.round(np.abs(evecs[:, c]), 9)
        p = int(np.argmax(mags))
        evecs[:, c] *= np.exp(-1j * np.angle(evecs[p, c]))
    G = np.eye(k + 1, dtype=complex)
    G[np.ix_(levels, levels)] = evecs.conj().T
    diagonal = np.zeros(k + 1)
    diagonal[levels] = evals
    return GMove(J_two, levels, G, evals, diagonal)


def _descending_order(evals, evecs):
    # ties broken by the rounded eigenvector entries so the order is reproducible
    keys = []
    for i, lam in enumerate(evals):
        vec = np.round(evecs[:, i], 9)
        keys.append((-round(float(lam), 9), tuple(np.round(np.abs(vec), 9)), i))
    return [key[-1] for key in sorted(keys)]


def electric_casimir(two_j: int, trunc: Truncation | int, deformed: bool) -> float:
    """j(j+1), or the q-deformed [j][j+1] evaluated at half-integer arguments."""
    k = _k(trunc)
    if not deformed:
        return two_j * (two_j + 2) / 4
    s = math.sin(math.pi / (k + 2))

    def qn(x):
        return math.sin(math.pi * x / (k + 2)) / s

    return qn(two_j / 2) * qn(two_j / 2 + 1)


def fhi_check(trunc: Truncation | int, tol: float = 1e-12) -> bool:
    """Persymmetry of every integer sector: <j'|B|j> = <k/2-j|B|k/2-j'>."""
    k = _k(trunc)
    if k < 1:
        raise ValueError("flux hierarchy inversion needs k >= 1")
    return fhi_deviation(k) < tol


def fhi_deviation(trunc: Truncation | int) -> float:
    k = _k(trunc)
    worst = 0.0
    for J_two in range(0, k + 1, 2):
        box = box_triple_prime(J_two, k)
        # reflected[jp, j] = box[k - j, k - jp]
        reflected = box[::-1, ::-1].T
        worst = max(worst, float(np.abs(box - reflected).max()))
    return worst


# ---------------------------------------------------------------- F-sequence oracle


# vertex triads that define physicality after each stage of the sequence
STAGE_VERTICES = {
    0: ((JLT, JAT, QL), (JLB, QL, JAB), (JRT, QR, JAT), (JRB, JAB, QR)),
    1: ((JLT, JLB, QL), (JAB, JAT, QL), (JRT, QR, JAT), (JRB, JAB, QR)),
    2: ((JLT, JLB, QL), (JAB, JAT, QL), (JAT, JAB, QR), (JRB, JRT, QR)),
    3: ((JLT, JLB, QL), (QL, QR, JAT), (JAB, JAB, JAT), (JRB, JRT, QR)),
}


def stage_physical(stage: int, trunc: Truncation | int) -> list[tuple[int, ...]]:
    """Lexicographic basis states admissible at every vertex of the given stage."""
    k = _k(trunc)
    out = []
    for s in itertools.product(range(k + 1), repeat=8):
        if all(admissible(tuple(s[i] for i in v), k) for v in STAGE_VERTICES[stage]):
            out.append(s)
    return out


def expected_after(stage: int, bra, ket, trunc: Truncation | int) -> complex:
    """Closed-form matrix element of the conjugated plaquette after 1, 2 or 3 moves.

    Includes the inserted vertex deltas, so it is meaningful on every basis state.
    """
    k = _k(trunc)
    if stage == 1:
        fixed = (JLT, JLB, QL, JRT, JRB)
    elif stage == 2:
        fixed = (JLT, JLB, QL, QR, JRT, JRB)
    else:
        fixed = (JLT, JLB, QL, QR, JAT, JRT, JRB)
    if any(bra[r] != ket[r] for r in fixed):
        return 0j
    jat, jab, jatp, jabp = ket[JAT], ket[JAB], bra[JAT], bra[JAB]
    Ql, Qr = ket[QL], ket[QR]
    if not admissible((ket[JLT], ket[JLB], Ql), k):
        return 0j
    if stage == 1:
        qr, qrp = ket[QR], bra[QR]
        val = (
            f_symbol(1, jabp, jab, Ql, jat, jatp, k)
            * f_symbol(ket[JRT], qr, jat, 1, jatp, qrp, k)
            * f_symbol(ket[JRB], jab, qr, 1, qrp, jabp, k)
        )
        two_x = -(jatp - jat) - (jabp - jab) + (qrp - qr)
        return sign_power(two_x) * val
    if not admissible((ket[JRT], ket[JRB], Qr), k):
        return 0j
    if stage == 2:
        val = f_symbol(1, jabp, jab, Ql, jat, jatp, k) * f_symbol(1, jatp, jat, Qr, jab, jabp, k)
        return sign_power(-(jatp - jat) - (jabp - jab)) * val
    if not admissible((Ql, Qr, jat), k):
        return 0j
    val = f_symbol(jab, 1, jabp, jabp, jat, jab, k)
    return sign_power(-(jabp - jab)) * val


@dataclass
class SequenceReport:
    k: int
    checks: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks)

    def add(self, name, max_dev, tol, detail=None):
        self.checks.append(
            {"check": name, "max_dev": float(max_dev), "tol": tol, "passed": bool(max_dev < tol), "detail": detail}
        )


def _sector_failures(stage, bra_states, ket_states, diff, tol):
    bad = {}
    rows, cols = np.nonzero(np.abs(diff) >= tol)
    for r, c in zip(rows, cols):
        key = tuple(ket_states[c][i] for i in (JLT, JLB, JRT, JRB))
        bad[key] = max(bad.get(key, 0.0), float(abs(diff[r, c])))
    return [{"externals": list(key), "max_dev": v} for key, v in sorted(bad.items())]


def verify_f_sequence(trunc: Truncation | int, tol: float = 1e-10, gvc: str = "canonical") -> SequenceReport:
    """Conjugate the plaquette by the completed F unitaries and compare to the closed forms.

    After each move the conjugated operator is compared, on the image of the
    physical subspace, with the closed-form elements; the image is also checked
    to be invariant (no amplitude leaks to unphysical states). Finally the
    fully compressed operator is compared with ``box_triple_prime`` sector by
    sector.
    """
    from .synth import move_operator

    k = _k(trunc)
    if k > 3:
        raise ValueError("verify_f_sequence is limited to k <= 3")
    d = k + 1
    report = SequenceReport(k)
    box = plaquette_matrix(k, sparse=True)
    if k == 0:
        report.add("plaquette vanishes at k=0", abs(box).max() if box.nnz else 0.0, tol)
        return report
    current = box
    for stage, move in enumerate(("F1", "F2", "F3"), start=1):
        U = move_operator(move, k, gvc=gvc)
        current = (U @ current @ U.conj().T).tocsr()
        states = stage_physical(stage, k)
        idx = np.array([basis_index(s, d) for s in states])
        cols = current[:, idx].toarray()
        block = cols[idx, :]
        expected = np.array([[expected_after(stage, b, c, k) for c in states] for b in states])
        diff = block - expected
        report.add(
            f"after {move}: matches closed form on physical image",
            np.abs(diff).max() if diff.size else 0.0,
            tol,
            _sector_failures(stage, states, states, diff, tol),
        )
        mask = np.ones(d**8, dtype=bool)
        mask[idx] = False
        leak = np.abs(cols[mask, :]).max() if cols.size else 0.0
        report.add(f"after {move}: physical image invariant", leak, tol)
        n_phys = len(enumerate_physical(k))
        report.add(f"after {move}: image dimension equals physical dimension", abs(len(states) - n_phys), 0.5)

    # the compressed operator is box'''(J_a^t) on j_a^b with every other register a spectator
    states = stage_physical(3, k)
    idx = np.array([basis_index(s, d) for s in states])
    block = current[:, idx].toarray()[idx, :]
    boxes = {J: box_triple_prime(J, k) for J in range(k + 1)}
    target = np.array(
        [
            [
                boxes[c[JAT]][b[JAB], c[JAB]] if all(b[r] == c[r] for r in range(8) if r != JAB) else 0.0
                for c in states
            ]
            for b in states
        ]
    )
    diff = block - target
    report.add(
        "compressed operator equals box''' x controls",
        np.abs(diff).max(),
        tol,
        _sector_failures(3, states, states, diff, tol),
    )
    return report
