"""Gate synthesis for one plaquette Trotter step.

Phased F-moves become full-space unitaries by gauge-variant completion (GVC),
multi-controlled unitaries are lowered to GCX gates through an auxiliary
ladder, and every local unitary is lowered to two-level Givens rotations and
diagonal phases.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .gates import GCX, Diag, GateList, Givens, Phase1
from .gauge import JAB, JAT, JLB, JLT, JRT, QL, QR
from .plaquette import (
    MOVES,
    EvolutionParams,
    box_triple_prime,
    g_move,
    phased_f_block,
    source_levels,
    target_levels,
)
from .qalgebra import Truncation, _k

AUX = 8
AUX_DIM = 5
N_SYSTEM = 8
UNITARY_TOL = 1e-12


def register_dims(trunc: Truncation | int) -> tuple[int, ...]:
    return (_k(trunc) + 1,) * N_SYSTEM + (AUX_DIM,)


# ---------------------------------------------------------------- sectors and level counts


@dataclass(frozen=True)
class ControlSector:
    move: str
    spins: tuple[int, ...]
    controls: tuple[int, ...]
    target: int


def control_sectors(move: str, trunc: Truncation | int) -> list[ControlSector]:
    """Control assignments with at least one physical active-link value, lexicographic."""
    k = _k(trunc)
    if move == "G":
        out = []
        for J_two in range(0, k + 1, 2):
            if len(g_move(J_two, k).levels) >= 2:
                out.append(ControlSector("G", (J_two,), (JAT,), JAB))
        return out
    mv = MOVES[move]
    out = []
    for spins in itertools.product(range(k + 1), repeat=len(mv.controls)):
        if source_levels(move, spins, k):
            out.append(ControlSector(move, spins, mv.controls, mv.target))
    return out


def _c4(p: int) -> int:
    if p <= 0:
        return 0
    val = Fraction(8, 3) * (p**3 - 3 * p**2 + 5 * p - 3) + (1 if p == 1 else 0)
    assert val.denominator == 1
    return int(val)


def _c3(p: int) -> int:
    if p <= 0:
        return 0
    return 2 * p**2 - 4 * p + 4 - (1 if p == 1 else 0)


def level_distribution(num_controls: int, m: int, trunc: Truncation | int) -> int:
    """Number of m-level unitaries in the 4-, 3- or 1-controlled part of the sequence."""
    k = _k(trunc)
    if m < 1:
        raise ValueError("m must be >= 1")
    if num_controls == 4:
        return _c4(k + 3 - 2 * m)
    if num_controls == 3:
        return _c3(k + 3 - 2 * m)
    if num_controls == 1:
        if m > k + 1 or m < 2:
            return 0
        return 1 if m % 2 == (k + 1) % 2 else 0
    raise ValueError("num_controls must be 1, 3 or 4")


def sector_total(num_controls: int, trunc: Truncation | int) -> int:
    """N_4, N_3 (closed forms) or N_1 = ceil(k/2)."""
    k = _k(trunc)
    if num_controls == 4:
        val = 1 + Fraction(8, 3) * k + Fraction(8, 3) * k**2 + Fraction(4, 3) * k**3 + Fraction(1, 3) * k**4
    elif num_controls == 3:
        val = 1 + Fraction(5, 3) * k + k**2 + Fraction(1, 3) * k**3
    elif num_controls == 1:
        val = Fraction(-(-k // 2))
    else:
        raise ValueError("num_controls must be 1, 3 or 4")
    assert val.denominator == 1
    return int(val)


# ---------------------------------------------------------------- gauge-variant completion


@dataclass
class GvcUnitary:
    sector: ControlSector
    matrix: np.ndarray
    source: list[int]
    active_levels: list[int]
    centering: list[tuple[int, int]] = field(default_factory=list)

    @property
    def m(self) -> int:
        return len(self.active_levels)


def _centering_permutation(source, target, d):
    """Permutation sending sorted source to sorted target and complement to complement."""
    perm = [0] * d
    for s, t in zip(source, target):
        perm[s] = t
    rest_s = [x for x in range(d) if x not in source]
    rest_t = [x for x in range(d) if x not in target]
    for s, t in zip(rest_s, rest_t):
        perm[s] = t
    return perm


def _transpositions(perm):
    """Two-level swaps whose product (first applied first) realizes perm."""
    pos = list(range(len(perm)))  # pos[orig] = current level of original level orig
    at = list(range(len(perm)))  # at[level] = original level sitting there
    swaps = []
    for orig in range(len(perm)):
        want = perm[orig]
        here = pos[orig]
        if here == want:
            continue
        other = at[want]
        swaps.append((min(here, want), max(here, want)))
        at[here], at[want] = other, orig
        pos[orig], pos[other] = want, here
    return swaps


def gvc_complete(sector: ControlSector, trunc: Truncation | int, gvc: str = "canonical", seed: int = 0) -> GvcUnitary:
    """Complete the physical block of a phased F-move to a d x d unitary.

    ``canonical``: centre the block with two-level swaps (sorted source levels to
    sorted target levels, complement to complement) and put the identity on the
    untouched levels. ``random``: the canonical unitary times a seeded Haar
    unitary on the unphysical source levels, an alternative completion used to
    show that the physical dynamics does not depend on the choice.
    """
    k = _k(trunc)
    d = k + 1
    move = sector.move
    src = source_levels(move, sector.spins, k)
    tgt = target_levels(move, sector.spins, k)
    if len(src) != len(tgt):
        raise ArithmeticError(f"{move} sector {sector.spins}: |source| != |target|")
    block = phased_f_block(move, sector.spins, k)
    perm = _centering_permutation(src, tgt, d)
    swaps = _transpositions(perm) if src != tgt else []
    P = np.zeros((d, d))
    for s, t in enumerate(perm):
        P[t, s] = 1.0
    # W is the centred block on the target levels plus identity elsewhere
    W = np.eye(d, dtype=complex)
    W[np.ix_(tgt, tgt)] = block[np.ix_(tgt, src)]
    U = W @ P
    if gvc == "random":
        rest = [x for x in range(d) if x not in src]
        if rest:
            rng = np.random.default_rng([seed, int(move[1]), *sector.spins])
            z = rng.normal(size=(len(rest), len(rest))) + 1j * rng.normal(size=(len(rest), len(rest)))
            q, r = np.linalg.qr(z)
            q = q * (np.diag(r) / np.abs(np.diag(r)))
            R = np.eye(d, dtype=complex)
            R[np.ix_(rest, rest)] = q
            U = U @ R
    elif gvc != "canonical":
        raise ValueError(f"unknown completion {gvc!r}")
    err = np.abs(U.conj().T @ U - np.eye(d)).max()
    if err > UNITARY_TOL:
        raise ArithmeticError(f"{move} sector {sector.spins}: completion not unitary ({err:.2e})")
    return GvcUnitary(sector, U, src, tgt, swaps)


def sector_unitaries(move: str, trunc: Truncation | int, gvc: str = "canonical") -> dict:
    return {s.spins: gvc_complete(s, trunc, gvc) for s in control_sectors(move, trunc)}


def move_operator(move: str, trunc: Truncation | int, gvc: str = "canonical") -> sp.csr_matrix:
    """The completed F-move as a sparse operator on the 8 system registers."""
    k = _k(trunc)
    d = k + 1
    mv = MOVES[move]
    nc = len(mv.controls)
    table = np.zeros((d,) * nc + (d, d), dtype=complex)
    for idx in itertools.product(range(d), repeat=nc):
        table[idx] = np.eye(d)
    for spins, u in sector_unitaries(move, k, gvc).items():
        table[spins] = u.matrix
    digits = np.array(list(itertools.product(range(d), repeat=N_SYSTEM)))
    n = d**N_SYSTEM
    cols = np.arange(n)
    weights = d ** np.arange(N_SYSTEM - 1, -1, -1)
    ctrl = tuple(digits[:, c] for c in mv.controls)
    t_in = digits[:, mv.target]
    rows, vals, cs = [], [], []
    base = cols - t_in * weights[mv.target]
    for t_out in range(d):
        amp = table[ctrl + (np.full(n, t_out), t_in)]
        nz = amp != 0
        rows.append(base[nz] + t_out * weights[mv.target])
        cs.append(cols[nz])
        vals.append(amp[nz])
    return sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cs))), shape=(n, n))


# ---------------------------------------------------------------- local lowering


def givens_lower(V: np.ndarray, t: int, levels, d: int) -> list:
    """Gates (time order) applying the block V on the given levels of register t.

    Elimination with SU(2) rotations on adjacent active levels leaves a diagonal
    of phases D, so V = G_1^dag ... G_n^dag D: D runs first, then G_n^dag, ..., G_1^dag.
    """
    levels = list(levels)
    m = len(levels)
    A = np.array(V, dtype=complex)
    rots = []
    for c in range(m - 1):
        for r in range(m - 1, c, -1):
            beta = A[r, c]
            if abs(beta) < 1e-15:
                continue
            alpha = A[r - 1, c]
            nrm = math.hypot(abs(alpha), abs(beta))
            g = np.array([[alpha.conjugate(), beta.conjugate()], [-beta, alpha]]) / nrm
            A[[r - 1, r], :] = g @ A[[r - 1, r], :]
            rots.append((levels[r - 1], levels[r], g))
    if m:
        off = np.abs(A - np.diag(np.diag(A))).max()
        assert off < 1e-10, f"Givens elimination left off-diagonal {off:.2e}"
    gates = []
    phases = np.angle(np.diag(A)) if m else np.zeros(0)
    if np.any(phases != 0.0):
        p = [0.0] * d
        for lv, x in zip(levels, phases):
            p[lv] = float(x)
        gates.append(Diag(t, tuple(p)))
    for a, b, g in reversed(rots):
        gates.append(Givens.from_matrix(t, (a, b), g.conj().T))
    return gates


def local_unitary(V: np.ndarray, t: int, levels, d: int) -> list:
    """Uncontrolled V (given on ``levels``) as DIAG + GIVENS gates."""
    return givens_lower(V, t, levels, d)


def rz_diag(t: int, a: int, b: int, theta: float, d: int) -> Diag:
    """R_z^{ab}(theta) = exp(-i Z_ab theta / 2) on register t."""
    p = [0.0] * d
    p[a] = -theta / 2
    p[b] = theta / 2
    return Diag(t, tuple(p))


def controlled_rz(ctrl: tuple[int, int], t: int, a: int, b: int, theta: float, d: int) -> list:
    c, cl = ctrl
    return [
        rz_diag(t, a, b, theta / 2, d),
        GCX(c, cl, t, (a, b)),
        rz_diag(t, a, b, -theta / 2, d),
        GCX(c, cl, t, (a, b)),
    ]


def controlled_diag(betas, levels, ctrl: tuple[int, int], t: int, d: int) -> list:
    """diag(exp(i beta)) on ``levels``, exp(i phi) on the other levels, controlled.

    phi is the mean phase; (m-1) controlled R_z between the first level and each
    other level carry the deviations and a single-level phase on the control
    carries phi.
    """
    betas = [float(b) for b in betas]
    m = len(betas)
    phi = sum(betas) / m
    gates = []
    for j in range(1, m):
        gates += controlled_rz(ctrl, t, levels[0], levels[j], 2 * (betas[j] - phi), d)
    gates.append(Phase1(ctrl[0], ctrl[1], phi))
    return gates


def unitary_eigensystem(U: np.ndarray):
    """U = V^dag diag(exp(i beta)) V via the complex Schur form (U is normal)."""
    T, Z = scipy.linalg.schur(np.asarray(U, dtype=complex), output="complex")
    off = np.abs(np.triu(T, 1)).max() if T.shape[0] > 1 else 0.0
    if off > 1e-9:
        raise ArithmeticError(f"Schur form not diagonal ({off:.2e}); input not normal")
    return Z.conj().T, np.angle(np.diag(T))


# ---------------------------------------------------------------- controlled decompositions


def ladder(controls, spins, aux: int = AUX) -> list:
    """GCX chain leaving the auxiliary register at level len(controls) iff every control matches."""
    return [GCX(c, v, aux, (i, i + 1)) for i, (c, v) in enumerate(zip(controls, spins))]


def decompose_controlled(u: GvcUnitary, num_controls: int, trunc: Truncation | int, scheme: str = "reduced",
                         aux_dim: int = AUX_DIM) -> list:
    """Multi-controlled single-qudit unitary as GCX + local gates.

    ``reduced``: ladder (l GCX), centring swaps controlled on the auxiliary
    level l, V, (m-1) controlled R_z plus a phase on the auxiliary register, V^dag,
    and the reversed ladder. ``baseline``: same ladder, the whole d x d unitary
    diagonalized (d-1 controlled R_z).
    """
    k = _k(trunc)
    d = k + 1
    ell = num_controls
    if aux_dim < ell + 1:
        raise ValueError(f"auxiliary dimension {aux_dim} too small for {ell} controls")
    sec = u.sector
    t = sec.target
    ctrl = (AUX, ell)
    gates = ladder(sec.controls, sec.spins)
    if scheme == "baseline":
        gates += _controlled_full(u.matrix, ctrl, t, d)
    elif scheme == "reduced":
        P = np.eye(d)
        for a, b in u.centering:
            gates.append(GCX(AUX, ell, t, (a, b)))
            sw = np.eye(d)
            sw[[a, b]] = sw[[b, a]]
            P = sw @ P
        W = u.matrix @ P.T
        levels = list(u.active_levels)
        rest = [x for x in range(d) if x not in levels]
        if rest and np.abs(W[np.ix_(rest, rest)] - np.eye(len(rest))).max() + (
            np.abs(W[np.ix_(rest, levels)]).max() + np.abs(W[np.ix_(levels, rest)]).max()
        ) > 1e-12:
            levels = list(range(d))  # a non-canonical completion mixes every level
        V, betas = unitary_eigensystem(W[np.ix_(levels, levels)])
        gates += local_unitary(V, t, levels, d)
        gates += controlled_diag(betas, levels, ctrl, t, d)
        gates += local_unitary(V.conj().T, t, levels, d)
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    gates += list(reversed(ladder(sec.controls, sec.spins)))
    return gates


def _controlled_full(U, ctrl, t, d):
    V, betas = unitary_eigensystem(U)
    levels = list(range(d))
    return local_unitary(V, t, levels, d) + controlled_diag(betas, levels, ctrl, t, d) + local_unitary(
        V.conj().T, t, levels, d
    )


def decompose_antisym_diag(spectrum, levels, ctrl: tuple[int, int], t: int, d: int, tol: float = 1e-10) -> list:
    """exp(i beta) with beta antisymmetric (beta_i = -beta_{m-1-i}), controlled.

    floor(m/2) controlled R_z on the level pairs (0, m-1), (1, m-2), ...; no
    phase gate and a middle level left idle when m is odd.
    """
    beta = np.asarray(spectrum, dtype=float)
    m = len(beta)
    if np.abs(beta + beta[::-1]).max(initial=0.0) > tol:
        raise ValueError("spectrum is not antisymmetric")
    gates = []
    for i in range(m // 2):
        gates += controlled_rz(ctrl, t, levels[i], levels[m - 1 - i], -2 * beta[i], d)
    return gates


# ---------------------------------------------------------------- counting


def gcx_count(scheme: str, trunc: Truncation | int) -> int:
    k = _k(trunc)
    if scheme == "nondeformed_reference":
        return k**4 * (2 * (k + 1) ** 4 + 30)
    if scheme == "baseline":
        return 4 * (8 + 2 * k) * sector_total(4, k) + 2 * (6 + 2 * k) * sector_total(3, k) + 6 * k * sector_total(1, k)
    if scheme == "reduced":
        return sum(resource_breakdown("reduced", k).values())
    if scheme == "parity_k1":
        if k != 1:
            raise ValueError("parity_k1 exists only for k = 1")
        return 48
    raise ValueError(f"unknown scheme {scheme!r}")


def resource_breakdown(scheme: str, trunc: Truncation | int) -> dict:
    k = _k(trunc)
    if scheme == "baseline":
        return {
            "F12": 4 * (8 + 2 * k) * sector_total(4, k),
            "F3": 2 * (6 + 2 * k) * sector_total(3, k),
            "G": 6 * k * sector_total(1, k),
        }
    if scheme == "reduced":
        ms = range(1, k + 2)
        return {
            "F12": sum(4 * (2 * 4 + 2 * (m - 1)) * level_distribution(4, m, k) for m in ms),
            "F3": sum(2 * (2 * 3 + 2 * (m - 1)) * level_distribution(3, m, k) for m in ms),
            "box": sum(2 * (m // 2) * level_distribution(1, m, k) for m in ms),
        }
    if scheme == "nondeformed_reference":
        return {"total": gcx_count(scheme, k)}
    if scheme == "parity_k1":
        return {"F12": 40, "F3": 8, "box": 0}
    raise ValueError(f"unknown scheme {scheme!r}")


@dataclass
class ResourceReport:
    scheme: str
    k: int
    gcx_total: int
    breakdown: dict
    emitted: int | None = None
    centering: int | None = None


def centering_count(trunc: Truncation | int) -> int:
    """GCX spent on centring swaps in a reduced Trotter step (each move runs twice)."""
    k = _k(trunc)
    total = 0
    for move in ("F1", "F2", "F3"):
        for s in control_sectors(move, k):
            total += 2 * len(gvc_complete(s, k).centering)
    return total


def resource_report(scheme: str, trunc: Truncation | int, emit: bool = False) -> ResourceReport:
    k = _k(trunc)
    rep = ResourceReport(scheme, k, gcx_count(scheme, k), resource_breakdown(scheme, k))
    if scheme == "reduced":
        rep.centering = centering_count(k)
    if emit and scheme in ("baseline", "reduced", "parity_k1"):
        rep.emitted = emit_trotter_step(k, EvolutionParams(0.1), scheme).gcx_count()
    return rep


# ---------------------------------------------------------------- Trotter step


def _move_fragment(move: str, k: int, scheme: str, gvc: str) -> list:
    ell = len(MOVES[move].controls)
    gates = []
    for s in control_sectors(move, k):
        gates += decompose_controlled(gvc_complete(s, k, gvc), ell, k, scheme)
    return gates


def _box_fragment(k: int, tau: float, scheme: str) -> list:
    d = k + 1
    sectors = control_sectors("G", k)
    if scheme == "reduced":
        gates = []
        for s in sectors:
            J_two = s.spins[0]
            gm = g_move(J_two, k)
            Gsub = gm.G[np.ix_(gm.levels, gm.levels)]
            gates += local_unitary(Gsub, JAB, gm.levels, d)
            gates += decompose_antisym_diag(tau * gm.spectrum, gm.levels, (JAT, J_two), JAB, d)
            gates += local_unitary(Gsub.conj().T, JAB, gm.levels, d)
        return gates
    cg, diag = [], []
    for s in sectors:
        J_two = s.spins[0]
        gm = g_move(J_two, k)
        cg += _controlled_full(gm.G, (JAT, J_two), JAB, d)
        diag += controlled_diag(tau * gm.diagonal, list(range(d)), (JAT, J_two), JAB, d)
    inv = GateList(register_dims(k), cg).inverse().gates
    return cg + diag + inv


def emit_trotter_step(trunc: Truncation | int, params: EvolutionParams, scheme: str = "reduced",
                      gvc: str = "canonical") -> GateList:
    """One Trotter step of exp(i tau plaquette) as a gate list."""
    k = _k(trunc)
    if scheme in ("parity_k1", "parity-k1"):
        if k != 1:
            raise ValueError("the parity circuit exists only for k = 1")
        return emit_parity_circuit_k1(params)
    if scheme not in ("baseline", "reduced"):
        raise ValueError(f"unknown scheme {scheme!r}")
    if k < 1:
        raise ValueError("Trotter step needs k >= 1")
    dims = register_dims(k)
    forward = GateList(dims)
    for move in ("F1", "F2", "F3"):
        forward.extend(_move_fragment(move, k, scheme, gvc))
    out = GateList(dims, list(forward.gates))
    out.extend(_box_fragment(k, params.tau, scheme))
    out.extend(forward.inverse().gates)
    return out


# ---------------------------------------------------------------- parity circuit, k = 1

_X = np.array([[0, 1], [1, 0]], dtype=complex)
_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


def _cnot(c: int, t: int) -> GCX:
    return GCX(c, 1, t, (0, 1))


def _t(reg: int, sign: int = 1) -> Diag:
    return Diag(reg, (0.0, sign * math.pi / 4))


def _ccz(a: int, b: int, c: int) -> list:
    """Phase -1 on |111> of (a, b, c), 6 CNOT."""
    return [
        _cnot(b, c), _t(c, -1), _cnot(a, c), _t(c), _cnot(b, c), _t(c, -1),
        _cnot(a, c), _t(b), _t(c), _cnot(a, b), _t(a), _t(b, -1), _cnot(a, b),
    ]


def _flip(*regs) -> list:
    return [Givens.from_matrix(r, (0, 1), _X) for r in regs]


def _minus_on_zeros(a: int, b: int, c: int) -> list:
    """Phase -1 on |000> of (a, b, c)."""
    return _flip(a, b, c) + _ccz(a, b, c) + _flip(a, b, c)


def _controlled_ix(c: int, t: int) -> list:
    """Controlled R_x(-pi) = controlled (iX): a CNOT plus the phase i on the control."""
    return [Phase1(c, 1, math.pi / 2), _cnot(c, t)]


def _f12_block_k1() -> list:
    """-U_F1 and -U_F2 at k = 1 on physical inputs, 20 CNOT.

    On the physical subspace -U_F1 is iX on q_l when j_l^b + j_a^t is odd and a
    phase -1 on the sector j_l^t = j_l^b = q_l = 0; -U_F2 is the mirror image on
    q_r. The two moves touch disjoint registers and commute.
    """
    compute = [_cnot(JAT, JLB), _cnot(JAB, JRT), _cnot(JAT, JAB)]
    body = (
        _minus_on_zeros(JLT, JLB, QL)
        + _minus_on_zeros(JAT, JAB, QR)
        + _controlled_ix(JLB, QL)
        + _controlled_ix(JRT, QR)
    )
    return compute + body + list(reversed(compute))


def _f3_block_k1() -> list:
    """-U_F3 at k = 1 on physical inputs, 4 CNOT.

    With the parity q_l + j_a^b stored in q_l, the move is Y on j_a^t when the
    parity is odd and a phase -1 when j_a^b and the parity are both 0.
    """
    s = Diag(JAT, (0.0, math.pi / 2))
    sdg = Diag(JAT, (0.0, -math.pi / 2))
    controlled_y = [sdg, _cnot(QL, JAT), s]
    h = Givens.from_matrix(QL, (0, 1), _H)
    cz_zeros = _flip(JAB, QL) + [h, _cnot(JAB, QL), h] + _flip(JAB, QL)
    return [_cnot(JAB, QL)] + controlled_y + cz_zeros + [_cnot(JAB, QL)]


def emit_parity_circuit_k1(params: EvolutionParams) -> GateList:
    """Hand-compressed k = 1 Trotter step built on link parities: 48 CNOT, auxiliary idle.

    Each move is exact up to a global -1, which cancels against the inverse half
    of the step. Between the halves, box''' for J_a^t = 0 is an uncontrolled
    rotation of j_a^b.
    """
    dims = register_dims(1)
    forward = GateList(dims)
    forward.extend(_f12_block_k1())
    forward.extend(_f3_block_k1())
    evo = scipy.linalg.expm(1j * params.tau * box_triple_prime(0, 1))
    out = GateList(dims, list(forward.gates))
    out.extend(local_unitary(evo, JAB, [0, 1], 2))
    out.extend(forward.inverse().gates)
    return out
