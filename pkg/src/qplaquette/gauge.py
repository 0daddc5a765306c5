"""Counting the gauge-invariant states of the eight-link plaquette section.

Links are ordered [j_l^t, j_l^b, q_l, j_a^t, j_a^b, q_r, j_r^t, j_r^b] throughout
the package; this is also the register order of every circuit.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np

from .qalgebra import Truncation, _k, admissible

LINKS = ("j_l^t", "j_l^b", "q_l", "j_a^t", "j_a^b", "q_r", "j_r^t", "j_r^b")
JLT, JLB, QL, JAT, JAB, QR, JRT, JRB = range(8)

#: The four trivalent vertices of the section, as link indices.
VERTICES = ((JLT, JAT, QL), (JLB, QL, JAB), (JRT, QR, JAT), (JRB, JAB, QR))

ENUMERATION_MAX_K = 6

# Exact integer traces are Python ints, so nothing wraps; this is only the
# range we promise callers (and check) for a stored PhysDim.
PHYSDIM_BITS = 128


def _fuses(triad, k, deformed):
    if deformed:
        return admissible(triad, k)
    a, b, c = triad
    return (a + b + c) % 2 == 0 and abs(a - b) <= c <= a + b


def adjacency(trunc: Truncation | int, deformed: bool) -> list[list[int]]:
    """Multiplicity of internal-link values compatible with two external links.

    Indices are doubled spins 0..k. The non-deformed entries count values of
    an active link joining two vertices with hard truncation only; the deformed
    entries also impose the fusion rule.
    """
    k = _k(trunc)
    out = []
    for l1 in range(k + 1):
        row = []
        for l2 in range(k + 1):
            if deformed:
                top = min(l1 + l2, 2 * k - l1 - l2)
            else:
                top = min(l1 + l2, k - (l1 + l2 + k) % 2)
            val = (top - abs(l1 - l2)) // 2 + 1
            assert val >= 1
            row.append(val)
        out.append(row)
    return out


def _matpow_trace4(a: list[list[int]]) -> int:
    n = len(a)
    sq = [[sum(a[i][m] * a[m][j] for m in range(n)) for j in range(n)] for i in range(n)]
    # Tr(A^4) = sum_ij (A^2)_ij (A^2)_ji
    return sum(sq[i][j] * sq[j][i] for i in range(n) for j in range(n))


def _checked(value: int) -> int:
    if value < 0 or value.bit_length() > PHYSDIM_BITS:
        raise OverflowError(f"physical dimension {value} exceeds {PHYSDIM_BITS}-bit range")
    return value


def phys_dim(trunc: Truncation | int, deformed: bool) -> int:
    """|H_phys| = Tr(A^4) in exact integer arithmetic."""
    k = _k(trunc)
    if k > 60:
        return _checked(_trace4_numpy(k, deformed))
    return _checked(_matpow_trace4(adjacency(k, deformed)))


def _trace4_numpy(k: int, deformed: bool) -> int:
    a = np.array(adjacency(k, deformed), dtype=np.float64)
    d = k + 1
    if d**3 < 2**52:
        # every partial sum of A^2 is an integer below 2^53, so BLAS is exact here
        sq = (a @ a).astype(np.int64)
    else:
        ao = a.astype(np.int64).astype(object)
        sq = ao.dot(ao)
    sq = sq.astype(object)
    # the final products need more than 64 bits; keep them as Python ints
    return int((sq * sq.T).sum())


def phys_dim_closed_form(trunc: Truncation | int) -> int:
    """Order-8 polynomial in d = k+1 for the deformed count."""
    k = _k(trunc)
    d = k + 1
    num = (
        1152 * d + 2048 * d**2 + 2464 * d**3 + 2128 * d**4
        + 1288 * d**5 + 532 * d**6 + 136 * d**7 + 17 * d**8
    )
    h = Fraction(num, 10080)
    if k % 2 == 0:
        h += Fraction(315, 10080)
    if h.denominator != 1:
        raise ArithmeticError(f"closed form not integral at k={k}: {h}")
    return _checked(int(h))


def retention_ratio(trunc: Truncation | int) -> float:
    k = _k(trunc)
    return float(Fraction(phys_dim(k, True), phys_dim(k, False)))


def rank_one_adjacency(trunc: Truncation | int) -> list[list[int]]:
    """Rebuild A^k from centred blocks of ones with the parity selection."""
    k = _k(trunc)
    d = k + 1
    out = [[0] * d for _ in range(d)]
    for ell in range(1, k + 2):
        if (k + 1) % 2 != ell % 2:
            continue
        start = (d - ell) // 2
        for i in range(start, start + ell):
            for j in range(start, start + ell):
                out[i][j] += 1
    return out


def is_physical(state, trunc: Truncation | int, deformed: bool = True) -> bool:
    k = _k(trunc)
    return all(_fuses(tuple(state[i] for i in v), k, deformed) for v in VERTICES)


def enumerate_physical(trunc: Truncation | int, deformed: bool = True) -> list[tuple[int, ...]]:
    """All admissible 8-link assignments in lexicographic order."""
    k = _k(trunc)
    if k > ENUMERATION_MAX_K:
        raise ValueError(f"enumeration limited to k <= {ENUMERATION_MAX_K}, got k={k}")
    levels = range(k + 1)
    out = []
    # Walk vertex by vertex so the loops stay near the physical count, then sort.
    for jlt, jat, ql in itertools.product(levels, repeat=3):
        if not _fuses((jlt, jat, ql), k, deformed):
            continue
        for jlb, jab in itertools.product(levels, repeat=2):
            if not _fuses((jlb, ql, jab), k, deformed):
                continue
            for jrt, qr in itertools.product(levels, repeat=2):
                if not _fuses((jrt, qr, jat), k, deformed):
                    continue
                for jrb in levels:
                    if _fuses((jrb, jab, qr), k, deformed):
                        out.append((jlt, jlb, ql, jat, jab, qr, jrt, jrb))
    out.sort()
    return out
