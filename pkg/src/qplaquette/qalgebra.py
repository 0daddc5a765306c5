"""q-numbers, triangle deltas, q-deformed 6j symbols and F-symbols for SU(2)_k.

Every spin is carried as a doubled integer (``two_j``), so j = 1/2 is ``1``.
Admissibility and parity decisions are pure integer arithmetic; floating point
only enters through the q-numbers themselves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

#: Largest truncation for which the double-precision Racah sum is documented
#: to satisfy the identity suite at 1e-10.
K_VALIDITY = 64


@dataclass(frozen=True)
class Truncation:
    """Local truncation k: spins run over 0..k/2 and each link has d = k+1 levels."""

    k: int

    def __post_init__(self):
        if not isinstance(self.k, int) or isinstance(self.k, bool) or self.k < 0:
            raise ValueError(f"truncation k must be a non-negative integer, got {self.k!r}")

    @property
    def d(self) -> int:
        return self.k + 1

    @property
    def q(self) -> complex:
        return complex(math.cos(2 * math.pi / (self.k + 2)), math.sin(2 * math.pi / (self.k + 2)))


def _k(trunc: Truncation | int) -> int:
    if isinstance(trunc, Truncation):
        return trunc.k
    return Truncation(trunc).k


def q_number(n: int, trunc: Truncation | int) -> float:
    """[n]_k = sin(pi n/(k+2)) / sin(pi/(k+2))."""
    k = _k(trunc)
    if n == 0 or n % (k + 2) == 0:
        # exact zeros, not sin(pi)-sized residue
        return 0.0
    return math.sin(math.pi * n / (k + 2)) / math.sin(math.pi / (k + 2))


def q_factorial(n: int, trunc: Truncation | int) -> float:
    """[n]! = [1][2]...[n], with [0]! = 1."""
    if n < 0:
        raise ValueError(f"q_factorial needs n >= 0, got {n}")
    k = _k(trunc)
    out = 1.0
    for m in range(1, n + 1):
        out *= q_number(m, k)
    return out


def admissible(t: tuple[int, int, int], trunc: Truncation | int) -> bool:
    """Gauss law plus fusion rule at a trivalent vertex, on doubled spins."""
    k = _k(trunc)
    a, b, c = t
    if min(a, b, c) < 0:
        return False
    s = a + b + c
    if s % 2:
        return False
    if a > b + c or b > a + c or c > a + b:
        return False
    return s <= 2 * k


def triangle_delta(t: tuple[int, int, int], trunc: Truncation | int) -> float:
    """q-deformed triangle coefficient; exactly 0 for an inadmissible triad."""
    k = _k(trunc)
    if not admissible(t, k):
        return 0.0
    a, b, c = t
    num = (
        q_factorial((a + b - c) // 2, k)
        * q_factorial((a - b + c) // 2, k)
        * q_factorial((-a + b + c) // 2, k)
    )
    return num / q_factorial((a + b + c) // 2 + 1, k)


def _check_spins(spins, k):
    for s in spins:
        if not isinstance(s, int) or s < 0 or s > k:
            raise ValueError(f"doubled spin {s!r} outside 0..{k}")


@lru_cache(maxsize=None)
def _six_j(a: int, b: int, e: int, c: int, d: int, f: int, k: int) -> float:
    triads = ((a, b, e), (a, d, f), (c, b, f), (c, d, e))
    if not all(admissible(t, k) for t in triads):
        return 0.0
    tau = [sum(t) for t in triads]
    big_t = [a + b + c + d, a + c + e + f, b + d + e + f]
    for x in tau + big_t:
        assert x % 2 == 0, "tetrad/triad sums must be integers"
    tau = [x // 2 for x in tau]
    big_t = [x // 2 for x in big_t]
    lo, hi = max(tau), min(big_t)

    pref = 1.0
    for t in triads:
        pref *= triangle_delta(t, k)
    pref = math.sqrt(pref)

    qn = [q_number(n, k) for n in range(max(hi + 2, 1))]

    def fact(n):
        out = 1.0
        for m in range(1, n + 1):
            out *= qn[m]
        return out

    total = 0.0
    for J in range(lo, hi + 1):
        term = fact(J + 1)
        for T in big_t:
            term /= fact(T - J)
        for t in tau:
            term /= fact(J - t)
        total += -term if J % 2 else term
    return pref * total


def six_j(a: int, b: int, e: int, c: int, d: int, f: int, trunc: Truncation | int) -> float:
    """q-deformed Racah formula for the symbol {a b e; c d f} (doubled spins)."""
    k = _k(trunc)
    _check_spins((a, b, e, c, d, f), k)
    return _six_j(a, b, e, c, d, f, k)


def quantum_dimension(two_j: int, trunc: Truncation | int) -> float:
    """D_k(j) = [2j+1]."""
    return q_number(two_j + 1, trunc)


def f_symbol(a: int, b: int, e: int, c: int, d: int, f: int, trunc: Truncation | int) -> float:
    """F[a b e; c d f] = (-1)^(a+b+c+d) sqrt(D(e) D(f)) {a b e; c d f}."""
    k = _k(trunc)
    val = six_j(a, b, e, c, d, f, k)
    s = a + b + c + d
    if s % 2:
        assert val == 0.0, "odd doubled phase exponent with nonzero 6j"
        return 0.0
    if val == 0.0:
        return 0.0
    sign = -1.0 if (s // 2) % 2 else 1.0
    return sign * math.sqrt(quantum_dimension(e, k) * quantum_dimension(f, k)) * val


def dimension_sign_root(two_j: int, trunc: Truncation | int) -> complex:
    """v_j = (-1)^(-j) sqrt(D(j)), with the half-integer power taken as i^(-2j)."""
    return (1j) ** (-two_j % 4) * math.sqrt(quantum_dimension(two_j, trunc))


def f_symbol_exchanged(a: int, b: int, e: int, c: int, d: int, f: int, trunc: Truncation | int) -> complex:
    """Right side of the dimension-scaled column exchange.

    Returns (v_e v_f / (v_a v_c)) F[e b a; f d c], which equals F[a b e; c d f]
    whenever the latter is nonzero.
    """
    k = _k(trunc)
    val = f_symbol(e, b, a, f, d, c, k)
    if val == 0.0:
        return 0.0
    num = dimension_sign_root(e, k) * dimension_sign_root(f, k)
    den = dimension_sign_root(a, k) * dimension_sign_root(c, k)
    return num / den * val


# ---------------------------------------------------------------- identity checks


def f_table(trunc: Truncation | int):
    """All F-symbols as an array indexed [a, b, e, c, d, f]."""
    k = _k(trunc)
    d = k + 1
    out = np.zeros((d,) * 6)
    for idx in np.ndindex(*out.shape):
        out[idx] = f_symbol(*idx, k)
    return out


def _admissible_table(k):
    d = k + 1
    out = np.zeros((d, d, d), dtype=bool)
    for t in np.ndindex(d, d, d):
        out[t] = admissible(t, k)
    return out


def orthogonality_deviation(trunc: Truncation | int) -> float:
    """max |sum_J F[j1 j2 J; j3 j4 j'] F[j1 j2 J; j3 j4 j] - delta_jj'| over every
    tuple whose rows j and j' fuse with (j1, j4) and (j3, j2)."""
    k = _k(trunc)
    F = f_table(k)
    adm = _admissible_table(k)
    gram = np.einsum("abJcdp,abJcdq->abcdpq", F, F)
    # row j is valid when (j1, j4, j) and (j3, j2, j) both fuse
    row_ok = np.einsum("adp,cbp->abcdp", adm, adm)
    mask = row_ok[..., :, None] & row_ok[..., None, :]
    d = k + 1
    eye = np.broadcast_to(np.eye(d), gram.shape)
    return float(np.abs(gram - eye)[mask].max(initial=0.0))


def pentagon_deviation(trunc: Truncation | int, samples: int | None = None, seed: int = 0) -> float:
    """Largest violation of the pentagon identity.

    With ``samples=None`` every 9-tuple is checked at once; otherwise ``samples``
    tuples are drawn uniformly among those whose six J-independent triads on the
    left side fuse.
    """
    k = _k(trunc)
    F = f_table(k)
    if samples is None:
        adm = _admissible_table(k)
        lhs = np.einsum("abecdJ,fgdJah,hgJcbi->abcdefghi", F, F, F, optimize=True)
        rhs = np.einsum("abeifh,fgdcei->abcdefghi", F, F, optimize=True)
        # index order a..i is j1..j9; keep tuples whose J-independent triads fuse
        mask = np.einsum(
            "abe,cde,fgd,fah,hbi,cgi->abcdefghi", adm, adm, adm, adm, adm, adm, optimize=True
        ).astype(bool)
        return float(np.abs(lhs - rhs)[mask].max(initial=0.0))
    adm = _admissible_table(k)
    rng = np.random.default_rng(seed)
    d = k + 1
    picked = []
    n = 0
    while n < samples:
        j1, j2, j3, j4, j5, j6, j7, j8, j9 = rng.integers(0, d, size=(9, 65536))
        ok = (adm[j1, j2, j5] & adm[j3, j4, j5] & adm[j6, j7, j4] & adm[j6, j1, j8]
              & adm[j8, j2, j9] & adm[j3, j7, j9])
        t = np.stack([j1, j2, j3, j4, j5, j6, j7, j8, j9])[:, ok]
        picked.append(t)
        n += t.shape[1]
    j1, j2, j3, j4, j5, j6, j7, j8, j9 = np.concatenate(picked, axis=1)[:, :samples]
    lhs = sum(F[j1, j2, j5, j3, j4, J] * F[j6, j7, j4, J, j1, j8] * F[j8, j7, J, j3, j2, j9] for J in range(d))
    rhs = F[j1, j2, j5, j9, j6, j8] * F[j6, j7, j4, j3, j5, j9]
    return float(np.abs(lhs - rhs).max())


def exchange_deviation(trunc: Truncation | int) -> float:
    """Worst mismatch of the column symmetries over all nonzero F-symbols.

    Checked: swapping the first two columns, inverting any two columns (flipping
    their rows), and the dimension-scaled exchange of the last column.
    """
    k = _k(trunc)
    worst = 0.0
    rng = range(k + 1)
    for a in rng:
        for b in rng:
            for e in rng:
                for c in rng:
                    for d in rng:
                        for f in rng:
                            v = f_symbol(a, b, e, c, d, f, k)
                            for w in (
                                f_symbol(b, a, e, d, c, f, k),
                                f_symbol(c, d, e, a, b, f, k),
                                f_symbol(c, b, f, a, d, e, k),
                                f_symbol(a, d, f, c, b, e, k),
                            ):
                                worst = max(worst, abs(v - w))
                            if v != 0.0:
                                worst = max(worst, abs(v - f_symbol_exchanged(a, b, e, c, d, f, k)))
    return worst
