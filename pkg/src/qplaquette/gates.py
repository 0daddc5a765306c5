"""Elementary qudit gates, gate lists, and the QDEFCIRC text format.

Format (one directive per line, numbers with 17 significant digits)::

    QDEFCIRC 1
    REGS d d d d d d d d 5
    GCX c=<reg> cl=<level> t=<reg> x=<l0>,<l1>
    GIVENS t=<reg> l=<l0>,<l1> u=<re00>,<im00>,<re01>,<im01>,<re10>,<im10>,<re11>,<im11>
    DIAG t=<reg> p=<phi0>,...
    PHASE1 t=<reg> l=<level> p=<phi>

Blank lines and text after ``#`` are ignored; anything else unknown is an error.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

FORMAT_VERSION = 1


def fmt(x: float) -> str:
    return format(float(x), ".17g")


@dataclass(frozen=True)
class GCX:
    """Swap levels x[0], x[1] of register t when register c is at level cl."""

    c: int
    cl: int
    t: int
    x: tuple[int, int]


@dataclass(frozen=True)
class Givens:
    """A 2x2 unitary on levels l[0], l[1] of register t (row-major entries u)."""

    t: int
    l: tuple[int, int]
    u: tuple[complex, complex, complex, complex]

    @classmethod
    def from_matrix(cls, t, l, mat) -> "Givens":
        m = np.asarray(mat, dtype=complex)
        return cls(t, (int(l[0]), int(l[1])), tuple(complex(z) for z in m.reshape(4)))

    def matrix(self) -> np.ndarray:
        return np.array(self.u, dtype=complex).reshape(2, 2)


@dataclass(frozen=True)
class Diag:
    """exp(i p[j]) on level j of register t."""

    t: int
    p: tuple[float, ...]


@dataclass(frozen=True)
class Phase1:
    """exp(i p) on a single level of register t."""

    t: int
    l: int
    p: float


Gate = Union[GCX, Givens, Diag, Phase1]


@dataclass
class GateList:
    dims: tuple[int, ...]
    gates: list = field(default_factory=list)

    def append(self, gate) -> None:
        self._validate(gate)
        self.gates.append(gate)

    def extend(self, gates) -> None:
        for g in gates:
            self.append(g)

    def _validate(self, g) -> None:
        n = len(self.dims)

        def reg(r):
            if not 0 <= r < n:
                raise ValueError(f"register {r} not declared ({n} registers)")
            return self.dims[r]

        if isinstance(g, GCX):
            if g.c == g.t:
                raise ValueError("GCX control and target must differ")
            if not 0 <= g.cl < reg(g.c):
                raise ValueError(f"control level {g.cl} out of range")
            dt = reg(g.t)
            if g.x[0] == g.x[1] or not all(0 <= v < dt for v in g.x):
                raise ValueError(f"bad GCX level pair {g.x}")
        elif isinstance(g, Givens):
            dt = reg(g.t)
            if g.l[0] == g.l[1] or not all(0 <= v < dt for v in g.l):
                raise ValueError(f"bad GIVENS level pair {g.l}")
            m = g.matrix()
            if np.abs(m.conj().T @ m - np.eye(2)).max() > 1e-10:
                raise ValueError("GIVENS block is not unitary")
        elif isinstance(g, Diag):
            if len(g.p) != reg(g.t):
                raise ValueError("DIAG needs one phase per level")
        elif isinstance(g, Phase1):
            if not 0 <= g.l < reg(g.t):
                raise ValueError(f"PHASE1 level {g.l} out of range")
        else:
            raise TypeError(f"unknown gate {g!r}")

    def gcx_count(self) -> int:
        return sum(isinstance(g, GCX) for g in self.gates)

    def __len__(self) -> int:
        return len(self.gates)

    def inverse(self) -> "GateList":
        return GateList(self.dims, [inverse_gate(g) for g in reversed(self.gates)])

    def to_text(self) -> str:
        lines = [f"QDEFCIRC {FORMAT_VERSION}", "REGS " + " ".join(str(d) for d in self.dims)]
        for g in self.gates:
            lines.append(gate_to_text(g))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "GateList":
        return parse(text)


def inverse_gate(g):
    if isinstance(g, GCX):
        return g
    if isinstance(g, Givens):
        return Givens.from_matrix(g.t, g.l, g.matrix().conj().T)
    if isinstance(g, Diag):
        return Diag(g.t, tuple(-p for p in g.p))
    if isinstance(g, Phase1):
        return Phase1(g.t, g.l, -g.p)
    raise TypeError(f"unknown gate {g!r}")


def gate_to_text(g) -> str:
    if isinstance(g, GCX):
        return f"GCX c={g.c} cl={g.cl} t={g.t} x={g.x[0]},{g.x[1]}"
    if isinstance(g, Givens):
        parts = []
        for z in g.u:
            parts += [fmt(z.real), fmt(z.imag)]
        return f"GIVENS t={g.t} l={g.l[0]},{g.l[1]} u=" + ",".join(parts)
    if isinstance(g, Diag):
        return f"DIAG t={g.t} p=" + ",".join(fmt(p) for p in g.p)
    if isinstance(g, Phase1):
        return f"PHASE1 t={g.t} l={g.l} p={fmt(g.p)}"
    raise TypeError(f"unknown gate {g!r}")


class FormatError(ValueError):
    pass


_FIELDS = {
    "GCX": ("c", "cl", "t", "x"),
    "GIVENS": ("t", "l", "u"),
    "DIAG": ("t", "p"),
    "PHASE1": ("t", "l", "p"),
}


def _ints(s, n=None):
    vals = [int(v) for v in s.split(",")]
    if n is not None and len(vals) != n:
        raise FormatError(f"expected {n} integers, got {s!r}")
    return vals


def _floats(s):
    return [float(v) for v in s.split(",")]


def parse(text: str) -> GateList:
    """Strict parser for the QDEFCIRC format."""
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            lines.append((lineno, body))
    if not lines or lines[0][1] != f"QDEFCIRC {FORMAT_VERSION}":
        raise FormatError("missing or unsupported QDEFCIRC header")
    if len(lines) < 2 or not lines[1][1].startswith("REGS "):
        raise FormatError("missing REGS line")
    try:
        dims = tuple(int(v) for v in lines[1][1].split()[1:])
    except ValueError as exc:
        raise FormatError(f"line {lines[1][0]}: bad REGS") from exc
    if not dims or min(dims) < 1:
        raise FormatError("REGS must list positive dimensions")
    out = GateList(dims)
    for lineno, body in lines[2:]:
        op, *args = body.split()
        if op not in _FIELDS:
            raise FormatError(f"line {lineno}: unknown directive {op!r}")
        kv = {}
        for a in args:
            key, sep, val = a.partition("=")
            if not sep or key in kv:
                raise FormatError(f"line {lineno}: malformed field {a!r}")
            kv[key] = val
        if tuple(sorted(kv)) != tuple(sorted(_FIELDS[op])):
            raise FormatError(f"line {lineno}: {op} needs fields {_FIELDS[op]}, got {tuple(kv)}")
        try:
            if op == "GCX":
                x = _ints(kv["x"], 2)
                gate = GCX(int(kv["c"]), int(kv["cl"]), int(kv["t"]), (x[0], x[1]))
            elif op == "GIVENS":
                lv = _ints(kv["l"], 2)
                u = _floats(kv["u"])
                if len(u) != 8:
                    raise FormatError(f"line {lineno}: GIVENS needs 8 reals")
                gate = Givens(int(kv["t"]), (lv[0], lv[1]), tuple(complex(u[2 * i], u[2 * i + 1]) for i in range(4)))
            elif op == "DIAG":
                gate = Diag(int(kv["t"]), tuple(_floats(kv["p"])))
            else:
                gate = Phase1(int(kv["t"]), int(kv["l"]), float(kv["p"]))
            out.append(gate)
        except FormatError:
            raise
        except (ValueError, TypeError) as exc:
            raise FormatError(f"line {lineno}: {exc}") from exc
    return out
