"""Command-line front end: ``qplaquette <subcommand> ...``."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction

import numpy as np

from . import gauge, qalgebra, synth
from .gates import FormatError, fmt, parse
from .plaquette import EvolutionParams, box_triple_prime, g_move
from .sim import compare_on_physical, reference_evolution
from .verification import SUITES, run_suites

SCHEMES = ("nondeformed_reference", "baseline", "reduced", "parity_k1")


def _doubled_spin(text: str) -> int:
    try:
        val = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a spin: {text!r}")
    two = 2 * val
    if two.denominator != 1 or two < 0:
        raise argparse.ArgumentTypeError(f"spin must be a non-negative multiple of 1/2: {text!r}")
    return int(two)


def _num(x) -> str:
    if isinstance(x, complex):
        return f"{fmt(x.real)}{'+' if x.imag >= 0 else '-'}{fmt(abs(x.imag))}j"
    return fmt(x)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, complex):
        return [float(fmt(obj.real)), float(fmt(obj.imag))]
    if isinstance(obj, (float, np.floating)):
        return float(fmt(obj))
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _emit(rows, header, fmt_name, out):
    if fmt_name == "json":
        json.dump(_jsonable([dict(zip(header, r)) for r in rows]), out, indent=1)
        out.write("\n")
        return
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_num(v) if isinstance(v, (float, complex)) else v for v in r])


def cmd_qnum(a, out):
    out.write(_num(qalgebra.q_number(a.n, a.k)) + "\n")
    return 0


def cmd_fsymbol(a, out):
    val = qalgebra.six_j(*a.spins, a.k) if a.six_j else qalgebra.f_symbol(*a.spins, a.k)
    out.write(_num(val) + "\n")
    return 0


def cmd_physdim(a, out):
    ks = range(a.kmin, a.kmax + 1) if a.kmax is not None else [a.k]
    rows = []
    for k in ks:
        q, nq = gauge.phys_dim(k, True), gauge.phys_dim(k, False)
        rows.append((k, q, nq, float(Fraction(q, nq))))
    _emit(rows, ("k", "dim_q", "dim_nq", "ratio"), a.format, out)
    return 0


def cmd_operator(a, out):
    k = a.k
    sectors = []
    for J_two in range(0, k + 1, 2):
        gm = g_move(J_two, k)
        box = box_triple_prime(J_two, k)
        sectors.append(
            {
                "J_a^t": J_two / 2,
                "active_levels": [lv / 2 for lv in gm.levels],
                "box_triple_prime": [[complex(z) for z in row] for row in box],
                "spectrum": gm.spectrum,
                "G": [[complex(z) for z in row] for row in gm.G],
            }
        )
    json.dump(_jsonable({"k": k, "sectors": sectors}), out, indent=1)
    out.write("\n")
    return 0


def cmd_synth(a, out):
    scheme = a.scheme.replace("-", "_")
    if scheme == "parity_k1" and a.k != 1:
        raise _UsageError("parity-k1 exists only for k = 1")
    gl = synth.emit_trotter_step(a.k, EvolutionParams(a.tau), scheme, gvc=a.gvc)
    text = gl.to_text()
    if a.out:
        with open(a.out, "w") as fh:
            fh.write(text)
        out.write(json.dumps({"k": a.k, "scheme": scheme, "gates": len(gl), "gcx": gl.gcx_count(), "out": a.out}) + "\n")
    else:
        out.write(text)
    return 0


def cmd_resources(a, out):
    rows = []
    for k in range(1, a.kmax + 1):
        for scheme in SCHEMES:
            if scheme == "parity_k1" and k != 1:
                continue
            rows.append((k, scheme, synth.gcx_count(scheme, k)))
    _emit(rows, ("k", "scheme", "gcx"), "csv" if a.csv else a.format, out)
    return 0


def cmd_verify(a, out):
    names = list(SUITES) if a.all or not a.suite else a.suite
    rows = run_suites(names, a.k)
    table = [(r.suite, r.check, r.status, r.max_dev) for r in rows]
    _emit(table, ("suite", "check", "status", "max_dev"), a.format, out)
    failures = [r for r in rows if not r.passed]
    if failures:
        report = {"failed": [{"suite": r.suite, "check": r.check, "max_dev": r.max_dev} for r in failures]}
        sys.stderr.write(json.dumps(_jsonable(report)) + "\n")
        return 1
    return 0


def cmd_simulate(a, out):
    k = a.k
    if k > 2:
        raise _UsageError("circuit simulation is limited to k <= 2")
    params = EvolutionParams(a.tau)
    if a.circuit:
        with open(a.circuit) as fh:
            gl = parse(fh.read())
        scheme = "file"
    else:
        scheme = a.scheme.replace("-", "_")
        if scheme == "parity_k1" and k != 1:
            raise _UsageError("parity-k1 exists only for k = 1")
        gl = synth.emit_trotter_step(k, params, scheme, gvc=a.gvc)
    cmp = compare_on_physical(gl, reference_evolution(k, params), k)
    res = {"k": k, "tau": a.tau, "scheme": scheme, "gcx": gl.gcx_count(), **cmp.as_dict()}
    out.write(json.dumps(_jsonable(res)) + "\n")
    return 0 if cmp.amplitude_ok and cmp.aux_ok else 1


class _UsageError(Exception):
    pass


def _k_arg(text: str) -> int:
    try:
        k = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"k must be an integer, got {text!r}")
    if k < 0:
        raise argparse.ArgumentTypeError("k must be >= 0")
    return k


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qplaquette", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("qnum", help="q-number [n]_k")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--k", type=_k_arg, required=True)
    s.set_defaults(func=cmd_qnum)

    s = sub.add_parser("fsymbol", help="F-symbol F[a b e; c d f] (spins like 1/2)")
    s.add_argument("--k", type=_k_arg, required=True)
    s.add_argument("--six-j", action="store_true", help="print the bare 6j symbol instead")
    s.add_argument("spins", type=_doubled_spin, nargs=6, metavar="SPIN")
    s.set_defaults(func=cmd_fsymbol)

    s = sub.add_parser("physdim", help="physical dimensions and retention ratio")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--k", type=_k_arg)
    g.add_argument("--kmax", type=_k_arg)
    s.add_argument("--kmin", type=_k_arg, default=0)
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.set_defaults(func=cmd_physdim)

    s = sub.add_parser("operator", help="compressed plaquette sectors and G-moves (JSON)")
    s.add_argument("--k", type=_k_arg, required=True)
    s.set_defaults(func=cmd_operator)

    s = sub.add_parser("synth", help="emit one Trotter step as a gate list")
    s.add_argument("--k", type=_k_arg, required=True)
    s.add_argument("--tau", type=float, required=True)
    s.add_argument("--scheme", choices=("baseline", "reduced", "parity-k1"), default="reduced")
    s.add_argument("--gvc", choices=("canonical", "random"), default="canonical")
    s.add_argument("--out")
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("resources", help="GCX counts per scheme")
    s.add_argument("--kmax", type=_k_arg, required=True)
    s.add_argument("--csv", action="store_true")
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.set_defaults(func=cmd_resources)

    s = sub.add_parser("verify", help="run self-check suites")
    s.add_argument("--k", type=_k_arg, default=1)
    s.add_argument("--suite", action="append", choices=tuple(SUITES))
    s.add_argument("--all", action="store_true")
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("simulate", help="compare a Trotter step with exact evolution (JSON)")
    s.add_argument("--k", type=_k_arg, required=True)
    s.add_argument("--tau", type=float, required=True)
    s.add_argument("--scheme", choices=("baseline", "reduced", "parity-k1"), default="reduced")
    s.add_argument("--gvc", choices=("canonical", "random"), default="canonical")
    s.add_argument("--circuit", help="gate-list file to simulate instead of synthesizing")
    s.set_defaults(func=cmd_simulate)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except (_UsageError, ValueError, FormatError) as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"qplaquette {args.command}: error: {exc}\n")
        return 2


def run(argv=None) -> int:
    return main(argv)


if __name__ == "__main__":
    sys.exit(main())
