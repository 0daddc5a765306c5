"""Gauge-invariant qudit circuits for a single q-deformed SU(2)_k plaquette."""

from .gates import GCX, Diag, GateList, Givens, Phase1
from .plaquette import EvolutionParams
from .qalgebra import Truncation, f_symbol, q_number, six_j

__all__ = [
    "GCX",
    "Diag",
    "EvolutionParams",
    "GateList",
    "Givens",
    "Phase1",
    "Truncation",
    "f_symbol",
    "q_number",
    "six_j",
]
__version__ = "0.1.0"
