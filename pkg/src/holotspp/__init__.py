"""Shift Ore algebras, holonomic closure properties and creative telescoping,
with a determinant-proof driver for totally symmetric plane partitions."""

from .annihilator import DFiniteDescription, prove_equal
from .arith import QQ, RatFun, rational_reconstruct
from .caps import CapExceeded, ResourceCaps
from .groebner import GroebnerBasis, left_groebner_basis, normal_form, staircase
from .guess import GuessProblem, guess_recurrences
from .ore import DEGREVLEX, OreAlgebra, OreOperator, TermOrder, parse_operator
from .pipeline import run_pipeline
from .report import ProofReport
from .telescope import AnsatzShape, find_telescoper, telescope_ansatz, telescope_eliminate
from .tspp import count_tspp_bruteforce, nice, nice_ratio, okada_det, verify_identities

run_proof_pipeline = run_pipeline

__all__ = [
    "AnsatzShape",
    "CapExceeded",
    "DEGREVLEX",
    "DFiniteDescription",
    "GroebnerBasis",
    "GuessProblem",
    "OreAlgebra",
    "OreOperator",
    "ProofReport",
    "QQ",
    "RatFun",
    "ResourceCaps",
    "TermOrder",
    "count_tspp_bruteforce",
    "find_telescoper",
    "guess_recurrences",
    "left_groebner_basis",
    "nice",
    "nice_ratio",
    "normal_form",
    "okada_det",
    "parse_operator",
    "prove_equal",
    "rational_reconstruct",
    "run_pipeline",
    "run_proof_pipeline",
    "staircase",
    "telescope_ansatz",
    "telescope_eliminate",
    "verify_identities",
]
