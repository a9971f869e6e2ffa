"""Generalized classical and quantum Zernike Hamiltonians.

H_N = p^2 + sum_{n=1}^N g_n (q . p)^n with exact Gaussian-rational algebra,
its integrals and Higgs-type symmetry algebra, the normal-ordered quantum
counterpart with its algebraic spectrum, and numerical trajectories.
"""

from importlib import resources

from .classical import (
    IntegralSolution,
    SystemSpec,
    build_angular_momentum,
    build_hamiltonian,
    check_dependence_relation,
    solve_integral_ansatz,
)
from .dynamics import (
    CurvedOscillatorSpec,
    TrajectoryConfig,
    closed_orbit_check,
    integrate_polar,
    integrate_trajectory,
)
from .gaussian import GaussianRational
from .poly import ParamPolynomial, PhasePolynomial, parse_param, parse_phase, poisson_bracket
from .spectra import solve_spectrum, structure_factors, zernike_specialization
from .symmetry import build_generators, structure_functions, verify_higgs_closure
from .weyl import (
    OperatorPolynomial,
    build_quantum_hamiltonian,
    build_quantum_integral,
    build_quantum_integral_prime,
    commutator,
    parse_operator,
)

__version__ = "0.1.0"


def data_path(name: str):
    """Path-like handle to a file shipped in ``zernike/data``."""
    return resources.files(__name__) / "data" / name


__all__ = [
    "GaussianRational",
    "ParamPolynomial",
    "PhasePolynomial",
    "OperatorPolynomial",
    "SystemSpec",
    "IntegralSolution",
    "TrajectoryConfig",
    "CurvedOscillatorSpec",
    "parse_param",
    "parse_phase",
    "parse_operator",
    "poisson_bracket",
    "commutator",
    "build_hamiltonian",
    "build_angular_momentum",
    "solve_integral_ansatz",
    "check_dependence_relation",
    "build_generators",
    "structure_functions",
    "verify_higgs_closure",
    "build_quantum_hamiltonian",
    "build_quantum_integral",
    "build_quantum_integral_prime",
    "structure_factors",
    "solve_spectrum",
    "zernike_specialization",
    "integrate_trajectory",
    "integrate_polar",
    "closed_orbit_check",
    "data_path",
]
