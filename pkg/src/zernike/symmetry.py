"""Polynomial Higgs-type symmetry algebra of the classical Hamiltonians.

Generators L1 = C/2, L2 = (I'_N - I_N)/2, L3 = {L1, L2} satisfy
{L1, L2} = L3, {L1, L3} = -L2 and

    {L2, L3} = -sum_{n=1}^{N} n Phi_{N,n}(H_N) (2 L1)^(2n-1)

with structure functions linear in H_N.
"""

from __future__ import annotations

from dataclasses import dataclass

from .classical import (
    IntegralSolution,
    SystemSpec,
    build_angular_momentum,
    build_hamiltonian,
    solve_integral_ansatz,
    swap_integral,
)
from .poly import ParamPolynomial, PhasePolynomial, poisson_bracket, realize

__all__ = [
    "ClosureError",
    "SymmetryGenerators",
    "StructureFunctionTable",
    "HiggsClosureResult",
    "build_generators",
    "structure_functions",
    "bracket_rhs",
    "verify_higgs_closure",
    "higgs_order",
]

H_SYMBOL = "H"
L_SYMBOL = "L"


class ClosureError(ArithmeticError):
    """The sl(2)-type brackets among the generators do not close."""


@dataclass(frozen=True)
class SymmetryGenerators:
    L1: PhasePolynomial
    L2: PhasePolynomial
    L3: PhasePolynomial


def build_generators(spec: SystemSpec, sol: IntegralSolution | None = None) -> SymmetryGenerators:
    if sol is None:
        sol = solve_integral_ansatz(SystemSpec(spec.N))
    L1 = build_angular_momentum() / 2
    L2 = spec.specialize((swap_integral(sol) - sol.integral) / 2)
    L3 = poisson_bracket(L1, L2)
    if poisson_bracket(L1, L3) != -L2:
        raise ClosureError("{L1, L3} != -L2")
    return SymmetryGenerators(L1, L2, L3)


@dataclass(frozen=True)
class StructureFunctionTable:
    """``entries[n-1]`` is Phi_{N,n} as a polynomial in the formal symbol ``H``."""

    N: int
    entries: tuple[ParamPolynomial, ...]

    def __getitem__(self, n: int) -> ParamPolynomial:
        return self.entries[n - 1]

    def as_text(self) -> dict[str, str]:
        return {f"Phi_{self.N},{n}": e.to_text() for n, e in enumerate(self.entries, 1)}


def structure_functions(spec: SystemSpec) -> StructureFunctionTable:
    """Phi_{N,n} = g_n^2/2 - (-1)^n g_{2n} H [2n <= N] + sum_s (-1)^s g_{n-s} g_{n+s}.

    The cross sum runs over s = 1..min(n-1, N-n); g_m = 0 for m > N.
    """
    N = spec.N
    H = ParamPolynomial.var(H_SYMBOL)
    out = []
    for n in range(1, N + 1):
        phi_n = spec.g(n) ** 2 / 2
        if N - 2 * n + 1 >= 1:
            phi_n = phi_n - (-1) ** n * spec.g(2 * n) * H
        for s in range(1, min(n - 1, N - n) + 1):
            phi_n = phi_n + (-1) ** s * spec.g(n - s) * spec.g(n + s)
        out.append(phi_n)
    return StructureFunctionTable(N, tuple(out))


def bracket_rhs(table: StructureFunctionTable) -> ParamPolynomial:
    """-sum_n n Phi_{N,n}(H) L^(2n-1) with L standing for 2 L1."""
    L = ParamPolynomial.var(L_SYMBOL)
    total = ParamPolynomial.const(0)
    for n, entry in enumerate(table.entries, 1):
        total = total - entry * n * L ** (2 * n - 1)
    return total


def higgs_order(table: StructureFunctionTable):
    """Degree in 2 L1 of the closing bracket (2N-1 when g_N != 0)."""
    return bracket_rhs(table).degree_in(L_SYMBOL)


@dataclass
class HiggsClosureResult:
    holds: bool
    residual: PhasePolynomial
    bracket: PhasePolynomial
    higgs_order: int
    table: StructureFunctionTable


def verify_higgs_closure(spec: SystemSpec, gens: SymmetryGenerators | None = None,
                 table: StructureFunctionTable | None = None) -> HiggsClosureResult:
    """Compute {L2, L3} directly and compare with the structure-function sum."""
    if gens is None:
        gens = build_generators(spec)
    if table is None:
        table = structure_functions(spec)
    bracket = poisson_bracket(gens.L2, gens.L3)
    h = spec.specialize(build_hamiltonian(SystemSpec(spec.N)))
    rhs = realize(bracket_rhs(table), {H_SYMBOL: h, L_SYMBOL: gens.L1 * 2})
    residual = bracket - rhs
    return HiggsClosureResult(residual.is_zero(), residual, bracket, higgs_order(table), table)
