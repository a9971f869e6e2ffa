"""Classical generalized Zernike Hamiltonians and their integrals of motion.

H_N = p1^2 + p2^2 + sum_n g_n (q1 p1 + q2 p2)^n Poisson-commutes with the
angular momentum C = q1 p2 - q2 p1 and with a higher-order integral

    I_N = p2^2 + sum_n g_n sum_{j=0}^{phi(n)} p2^(n-j) p1^j Q^(n-j,j)(q1, q2)

whose homogeneous coefficient polynomials Q are derived here by solving the
linear conditions {H_N, I_N} = 0 exactly.
"""

from __future__ import annotations

import random
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .gaussian import GaussianRational, as_gaussian
from .linsolve import NoSolutionError, rank, solve
from .poly import PHASE_VARS, ParamPolynomial, PhasePolynomial, poisson_bracket

__all__ = [
    "MAX_N",
    "SystemSpec",
    "IntegralSolution",
    "DegeneratePointWarning",
    "phi",
    "dilation",
    "build_hamiltonian",
    "build_angular_momentum",
    "solve_integral_ansatz",
    "swap_integral",
    "relation_residual",
    "check_dependence_relation",
    "functional_independence_rank",
    "independence_survey",
    "random_rational",
    "random_identity_check",
]

MAX_N = 8


class DegeneratePointWarning(UserWarning):
    """Jacobian rank stayed below its generic value at consecutive samples."""


@dataclass(frozen=True)
class SystemSpec:
    """Member of the Hamiltonian family: order ``N`` and the coefficients g_n.

    ``gamma=None`` keeps g1..gN as free symbols; otherwise exactly ``N``
    exact values (ints, Fractions, ``"p/q"`` strings or GaussianRationals).
    """

    N: int
    gamma: tuple | None = None

    def __post_init__(self):
        if not isinstance(self.N, int) or isinstance(self.N, bool):
            raise TypeError("N must be an integer")
        if not 1 <= self.N <= MAX_N:
            raise ValueError(f"N must satisfy 1 <= N <= {MAX_N}, got {self.N}")
        if self.gamma is not None:
            vals = tuple(_exact(g) for g in self.gamma)
            if len(vals) != self.N:
                raise ValueError(f"expected {self.N} gamma values, got {len(vals)}")
            object.__setattr__(self, "gamma", vals)

    @property
    def symbolic(self) -> bool:
        return self.gamma is None

    def param_names(self) -> list[str]:
        return [f"g{n}" for n in range(1, self.N + 1)]

    def g(self, n: int) -> ParamPolynomial:
        """Coefficient g_n; zero outside 1..N."""
        if not 1 <= n <= self.N:
            return ParamPolynomial.const(0)
        if self.gamma is None:
            return ParamPolynomial.var(f"g{n}")
        return ParamPolynomial.const(self.gamma[n - 1])

    def assignment(self) -> dict[str, GaussianRational]:
        if self.gamma is None:
            raise ValueError("symbolic spec has no numeric assignment")
        return {f"g{n}": v for n, v in enumerate(self.gamma, start=1)}

    def is_real(self) -> bool:
        return self.gamma is not None and all(v.im == 0 for v in self.gamma)

    def specialize(self, poly):
        """Substitute this spec's numeric gammas into a symbolic object."""
        if self.gamma is None:
            return poly
        return poly.substitute_params(self.assignment())


def _exact(v) -> GaussianRational:
    if isinstance(v, float):
        raise TypeError("floating-point coefficients are not accepted; use p/q strings")
    if isinstance(v, str):
        return parse_gaussian(v)
    g = as_gaussian(v)
    if g is NotImplemented:
        raise TypeError(f"cannot interpret {v!r} as an exact coefficient")
    return g


def parse_gaussian(text: str) -> GaussianRational:
    """Parse ``'3/4'``, ``'-2'``, ``'i'``, ``'1/2+3*i'`` style numbers."""
    from .poly import parse_param

    p = parse_param(text)
    if not p.is_constant():
        raise ValueError(f"not a number: {text!r}")
    return p.constant_term()


def phi(n: int) -> int:
    """Upper index of the inner sum: n-2 for even n, n-1 for odd n."""
    if n < 1:
        raise ValueError("phi is defined for n >= 1")
    return n - 2 if n % 2 == 0 else n - 1


def dilation() -> PhasePolynomial:
    """q1 p1 + q2 p2."""
    return PhasePolynomial({(1, 0, 1, 0): 1, (0, 1, 0, 1): 1})


def build_angular_momentum() -> PhasePolynomial:
    return PhasePolynomial({(1, 0, 0, 1): 1, (0, 1, 1, 0): -1})


def build_hamiltonian(spec: SystemSpec) -> PhasePolynomial:
    return _hamiltonian(spec)


@lru_cache(maxsize=64)
def _hamiltonian(spec: SystemSpec) -> PhasePolynomial:
    h = PhasePolynomial({(0, 0, 2, 0): 1, (0, 0, 0, 2): 1})
    d = dilation()
    power = PhasePolynomial.const(1)
    for n in range(1, spec.N + 1):
        power = power * d
        h = h + power.scale(spec.g(n))
    return h


# ---------------------------------------------------------------------------
# the integral ansatz
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AnsatzUnknown:
    n: int
    j: int
    a: int  # exponent of q1 in the monomial q1^a q2^(n-a)

    @property
    def label(self) -> str:
        return f"Q({self.n - self.j},{self.j})[q1^{self.a} q2^{self.n - self.a}]"

    def basis_element(self) -> PhasePolynomial:
        n, j, a = self.n, self.j, self.a
        return PhasePolynomial({(a, n - a, j, n - j): ParamPolynomial.var(f"g{n}")})


def ansatz_unknowns(N: int) -> list[AnsatzUnknown]:
    return [
        AnsatzUnknown(n, j, a)
        for n in range(1, N + 1)
        for j in range(phi(n) + 1)
        for a in range(n + 1)
    ]


@dataclass
class IntegralSolution:
    """Solved integral I_N with its coefficient polynomials.

    ``q_table[(n, j)]`` is Q^(n-j, j)(q1, q2), the factor multiplying
    g_n p2^(n-j) p1^j.
    """

    N: int
    integral: PhasePolynomial
    q_table: dict[tuple[int, int], PhasePolynomial]
    free_parameters: list[str] = field(default_factory=list)

    @property
    def underdetermined(self) -> bool:
        return bool(self.free_parameters)

    def q_text(self) -> dict[str, str]:
        return {f"Q^({n - j},{j})": q.to_text() for (n, j), q in sorted(self.q_table.items())}


def solve_integral_ansatz(spec: SystemSpec) -> IntegralSolution:
    """Derive I_N from {H_N, I_N} = 0 with symbolic g_n.

    Every unknown coefficient of every Q polynomial is a column; every
    (phase monomial, parameter monomial) of the bracket is a row.
    Residual free parameters, if any, are set to zero and reported.
    """
    if not spec.symbolic:
        raise ValueError("the ansatz is solved with symbolic gammas; specialize afterwards")
    return _solve_ansatz(spec.N)


@lru_cache(maxsize=None)
def _solve_ansatz(N: int) -> IntegralSolution:
    spec = SystemSpec(N)
    h = build_hamiltonian(spec)
    unknowns = ansatz_unknowns(N)
    lead = PhasePolynomial({(0, 0, 0, 2): 1})

    row_index: dict[tuple, int] = {}
    rows: list[dict[int, GaussianRational]] = []
    rhs: list[GaussianRational] = []

    def row_for(key):
        if key not in row_index:
            row_index[key] = len(rows)
            rows.append({})
            rhs.append(GaussianRational(0))
        return row_index[key]

    for m, t in poisson_bracket(h, lead)._terms.items():
        for k, c in t.items():
            rhs[row_for((m, k))] = -c
    for col, u in enumerate(unknowns):
        for m, t in poisson_bracket(h, u.basis_element())._terms.items():
            for k, c in t.items():
                rows[row_for((m, k))][col] = c

    try:
        sol = solve(rows, rhs, len(unknowns))
    except NoSolutionError as exc:
        raise NoSolutionError(f"no integral of the assumed shape for N={N}") from exc

    integral = lead
    q_table: dict[tuple[int, int], PhasePolynomial] = {}
    for u, v in zip(unknowns, sol.values):
        if v:
            integral = integral + u.basis_element().scale(v)
            key = (u.n, u.j)
            q_table[key] = q_table.get(key, PhasePolynomial.zero()) + PhasePolynomial(
                {(u.a, u.n - u.a, 0, 0): v})
    for n in range(1, N + 1):
        for j in range(phi(n) + 1):
            q_table.setdefault((n, j), PhasePolynomial.zero())
    free = [unknowns[f].label for f in sol.free_columns]
    if not poisson_bracket(h, integral).is_zero():  # pragma: no cover - guarded by solve()
        raise NoSolutionError("solved integral does not commute with H")
    return IntegralSolution(N=N, integral=integral, q_table=q_table, free_parameters=free)


def swap_integral(sol: IntegralSolution | PhasePolynomial) -> PhasePolynomial:
    """I'_N(q1, p1, q2, p2) = I_N(q2, p2, q1, p1)."""
    poly = sol.integral if isinstance(sol, IntegralSolution) else sol
    return poly.swap()


def relation_residual(spec: SystemSpec, sol: IntegralSolution) -> PhasePolynomial:
    """H_N - I_N - I'_N - sum_{k=1}^{phi(N+1)/2} (-1)^k g_{2k} C^{2k}."""
    h = build_hamiltonian(SystemSpec(spec.N))
    c2 = build_angular_momentum() ** 2
    res = h - sol.integral - swap_integral(sol)
    c_pow = PhasePolynomial.const(1)
    for k in range(1, phi(spec.N + 1) // 2 + 1):
        c_pow = c_pow * c2
        res = res - c_pow.scale(SystemSpec(spec.N).g(2 * k) * (-1) ** k)
    return spec.specialize(res)


def check_dependence_relation(spec: SystemSpec, sol: IntegralSolution):
    """Return ``(holds, residual)`` for the dependence relation among H, I, I', C."""
    res = relation_residual(spec, sol)
    return res.is_zero(), res


# ---------------------------------------------------------------------------
# functional independence and randomized identity testing
# ---------------------------------------------------------------------------

def random_rational(rng: random.Random, bound: int = 97, nonzero: bool = False) -> Fraction:
    while True:
        x = Fraction(rng.randint(-bound, bound), rng.randint(1, bound))
        if x or not nonzero:
            return x


def functional_independence_rank(fns: Sequence[PhasePolynomial], point) -> int:
    """Exact rank of the Jacobian d(fns)/d(q1, q2, p1, p2) at ``point``.

    ``point`` must assign q1..p2 and every parameter left in ``fns``.
    """
    if not fns:
        raise ValueError("need at least one function")
    rows = []
    for f in fns:
        rows.append([f.partial_derivative(v).evaluate(point) for v in PHASE_VARS])
    return rank(rows, 4)


def independence_survey(fns: Sequence[PhasePolynomial], spec: SystemSpec, n_points: int = 10,
                        seed: int = 0, generic_rank: int | None = None) -> list[int]:
    """Jacobian ranks at ``n_points`` random rational phase-space points.

    Warns with :class:`DegeneratePointWarning` if the rank is below
    ``generic_rank`` at 5 consecutive points. Symbolic specs draw fresh
    nonzero g_n with every point.
    """
    rng = random.Random(seed)
    params = spec.assignment() if not spec.symbolic else {}
    generic = len(fns) if generic_rank is None else generic_rank
    ranks, low_streak = [], 0
    for _ in range(n_points):
        point = {v: random_rational(rng) for v in PHASE_VARS}
        if spec.symbolic:
            point.update({g: random_rational(rng, nonzero=True) for g in spec.param_names()})
        else:
            point.update(params)
        r = functional_independence_rank(fns, point)
        ranks.append(r)
        low_streak = low_streak + 1 if r < generic else 0
        if low_streak == 5:
            warnings.warn(f"Jacobian rank below {generic} at 5 consecutive points",
                          DegeneratePointWarning, stacklevel=2)
    return ranks


def random_identity_check(poly: PhasePolynomial, n_points: int = 20, seed: int = 0,
                          fixed: dict | None = None) -> bool:
    """Schwartz-Zippel style test: ``poly`` vanishes at random rational points."""
    rng = random.Random(seed)
    names = list(PHASE_VARS) + sorted(poly.parameters())
    for _ in range(n_points):
        point = {v: random_rational(rng) for v in names}
        if fixed:
            point.update(fixed)
        if poly.evaluate(point):
            return False
    return True
