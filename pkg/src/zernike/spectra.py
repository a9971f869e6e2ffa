"""Algebraic spectra of the quantum Hamiltonians from their symmetry algebra.

Pipeline (N <= 4):

1. K1 = C, K2 = (I'_N - I_N)/2, K3 = [K1, K2].
2. Ladder basis K = K1/2, K+- = K2 +- K3/2 - (g2/2 - 2 g4) K1^2 with
   [K, K+-] = +-K+- and K+ K- = Phi1(H, K) Phi2(H, K).
3. Deformed oscillator B = K - u, b+- = K+-.
4. Finite-dimensional representations: Phi vanishes at B = 0 and at
   B = n + 1. Each factor is linear in the energy, so every assignment of
   factors to the two ends gives a polynomial equation for u whose roots
   (rational in n and the g's) fix u(n) and E(n).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import sympy

from .classical import SystemSpec
from .gaussian import I as IMAG
from .gaussian import GaussianRational
from .poly import ParamPolynomial, realize
from .weyl import (
    OperatorPolynomial,
    build_quantum_hamiltonian,
    build_quantum_integral,
    build_quantum_integral_prime,
    commutator,
    quantum_angular_momentum,
)

__all__ = [
    "ClosureError",
    "IdentityError",
    "NoSpectrumError",
    "LadderBasis",
    "StructureOperator",
    "DeformedOscillator",
    "RationalFunction",
    "SpectrumFamily",
    "build_ladder_basis",
    "structure_factors",
    "build_structure_operator",
    "deformed_oscillator",
    "solve_spectrum",
    "real_parameter_substitution",
    "to_real_parameters",
    "zernike_specialization",
]

log = logging.getLogger(__name__)

E_SYM, K_SYM, N_SYM, U_SYM = "E", "k", "n", "u"


class ClosureError(ArithmeticError):
    """The ladder relation [K, K+-] = +-K+- failed."""


class IdentityError(ArithmeticError):
    """An operator identity left a nonzero residual."""

    def __init__(self, message: str, residual):
        super().__init__(message)
        self.residual = residual


class NoSpectrumError(ArithmeticError):
    """No assignment of factors gives a consistent representation."""


# ---------------------------------------------------------------------------
# steps (i)-(iii)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LadderBasis:
    K: OperatorPolynomial
    K_plus: OperatorPolynomial
    K_minus: OperatorPolynomial
    K1: OperatorPolynomial
    K2: OperatorPolynomial
    K3: OperatorPolynomial
    change_of_basis: dict = field(default_factory=dict)


def build_ladder_basis(spec: SystemSpec) -> LadderBasis:
    return _ladder_basis(spec)


@lru_cache(maxsize=32)
def _ladder_basis(spec: SystemSpec) -> LadderBasis:
    I_N = build_quantum_integral(spec)
    I_prime = build_quantum_integral_prime(spec)
    K1 = quantum_angular_momentum()
    K2 = (I_prime - I_N) / 2
    K3 = commutator(K1, K2)
    shift = spec.g(2) / 2 - 2 * spec.g(4)
    K1_sq = (K1 * K1).scale(shift)
    K = K1 / 2
    K_plus = K2 + K3 / 2 - K1_sq
    K_minus = K2 - K3 / 2 - K1_sq
    if commutator(K, K_plus) != K_plus or commutator(K, K_minus) != -K_minus:
        raise ClosureError(f"ladder relation fails for N={spec.N}")
    record = {"K": "K1/2", "K_pm": "K2 +- K3/2 - s*K1^2", "s": shift.to_text()}
    return LadderBasis(K, K_plus, K_minus, K1, K2, K3, record)


def _f(spec: SystemSpec, x: ParamPolynomial) -> ParamPolynomial:
    """sum_n g_n x^n, the potential part of H_N as a function of x."""
    total = ParamPolynomial.const(0)
    for n in range(1, spec.N + 1):
        total = total + spec.g(n) * x ** n
    return total


def structure_factors(spec: SystemSpec) -> tuple[ParamPolynomial, ParamPolynomial]:
    """Phi1(E, k) = (E - f(2ik))/4 and Phi2(E, k) = E - f(2i(1 - k))."""
    E = ParamPolynomial.var(E_SYM)
    k = ParamPolynomial.var(K_SYM)
    phi1 = (E - _f(spec, k * 2 * IMAG)) / 4
    phi2 = E - _f(spec, (1 - k) * 2 * IMAG)
    return phi1, phi2


@dataclass(frozen=True)
class StructureOperator:
    """Factor pair in the formal symbols ``E`` (energy) and ``k`` (for K)."""

    phi1: ParamPolynomial
    phi2: ParamPolynomial

    @property
    def phi(self) -> ParamPolynomial:
        return self.phi1 * self.phi2

    def shifted(self, delta) -> ParamPolynomial:
        """Phi(E, k + delta)."""
        k = ParamPolynomial.var(K_SYM)
        return self.phi.substitute({K_SYM: k + delta})

    def realize(self, H: OperatorPolynomial, K: OperatorPolynomial, delta=0) -> OperatorPolynomial:
        return realize(self.shifted(delta), {E_SYM: H, K_SYM: K})


def build_structure_operator(spec: SystemSpec, basis: LadderBasis | None = None) -> StructureOperator:
    """Certify K+ K- = Phi1(H, K) Phi2(H, K) and [K-, K+] = Phi(H, K+1) - Phi(H, K)."""
    if basis is None:
        basis = build_ladder_basis(spec)
    so = StructureOperator(*structure_factors(spec))
    H = build_quantum_hamiltonian(spec)
    res = basis.K_plus * basis.K_minus - so.realize(H, basis.K)
    if not res.is_zero():
        raise IdentityError("K+ K- != Phi1 Phi2", res)
    res = commutator(basis.K_minus, basis.K_plus) - (so.realize(H, basis.K, 1) - so.realize(H, basis.K))
    if not res.is_zero():
        raise IdentityError("[K-, K+] != Phi(H, K+1) - Phi(H, K)", res)
    return so


@dataclass(frozen=True)
class DeformedOscillator:
    B: OperatorPolynomial
    b_minus: OperatorPolynomial
    b_plus: OperatorPolynomial
    u: ParamPolynomial
    residuals: tuple


def deformed_oscillator(spec: SystemSpec, basis: LadderBasis | None = None,
                        so: StructureOperator | None = None, u=None) -> DeformedOscillator:
    """B = K - u, b- = K-, b+ = K+; the three relations are checked formally in ``u``."""
    if basis is None:
        basis = build_ladder_basis(spec)
    if so is None:
        so = build_structure_operator(spec, basis)
    u = ParamPolynomial.var(U_SYM) if u is None else ParamPolynomial.const(u)
    B = basis.K - OperatorPolynomial.const(u)
    bm, bp = basis.K_minus, basis.K_plus
    H = build_quantum_hamiltonian(spec)
    k = ParamPolynomial.var(K_SYM)
    upper = realize(so.phi.substitute({K_SYM: k + u + 1}), {E_SYM: H, K_SYM: B})
    lower = realize(so.phi.substitute({K_SYM: k + u}), {E_SYM: H, K_SYM: B})
    residuals = (
        commutator(B, bp) - bp,
        commutator(B, bm) + bm,
        commutator(bm, bp) - (upper - lower),
    )
    for name, r in zip(("[B,b+]", "[B,b-]", "[b-,b+]"), residuals):
        if not r.is_zero():
            raise IdentityError(f"deformed oscillator relation {name} fails", r)
    return DeformedOscillator(B, bm, bp, u, residuals)


# ---------------------------------------------------------------------------
# rational functions and the sympy bridge (used only for factoring)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RationalFunction:
    num: ParamPolynomial
    den: ParamPolynomial

    @classmethod
    def from_poly(cls, p: ParamPolynomial) -> RationalFunction:
        return cls(p, ParamPolynomial.const(1))

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def polynomial(self) -> ParamPolynomial:
        if not self.is_polynomial():
            raise ValueError(f"{self} is not a polynomial")
        return self.num / self.den.constant_term()

    def substitute(self, mapping) -> RationalFunction:
        den = self.den.substitute(mapping)
        if den.is_zero():
            raise ZeroDivisionError("denominator vanishes under substitution")
        return _normalize(self.num.substitute(mapping), den)

    def evaluate(self, point) -> GaussianRational:
        return self.num.evaluate(point) / self.den.evaluate(point)

    def to_text(self) -> str:
        if self.is_polynomial():
            return self.polynomial().to_text()
        return f"({self.num.to_text()})/({self.den.to_text()})"

    __str__ = to_text


def _normalize(num: ParamPolynomial, den: ParamPolynomial) -> RationalFunction:
    lead = den.sorted_terms()[0][1]
    return RationalFunction(num / lead, den / lead)


def _sym(name: str) -> sympy.Symbol:
    return sympy.Symbol(name)


def _to_sympy(p: ParamPolynomial):
    expr = sympy.Integer(0)
    for k, c in p.terms.items():
        coeff = sympy.Rational(Fraction(c.re).numerator, Fraction(c.re).denominator)
        if c.im:
            coeff += sympy.I * sympy.Rational(Fraction(c.im).numerator, Fraction(c.im).denominator)
        mono = sympy.Integer(1)
        for name, e in k:
            mono *= _sym(name) ** e
        expr += coeff * mono
    return expr


def _from_sympy(expr) -> ParamPolynomial:
    expr = sympy.expand(expr)
    gens = sorted(expr.free_symbols, key=lambda s: s.name)
    if not gens:
        return ParamPolynomial.const(_gaussian(expr))
    poly = sympy.Poly(expr, *gens)
    terms = {}
    for exps, c in poly.terms():
        key = tuple((g.name, e) for g, e in zip(gens, exps) if e)
        terms[key] = _gaussian(c)
    return ParamPolynomial(terms)


def _gaussian(c) -> GaussianRational:
    re, im = sympy.sympify(c).as_real_imag()
    return GaussianRational(Fraction(int(re.p), int(re.q)), Fraction(int(im.p), int(im.q)))


def _linear_roots(F: ParamPolynomial, var: str, g_names: list[str]) -> list:
    """Roots of F in ``var`` that are rational in the other symbols (as sympy exprs).

    The substitution g_n = (-i)^n t_n makes the structure polynomials real,
    which lets the bulk of the factoring run over Q; remaining factors of
    degree >= 2 are re-factored over Q(i).
    """
    x = _sym(var)
    expr = _to_sympy(F)
    t_of = {}
    for name in g_names:
        n = int(name[1:])
        t_of[_sym(name)] = (-sympy.I) ** n * _sym("t" + name[1:])
    real_expr = sympy.expand(expr.subs(t_of, simultaneous=True))
    back = {_sym("t" + name[1:]): sympy.I ** int(name[1:]) * _sym(name) for name in g_names}
    if real_expr.has(sympy.I):
        factors = [f for f, _ in sympy.factor_list(expr, gaussian=True)[1]]
        back = {}
    else:
        factors = []
        for f, _ in sympy.factor_list(real_expr)[1]:
            if sympy.degree(f, x) >= 2:
                factors.extend(h for h, _ in sympy.factor_list(f, gaussian=True)[1])
            else:
                factors.append(f)
    roots = []
    for f in factors:
        if sympy.degree(f, x) != 1:
            continue
        c1, c0 = sympy.Poly(f, x).all_coeffs()
        roots.append(sympy.cancel((-c0 / c1).subs(back, simultaneous=True)))
    return roots


def _rf_from_sympy(expr) -> RationalFunction:
    num, den = sympy.fraction(sympy.cancel(sympy.together(expr)))
    return _normalize(_from_sympy(num), _from_sympy(den))


def _vanishes(phi: ParamPolynomial, E: RationalFunction, k: RationalFunction) -> bool:
    """Whether phi(E, k) is identically zero (denominators cleared)."""
    return _cleared(phi, E, k).is_zero()


def _cleared(phi: ParamPolynomial, E: RationalFunction, k: RationalFunction) -> ParamPolynomial:
    de = max(phi.degree_in(E_SYM), 0)
    dk = max(phi.degree_in(K_SYM), 0)
    total = ParamPolynomial.const(0)
    for key, c in phi.terms.items():
        d = dict(key)
        e, j = d.pop(E_SYM, 0), d.pop(K_SYM, 0)
        rest = ParamPolynomial({tuple(d.items()): c})
        total = total + rest * E.num ** e * E.den ** (de - e) * k.num ** j * k.den ** (dk - j)
    return total


# ---------------------------------------------------------------------------
# step (iv)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpectrumFamily:
    """One branch (u(n), E(n)) of finite-dimensional representations."""

    label: str
    u_of_n: RationalFunction
    E_of_n: RationalFunction
    factor_assignment: tuple[str, str]  # (factor vanishing at B=0, at B=n+1)
    interior_nondegenerate: bool

    @property
    def energy(self) -> ParamPolynomial:
        return self.E_of_n.polynomial()

    def level(self, n: int, params=None) -> GaussianRational:
        point = {N_SYM: n}
        point.update(params or {})
        return self.E_of_n.evaluate(point)

    def substitute(self, mapping) -> SpectrumFamily:
        return SpectrumFamily(self.label, self.u_of_n.substitute(mapping),
                              self.E_of_n.substitute(mapping), self.factor_assignment,
                              self.interior_nondegenerate)


_ASSIGNMENTS = (("Phi1", "Phi2"), ("Phi2", "Phi1"), ("Phi1", "Phi1"), ("Phi2", "Phi2"))
_EXTRA_LABELS = ("III", "IV", "V", "VI", "VII", "VIII")


def _energy_root(phi: ParamPolynomial) -> ParamPolynomial:
    """Solve phi(E, k) = 0 for E; phi must be linear in E with constant slope."""
    parts = phi.coefficients_in(E_SYM)
    if set(parts) - {0, 1} or 1 not in parts or not parts[1].is_constant():
        raise ValueError("structure factor is not linear in the energy")
    return -parts.get(0, ParamPolynomial.const(0)) / parts[1].constant_term()


def solve_spectrum(spec: SystemSpec, interior_samples: int = 10) -> list[SpectrumFamily]:
    """All consistent (u(n), E(n)) branches; numeric specs are specialized at the end."""
    families = _solve_symbolic(spec.N, interior_samples)
    if spec.symbolic:
        return list(families)
    out = []
    for fam in families:
        try:
            out.append(fam.substitute(spec.assignment()))
        except ZeroDivisionError:
            log.info("family %s is singular at the given parameters; dropped", fam.label)
    if not out:
        raise NoSpectrumError("no family survives the numeric specialization")
    return out


@lru_cache(maxsize=None)
def _solve_symbolic(N: int, interior_samples: int) -> tuple[SpectrumFamily, ...]:
    spec = SystemSpec(N)
    factors = dict(zip(("Phi1", "Phi2"), structure_factors(spec)))
    energies = {name: _energy_root(phi) for name, phi in factors.items()}
    n = ParamPolynomial.var(N_SYM)
    u = ParamPolynomial.var(U_SYM)
    found: list[SpectrumFamily] = []
    seen = set()
    extra = iter(_EXTRA_LABELS)
    for bottom, top in _ASSIGNMENTS:
        e_bottom = energies[bottom].substitute({K_SYM: u})
        e_top = energies[top].substitute({K_SYM: u + n + 1})
        roots = _linear_roots(e_top - e_bottom, U_SYM, spec.param_names())
        if not roots:
            log.info("assignment (%s, %s) admits no rational u(n)", bottom, top)
        for root in roots:
            u_rf = _rf_from_sympy(root)
            e_rf = _rf_from_sympy(_to_sympy(energies[bottom]).subs(_sym(K_SYM), root))
            k_top = RationalFunction(u_rf.num + (n + 1) * u_rf.den, u_rf.den)
            if not (_vanishes(factors[bottom], e_rf, u_rf) and _vanishes(factors[top], e_rf, k_top)):
                log.info("assignment (%s, %s): boundary check failed; dropped", bottom, top)
                continue
            key = (u_rf.to_text(), e_rf.to_text())
            if key in seen:
                continue
            seen.add(key)
            if (bottom, top) == ("Phi1", "Phi2"):
                label = "I"
            elif (bottom, top) == ("Phi2", "Phi1"):
                label = "II"
            else:
                label = next(extra)
            nondeg = _interior_nondegenerate(factors, u_rf, e_rf, interior_samples)
            found.append(SpectrumFamily(label, u_rf, e_rf, (bottom, top), nondeg))
    if not found:
        raise NoSpectrumError(f"no consistent representation for N={N}")
    return tuple(found)


def _interior_nondegenerate(factors, u_rf: RationalFunction, e_rf: RationalFunction,
                            samples: int) -> bool:
    phi = factors["Phi1"] * factors["Phi2"]
    for n_val in range(1, samples + 1):
        at_n = {N_SYM: n_val}
        u_n = u_rf.substitute(at_n)
        e_n = e_rf.substitute(at_n)
        for B in range(1, n_val + 1):
            k = RationalFunction(u_n.num + B * u_n.den, u_n.den)
            if _vanishes(phi, e_n, k):
                return False
    return True


# ---------------------------------------------------------------------------
# real parametrization and the Zernike point
# ---------------------------------------------------------------------------

REAL_NAMES = ("beta", "alpha", "mu", "nu")


def real_parameter_substitution(N: int = 4) -> dict[str, ParamPolynomial]:
    """(g1, g2, g3, g4) = (-i beta, alpha, i mu, -nu), truncated to N."""
    b, a, m, v = (ParamPolynomial.var(x) for x in REAL_NAMES)
    full = {"g1": b * (-IMAG), "g2": a, "g3": m * IMAG, "g4": -v}
    return {f"g{n}": full[f"g{n}"] for n in range(1, min(N, 4) + 1)}


def to_real_parameters(family: SpectrumFamily, N: int = 4) -> SpectrumFamily:
    return family.substitute(real_parameter_substitution(N))


def zernike_specialization(mu=None, nu=None) -> tuple[ParamPolynomial, ParamPolynomial]:
    """Types I and II at alpha = -1, beta = -2 as polynomials in ``n``.

    ``mu``/``nu`` default to free symbols; pass exact rationals to fix them.
    """
    fams = {f.label: f for f in solve_spectrum(SystemSpec(4))}
    point: dict = {"beta": -2, "alpha": -1}
    if mu is not None:
        point["mu"] = Fraction(mu)
    if nu is not None:
        point["nu"] = Fraction(nu)
    out = []
    for label in ("I", "II"):
        fam = to_real_parameters(fams[label])
        out.append(fam.E_of_n.substitute(point).polynomial())
    return out[0], out[1]
