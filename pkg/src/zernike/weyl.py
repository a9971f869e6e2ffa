"""Normal-ordered operator polynomials in Q1, Q2, P1, P2 with [Qi, Pj] = i delta_ij.

Monomials are stored with every position factor to the left of every
momentum factor. Products are brought back to that order with the closed
form

    P^b Q^c = sum_k k! C(b, k) C(c, k) (-i)^k Q^(c-k) P^(b-k)

applied independently to each index (different indices commute).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache
from math import comb, factorial

from .classical import SystemSpec
from .gaussian import GaussianRational
from .poly import (
    ParamPolynomial,
    PhasePolynomial,
    _PhaseSpaceBase,
    _padd,
    _pmul,
    _pscale,
    parse_expression,
)

__all__ = [
    "OperatorPolynomial",
    "CommutationRewriter",
    "UnsupportedOrderError",
    "op_mul",
    "commutator",
    "op",
    "parse_operator",
    "classical_limit",
    "from_classical",
    "quantum_dilation",
    "quantum_angular_momentum",
    "build_quantum_hamiltonian",
    "build_quantum_integral",
    "build_quantum_integral_prime",
    "quantum_relation_residual",
    "verify_quantum_relation",
]

OP_NAMES = ("Q1", "Q2", "P1", "P2")
_NEG_I = GaussianRational(0, -1)


class UnsupportedOrderError(ValueError):
    """Quantum integrals are only available for N <= 4."""


@lru_cache(maxsize=None)
def _reorder(b: int, c: int) -> tuple[tuple[int, GaussianRational], ...]:
    """Coefficients of P^b Q^c = sum_k coef_k Q^(c-k) P^(b-k) for one index."""
    return tuple(
        (k, GaussianRational(factorial(k) * comb(b, k) * comb(c, k)) * _NEG_I ** k)
        for k in range(min(b, c) + 1)
    )


@lru_cache(maxsize=None)
def _monomial_product(m1: tuple, m2: tuple) -> tuple:
    a1, a2, b1, b2 = m1
    c1, c2, d1, d2 = m2
    out = []
    for k1, x1 in _reorder(b1, c1):
        for k2, x2 in _reorder(b2, c2):
            out.append(((a1 + c1 - k1, a2 + c2 - k2, b1 + d1 - k1, b2 + d2 - k2), x1 * x2))
    return tuple(out)


class OperatorPolynomial(_PhaseSpaceBase):
    """Element of the Weyl algebra (hbar = 1) over parameter polynomials."""

    __slots__ = ()
    _names = OP_NAMES

    def _mul_terms(self, a, b):
        out: dict = {}
        for m1, t1 in a.items():
            for m2, t2 in b.items():
                p = _pmul(t1, t2)
                if not p:
                    continue
                for m, x in _monomial_product(m1, m2):
                    s = _pscale(p, x)
                    if m in out:
                        s = _padd(out[m], s)
                        if s:
                            out[m] = s
                        else:
                            del out[m]
                    else:
                        out[m] = s
        return out

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        result = OperatorPolynomial.const(1)
        for _ in range(k):
            result = result * self
        return result


def op_mul(a: OperatorPolynomial, b: OperatorPolynomial) -> OperatorPolynomial:
    return a * b


def commutator(a: OperatorPolynomial, b: OperatorPolynomial) -> OperatorPolynomial:
    return a * b - b * a


def op(name: str) -> OperatorPolynomial:
    return OperatorPolynomial.generator(name)


def classical_limit(a: OperatorPolynomial) -> PhasePolynomial:
    """Read each normal-ordered monomial as a commutative one."""
    return PhasePolynomial._wrap(dict(a._terms))


def from_classical(a: PhasePolynomial) -> OperatorPolynomial:
    """Normal-ordered quantization (positions left)."""
    return OperatorPolynomial._wrap(dict(a._terms))


def quantum_dilation() -> OperatorPolynomial:
    return OperatorPolynomial({(1, 0, 1, 0): 1, (0, 1, 0, 1): 1})


def quantum_angular_momentum() -> OperatorPolynomial:
    return OperatorPolynomial({(1, 0, 0, 1): 1, (0, 1, 1, 0): -1})


def parse_operator(text: str, extra: dict[str, OperatorPolynomial] | None = None):
    """Parse an operator expression; products keep their written order.

    ``C`` denotes the angular momentum Q1*P2 - Q2*P1 unless overridden.
    """
    named = {"C": quantum_angular_momentum()}
    named.update(extra or {})

    def sym(name):
        if name.upper() in ("Q1", "Q2", "P1", "P2"):
            return op(name)
        if name in named:
            return named[name]
        return OperatorPolynomial.const(ParamPolynomial.var(name))

    return parse_expression(text, sym, OperatorPolynomial)


# ---------------------------------------------------------------------------
# explicit word rewriting (independent of the closed-form product)
# ---------------------------------------------------------------------------

_LETTER_RANK = {"q1": 0, "q2": 1, "p1": 2, "p2": 3}


class CommutationRewriter:
    """Rewrite words in q1, q2, p1, p2 to normal order one swap at a time.

    The only non-trivial rule is p_i q_i -> q_i p_i - i; every other
    out-of-order adjacent pair commutes. ``strategy`` picks which redex
    to rewrite: ``"leftmost"``, ``"rightmost"`` or ``"random"``.
    """

    def __init__(self, strategy: str = "leftmost", seed: int | None = None):
        if strategy not in ("leftmost", "rightmost", "random"):
            raise ValueError(f"unknown strategy {strategy!r}")
        self.strategy = strategy
        self.rng = random.Random(seed)

    @staticmethod
    def redexes(word: tuple[str, ...]) -> list[int]:
        return [i for i in range(len(word) - 1)
                if _LETTER_RANK[word[i]] > _LETTER_RANK[word[i + 1]]]

    def _pick(self, positions: list[int]) -> int:
        if self.strategy == "leftmost":
            return positions[0]
        if self.strategy == "rightmost":
            return positions[-1]
        return self.rng.choice(positions)

    def step(self, word: tuple[str, ...], pos: int) -> list[tuple[tuple[str, ...], GaussianRational]]:
        x, y = word[pos], word[pos + 1]
        swapped = word[:pos] + (y, x) + word[pos + 2:]
        if x[0] == "p" and y[0] == "q" and x[1] == y[1]:
            return [(swapped, GaussianRational(1)), (word[:pos] + word[pos + 2:], _NEG_I)]
        return [(swapped, GaussianRational(1))]

    def normal_form(self, word) -> OperatorPolynomial:
        pending: dict[tuple[str, ...], GaussianRational] = {tuple(word): GaussianRational(1)}
        done: dict[tuple, GaussianRational] = {}
        while pending:
            w, c = pending.popitem()
            if not c:
                continue
            positions = self.redexes(w)
            if not positions:
                m = tuple(w.count(v) for v in ("q1", "q2", "p1", "p2"))
                done[m] = done.get(m, GaussianRational(0)) + c
                continue
            for nw, x in self.step(w, self._pick(positions)):
                pending[nw] = pending.get(nw, GaussianRational(0)) + c * x
        return OperatorPolynomial(done)


# ---------------------------------------------------------------------------
# quantum Hamiltonian and integrals
# ---------------------------------------------------------------------------

def build_quantum_hamiltonian(spec: SystemSpec) -> OperatorPolynomial:
    """P1^2 + P2^2 + sum_n g_n D^n with D = Q1 P1 + Q2 P2 multiplied as written."""
    return spec.specialize(_quantum_hamiltonian(spec.N))


@lru_cache(maxsize=None)
def _quantum_hamiltonian(N: int) -> OperatorPolynomial:
    spec = SystemSpec(N)
    h = OperatorPolynomial({(0, 0, 2, 0): 1, (0, 0, 0, 2): 1})
    d = quantum_dilation()
    power = OperatorPolynomial.const(1)
    for n in range(1, N + 1):
        power = power * d
        h = h + power.scale(spec.g(n))
    return h


# Quantum integral for N = 4 as displayed (g5.. absent); lower N by truncation.
QUANTUM_INTEGRAL_N4 = (
    "P2^2 + g1*Q2*P2 + g2*((Q1^2 + Q2^2)*P2^2 - C^2)"
    " + g3*(Q2^3*(P2^3 - P1^2*P2) + (Q1^3 + 3*Q1*Q2^2)*P1*P2^2"
    " - 3*i*Q2^2*P2^2 - 3*i*Q1*Q2*P1*P2 - Q2*P2)"
    " + g4*((Q2^4 - Q1^4)*(P2^4 - P1^2*P2^2) + 4*(Q1^3*Q2 + Q1*Q2^3)*P1*P2^3"
    " - 6*i*(Q2^3 + Q1^2*Q2)*P2^3 - 6*i*(Q1^3 + Q1*Q2^2)*P1*P2^2"
    " - 4*(Q1^2 + Q2^2)*P2^2 + 4*C^2)"
)


def _check_order(spec: SystemSpec):
    if spec.N > 4:
        raise UnsupportedOrderError(
            f"quantum integrals are available for N <= 4 only (got N={spec.N})")


@lru_cache(maxsize=None)
def _quantum_integral(N: int) -> OperatorPolynomial:
    full = parse_operator(QUANTUM_INTEGRAL_N4)
    return full.truncate_params([f"g{m}" for m in range(N + 1, 5)])


def build_quantum_integral(spec: SystemSpec) -> OperatorPolynomial:
    _check_order(spec)
    return spec.specialize(_quantum_integral(spec.N))


def _c2_shift(spec: SystemSpec) -> ParamPolynomial:
    return spec.g(2) - 4 * spec.g(4)


def build_quantum_integral_prime(spec: SystemSpec) -> OperatorPolynomial:
    """Companion integral I'_N entering the dependence relation.

    This is the 1<->2 swap of I_N with its C^2 terms, (4 g4 - g2) C^2,
    removed; its classical limit is the swap of the classical integral.
    """
    _check_order(spec)
    c2 = quantum_angular_momentum() * quantum_angular_momentum()
    return build_quantum_integral(spec).swap() + c2.scale(_c2_shift(spec))


def quantum_relation_residual(spec: SystemSpec) -> OperatorPolynomial:
    """H_N - I_N - I'_N + 4 g4 C^2 - g4 C^4."""
    _check_order(spec)
    c = quantum_angular_momentum()
    c2 = c * c
    res = (build_quantum_hamiltonian(spec) - build_quantum_integral(spec)
           - build_quantum_integral_prime(spec))
    res = res + c2.scale(4 * spec.g(4)) - (c2 * c2).scale(spec.g(4))
    return res


def verify_quantum_relation(spec: SystemSpec):
    """Return ``(holds, residual)`` for the quantum dependence relation."""
    res = quantum_relation_residual(spec)
    return res.is_zero(), res
