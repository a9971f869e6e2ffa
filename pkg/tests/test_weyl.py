import random

import pytest
from conftest import random_phase_poly

from zernike import data_path
from zernike.classical import (
    SystemSpec,
    build_angular_momentum,
    build_hamiltonian,
    solve_integral_ansatz,
)
from zernike.gaussian import I
from zernike.poly import ParamPolynomial, PhasePolynomial, poisson_bracket
from zernike.weyl import (
    CommutationRewriter,
    OperatorPolynomial,
    UnsupportedOrderError,
    build_quantum_hamiltonian,
    build_quantum_integral,
    build_quantum_integral_prime,
    classical_limit,
    commutator,
    from_classical,
    op,
    parse_operator,
    quantum_angular_momentum,
    verify_quantum_relation,
)

Q1, Q2, P1, P2 = (op(v) for v in ("Q1", "Q2", "P1", "P2"))
LETTERS = ("q1", "q2", "p1", "p2")


def test_ccr():
    one = OperatorPolynomial.const(1)
    assert commutator(Q1, P1) == one.scale(I)
    assert commutator(Q2, P2) == one.scale(I)
    assert commutator(Q1, P2).is_zero()
    assert commutator(Q1, Q2).is_zero()
    assert commutator(P1, P2).is_zero()


def test_reorder_example():
    # P Q = Q P - i
    assert P1 * Q1 == Q1 * P1 - OperatorPolynomial.const(1).scale(I)
    assert (P1 * P1 * Q1).to_text() == "Q1*P1^2 - 2*i*P1"


def _word_product(word):
    out = OperatorPolynomial.const(1)
    for letter in word:
        out = out * op(letter)
    return out


@pytest.mark.parametrize("strategy", ["leftmost", "rightmost", "random"])
def test_rewriter_matches_closed_form(strategy):
    rng = random.Random(2024)
    rw = CommutationRewriter(strategy, seed=9)
    for _ in range(60):
        word = tuple(rng.choice(LETTERS) for _ in range(rng.randint(0, 7)))
        assert rw.normal_form(word) == _word_product(word)


def test_rewriter_rejects_unknown_strategy():
    with pytest.raises(ValueError):
        CommutationRewriter("outermost")


def test_associativity():
    rng = random.Random(4)
    for _ in range(10):
        a, b, c = (from_classical(random_phase_poly(rng, 3)) for _ in range(3))
        assert (a * b) * c == a * (b * c)


def test_classical_limit_of_commutator():
    """Top-degree part of [a, b] is i times the Poisson bracket for homogeneous a, b."""
    rng = random.Random(8)
    for _ in range(15):
        a = _homogeneous(rng, rng.randint(1, 3))
        b = _homogeneous(rng, rng.randint(1, 3))
        qa, qb = from_classical(a), from_classical(b)
        top = a.degree() + b.degree() - 2
        lhs = _part_of_degree(classical_limit(commutator(qa, qb)), top)
        rhs = poisson_bracket(a, b).scale(I)
        assert lhs == rhs


def _homogeneous(rng, d):
    out = PhasePolynomial.zero()
    for _ in range(3):
        cut = sorted(rng.randint(0, d) for _ in range(3))
        m = (cut[0], cut[1] - cut[0], cut[2] - cut[1], d - cut[2])
        out = out + PhasePolynomial.monomial(m, rng.randint(-3, 3))
    return out


def _part_of_degree(p, d):
    return PhasePolynomial({m: c for m, c in p.terms.items() if sum(m) == d})


def test_classical_limit_of_product_leading_part():
    rng = random.Random(12)
    for _ in range(10):
        a, b = _homogeneous(rng, 2), _homogeneous(rng, 2)
        prod = classical_limit(from_classical(a) * from_classical(b))
        assert _part_of_degree(prod, 4) == a * b


def test_golden_fixtures():
    s = SystemSpec(4)
    assert build_quantum_integral(s).to_text() + "\n" == data_path("quantum_I4.txt").read_text()
    assert build_quantum_hamiltonian(s).to_text() + "\n" == data_path("quantum_H4.txt").read_text()


@pytest.mark.parametrize("N", [1, 2, 3, 4])
def test_quantum_integral_commutes(N):
    s = SystemSpec(N)
    h = build_quantum_hamiltonian(s)
    assert commutator(h, build_quantum_integral(s)).is_zero()
    assert commutator(h, build_quantum_integral_prime(s)).is_zero()
    assert commutator(h, quantum_angular_momentum()).is_zero()


@pytest.mark.parametrize("N", [1, 2, 3, 4])
def test_quantum_relation(N):
    holds, res = verify_quantum_relation(SystemSpec(N))
    assert holds, res.to_text()


def _leading(a: OperatorPolynomial) -> PhasePolynomial:
    """Top phase-degree part within each parameter monomial (drops hbar corrections)."""
    top: dict = {}
    for m, coeff in classical_limit(a).terms.items():
        for k in coeff.terms:
            top[k] = max(top.get(k, 0), sum(m))
    out = {}
    for m, coeff in classical_limit(a).terms.items():
        kept = {k: c for k, c in coeff.terms.items() if sum(m) == top[k]}
        if kept:
            out[m] = ParamPolynomial(kept)
    return PhasePolynomial(out)


def test_classical_limits_of_integrals():
    s = SystemSpec(4)
    I4 = solve_integral_ansatz(s).integral
    C2 = build_angular_momentum() ** 2
    assert _leading(build_quantum_integral(s)) == I4 - C2.scale(s.g(2))
    assert _leading(build_quantum_integral_prime(s)) == I4.swap()
    assert _leading(build_quantum_hamiltonian(s)) == build_hamiltonian(s)


def test_parse_operator_keeps_order():
    assert parse_operator("P1*Q1") == P1 * Q1
    assert parse_operator("C") == Q1 * P2 - Q2 * P1


def test_n5_unsupported():
    with pytest.raises(UnsupportedOrderError):
        build_quantum_integral(SystemSpec(5))
