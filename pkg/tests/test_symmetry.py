import pytest

from zernike.classical import SystemSpec, build_angular_momentum, build_hamiltonian
from zernike.poly import parse_param, poisson_bracket
from zernike.symmetry import build_generators, higgs_order, structure_functions, verify_higgs_closure


def test_structure_functions_n4():
    table = structure_functions(SystemSpec(4))
    expect = [
        "(1/2)*g1^2 + g2*H",
        "(1/2)*g2^2 - g1*g3 - g4*H",
        "(1/2)*g3^2 - g2*g4",
        "(1/2)*g4^2",
    ]
    for n, text in enumerate(expect, 1):
        assert table[n] == parse_param(text)


def test_structure_functions_are_linear_in_h():
    for N in range(1, 6):
        for entry in structure_functions(SystemSpec(N)).entries:
            assert entry.degree_in("H") in (0, 1) or entry.is_zero()


def test_generator_closure():
    gens = build_generators(SystemSpec(3))
    assert poisson_bracket(gens.L1, gens.L2) == gens.L3
    assert poisson_bracket(gens.L1, gens.L3) == -gens.L2
    assert gens.L1 == build_angular_momentum() / 2


def test_generators_commute_with_h():
    spec = SystemSpec(4)
    h = build_hamiltonian(spec)
    gens = build_generators(spec)
    for g in (gens.L1, gens.L2, gens.L3):
        assert poisson_bracket(h, g).is_zero()


@pytest.mark.parametrize("N", [1, 2, 3, 4, 5])
def test_higgs_closure(N):
    res = verify_higgs_closure(SystemSpec(N))
    assert res.holds
    assert res.higgs_order == 2 * N - 1


def test_higgs_order_drops_when_top_coefficient_vanishes():
    spec = SystemSpec(3, (1, 2, 0))
    res = verify_higgs_closure(spec)
    assert res.holds
    assert higgs_order(res.table) == 3


def test_numeric_higgs_closure():
    assert verify_higgs_closure(SystemSpec(4, ("1/3", "-2", "5", "7/2"))).holds
