import random
from fractions import Fraction

import pytest

from zernike.gaussian import GaussianRational
from zernike.linsolve import NoSolutionError, rank, solve


def G(re, im=0):
    return GaussianRational(re, im)


def test_unique_solution():
    rows = [{0: G(2), 1: G(1)}, {0: G(1), 1: G(0, 1)}]
    sol = solve(rows, [G(3), G(1, 1)], 2)
    assert not sol.free_columns
    for row, b in zip(rows, [G(3), G(1, 1)]):
        assert sum((c * sol.values[j] for j, c in row.items()), G(0)) == b


def test_inconsistent_system():
    with pytest.raises(NoSolutionError):
        solve([{0: G(1)}, {0: G(2)}], [G(1), G(3)], 1)


def test_underdetermined_has_null_basis():
    sol = solve([{0: G(1), 1: G(1)}], [G(2)], 2)
    assert sol.free_columns == [1]
    assert len(sol.null_basis) == 1


def test_rank_dense():
    assert rank([[1, 2], [2, 4]], 2) == 1
    assert rank([[1, 0], [0, G(0, 1)]], 2) == 2


def test_random_systems_roundtrip():
    rng = random.Random(11)
    for _ in range(30):
        n = rng.randint(1, 6)
        x = [G(Fraction(rng.randint(-9, 9), rng.randint(1, 5)), rng.randint(-3, 3)) for _ in range(n)]
        rows = []
        for _ in range(n + rng.randint(0, 3)):
            rows.append({j: G(rng.randint(-4, 4), rng.randint(-2, 2)) for j in range(n)
                         if rng.random() < 0.7})
        rhs = [sum((c * x[j] for j, c in r.items()), G(0)) for r in rows]
        sol = solve(rows, rhs, n)
        for r, b in zip(rows, rhs):
            assert sum((c * sol.values[j] for j, c in r.items()), G(0)) == b
        if rank(rows, n) == n:
            assert list(sol.values) == x
