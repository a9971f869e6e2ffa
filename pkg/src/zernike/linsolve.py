"""Exact linear algebra over Q(i) by fraction-free (Bareiss) elimination.

Rows are sparse ``{column: GaussianRational}`` dicts. Each row is first
scaled to Gaussian-integer entries; the forward sweep then keeps every
entry a Gaussian integer (a minor of the scaled matrix), so the only
divisions are exact ones by the previous pivot.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Sequence

from .gaussian import ZERO, GaussianRational, as_gaussian

__all__ = ["LinearSolution", "NoSolutionError", "echelon", "rank", "solve"]


class NoSolutionError(ValueError):
    """The linear system is inconsistent."""


def _denominator(c: GaussianRational) -> int:
    return lcm(Fraction(c.re).denominator, Fraction(c.im).denominator)


def _integral_row(row: dict) -> dict:
    m = 1
    for c in row.values():
        m = lcm(m, _denominator(c))
    if m == 1:
        return dict(row)
    return {j: c * m for j, c in row.items()}


def echelon(rows: Sequence[dict], ncols: int):
    """Fraction-free row echelon form.

    Returns ``(reduced_rows, pivot_columns)`` where ``reduced_rows[r]`` has
    its leading entry in ``pivot_columns[r]``. Zero rows are dropped.
    """
    work = [_integral_row({j: as_gaussian(c) for j, c in r.items() if c}) for r in rows]
    work = [r for r in work if r]
    pivots: list[int] = []
    done: list[dict] = []
    prev = GaussianRational(1)
    for col in range(ncols):
        if not work:
            break
        # pick the pivot row with the sparsest support among candidates
        best = None
        for idx, r in enumerate(work):
            if col in r and (best is None or len(r) < len(work[best])):
                best = idx
        if best is None:
            continue
        prow = work.pop(best)
        piv = prow[col]
        nxt = []
        for r in work:
            a = r.get(col)
            new = {}
            if a is None:
                for j, v in r.items():
                    new[j] = v * piv / prev
            else:
                for j, v in r.items():
                    if j != col:
                        new[j] = v * piv
                for j, v in prow.items():
                    if j != col:
                        w = new.get(j, ZERO) - a * v
                        if w:
                            new[j] = w
                        else:
                            new.pop(j, None)
                new = {j: v / prev for j, v in new.items() if v}
            if new:
                nxt.append(new)
        work = nxt
        done.append(prow)
        pivots.append(col)
        prev = piv
    return done, pivots


def rank(rows: Sequence[dict] | Sequence[Sequence], ncols: int | None = None) -> int:
    """Exact rank of a matrix given as sparse dict rows or dense lists."""
    sparse = []
    for r in rows:
        if isinstance(r, dict):
            sparse.append(r)
        else:
            sparse.append({j: c for j, c in enumerate(r) if c})
    if ncols is None:
        ncols = 1 + max((j for r in sparse for j in r), default=-1)
    _, piv = echelon(sparse, ncols)
    return len(piv)


@dataclass
class LinearSolution:
    """Particular solution with free variables set to zero, plus a null basis."""

    values: list[GaussianRational]
    pivot_columns: list[int]
    free_columns: list[int]
    null_basis: list[list[GaussianRational]] = field(default_factory=list)


def solve(rows: Sequence[dict], rhs: Sequence, nunknowns: int) -> LinearSolution:
    """Solve ``A x = b`` exactly; raises :class:`NoSolutionError` if inconsistent."""
    aug = []
    for r, b in zip(rows, rhs):
        row = {j: as_gaussian(c) for j, c in r.items() if c}
        b = as_gaussian(b)
        if b:
            row[nunknowns] = b
        aug.append(row)
    ech, piv = echelon(aug, nunknowns + 1)
    if piv and piv[-1] == nunknowns:
        raise NoSolutionError("inconsistent linear system")
    free = [j for j in range(nunknowns) if j not in set(piv)]

    def back_substitute(free_values: dict[int, GaussianRational], homogeneous: bool):
        x = [ZERO] * nunknowns
        for j, v in free_values.items():
            x[j] = v
        for row, col in reversed(list(zip(ech, piv))):
            acc = ZERO if homogeneous else row.get(nunknowns, ZERO)
            for j, v in row.items():
                if j != col and j != nunknowns:
                    acc = acc - v * x[j]
            x[col] = acc / row[col]
        return x

    values = back_substitute({}, homogeneous=False)
    null = [back_substitute({f: GaussianRational(1)}, homogeneous=True) for f in free]
    return LinearSolution(values=values, pivot_columns=piv, free_columns=free, null_basis=null)
