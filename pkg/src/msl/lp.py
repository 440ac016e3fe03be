"""A small exact two-phase simplex over the rationals.

Only used for feasibility certificates of tiny systems (tens of variables),
so the dense tableau and Bland's rule are fine.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence


@dataclass
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    value: Optional[Fraction] = None
    x: Optional[list[Fraction]] = None


def _pivot(tab: list[list[Fraction]], basis: list[int], r: int, c: int) -> None:
    row = tab[r]
    inv = 1 / row[c]
    tab[r] = row = [v * inv for v in row]
    for i, other in enumerate(tab):
        if i != r and other[c] != 0:
            f = other[c]
            tab[i] = [a - f * b for a, b in zip(other, row)]
    basis[r] = c


def _run(tab: list[list[Fraction]], basis: list[int], allowed: int) -> str:
    """Maximise the objective stored in the last row (as reduced costs)."""
    m = len(tab) - 1
    while True:
        obj = tab[-1]
        enter = next((j for j in range(allowed) if obj[j] < 0), None)
        if enter is None:
            return "optimal"
        best = None
        leave = None
        for i in range(m):
            a = tab[i][enter]
            if a > 0:
                ratio = tab[i][-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:
            return "unbounded"
        _pivot(tab, basis, leave, enter)


def maximize(
    c: Sequence,
    a_eq: Sequence[Sequence] = (),
    b_eq: Sequence = (),
    a_ub: Sequence[Sequence] = (),
    b_ub: Sequence = (),
) -> LPResult:
    """Maximise ``c.x`` subject to ``a_eq x = b_eq``, ``a_ub x <= b_ub``, ``x >= 0``."""
    n = len(c)
    n_ub = len(a_ub)
    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    for k, (row, b) in enumerate(zip(a_ub, b_ub)):
        slack = [Fraction(int(j == k)) for j in range(n_ub)]
        rows.append([Fraction(v) for v in row] + slack)
        rhs.append(Fraction(b))
    for row, b in zip(a_eq, b_eq):
        rows.append([Fraction(v) for v in row] + [Fraction(0)] * n_ub)
        rhs.append(Fraction(b))
    m = len(rows)
    width = n + n_ub
    for i in range(m):
        if rhs[i] < 0:
            rows[i] = [-v for v in rows[i]]
            rhs[i] = -rhs[i]
    # phase I: one artificial per row
    tab = []
    for i in range(m):
        art = [Fraction(int(j == i)) for j in range(m)]
        tab.append(rows[i] + art + [rhs[i]])
    basis = [width + i for i in range(m)]
    phase1 = [Fraction(0)] * (width + m + 1)
    for i in range(m):
        phase1 = [a - b for a, b in zip(phase1, tab[i])]
    for i in range(m):
        phase1[width + i] = Fraction(0)
    tab.append(phase1)
    _run(tab, basis, width)
    if tab[-1][-1] != 0:
        return LPResult("infeasible")
    # drive remaining artificials out of the basis
    for i in range(m):
        if basis[i] >= width:
            j = next((j for j in range(width) if tab[i][j] != 0), None)
            if j is not None:
                _pivot(tab, basis, i, j)
    keep = [i for i in range(m) if basis[i] < width]
    tab = [tab[i][:width] + [tab[i][-1]] for i in keep]
    basis = [basis[i] for i in keep]
    obj = [Fraction(-Fraction(v)) for v in c] + [Fraction(0)] * n_ub + [Fraction(0)]
    for i, b in enumerate(basis):
        if obj[b] != 0:
            f = obj[b]
            obj = [a - f * t for a, t in zip(obj, tab[i])]
    tab.append(obj)
    status = _run(tab, basis, width)
    if status == "unbounded":
        return LPResult("unbounded")
    x = [Fraction(0)] * width
    for i, b in enumerate(basis):
        x[b] = tab[i][-1]
    return LPResult("optimal", tab[-1][-1], x[:n])
