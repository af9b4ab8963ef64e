"""Exact two-phase simplex method over the rationals.

Linear programs are stated over free variables::

    maximize    c . x
    subject to  a_i . x <= b_i   (inequalities)
                e_j . x == f_j   (equalities)

and solved on a dense tableau with Bland's anti-cycling rule, so every
answer (status, optimal point, optimal value, unbounded ray) is exact.
"""

__all__ = ["LinearProgramStatus", "LinearProgramResult", "maximize"]

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from subjetlab.rational import Vector, check_dim

Constraint = Tuple[Sequence[Fraction], Fraction]


class LinearProgramStatus(Enum):
    """Outcome of a linear program."""

    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LinearProgramResult:
    """Result of `maximize`."""

    status: LinearProgramStatus
    """Outcome of the program."""

    value: Optional[Fraction] = None
    """Optimal value, when optimal."""

    point: Optional[Vector] = None
    """An optimal point, or a feasible point when unbounded."""

    ray: Optional[Vector] = None
    """A feasible direction of unbounded increase, when unbounded."""

    @property
    def feasible(self) -> bool:
        """Whether the constraint system is feasible."""
        return self.status is not LinearProgramStatus.INFEASIBLE


class _Tableau:
    """Tableau in canonical form ``A z = b, z >= 0`` with a basis."""

    def __init__(self, rows: List[List[Fraction]], basis: List[int]) -> None:
        self.rows = rows
        self.basis = basis

    @property
    def width(self) -> int:
        return len(self.rows[0]) - 1 if self.rows else 0

    def pivot(self, r: int, col: int) -> None:
        pivot_row = self.rows[r]
        p = pivot_row[col]
        pivot_row = [v / p for v in pivot_row]
        self.rows[r] = pivot_row
        for i, row in enumerate(self.rows):
            factor = row[col]
            if i != r and factor != 0:
                self.rows[i] = [a - factor * b for a, b in zip(row, pivot_row)]
        self.basis[r] = col

    def minimize(
        self, cost: Sequence[Fraction], allowed: int
    ) -> Tuple[bool, Optional[int]]:
        """Run simplex iterations on columns ``< allowed``.

        Returns ``(bounded, entering column when unbounded)``.
        """
        while True:
            entering = None
            for j in range(allowed):
                if j in self.basis:
                    continue
                reduced = cost[j] - sum(
                    (
                        cost[b] * self.rows[i][j]
                        for i, b in enumerate(self.basis)
                    ),
                    Fraction(0),
                )
                if reduced < 0:
                    entering = j
                    break
            if entering is None:
                return True, None
            leaving = None
            best: Optional[Tuple[Fraction, int]] = None
            for i, row in enumerate(self.rows):
                if row[entering] > 0:
                    ratio = row[-1] / row[entering]
                    key = (ratio, self.basis[i])
                    if best is None or key < best:
                        best = key
                        leaving = i
            if leaving is None:
                return False, entering
            self.pivot(leaving, entering)

    def solution(self) -> List[Fraction]:
        z = [Fraction(0)] * self.width
        for i, b in enumerate(self.basis):
            z[b] = self.rows[i][-1]
        return z


def maximize(
    objective: Sequence[Fraction],
    inequalities: Sequence[Constraint] = (),
    equalities: Sequence[Constraint] = (),
) -> LinearProgramResult:
    """Maximize a linear objective over a rational polyhedron.

    Parameters
    ----------
    objective : sequence of `fractions.Fraction`
        Objective coefficients; its length fixes the number of variables.
    inequalities : sequence of ``(a, b)``
        Constraints ``a . x <= b``.
    equalities : sequence of ``(a, b)``
        Constraints ``a . x == b``.

    Returns
    -------
    result : `LinearProgramResult`
    """
    n = len(objective)
    for a, _ in list(inequalities) + list(equalities):
        check_dim(a, n, "constraint")

    # x = xp - xn, one slack per inequality
    m_ineq = len(inequalities)
    nstruct = 2 * n + m_ineq
    rows: List[List[Fraction]] = []
    for k, (a, b) in enumerate(inequalities):
        row = [Fraction(q) for q in a] + [-Fraction(q) for q in a]
        row += [Fraction(1 if j == k else 0) for j in range(m_ineq)]
        rows.append(row + [Fraction(b)])
    for a, b in equalities:
        row = [Fraction(q) for q in a] + [-Fraction(q) for q in a]
        row += [Fraction(0)] * m_ineq
        rows.append(row + [Fraction(b)])
    for row in rows:
        if row[-1] < 0:
            row[:] = [-v for v in row]

    m = len(rows)
    # Phase one: one artificial column per row
    full_rows = [
        row[:-1] + [Fraction(1 if j == i else 0) for j in range(m)] + row[-1:]
        for i, row in enumerate(rows)
    ]
    tableau = _Tableau(full_rows, [nstruct + i for i in range(m)])
    phase_one_cost = [Fraction(0)] * nstruct + [Fraction(1)] * m
    tableau.minimize(phase_one_cost, nstruct + m)
    infeasibility = sum(
        (
            tableau.rows[i][-1]
            for i, b in enumerate(tableau.basis)
            if b >= nstruct
        ),
        Fraction(0),
    )
    if infeasibility > 0:
        return LinearProgramResult(LinearProgramStatus.INFEASIBLE)

    # Drive remaining artificials out of the basis, dropping redundant rows
    i = 0
    while i < len(tableau.rows):
        if tableau.basis[i] >= nstruct:
            column = next(
                (j for j in range(nstruct) if tableau.rows[i][j] != 0), None
            )
            if column is None:
                del tableau.rows[i]
                del tableau.basis[i]
                continue
            tableau.pivot(i, column)
        i += 1
    tableau.rows = [row[:nstruct] + row[-1:] for row in tableau.rows]

    cost = [-Fraction(c) for c in objective]
    cost = cost + [-c for c in cost] + [Fraction(0)] * m_ineq
    bounded, entering = tableau.minimize(cost, nstruct)
    z = tableau.solution() if tableau.rows else [Fraction(0)] * nstruct
    point = tuple(z[j] - z[n + j] for j in range(n))
    if not bounded:
        assert entering is not None
        direction = [Fraction(0)] * nstruct
        direction[entering] = Fraction(1)
        for r, b in enumerate(tableau.basis):
            direction[b] = -tableau.rows[r][entering]
        ray = tuple(direction[j] - direction[n + j] for j in range(n))
        return LinearProgramResult(
            LinearProgramStatus.UNBOUNDED, point=point, ray=ray
        )
    value = sum(
        (Fraction(c) * x for c, x in zip(objective, point)), Fraction(0)
    )
    return LinearProgramResult(
        LinearProgramStatus.OPTIMAL, value=value, point=point
    )
