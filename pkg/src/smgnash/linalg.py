"""Exact linear algebra over the rationals."""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Sequence


class SingularMatrixError(ArithmeticError):
    pass


def solve_exact(A: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> list[Fraction]:
    """Solve ``A x = b`` exactly with fraction-free (Bareiss) elimination.

    Rows are first scaled to integers, so all intermediate entries are
    integers and every division in the elimination is exact.
    """
    n = len(A)
    if any(len(row) != n for row in A) or len(b) != n:
        raise ValueError("expected a square system")
    M = []
    for row, rhs in zip(A, b):
        entries = [Fraction(a) for a in row] + [Fraction(rhs)]
        scale = lcm(*(e.denominator for e in entries))
        M.append([int(e * scale) for e in entries])
    prev = 1
    for k in range(n):
        piv = next((r for r in range(k, n) if M[r][k] != 0), None)
        if piv is None:
            raise SingularMatrixError(f"no pivot in column {k}")
        if piv != k:
            M[k], M[piv] = M[piv], M[k]
        mk = M[k]
        pk = mk[k]
        for i in range(k + 1, n):
            mi = M[i]
            f = mi[k]
            if f == 0:
                if pk != prev:
                    for j in range(k + 1, n + 1):
                        mi[j] = mi[j] * pk // prev
                continue
            for j in range(k + 1, n + 1):
                mi[j] = (pk * mi[j] - f * mk[j]) // prev
            mi[k] = 0
        prev = pk
    x = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        acc = M[i][n] - sum(M[i][j] * x[j] for j in range(i + 1, n))
        x[i] = Fraction(acc) / M[i][i]
    return x
