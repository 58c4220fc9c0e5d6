"""Exact two-phase simplex with Bland's rule.

Minimizes c.x subject to A x = b with per-variable nonnegativity flags
(free variables are split internally).  Everything is Fraction
arithmetic; the returned primal and dual satisfy strong duality exactly
and are re-verified before the result leaves this module.  Bland's
pivoting rule (lowest eligible index in, lowest basic index out among
tied ratios) guarantees termination even on degenerate cycling instances.

Problems in this package are tiny (at most ~130 variables), so a dense
tableau is the right tool.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

from .errors import ConstructionError, DegenerateInputError, ResourceLimitError
from .linalg import Mat, Vec, mat, vec


@dataclass(frozen=True)
class LPProblem:
    """min objective . x  s.t.  a @ x == b,  x[j] >= 0 where nonneg[j]."""

    objective: Vec
    a: Mat
    b: Vec
    nonneg: Tuple[bool, ...]

    def __init__(self, objective, a, b, nonneg=None):
        objective = vec(objective)
        a = mat(a)
        b = vec(b)
        if len(a) != len(b):
            raise DegenerateInputError("constraint matrix and rhs sizes differ")
        if a and len(a[0]) != len(objective):
            raise DegenerateInputError("objective length must match columns")
        flags = tuple(
            [True] * len(objective) if nonneg is None else [bool(f) for f in nonneg]
        )
        if len(flags) != len(objective):
            raise DegenerateInputError("one nonneg flag per variable")
        object.__setattr__(self, "objective", objective)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "nonneg", flags)


@dataclass(frozen=True)
class LPSolution:
    status: str  # "optimal" | "infeasible" | "unbounded"
    optimum: Optional[Fraction] = None
    primal: Optional[Vec] = None
    dual: Optional[Vec] = None

    @property
    def is_optimal(self) -> bool:
        return self.status == "optimal"


_MAX_PIVOTS = 100_000


class _Tableau:
    """Dense tableau; columns = structural vars then artificials then rhs."""

    def __init__(self, a_rows: List[List[Fraction]], b: List[Fraction]):
        self.m = len(a_rows)
        self.n = len(a_rows[0]) if a_rows else 0
        self.rows = [list(r) + [Fraction(0)] * self.m + [b[i]]
                     for i, r in enumerate(a_rows)]
        for i in range(self.m):
            self.rows[i][self.n + i] = Fraction(1)
        self.basis = [self.n + i for i in range(self.m)]
        self.cols = self.n + self.m

    def pivot(self, row: int, col: int) -> None:
        piv = self.rows[row][col]
        inv = 1 / piv
        self.rows[row] = [e * inv for e in self.rows[row]]
        for r in range(self.m):
            if r != row and self.rows[r][col] != 0:
                f = self.rows[r][col]
                prow = self.rows[row]
                self.rows[r] = [
                    self.rows[r][j] - f * prow[j] for j in range(self.cols + 1)
                ]
        self.basis[row] = col

    def reduced_costs(self, cost: List[Fraction]) -> List[Fraction]:
        """cost[j] - c_B . column_j for every column (artificials included)."""
        rc = list(cost)
        for i, bv in enumerate(self.basis):
            cb = cost[bv]
            if cb != 0:
                row = self.rows[i]
                for j in range(self.cols):
                    if row[j] != 0:
                        rc[j] -= cb * row[j]
        return rc

    def run_bland(self, cost: List[Fraction], allowed) -> str:
        """Minimize cost over the current basis; returns 'optimal'|'unbounded'."""
        for _ in range(_MAX_PIVOTS):
            rc = self.reduced_costs(cost)
            entering = next(
                (j for j in range(self.cols) if allowed(j) and rc[j] < 0), None
            )
            if entering is None:
                return "optimal"
            leaving = None
            best_ratio = None
            for i in range(self.m):
                aij = self.rows[i][entering]
                if aij > 0:
                    ratio = self.rows[i][self.cols] / aij
                    if (
                        best_ratio is None
                        or ratio < best_ratio
                        or (ratio == best_ratio and self.basis[i] < self.basis[leaving])
                    ):
                        best_ratio = ratio
                        leaving = i
            if leaving is None:
                return "unbounded"
            self.pivot(leaving, entering)
        raise ResourceLimitError("pivot cap exceeded")  # unreachable with Bland


def lp_solve(problem: LPProblem) -> LPSolution:
    """Exact two-phase simplex; see module docstring for guarantees."""
    n_orig = len(problem.objective)

    # Split free variables x = x+ - x-.
    col_of: List[Tuple[int, Optional[int]]] = []
    ncols = 0
    for j in range(n_orig):
        if problem.nonneg[j]:
            col_of.append((ncols, None))
            ncols += 1
        else:
            col_of.append((ncols, ncols + 1))
            ncols += 2

    m = len(problem.b)
    a_rows: List[List[Fraction]] = []
    b_vals: List[Fraction] = []
    row_sign: List[int] = []
    for i in range(m):
        row = [Fraction(0)] * ncols
        for j in range(n_orig):
            pos, neg = col_of[j]
            row[pos] = problem.a[i][j]
            if neg is not None:
                row[neg] = -problem.a[i][j]
        sign = -1 if problem.b[i] < 0 else 1
        a_rows.append([sign * e for e in row])
        b_vals.append(sign * problem.b[i])
        row_sign.append(sign)

    cost_struct = [Fraction(0)] * ncols
    for j in range(n_orig):
        pos, neg = col_of[j]
        cost_struct[pos] = problem.objective[j]
        if neg is not None:
            cost_struct[neg] = -problem.objective[j]

    t = _Tableau(a_rows, b_vals)

    # Phase 1: minimize the sum of artificials.
    phase1_cost = [Fraction(0)] * t.n + [Fraction(1)] * t.m
    t.run_bland(phase1_cost, allowed=lambda j: True)
    infeas = sum(
        (t.rows[i][t.cols] for i in range(t.m) if t.basis[i] >= t.n), Fraction(0)
    )
    if infeas != 0:
        return LPSolution(status="infeasible")

    # Pivot residual artificials out of the basis; rows with no structural
    # pivot are redundant constraints (their rhs is already zero).
    redundant: List[int] = []
    for i in range(t.m):
        if t.basis[i] >= t.n:
            col = next((j for j in range(t.n) if t.rows[i][j] != 0), None)
            if col is None:
                redundant.append(i)
            else:
                t.pivot(i, col)

    # Phase 2 on the structural objective; artificials may not re-enter.
    phase2_cost = list(cost_struct) + [Fraction(0)] * t.m
    live_rows = [i for i in range(t.m) if i not in redundant]

    def allowed(j: int) -> bool:
        return j < t.n

    if redundant:
        # Excise redundant rows so the ratio test never sees them.
        t.rows = [t.rows[i] for i in live_rows]
        kept_basis = [t.basis[i] for i in live_rows]
        t.m = len(t.rows)
        t.basis = kept_basis

    status = t.run_bland(phase2_cost, allowed)
    if status == "unbounded":
        return LPSolution(status="unbounded")

    # Primal in original variables.
    x_internal = [Fraction(0)] * t.n
    for i, bv in enumerate(t.basis):
        if bv < t.n:
            x_internal[bv] = t.rows[i][t.cols]
    primal = []
    for j in range(n_orig):
        pos, neg = col_of[j]
        primal.append(
            x_internal[pos] - (x_internal[neg] if neg is not None else Fraction(0))
        )
    primal = tuple(primal)

    # Dual from the artificial block: the artificial columns started as the
    # identity, so they accumulate the row-operation weights E with
    # tableau = E @ original_rows, and y = c_B . E.  Weights on excised
    # redundant rows are still part of a valid multiplier vector.
    y = [Fraction(0)] * m
    for orig_row in range(m):
        col = t.n + orig_row
        val = Fraction(0)
        for i, bv in enumerate(t.basis):
            cb = phase2_cost[bv]
            if cb != 0:
                val += cb * t.rows[i][col]
        y[orig_row] = row_sign[orig_row] * val
    dual = tuple(y)

    optimum = sum(
        (problem.objective[j] * primal[j] for j in range(n_orig)), Fraction(0)
    )
    _verify_optimal(problem, primal, dual, optimum)
    return LPSolution(status="optimal", optimum=optimum, primal=primal, dual=dual)


def _verify_optimal(
    problem: LPProblem, primal: Vec, dual: Vec, optimum: Fraction
) -> None:
    """Exact optimality certificate; failure here is a solver bug."""
    m, n = len(problem.b), len(problem.objective)
    for i in range(m):
        lhs = sum(
            (problem.a[i][j] * primal[j] for j in range(n)), Fraction(0)
        )
        if lhs != problem.b[i]:
            raise ConstructionError(f"primal infeasible in row {i}")
    dual_obj = sum((dual[i] * problem.b[i] for i in range(m)), Fraction(0))
    if dual_obj != optimum:
        raise ConstructionError("strong duality violated")
    for j in range(n):
        slack = problem.objective[j] - sum(
            (dual[i] * problem.a[i][j] for i in range(m)), Fraction(0)
        )
        if problem.nonneg[j]:
            if slack < 0:
                raise ConstructionError(f"dual infeasible at column {j}")
            if primal[j] < 0:
                raise ConstructionError(f"primal sign violated at column {j}")
        elif slack != 0:
            raise ConstructionError(f"dual equality violated at free column {j}")


def strong_duality_holds(problem: LPProblem, sol: LPSolution) -> bool:
    """Public re-check used by tests and serialized dual certificates."""
    if not sol.is_optimal:
        return False
    try:
        _verify_optimal(problem, sol.primal, sol.dual, sol.optimum)
    except ConstructionError:
        return False
    return True
