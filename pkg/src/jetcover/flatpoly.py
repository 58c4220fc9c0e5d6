"""Monic polynomials with a high-order root at 1 and small coefficients.

The construction needs, for each N, a monic Q with (x-1)^N | Q whose
non-leading coefficients have L1 norm strictly below 2.  That existence
is classical; here it is made effective: for fixed degree n the feasible
set is an affine subspace, so the L1 minimum is an exact linear program
(a = p - q splitting), solved by the rational simplex and certified by
strong duality.  Degree escalation then finds the first n whose optimum
clears the requested margin.

Scaling Q to P(x) = lam^{-n} Q(lam x) and the associated partial-sum
polynomials B_k(x) = sum_{j<=k} b_j x^{k-j} feed the jet covering system;
everything those consumers rely on is re-verified here exactly, twice
where a recurrence and a direct computation can cross-check each other.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from . import linalg
from .errors import (
    ConstructionError,
    DegenerateInputError,
    SearchExhaustedError,
)
from .rational import rat
from .simplex import LPProblem, lp_solve

Coeffs = Tuple[Fraction, ...]  # index = power, last entry = leading

DEFAULT_MARGIN = Fraction(1, 16)
DEFAULT_N_MAX = 64
THRESHOLD_RESOLUTION = Fraction(1, 2 ** 20)


# --- dense polynomial helpers ------------------------------------------------


def poly(coeffs: Sequence) -> Coeffs:
    c = tuple(rat(e) for e in coeffs)
    if not c or c[-1] == 0:
        raise DegenerateInputError("leading coefficient must be nonzero")
    return c


def poly_eval(coeffs: Sequence[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(tuple(coeffs)):
        acc = acc * x + c
    return acc


def poly_derivative(coeffs: Sequence[Fraction]) -> Tuple[Fraction, ...]:
    return tuple(coeffs[i] * i for i in range(1, len(coeffs)))


def poly_nth_derivative(coeffs, i: int):
    c = tuple(coeffs)
    for _ in range(i):
        c = poly_derivative(c)
    return c


def synthetic_division(coeffs: Sequence[Fraction], root: Fraction):
    """Divide by (x - root); returns (quotient coeffs, exact remainder)."""
    out: List[Fraction] = []
    carry = Fraction(0)
    for e in reversed(tuple(coeffs)):
        carry = e + carry * root
        out.append(carry)
    remainder = out.pop()
    return tuple(reversed(out)), remainder


def divisible_by_power(coeffs: Sequence[Fraction], root: Fraction, power: int) -> bool:
    """(x - root)^power | poly, checked by repeated exact synthetic division."""
    c = tuple(coeffs)
    for _ in range(power):
        if len(c) < 2:
            return False
        c, rem = synthetic_division(c, root)
        if rem != 0:
            return False
    return True


# --- the L1 linear program ----------------------------------------------------


@dataclass(frozen=True)
class FlatPolyResult:
    """Monic Q with (x-1)^flatness | Q, plus its LP optimality certificate."""

    flatness: int  # N: order of the root at 1
    coeffs: Coeffs  # monic, coeffs[0] != 0 after normalization
    optimum: Fraction  # certified minimal L1 of non-leading coefficients
    dual: Tuple[Fraction, ...]
    search_degree: int  # degree at which the LP was solved
    history: Tuple[Tuple[int, Fraction], ...] = ()

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def l1_nonleading(self) -> Fraction:
        return sum((abs(c) for c in self.coeffs[:-1]), Fraction(0))


def _falling(j: int, i: int) -> int:
    out = 1
    for t in range(i):
        out *= j - t
    return out


def flat_lp_problem(big_n: int, n: int) -> LPProblem:
    """min sum(p+q) s.t. Q^{(i)}(1) = 0, a_j = p_j - q_j, p, q >= 0."""
    ncols = 2 * n
    rows = []
    rhs = []
    for i in range(big_n):
        row = [Fraction(0)] * ncols
        for j in range(i, n):
            row[j] = Fraction(_falling(j, i))
            row[n + j] = Fraction(-_falling(j, i))
        rows.append(row)
        rhs.append(Fraction(-_falling(n, i)))
    return LPProblem([Fraction(1)] * ncols, rows, rhs)


def _normalize_nonzero_constant(coeffs: Coeffs) -> Coeffs:
    """Divide out x^k so that the constant term is nonzero."""
    k = next(i for i, c in enumerate(coeffs) if c != 0)
    return coeffs[k:]


def minimal_flat_poly(big_n: int, n: int) -> FlatPolyResult:
    """Exact L1-minimal monic degree-n polynomial with an order-N root at 1.

    Always feasible for n >= N ((x-1)^N x^{n-N} is a witness); the result
    is re-verified by synthetic division and by recomputing the L1 norm.
    """
    if not 1 <= big_n <= n:
        raise DegenerateInputError("need n >= N >= 1")
    sol = lp_solve(flat_lp_problem(big_n, n))
    if not sol.is_optimal:
        raise ConstructionError(f"flat LP at (N={big_n}, n={n}) was {sol.status}")
    a = [sol.primal[j] - sol.primal[n + j] for j in range(n)]
    coeffs = tuple(a) + (Fraction(1),)
    l1 = sum((abs(c) for c in a), Fraction(0))
    if l1 != sol.optimum:
        raise ConstructionError("LP optimum disagrees with the recomputed L1")
    if not divisible_by_power(coeffs, Fraction(1), big_n):
        raise ConstructionError("synthetic division found a nonzero remainder")
    normalized = _normalize_nonzero_constant(coeffs)
    return FlatPolyResult(
        flatness=big_n,
        coeffs=normalized,
        optimum=sol.optimum,
        dual=sol.dual,
        search_degree=n,
    )


def find_flat_poly(
    big_n: int,
    margin=DEFAULT_MARGIN,
    n_max: int = DEFAULT_N_MAX,
) -> FlatPolyResult:
    """Escalate the degree until the optimum is <= 2 - margin.

    The optimum is non-increasing in n (multiply by x to embed degree n
    into n+1); that monotonicity is asserted along the way.  Exhausting
    n_max reports the best value found.
    """
    margin = rat(margin)
    if not 0 < margin < 2:
        raise DegenerateInputError("margin must be in (0, 2)")
    target = 2 - margin
    history: List[Tuple[int, Fraction]] = []
    prev: Optional[Fraction] = None
    for n in range(big_n, n_max + 1):
        res = minimal_flat_poly(big_n, n)
        history.append((n, res.optimum))
        if prev is not None and res.optimum > prev:
            raise ConstructionError(
                f"optimum increased from {prev} to {res.optimum} at degree {n}"
            )
        prev = res.optimum
        if res.optimum <= target:
            if res.l1_nonleading > target:
                raise ConstructionError("normalization changed the L1 norm")
            return FlatPolyResult(
                flatness=res.flatness,
                coeffs=res.coeffs,
                optimum=res.optimum,
                dual=res.dual,
                search_degree=n,
                history=tuple(history),
            )
    raise SearchExhaustedError(
        f"no degree <= {n_max} reached {target}; best was {prev}"
    )


# --- scaling to P and the partial-sum table ----------------------------------


@dataclass(frozen=True)
class ScaleReport:
    """Per-condition outcome of scaling Q to P at a given contraction."""

    lam: Fraction
    constant_nonzero: bool
    monic: bool
    l1_nonleading: Fraction
    l1_below_two: bool
    derivatives_vanish: bool
    projection_rank: int
    projection_full_rank: bool

    @property
    def all_ok(self) -> bool:
        return (
            self.constant_nonzero
            and self.monic
            and self.l1_below_two
            and self.derivatives_vanish
            and self.projection_full_rank
        )

    @property
    def lambda_too_small(self) -> bool:
        return not self.l1_below_two


def scale_to_p(qres: FlatPolyResult, lam) -> Tuple[Coeffs, ScaleReport]:
    """P(x) = lam^{-n} Q(lam x); verifies the four conditions exactly.

    A failing L1 bound is a verdict (lambda_too_small on the report), not
    an exception: it means this contraction is not yet close enough to 1
    for this Q.
    """
    lam = rat(lam)
    if not 0 < lam < 1:
        raise DegenerateInputError("contraction must lie strictly in (0, 1)")
    n = qres.degree
    b = tuple(qres.coeffs[j] * lam ** (j - n) for j in range(n + 1))
    l1 = sum((abs(c) for c in b[:-1]), Fraction(0))
    inv = 1 / lam
    derivs_ok = all(
        poly_eval(poly_nth_derivative(b, i), inv) == 0 for i in range(qres.flatness)
    )
    pi = projection_matrix(b, lam, qres.flatness)
    rk = linalg.rank(pi)
    report = ScaleReport(
        lam=lam,
        constant_nonzero=b[0] != 0,
        monic=b[-1] == 1,
        l1_nonleading=l1,
        l1_below_two=l1 < 2,
        derivatives_vanish=derivs_ok,
        projection_rank=rk,
        projection_full_rank=rk == qres.flatness,
    )
    return b, report


def lambda_threshold(qres: FlatPolyResult) -> Fraction:
    """Largest grid contraction (resolution 2^-20) that still fails the L1 bound.

    The scaled L1 norm sum |a_j| lam^{j-n} is strictly decreasing in lam,
    so the bound holds exactly for grid values above the returned
    threshold and fails at and below it.
    """
    if qres.l1_nonleading >= 2:
        raise DegenerateInputError("threshold needs an optimum below 2")
    n = qres.degree
    a = qres.coeffs

    def holds(lam: Fraction) -> bool:
        return sum(
            (abs(a[j]) * lam ** (j - n) for j in range(n)), Fraction(0)
        ) < 2

    denom = 2 ** 20
    lo, hi = 1, denom - 1  # grid indices k, lam = k / denom
    if not holds(Fraction(hi, denom)):
        raise ConstructionError("bound fails even adjacent to 1")
    while lo < hi:  # find smallest index where the bound holds
        mid = (lo + hi) // 2
        if holds(Fraction(mid, denom)):
            hi = mid
        else:
            lo = mid + 1
    return Fraction(lo - 1, denom)


def b_polynomial_table(
    p_coeffs: Sequence[Fraction], lam: Fraction, big_n: int
) -> Tuple[Tuple[Fraction, ...], ...]:
    """table[i][k] = i-th derivative of B_k at lam, 0 <= i < N, 0 <= k <= n.

    Computed two ways, by the shift recurrences
        B_k = x B_{k-1} + b_k,    B_k^{(i)} = x B_{k-1}^{(i)} + i B_{k-1}^{(i-1)}
    and by direct differentiation of the coefficient lists; any mismatch
    is a bug trap.  Also asserts the two structural zeroes the downstream
    construction relies on: B_k^{(i)}(lam) = 0 for k < i, and
    B_n^{(i)}(lam) = 0 for i < N (equivalent to the vanishing derivatives
    of P at 1/lam).
    """
    b = tuple(p_coeffs)
    n = len(b) - 1
    table = [[Fraction(0)] * (n + 1) for _ in range(big_n)]
    table[0][0] = b[0]
    for k in range(1, n + 1):
        table[0][k] = lam * table[0][k - 1] + b[k]
        for i in range(1, big_n):
            table[i][k] = lam * table[i][k - 1] + i * table[i - 1][k - 1]

    for k in range(n + 1):
        bk = tuple(b[k - d] for d in range(k + 1))  # B_k coeffs, index = power
        for i in range(big_n):
            direct = poly_eval(poly_nth_derivative(bk, i), lam)
            if direct != table[i][k]:
                raise ConstructionError(
                    f"recurrence and direct values differ at (i={i}, k={k})"
                )
            if k < i and table[i][k] != 0:
                raise ConstructionError(f"expected zero at (i={i}, k={k})")
    for i in range(big_n):
        if table[i][n] != 0:
            raise ConstructionError(
                f"B_n derivative {i} is {table[i][n]}, expected 0"
            )
    return tuple(tuple(row) for row in table)


def projection_matrix(
    p_coeffs: Sequence[Fraction], lam: Fraction, big_n: int
) -> linalg.Mat:
    """N x n matrix with entry (i, k) = B_k^{(N-i)}(lam), rows i = 1..N."""
    n = len(p_coeffs) - 1
    table = b_polynomial_table(p_coeffs, lam, big_n)
    return tuple(
        tuple(table[big_n - i][k] for k in range(n)) for i in range(1, big_n + 1)
    )
