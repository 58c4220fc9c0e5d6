import random
from fractions import Fraction as F

import pytest

from jetcover.errors import (
    ConstructionError,
    DegenerateInputError,
    SearchExhaustedError,
)
from jetcover.flatpoly import (
    flat_lp_problem,
    b_polynomial_table,
    divisible_by_power,
    find_flat_poly,
    lambda_threshold,
    minimal_flat_poly,
    poly_eval,
    poly_nth_derivative,
    projection_matrix,
    scale_to_p,
    synthetic_division,
)
from jetcover.simplex import LPSolution, lp_solve, strong_duality_holds


def test_synthetic_division_exact():
    # (x-1)^2 (x+2) = x^3 - 3x + 2
    coeffs = (F(2), F(-3), F(0), F(1))
    q, rem = synthetic_division(coeffs, F(1))
    assert rem == 0
    q2, rem2 = synthetic_division(q, F(1))
    assert rem2 == 0 and q2 == (F(2), F(1))
    assert divisible_by_power(coeffs, F(1), 2)
    assert not divisible_by_power(coeffs, F(1), 3)


def test_minimal_flat_forced_linear():
    res = minimal_flat_poly(1, 1)
    assert res.coeffs == (F(-1), F(1))
    assert res.optimum == 1


def test_minimal_flat_n2_degree3_oracle():
    # reduce the two equality constraints to one free coefficient and
    # grid-scan the resulting piecewise-linear objective exactly
    def l1_of(a2):
        a1 = -3 - 2 * a2
        a0 = 2 + a2
        return abs(a0) + abs(a1) + abs(a2)

    breakpoints = [F(-2), F(-3, 2), F(0)]
    grid = breakpoints + [F(k, 8) for k in range(-40, 17)]
    oracle_min = min(l1_of(a) for a in grid)
    res = minimal_flat_poly(2, 3)
    assert res.optimum == 2 == oracle_min == l1_of(F(-3, 2))


def test_minimal_flat_rejected_inputs():
    with pytest.raises(DegenerateInputError):
        minimal_flat_poly(3, 2)
    with pytest.raises(DegenerateInputError):
        minimal_flat_poly(0, 1)


def test_escalation_n2():
    res = find_flat_poly(2)
    assert res.optimum == F(5, 3)
    assert res.search_degree == 4
    assert res.coeffs[0] != 0
    assert divisible_by_power(res.coeffs, F(1), 2)
    # history is monotone non-increasing and starts at (x-1)^2
    values = [v for _, v in res.history]
    assert values[0] == 3
    assert all(values[i + 1] <= values[i] for i in range(len(values) - 1))


def test_escalation_n3_meets_margin():
    res = find_flat_poly(3)
    assert res.optimum <= 2 - F(1, 16)
    assert divisible_by_power(res.coeffs, F(1), 3)


def test_escalation_duality_certificate():
    res = find_flat_poly(2)
    problem = flat_lp_problem(res.flatness, res.search_degree)
    sol = lp_solve(problem)
    assert sol.optimum == res.optimum
    assert strong_duality_holds(
        problem, LPSolution("optimal", sol.optimum, sol.primal, res.dual)
    )


def test_escalation_exhaustion():
    with pytest.raises(SearchExhaustedError):
        find_flat_poly(2, margin=F(1, 16), n_max=3)


def test_scale_to_p_example():
    q1 = minimal_flat_poly(1, 1)
    p, report = scale_to_p(q1, F(3, 4))
    assert p == (F(-4, 3), F(1))
    assert report.l1_nonleading == F(4, 3)
    assert report.all_ok and not report.lambda_too_small


def test_scale_to_p_lambda_too_small():
    q1 = minimal_flat_poly(1, 1)
    _, report = scale_to_p(q1, F(1, 3))
    assert report.lambda_too_small
    assert report.l1_nonleading == 3
    assert not report.all_ok


def test_scale_to_p_rejects_boundary_lambda():
    q1 = minimal_flat_poly(1, 1)
    with pytest.raises(DegenerateInputError):
        scale_to_p(q1, 1)
    with pytest.raises(DegenerateInputError):
        scale_to_p(q1, 0)


def test_lambda_threshold_linear():
    q1 = minimal_flat_poly(1, 1)
    th = lambda_threshold(q1)
    assert th == F(1, 2)
    eps = F(1, 2 ** 20)
    # bound fails at the threshold, holds one grid step above
    assert not (abs(q1.coeffs[0]) / th < 2)
    assert abs(q1.coeffs[0]) / (th + eps) < 2


def test_lambda_threshold_bracket_scaling(flat_q2):
    th = lambda_threshold(flat_q2)
    eps = F(1, 2 ** 20)
    _, rep_below = scale_to_p(flat_q2, th)
    _, rep_above = scale_to_p(flat_q2, th + eps)
    assert rep_below.lambda_too_small
    assert not rep_above.lambda_too_small


def test_threshold_monotone_in_flatness(flat_q2, flat_q3):
    assert lambda_threshold(flat_q3) >= lambda_threshold(flat_q2)


def test_b_table_base_case():
    table = b_polynomial_table((F(-4, 3), F(1)), F(3, 4), 1)
    assert table[0][0] == F(-4, 3)  # B_0 = b_0
    assert table[0][1] == 0  # B_1(lam) = lam b_0 + b_1


def test_b_table_structural_zero_enforced():
    # a polynomial without the vanishing derivative must trip the trap
    with pytest.raises(ConstructionError):
        b_polynomial_table((F(1), F(1)), F(3, 4), 1)


def test_b_table_derivative_recurrence_random():
    # B_k^{(i)}(x) = x B_{k-1}^{(i)}(x) + i B_{k-1}^{(i-1)}(x) at random x,
    # checked against direct polynomial differentiation
    rng = random.Random(31)
    for _ in range(10):
        n = rng.randint(2, 6)
        b = [F(rng.randint(-6, 6), rng.randint(1, 4)) for _ in range(n)] + [F(1)]
        x = F(rng.randint(-9, 9), rng.randint(1, 5))

        def bk_coeffs(k):
            return tuple(b[k - d] for d in range(k + 1))

        for k in range(1, n + 1):
            for i in range(1, 4):
                lhs = poly_eval(poly_nth_derivative(bk_coeffs(k), i), x)
                rhs = x * poly_eval(
                    poly_nth_derivative(bk_coeffs(k - 1), i), x
                ) + i * poly_eval(poly_nth_derivative(bk_coeffs(k - 1), i - 1), x)
                assert lhs == rhs


def test_projection_from_table(flat_q2):
    lam = lambda_threshold(flat_q2) + F(1, 2 ** 10)
    p, report = scale_to_p(flat_q2, lam)
    assert report.all_ok
    pi = projection_matrix(p, lam, 2)
    table = b_polynomial_table(p, lam, 2)
    n = len(p) - 1
    for i in range(1, 3):
        for k in range(n):
            assert pi[i - 1][k] == table[2 - i][k]
