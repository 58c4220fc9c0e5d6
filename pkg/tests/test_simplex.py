import random
from fractions import Fraction as F

import pytest

from jetcover.errors import DegenerateInputError
from jetcover.simplex import LPProblem, lp_solve, strong_duality_holds


def test_trivial_equality():
    sol = lp_solve(LPProblem([1], [[1]], [1]))
    assert sol.is_optimal and sol.optimum == 1 and sol.primal == (F(1),)


def test_l1_split_encoding():
    # the |a0| encoding for a single constrained coefficient
    sol = lp_solve(LPProblem([1, 1], [[1, -1]], [-1]))
    assert sol.optimum == 1
    assert sol.primal == (F(0), F(1))


def test_beale_cycling_instance_terminates():
    # classic degenerate instance that cycles under naive pivoting
    c = [F(-3, 4), 150, F(-1, 50), 6, 0, 0, 0]
    a = [
        [F(1, 4), -60, F(-1, 25), 9, 1, 0, 0],
        [F(1, 2), -90, F(-1, 50), 3, 0, 1, 0],
        [0, 0, 1, 0, 0, 0, 1],
    ]
    problem = LPProblem(c, a, [0, 0, 1])
    sol = lp_solve(problem)
    assert sol.is_optimal and sol.optimum == F(-1, 20)
    assert strong_duality_holds(problem, sol)


def test_infeasible_verdict():
    assert lp_solve(LPProblem([0], [[1]], [-1])).status == "infeasible"


def test_unbounded_verdict():
    assert lp_solve(LPProblem([-1, 0], [[1, -1]], [0])).status == "unbounded"


def test_free_variables():
    sol = lp_solve(
        LPProblem([-1, 0], [[1, 1]], [2], nonneg=[False, True])
    )
    assert sol.optimum == -2 and sol.primal[0] == 2


def test_free_variable_negative_value():
    sol = lp_solve(LPProblem([1, 0], [[1, -1]], [-3], nonneg=[False, True]))
    assert sol.is_optimal and sol.primal[0] == -3


def test_redundant_rows():
    problem = LPProblem([1, 1], [[1, 1], [1, 1]], [2, 2])
    sol = lp_solve(problem)
    assert sol.is_optimal and sol.optimum == 2
    assert strong_duality_holds(problem, sol)


def test_shape_validation():
    with pytest.raises(DegenerateInputError):
        LPProblem([1, 2], [[1]], [1])
    with pytest.raises(DegenerateInputError):
        LPProblem([1], [[1]], [1, 2])


def test_random_feasible_programs_certified():
    # random bounded-feasible LPs; every optimum must carry an exact
    # strong-duality certificate
    rng = random.Random(23)
    for _ in range(25):
        m, n = rng.randint(1, 3), rng.randint(2, 5)
        x_star = [F(rng.randint(0, 6), rng.randint(1, 4)) for _ in range(n)]
        a = [[F(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(n)] for _ in range(m)]
        # box the feasible region so the problem cannot be unbounded
        a.append([F(1)] * n)
        b = [sum(row[j] * x_star[j] for j in range(n)) for row in a]
        c = [F(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(n)]
        problem = LPProblem(c, a, b)
        sol = lp_solve(problem)
        assert sol.is_optimal
        assert strong_duality_holds(problem, sol)
        cx = sum(c[j] * x_star[j] for j in range(n))
        assert sol.optimum <= cx  # the seed point is feasible
