import numpy as np
import pytest
from scipy.optimize import linprog

from svmgeom.errors import SolverError
from svmgeom.simplex import min_l1_residual, simplex


def test_small_lp_by_hand():
    # min -x1 - x2 s.t. x1 + 2 x2 + s1 = 4, 3 x1 + x2 + s2 = 6
    c = [-1, -1, 0, 0]
    A = [[1, 2, 1, 0], [3, 1, 0, 1]]
    res = simplex(c, A, [4, 6])
    assert res.status == "optimal"
    np.testing.assert_allclose(res.x[:2], [1.6, 1.2], atol=1e-12)
    assert res.objective == pytest.approx(-2.8)


def test_infeasible_and_unbounded():
    res = simplex([0, 0], [[1, 1]], [-1])
    assert res.status == "infeasible" and not res.feasible
    res = simplex([-1, 0], [[1, -1]], [1])
    assert res.status == "unbounded"


def test_redundant_rows_are_tolerated():
    A = [[1, 1, 0], [2, 2, 0], [0, 1, 1]]
    res = simplex([1, 2, 3], A, [1, 2, 1])
    assert res.status == "optimal"
    np.testing.assert_allclose(np.asarray(A) @ res.x, [1, 2, 1], atol=1e-12)


@pytest.mark.parametrize("seed", range(40))
def test_matches_scipy_on_random_feasible_lps(seed):
    rng = np.random.default_rng(seed)
    m, n = rng.integers(1, 5), rng.integers(5, 10)
    A = rng.standard_normal((m, n))
    b = A @ rng.uniform(0, 1, n)  # feasible by construction
    c = rng.uniform(0, 2, n)  # bounded below since x >= 0 and c >= 0
    ours = simplex(c, A, b)
    ref = linprog(c, A_eq=A, b_eq=b, bounds=(0, None), method="highs")
    assert ours.status == "optimal" and ref.status == 0
    assert ours.objective == pytest.approx(ref.fun, abs=1e-8)
    np.testing.assert_allclose(A @ ours.x, b, atol=1e-9)
    assert np.all(ours.x >= 0)


@pytest.mark.parametrize("seed", range(20))
def test_feasibility_verdict_matches_scipy(seed):
    rng = np.random.default_rng(100 + seed)
    A = rng.standard_normal((3, 4))
    b = rng.standard_normal(3)
    ours = simplex(np.zeros(4), A, b)
    ref = linprog(np.zeros(4), A_eq=A, b_eq=b, bounds=(0, None), method="highs")
    assert ours.feasible == (ref.status == 0)


def test_pivot_budget():
    rng = np.random.default_rng(0)
    A = rng.standard_normal((6, 12))
    b = A @ rng.uniform(0, 1, 12)
    with pytest.raises(SolverError):
        simplex(rng.uniform(0, 1, 12), A, b, max_pivots=1)


def test_min_l1_residual():
    x, r = min_l1_residual([[1, 1]], [2])
    assert r == pytest.approx(0) and x.sum() == pytest.approx(2)
    # x >= 0 cannot reach -1; best is x = 0 with residual 1
    x, r = min_l1_residual([[1, 1]], [-1])
    assert r == pytest.approx(1)
