import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gaugedual.linalg import (
    ConvergenceError,
    LinearMap,
    LpProblem,
    NotPSDError,
    gen_eigmax,
    jacobi_eigen,
    solve_lp,
    symmetric,
)


def random_sym(rng, n):
    B = rng.standard_normal((n, n))
    return 0.5 * (B + B.T)


# ---------------------------------------------------------------------------
# symmetric storage and linear maps


def test_symmetric_is_exact():
    S = symmetric([[1.0, 2.0 + 1e-17], [2.0, 3.0]], tol=1e-12)
    assert S[0, 1] == S[1, 0]


def test_symmetric_rejects_asymmetry():
    with pytest.raises(ValueError):
        symmetric([[1.0, 2.0], [0.0, 1.0]])


def test_linear_map_adjoint_involution():
    M = LinearMap(np.arange(6.0).reshape(2, 3))
    assert np.array_equal(M.adjoint().adjoint().matrix, M.matrix)
    assert M.shape == (2, 3)
    assert np.allclose(M([1, 1, 1]), [3, 12])


# ---------------------------------------------------------------------------
# Jacobi


def test_jacobi_diagonal():
    w, V = jacobi_eigen(np.diag([3.0, 1.0]))
    assert np.allclose(w, [3, 1])
    assert np.allclose(np.abs(V), np.eye(2))


def test_jacobi_swap():
    w, _ = jacobi_eigen([[0.0, 1.0], [1.0, 0.0]])
    assert np.allclose(w, [1, -1], atol=1e-14)


def test_jacobi_ones_plus_identity():
    # characteristic polynomial (l - 1)^2 (l - 4)
    w, _ = jacobi_eigen([[2.0, 1, 1], [1, 2, 1], [1, 1, 2]])
    assert np.allclose(w, [4, 1, 1], atol=1e-13)


def test_jacobi_sweep_budget():
    with pytest.raises(ConvergenceError) as exc:
        jacobi_eigen(random_sym(np.random.default_rng(0), 8), max_sweeps=1)
    assert exc.value.sweeps == 1


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 20), seed=st.integers(0, 10**6))
def test_jacobi_reconstruction(n, seed):
    M = random_sym(np.random.default_rng(seed), n)
    w, V = jacobi_eigen(M)
    fro = np.linalg.norm(M)
    assert np.linalg.norm(M - V @ np.diag(w) @ V.T) <= 1e-9 * (1 + fro)
    assert np.allclose(V.T @ V, np.eye(n), atol=1e-10)
    assert np.all(np.diff(w) <= 1e-15)
    assert np.abs(M @ V - V * w).max() <= 1e-10 * max(fro, 1.0)


# ---------------------------------------------------------------------------
# generalized eigenvalue


def test_gen_eigmax_identity():
    lam, _ = gen_eigmax(np.eye(3), np.eye(3))
    assert lam == pytest.approx(1.0)


def test_gen_eigmax_diagonal():
    lam, v = gen_eigmax(np.diag([2.0, -1.0]), np.eye(2))
    assert lam == pytest.approx(2.0)
    assert np.allclose(np.abs(v), [1, 0])


@pytest.mark.parametrize("n", [1, 10, 100])
def test_gen_eigmax_singular_pencil(n):
    U = np.array([[0.0, 1.0], [1.0, -1.0 / n]])
    lam, _ = gen_eigmax(U, np.diag([1.0, 0.0]))
    assert lam == pytest.approx(n, rel=1e-6)


def test_gen_eigmax_infinite():
    lam, w = gen_eigmax(np.diag([0.0, 1.0]), np.diag([1.0, 0.0]))
    assert lam == math.inf
    assert abs(w[1]) > 0


def test_gen_eigmax_not_psd():
    with pytest.raises(NotPSDError):
        gen_eigmax(np.eye(2), np.diag([1.0, -1.0]))


@settings(max_examples=30, deadline=None)
@given(n=st.integers(1, 8), seed=st.integers(0, 10**6))
def test_gen_eigmax_matches_jacobi_for_identity(n, seed):
    U = random_sym(np.random.default_rng(seed), n)
    lam, _ = gen_eigmax(U, np.eye(n))
    assert abs(lam - jacobi_eigen(U)[0][0]) <= 1e-9


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_gen_eigmax_dominates_rayleigh_quotients(seed):
    rng = np.random.default_rng(seed)
    U = random_sym(rng, 4)
    B = rng.standard_normal((4, 4))
    C = B @ B.T + 0.1 * np.eye(4)
    lam, v = gen_eigmax(U, C)
    assert v @ C @ v == pytest.approx(1.0)
    for x in rng.standard_normal((50, 4)):
        assert lam >= (x @ U @ x) / (x @ C @ x) - 1e-9


# ---------------------------------------------------------------------------
# simplex


def test_lp_bound_only():
    r = solve_lp(LpProblem([1.0], A_ub=[[-1.0]], b_ub=[-1.0]))
    assert r.status == "optimal"
    assert r.value == pytest.approx(1.0)
    assert r.x == pytest.approx([1.0])


def test_lp_infeasible():
    r = solve_lp(LpProblem([0.0], A_ub=[[1.0], [-1.0]], b_ub=[0.0, -1.0], bounds=(None, None)))
    assert r.status == "infeasible"


def test_lp_unbounded():
    r = solve_lp(LpProblem([-1.0]))
    assert r.status == "unbounded"
    assert r.value == -math.inf


def brute_force_lp(c, A, b):
    """min c'x over {A x <= b} by enumerating all basic solutions (free x)."""
    n = len(c)
    best = math.inf
    for rows in itertools.combinations(range(A.shape[0]), n):
        M = A[list(rows)]
        if abs(np.linalg.det(M)) < 1e-9:
            continue
        x = np.linalg.solve(M, b[list(rows)])
        if np.all(A @ x <= b + 1e-9):
            best = min(best, float(c @ x))
    return best


@settings(max_examples=60, deadline=None)
@given(n=st.integers(1, 4), extra=st.integers(0, 4), seed=st.integers(0, 10**6))
def test_lp_matches_vertex_enumeration(n, extra, seed):
    rng = np.random.default_rng(seed)
    m = min(n + extra, 8)
    # a box keeps the LP bounded, so its optimum sits at a vertex
    A = np.vstack([rng.standard_normal((m, n)), np.eye(n), -np.eye(n)])
    b = np.concatenate([np.abs(rng.standard_normal(A.shape[0] - 2 * n)) + 0.1, 2 * np.ones(2 * n)])
    c = rng.standard_normal(n)
    r = solve_lp(LpProblem(c, A_ub=A, b_ub=b, bounds=(None, None)))
    assert r.status == "optimal"
    assert r.value == pytest.approx(brute_force_lp(c, A, b), abs=1e-8)
    assert np.all(A @ r.x <= b + 1e-8)


def test_lp_equality_and_marginals():
    # min x1 + 2 x2  s.t.  x1 + x2 = 1, x >= 0  ->  x = (1, 0), d value / d rhs = 1
    r = solve_lp(LpProblem([1.0, 2.0], A_eq=[[1.0, 1.0]], b_eq=[1.0]))
    assert r.value == pytest.approx(1.0)
    assert r.eq_marginals == pytest.approx([1.0])


def test_lp_deterministic():
    rng = np.random.default_rng(3)
    A = rng.standard_normal((6, 3))
    p = LpProblem(rng.standard_normal(3), A_ub=A, b_ub=np.ones(6), bounds=(-5, 5))
    a, b = solve_lp(p), solve_lp(p)
    assert np.array_equal(a.x, b.x) and a.iterations == b.iterations
