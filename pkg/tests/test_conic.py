import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lcris import conic
from lcris.conic import LinearConstraint, SdpProblem, SolveStatus, embed_matrix, real_embedding, solve
from tests.conftest import crandn


def _check_solution(sol, n):
    S = sol.S
    assert np.abs(S - S.conj().T).max() <= 1e-8
    assert np.linalg.eigvalsh(S).min() >= -1e-6
    assert np.abs(np.real(np.diag(S)) - 1).max() <= 1e-6
    assert S.shape == (n, n)


def _maxmin_problem(rng, n, points=2, arc=True):
    """Max-min of rank-one quadratics with a couple of row-sum half-planes."""
    cons = [LinearConstraint(crandn(rng, n), None, 0.0, ">=", 1.0) for _ in range(points)]
    if arc:
        eye = np.eye(n)
        for k in range(2):
            coef = complex(crandn(rng, 1)[0]) * 0.1
            cons.append(LinearConstraint(np.full(n, coef), eye[:, k], 0.5, "<="))
    return SdpProblem(np.zeros((n, n), dtype=complex), cons, alpha_weight=1.0)


def test_single_element_fully_constrained():
    sol = solve(SdpProblem(np.array([[2.5 + 0j]])))
    assert sol.optimal
    assert sol.S[0, 0].real == pytest.approx(1.0, abs=1e-7)
    assert sol.objective == pytest.approx(2.5, rel=1e-6)


def test_trace_identity():
    for n in (2, 5, 9):
        sol = solve(SdpProblem(np.eye(n)))
        assert sol.objective == pytest.approx(n, rel=1e-7)
        _check_solution(sol, n)


def test_cophasing_bound_small_n(rng):
    # rank-one C = v v^H: optimum (sum |v|)^2 attained by s_n = exp(j arg v_n)
    for n in range(1, 9):
        v = crandn(rng, n)
        sol = solve(SdpProblem(np.outer(v, v.conj())), tol=1e-9)
        bound = np.sum(np.abs(v)) ** 2
        assert sol.optimal
        assert sol.objective == pytest.approx(bound, rel=1e-6)
        lam, U = np.linalg.eigh(sol.S)
        u = U[:, -1] * np.sqrt(lam[-1])
        s = np.exp(1j * np.angle(v))
        assert abs(np.vdot(s, u)) ** 2 == pytest.approx(n * n, rel=1e-4)


def test_matches_reference_solver(rng):
    cp = pytest.importorskip("cvxpy")
    for n in (3, 4, 6):
        prob = _maxmin_problem(rng, n)
        sol = solve(prob, tol=1e-9)
        S = cp.Variable((n, n), hermitian=True)
        a = cp.Variable(nonneg=True)
        cons = [S >> 0, cp.real(cp.diag(S)) == 1]
        for c in prob.constraints:
            F = c.matrix()
            lhs = cp.real(cp.trace(F @ S)) - c.alpha_coef * a
            cons.append(lhs <= c.bound if c.sense == "<=" else lhs >= c.bound)
        ref = cp.Problem(cp.Maximize(a), cons)
        ref.solve(solver="CLARABEL")
        assert sol.optimal
        assert sol.alpha == pytest.approx(ref.value, rel=1e-5)


def test_real_embedding_same_value(rng):
    for n in (3, 5):
        prob = _maxmin_problem(rng, n)
        prob.objective = 0.1 * (lambda v: np.outer(v, v.conj()))(crandn(rng, n))
        cplx = solve(prob, tol=1e-10)
        emb = real_embedding(prob)
        assert not emb.is_complex
        real = solve(emb, tol=1e-10)
        assert real.objective == pytest.approx(cplx.objective, abs=1e-6 * (1 + abs(cplx.objective)))


def test_embedding_preserves_functionals(rng):
    n = 4
    prob = _maxmin_problem(rng, n)
    s = np.exp(1j * rng.uniform(0, 2 * math.pi, n))
    S = np.outer(s, s.conj())
    emb = real_embedding(prob)
    Sr = embed_matrix(S)
    for c, ce in zip(prob.constraints, emb.constraints):
        assert ce.value(Sr) == pytest.approx(c.value(S), rel=1e-10, abs=1e-12)


def test_infeasible_detected():
    n = 4
    # trace fixed at n by the diagonal, so tr(S) <= n - 1 has no solution
    prob = SdpProblem(np.zeros((n, n)), [LinearConstraint(np.eye(n), None, n - 1.0, "<=")])
    assert solve(prob).status is SolveStatus.INFEASIBLE


def test_alpha_objective_bounded_by_constraint(rng):
    n = 3
    v = crandn(rng, n)
    prob = SdpProblem(np.zeros((n, n), dtype=complex), [LinearConstraint(v, None, 0.0, ">=", 1.0)], 1.0)
    sol = solve(prob, tol=1e-9)
    assert sol.alpha == pytest.approx(np.sum(np.abs(v)) ** 2, rel=1e-6)


def test_deterministic(rng):
    prob = _maxmin_problem(rng, 5, 3)
    a, b = solve(prob), solve(prob)
    assert np.array_equal(a.S, b.S)
    assert a.alpha == b.alpha


def test_zero_penalty_outer_loop_monotone(rng):
    # with no penalty the problem does not change between outer iterations
    prob = _maxmin_problem(rng, 4)
    values = [solve(prob).alpha for _ in range(3)]
    assert all(b >= a - 1e-9 for a, b in zip(values, values[1:]))


def test_dump_round_trip(tmp_path, rng):
    prob = _maxmin_problem(rng, 3)
    path = tmp_path / "p.txt"
    prob.dump(path)
    head = path.read_text().splitlines()[0].split()
    assert head[:3] == ["sdp", "3", str(len(prob.constraints))]
    back = SdpProblem.load(path)
    assert back.dim == prob.dim and back.alpha_weight == prob.alpha_weight
    np.testing.assert_array_equal(back.objective, prob.objective)
    for c, d in zip(prob.constraints, back.constraints):
        np.testing.assert_array_equal(c.u, d.u)
        assert (c.w is None) == (d.w is None)
        assert (c.bound, c.sense, c.alpha_coef) == (d.bound, d.sense, d.alpha_coef)


def test_rejects_non_hermitian():
    with pytest.raises(ValueError):
        SdpProblem(np.array([[0, 1], [0, 0]], dtype=complex))


def test_constraint_matrix_matches_value(rng):
    c = LinearConstraint(crandn(rng, 4, 2), crandn(rng, 4, 2), 0.0)
    X = crandn(rng, 4, 4)
    S = X @ X.conj().T
    assert c.value(S) == pytest.approx(np.real(np.trace(c.matrix() @ S)), rel=1e-10)


@settings(max_examples=15)
@given(st.integers(0, 2**32 - 1), st.integers(2, 7))
def test_solution_invariants(seed, n):
    rng = np.random.default_rng(seed)
    prob = _maxmin_problem(rng, n, 2)
    prob.objective = (lambda v: np.outer(v, v.conj()))(crandn(rng, n)) * 0.01
    sol = solve(prob)
    if sol.status is SolveStatus.OPTIMAL:
        _check_solution(sol, n)
        assert prob.max_violation(sol.S, sol.alpha) <= 1e-6 * (1 + abs(sol.objective))
        assert abs(sol.objective - sol.dual_objective) <= 1e-5 * (1 + abs(sol.objective))
