import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chanent import linalg
from chanent.errors import NumericalError, ValidationError
from chanent.optimize import NumericPolicy, barrier_sdp, density_maximize, fd_gradient, fw_gap
from chanent.states import maximally_mixed, random_state, relative_entropy, von_neumann_entropy

from conftest import random_hermitian


def entropy_gradient(rho):
    return -linalg.mlog2(rho) - np.eye(rho.shape[0]) / math.log(2)


@pytest.mark.parametrize(
    "changes", [{"opt_tol": 0.0}, {"eigen_cutoff": -1.0}, {"max_iter": 0}, {"restarts": 0}, {"seed": -1}]
)
def test_policy_rejects_non_positive(changes):
    with pytest.raises(ValidationError):
        NumericPolicy().replace(**changes)


def test_policy_defaults():
    p = NumericPolicy()
    assert (p.eigen_cutoff, p.opt_tol, p.max_iter, p.restarts, p.step_init, p.seed) == (1e-14, 1e-8, 5000, 8, 1.0, 42)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_entropy_maximum_is_certified(d):
    rep = density_maximize(von_neumann_entropy, d, gradient=entropy_gradient, starts=[random_state(d, np.random.default_rng(d))])
    assert rep.value == pytest.approx(math.log2(d), abs=1e-8)
    assert rep.converged and rep.fw_gap <= 1e-8
    assert rep.certificate == rep.fw_gap


def test_linear_objective_reaches_top_eigenvalue(rng):
    h = random_hermitian(3, rng)
    rep = density_maximize(lambda r: np.real(np.trace(h @ r)), 3, gradient=lambda r: h)
    assert rep.value == pytest.approx(np.linalg.eigvalsh(h)[-1], abs=1e-8)


def test_relative_entropy_minimizer_is_target(rng):
    sigma = random_state(3, rng)
    rep = density_maximize(lambda r: -relative_entropy(r, sigma).value, 3)
    assert abs(rep.value) < 1e-8
    np.testing.assert_allclose(rep.optimizer_state, sigma, atol=1e-4)


def test_nonconcave_runs_use_all_restarts():
    policy = NumericPolicy(restarts=5)
    rep = density_maximize(von_neumann_entropy, 2, policy, gradient=entropy_gradient, concave=False)
    assert rep.restarts_used == 5 and rep.fw_gap is None
    assert rep.spread <= policy.opt_tol and rep.converged
    assert len(rep.details["restart_values"]) == 5


def test_nonconcave_picks_best_restart():
    # two separated local maxima on the diagonal of a qubit
    def f(r):
        p = np.real(r[0, 0])
        return -((p - 0.1) ** 2) * ((p - 0.9) ** 2) + 0.01 * p

    rep = density_maximize(f, 2, NumericPolicy(restarts=6), concave=False)
    assert np.real(rep.optimizer_state[0, 0]) > 0.5
    assert rep.value == pytest.approx(max(rep.details["restart_values"]))


def test_nonconcave_is_deterministic():
    f = lambda r: -np.real(np.trace(r @ r @ r))  # noqa: E731
    a = density_maximize(f, 3, NumericPolicy(restarts=4, seed=7), concave=False)
    b = density_maximize(f, 3, NumericPolicy(restarts=4, seed=7), concave=False)
    assert a.value == b.value and a.iterations == b.iterations


def test_nan_objective_is_reported():
    with pytest.raises(NumericalError, match="NaN"):
        density_maximize(lambda r: float("nan"), 2)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=15)
def test_fd_gradient_matches_entropy_gradient(seed):
    rng = np.random.default_rng(seed)
    rho = 0.5 * random_state(3, rng) + 0.5 * maximally_mixed(3)
    diff = fd_gradient(von_neumann_entropy, rho) - entropy_gradient(rho)
    diff -= np.trace(diff) / 3 * np.eye(3)
    assert np.max(np.abs(diff)) <= 1e-5


def test_fw_gap_is_zero_at_optimum():
    assert abs(fw_gap(entropy_gradient(maximally_mixed(3)), maximally_mixed(3))) < 1e-14


def test_sdp_identity_map(rng):
    rho = random_state(3, rng)
    res = barrier_sdp(lambda y: y, rho, 3)
    assert res.value == pytest.approx(1.0, abs=1e-9)


def test_sdp_bell_state():
    res = barrier_sdp(lambda y: np.kron(y, np.eye(2)), linalg.gamma_operator(2, normalized=True), 2)
    assert res.value == pytest.approx(2.0, abs=1e-9)
    assert res.feasible and res.gap <= 1e-9


def test_sdp_product_state(rng):
    a, b = random_state(2, rng), random_state(3, rng)
    res = barrier_sdp(lambda y: np.kron(y, np.eye(3)), np.kron(a, b), 2)
    assert res.value == pytest.approx(np.linalg.eigvalsh(b)[-1], abs=1e-9)


def test_sdp_dual_is_feasible_certificate(rng):
    rho = random_state(4, rng)
    res = barrier_sdp(lambda y: np.kron(y, np.eye(2)), rho, 2)
    x = res.dual
    assert np.linalg.eigvalsh(x).min() >= -1e-10
    # dual objective Tr(X rho) with Tr_B X <= I
    tr_b = linalg.partial_trace(x, [2, 2], keep=[0])
    assert np.linalg.eigvalsh(tr_b).max() <= 1 + 1e-8
    assert np.real(np.trace(x @ rho)) == pytest.approx(res.value, abs=1e-8)


def test_sdp_matches_cvxpy(rng):
    cp = pytest.importorskip("cvxpy")
    for _ in range(3):
        rho = random_state(4, rng)
        y = cp.Variable((2, 2), hermitian=True)
        prob = cp.Problem(cp.Minimize(cp.real(cp.trace(y))), [cp.kron(y, np.eye(2)) - rho >> 0])
        prob.solve(solver=cp.SCS, eps=1e-10, max_iters=200000)
        res = barrier_sdp(lambda m: np.kron(m, np.eye(2)), rho, 2)
        assert res.value == pytest.approx(prob.value, abs=1e-6)
