import numpy as np
import pytest

from colorelastica.config import NewtonSettings, SolverConfig
from colorelastica.errors import NewtonConvergenceError
from colorelastica.newton import (
    e1_derivatives,
    e1_value,
    elastica_weight,
    newton_minimize,
    solve_p_step1,
)

import oracles

ALPHA, BETA, TAU = 0.01, 0.005, 0.05


def test_e1_examples():
    z = np.zeros((3, 2))
    assert e1_value(z, z, 0.0, TAU, 1.0, 0.0) == 1.0
    assert e1_value(z, z, 4.0, 0.05, 0.01, 0.005) == pytest.approx(2.01, rel=1e-14)


def test_e1_matches_oracle(rng):
    for _ in range(20):
        q, p = rng.standard_normal((2, 3, 2))
        s2 = rng.uniform(0, 5)
        assert e1_value(q, p, s2, TAU, ALPHA, BETA) == pytest.approx(oracles.e1(q, p, s2, TAU, ALPHA, BETA), rel=1e-12)


def test_e1_channel_swap_symmetry(rng):
    q, p = rng.standard_normal((2, 3, 2))
    perm = [2, 0, 1]
    assert e1_value(q[perm], p[perm], 1.3, TAU, ALPHA, BETA) == pytest.approx(e1_value(q, p, 1.3, TAU, ALPHA, BETA), rel=1e-14)


def test_gradient_at_zero_is_fidelity_only(rng):
    p = rng.standard_normal((3, 2))
    grad, _ = e1_derivatives(np.zeros((3, 2)), p, 2.0, TAU, ALPHA, BETA)
    assert np.allclose(grad, -p / TAU, rtol=1e-14)


def _fd(q, p, s2, k, r, h):
    def f(delta):
        qq = q.copy()
        qq[k, r] += delta
        return e1_value(qq, p, s2, TAU, ALPHA, BETA)

    return (f(h) - f(-h)) / (2 * h), (f(h) - 2 * f(0) + f(-h)) / (h * h)


def test_derivatives_match_finite_differences(rng):
    for _ in range(30):
        q = rng.uniform(-1, 1, (3, 2))
        p = rng.uniform(-1, 1, (3, 2))
        s2 = rng.uniform(0, 4)
        grad, hess = e1_derivatives(q, p, s2, TAU, ALPHA, BETA)
        for k in range(3):
            for r in range(2):
                g_fd, _ = _fd(q, p, s2, k, r, 1e-6)
                _, h_fd = _fd(q, p, s2, k, r, 1e-4)
                assert abs(grad[k, r] - g_fd) <= 1e-5 * max(1.0, abs(g_fd))
                assert abs(hess[k, r] - h_fd) <= 1e-4 * max(1.0, abs(h_fd))


def test_zero_input_converges_immediately():
    out = newton_minimize(np.zeros((3, 2, 4, 4)), np.zeros((4, 4)), TAU, ALPHA, BETA, NewtonSettings(max_iters=1))
    assert np.array_equal(out, np.zeros((3, 2, 4, 4)))
    cfg = SolverConfig()
    assert np.array_equal(solve_p_step1(np.zeros((3, 2, 4, 4)), np.zeros((3, 2, 4, 4)), cfg), np.zeros((3, 2, 4, 4)))


def test_matches_derivative_free_minimizer(rng):
    for _ in range(5):
        p = rng.uniform(-0.5, 0.5, (3, 2))
        s2 = rng.uniform(0, 2)
        got = newton_minimize(p, s2, TAU, ALPHA, BETA)
        ref = oracles.minimize_e1(p, s2, TAU, ALPHA, BETA)
        assert np.max(np.abs(got - ref)) <= 1e-4


def test_descent_on_random_field(rng):
    p = rng.uniform(-0.3, 0.3, (3, 2, 8, 8))
    s2 = rng.uniform(0, 3, (8, 8))
    q = newton_minimize(p, s2, TAU, ALPHA, BETA)
    assert np.all(e1_value(q, p, s2, TAU, ALPHA, BETA) <= e1_value(p, p, s2, TAU, ALPHA, BETA) + 1e-15)


def test_pixel_independence(rng):
    p = rng.uniform(-0.3, 0.3, (3, 2, 1, 2))
    s2 = rng.uniform(0, 3, (1, 2))
    both = newton_minimize(p, s2, TAU, ALPHA, BETA)
    for c in range(2):
        alone = newton_minimize(p[:, :, :, c], s2[:, c], TAU, ALPHA, BETA)
        assert np.array_equal(both[:, :, :, c], alone)


def test_determinism(rng):
    p = rng.uniform(-0.3, 0.3, (3, 2, 6, 6))
    s2 = rng.uniform(0, 3, (6, 6))
    a = newton_minimize(p, s2, TAU, ALPHA, BETA)
    b = newton_minimize(p.copy(), s2.copy(), TAU, ALPHA, BETA)
    assert np.array_equal(a, b)


def test_step1_uses_lambda_divergence(rng):
    cfg = SolverConfig()
    p = rng.uniform(-0.3, 0.3, (3, 2, 5, 5))
    lam = rng.uniform(-0.3, 0.3, (3, 2, 5, 5))
    s2 = elastica_weight(lam)
    div = (lam[:, 0] - np.roll(lam[:, 0], 1, axis=-1)) + (lam[:, 1] - np.roll(lam[:, 1], 1, axis=-2))
    assert np.allclose(s2, np.sum(div * div, axis=0), atol=1e-14)
    assert np.array_equal(solve_p_step1(p, lam, cfg), newton_minimize(p, s2, cfg.tau, cfg.alpha, cfg.beta))


def test_nonconvergence_reports_pixels(rng):
    p = np.zeros((3, 2, 3, 4))
    p[:, :, 2, 1] = 0.4
    tight = NewtonSettings(tol=1e-300, max_iters=2)
    with pytest.raises(NewtonConvergenceError) as info:
        newton_minimize(p, np.ones((3, 4)), TAU, ALPHA, BETA, tight)
    assert (2, 1) in info.value.pixels
    lenient = NewtonSettings(tol=1e-300, max_iters=2, accept_nonconverged=True)
    out = newton_minimize(p, np.ones((3, 4)), TAU, ALPHA, BETA, lenient)
    assert np.all(np.isfinite(out))


def test_settings_validation():
    for kwargs in ({"tol": 0}, {"max_iters": 0}, {"hessian_floor": -1}):
        with pytest.raises(ValueError):
            NewtonSettings(**kwargs)
