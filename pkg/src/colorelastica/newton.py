"""Pointwise Newton solve of the p-subproblem of the first fractional step.

At every pixel the new Jacobian q minimizes

    E1(q) = |q - p|^2 / (2 tau) + s1 sqrt(m(q)) + beta s2 / sqrt(m(q)),

with m(q) = det M(q) and s2 = sum_k (div^- lambda_k)^2 frozen.  The
iteration is the coordinatewise (diagonal) Newton update applied to all
d x 2 entries at once.
"""

import logging

import numpy as np

from .config import NewtonSettings
from .errors import NewtonConvergenceError
from .grid_ops import div_minus
from .metric import build_metric

log = logging.getLogger(__name__)


def _det_m(q, alpha):
    G = build_metric(q, alpha)
    if np.any(G.g <= 0):
        raise ValueError("m(q) must be positive")
    return G


def e1_value(q, p, s2, tau, alpha, beta, s1=1.0):
    """E1 at each pixel; ``q`` and ``p`` have shape ``(d, 2, ...)``."""
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    m = _det_m(q, alpha).g
    sqrt_m = np.sqrt(m)
    dist2 = np.sum((q - p) ** 2, axis=(0, 1))
    return dist2 / (2.0 * tau) + s1 * sqrt_m + beta * s2 / sqrt_m


def e1_derivatives(q, p, s2, tau, alpha, beta, s1=1.0):
    """Gradient and diagonal Hessian of E1 with respect to every q_kr."""
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    G = _det_m(q, alpha)
    m = G.g
    q1, q2 = q[:, 0], q[:, 1]

    dm = np.stack([2 * G.g22 * q1 - 2 * G.g12 * q2, 2 * G.g11 * q2 - 2 * G.g12 * q1], axis=1)
    d2m = np.stack([2 * G.g22 - 2 * q2 * q2, 2 * G.g11 - 2 * q1 * q1], axis=1)

    m_half = m ** -0.5
    m_3half = m_half / m
    m_5half = m_3half / m
    c1 = 0.5 * (s1 * m_half - beta * s2 * m_3half)
    c2 = 0.5 * (-0.5 * s1 * m_3half + 1.5 * beta * s2 * m_5half)

    grad = (q - p) / tau + c1 * dm
    hess = 1.0 / tau + c1 * d2m + c2 * dm * dm
    return grad, hess


def elastica_weight(lam, h=1.0):
    """s2 = sum_k (div^- lambda_k)^2 at each pixel."""
    div = div_minus(lam, h)
    return np.sum(div * div, axis=0)


def newton_minimize(p, s2, tau, alpha, beta, settings=None, q0=None):
    """Run the diagonal Newton iteration from ``q0`` (default ``p``).

    ``p`` has shape ``(d, 2, *S)`` and ``s2`` shape ``S``.  Pixels stop
    updating individually once their largest coordinate step falls below
    ``settings.tol``, so a pixel's result never depends on its neighbours.
    """
    settings = settings or NewtonSettings()
    p = np.asarray(p, dtype=float)
    spatial = p.shape[2:]
    d = p.shape[0]
    s2 = np.broadcast_to(np.asarray(s2, dtype=float), spatial).reshape(-1)
    q = np.array(p if q0 is None else q0, dtype=float).reshape(d, 2, -1)
    p = p.reshape(d, 2, -1)
    active = np.ones(s2.shape, dtype=bool)
    inv_tau = 1.0 / tau

    for _ in range(settings.max_iters):
        qa = q[:, :, active]
        grad, hess = e1_derivatives(qa, p[:, :, active], s2[active], tau, alpha, beta)
        hess = np.where(hess < settings.hessian_floor, inv_tau, hess)
        step = grad / hess
        if not np.all(np.isfinite(step)):
            bad = np.flatnonzero(active)[~np.isfinite(step).all(axis=(0, 1))]
            raise NewtonConvergenceError("non-finite Newton step", _pixels(spatial, bad))
        q[:, :, active] = qa - step
        done = np.max(np.abs(step), axis=(0, 1)) < settings.tol
        active[np.flatnonzero(active)[done]] = False
        if not active.any():
            return q.reshape(d, 2, *spatial)

    bad = _pixels(spatial, np.flatnonzero(active))
    if settings.accept_nonconverged:
        log.warning("Newton did not converge at %d pixel(s); keeping last iterate", len(bad))
        return q.reshape(d, 2, *spatial)
    raise NewtonConvergenceError(
        f"Newton did not converge within {settings.max_iters} iterations at {len(bad)} pixel(s), "
        f"first (row, col): {bad[:5]}",
        bad,
    )


def _pixels(spatial, flat_idx):
    if not spatial:
        return [()] if len(flat_idx) else []
    return [tuple(int(i) for i in ix) for ix in zip(*np.unravel_index(flat_idx, spatial))]


def solve_p_step1(p_prev, lambda_prev, cfg, settings=None):
    """p^{n+1/3}: minimize E1 pixelwise with s2 from ``lambda_prev``, starting at ``p_prev``."""
    settings = settings or cfg.newton
    s2 = elastica_weight(lambda_prev, cfg.h)
    return newton_minimize(p_prev, s2, cfg.tau, cfg.alpha, cfg.beta, settings)
