"""Induced metric of the image surface and the color elastica energy.

A Jacobian field has shape ``(d, 2, N, M)``: for every channel k it holds
the row (q_k1, q_k2) of derivatives along x1 and x2 at each pixel.  The
metric of the surface (sqrt(alpha) x1, sqrt(alpha) x2, v_1, ..., v_d) is

    G = alpha I + q^T q,    g = det G.
"""

from typing import NamedTuple

import numpy as np

from .grid_ops import div_minus, grad_plus
from .image_core import as_array
from .spectral import convolve_periodic


class MetricField(NamedTuple):
    """Per-pixel symmetric 2x2 metric ``[[g11, g12], [g12, g22]]`` and its determinant."""

    g11: np.ndarray
    g12: np.ndarray
    g22: np.ndarray
    g: np.ndarray

    @classmethod
    def from_entries(cls, g11, g12, g22):
        return cls(g11, g12, g22, g11 * g22 - g12 * g12)

    @property
    def sqrt_g(self):
        return np.sqrt(self.g)


def build_metric(q, alpha):
    """M(q) for a Jacobian field ``q``."""
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    q = np.asarray(q, dtype=float)
    q1, q2 = q[:, 0], q[:, 1]
    g11 = alpha + np.sum(q1 * q1, axis=0)
    g12 = np.sum(q1 * q2, axis=0)
    g22 = alpha + np.sum(q2 * q2, axis=0)
    return MetricField.from_entries(g11, g12, g22)


def _check_det(G):
    if not np.all(G.g > 0):
        raise ValueError("metric determinant must be positive at every pixel")


def mu_from_q(q, G):
    """Row-wise mu_k = sqrt(g) q_k G^{-1}."""
    _check_det(G)
    q = np.asarray(q, dtype=float)
    q1, q2 = q[:, 0], q[:, 1]
    s = 1.0 / np.sqrt(G.g)
    mu1 = (G.g22 * q1 - G.g12 * q2) * s
    mu2 = (G.g11 * q2 - G.g12 * q1) * s
    return np.stack([mu1, mu2], axis=1)


def q_from_mu(mu, G):
    """Row-wise q_k = mu_k G / sqrt(g), the inverse of :func:`mu_from_q`."""
    _check_det(G)
    mu = np.asarray(mu, dtype=float)
    m1, m2 = mu[:, 0], mu[:, 1]
    s = 1.0 / np.sqrt(G.g)
    q1 = (m1 * G.g11 + m2 * G.g12) * s
    q2 = (m1 * G.g12 + m2 * G.g22) * s
    return np.stack([q1, q2], axis=1)


def laplace_beltrami(v, G, h=1.0):
    """Discrete (1/sqrt g) div^-(sqrt(g) G^{-1} grad^+ v) of one or more channels."""
    v = np.asarray(v, dtype=float)
    single = v.ndim == 2
    if single:
        v = v[np.newaxis]
    mu = mu_from_q(grad_plus(v, h), G)
    out = div_minus(mu, h) / np.sqrt(G.g)
    return out[0] if single else out


def energy_terms(u, f, cfg, kernel=None):
    """Return ``(area, elastica, fidelity)`` of the discrete color elastica energy.

    The energy is evaluated on ``u`` alone: q = grad^+ u, G = M(q) and
    mu = sqrt(g) q G^{-1}, so the elastica integrand (div^- mu_k)^2 / sqrt(g)
    equals (Delta_g u_k)^2 sqrt(g).  With a blur kernel the fidelity
    compares K u with f.
    """
    u = as_array(u)
    f = as_array(f)
    if u.shape != f.shape:
        raise ValueError(f"shape mismatch: u {u.shape} vs f {f.shape}")
    h2 = cfg.h * cfg.h
    q = grad_plus(u, cfg.h)
    G = build_metric(q, cfg.alpha)
    sqrt_g = np.sqrt(G.g)
    div_mu = div_minus(mu_from_q(q, G), cfg.h)

    area = float(np.sum(sqrt_g) * h2)
    elastica = float(cfg.beta * np.sum(np.sum(div_mu * div_mu, axis=0) / sqrt_g) * h2)
    ku = u if kernel is None else convolve_periodic(u, kernel)
    fidelity = float(np.sum((ku - f) ** 2) * h2 / (2.0 * cfg.eta))
    return area, elastica, fidelity


def energy(u, f, cfg, kernel=None):
    """Discrete color elastica energy of ``u`` given data ``f``."""
    return sum(energy_terms(u, f, cfg, kernel))
