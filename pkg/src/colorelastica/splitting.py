"""Three-step operator splitting for the color elastica model.

Each outer iteration advances (p, lambda, G) through

1. a pointwise Newton solve for p, a metric blend, and a frozen-coefficient
   FFT solve for lambda;
2. the pointwise projection of (p, lambda) onto mu_k = sqrt(g) q_k G^{-1},
   then a metric blend;
3. an FFT Helmholtz solve for u with p = grad^+ u, then a metric blend.

Every blend keeps the weight exp(-gamma2 tau / 3) on the old metric.
"""

import csv
import logging
import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

from .config import SolverConfig
from .errors import SolverError
from .grid_ops import div_minus, grad_plus
from .image_core import as_array
from .metric import MetricField, build_metric, energy, q_from_mu
from .newton import solve_p_step1
from .spectral import convolve_periodic, get_plan, solve_helmholtz, solve_helmholtz_deblur, solve_lambda_frozen

log = logging.getLogger(__name__)

TRACE_HEADER = ("iter", "energy", "update_norm")


class TraceRow(NamedTuple):
    iter: int
    energy: float
    update_norm: float


@dataclass
class SolverState:
    u: np.ndarray
    p: np.ndarray
    lam: np.ndarray
    G: MetricField
    iter: int = 0
    trace: list = field(default_factory=list)

    @property
    def g(self):
        return self.G.g


@dataclass
class SolveResult:
    u: np.ndarray
    trace: list
    converged: bool
    state: SolverState

    @property
    def iterations(self):
        return self.state.iter


def initialize(f, cfg):
    """Starting state: u0 = f (or 0), p0 = grad^+ u0, G0 = M(p0), lambda0 = sqrt(g0) p0 G0^{-1}."""
    f = as_array(f)
    u = f.copy() if cfg.init_mode == "input" else np.zeros_like(f)
    p = grad_plus(u, cfg.h)
    G = build_metric(p, cfg.alpha)
    p1, p2 = p[:, 0], p[:, 1]
    inv_sqrt_g = 1.0 / np.sqrt(G.g)
    lam = np.stack(
        [
            inv_sqrt_g * (G.g22 * p1 - G.g12 * p2),
            inv_sqrt_g * (-G.g12 * p1 + G.g11 * p2),
        ],
        axis=1,
    )
    return SolverState(u=u, p=p, lam=lam, G=G)


def metric_blend(G_old, q, cfg):
    """exp(-gamma2 tau/3) G_old + (1 - exp(-gamma2 tau/3)) M(q)."""
    w = cfg.blend_weight
    Mq = build_metric(q, cfg.alpha)
    return MetricField.from_entries(
        w * G_old.g11 + (1.0 - w) * Mq.g11,
        w * G_old.g12 + (1.0 - w) * Mq.g12,
        w * G_old.g22 + (1.0 - w) * Mq.g22,
    )


def step1(state, f, cfg):
    p = solve_p_step1(state.p, state.lam, cfg)
    G = metric_blend(state.G, p, cfg)
    lam = solve_lambda_frozen(state.lam, G.g, cfg)
    return replace(state, p=p, G=G, lam=lam)


def project_constraint(p, lam, G, gamma1):
    """Pointwise minimizer of |mu G / sqrt(g) - p|^2 + gamma1 |mu - lam|^2 over mu.

    Returns ``(lam_new, p_new)`` with p_new = lam_new G / sqrt(g).
    """
    g11, g12, g22, g = G
    sqrt_g = np.sqrt(g)
    A11 = (2 * g11 * g11 + 2 * g12 * g12) / g + 2 * gamma1
    A12 = (2 * g11 * g12 + 2 * g12 * g22) / g
    A22 = (2 * g12 * g12 + 2 * g22 * g22) / g + 2 * gamma1
    det = A11 * A22 - A12 * A12
    if not np.all(det > 0):
        raise SolverError("step-2 system is not positive definite")

    p1, p2 = p[:, 0], p[:, 1]
    b1 = (2 * g11 * p1 + 2 * g12 * p2) / sqrt_g + 2 * gamma1 * lam[:, 0]
    b2 = (2 * g12 * p1 + 2 * g22 * p2) / sqrt_g + 2 * gamma1 * lam[:, 1]
    lam_new = np.stack([(A22 * b1 - A12 * b2) / det, (-A12 * b1 + A11 * b2) / det], axis=1)
    return lam_new, q_from_mu(lam_new, G)


def step2(state, cfg):
    lam, p = project_constraint(state.p, state.lam, state.G, cfg.gamma1)
    G = metric_blend(state.G, p, cfg)
    return replace(state, p=p, lam=lam, G=G)


def step3(state, f, cfg, kernel=None):
    f = as_array(f)
    plan = get_plan(f.shape[-2], f.shape[-1], float(cfg.h))
    div_p = div_minus(state.p, cfg.h)
    if kernel is None:
        b = -cfg.eta * div_p + cfg.tau * f
        u = solve_helmholtz(b, cfg.eta, cfg.tau, plan, cfg.h)
    else:
        b = -cfg.eta * div_p + cfg.tau * convolve_periodic(f, kernel, adjoint=True)
        u = solve_helmholtz_deblur(b, kernel, cfg.eta, cfg.tau, plan, cfg.h)
    p = grad_plus(u, cfg.h)
    G = metric_blend(state.G, p, cfg)
    return replace(state, u=u, p=p, G=G)


def check_state(state, where=""):
    if not np.all(state.G.g > 0):
        raise SolverError(f"metric determinant became non-positive{where}")
    for name in ("u", "p", "lam"):
        if not np.all(np.isfinite(getattr(state, name))):
            raise SolverError(f"non-finite values in {name}{where}")


def update_norm(u_new, u_old, norm):
    diff = u_new - u_old
    if norm == "linf":
        return float(np.max(np.abs(diff)))
    return float(np.sqrt(np.sum(diff * diff)))


def iterate(state, f, cfg, kernel=None):
    """One outer iteration; returns the new state without touching the trace."""
    n = state.iter + 1
    try:
        state = step1(state, f, cfg)
        check_state(state, " after step 1")
        state = step2(state, cfg)
        check_state(state, " after step 2")
        state = step3(state, f, cfg, kernel)
        check_state(state, " after step 3")
    except SolverError as exc:
        exc.iteration = n
        raise
    except (ValueError, FloatingPointError) as exc:
        raise SolverError(str(exc), iteration=n) from exc
    return replace(state, iter=n)


def run(f, cfg=None, kernel=None, max_iters=None):
    """Minimize the color elastica energy for data ``f``.

    Iterates until the update norm ``|u^{n+1} - u^n|`` (``cfg.stop_norm``)
    drops to ``cfg.stop_tol`` or the iteration cap is reached.  With a blur
    kernel the data term becomes (1/2 eta) |K u - f|^2.
    """
    cfg = cfg or SolverConfig()
    f = as_array(f)
    max_iters = cfg.max_outer_iters if max_iters is None else max_iters

    state = initialize(f, cfg)
    trace = [TraceRow(0, energy(state.u, f, cfg, kernel), math.nan)]
    converged = False
    while state.iter < max_iters:
        u_old = state.u
        state = iterate(state, f, cfg, kernel)
        du = update_norm(state.u, u_old, cfg.stop_norm)
        trace.append(TraceRow(state.iter, energy(state.u, f, cfg, kernel), du))
        log.info("iter %4d  energy %.10g  update %.4e", state.iter, trace[-1].energy, du)
        if du <= cfg.stop_tol:
            converged = True
            break

    state.trace = trace
    if not converged:
        log.warning("stopping criterion not met after %d iterations", state.iter)
    return SolveResult(u=state.u, trace=trace, converged=converged, state=state)


def run_deblur(f, kernel, cfg=None, max_iters=None):
    """:func:`run` with the blurred data term."""
    return run(f, cfg, kernel=kernel, max_iters=max_iters)


def write_trace(trace, path):
    """Write ``iter,energy,update_norm`` rows with full double precision."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_HEADER)
        for row in trace:
            writer.writerow([row.iter, f"{row.energy:.17g}", f"{row.update_norm:.17g}"])


def read_trace(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != TRACE_HEADER:
            raise ValueError(f"unexpected trace header {header}")
        return [TraceRow(int(i), float(e), float(d)) for i, e, d in reader]
