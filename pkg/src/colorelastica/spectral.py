"""FFT solvers for the constant-coefficient linear problems of the splitting scheme.

Every operator here is a combination of the periodic differences in
:mod:`colorelastica.grid_ops`, so it is diagonalized by the 2D DFT.  With
z1 = 2 pi k / M along x1 and z2 = 2 pi l / N along x2 the shifts have
symbols exp(+-i z), giving

    forward difference   (exp(i z) - 1) / h
    backward difference  (1 - exp(-i z)) / h
    div^- grad^+         (2 cos z1 - 2 + 2 cos z2 - 2) / h^2
"""

from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

from .errors import SingularSymbolError
from .grid_ops import div_minus, grad_plus

fft2 = np.fft.fft2
ifft2 = np.fft.ifft2


class SpectralPlan:
    """Frequency grids and difference-operator symbols for one ``(N, M)`` grid."""

    def __init__(self, shape, h=1.0):
        self.N, self.M = (int(n) for n in shape[-2:])
        self.h = float(h)
        self.z1 = 2.0 * np.pi * np.arange(self.M)[np.newaxis, :] / self.M
        self.z2 = 2.0 * np.pi * np.arange(self.N)[:, np.newaxis] / self.N
        h = self.h
        self.fwd1 = (np.exp(1j * self.z1) - 1.0) / h
        self.fwd2 = (np.exp(1j * self.z2) - 1.0) / h
        self.bwd1 = (1.0 - np.exp(-1j * self.z1)) / h
        self.bwd2 = (1.0 - np.exp(-1j * self.z2)) / h
        self.lap1 = 2.0 * (np.cos(self.z1) - 1.0) / h**2
        self.lap2 = 2.0 * (np.cos(self.z2) - 1.0) / h**2
        self.laplacian = self.lap1 + self.lap2

    @property
    def shape(self):
        return (self.N, self.M)

    def helmholtz_symbol(self, eta, tau, kernel_power=None):
        """Symbol of -eta div^- grad^+ + tau K*K (K = identity when ``kernel_power`` is None)."""
        if kernel_power is None:
            return tau - eta * self.laplacian
        return tau * kernel_power - eta * self.laplacian

    def lambda_symbols(self, gamma1, c1):
        """Entries of the 2x2 symbol of gamma1 I - c1 grad^+ div^-."""
        a11 = gamma1 - c1 * self.lap1 + 0j * self.z2
        a22 = gamma1 - c1 * self.lap2 + 0j * self.z1
        a12 = -c1 * self.fwd1 * self.bwd2
        a21 = -c1 * self.fwd2 * self.bwd1
        return a11, a12, a21, a22


@lru_cache(maxsize=16)
def get_plan(N, M, h=1.0):
    return SpectralPlan((N, M), h)


def _plan_for(arr, h, plan):
    if plan is None:
        return get_plan(arr.shape[-2], arr.shape[-1], float(h))
    if plan.shape != arr.shape[-2:]:
        raise ValueError(f"plan shape {plan.shape} does not match field shape {arr.shape[-2:]}")
    return plan


def _check_finite(*arrays):
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise ValueError("input contains non-finite values")


# ---------------------------------------------------------------------------
# Blur kernels


@dataclass(eq=False)
class BlurKernel:
    """Small convolution kernel placed on the periodic grid.

    ``taps[origin]`` lands on grid pixel (0, 0); the remaining taps wrap
    around.  Rows run along x2 and columns along x1.
    """

    taps: np.ndarray
    origin: tuple = None
    _responses: dict = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        taps = np.array(self.taps, dtype=float)
        if taps.ndim == 1:
            taps = taps[np.newaxis]
        if taps.ndim != 2 or taps.size == 0:
            raise ValueError(f"kernel taps must be a non-empty 2D array, got shape {taps.shape}")
        if not np.all(np.isfinite(taps)):
            raise ValueError("kernel taps must be finite")
        self.taps = taps
        if self.origin is None:
            self.origin = (taps.shape[0] // 2, taps.shape[1] // 2)
        self.origin = tuple(int(o) for o in self.origin)

    @property
    def is_identity(self):
        nz = np.argwhere(self.taps != 0)
        return len(nz) == 1 and tuple(nz[0]) == self.origin and self.taps[self.origin] == 1.0

    def offsets(self):
        """Yield ``(drow, dcol, value)`` for every nonzero tap relative to the origin."""
        r0, c0 = self.origin
        for (r, c), v in np.ndenumerate(self.taps):
            if v != 0:
                yield r - r0, c - c0, float(v)

    def embed(self, N, M):
        grid = np.zeros((N, M))
        for dr, dc, v in self.offsets():
            grid[dr % N, dc % M] += v
        return grid

    def response(self, N, M):
        key = (N, M)
        if key not in self._responses:
            self._responses[key] = fft2(self.embed(N, M))
        return self._responses[key]

    @classmethod
    def from_file(cls, path):
        """Read the text format: ``rows cols`` on the first line, then row-major taps."""
        tokens = Path(path).read_text().split()
        if len(tokens) < 2:
            raise ValueError(f"{path}: missing 'rows cols' header")
        rows, cols = int(tokens[0]), int(tokens[1])
        if rows < 1 or cols < 1:
            raise ValueError(f"{path}: kernel size must be positive, got {rows}x{cols}")
        values = [float(t) for t in tokens[2:]]
        if len(values) != rows * cols:
            raise ValueError(f"{path}: expected {rows * cols} taps, found {len(values)}")
        return cls(np.array(values).reshape(rows, cols))

    def to_file(self, path):
        rows, cols = self.taps.shape
        lines = [f"{rows} {cols}"]
        lines += [" ".join(repr(float(v)) for v in row) for row in self.taps]
        Path(path).write_text("\n".join(lines) + "\n")


def convolve_periodic(img, kernel, adjoint=False):
    """Circular convolution of every channel with ``kernel`` (or its adjoint)."""
    v = np.asarray(getattr(img, "data", img), dtype=float)
    if kernel.is_identity:
        return v.copy()
    K = kernel.response(*v.shape[-2:])
    if adjoint:
        K = np.conj(K)
    return np.real(ifft2(fft2(v) * K))


# ---------------------------------------------------------------------------
# Linear solves


def frozen_c1(g, cfg):
    """c1 = max 2 beta tau / sqrt(g)."""
    return float(np.max(2.0 * cfg.beta * cfg.tau / np.sqrt(g)))


def lambda_rhs(lambda_n, g, cfg, c1=None):
    """Right-hand side gamma1 lambda^n - grad^+[(c1 - 2 beta tau / sqrt g) div^- lambda^n]."""
    if c1 is None:
        c1 = frozen_c1(g, cfg)
    coef = c1 - 2.0 * cfg.beta * cfg.tau / np.sqrt(g)
    return cfg.gamma1 * lambda_n - grad_plus(coef * div_minus(lambda_n, cfg.h), cfg.h)


def solve_lambda_frozen(lambda_n, g, cfg, plan=None):
    """One frozen-coefficient solve for lambda^{n+1/3}.

    Solves gamma1 lam - c1 grad^+ div^- lam = lambda_rhs(...) for every
    channel by inverting the 2x2 symbol at each frequency.
    """
    lambda_n = np.asarray(lambda_n, dtype=float)
    g = np.asarray(g, dtype=float)
    _check_finite(lambda_n, g)
    if not np.all(g > 0):
        raise ValueError("g must be positive at every pixel")
    plan = _plan_for(lambda_n, cfg.h, plan)

    c1 = frozen_c1(g, cfg)
    w = lambda_rhs(lambda_n, g, cfg, c1)
    a11, a12, a21, a22 = plan.lambda_symbols(cfg.gamma1, c1)
    det = a11 * a22 - a12 * a21
    if np.any(np.abs(det) == 0):
        raise SingularSymbolError("singular lambda system symbol")

    w1 = fft2(w[:, 0])
    w2 = fft2(w[:, 1])
    lam1 = (a22 * w1 - a12 * w2) / det
    lam2 = (-a21 * w1 + a11 * w2) / det
    return np.stack([np.real(ifft2(lam1)), np.real(ifft2(lam2))], axis=1)


def solve_helmholtz(b, eta, tau, plan=None, h=1.0):
    """Solve -eta div^- grad^+ u + tau u = b on the periodic grid."""
    b = np.asarray(b, dtype=float)
    _check_finite(b)
    plan = _plan_for(b, h, plan)
    return np.real(ifft2(fft2(b) / plan.helmholtz_symbol(eta, tau)))


def solve_helmholtz_deblur(b, kernel, eta, tau, plan=None, h=1.0):
    """Solve -eta div^- grad^+ u + tau K*K u = b on the periodic grid."""
    b = np.asarray(b, dtype=float)
    _check_finite(b)
    plan = _plan_for(b, h, plan)
    K = kernel.response(*b.shape[-2:])
    sym = plan.helmholtz_symbol(eta, tau, np.real(K * np.conj(K)))
    zero = np.abs(sym) <= 1e-14 * np.max(np.abs(sym))
    if np.any(zero):
        l, k = (int(i) for i in np.argwhere(zero)[0])
        raise SingularSymbolError(
            f"deblurring symbol vanishes at frequency (row {l}, col {k}); the kernel removes it",
            frequency=(l, k),
        )
    return np.real(ifft2(fft2(b) / sym))


def reconstruct_from_gradient(q, f, plan=None, h=1.0):
    """Periodic v with div^- grad^+ v_k = div^- q_k and mean(v_k) = mean(f_k)."""
    q = np.asarray(q, dtype=float)
    f = np.asarray(getattr(f, "data", f), dtype=float)
    plan = _plan_for(f, h, plan)
    rhs = fft2(div_minus(q, h))
    lap = plan.laplacian.copy()
    lap[0, 0] = 1.0
    v_hat = rhs / lap
    v_hat[..., 0, 0] = np.sum(f, axis=(-2, -1))
    return np.real(ifft2(v_hat))
