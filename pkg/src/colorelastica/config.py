"""Solver parameters."""

import math
from dataclasses import dataclass, field

STOP_NORMS = ("l2", "linf")
INIT_MODES = ("input", "zeros")


@dataclass(frozen=True)
class NewtonSettings:
    """Stopping rules for the pointwise Newton solve of the p-subproblem.

    ``accept_nonconverged`` keeps the last iterate at pixels that did not
    meet ``tol`` within ``max_iters`` instead of raising.
    """

    tol: float = 1e-6
    max_iters: int = 50
    hessian_floor: float = 1e-8
    accept_nonconverged: bool = False

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError(f"newton tol must be positive, got {self.tol}")
        if self.max_iters < 1:
            raise ValueError(f"newton max_iters must be >= 1, got {self.max_iters}")
        if not self.hessian_floor > 0:
            raise ValueError(f"hessian_floor must be positive, got {self.hessian_floor}")


@dataclass(frozen=True)
class SolverConfig:
    """Model weights and splitting-scheme parameters.

    alpha   space/color scaling in the induced metric
    beta    weight of the squared Laplace-Beltrami term
    eta     fidelity weight; the data term is (1/2 eta) |u - f|^2
    tau     artificial time step
    gamma1  relaxation speed of lambda
    gamma2  relaxation speed of the metric G
    """

    alpha: float = 0.01
    beta: float = 0.005
    eta: float = 0.5
    tau: float = 0.05
    gamma1: float = 1.0
    gamma2: float = 3.0
    stop_tol: float = 1e-2
    stop_norm: str = "l2"
    max_outer_iters: int = 500
    newton: NewtonSettings = field(default_factory=NewtonSettings)
    init_mode: str = "input"
    h: float = 1.0

    def __post_init__(self):
        for name in ("alpha", "eta", "tau", "gamma1", "gamma2", "stop_tol", "h"):
            value = getattr(self, name)
            if not value > 0:
                raise ValueError(f"{name} must be positive, got {value}")
        if not self.beta >= 0:
            raise ValueError(f"beta must be non-negative, got {self.beta}")
        if self.stop_norm not in STOP_NORMS:
            raise ValueError(f"stop_norm must be one of {STOP_NORMS}, got {self.stop_norm!r}")
        if self.init_mode not in INIT_MODES:
            raise ValueError(f"init_mode must be one of {INIT_MODES}, got {self.init_mode!r}")
        if self.max_outer_iters < 1:
            raise ValueError(f"max_outer_iters must be >= 1, got {self.max_outer_iters}")

    @property
    def blend_weight(self):
        """Weight exp(-gamma2 tau / 3) kept on the old metric at each blend."""
        return math.exp(-self.gamma2 * self.tau / 3.0)
