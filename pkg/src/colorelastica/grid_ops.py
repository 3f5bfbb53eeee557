"""Periodic finite differences on the image grid.

Fields are stored in raster order: the last two array axes are
(x2, x1) = (rows, columns), so a field on an M x N grid (M along x1,
N along x2) has shape ``(..., N, M)``.  Every operator wraps around
both axes.

Only ``grad_plus`` and ``div_minus`` are used by the solver; they are
negative adjoints of each other and ``div_minus(grad_plus(f))`` is the
5-point periodic Laplacian.
"""

import numpy as np

H = 1.0

# x1 runs along columns, x2 along rows
_AXES = {1: -1, 2: -2}


def _array_axis(axis):
    try:
        return _AXES[axis]
    except KeyError:
        raise ValueError(f"axis must be 1 or 2, got {axis!r}") from None


def forward_diff(f, axis, h=H):
    """(f(i+1) - f(i)) / h along x1 (``axis=1``) or x2 (``axis=2``)."""
    ax = _array_axis(axis)
    f = np.asarray(f, dtype=float)
    return (np.roll(f, -1, axis=ax) - f) / h


def backward_diff(f, axis, h=H):
    """(f(i) - f(i-1)) / h along x1 (``axis=1``) or x2 (``axis=2``)."""
    ax = _array_axis(axis)
    f = np.asarray(f, dtype=float)
    return (f - np.roll(f, 1, axis=ax)) / h


def grad_plus(f, h=H):
    """Forward-difference gradient.

    A field of shape ``(..., N, M)`` maps to ``(..., 2, N, M)`` with the
    x1 derivative in component 0 and the x2 derivative in component 1.
    """
    return np.stack([forward_diff(f, 1, h), forward_diff(f, 2, h)], axis=-3)


def div_minus(p, h=H):
    """Backward-difference divergence of a ``(..., 2, N, M)`` field."""
    p = np.asarray(p, dtype=float)
    if p.ndim < 3 or p.shape[-3] != 2:
        raise ValueError(f"expected a (..., 2, N, M) vector field, got shape {p.shape}")
    return backward_diff(p[..., 0, :, :], 1, h) + backward_diff(p[..., 1, :, :], 2, h)


def laplacian(f, h=H):
    """5-point periodic Laplacian, ``div_minus(grad_plus(f))``."""
    return div_minus(grad_plus(f, h), h)
