"""Input validation helpers used by the public entry points.

All numerical routines in this package work on dense 2-d float64 arrays.
The helpers here coerce and check inputs once, at the boundary, so the
kernels themselves can stay free of defensive code.
"""

import numpy as np

from .exceptions import InvalidInputError

__all__ = ["as_matrix", "check_shape", "check_symmetric", "column_norms"]


def as_matrix(z, name="input"):
    """Coerce ``z`` to a finite 2-d float64 array.

    1-d input is reshaped to a single column so plain vectors can be fed
    to projectors that operate on matrices.

    Parameters
    ----------
    z : array_like
        Scalar collections are rejected; only 1-d or 2-d data is accepted.
    name : str
        Label used in error messages.

    Returns
    -------
    numpy.ndarray
        A float64 array of shape ``(rows, cols)`` with ``rows, cols >= 1``.
    """
    m = np.asarray(z, dtype=float)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2:
        raise InvalidInputError(f"{name} must be 1-d or 2-d, got {m.ndim}-d")
    if m.shape[0] < 1 or m.shape[1] < 1:
        raise InvalidInputError(f"{name} must be nonempty, got shape {m.shape}")
    if not np.isfinite(m).all():
        raise InvalidInputError(f"{name} must be finite (contains NaN or Inf)")
    return m


def check_shape(m, shape, name="input"):
    """Raise unless ``m.shape`` equals ``shape`` (``None`` accepts anything)."""
    if shape is not None and tuple(m.shape) != tuple(shape):
        raise InvalidInputError(
            f"{name} has shape {m.shape}, expected {tuple(shape)}"
        )
    return m


def check_symmetric(m, tol, name="input"):
    """Validate symmetry and return the symmetrised matrix ``(m + m.T) / 2``.

    Asymmetry is measured relative to the scale of the matrix:
    ``||m - m.T||_F <= tol * (1 + ||m||_F)``.
    """
    if m.shape[0] != m.shape[1]:
        raise InvalidInputError(f"{name} must be square, got shape {m.shape}")
    asym = np.linalg.norm(m - m.T)
    if asym > tol * (1.0 + np.linalg.norm(m)):
        raise InvalidInputError(
            f"{name} is not symmetric within tolerance "
            f"(asymmetry {asym:.3e}, tol {tol:.1e})"
        )
    return (m + m.T) / 2.0


def column_norms(m):
    """Euclidean norm of each column of a 2-d array."""
    return np.linalg.norm(m, axis=0)
