"""Dense decompositions with a fixed sign convention.

LAPACK factorizations are unique only up to the sign of each singular or
eigen vector (and up to an arbitrary basis inside repeated-value
subspaces).  Downstream code compares matrices bitwise across repeated
runs, so every decomposition here applies one deterministic convention:
in each vector the entry of largest magnitude is made nonnegative, ties
broken by the lowest row index.  Exactly repeated values keep whatever
basis LAPACK returns; results are therefore reproducible on a single
platform but may differ across BLAS builds.
"""

from typing import NamedTuple

import numpy as np

from .exceptions import InvalidInputError
from .validation import as_matrix, check_symmetric

__all__ = ["SvdResult", "SymEigResult", "svd", "sym_eig_desc", "fro_norm"]


class SvdResult(NamedTuple):
    """Thin singular value decomposition ``m = u @ diag(singulars) @ v.T``."""

    u: np.ndarray
    singulars: np.ndarray
    v: np.ndarray


class SymEigResult(NamedTuple):
    """Symmetric eigendecomposition with eigenvalues in descending order."""

    eigvals: np.ndarray
    eigvecs: np.ndarray


def _fix_signs(u, v=None):
    """Flip column signs so each column's largest-magnitude entry is >= 0.

    When ``v`` is given its columns are flipped together with those of
    ``u`` so that products of the form ``u @ diag(s) @ v.T`` are
    preserved.
    """
    idx = np.argmax(np.abs(u), axis=0)
    signs = np.sign(u[idx, np.arange(u.shape[1])])
    signs[signs == 0] = 1.0
    if v is None:
        return u * signs
    return u * signs, v * signs


def svd(m):
    """Thin SVD of a dense matrix with deterministic vector signs.

    Parameters
    ----------
    m : array_like
        Finite matrix of shape ``(rows, cols)``.

    Returns
    -------
    SvdResult
        ``u`` is ``(rows, k)``, ``singulars`` is ``(k,)`` nonincreasing and
        nonnegative, ``v`` is ``(cols, k)``, with ``k = min(rows, cols)``.
    """
    m = as_matrix(m, "svd input")
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    u, v = _fix_signs(u, vh.T)
    return SvdResult(u, s, v)


def sym_eig_desc(m, asym_tol=1e-12):
    """Eigendecomposition of a symmetric matrix, eigenvalues descending.

    The input must be square and symmetric within ``asym_tol`` (relative);
    it is symmetrised as ``(m + m.T) / 2`` before factorization so that
    the result does not depend on which triangle carried the rounding
    noise.

    Returns
    -------
    SymEigResult
        ``eigvals`` nonincreasing, ``eigvecs`` orthonormal columns ordered
        accordingly, signs fixed as in :func:`svd`.
    """
    m = as_matrix(m, "eig input")
    sym = check_symmetric(m, asym_tol, "eig input")
    w, q = np.linalg.eigh(sym)
    order = np.arange(w.size - 1, -1, -1)
    return SymEigResult(w[order].copy(), _fix_signs(q[:, order]))


def fro_norm(m):
    """Frobenius norm: the square root of the sum of squared entries."""
    m = as_matrix(m, "norm input")
    return float(np.linalg.norm(m))


def _require_rows_le_cols(m, name):
    if m.shape[0] > m.shape[1]:
        raise InvalidInputError(
            f"{name} must have at least as many columns as rows, "
            f"got shape {m.shape}"
        )
    return m
