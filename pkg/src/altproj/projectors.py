"""Orthogonal projectors onto the built-in constraint sets.

Each projector is a stateless, estimator-style object: :meth:`project`
maps a point to a nearest member of the set and :meth:`contains` is the
matching feasibility test.  ``fit`` / ``transform`` aliases are provided
so projectors compose with scikit-learn pipelines, but no projector has
anything to learn.

All projectors accept dense 2-d arrays (1-d input is treated as a single
column) and return new arrays; inputs are never modified in place.
"""

import numpy as np
from sklearn.base import BaseEstimator

from .exceptions import InvalidInputError
from .linalg import svd, sym_eig_desc, _require_rows_le_cols
from .validation import as_matrix, check_shape, check_symmetric, column_norms

__all__ = [
    "Projector",
    "BoxProjector",
    "HalfspaceProjector",
    "AffineProjector",
    "ColumnNormProjector",
    "TightFrameProjector",
    "GramTightProjector",
    "CoherenceProjector",
]


class Projector(BaseEstimator):
    """Base class: a named nearest-point map with a membership test.

    Subclasses implement :meth:`project`; the default :meth:`contains`
    declares ``z`` a member when its distance to the set is within
    ``tol``.  ``ambient_shape`` is the expected ``(rows, cols)`` of the
    arguments, or ``None`` when any shape is accepted.
    """

    name = "projector"

    @property
    def ambient_shape(self):
        return None

    def project(self, z):
        raise NotImplementedError

    def contains(self, z, tol=1e-8):
        z = self._validate(z)
        return bool(np.linalg.norm(z - self.project(z)) <= tol)

    # scikit-learn compatibility; projectors carry no fitted state.
    def fit(self, X=None, y=None):
        return self

    def transform(self, X):
        return self.project(X)

    def _validate(self, z):
        z = as_matrix(z, f"{self.name} projector input")
        return check_shape(z, self.ambient_shape, f"{self.name} projector input")


class BoxProjector(Projector):
    """Entrywise clamp onto ``{z : lower <= z <= upper}``.

    Bounds may be scalars (any input shape accepted) or arrays, in which
    case their broadcast shape fixes the ambient shape.
    """

    name = "box"

    def __init__(self, lower, upper):
        lo = np.asarray(lower, dtype=float)
        hi = np.asarray(upper, dtype=float)
        if lo.ndim == 1:
            lo = lo.reshape(-1, 1)
        if hi.ndim == 1:
            hi = hi.reshape(-1, 1)
        if not (np.isfinite(lo).all() and np.isfinite(hi).all()):
            raise InvalidInputError("box bounds must be finite")
        if lo.ndim == 0 and hi.ndim == 0:
            self._shape = None
        else:
            shape = np.broadcast_shapes(lo.shape, hi.shape)
            if len(shape) != 2:
                raise InvalidInputError(
                    f"box bounds must broadcast to a matrix, got shape {shape}"
                )
            lo = np.broadcast_to(lo, shape).copy()
            hi = np.broadcast_to(hi, shape).copy()
            self._shape = shape
        if np.any(lo > hi):
            raise InvalidInputError("box requires lower <= upper entrywise")
        self.lower = lo
        self.upper = hi

    @property
    def ambient_shape(self):
        return self._shape

    def project(self, z):
        z = self._validate(z)
        return np.clip(z, self.lower, self.upper)

    def contains(self, z, tol=1e-8):
        z = self._validate(z)
        return bool(
            np.all(z >= self.lower - tol) and np.all(z <= self.upper + tol)
        )


class HalfspaceProjector(Projector):
    """Projection onto ``{z : <normal, z> <= offset}``.

    The inner product is the Frobenius pairing, so matrices work as well
    as vectors.  Membership in :meth:`contains` is measured as Euclidean
    distance to the halfspace, i.e. ``max(0, <n,z> - b) / ||n||``.
    """

    name = "halfspace"

    def __init__(self, normal, offset):
        n = as_matrix(normal, "halfspace normal")
        nsq = float(np.vdot(n, n))
        if nsq == 0.0:
            raise InvalidInputError("halfspace normal must be nonzero")
        self.normal = n
        self.offset = float(offset)
        if not np.isfinite(self.offset):
            raise InvalidInputError("halfspace offset must be finite")
        self._nsq = nsq
        self._nnorm = np.sqrt(nsq)

    @property
    def ambient_shape(self):
        return self.normal.shape

    def project(self, z):
        z = self._validate(z)
        excess = float(np.vdot(self.normal, z)) - self.offset
        if excess <= 0.0:
            return z.copy()
        return z - (excess / self._nsq) * self.normal

    def contains(self, z, tol=1e-8):
        z = self._validate(z)
        excess = float(np.vdot(self.normal, z)) - self.offset
        return bool(max(excess, 0.0) / self._nnorm <= tol)


class AffineProjector(Projector):
    """Projection onto ``point + span(basis columns)``.

    Operates on column vectors shaped ``(dim, 1)``.  The basis columns
    must be linearly independent; they are orthonormalised once at
    construction.
    """

    name = "affine"

    def __init__(self, basis, point):
        b = as_matrix(basis, "affine basis")
        p = as_matrix(point, "affine point")
        if p.shape != (b.shape[0], 1):
            raise InvalidInputError(
                f"affine point must have shape ({b.shape[0]}, 1), got {p.shape}"
            )
        if b.shape[1] > b.shape[0]:
            raise InvalidInputError("affine basis has more columns than rows")
        sv = np.linalg.svd(b, compute_uv=False)
        if sv[-1] <= 1e-12 * max(1.0, sv[0]):
            raise InvalidInputError("affine basis columns are linearly dependent")
        self.basis = b
        self.point = p
        self._q = np.linalg.qr(b)[0]

    @property
    def ambient_shape(self):
        return self.point.shape

    def project(self, z):
        z = self._validate(z)
        shifted = z - self.point
        return self.point + self._q @ (self._q.T @ shifted)


class ColumnNormProjector(Projector):
    """Rescale each column onto the sphere of prescribed squared norm.

    ``targets[j]`` is the required squared norm of column ``j``; columns
    are scaled to norm ``sqrt(targets[j])``.  An exactly zero column has
    no unique nearest point; the convention here maps it to
    ``sqrt(targets[j]) * e_1``.
    """

    name = "column-norms"

    def __init__(self, targets):
        t = np.asarray(targets, dtype=float).ravel()
        if t.size < 1:
            raise InvalidInputError("column-norm targets must be nonempty")
        if not np.isfinite(t).all() or np.any(t <= 0.0):
            raise InvalidInputError("column-norm targets must be finite and positive")
        self.targets = t
        self._roots = np.sqrt(t)

    def project(self, z):
        z = self._validate(z)
        self._check_cols(z)
        norms = column_norms(z)
        zero = norms == 0.0
        out = z * (self._roots / np.where(zero, 1.0, norms))
        if zero.any():
            out[:, zero] = 0.0
            out[0, zero] = self._roots[zero]
        return out

    def contains(self, z, tol=1e-8):
        z = self._validate(z)
        if z.shape[1] != self.targets.size:
            return False
        return bool(np.max(np.abs(column_norms(z) - self._roots)) <= tol)

    def _check_cols(self, z):
        if z.shape[1] != self.targets.size:
            raise InvalidInputError(
                f"expected {self.targets.size} columns, got {z.shape[1]}"
            )


class TightFrameProjector(Projector):
    """Nearest frame with ``D @ D.T = a * I``.

    For input with thin SVD ``u @ diag(s) @ v.T`` the nearest such frame
    is ``sqrt(a) * u @ v.T``.  When singular values repeat or vanish the
    nearest point is not unique; the decomposition convention of
    :func:`altproj.linalg.svd` picks one deterministically.
    """

    name = "tight-frame"

    def __init__(self, a, shape=None):
        a = float(a)
        if not np.isfinite(a) or a <= 0.0:
            raise InvalidInputError("tight-frame parameter a must be positive")
        if shape is not None:
            shape = (int(shape[0]), int(shape[1]))
            if shape[0] > shape[1]:
                raise InvalidInputError("tight frames need rows <= cols")
        self.a = a
        self.shape = shape

    @property
    def ambient_shape(self):
        return self.shape

    def project(self, z):
        z = self._validate(z)
        _require_rows_le_cols(z, "tight-frame input")
        res = svd(z)
        return np.sqrt(self.a) * (res.u @ res.v.T)

    def contains(self, z, tol=1e-8):
        z = self._validate(z)
        if z.shape[0] > z.shape[1]:
            return False
        rows = z.shape[0]
        resid = np.linalg.norm(z @ z.T - self.a * np.eye(rows))
        return bool(resid <= tol * self.a * np.sqrt(rows))


class GramTightProjector(Projector):
    """Nearest Gram matrix of an ``a``-tight frame of rank ``n``.

    The target set holds the symmetric ``l x l`` matrices with eigenvalues
    ``(a, ..., a, 0, ..., 0)`` (``n`` copies of ``a``).  Projection keeps
    the top-``n`` eigenvectors of the (symmetrised) input and sets their
    eigenvalues to ``a``.  When the input's ``n``-th and ``(n+1)``-th
    eigenvalues coincide exactly the nearest point is not unique; a valid
    projection is still returned and :meth:`project_info` flags the tie.
    """

    name = "gram-tight"

    def __init__(self, n, a, asym_tol=1e-8):
        n = int(n)
        a = float(a)
        if n < 1:
            raise InvalidInputError("gram-tight rank n must be at least 1")
        if not np.isfinite(a) or a <= 0.0:
            raise InvalidInputError("gram-tight parameter a must be positive")
        self.n = n
        self.a = a
        self.asym_tol = float(asym_tol)

    def project_info(self, z):
        """Project and report the eigen-gap at the cut.

        Returns ``(g, info)`` where ``info`` has keys ``eigen_gap`` (the
        gap between the ``n``-th and ``(n+1)``-th eigenvalues of the
        input, ``inf`` when ``n`` equals the side length) and
        ``degenerate_tie`` (True when that gap is exactly zero, making
        the nearest point non-unique).
        """
        z = self._validate(z)
        sym = check_symmetric(z, self.asym_tol, "gram-tight input")
        if self.n > sym.shape[0]:
            raise InvalidInputError(
                f"rank n={self.n} exceeds matrix side {sym.shape[0]}"
            )
        w, q = sym_eig_desc(sym)
        top = q[:, : self.n]
        g = self.a * (top @ top.T)
        g = (g + g.T) / 2.0
        if self.n < sym.shape[0]:
            gap = float(w[self.n - 1] - w[self.n])
        else:
            gap = np.inf
        return g, {"eigen_gap": gap, "degenerate_tie": gap == 0.0}

    def project(self, z):
        return self.project_info(z)[0]

    def contains(self, z, tol=1e-8):
        z = self._validate(z)
        if z.shape[0] != z.shape[1] or self.n > z.shape[0]:
            return False
        if np.linalg.norm(z - z.T) > tol * (1.0 + np.linalg.norm(z)):
            return False
        w = np.linalg.eigvalsh((z + z.T) / 2.0)[::-1]
        dev = np.max(np.abs(w[: self.n] - self.a))
        if self.n < z.shape[0]:
            dev = max(dev, np.max(np.abs(w[self.n :])))
        return bool(dev <= tol * max(1.0, self.a))


class CoherenceProjector(Projector):
    """Projection onto the symmetric matrices with unit diagonal and
    off-diagonal entries bounded by ``xi`` in absolute value.

    The set is a product of intervals in the entries, so the projection
    is exact and entrywise: clip the off-diagonal to ``[-xi, xi]`` and
    reset the diagonal to one.  ``xi = 0`` is allowed (the set then
    contains only the identity), matching square frames where the
    coherence target is zero.
    """

    name = "gram-coherence"

    def __init__(self, xi, asym_tol=1e-8):
        xi = float(xi)
        if not np.isfinite(xi) or xi < 0.0 or xi >= 1.0:
            raise InvalidInputError("coherence bound xi must lie in [0, 1)")
        self.xi = xi
        self.asym_tol = float(asym_tol)

    def project(self, z):
        z = self._validate(z)
        sym = check_symmetric(z, self.asym_tol, "coherence input")
        out = np.clip(sym, -self.xi, self.xi)
        np.fill_diagonal(out, 1.0)
        return out

    def contains(self, z, tol=1e-8):
        z = self._validate(z)
        if z.shape[0] != z.shape[1]:
            return False
        if np.linalg.norm(z - z.T) > tol * (1.0 + np.linalg.norm(z)):
            return False
        if np.max(np.abs(np.diagonal(z) - 1.0)) > tol:
            return False
        off = z.copy()
        np.fill_diagonal(off, 0.0)
        return bool(np.max(np.abs(off)) <= self.xi + tol)
