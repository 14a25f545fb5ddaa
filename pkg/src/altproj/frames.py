"""Finite-frame metrics and the two alternating-projection design pipelines.

A frame here is a dense ``n x l`` matrix (``n <= l``) whose columns are
the frame vectors.  The first pipeline designs tight frames with
prescribed column norms by alternating between the tight frames and the
column-norm sphere product; the second designs equiangular tight frames
(ETFs) in the Gram domain, alternating between the Gram matrices of
tight unit-norm frames and the symmetric matrices with unit diagonal and
off-diagonal entries no larger than the Welch bound.
"""

import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator

from .engine import IterateTrace, RunConfig, run_alternating_projections
from .exceptions import InvalidInputError, RankDeficiencyError
from .linalg import sym_eig_desc
from .projectors import (
    ColumnNormProjector,
    CoherenceProjector,
    GramTightProjector,
    TightFrameProjector,
)
from .validation import as_matrix, check_symmetric

__all__ = [
    "welch_bound",
    "mutual_coherence",
    "tight_parameter",
    "tightness_residual",
    "eigen_gap",
    "extract_frame_from_gram",
    "EtfCertificate",
    "check_etf_initialization",
    "first_certified_iteration",
    "FrameDesignConfig",
    "FrameDesignResult",
    "design_prescribed_norm_frame",
    "design_etf",
    "real_etf_known_to_exist",
    "PrescribedNormFrameDesign",
    "EquiangularFrameDesign",
]


def welch_bound(n, l):
    """Lower bound on the coherence of ``l`` unit vectors in dimension ``n``.

    Equals ``sqrt((l - n) / (n * (l - 1)))``; zero when ``l == n``
    (orthonormal bases).  Requires ``1 <= n <= l`` and ``l >= 2``.
    """
    n = int(n)
    l = int(l)
    if l < 2 or n < 1 or n > l:
        raise InvalidInputError(f"welch_bound needs 1 <= n <= l and l >= 2, got ({n}, {l})")
    return math.sqrt((l - n) / (n * (l - 1.0)))


def mutual_coherence(d):
    """Largest normalized inner product between distinct columns.

    Columns are normalized before comparison, so the result does not
    depend on the column scales.  Requires at least two columns, none of
    them zero.  The value is clipped into ``[0, 1]`` to absorb rounding.
    """
    d = as_matrix(d, "frame")
    if d.shape[1] < 2:
        raise InvalidInputError("coherence needs at least two columns")
    norms = np.linalg.norm(d, axis=0)
    if np.any(norms == 0.0):
        raise InvalidInputError("coherence is undefined for zero columns")
    g = (d / norms).T @ (d / norms)
    np.fill_diagonal(g, 0.0)
    return float(min(np.max(np.abs(g)), 1.0))


def tight_parameter(c, n):
    """Tightness constant implied by squared column norms: ``sum(c) / n``."""
    c = np.asarray(c, dtype=float).ravel()
    if c.size == 0 or not np.isfinite(c).all() or np.any(c <= 0.0):
        raise InvalidInputError("squared column norms must be finite and positive")
    if int(n) < 1:
        raise InvalidInputError("dimension n must be at least 1")
    return float(c.sum() / int(n))


def tightness_residual(d, a):
    """Frobenius distance of ``d @ d.T`` from ``a * I``."""
    d = as_matrix(d, "frame")
    a = float(a)
    return float(np.linalg.norm(d @ d.T - a * np.eye(d.shape[0])))


def eigen_gap(h, n):
    """Gap between the ``n``-th and ``(n+1)``-th eigenvalues of a symmetric matrix.

    Eigenvalues are counted in descending order, 1-indexed; ``n`` must be
    strictly smaller than the side length for the gap to exist.
    """
    h = as_matrix(h, "eigen-gap input")
    sym = check_symmetric(h, 1e-8, "eigen-gap input")
    n = int(n)
    if not 1 <= n < sym.shape[0]:
        raise InvalidInputError(
            f"need 1 <= n < side length {sym.shape[0]}, got n={n}"
        )
    w, _ = sym_eig_desc(sym)
    return float(w[n - 1] - w[n])


def extract_frame_from_gram(g, n, a):
    """Factor a Gram matrix into an ``n x l`` frame scaled to tightness ``a``.

    Uses the top-``n`` eigenvectors: ``d = sqrt(a) * U_n.T``, so
    ``d.T @ d`` reproduces the rank-``n`` spectral truncation of ``g``
    with its eigenvalues replaced by ``a``.  The ``n``-th eigenvalue must
    exceed 1e-12, otherwise the Gram matrix does not carry rank ``n``.
    """
    g = as_matrix(g, "gram")
    sym = check_symmetric(g, 1e-8, "gram")
    n = int(n)
    if not 1 <= n <= sym.shape[0]:
        raise InvalidInputError(f"rank n={n} out of range for side {sym.shape[0]}")
    a = float(a)
    if a <= 0.0:
        raise InvalidInputError("tightness a must be positive")
    w, q = sym_eig_desc(sym)
    if w[n - 1] <= 1e-12:
        raise RankDeficiencyError(
            f"gram matrix is rank deficient: eigenvalue {n} is {w[n - 1]:.3e}"
        )
    return math.sqrt(a) * q[:, :n].T


@dataclass(frozen=True)
class EtfCertificate:
    """Outcome of the ETF convergence test ``nu = l^2/(2 n^2) - ||G - H||_F^2``.

    A strictly positive ``nu`` certifies convergence of the Gram
    alternation and bounds the spectral gap of every later Y-side
    iterate by ``eigen_gap_bound = nu / a``.  ``iteration`` is None when
    the certificate was evaluated on the start pair, otherwise the first
    recorded iteration at which it fired.
    """

    nu: float
    eigen_gap_bound: float | None
    certified: bool
    iteration: int | None = None


def check_etf_initialization(g0, h0, n, l):
    """Evaluate the convergence certificate on a start pair ``(g0, h0)``."""
    g0 = as_matrix(g0, "g0")
    h0 = as_matrix(h0, "h0")
    n = int(n)
    l = int(l)
    if g0.shape != (l, l) or h0.shape != (l, l):
        raise InvalidInputError(f"g0 and h0 must be {l} x {l}")
    if not 1 <= n <= l:
        raise InvalidInputError(f"need 1 <= n <= l, got ({n}, {l})")
    nu = float(l * l / (2.0 * n * n) - np.linalg.norm(g0 - h0) ** 2)
    certified = nu > 0.0
    return EtfCertificate(
        nu=nu,
        eigen_gap_bound=nu / (l / n) if certified else None,
        certified=certified,
        iteration=None,
    )


def first_certified_iteration(trace, n, l):
    """First recorded iteration where the ETF certificate fires mid-run.

    Scans records ``k >= 1`` (where ``f`` is the squared Gram pair gap)
    for ``f < l^2 / (2 n^2)`` and returns the certificate anchored
    there, or None if the run never certifies.
    """
    threshold = l * l / (2.0 * n * n)
    for rec in trace.records:
        if rec.k >= 1 and rec.f < threshold:
            nu = float(threshold - rec.f)
            return EtfCertificate(
                nu=nu,
                eigen_gap_bound=nu / (l / n),
                certified=True,
                iteration=int(rec.k),
            )
    return None


def real_etf_known_to_exist(n, l):
    """Whether a real ETF of the given size is in the known catalogue.

    Covers orthonormal bases (``l == n``), regular simplices
    (``l == n + 1``) and the small conference-matrix sizes.  Returns
    False for sizes outside the catalogue, which does not imply
    nonexistence.
    """
    return l == n or l == n + 1 or (n, l) in {(3, 6), (5, 10), (7, 14)}


@dataclass(frozen=True)
class FrameDesignConfig:
    """Problem statement for either design pipeline.

    ``c`` holds the squared column norms (None means all ones);
    ``run`` carries the engine options.
    """

    n: int
    l: int
    c: tuple | None = None
    seed: int = 0
    run: RunConfig = field(default_factory=RunConfig)

    def __post_init__(self):
        if not 1 <= int(self.n) <= int(self.l):
            raise InvalidInputError(f"need 1 <= n <= l, got ({self.n}, {self.l})")
        if self.c is not None:
            c = np.asarray(self.c, dtype=float).ravel()
            if c.size != int(self.l):
                raise InvalidInputError(
                    f"c must list {self.l} squared norms, got {c.size}"
                )
            if not np.isfinite(c).all() or np.any(c <= 0.0):
                raise InvalidInputError("squared column norms must be positive")
            object.__setattr__(self, "c", tuple(float(v) for v in c))

    def column_targets(self):
        if self.c is None:
            return np.ones(int(self.l))
        return np.asarray(self.c, dtype=float)


@dataclass
class FrameDesignResult:
    """Designed frame plus the run evidence.

    ``d`` is the frame (X-side limit), ``s_or_h`` the Y-side limit
    (column-norm matrix or coherence-feasible Gram matrix), ``gap``
    their Frobenius distance.  The two certificate fields are populated
    by the ETF pipeline only.
    """

    d: np.ndarray
    s_or_h: np.ndarray
    trace: IterateTrace
    coherence: float
    tightness_residual: float
    gap: float
    initial_certificate: EtfCertificate | None = None
    midrun_certificate: EtfCertificate | None = None


def design_prescribed_norm_frame(config):
    """Design a tight frame whose columns have prescribed squared norms.

    Alternates between the set of ``a``-tight ``n x l`` frames
    (``a = sum(c) / n``) and the product of column spheres.  The start is
    a seeded standard-normal draw projected onto the column spheres,
    redrawn until its smallest singular value clears 1e-6 so the
    nondegeneracy guards apply.
    """
    c = config.column_targets()
    a = tight_parameter(c, config.n)
    if c.max() > a:
        # the tight Gram spectrum is (a, ..., a, 0, ..., 0); a diagonal
        # entry above a cannot be majorized by it, so the target set is
        # empty and the alternation would stall at a positive gap
        raise InvalidInputError(
            "infeasible norm targets: max(c) must not exceed sum(c) / n"
        )
    px = TightFrameProjector(a, shape=(int(config.n), int(config.l)))
    py = ColumnNormProjector(c)
    rng = np.random.default_rng(config.seed)
    for _ in range(100):
        s0 = py.project(rng.standard_normal((int(config.n), int(config.l))))
        if np.linalg.svd(s0, compute_uv=False)[-1] > 1e-6:
            break
    else:
        raise RankDeficiencyError("could not draw a full-rank start")
    trace = run_alternating_projections(px, py, s0, config.run)
    d = trace.final_x
    return FrameDesignResult(
        d=d,
        s_or_h=trace.final_y,
        trace=trace,
        coherence=mutual_coherence(d),
        tightness_residual=tightness_residual(d, a),
        gap=float(np.linalg.norm(trace.final_x - trace.final_y)),
    )


def design_etf(config):
    """Search for an equiangular tight frame by Gram-domain alternation.

    The X-side set holds the Gram matrices of ``a``-tight unit-norm
    frames (``a = l / n``); the Y-side set bounds the off-diagonal by
    the Welch bound.  The start is a seeded random symmetric matrix
    projected onto the X-side set, then onto the Y-side set.  The
    eigen-gap of every Y-side iterate is recorded as an extra metric
    (when ``n < l``), and both the start certificate and the first
    mid-run certificate are reported.  The returned frame is extracted
    from the final Gram iterate; its coherence is measured after column
    normalization.
    """
    if config.c is not None and not np.all(config.column_targets() == 1.0):
        raise InvalidInputError("the equiangular pipeline assumes unit column norms")
    n = int(config.n)
    l = int(config.l)
    xi = welch_bound(n, l)
    a = l / n
    gram_proj = GramTightProjector(n, a)
    coh_proj = CoherenceProjector(xi)

    rng = np.random.default_rng(config.seed)
    z = rng.standard_normal((l, l))
    g0 = gram_proj.project((z + z.T) / 2.0)
    h0 = coh_proj.project(g0)
    initial_certificate = check_etf_initialization(g0, h0, n, l)

    run = config.run
    if n < l:
        metrics = tuple(run.extra_metrics) + (
            ("eigen_gap", lambda x, y: eigen_gap(y, n)),
        )
        run = dataclasses.replace(run, extra_metrics=metrics)
    trace = run_alternating_projections(gram_proj, coh_proj, h0, run)

    d = extract_frame_from_gram(trace.final_x, n, a)
    return FrameDesignResult(
        d=d,
        s_or_h=trace.final_y,
        trace=trace,
        coherence=mutual_coherence(d),
        tightness_residual=tightness_residual(d, a),
        gap=float(np.linalg.norm(trace.final_x - trace.final_y)),
        initial_certificate=initial_certificate,
        midrun_certificate=first_certified_iteration(trace, n, l),
    )


class PrescribedNormFrameDesign(BaseEstimator):
    """Estimator facade for :func:`design_prescribed_norm_frame`.

    ``fit()`` runs the pipeline; the designed frame lands in ``frame_``
    with the full :class:`FrameDesignResult` in ``result_``.
    """

    def __init__(self, n, l, c=None, seed=0, max_iter=10000, tol=1e-6,
                 record_every=1, record_iterates=False):
        self.n = n
        self.l = l
        self.c = c
        self.seed = seed
        self.max_iter = max_iter
        self.tol = tol
        self.record_every = record_every
        self.record_iterates = record_iterates

    def fit(self, X=None, y=None):
        cfg = FrameDesignConfig(
            n=self.n, l=self.l, c=self.c, seed=self.seed,
            run=RunConfig(
                max_iter=self.max_iter, tol=self.tol,
                record_every=self.record_every,
                record_iterates=self.record_iterates,
            ),
        )
        result = design_prescribed_norm_frame(cfg)
        self.result_ = result
        self.frame_ = result.d
        self.trace_ = result.trace
        self.coherence_ = result.coherence
        self.gap_ = result.gap
        return self


class EquiangularFrameDesign(BaseEstimator):
    """Estimator facade for :func:`design_etf`."""

    def __init__(self, n, l, seed=0, max_iter=5000, tol=1e-10,
                 record_every=1, record_iterates=False):
        self.n = n
        self.l = l
        self.seed = seed
        self.max_iter = max_iter
        self.tol = tol
        self.record_every = record_every
        self.record_iterates = record_iterates

    def fit(self, X=None, y=None):
        cfg = FrameDesignConfig(
            n=self.n, l=self.l, seed=self.seed,
            run=RunConfig(
                max_iter=self.max_iter, tol=self.tol,
                record_every=self.record_every,
                record_iterates=self.record_iterates,
            ),
        )
        result = design_etf(cfg)
        self.result_ = result
        self.frame_ = result.d
        self.trace_ = result.trace
        self.coherence_ = result.coherence
        self.gap_ = result.gap
        self.certificate_ = result.midrun_certificate
        return self
