"""Alternating projection driver with per-iteration trace recording.

The driver alternates two projectors: ``x_k = px.project(y_{k-1})`` and
``y_k = py.project(x_k)``, starting from a feasible ``y_0``, and stops
when the pair gap ``||x_k - y_k||_F`` drops to ``tol``, when ``max_iter``
is reached, or (optionally) when the ``y`` iterate stagnates.

Traces hold one scalar record per recorded step.  Record 0 is the
initialization row: its ``f`` value is the squared distance from ``y_0``
to the X-side set (``||x_1 - y_0||^2``) and its ``dx``/``dy`` fields are
NaN since no earlier iterate exists.  From record 1 on, ``f`` is the
squared pair gap at iteration ``k``, ``dx = ||x_k - x_{k-1}||`` (NaN at
``k = 1``), ``dy = ||y_k - y_{k-1}||`` and ``residual = 2 * dy``, which
is the norm of the canonical subgradient of the squared-distance
objective at the iterate pair.
"""

import dataclasses
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np
from sklearn.base import BaseEstimator

from .exceptions import AltprojError, InvalidInputError, NumericalFailureError
from .validation import as_matrix, check_shape

__all__ = [
    "RunConfig",
    "TraceRecord",
    "IterateTrace",
    "run_alternating_projections",
    "multi_start",
    "AlternatingProjections",
]

_NAN = float("nan")


@dataclass(frozen=True)
class RunConfig:
    """Options controlling one alternating-projection run.

    Parameters
    ----------
    max_iter : int
        Iteration budget (at least 1).
    tol : float
        Stop once ``||x_k - y_k||_F <= tol``.
    record_every : int
        Record stride; records 0 and the final step are always kept.
    extra_metrics : sequence of (str, callable)
        Named functionals ``fn(x, y) -> float`` evaluated at every
        recorded step and appended to the record.
    stagnation_tol : float or None
        When set, stop with reason ``"stagnation"`` after
        ``stagnation_steps`` consecutive iterations with
        ``dy <= stagnation_tol``.
    stagnation_steps : int
        Length of the stagnant streak required to stop.
    record_iterates : bool
        Keep every ``(x_k, y_k)`` pair on the trace.  Off by default;
        needed by the diagnostics that re-examine full iterates.
    """

    max_iter: int = 1000
    tol: float = 1e-10
    record_every: int = 1
    extra_metrics: Sequence[tuple[str, Callable]] = ()
    stagnation_tol: float | None = None
    stagnation_steps: int = 50
    record_iterates: bool = False

    def __post_init__(self):
        if int(self.max_iter) < 1:
            raise InvalidInputError("max_iter must be at least 1")
        if not np.isfinite(self.tol) or self.tol <= 0.0:
            raise InvalidInputError("tol must be positive")
        if int(self.record_every) < 1:
            raise InvalidInputError("record_every must be at least 1")
        if self.stagnation_tol is not None and self.stagnation_tol <= 0.0:
            raise InvalidInputError("stagnation_tol must be positive when set")
        if int(self.stagnation_steps) < 1:
            raise InvalidInputError("stagnation_steps must be at least 1")
        object.__setattr__(
            self, "extra_metrics", tuple((str(n), fn) for n, fn in self.extra_metrics)
        )


class TraceRecord(NamedTuple):
    k: int
    f: float
    dx: float
    dy: float
    residual: float
    extras: tuple = ()


@dataclass
class IterateTrace:
    """Scalar trace of a run plus the final iterate pair.

    ``iterates`` is populated only when the run recorded full iterates;
    it then holds ``(x_k, y_k)`` for every ``k >= 1`` regardless of the
    record stride, with the start available as ``initial_y``.
    """

    records: list = field(default_factory=list)
    extra_names: tuple = ()
    final_x: np.ndarray | None = None
    final_y: np.ndarray | None = None
    stop_reason: str | None = None
    initial_y: np.ndarray | None = None
    iterates: list | None = None

    def column(self, name):
        """One record field across all records, as a float array."""
        idx = TraceRecord._fields.index(name)
        return np.array([rec[idx] for rec in self.records], dtype=float)

    @property
    def iters(self):
        return self.column("k").astype(int)

    @property
    def f(self):
        return self.column("f")

    @property
    def dx(self):
        return self.column("dx")

    @property
    def dy(self):
        return self.column("dy")

    @property
    def residual(self):
        return self.column("residual")

    def extra(self, name):
        """Values of a named extra metric across all records."""
        if name not in self.extra_names:
            raise InvalidInputError(f"trace has no extra metric named {name!r}")
        j = self.extra_names.index(name)
        return np.array([rec.extras[j] for rec in self.records], dtype=float)

    @property
    def n_iter(self):
        """Index of the last recorded iteration."""
        return int(self.records[-1].k) if self.records else 0


def _ensure_finite(m, side, k):
    if not np.isfinite(m).all():
        raise NumericalFailureError(
            f"non-finite {side} iterate at iteration {k}", iteration=k
        )


def _eval_extras(metrics, x, y):
    return tuple(float(fn(x, y)) for _, fn in metrics)


def run_alternating_projections(px, py, y0, config=RunConfig()):
    """Alternate ``px`` and ``py`` from a feasible start and trace the run.

    Parameters
    ----------
    px, py : Projector
        The X-side and Y-side nearest-point maps.
    y0 : array_like
        Start, must satisfy ``py.contains(y0, 1e-8)``.
    config : RunConfig

    Returns
    -------
    IterateTrace

    Raises
    ------
    InvalidInputError
        If the start is infeasible or has the wrong shape.
    NumericalFailureError
        If an iterate stops being finite; the offending iteration index
        is attached to the exception.
    """
    y0 = as_matrix(y0, "y0")
    check_shape(y0, py.ambient_shape, "y0")
    if not py.contains(y0, 1e-8):
        raise InvalidInputError("y0 is not feasible for the Y-side projector")

    metrics = tuple(config.extra_metrics)
    extra_names = tuple(name for name, _ in metrics)
    records = []
    iterates = [] if config.record_iterates else None

    x_prev = None
    y_prev = y0
    x = y = y0
    stop_reason = "max_iter"
    stagnant = 0

    for k in range(1, int(config.max_iter) + 1):
        x = px.project(y_prev)
        _ensure_finite(x, "x", k)
        if k == 1:
            gap0 = np.linalg.norm(x - y_prev)
            records.append(
                TraceRecord(0, float(gap0 * gap0), _NAN, _NAN, _NAN,
                            _eval_extras(metrics, x, y_prev))
            )
        y = py.project(x)
        _ensure_finite(y, "y", k)

        gap = np.linalg.norm(x - y)
        f = float(gap * gap)
        dx = float(np.linalg.norm(x - x_prev)) if x_prev is not None else _NAN
        dy = float(np.linalg.norm(y - y_prev))
        residual = 2.0 * dy
        if iterates is not None:
            iterates.append((x, y))

        stopping = False
        if gap <= config.tol:
            stop_reason = "tolerance"
            stopping = True
        elif config.stagnation_tol is not None:
            stagnant = stagnant + 1 if dy <= config.stagnation_tol else 0
            if stagnant >= config.stagnation_steps:
                stop_reason = "stagnation"
                stopping = True
        if k == int(config.max_iter):
            stopping = True

        if stopping or k % config.record_every == 0:
            records.append(
                TraceRecord(k, f, dx, dy, residual, _eval_extras(metrics, x, y))
            )
        if stopping:
            break
        x_prev, y_prev = x, y

    return IterateTrace(
        records=records,
        extra_names=extra_names,
        final_x=x,
        final_y=y,
        stop_reason=stop_reason,
        initial_y=y0,
        iterates=iterates,
    )


def multi_start(px, py, starts, config=RunConfig()):
    """Run the driver from several starts, one trace per start.

    Starts run independently: a failure in one does not abort the
    others.  The returned list is aligned with ``starts``; an entry is
    either an :class:`IterateTrace` or the exception that start raised.
    """
    results = []
    for y0 in starts:
        try:
            results.append(run_alternating_projections(px, py, y0, config))
        except AltprojError as err:
            results.append(err)
    return results


class AlternatingProjections(BaseEstimator):
    """Estimator-style wrapper around :func:`run_alternating_projections`.

    ``fit(y0)`` runs the alternation from ``y0`` and exposes the outcome
    through fitted attributes: ``x_``, ``y_``, ``trace_``, ``n_iter_``
    and ``stop_reason_``.
    """

    def __init__(self, px, py, max_iter=1000, tol=1e-10, record_every=1,
                 extra_metrics=(), stagnation_tol=None, stagnation_steps=50,
                 record_iterates=False):
        self.px = px
        self.py = py
        self.max_iter = max_iter
        self.tol = tol
        self.record_every = record_every
        self.extra_metrics = extra_metrics
        self.stagnation_tol = stagnation_tol
        self.stagnation_steps = stagnation_steps
        self.record_iterates = record_iterates

    def _config(self):
        return RunConfig(
            max_iter=self.max_iter,
            tol=self.tol,
            record_every=self.record_every,
            extra_metrics=self.extra_metrics,
            stagnation_tol=self.stagnation_tol,
            stagnation_steps=self.stagnation_steps,
            record_iterates=self.record_iterates,
        )

    def fit(self, y0, y=None):
        trace = run_alternating_projections(self.px, self.py, y0, self._config())
        self.trace_ = trace
        self.x_ = trace.final_x
        self.y_ = trace.final_y
        self.n_iter_ = trace.n_iter
        self.stop_reason_ = trace.stop_reason
        return self

    def fit_transform(self, y0, y=None):
        return self.fit(y0).x_


def replace_config(config, **changes):
    """Return a copy of ``config`` with the given fields replaced."""
    return dataclasses.replace(config, **changes)
