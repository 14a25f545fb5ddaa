"""Convergence certificates estimated from recorded traces.

Three empirical checks mirror the assumptions that guarantee rates for
the alternating projection method:

* sufficient decrease: every recorded step must shed at least
  ``alpha * dy_k^2`` of objective, with ``alpha > 0``;
* local contraction: near the limit, consecutive X-side steps are
  bounded by a multiple of the previous Y-side step,
  ``dx_{k+1} <= beta * dy_k``;
* a Kurdyka-Lojasiewicz exponent fitted from the decay of the distance
  proxy ``e_k = sum_{i >= k} dy_i``, which upper-bounds the distance of
  the iterate to its limit.  Exponent 0 corresponds to convergence in
  finitely many steps, exponents up to one half to a geometric (linear)
  rate and larger exponents to a power-law (sublinear) rate.

All estimators work on stride-1 scalar traces; the two frame-specific
checks additionally need full iterates (``record_iterates=True``).
"""

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import (
    DegenerateTraceError,
    InsufficientDataError,
    InvalidInputError,
)
from .validation import column_norms

__all__ = [
    "AssumptionCertificate",
    "KLEstimate",
    "NormGuardReport",
    "DiagnosticsReport",
    "check_sufficient_decrease",
    "default_contraction_epsilon",
    "estimate_contraction",
    "certify_assumptions",
    "estimate_kl_exponent",
    "check_frame_three_point",
    "check_column_norm_guards",
    "analyze_trace",
]

RATE_FINITE = "finite"
RATE_LINEAR = "linear"
RATE_SUBLINEAR = "sublinear"


@dataclass(frozen=True)
class AssumptionCertificate:
    """Empirical constants for the decrease and contraction assumptions."""

    alpha_hat: float
    beta_hat: float
    epsilon_used: float
    tail_start: int
    passed: bool


@dataclass(frozen=True)
class KLEstimate:
    """Fitted rate class and exponent.

    ``rho_hat`` is the per-iteration geometric factor (linear class
    only); ``power_hat`` is the decay power ``p`` of ``e_k ~ k**-p``
    (sublinear class only); ``fit_r2`` is the coefficient of
    determination of the winning model.
    """

    theta_hat: float
    rate_class: str
    rho_hat: float | None
    power_hat: float | None
    fit_r2: float


@dataclass(frozen=True)
class NormGuardReport:
    """Outcome of the column-norm guard check along a frame run.

    ``applicable`` is False when the start was rank deficient, in which
    case nothing is asserted and ``passed`` is None.
    """

    applicable: bool
    passed: bool | None
    min_column_norm: float | None
    min_singular_value: float | None
    column_norm_bound: float
    singular_value_bound: float


@dataclass(frozen=True)
class DiagnosticsReport:
    """Flat summary of every estimator, with abstention markers.

    Statuses are ``"ok"``, ``"degenerate-trace"`` (the run carried no
    usable steps) or ``"insufficient-data"`` (too short to estimate);
    the corresponding value fields are None when not ``"ok"``.
    """

    alpha_hat: float | None
    alpha_status: str
    beta_hat: float | None
    beta_status: str
    epsilon_used: float | None
    tail_start: int | None
    assumptions_pass: bool | None
    theta_hat: float | None
    rate_class: str | None
    rho_hat: float | None
    power_hat: float | None
    fit_r2: float | None
    kl_status: str

    def to_dict(self):
        return {
            "alpha_hat": self.alpha_hat,
            "alpha_status": self.alpha_status,
            "beta_hat": self.beta_hat,
            "beta_status": self.beta_status,
            "epsilon_used": self.epsilon_used,
            "tail_start": self.tail_start,
            "assumptions_pass": self.assumptions_pass,
            "theta_hat": self.theta_hat,
            "rate_class": self.rate_class,
            "rho_hat": self.rho_hat,
            "power_hat": self.power_hat,
            "fit_r2": self.fit_r2,
            "kl_status": self.kl_status,
        }


def _consecutive_pairs(records):
    """Pairs of records whose iteration indices differ by exactly one."""
    return [
        (prev, cur)
        for prev, cur in zip(records[:-1], records[1:])
        if cur.k == prev.k + 1
    ]


def check_sufficient_decrease(trace):
    """Smallest observed decrease ratio ``(f_{k-1} - f_k) / dy_k**2``.

    The minimum runs over consecutive record pairs whose later record
    has ``dy > 0``.  A positive return certifies the sufficient-decrease
    inequality along the whole recorded run.

    Raises
    ------
    DegenerateTraceError
        If no record moved at all (the run started at its limit).
    InsufficientDataError
        If the trace has no consecutive pair with ``dy > 0``.
    """
    records = trace.records
    if not any(r.dy > 0.0 for r in records if np.isfinite(r.dy)):
        raise DegenerateTraceError("every recorded step has dy = 0")
    ratios = [
        (prev.f - cur.f) / (cur.dy * cur.dy)
        for prev, cur in _consecutive_pairs(records)
        if np.isfinite(cur.dy) and cur.dy > 0.0
    ]
    if not ratios:
        raise InsufficientDataError(
            "no consecutive record pair with dy > 0; "
            "record with stride 1 to use this check"
        )
    return float(min(ratios))


def _contraction_pairs(trace, epsilon):
    pairs = []
    for prev, cur in _consecutive_pairs(trace.records):
        if (
            np.isfinite(cur.dx)
            and np.isfinite(prev.dy)
            and 0.0 < prev.dy <= epsilon
        ):
            pairs.append((prev.k, cur.dx / prev.dy))
    return pairs


def default_contraction_epsilon(trace):
    """90th percentile of the positive ``dy`` values over the trace tail.

    The tail is the later half of the records; if it carries no positive
    ``dy`` the whole trace is used instead.
    """
    dys = trace.dy
    dys = dys[np.isfinite(dys)]
    tail = dys[len(dys) // 2 :]
    tail = tail[tail > 0.0]
    if tail.size == 0:
        tail = dys[dys > 0.0]
    if tail.size == 0:
        raise InsufficientDataError("trace has no positive dy values")
    return float(np.percentile(tail, 90))


def estimate_contraction(trace, epsilon=None):
    """Largest observed step ratio ``dx_{k+1} / dy_k`` near the limit.

    Only pairs with ``0 < dy_k <= epsilon`` count; ``epsilon`` defaults
    to :func:`default_contraction_epsilon`.  Pass ``epsilon=np.inf`` to
    bound the ratio over the entire run.
    """
    if epsilon is None:
        epsilon = default_contraction_epsilon(trace)
    pairs = _contraction_pairs(trace, epsilon)
    if not pairs:
        raise InsufficientDataError(
            "no consecutive record pair qualifies for the contraction estimate"
        )
    return float(max(ratio for _, ratio in pairs))


def certify_assumptions(trace, epsilon=None):
    """Bundle the decrease and contraction estimates into one certificate.

    ``passed`` requires a strictly positive decrease constant; the
    contraction constant is reported alongside (any finite value
    certifies the local-contraction assumption with that constant).
    """
    alpha = check_sufficient_decrease(trace)
    if epsilon is None:
        epsilon = default_contraction_epsilon(trace)
    pairs = _contraction_pairs(trace, epsilon)
    if not pairs:
        raise InsufficientDataError(
            "no consecutive record pair qualifies for the contraction estimate"
        )
    beta = max(ratio for _, ratio in pairs)
    tail_start = min(k for k, _ in pairs)
    return AssumptionCertificate(
        alpha_hat=float(alpha),
        beta_hat=float(beta),
        epsilon_used=float(epsilon),
        tail_start=int(tail_start),
        passed=bool(alpha > 0.0 and np.isfinite(beta)),
    )


def _fit_line(x, y):
    slope, intercept = np.polyfit(x, y, 1)
    pred = slope * x + intercept
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    if ss_tot == 0.0:
        r2 = 1.0 if ss_res <= 1e-30 else 0.0
    else:
        r2 = 1.0 - ss_res / ss_tot
    return float(slope), r2


def estimate_kl_exponent(trace, min_records=30):
    """Classify the convergence rate from the decay of the step tail sums.

    The distance proxy at record ``k`` is ``e_k = sum_{i >= k} dy_i``
    over the recorded steps.  If the proxy or the final objective hits
    zero exactly the run hit its limit in finitely many steps.
    Otherwise a log-linear model
    (``log e_k`` against ``k``) and a log-log model (against ``log k``)
    are fitted and the better coefficient of determination decides
    between a geometric and a power-law rate.

    Engine traces must have stopped on tolerance; traces loaded from
    disk (unknown stop reason) are accepted as-is.  Traces shorter than
    ``min_records`` abstain by raising :class:`InsufficientDataError`
    unless the finite case applies, which needs no model fit.
    """
    records = [r for r in trace.records if r.k >= 1]
    if not records:
        raise InsufficientDataError("trace has no iteration records")
    dys = np.array([r.dy for r in records], dtype=float)
    if not np.isfinite(dys).all():
        raise InvalidInputError("dy must be finite on every iteration record")
    e = np.cumsum(dys[::-1])[::-1]

    # Exact arrival: either the trailing steps are exactly zero or the
    # objective itself hit floating-point zero.  Clamp-style projectors
    # do land on the intersection bitwise, so this is not a tolerance.
    if e[-1] == 0.0 or records[-1].f == 0.0:
        return KLEstimate(
            theta_hat=0.0,
            rate_class=RATE_FINITE,
            rho_hat=None,
            power_hat=None,
            fit_r2=1.0,
        )
    if trace.stop_reason not in (None, "tolerance"):
        raise InsufficientDataError(
            f"run stopped by {trace.stop_reason}; the tail proxy is unreliable"
        )
    if len(records) < min_records:
        raise InsufficientDataError(
            f"need at least {min_records} iteration records, got {len(records)}"
        )

    ks = np.array([r.k for r in records], dtype=float)
    loge = np.log(e)
    slope_lin, r2_lin = _fit_line(ks, loge)
    slope_pow, r2_pow = _fit_line(np.log(ks), loge)

    if r2_lin >= r2_pow:
        return KLEstimate(
            theta_hat=0.5,
            rate_class=RATE_LINEAR,
            rho_hat=float(math.exp(slope_lin)),
            power_hat=None,
            fit_r2=r2_lin,
        )
    power = -slope_pow
    return KLEstimate(
        theta_hat=float((1.0 + power) / (1.0 + 2.0 * power)),
        rate_class=RATE_SUBLINEAR,
        rho_hat=None,
        power_hat=float(power),
        fit_r2=r2_pow,
    )


def _require_iterates(trace):
    if not trace.iterates or trace.initial_y is None:
        raise InsufficientDataError(
            "this check needs full iterates; run with record_iterates=True"
        )


def check_frame_three_point(trace, targets):
    """Verify the three-point inequality along a prescribed-norm run.

    For every iteration the drop in squared distance when the Y-side
    iterate is updated must dominate ``kappa * ||S_k - S_{k-1}||_F**2``
    with ``kappa = c_min / (c_max * sqrt(sum(c)))`` built from the
    squared column-norm targets ``c``.  Returns ``(ok, margin)`` where
    ``margin`` is the smallest observed slack (negative = violated) and
    ``ok`` allows for rounding with a 1e-9 cushion.
    """
    _require_iterates(trace)
    c = np.asarray(targets, dtype=float).ravel()
    if c.size == 0 or np.any(c <= 0.0):
        raise InvalidInputError("targets must be positive")
    kappa = float(c.min() / (c.max() * math.sqrt(c.sum())))
    margin = math.inf
    prev_s = trace.initial_y
    for x, y in trace.iterates:
        lhs = np.linalg.norm(x - prev_s) ** 2 - np.linalg.norm(x - y) ** 2
        rhs = kappa * np.linalg.norm(y - prev_s) ** 2
        margin = min(margin, float(lhs - rhs))
        prev_s = y
    return bool(margin >= -1e-9), margin


def check_column_norm_guards(trace, targets):
    """Check the lower bounds that keep a prescribed-norm run nondegenerate.

    Along the run, every column of the X-side iterate must keep norm at
    least ``c_min / sqrt(sum(c))`` and the Y-side iterate must keep its
    smallest singular value at least ``sqrt(c_min)``; both guards carry
    a 1e-9 slack.  A rank-deficient start voids the premise, in which
    case the report is marked not applicable.
    """
    _require_iterates(trace)
    c = np.asarray(targets, dtype=float).ravel()
    if c.size == 0 or np.any(c <= 0.0):
        raise InvalidInputError("targets must be positive")
    col_bound = float(c.min() / math.sqrt(c.sum()))
    sig_bound = float(math.sqrt(c.min()))

    s0 = np.linalg.svd(trace.initial_y, compute_uv=False)
    if s0[-1] <= 1e-12 * max(1.0, s0[0]):
        return NormGuardReport(
            applicable=False,
            passed=None,
            min_column_norm=None,
            min_singular_value=None,
            column_norm_bound=col_bound,
            singular_value_bound=sig_bound,
        )

    min_col = math.inf
    min_sig = math.inf
    for x, y in trace.iterates:
        min_col = min(min_col, float(column_norms(x).min()))
        min_sig = min(min_sig, float(np.linalg.svd(y, compute_uv=False)[-1]))
    passed = min_col >= col_bound - 1e-9 and min_sig >= sig_bound - 1e-9
    return NormGuardReport(
        applicable=True,
        passed=bool(passed),
        min_column_norm=min_col,
        min_singular_value=min_sig,
        column_norm_bound=col_bound,
        singular_value_bound=sig_bound,
    )


def analyze_trace(trace, epsilon=None):
    """Run every scalar-trace estimator, abstaining where data is short.

    Never raises for short or degenerate traces; the report's status
    fields say which estimates were possible.
    """
    alpha = beta = eps_used = tail_start = None
    alpha_status = beta_status = "ok"
    try:
        alpha = check_sufficient_decrease(trace)
    except DegenerateTraceError:
        alpha_status = "degenerate-trace"
    except InsufficientDataError:
        alpha_status = "insufficient-data"

    try:
        cert_eps = epsilon if epsilon is not None else default_contraction_epsilon(trace)
        pairs = _contraction_pairs(trace, cert_eps)
        if not pairs:
            raise InsufficientDataError("no qualifying contraction pair")
        beta = float(max(r for _, r in pairs))
        tail_start = int(min(k for k, _ in pairs))
        eps_used = float(cert_eps)
    except (DegenerateTraceError, InsufficientDataError):
        beta_status = "insufficient-data"

    kl = None
    kl_status = "ok"
    try:
        kl = estimate_kl_exponent(trace)
    except InsufficientDataError:
        kl_status = "insufficient-data"
    except DegenerateTraceError:
        kl_status = "degenerate-trace"

    assumptions_pass = None
    if alpha is not None and beta is not None:
        assumptions_pass = bool(alpha > 0.0 and np.isfinite(beta))

    return DiagnosticsReport(
        alpha_hat=alpha,
        alpha_status=alpha_status,
        beta_hat=beta,
        beta_status=beta_status,
        epsilon_used=eps_used,
        tail_start=tail_start,
        assumptions_pass=assumptions_pass,
        theta_hat=kl.theta_hat if kl else None,
        rate_class=kl.rate_class if kl else None,
        rho_hat=kl.rho_hat if kl else None,
        power_hat=kl.power_hat if kl else None,
        fit_r2=kl.fit_r2 if kl else None,
        kl_status=kl_status,
    )
