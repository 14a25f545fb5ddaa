import math

import numpy as np
import pytest

from altproj import (
    EquiangularFrameDesign,
    IterateTrace,
    PrescribedNormFrameDesign,
    RunConfig,
    TraceRecord,
    check_etf_initialization,
    design_etf,
    design_prescribed_norm_frame,
    eigen_gap,
    extract_frame_from_gram,
    first_certified_iteration,
    mutual_coherence,
    real_etf_known_to_exist,
    tight_parameter,
    tightness_residual,
    welch_bound,
)
from altproj.frames import FrameDesignConfig
from altproj.exceptions import InvalidInputError, RankDeficiencyError

NAN = float("nan")


# ---------------------------------------------------------------------------
# scalar frame quantities

def test_welch_bound_reference_values():
    assert welch_bound(2, 3) == pytest.approx(0.5)
    assert welch_bound(3, 6) == pytest.approx(math.sqrt(1.0 / 5.0))
    assert welch_bound(3, 3) == 0.0
    assert welch_bound(4, 8) == pytest.approx(math.sqrt(4.0 / 28.0))


def test_welch_bound_rejects_bad_sizes():
    with pytest.raises(InvalidInputError):
        welch_bound(0, 3)
    with pytest.raises(InvalidInputError):
        welch_bound(4, 3)
    with pytest.raises(InvalidInputError):
        welch_bound(1, 1)


def test_mutual_coherence_reference_values():
    assert mutual_coherence(np.eye(3)) == 0.0
    d = np.array([[1.0, 2.0], [1.0, 2.0]])
    assert mutual_coherence(d) == pytest.approx(1.0)
    # three unit vectors at 120 degrees pairwise
    angles = [0.0, 2.0 * math.pi / 3.0, 4.0 * math.pi / 3.0]
    mb = np.array([[math.cos(t) for t in angles],
                   [math.sin(t) for t in angles]])
    assert mutual_coherence(mb) == pytest.approx(0.5)


def test_mutual_coherence_rejects_degenerate_input():
    with pytest.raises(InvalidInputError):
        mutual_coherence(np.array([[1.0], [0.0]]))
    with pytest.raises(InvalidInputError):
        mutual_coherence(np.array([[1.0, 0.0], [0.0, 0.0]]))


def test_tight_parameter_and_residual():
    assert tight_parameter([1.0] * 6, 3) == pytest.approx(2.0)
    assert tight_parameter([4.0, 1.0, 1.0], 3) == pytest.approx(2.0)
    q = np.linalg.qr(np.random.default_rng(0).standard_normal((5, 3)))[0]
    d = math.sqrt(2.0) * q.T
    assert tightness_residual(d, 2.0) < 1e-12


def test_eigen_gap_values_and_validation():
    h = np.diag([3.0, 2.0, 0.5])
    assert eigen_gap(h, 1) == pytest.approx(1.0)
    assert eigen_gap(h, 2) == pytest.approx(1.5)
    assert eigen_gap(np.eye(3), 2) == pytest.approx(0.0)
    with pytest.raises(InvalidInputError):
        eigen_gap(h, 3)
    with pytest.raises(InvalidInputError):
        eigen_gap(h, 0)


def test_extract_frame_from_gram_roundtrip():
    rng = np.random.default_rng(1)
    a = 2.0
    q = np.linalg.qr(rng.standard_normal((6, 3)))[0]
    g = a * q @ q.T
    d = extract_frame_from_gram(g, 3, a)
    assert d.shape == (3, 6)
    np.testing.assert_allclose(d @ d.T, a * np.eye(3), atol=1e-10)
    np.testing.assert_allclose(d.T @ d, g, atol=1e-10)


def test_extract_frame_rejects_rank_deficient_gram():
    g = np.zeros((4, 4))
    g[0, 0] = 1.0
    with pytest.raises(RankDeficiencyError):
        extract_frame_from_gram(g, 2, 1.0)


# ---------------------------------------------------------------------------
# certificates

def test_initial_certificate_arithmetic():
    n, l = 3, 6
    g0 = np.eye(l)
    h0 = np.eye(l)
    cert = check_etf_initialization(g0, h0, n, l)
    # threshold l^2 / (2 n^2) = 2, distance 0
    assert cert.nu == pytest.approx(2.0)
    assert cert.certified
    assert cert.eigen_gap_bound == pytest.approx(2.0 / (l / n))
    assert cert.iteration is None


def test_initial_certificate_boundary_is_strict():
    n, l = 3, 6
    g0 = np.eye(l)
    h0 = g0.copy()
    h0[0, 1] = h0[1, 0] = 1.0  # ||g0 - h0||^2 = 2 exactly
    cert = check_etf_initialization(g0, h0, n, l)
    assert cert.nu == pytest.approx(0.0, abs=1e-15)
    assert not cert.certified
    assert cert.eigen_gap_bound is None


def test_first_certified_iteration_skips_row_zero():
    rows = [
        TraceRecord(0, 0.5, NAN, NAN, NAN),   # below threshold but pre-step
        TraceRecord(1, 9.0, NAN, 1.0, 2.0),
        TraceRecord(2, 1.0, 0.5, 0.5, 1.0),
    ]
    cert = first_certified_iteration(IterateTrace(records=rows), 3, 6)
    assert cert.iteration == 2
    assert cert.nu == pytest.approx(1.0)
    none = first_certified_iteration(
        IterateTrace(records=rows[:2]), 3, 6)
    assert none is None


def test_real_etf_catalogue():
    assert real_etf_known_to_exist(3, 3)
    assert real_etf_known_to_exist(5, 6)
    assert real_etf_known_to_exist(3, 6)
    assert real_etf_known_to_exist(5, 10)
    assert real_etf_known_to_exist(7, 14)
    assert not real_etf_known_to_exist(4, 8)
    assert not real_etf_known_to_exist(3, 7)


# ---------------------------------------------------------------------------
# design configs

def test_design_config_validation():
    with pytest.raises(InvalidInputError):
        FrameDesignConfig(n=0, l=3)
    with pytest.raises(InvalidInputError):
        FrameDesignConfig(n=4, l=3)
    with pytest.raises(InvalidInputError):
        FrameDesignConfig(n=2, l=3, c=(1.0, 1.0))
    with pytest.raises(InvalidInputError):
        FrameDesignConfig(n=2, l=3, c=(1.0, -1.0, 1.0))
    cfg = FrameDesignConfig(n=2, l=4)
    np.testing.assert_array_equal(cfg.column_targets(), np.ones(4))


# ---------------------------------------------------------------------------
# prescribed-norm pipeline

def test_prescribed_norm_design_unit_targets():
    cfg = FrameDesignConfig(n=3, l=5, seed=1,
                            run=RunConfig(max_iter=10000, tol=1e-6))
    res = design_prescribed_norm_frame(cfg)
    assert res.trace.stop_reason == "tolerance"
    assert res.gap <= 1e-6
    assert res.tightness_residual < 1e-9
    np.testing.assert_allclose(np.linalg.norm(res.d, axis=0), 1.0, atol=1e-6)


def test_prescribed_norm_design_uneven_targets():
    c = (1.2, 1.1, 1.0, 0.9, 0.8)
    cfg = FrameDesignConfig(n=3, l=5, c=c, seed=2,
                            run=RunConfig(max_iter=20000, tol=1e-6))
    res = design_prescribed_norm_frame(cfg)
    assert res.gap <= 1e-6
    np.testing.assert_allclose(np.linalg.norm(res.d, axis=0) ** 2, c,
                               atol=1e-5)
    a = tight_parameter(c, 3)
    assert tightness_residual(res.d, a) < 1e-9


def test_prescribed_norm_design_rejects_impossible_targets():
    # no 3-row tight frame can hold a column with norm above sum(c)/n
    cfg = FrameDesignConfig(n=3, l=5, c=(4.0, 1.0, 1.0, 1.0, 1.0), seed=2)
    with pytest.raises(InvalidInputError):
        design_prescribed_norm_frame(cfg)


def test_prescribed_norm_design_is_deterministic():
    cfg = FrameDesignConfig(n=3, l=5, seed=4,
                            run=RunConfig(max_iter=5000, tol=1e-6))
    d1 = design_prescribed_norm_frame(cfg).d
    d2 = design_prescribed_norm_frame(cfg).d
    np.testing.assert_array_equal(d1, d2)


# ---------------------------------------------------------------------------
# equiangular pipeline

def test_etf_design_hits_welch_bound_3_6():
    cfg = FrameDesignConfig(n=3, l=6, seed=1,
                            run=RunConfig(max_iter=5000, tol=1e-10))
    res = design_etf(cfg)
    assert res.trace.stop_reason == "tolerance"
    assert res.coherence == pytest.approx(welch_bound(3, 6), abs=5e-9)
    assert res.tightness_residual < 1e-8
    assert res.initial_certificate is not None
    assert res.midrun_certificate is not None
    assert res.midrun_certificate.certified
    # the eigen-gap column is recorded for every step
    assert "eigen_gap" in res.trace.extra_names


def test_etf_design_square_case_is_orthonormal():
    cfg = FrameDesignConfig(n=2, l=2, seed=1,
                            run=RunConfig(max_iter=100, tol=1e-10))
    res = design_etf(cfg)
    assert res.coherence == pytest.approx(0.0, abs=1e-12)
    assert res.gap == 0.0
    assert res.trace.extra_names == ()
    np.testing.assert_allclose(res.d @ res.d.T, np.eye(2), atol=1e-12)


def test_etf_design_rejects_uneven_norms():
    cfg = FrameDesignConfig(n=2, l=3, c=(2.0, 1.0, 1.0), seed=0)
    with pytest.raises(InvalidInputError):
        design_etf(cfg)


def test_etf_gram_iterate_matches_frame():
    cfg = FrameDesignConfig(n=3, l=6, seed=2,
                            run=RunConfig(max_iter=5000, tol=1e-10))
    res = design_etf(cfg)
    np.testing.assert_allclose(res.d.T @ res.d, res.s_or_h, atol=1e-8)


# ---------------------------------------------------------------------------
# estimator facades

def test_prescribed_norm_estimator():
    est = PrescribedNormFrameDesign(n=3, l=5, seed=1)
    est.fit()
    assert est.frame_.shape == (3, 5)
    assert est.gap_ <= 1e-6
    assert est.trace_.stop_reason == "tolerance"
    assert est.get_params()["n"] == 3


def test_etf_estimator():
    est = EquiangularFrameDesign(n=3, l=6, seed=3)
    est.fit()
    assert est.coherence_ == pytest.approx(welch_bound(3, 6), abs=5e-9)
    assert est.certificate_ is not None
    assert est.certificate_.certified
