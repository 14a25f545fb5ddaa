"""Projector unit tests.

The core property is nearest-point optimality: the projection of ``z``
must be at least as close to ``z`` as any other member of the set, where
the competing members are built directly from the set's definition (not
through the projector under test).
"""

import numpy as np
import pytest

from altproj import (
    AffineProjector,
    BoxProjector,
    CoherenceProjector,
    ColumnNormProjector,
    GramTightProjector,
    HalfspaceProjector,
    TightFrameProjector,
)
from altproj.exceptions import InvalidInputError


def _assert_no_better_member(z, proj, members, slack=1e-9):
    best = np.linalg.norm(z - proj) ** 2
    for w in members:
        assert best <= np.linalg.norm(z - w) ** 2 + slack


# ---------------------------------------------------------------------------
# box

def test_box_projects_by_clipping():
    box = BoxProjector(-1.0, 2.0)
    z = np.array([[-3.0, 0.5], [4.0, 2.0]])
    out = box.project(z)
    np.testing.assert_array_equal(out, [[-1.0, 0.5], [2.0, 2.0]])
    assert box.contains(out)
    assert not box.contains(z)


def test_box_optimality_randomized():
    rng = np.random.default_rng(10)
    lo = rng.uniform(-2, 0, (6, 1))
    hi = lo + rng.uniform(0.5, 2, (6, 1))
    box = BoxProjector(lo, hi)
    for _ in range(30):
        z = rng.standard_normal((6, 1)) * 3
        p = box.project(z)
        members = lo + rng.uniform(0, 1, (40, 6, 1)) * (hi - lo)
        _assert_no_better_member(z, p, members)
        np.testing.assert_array_equal(box.project(p), p)


def test_box_rejects_crossed_bounds():
    with pytest.raises(InvalidInputError):
        BoxProjector(1.0, -1.0)


def test_box_nonexpansive():
    rng = np.random.default_rng(11)
    box = BoxProjector(-0.5, 0.5)
    for _ in range(20):
        z1 = rng.standard_normal((4, 2))
        z2 = rng.standard_normal((4, 2))
        d_in = np.linalg.norm(z1 - z2)
        d_out = np.linalg.norm(box.project(z1) - box.project(z2))
        assert d_out <= d_in + 1e-12


# ---------------------------------------------------------------------------
# halfspace

def test_halfspace_projection_and_membership():
    n = np.array([[1.0], [0.0]])
    hs = HalfspaceProjector(n, 1.0)
    inside = np.array([[0.5], [3.0]])
    np.testing.assert_array_equal(hs.project(inside), inside)
    outside = np.array([[3.0], [1.0]])
    out = hs.project(outside)
    np.testing.assert_allclose(out, [[1.0], [1.0]], atol=1e-14)
    assert hs.contains(out, 1e-10)


def test_halfspace_optimality_randomized():
    rng = np.random.default_rng(12)
    for _ in range(20):
        normal = rng.standard_normal((5, 1))
        offset = float(rng.uniform(-1, 1))
        hs = HalfspaceProjector(normal, offset)
        nsq = float(np.vdot(normal, normal))
        z = rng.standard_normal((5, 1)) * 2
        p = hs.project(z)
        members = []
        for _ in range(40):
            r = rng.standard_normal((5, 1)) * 2
            push = max(float(np.vdot(normal, r)) - offset, 0.0) / nsq
            members.append(r - (push + rng.uniform(0, 1) / nsq) * normal)
        _assert_no_better_member(z, p, members)


def test_halfspace_rejects_zero_normal():
    with pytest.raises(InvalidInputError):
        HalfspaceProjector(np.zeros((3, 1)), 0.0)


# ---------------------------------------------------------------------------
# affine

def test_affine_projection_is_orthogonal():
    rng = np.random.default_rng(13)
    basis = rng.standard_normal((6, 2))
    point = rng.standard_normal((6, 1))
    aff = AffineProjector(basis, point)
    z = rng.standard_normal((6, 1))
    p = aff.project(z)
    # the residual is orthogonal to the subspace directions
    np.testing.assert_allclose(basis.T @ (z - p), 0, atol=1e-12)
    np.testing.assert_allclose(aff.project(p), p, atol=1e-12)


def test_affine_optimality_randomized():
    rng = np.random.default_rng(14)
    basis = rng.standard_normal((5, 3))
    point = rng.standard_normal((5, 1))
    aff = AffineProjector(basis, point)
    for _ in range(20):
        z = rng.standard_normal((5, 1)) * 2
        p = aff.project(z)
        members = [point + basis @ rng.standard_normal((3, 1))
                   for _ in range(40)]
        _assert_no_better_member(z, p, members)


def test_affine_rejects_dependent_basis():
    basis = np.array([[1.0, 2.0], [2.0, 4.0], [0.0, 0.0]])
    with pytest.raises(InvalidInputError):
        AffineProjector(basis, np.zeros((3, 1)))


# ---------------------------------------------------------------------------
# column norms

def test_column_norm_scales_each_column():
    proj = ColumnNormProjector([4.0, 1.0])
    z = np.array([[3.0, 0.0], [4.0, 0.5]])
    out = proj.project(z)
    np.testing.assert_allclose(np.linalg.norm(out, axis=0), [2.0, 1.0])
    np.testing.assert_allclose(out[:, 0] * 5.0, z[:, 0] * 2.0, atol=1e-14)
    assert proj.contains(out, 1e-10)


def test_column_norm_zero_column_goes_to_first_axis():
    proj = ColumnNormProjector([9.0])
    out = proj.project(np.zeros((3, 1)))
    np.testing.assert_array_equal(out, [[3.0], [0.0], [0.0]])


def test_column_norm_optimality_randomized():
    rng = np.random.default_rng(15)
    c = np.array([2.0, 0.5, 1.0])
    proj = ColumnNormProjector(c)
    roots = np.sqrt(c)
    for _ in range(20):
        z = rng.standard_normal((4, 3))
        p = proj.project(z)
        members = []
        for _ in range(40):
            w = rng.standard_normal((4, 3))
            members.append(w / np.linalg.norm(w, axis=0) * roots)
        _assert_no_better_member(z, p, members)


def test_column_norm_sphere_three_point_identity():
    # for s = x/||x|| on the unit sphere and any other unit vector s':
    # ||x - s'||^2 - ||x - s||^2 == ||x|| * ||s - s'||^2
    rng = np.random.default_rng(16)
    proj = ColumnNormProjector([1.0])
    for _ in range(50):
        x = rng.standard_normal((5, 1)) * rng.uniform(0.1, 3)
        s = proj.project(x)
        sp = rng.standard_normal((5, 1))
        sp /= np.linalg.norm(sp)
        lhs = np.linalg.norm(x - sp) ** 2 - np.linalg.norm(x - s) ** 2
        rhs = np.linalg.norm(x) * np.linalg.norm(s - sp) ** 2
        assert abs(lhs - rhs) < 1e-10


def test_column_norm_rejects_bad_targets():
    with pytest.raises(InvalidInputError):
        ColumnNormProjector([1.0, -2.0])
    with pytest.raises(InvalidInputError):
        ColumnNormProjector([])


# ---------------------------------------------------------------------------
# tight frames (spectral)

def _random_tight(rng, n, l, a):
    q = np.linalg.qr(rng.standard_normal((l, n)))[0]
    return np.sqrt(a) * q.T


def test_tight_frame_output_is_tight():
    rng = np.random.default_rng(17)
    proj = TightFrameProjector(a=5.0 / 3.0)
    z = rng.standard_normal((3, 5))
    d = proj.project(z)
    np.testing.assert_allclose(d @ d.T, 5.0 / 3.0 * np.eye(3), atol=1e-12)
    assert proj.contains(d, 1e-10)
    np.testing.assert_allclose(proj.project(d), d, atol=1e-12)


def test_tight_frame_optimality_randomized():
    rng = np.random.default_rng(18)
    a = 2.0
    proj = TightFrameProjector(a=a)
    for _ in range(15):
        z = rng.standard_normal((3, 6))
        p = proj.project(z)
        members = [_random_tight(rng, 3, 6, a) for _ in range(40)]
        _assert_no_better_member(z, p, members)


def test_tight_frame_shape_guard():
    proj = TightFrameProjector(a=1.0, shape=(2, 4))
    with pytest.raises(InvalidInputError):
        proj.project(np.zeros((3, 4)))
    with pytest.raises(InvalidInputError):
        TightFrameProjector(a=-1.0)


# ---------------------------------------------------------------------------
# gram of a tight frame

def test_gram_tight_projection_structure():
    rng = np.random.default_rng(19)
    proj = GramTightProjector(n=3, a=2.0)
    z = rng.standard_normal((6, 6))
    z = (z + z.T) / 2
    g = proj.project(z)
    w = np.linalg.eigvalsh(g)[::-1]
    np.testing.assert_allclose(w[:3], 2.0, atol=1e-10)
    np.testing.assert_allclose(w[3:], 0.0, atol=1e-10)
    assert proj.contains(g, 1e-8)


def test_gram_tight_optimality_randomized():
    rng = np.random.default_rng(20)
    a = 2.0
    proj = GramTightProjector(n=3, a=a)
    for _ in range(15):
        z = rng.standard_normal((6, 6))
        z = (z + z.T) / 2
        p = proj.project(z)
        members = []
        for _ in range(40):
            q = np.linalg.qr(rng.standard_normal((6, 3)))[0]
            members.append(a * q @ q.T)
        _assert_no_better_member(z, p, members)


def test_gram_tight_degenerate_tie_flag():
    proj = GramTightProjector(n=2, a=1.0)
    g, info = proj.project_info(np.eye(4))
    assert info["degenerate_tie"] is True
    assert info["eigen_gap"] == 0.0
    rng = np.random.default_rng(21)
    z = rng.standard_normal((4, 4))
    z = z + z.T
    _, info = proj.project_info(z)
    assert info["degenerate_tie"] is False
    assert info["eigen_gap"] > 0


def test_gram_tight_rejects_asymmetric():
    proj = GramTightProjector(n=2, a=1.0)
    with pytest.raises(InvalidInputError):
        proj.project(np.array([[1.0, 2.0], [0.0, 1.0]]))


# ---------------------------------------------------------------------------
# bounded coherence

def test_coherence_clips_offdiagonal_and_fixes_diagonal():
    proj = CoherenceProjector(xi=0.5)
    z = np.array([[2.0, 0.9], [0.9, -1.0]])
    h = proj.project(z)
    np.testing.assert_array_equal(np.diag(h), [1.0, 1.0])
    assert h[0, 1] == 0.5
    assert proj.contains(h, 1e-12)
    np.testing.assert_array_equal(proj.project(h), h)


def test_coherence_optimality_randomized():
    rng = np.random.default_rng(22)
    xi = 0.3
    proj = CoherenceProjector(xi=xi)
    for _ in range(15):
        z = rng.standard_normal((5, 5))
        z = (z + z.T) / 2
        p = proj.project(z)
        members = []
        for _ in range(40):
            w = rng.uniform(-xi, xi, (5, 5))
            w = (w + w.T) / 2
            np.fill_diagonal(w, 1.0)
            members.append(w)
        _assert_no_better_member(z, p, members)


def test_coherence_zero_bound_gives_identity():
    proj = CoherenceProjector(xi=0.0)
    rng = np.random.default_rng(23)
    z = rng.standard_normal((3, 3))
    z = (z + z.T) / 2
    np.testing.assert_array_equal(proj.project(z), np.eye(3))


def test_coherence_rejects_bad_bound():
    with pytest.raises(InvalidInputError):
        CoherenceProjector(xi=1.0)
    with pytest.raises(InvalidInputError):
        CoherenceProjector(xi=-0.1)


# ---------------------------------------------------------------------------
# shared estimator surface

def test_projectors_expose_transform_and_params():
    box = BoxProjector(0.0, 1.0)
    z = np.array([[2.0], [-1.0]])
    np.testing.assert_array_equal(box.fit().transform(z), box.project(z))
    params = ColumnNormProjector([1.0, 4.0]).get_params()
    assert "targets" in params
