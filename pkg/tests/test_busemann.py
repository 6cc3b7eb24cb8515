import json

import numpy as np
import pytest

from tropmartin.busemann import (
    BusemannPoint,
    ConfirmationFailed,
    DegenerateDual,
    EuclideanNorm,
    NotAFace,
    PolyhedralNorm,
    busemann_eval,
    enumerate_faces,
    face_from_direction,
    harmonicity_residual,
    is_proper_face,
    nonexpansive_gap,
    norm_eval,
    ray_limit,
)
from tropmartin.core import TropicalError

LINF = PolyhedralNorm.linf(2)  # extremes e1, e2, -e1, -e2
L1 = PolyhedralNorm.l1(2)  # (1,1), (1,-1), (-1,1), (-1,-1)


def idx(N, *vecs):
    D = N.dual_extremes
    return tuple(sorted(int(np.nonzero((D == np.array(v, float)).all(axis=1))[0][0]) for v in vecs))


class TestNorms:
    def test_values(self):
        assert norm_eval(LINF, [3, -1]) == 3
        assert norm_eval(L1, [3, -1]) == 4
        assert norm_eval(LINF, [0, 0]) == 0 and norm_eval(L1, [0, 0]) == 0

    def test_dim_mismatch(self):
        with pytest.raises(TropicalError):
            norm_eval(LINF, [1, 2, 3])

    def test_segment_is_degenerate(self):
        with pytest.raises(DegenerateDual):
            PolyhedralNorm(np.array([[1.0, 0.0], [-1.0, 0.0]]))

    def test_asymmetric_rejected(self):
        with pytest.raises(DegenerateDual):
            PolyhedralNorm(np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]]))

    def test_non_extreme_rejected(self):
        pts = np.vstack([np.eye(2), -np.eye(2), [[0.5, 0.0], [-0.5, 0.0]]])
        with pytest.raises(DegenerateDual):
            PolyhedralNorm(pts)

    def test_load(self, tmp_path):
        p = tmp_path / "hex.json"
        hexagon = [[1, 0], [0, 1], [1, 1], [-1, 0], [0, -1], [-1, -1]]
        p.write_text(json.dumps({"dual_extremes": hexagon}))
        N = PolyhedralNorm.load(p)
        assert N.name == "hex" and len(enumerate_faces(N)) == 12


class TestFaces:
    def test_from_direction(self):
        assert face_from_direction(LINF, [1, 0]) == idx(LINF, [1, 0])
        assert face_from_direction(LINF, [1, 1]) == idx(LINF, [1, 0], [0, 1])
        assert face_from_direction(L1, [1, 0]) == idx(L1, [1, 1], [1, -1])

    def test_zero_direction(self):
        with pytest.raises(TropicalError):
            face_from_direction(LINF, [0, 0])

    def test_linf_count(self):
        faces = enumerate_faces(LINF)
        assert faces.exact and len(faces) == 8
        assert sum(len(f) == 1 for f in faces) == 4 and sum(len(f) == 2 for f in faces) == 4

    def test_l1_count(self):
        assert len(enumerate_faces(L1)) == 8

    def test_three_dimensional(self):
        assert len(enumerate_faces(PolyhedralNorm.linf(3))) == 26
        assert len(enumerate_faces(PolyhedralNorm.l1(3))) == 26

    def test_high_dimension_flagged(self):
        faces = enumerate_faces(PolyhedralNorm.linf(4), samples=2000)
        assert not faces.exact and len(faces) == 80

    def test_angular_sweep_covers(self):
        angles = np.linspace(0, 2 * np.pi, 721)
        swept = {face_from_direction(LINF, [np.cos(a), np.sin(a)]) for a in angles}
        assert swept == set(enumerate_faces(LINF))

    def test_proper_face(self):
        assert is_proper_face(LINF, idx(LINF, [1, 0], [0, 1]))
        assert not is_proper_face(LINF, idx(LINF, [1, 0], [-1, 0]))
        assert not is_proper_face(LINF, range(4))


class TestBusemannPoints:
    def test_single_extreme(self):
        b = BusemannPoint(LINF, idx(LINF, [1, 0]), np.array([3.0, -2.0]))
        pts = np.random.default_rng(0).uniform(-5, 5, (50, 2))
        assert np.allclose(b(pts), pts[:, 0])

    def test_min_form(self):
        b = BusemannPoint(LINF, idx(LINF, [1, 0], [0, 1]))
        assert busemann_eval(b, [2, -1]) == -1 and busemann_eval(b, [0, 0]) == 0

    def test_offset_form(self):
        b = BusemannPoint(LINF, idx(LINF, [1, 0], [0, 1]), np.array([5.0, 0.0]))
        x = np.array([[7.0, 1.0], [0.0, 0.0], [-3.0, 4.0]])
        assert np.allclose(b(x), np.minimum(x[:, 0] - 5, x[:, 1]) + 5)

    def test_euclidean(self):
        b = BusemannPoint(EuclideanNorm(2), direction=np.array([0.0, 2.0]))
        assert b([3.0, 4.0]) == 4.0

    def test_not_a_face(self):
        with pytest.raises(NotAFace):
            BusemannPoint(LINF, idx(LINF, [1, 0], [-1, 0]))

    def test_euclidean_needs_direction(self):
        with pytest.raises(TropicalError):
            BusemannPoint(EuclideanNorm(2))


class TestRayLimit:
    S = np.random.default_rng(1).uniform(-3, 3, (40, 2))

    def test_diagonal(self):
        b = ray_limit(LINF, [0, 0], [1, 1], self.S)
        assert np.allclose(b(self.S), self.S.min(axis=1))

    def test_euclidean_axis(self):
        b = ray_limit(EuclideanNorm(2), [0, 0], [1, 0], self.S)
        assert np.allclose(b(self.S), self.S[:, 0])

    def test_offset(self):
        b = ray_limit(LINF, [5, 0], [1, 1], self.S)
        assert np.allclose(b(self.S), np.minimum(self.S[:, 0] - 5, self.S[:, 1]) + 5)

    def test_short_ray_fails(self):
        with pytest.raises(ConfirmationFailed):
            ray_limit(EuclideanNorm(2), [0, 0], [1, 0], self.S, t_max=10.0)


class TestChecks:
    def test_every_face_nonexpansive_and_harmonic(self):
        rng = np.random.default_rng(2)
        xs, zs = rng.uniform(-4, 4, (1000, 2)), rng.uniform(-4, 4, (1000, 2))
        h = 0.1
        g = np.arange(-100, 101) * h
        grid = np.stack(np.meshgrid(g, g, indexing="ij"), -1).reshape(-1, 2)
        probes = rng.uniform(-3, 3, (10, 2))
        for J in enumerate_faces(LINF):
            b = BusemannPoint(LINF, J, rng.uniform(-1, 1, 2))
            assert nonexpansive_gap(b, xs, zs) <= 1e-12
            assert abs(b(np.zeros(2))) <= 1e-12
            assert harmonicity_residual(b, grid, probes) <= 2 * h
