"""Co-occurrence matrices and texture statistics against brute-force oracles."""

import math

import numpy as np
import pytest

from cishtex.errors import NoValidPairs
from cishtex.imaging import Channel, ChannelPlane
from cishtex.texture import (Glcm, compute_glcm, default_directions,
                             extract_features, feature_columns,
                             haralick_features)
from cishtex.tiling import Tile, TileSpec

from conftest import checkerboard, full_tile, make_image
from oracles import naive_glcm, naive_haralick
from cishtex.imaging import full_mask


def plane_of(levels: np.ndarray, g: int) -> ChannelPlane:
    return ChannelPlane(channel=Channel.BRIGHTNESS,
                        levels=levels.astype(np.uint8), gray_levels=g)


def random_tile(rng, h, w, density=0.9) -> Tile:
    member = rng.random((h, w)) < density
    if not member.any():
        member[0, 0] = member[0, 1] = True
    return Tile(tile_id=0, cx_px=w // 2, cy_px=h // 2, radius_px=float(h + w),
                x0=0, y0=0, member=member)


class TestComputeGlcm:
    def test_constant_tile(self):
        levels = np.full((5, 5), 3, dtype=np.uint8)
        g = compute_glcm(plane_of(levels, 8), full_tile((5, 5)))
        expected = np.zeros((8, 8))
        expected[3, 3] = 1.0
        assert np.array_equal(g.p, expected)

    def test_checkerboard_single_direction(self):
        levels = (np.indices((4, 4)).sum(axis=0) % 2).astype(np.uint8)
        g = compute_glcm(plane_of(levels, 2), full_tile((4, 4)),
                         d=1, directions=((1, 0),))
        # 12 horizontal pairs, all mixed
        assert g.p.tolist() == [[0.0, 0.5], [0.5, 0.0]]

    def test_two_by_two_four_directions(self):
        levels = np.array([[0, 1], [0, 1]], dtype=np.uint8)
        g = compute_glcm(plane_of(levels, 2), full_tile((2, 2)), d=1)
        # 6 pairs symmetrized over 12 ordered entries:
        # horizontal (0,1)x2, vertical (0,0) and (1,1), diagonals (0,1),(1,0)
        assert g.p.tolist() == [[1 / 6, 1 / 3], [1 / 3, 1 / 6]]
        ref, _total = naive_glcm(levels.tolist(), [[True] * 2] * 2,
                                 default_directions(1), 2)
        assert np.allclose(g.p, ref, atol=1e-15)

    @pytest.mark.parametrize("g_levels", [2, 8, 127])
    def test_matches_pair_enumeration(self, g_levels):
        rng = np.random.default_rng(g_levels)
        for _ in range(5):
            levels = rng.integers(0, g_levels, size=(12, 14))
            tile = random_tile(rng, 12, 14, density=0.75)
            got = compute_glcm(plane_of(levels, g_levels), tile)
            ref, total = naive_glcm(levels.tolist(), tile.member.tolist(),
                                    default_directions(1), g_levels)
            assert np.allclose(got.p, ref, atol=1e-15)
            assert total > 0

    def test_sums_to_one_and_symmetric(self):
        rng = np.random.default_rng(9)
        levels = rng.integers(0, 127, size=(40, 40))
        g = compute_glcm(plane_of(levels, 127), full_tile((40, 40)))
        assert abs(g.p.sum() - 1.0) < 1e-9
        assert np.array_equal(g.p, g.p.T)

    def test_no_valid_pairs(self):
        member = np.zeros((5, 5), dtype=bool)
        member[0, 0] = member[4, 4] = True  # further apart than d=1 reaches
        tile = Tile(tile_id=7, cx_px=2, cy_px=2, radius_px=4.0, x0=0, y0=0,
                    member=member)
        with pytest.raises(NoValidPairs):
            compute_glcm(plane_of(np.zeros((5, 5)), 2), tile)

    def test_larger_distance(self):
        levels = np.arange(4, dtype=np.uint8).reshape(1, 4)
        g = compute_glcm(plane_of(levels, 4), full_tile((1, 4)),
                         d=2, directions=((2, 0),))
        # pairs (0,2) and (1,3), symmetrized over 4 entries
        assert g.p[0, 2] == g.p[2, 0] == 0.25
        assert g.p[1, 3] == g.p[3, 1] == 0.25


class TestHaralickFeatures:
    def test_diagonal_half(self):
        f = haralick_features(Glcm(gray_levels=2, p=np.diag([0.5, 0.5])))
        assert f[0] == 0.5
        assert f[1] == 0.0
        assert f[2] == 1.0
        assert f[4] == 1.0
        assert f[8] == math.log(2)
        assert np.allclose(f, naive_haralick([[0.5, 0.0], [0.0, 0.5]]), atol=1e-15)

    def test_antidiagonal_half(self):
        p = np.array([[0.0, 0.5], [0.5, 0.0]])
        f = haralick_features(Glcm(gray_levels=2, p=p))
        assert f[0] == 0.5
        assert f[1] == 1.0
        assert f[2] == -1.0
        assert f[4] == 0.5  # 0.5/(1+1) from each off-diagonal cell
        assert np.allclose(f, naive_haralick(p.tolist()), atol=1e-15)

    def test_single_entry(self):
        p = np.zeros((2, 2))
        p[0, 0] = 1.0
        f = haralick_features(Glcm(gray_levels=2, p=p))
        assert f[0] == 1.0
        assert f[1] == 0.0
        assert f[2] == 0.0  # zero-variance convention
        assert f[8] == 0.0

    @pytest.mark.parametrize("g", [2, 8, 127])
    def test_oracle_equivalence(self, g):
        rng = np.random.default_rng(1000 + g)
        for _ in range(10):
            m = rng.random((g, g))
            p = m + m.T
            p /= p.sum()
            f = haralick_features(Glcm(gray_levels=g, p=p))
            ref = naive_haralick(p.tolist())
            assert np.allclose(f, ref, rtol=0, atol=1e-10)

    def test_reversal_relabeling_invariance(self):
        rng = np.random.default_rng(31)
        stable = [0, 1, 3, 4, 6, 7, 8, 9, 10]
        for _ in range(20):
            g = int(rng.integers(2, 16))
            m = rng.random((g, g))
            p = m + m.T
            p /= p.sum()
            f = haralick_features(Glcm(gray_levels=g, p=p))
            f_rev = haralick_features(Glcm(gray_levels=g, p=p[::-1, ::-1].copy()))
            assert np.allclose(f[stable], f_rev[stable], atol=1e-12)
            assert abs(abs(f[2]) - abs(f_rev[2])) < 1e-12

    def test_bounds(self):
        rng = np.random.default_rng(32)
        for _ in range(50):
            g = int(rng.integers(2, 20))
            m = rng.random((g, g)) * (rng.random((g, g)) < 0.4)
            p = m + m.T
            if p.sum() == 0:
                continue
            p /= p.sum()
            f = haralick_features(Glcm(gray_levels=g, p=p))
            assert 0 < f[0] <= 1
            assert f[1] >= 0
            assert -1 - 1e-12 <= f[2] <= 1 + 1e-12
            assert 0 < f[4] <= 1
            assert f[8] >= 0
            assert 0 <= f[12] < 1

    def test_energy_one_iff_single_entry(self):
        p = np.zeros((4, 4))
        p[2, 2] = 1.0
        assert haralick_features(Glcm(gray_levels=4, p=p))[0] == 1.0
        q = np.zeros((4, 4))
        q[0, 1] = q[1, 0] = 0.5
        assert haralick_features(Glcm(gray_levels=4, p=q))[0] < 1.0


class TestExtractFeatures:
    def test_uniform_image_single_tile(self):
        img = make_image(np.full((300, 300), 128, dtype=np.uint8))
        result = extract_features(img, full_mask(img), TileSpec(), gray_levels=127)
        assert len(result.vectors) == 1
        values = result.vectors[0].values
        cols = feature_columns()
        by_name = dict(zip(cols, values))
        # both planes constant: energy 1, entropy 0 on each
        assert by_name["F0_B"] == 1.0
        assert by_name["F8_B"] == 0.0
        assert by_name["F0_S"] == 1.0

    def test_checkerboard_brightness_constant_saturation(self):
        img = make_image(checkerboard(300, 300, 0, 255))
        result = extract_features(img, full_mask(img), TileSpec(),
                                  gray_levels=2, directions=((1, 0),))
        by_name = dict(zip(feature_columns(), result.vectors[0].values))
        assert by_name["F1_B"] == 1.0  # strict checkerboard, horizontal pairs all mixed
        assert by_name["F1_S"] == 0.0  # saturation plane constant
        assert result.skipped_tile_ids == []

    def test_600_grid_yields_four_vectors(self, gray_600):
        result = extract_features(gray_600, full_mask(gray_600), TileSpec(),
                                  gray_levels=127)
        assert [v.tile_id for v in result.vectors] == [0, 1, 2, 3]
        assert all(v.values.shape == (26,) for v in result.vectors)

    def test_vectors_align_with_tiles(self, gray_600):
        result = extract_features(gray_600, full_mask(gray_600), TileSpec(),
                                  gray_levels=8)
        assert [t.tile_id for t in result.tiles] == [v.tile_id for v in result.vectors]

    def test_fragmented_tile_skipped_and_counted(self):
        from cishtex.imaging import TissueMask

        img = make_image(np.full((300, 600), 128, dtype=np.uint8))
        inside = np.zeros((300, 600), dtype=bool)
        inside[:, :200] = True  # solid region inside tile 0 only
        # the rest: isolated pixels two apart, no neighbor at distance 1
        inside[0:300:2, 200:600:2] = True
        mask = TissueMask(width_px=600, height_px=300, inside=inside)
        result = extract_features(img, mask, TileSpec(min_mask_fraction=0.2),
                                  gray_levels=8)
        # tile 1 (center x=350) sees only the isolated pixels
        assert [v.tile_id for v in result.vectors] == [0]
        assert result.skipped_tile_ids == [1]
