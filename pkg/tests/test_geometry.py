"""Boxes, shells, and the three-cube isolation cover."""

import numpy as np
import pytest

from loghop import (
    Box,
    ValidationError,
    box_distance,
    chebyshev,
    cover_disjointness_check,
    dangerous_cover,
    out_shell_sites,
)
from loghop.geometry import DangerousCover, clamp_center


def test_box_basics():
    b = Box((1, -2), 3)
    assert b.dim == 2
    assert b.n_sites == 49
    assert b.diameter == 6  # max chebyshev distance between two sites
    with pytest.raises(ValidationError):
        Box((0,), -1)


def test_sites_lexicographic_order():
    b = Box((0, 0), 1)
    s = b.sites()
    # last coordinate fastest, rows sorted lexicographically
    expected = [(i, j) for i in (-1, 0, 1) for j in (-1, 0, 1)]
    assert [tuple(r) for r in s] == expected


def test_index_of_roundtrip():
    b = Box((2, -1, 0), 2)
    s = b.sites()
    np.testing.assert_array_equal(b.index_of(s), np.arange(b.n_sites))
    with pytest.raises(ValidationError):
        b.index_of(np.array([[9, 0, 0]]))


def test_contains():
    b = Box((0, 0), 4)
    assert b.contains_box(Box((1, 1), 3))
    assert not b.contains_box(Box((2, 0), 3))
    inside = b.contains_sites(np.array([[4, 4], [5, 0]]))
    np.testing.assert_array_equal(inside, [True, False])


def test_chebyshev_and_box_distance():
    assert chebyshev((0, 0), (3, -5)) == 5
    assert box_distance(Box((0,), 2), Box((10,), 3)) == 5
    assert box_distance(Box((0,), 4), Box((3,), 2)) == 0


def test_out_shell_examples():
    # d=1, L=2: the inner threshold 2^{4/5} < 2 keeps only |y| = 2
    s = out_shell_sites(Box((0,), 2))
    assert sorted(v[0] for v in s) == [-2, 2]
    # d=1, L=16: 16^{4/5} = 9.19 so the shell is 10 <= |y| <= 16
    s = out_shell_sites(Box((0,), 16))
    assert sorted(abs(v[0]) for v in s)[0] == 10
    assert len(s) == 2 * 7
    # d=2, L=2: full perimeter, 16 sites
    s = out_shell_sites(Box((0, 0), 2))
    assert len(s) == 16
    assert all(np.abs(v).max() == 2 for v in s)
    # centered boxes translate
    s = out_shell_sites(Box((5,), 2))
    assert sorted(v[0] for v in s) == [3, 7]


def test_out_shell_precondition():
    with pytest.raises(ValidationError, match="L >= 2"):
        out_shell_sites(Box((0,), 1))


def test_clamp_examples():
    # d=1: z=9 with L=10, margin 2 clamps to 8
    assert clamp_center((9,), (0,), 10, 2) == (8,)
    # d=2: componentwise
    assert clamp_center((9, -10), (0, 0), 10, 2) == (8, -8)
    # interior points are untouched
    assert clamp_center((3, 0), (0, 0), 10, 2) == (3, 0)
    with pytest.raises(ValidationError, match="margin <= L"):
        clamp_center((0,), (0,), 3, 5)


def test_cover_empty_and_single():
    parent = Box((0,), 30)
    cov = dangerous_cover([], parent, 1)
    assert cov.case == "empty"
    assert cov.cubes == ()
    cov = dangerous_cover([(4,)], parent, 1)
    assert cov.case == "separated"
    assert [(c.center, c.radius) for c in cov.cubes] == [((4,), 2)]


def test_cover_merged_pair_example():
    # centers -2 and 0 are close at l=1 and merge at the parity midpoint -1
    parent = Box((0,), 30)
    cov = dangerous_cover([(-2,), (0,), (20,)], parent, 1)
    assert cov.case == "merged-pair"
    got = sorted((c.center, c.radius) for c in cov.cubes)
    assert got == [((-1,), 8), ((20,), 2)]


def test_parity_midpoint_rounds_up_on_odd_sums():
    parent = Box((0,), 30)
    cov = dangerous_cover([(0,), (1,)], parent, 1)
    big = max(cov.cubes, key=lambda c: c.radius)
    assert big.center == (1,)  # (0 + 1 + 1) // 2


def test_cover_merged_all():
    parent = Box((0,), 60)
    cov = dangerous_cover([(-9,), (0,), (9,)], parent, 2)
    assert cov.case == "merged-all"
    assert len(cov.cubes) == 1
    assert cov.cubes[0].radius == 52


def test_cover_contains_doubled_cubes():
    rng = np.random.default_rng(11)
    for d in (1, 2):
        parent = Box((0,) * d, 30)
        for _ in range(50):
            k = int(rng.integers(0, 4))
            centers = [
                tuple(int(v) for v in rng.integers(-29, 30, size=d)) for _ in range(k)
            ]
            cov = dangerous_cover(centers, parent, 1)
            for z in centers:
                doubled = Box(z, 2).sites()
                clipped = doubled[parent.contains_sites(doubled)]
                assert cov.covers(clipped).all()
            for c in cov.cubes:
                assert parent.contains_box(c)
            assert cov.total_diameter <= 52 * 1


def test_cover_too_many_centers():
    with pytest.raises(ValidationError):
        dangerous_cover([(0,), (10,), (-10,), (20,)], Box((0,), 30), 1)


def test_cover_parent_too_small():
    with pytest.raises(ValidationError):
        dangerous_cover([(0,)], Box((0,), 20), 1)  # needs radius >= 26


def test_disjointness_check_passes():
    parent = Box((0,), 30)
    centers = [(-2,), (0,), (20,)]
    cov = dangerous_cover(centers, parent, 1)
    res = cover_disjointness_check(cov, centers, 1)
    assert res.ok
    assert res.witness is None
    assert res.n_checked > 0


def test_disjointness_check_catches_shrunken_cover():
    # replacing the merged 8l cube by the bare 2l cubes leaves two cover
    # cubes that overlap, violating the pairwise separation invariant
    parent = Box((0,), 30)
    centers = [(-2,), (0,)]
    good = dangerous_cover(centers, parent, 1)
    assert cover_disjointness_check(good, centers, 1).separated
    bad = DangerousCover(
        cubes=(Box((-2,), 2), Box((0,), 2)),
        parent=parent, scale=1, bad_centers=tuple(centers),
        clamped=good.clamped, case="separated",
    )
    res = cover_disjointness_check(bad, centers, 1)
    assert not res.ok
    assert not res.separated
    assert res.close_pair == ((-2,), (0,))


def test_disjointness_randomized():
    rng = np.random.default_rng(5)
    for d in (1, 2):
        parent = Box((0,) * d, 30)
        for _ in range(20):
            k = int(rng.integers(1, 4))
            centers = [
                tuple(int(v) for v in rng.integers(-29, 30, size=d)) for _ in range(k)
            ]
            cov = dangerous_cover(centers, parent, 1)
            assert cover_disjointness_check(cov, centers, 1).ok
