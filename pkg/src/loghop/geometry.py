"""Lattice boxes, boundary shells, and the dangerous-cube cover.

Boxes are sup-norm balls B_L(x) = {y : |y - x|_inf <= L} on Z^d.  The cover
construction isolates up to three bad small-scale centers inside a parent
box with at most three well-separated cubes of radius 2l, 8l, or 26l, such
that any small cube centered outside the cover is disjoint from every bad
small cube.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


@dataclass
class Box:
    center: tuple
    radius: int

    def __post_init__(self) -> None:
        self.center = tuple(int(c) for c in np.atleast_1d(self.center))
        self.radius = int(self.radius)
        if self.radius < 0:
            raise ValidationError(f'violates "L >= 0": L={self.radius}')

    @property
    def dim(self) -> int:
        return len(self.center)

    @property
    def n_sites(self) -> int:
        return (2 * self.radius + 1) ** self.dim

    @property
    def diameter(self) -> int:
        return 2 * self.radius

    def sites(self) -> np.ndarray:
        """All sites as an (n_sites, d) int array in lexicographic order."""
        axes = [np.arange(c - self.radius, c + self.radius + 1) for c in self.center]
        grid = np.meshgrid(*axes, indexing="ij")
        return np.stack([g.ravel() for g in grid], axis=-1)

    def index_of(self, pts) -> np.ndarray:
        """Row indices of sites in the lexicographic ordering (vectorized)."""
        a = np.atleast_2d(np.asarray(pts, dtype=np.int64))
        side = 2 * self.radius + 1
        offs = a - (np.asarray(self.center, dtype=np.int64) - self.radius)
        if (offs < 0).any() or (offs >= side).any():
            raise ValidationError("site outside the box has no index")
        idx = np.zeros(len(a), dtype=np.int64)
        for k in range(a.shape[1]):
            idx = idx * side + offs[:, k]
        return idx

    def contains_sites(self, pts) -> np.ndarray:
        a = np.atleast_2d(np.asarray(pts, dtype=np.int64))
        c = np.asarray(self.center, dtype=np.int64)
        return np.max(np.abs(a - c), axis=1) <= self.radius

    def contains_box(self, other: "Box") -> bool:
        gap = chebyshev(self.center, other.center)
        return gap <= self.radius - other.radius


def chebyshev(a, b) -> int:
    """Sup-norm distance between two sites."""
    return int(np.max(np.abs(np.asarray(a, dtype=np.int64) - np.asarray(b, dtype=np.int64))))


def box_distance(a: Box, b: Box) -> int:
    """dist(B_a, B_b) = max(0, |center gap| - radii sum) in the sup-norm."""
    return max(0, chebyshev(a.center, b.center) - a.radius - b.radius)


def out_shell_sites(box: Box) -> np.ndarray:
    """Sites with L^(4/5) < |y - center| <= L."""
    if box.radius < 2:
        raise ValidationError(f'violates "L >= 2": L={box.radius}')
    cut = float(box.radius) ** 0.8
    pts = box.sites()
    r = np.max(np.abs(pts - np.asarray(box.center, dtype=np.int64)), axis=1)
    return pts[r > cut]


def clamp_center(z, x, radius: int, margin: int):
    """Componentwise clamp of z into the box of radius (L - margin) around x."""
    if margin > radius:
        raise ValidationError(f'violates "margin <= L": margin={margin}, L={radius}')
    z = np.asarray(z, dtype=np.int64)
    x = np.asarray(x, dtype=np.int64)
    lo, hi = x - (radius - margin), x + (radius - margin)
    return tuple(int(v) for v in np.clip(z, lo, hi))


def _parity_midpoint(a, b) -> tuple:
    """Integer midpoint; odd coordinate sums round up by one half."""
    s = np.asarray(a, dtype=np.int64) + np.asarray(b, dtype=np.int64)
    return tuple(int(v) for v in (s + (s % 2)) // 2)


@dataclass
class DangerousCover:
    cubes: tuple  # up to 3 Box values
    parent: Box
    scale: int  # the small scale l
    bad_centers: tuple
    clamped: tuple  # the 2l-margin clamps z_i* of the bad centers
    case: str  # "empty" | "separated" | "merged-pair" | "merged-all"

    @property
    def radii(self) -> tuple:
        return tuple(c.radius for c in self.cubes)

    @property
    def total_diameter(self) -> int:
        return sum(c.diameter for c in self.cubes)

    def covers(self, pts) -> np.ndarray:
        a = np.atleast_2d(np.asarray(pts, dtype=np.int64))
        hit = np.zeros(len(a), dtype=bool)
        for cube in self.cubes:
            hit |= cube.contains_sites(a)
        return hit


def dangerous_cover(bad_centers, parent: Box, l: int) -> DangerousCover:
    """Cover up to three bad l-cube centers by separated 2l/8l/26l cubes.

    Case analysis: clamp each center with margin 2l; if two of the 2l-cubes
    come closer than 2l, merge them through the parity midpoint clamped with
    margin 8l; if that 8l-cube comes closer than 2l to the remaining
    center's 8l-clamp, merge everything into a single cube clamped with
    margin 26l.  The resulting cubes are pairwise >= 2l apart, contain every
    B_2l(z_i*), total at most 52l of diameter, and stay inside the parent.
    """
    if l < 1:
        raise ValidationError(f'violates "l >= 1": l={l}')
    if parent.radius < 26 * l:
        raise ValidationError(
            f'violates "L >= 26l" (merge cases must fit): L={parent.radius}, l={l}'
        )
    centers = [tuple(int(c) for c in np.atleast_1d(z)) for z in bad_centers]
    if len(centers) > 3:
        raise ValidationError(f"at most 3 bad centers are coverable, got {len(centers)}")
    for z in centers:
        if chebyshev(z, parent.center) > parent.radius - l:
            raise ValidationError(f"bad cube at {z} is not contained in the parent box")

    L, x = parent.radius, parent.center
    star = [clamp_center(z, x, L, 2 * l) for z in centers]
    small = [Box(zs, 2 * l) for zs in star]

    if not centers:
        return DangerousCover((), parent, l, (), (), "empty")

    close = [
        (i, j)
        for i in range(len(small))
        for j in range(i + 1, len(small))
        if box_distance(small[i], small[j]) < 2 * l
    ]
    if not close:
        return DangerousCover(tuple(small), parent, l, tuple(centers), tuple(star), "separated")

    i, j = close[0]
    k = next((m for m in range(len(small)) if m not in (i, j)), None)
    merged = Box(clamp_center(_parity_midpoint(star[i], star[j]), x, L, 8 * l), 8 * l)
    if k is None:
        return DangerousCover((merged,), parent, l, tuple(centers), tuple(star), "merged-pair")

    third_star = small[k]
    third_wide = Box(clamp_center(star[k], x, L, 8 * l), 8 * l)
    if box_distance(merged, third_wide) >= 2 * l:
        return DangerousCover(
            (merged, third_star), parent, l, tuple(centers), tuple(star), "merged-pair"
        )
    total = Box(
        clamp_center(_parity_midpoint(merged.center, third_wide.center), x, L, 26 * l), 26 * l
    )
    return DangerousCover((total,), parent, l, tuple(centers), tuple(star), "merged-all")


@dataclass
class CoverCheckResult:
    ok: bool
    n_checked: int
    witness: tuple | None  # first z whose l-cube meets a bad l-cube
    separated: bool = True
    close_pair: tuple | None = None  # centers of two cover cubes closer than 2l


def cover_disjointness_check(cover: DangerousCover, bad_centers, l: int) -> CoverCheckResult:
    """Exhaustively verify the cover conclusion.

    Two parts.  Isolation: every z in the parent with |z - x| <= L - l that
    lies outside all cover cubes must have B_l(z) disjoint from every
    B_l(z_i), i.e. stay at least 2l+1 away from every bad center.
    Separation: distinct cover cubes keep box distance >= 2l, which is what
    the pair merging exists to restore; without it a cover made of the bare
    doubled cubes would pass the isolation part vacuously.
    """
    separated = True
    close_pair = None
    cubes = cover.cubes
    for i in range(len(cubes)):
        for j in range(i + 1, len(cubes)):
            if box_distance(cubes[i], cubes[j]) < 2 * l:
                separated = False
                close_pair = (cubes[i].center, cubes[j].center)
    parent = cover.parent
    pts = Box(parent.center, parent.radius - l).sites()
    pts = pts[~cover.covers(pts)]
    if len(pts) == 0 or not bad_centers:
        return CoverCheckResult(separated, len(pts), None, separated, close_pair)
    ok = np.ones(len(pts), dtype=bool)
    for z in bad_centers:
        gap = np.max(np.abs(pts - np.asarray(z, dtype=np.int64)), axis=1)
        ok &= gap >= 2 * l + 1
    bad_idx = np.nonzero(~ok)[0]
    witness = tuple(int(v) for v in pts[bad_idx[0]]) if bad_idx.size else None
    isolated = not bad_idx.size
    return CoverCheckResult(
        isolated and separated, len(pts), witness, separated, close_pair
    )
