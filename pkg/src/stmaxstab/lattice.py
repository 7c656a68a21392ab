"""Regular-grid geometry: sites, lag sets and pair-class enumeration.

Sites live on the unit-spaced grid {1..n} x {1..n}. Spatial distances are
always compared through the *squared* distance as an integer, so lag classes
are exact (no floating-point binning). Pairs are unordered and deduplicated;
closed-form counts therefore refer to unordered pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import InvalidArgs, UnrealizableLag, UnsupportedLag

_SQ_TOL = 1e-6


def squared_lag(h: float) -> int:
    """Round h^2 to the underlying integer squared distance."""
    if h < 0:
        raise InvalidArgs(f"negative spatial lag {h}")
    d = round(h * h)
    if abs(h * h - d) > _SQ_TOL:
        raise UnrealizableLag(f"h={h} is not realizable on a unit grid (h^2 not integral)")
    return int(d)


@dataclass(frozen=True)
class GridSpec:
    """Side length of the regular n x n grid."""

    n: int

    def __post_init__(self):
        if self.n < 2:
            raise InvalidArgs(f"grid side must be >= 2, got {self.n}")

    @property
    def nsites(self) -> int:
        return self.n * self.n

    def site_index(self, x: int, y: int) -> int:
        return (x - 1) * self.n + (y - 1)


@dataclass(frozen=True)
class LagSets:
    """Spatial distance set H and temporal lag set K used for estimation."""

    H: tuple[float, ...]
    K: tuple[int, ...]

    def __post_init__(self):
        hs = [squared_lag(h) for h in self.H]
        if len(set(hs)) != len(hs):
            raise InvalidArgs("duplicate spatial lags in H")
        if sorted(hs) != hs:
            raise InvalidArgs("H must be sorted increasing")
        for d in hs:
            if not _sum_two_squares(d):
                raise UnrealizableLag(f"h^2={d} is not a sum of two integer squares")
        ks = list(self.K)
        if any(k <= 0 or int(k) != k for k in ks):
            raise InvalidArgs("temporal lags must be positive integers")
        if sorted(set(ks)) != ks:
            raise InvalidArgs("K must be sorted, distinct")


#: Default estimation lags: the ten shortest realizable distances on the
#: unit grid, and temporal lags 1..10.
DEFAULT_H = (1.0, math.sqrt(2), 2.0, math.sqrt(5), math.sqrt(8), 3.0,
             math.sqrt(10), math.sqrt(13), 4.0, math.sqrt(17))
DEFAULT_K = tuple(range(1, 11))


def default_lag_sets() -> LagSets:
    return LagSets(DEFAULT_H, DEFAULT_K)


def _sum_two_squares(d: int) -> bool:
    for a in range(int(math.isqrt(d)) + 1):
        b2 = d - a * a
        r = math.isqrt(b2)
        if r * r == b2:
            return True
    return False


@dataclass(frozen=True)
class PairClass:
    """All unordered pairs realizing one (h, l') lag class.

    ``i`` and ``j`` are parallel flat index arrays; spatial indices are
    row-major over the grid, space-time indices are site*T + time offsets as
    produced by the enumerators below.
    """

    h: float
    lag_t: int
    i: np.ndarray = field(repr=False)
    j: np.ndarray = field(repr=False)

    @property
    def count(self) -> int:
        return int(self.i.size)

    @property
    def pairs(self) -> list[tuple[int, int]]:
        return list(zip(self.i.tolist(), self.j.tolist()))


@lru_cache(maxsize=None)
def _half_plane_displacements(sq: int) -> tuple[tuple[int, int], ...]:
    """Canonical displacement vectors (one per unordered direction)."""
    out = []
    for dx in range(-int(math.isqrt(sq)), int(math.isqrt(sq)) + 1):
        b2 = sq - dx * dx
        if b2 < 0:
            continue
        dy = math.isqrt(b2)
        if dy * dy != b2:
            continue
        # keep (dx, dy) with dy > 0, or dy == 0 and dx > 0
        if dy > 0:
            out.append((dx, dy))
        elif dx > 0:
            out.append((dx, 0))
    return tuple(out)


def ordered_displacements(sq: int) -> tuple[tuple[int, int], ...]:
    """Every nonzero integer displacement with |d|^2 = sq."""
    half = _half_plane_displacements(sq)
    return tuple(half + tuple((-dx, -dy) for dx, dy in half))


def _placements(n: int, dx: int, dy: int) -> tuple[np.ndarray, np.ndarray]:
    """Flat site indices (a, b) for all pairs with s_b - s_a = (dx, dy)."""
    xs = np.arange(max(1, 1 - dx), min(n, n - dx) + 1)
    ys = np.arange(max(1, 1 - dy), min(n, n - dy) + 1)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    a = (X.ravel() - 1) * n + (Y.ravel() - 1)
    b = (X.ravel() + dx - 1) * n + (Y.ravel() + dy - 1)
    return a, b


@lru_cache(maxsize=None)
def _spatial_pairs_cached(n: int, sq: int) -> tuple[np.ndarray, np.ndarray]:
    ii, jj = [], []
    for dx, dy in _half_plane_displacements(sq):
        a, b = _placements(n, dx, dy)
        ii.append(a)
        jj.append(b)
    if not ii or sum(a.size for a in ii) == 0:
        raise UnrealizableLag(f"no site pair at squared distance {sq} on a {n}x{n} grid")
    return np.concatenate(ii), np.concatenate(jj)


def enumerate_spatial_pairs(grid: GridSpec, h: float) -> PairClass:
    """Unordered site pairs at exact Euclidean distance h (per time slice)."""
    sq = squared_lag(h)
    if sq == 0:
        raise InvalidArgs("spatial lag must be positive")
    i, j = _spatial_pairs_cached(grid.n, sq)
    return PairClass(h=h, lag_t=0, i=i, j=j)


#: closed-form unordered per-slice pair counts, keyed by h^2 (Table of lags).
_TABLE_COUNTS = {
    1: lambda n: 2 * n * (n - 1),
    2: lambda n: 2 * (n - 1) ** 2,
    4: lambda n: 2 * n * (n - 2),
    5: lambda n: 4 * (n - 1) * (n - 2),
    8: lambda n: 2 * (n - 2) ** 2,
    9: lambda n: 2 * n * (n - 3),
    10: lambda n: 4 * (n - 1) * (n - 3),
    13: lambda n: 4 * (n - 2) * (n - 3),
    16: lambda n: 2 * n * (n - 4),
    17: lambda n: 4 * (n - 1) * (n - 4),
}


def count_pairs(n: int, h: float) -> int:
    """Closed-form per-slice unordered pair count for the ten tabulated lags."""
    sq = squared_lag(h)
    if sq not in _TABLE_COUNTS:
        raise UnsupportedLag(f"h^2={sq} outside the closed-form table; enumerate instead")
    return _TABLE_COUNTS[sq](n)


def enumerate_spacetime_pairs(grid: GridSpec, T: int, h: float, lag_t: int) -> PairClass:
    """Unordered space-time pairs with ||s_i-s_j|| = h and |t_i-t_j| = lag_t.

    Flat space-time index is site_index * T + (t - 1). For lag_t > 0 each
    pair is stored with its earlier time first, so (i, j) also encodes the
    oriented displacement (s_j - s_i, +lag_t).
    """
    if lag_t < 0 or int(lag_t) != lag_t:
        raise InvalidArgs("temporal lag must be a nonnegative integer")
    if T < lag_t + 1:
        raise InvalidArgs(f"T={T} too short for temporal lag {lag_t}")
    sq = squared_lag(h)
    if sq == 0 and lag_t == 0:
        raise InvalidArgs("(h, l') = (0, 0) is not a pair class")
    n = grid.n
    t0 = np.arange(T - lag_t)
    if sq == 0:
        sites = np.arange(n * n)
        i = (sites[:, None] * T + t0[None, :]).ravel()
        j = i + lag_t
    elif lag_t == 0:
        a, b = _spatial_pairs_cached(n, sq)
        i = (a[:, None] * T + np.arange(T)[None, :]).ravel()
        j = (b[:, None] * T + np.arange(T)[None, :]).ravel()
    else:
        a, b = _spatial_pairs_cached(n, sq)
        # both orientations of the spatial displacement pair with +lag_t
        aa = np.concatenate([a, b])
        bb = np.concatenate([b, a])
        i = (aa[:, None] * T + t0[None, :]).ravel()
        j = (bb[:, None] * T + t0[None, :]).ravel() + lag_t
    return PairClass(h=h, lag_t=lag_t, i=i, j=j)


def enumerate_oriented_pairs(grid: GridSpec, T: int, dvec: tuple[int, int],
                             lag_t: int) -> PairClass:
    """Pairs with oriented displacement s_j - s_i = dvec and t_j - t_i = lag_t.

    For lag_t == 0 the class is unordered (dvec and -dvec give the same
    pairs); pass a canonical representative. Flat index site*T + (t - 1).
    """
    dx, dy = int(dvec[0]), int(dvec[1])
    if lag_t < 0 or int(lag_t) != lag_t:
        raise InvalidArgs("temporal lag must be a nonnegative integer")
    if T < lag_t + 1:
        raise InvalidArgs(f"T={T} too short for temporal lag {lag_t}")
    if dx == 0 and dy == 0 and lag_t == 0:
        raise InvalidArgs("(0, 0) displacement at lag 0 is not a pair class")
    a, b = _placements(grid.n, dx, dy)
    if a.size == 0:
        raise UnrealizableLag(
            f"no site pair with displacement {(dx, dy)} on a {grid.n}x{grid.n} grid")
    t0 = np.arange(T - lag_t)
    i = (a[:, None] * T + t0[None, :]).ravel()
    j = (b[:, None] * T + t0[None, :]).ravel() + lag_t
    return PairClass(h=float(math.hypot(dx, dy)), lag_t=int(lag_t), i=i, j=j)


def count_spacetime_pairs(grid: GridSpec, T: int, h: float, lag_t: int) -> int:
    """Pair count of enumerate_spacetime_pairs without materializing it."""
    sq = squared_lag(h)
    if sq == 0:
        return grid.nsites * (T - lag_t)
    per_slice = _spatial_pairs_cached(grid.n, sq)[0].size
    if lag_t == 0:
        return per_slice * T
    return 2 * per_slice * (T - lag_t)


def direction_classes(grid: GridSpec, h: float) -> list[tuple[tuple[int, int], float]]:
    """Oriented displacement vectors at distance h with their pair-count weights.

    Weights are normalized to sum to 1; used to direction-average model
    dependence values over a scalar lag class for anisotropic families.
    """
    sq = squared_lag(h)
    n = grid.n
    out = []
    total = 0
    for dx, dy in ordered_displacements(sq):
        c = max(0, n - abs(dx)) * max(0, n - abs(dy))
        if c > 0:
            out.append([(dx, dy), c])
            total += c
    if not out:
        raise UnrealizableLag(f"no pair at distance {h} on a {n}x{n} grid")
    return [(d, c / total) for d, c in out]
