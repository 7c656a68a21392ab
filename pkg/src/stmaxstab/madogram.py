"""Nonparametric F-madogram estimators on gridded space-time fields.

For a pair class B the estimator is nu_hat = (1/(2|B|)) * sum over unordered
pairs of |F(X_i) - F(X_j)|, with F the standard Frechet CDF (or per-site
empirical ranks in rank mode). Purely spatial classes pool all time slices,
purely temporal classes pool all sites, and mixed classes use both spatial
orientations of each displacement, so the three estimators agree wherever
their pair classes coincide. Pairs containing missing values are dropped
from both the sum and the count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidArgs
from .fields import SpaceTimeField
from .errors import UnrealizableLag
from .lattice import (DEFAULT_H, DEFAULT_K, GridSpec, _half_plane_displacements,
                      enumerate_oriented_pairs, enumerate_spacetime_pairs,
                      ordered_displacements, squared_lag)


def frechet_cdf(x):
    """Standard Frechet CDF F(x) = exp(-1/x) for x > 0."""
    x = np.asarray(x, dtype=float)
    if np.any(x[~np.isnan(x)] <= 0):
        raise InvalidArgs("Frechet CDF requires x > 0")
    return np.exp(-1.0 / x)


@dataclass(frozen=True)
class MadogramEstimate:
    """One pair-class estimate; h or lag_t is None for a pure lag.

    ``hvec`` is set for oriented vector-lag classes (anisotropic fitting),
    in which case h is its norm.
    """

    h: float | None
    lag_t: int | None
    value: float
    npairs: int
    hvec: tuple[float, float] | None = None

    def __post_init__(self):
        if self.npairs < 1:
            raise InvalidArgs("pair class is empty after missing-value drops")
        if not 0.0 <= self.value <= 0.5:
            raise InvalidArgs(f"madogram value {self.value} outside [0, 1/2]")

    @property
    def lag(self) -> tuple[float, int]:
        return (self.h or 0.0, self.lag_t or 0)


def _uniform_scores(field: SpaceTimeField, use_ranks: bool) -> np.ndarray:
    """Per-observation values of F(X), flattened site-major (site*T + t-1)."""
    vals = field.values.reshape(field.n * field.n, field.T)
    if use_ranks:
        U = np.full_like(vals, np.nan)
        for s in range(vals.shape[0]):
            row = vals[s]
            ok = ~np.isnan(row)
            m = ok.sum()
            if m:
                ranks = np.argsort(np.argsort(row[ok])) + 1.0
                U[s, ok] = ranks / (m + 1.0)
        return U.ravel()
    if field.margins != "frechet":
        raise InvalidArgs(
            "field lacks Frechet margins; transform first or pass use_ranks=True")
    return frechet_cdf(vals).ravel()


def _estimate(U: np.ndarray, i: np.ndarray, j: np.ndarray,
              h: float | None, lag_t: int | None,
              hvec=None) -> MadogramEstimate:
    d = np.abs(U[i] - U[j])
    ok = ~np.isnan(d)
    npairs = int(ok.sum())
    if npairs == 0:
        raise InvalidArgs(f"no valid pairs at lag ({h}, {lag_t})")
    total = math.fsum(d[ok])
    return MadogramEstimate(h=h, lag_t=lag_t, value=total / (2.0 * npairs),
                            npairs=npairs, hvec=hvec)


def empirical_spatial_fmadogram(field: SpaceTimeField,
                                H: Sequence[float] = DEFAULT_H,
                                use_ranks: bool = False) -> list[MadogramEstimate]:
    """Purely spatial estimates nu_hat(h), pooling pairs from every time slice."""
    grid = GridSpec(n=field.n)
    U = _uniform_scores(field, use_ranks)
    out = []
    for h in H:
        pc = enumerate_spacetime_pairs(grid, field.T, h, 0)
        out.append(_estimate(U, pc.i, pc.j, h, None))
    return out


def empirical_temporal_fmadogram(field: SpaceTimeField,
                                 K: Sequence[int] = DEFAULT_K,
                                 use_ranks: bool = False) -> list[MadogramEstimate]:
    """Purely temporal estimates nu_hat(l'), pooling pairs from every site."""
    grid = GridSpec(n=field.n)
    U = _uniform_scores(field, use_ranks)
    out = []
    for l in K:
        pc = enumerate_spacetime_pairs(grid, field.T, 0.0, int(l))
        out.append(_estimate(U, pc.i, pc.j, None, int(l)))
    return out


def empirical_st_fmadogram(field: SpaceTimeField,
                           H: Sequence[float] = DEFAULT_H,
                           K: Sequence[int] = DEFAULT_K,
                           use_ranks: bool = False,
                           include_mixed: bool = True) -> list[MadogramEstimate]:
    """Joint estimates nu_hat(h, l') over pure and (optionally) mixed lags."""
    grid = GridSpec(n=field.n)
    U = _uniform_scores(field, use_ranks)
    out = []
    for h in H:
        pc = enumerate_spacetime_pairs(grid, field.T, h, 0)
        out.append(_estimate(U, pc.i, pc.j, h, 0))
    for l in K:
        pc = enumerate_spacetime_pairs(grid, field.T, 0.0, int(l))
        out.append(_estimate(U, pc.i, pc.j, 0.0, int(l)))
    if include_mixed:
        for h in H:
            for l in K:
                pc = enumerate_spacetime_pairs(grid, field.T, h, int(l))
                out.append(_estimate(U, pc.i, pc.j, h, int(l)))
    return out


def empirical_vector_fmadogram(field: SpaceTimeField,
                               H: Sequence[float] = DEFAULT_H,
                               K: Sequence[int] = DEFAULT_K,
                               use_ranks: bool = False):
    """Per-displacement estimates for anisotropic fitting.

    Returns (spatial, mixed): spatial holds one estimate per unordered
    direction class at each h in H (time lag 0); mixed holds one estimate per
    oriented displacement at each (h, l') in H x K, with the displacement
    pointing from the earlier to the later time.
    """
    grid = GridSpec(n=field.n)
    U = _uniform_scores(field, use_ranks)
    spatial, mixed = [], []
    for h in H:
        sq = squared_lag(h)
        for d in _half_plane_displacements(sq):
            try:
                pc = enumerate_oriented_pairs(grid, field.T, d, 0)
            except UnrealizableLag:
                continue
            spatial.append(_estimate(U, pc.i, pc.j, h, 0,
                                     hvec=(float(d[0]), float(d[1]))))
    for h in H:
        sq = squared_lag(h)
        for l in K:
            for d in ordered_displacements(sq):
                try:
                    pc = enumerate_oriented_pairs(grid, field.T, d, int(l))
                except UnrealizableLag:
                    continue
                mixed.append(_estimate(U, pc.i, pc.j, h, int(l),
                                       hvec=(float(d[0]), float(d[1]))))
    return spatial, mixed


@dataclass(frozen=True)
class EstimateSet:
    """All estimates a fitting or selection run may need, computed once."""

    n: int
    T: int
    H: tuple
    K: tuple
    spatial: list          # nu_hat(h), scalar classes
    temporal: list         # nu_hat(l')
    st: list               # nu_hat(h, l'), scalar classes incl. pure lags
    spatial_vec: list      # per-direction nu_hat(hvec) at lag 0
    mixed_vec: list        # per-orientation nu_hat(hvec, l'), l' > 0

    @property
    def grid(self) -> GridSpec:
        return GridSpec(n=self.n)


def compute_estimates(field: SpaceTimeField,
                      H: Sequence[float] = DEFAULT_H,
                      K: Sequence[int] = DEFAULT_K,
                      use_ranks: bool = False) -> EstimateSet:
    spatial = empirical_spatial_fmadogram(field, H, use_ranks)
    temporal = empirical_temporal_fmadogram(field, K, use_ranks)
    st = empirical_st_fmadogram(field, H, K, use_ranks)
    sp_vec, mixed_vec = empirical_vector_fmadogram(field, H, K, use_ranks)
    return EstimateSet(n=field.n, T=field.T, H=tuple(H), K=tuple(K),
                       spatial=spatial, temporal=temporal, st=st,
                       spatial_vec=sp_vec, mixed_vec=mixed_vec)


def write_madogram_csv(estimates: Sequence[MadogramEstimate], path) -> None:
    with open(path, "w") as fh:
        fh.write("h,lprime,nu_hat,npairs\n")
        for e in estimates:
            hs = "" if e.h is None else repr(float(e.h))
            ls = "" if e.lag_t is None else str(int(e.lag_t))
            fh.write(f"{hs},{ls},{e.value!r},{e.npairs}\n")


def read_madogram_csv(path) -> list[MadogramEstimate]:
    out = []
    with open(path) as fh:
        header = fh.readline()
        if header.strip() != "h,lprime,nu_hat,npairs":
            raise InvalidArgs(f"unexpected madogram CSV header: {header!r}")
        for line in fh:
            hs, ls, nu, np_ = line.strip().split(",")
            out.append(MadogramEstimate(
                h=None if hs == "" else float(hs),
                lag_t=None if ls == "" else int(ls),
                value=float(nu), npairs=int(np_)))
    return out
