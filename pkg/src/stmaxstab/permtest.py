"""Permutation null bands for spatial and temporal extremal independence.

Each replicate destroys the dependence structure along one axis (relabeling
sites independently within every time slice, or shuffling each site's time
series) and recomputes the F-madogram; the 2.5%/97.5% quantiles over B
replicates form the independence band. An observed or fitted value below the
band indicates dependence at that lag.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidArgs
from .fields import SpaceTimeField
from .lattice import DEFAULT_H, DEFAULT_K
from .madogram import (empirical_spatial_fmadogram,
                       empirical_temporal_fmadogram)


@dataclass(frozen=True)
class PermBand:
    lags: tuple          # spatial h values or temporal l' values
    lower: tuple         # 2.5% quantile per lag
    upper: tuple         # 97.5% quantile per lag
    B: int
    axis: str            # "spatial" or "temporal"

    def __post_init__(self):
        if any(lo > hi for lo, hi in zip(self.lower, self.upper)):
            raise InvalidArgs("band lower edge above upper edge")
        if self.B < 1:
            raise InvalidArgs("B must be >= 1")


def _band(samples: np.ndarray, lags, B: int, axis: str) -> PermBand:
    lower = np.quantile(samples, 0.025, axis=0, method="linear")
    upper = np.quantile(samples, 0.975, axis=0, method="linear")
    return PermBand(lags=tuple(lags), lower=tuple(lower.tolist()),
                    upper=tuple(upper.tolist()), B=B, axis=axis)


def spatial_perm_band(field: SpaceTimeField,
                      H: Sequence[float] = DEFAULT_H,
                      B: int = 1000, seed: int = 0,
                      use_ranks: bool = False) -> PermBand:
    """Null band from B fields with site labels permuted within each slice."""
    n, T = field.n, field.T
    vals = field.values.reshape(n * n, T)
    samples = np.empty((B, len(H)))
    for b in range(B):
        rng = np.random.default_rng(np.random.SeedSequence((seed, b)))
        perm = np.empty_like(vals)
        for t in range(T):
            perm[:, t] = vals[rng.permutation(n * n), t]
        pf = SpaceTimeField(n=n, T=T, values=perm.reshape(n, n, T),
                            margins=field.margins)
        ests = empirical_spatial_fmadogram(pf, H, use_ranks=use_ranks)
        samples[b] = [e.value for e in ests]
    return _band(samples, H, B, "spatial")


def temporal_perm_band(field: SpaceTimeField,
                       K: Sequence[int] = DEFAULT_K,
                       B: int = 1000, seed: int = 0,
                       use_ranks: bool = False) -> PermBand:
    """Null band from B fields with each site's time series shuffled."""
    n, T = field.n, field.T
    vals = field.values.reshape(n * n, T)
    samples = np.empty((B, len(K)))
    for b in range(B):
        rng = np.random.default_rng(np.random.SeedSequence((seed, b)))
        perm = np.empty_like(vals)
        for s in range(n * n):
            perm[s] = vals[s, rng.permutation(T)]
        pf = SpaceTimeField(n=n, T=T, values=perm.reshape(n, n, T),
                            margins=field.margins)
        ests = empirical_temporal_fmadogram(pf, K, use_ranks=use_ranks)
        samples[b] = [e.value for e in ests]
    return _band(samples, K, B, "temporal")


def dependence_range(band: PermBand, fitted: Sequence[float]):
    """Smallest lag whose fitted nu_F lies inside the band; None if none."""
    if len(fitted) != len(band.lags):
        raise InvalidArgs("fitted values must cover the band's lag axis")
    for lag, lo, hi, v in zip(band.lags, band.lower, band.upper, fitted):
        if lo <= v <= hi:
            return lag
    return None


def write_band_csv(band: PermBand, path, fitted=None, empirical=None) -> None:
    """CSV `lag,lower,upper[,nu_model][,nu_hat]` for overlay plotting."""
    cols = ["lag", "lower", "upper"]
    if fitted is not None:
        cols.append("nu_model")
    if empirical is not None:
        cols.append("nu_hat")
    with open(path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        for idx, lag in enumerate(band.lags):
            row = [repr(float(lag)), repr(band.lower[idx]),
                   repr(band.upper[idx])]
            if fitted is not None:
                row.append(repr(float(fitted[idx])))
            if empirical is not None:
                row.append(repr(float(empirical[idx])))
            fh.write(",".join(row) + "\n")
