import numpy as np
import pytest

from stmaxstab.fit import _design, _predict
from stmaxstab.lattice import (DEFAULT_H, DEFAULT_K, GridSpec,
                               _half_plane_displacements,
                               ordered_displacements, squared_lag)
from stmaxstab.madogram import EstimateSet, MadogramEstimate


def exact_estimate_set(spec, grid: GridSpec, H=DEFAULT_H, K=DEFAULT_K,
                       T: int = 100) -> EstimateSet:
    """EstimateSet whose values are the exact model F-madograms (zero-noise
    inputs for fixed-point fitting tests)."""
    def predict(items):
        _, _, groups = _design(spec.family, grid, items)
        return _predict(spec, groups, len(items))

    sp_items = [(h, 0, 0.0, 1.0, None) for h in H]
    spatial = [MadogramEstimate(h=h, lag_t=None, value=v, npairs=1)
               for h, v in zip(H, predict(sp_items))]
    tp_items = [(0.0, l, 0.0, 1.0, None) for l in K]
    temporal = [MadogramEstimate(h=None, lag_t=l, value=v, npairs=1)
                for l, v in zip(K, predict(tp_items))]
    lags = ([(h, 0) for h in H] + [(0.0, l) for l in K]
            + [(h, l) for h in H for l in K])
    st_items = [(h, l, 0.0, 1.0, None) for h, l in lags]
    st = [MadogramEstimate(h=h, lag_t=l, value=v, npairs=1)
          for (h, l), v in zip(lags, predict(st_items))]
    spv_lags = [(h, d) for h in H
                for d in _half_plane_displacements(squared_lag(h))]
    spv_items = [(h, 0, 0.0, 1.0, (float(d[0]), float(d[1])))
                 for h, d in spv_lags]
    spatial_vec = [MadogramEstimate(h=h, lag_t=0, value=v, npairs=1,
                                    hvec=(float(d[0]), float(d[1])))
                   for (h, d), v in zip(spv_lags, predict(spv_items))]
    mx_lags = [(h, l, d) for h in H for l in K
               for d in ordered_displacements(squared_lag(h))]
    mx_items = [(h, l, 0.0, 1.0, (float(d[0]), float(d[1])))
                for h, l, d in mx_lags]
    mixed_vec = [MadogramEstimate(h=h, lag_t=l, value=v, npairs=1,
                                  hvec=(float(d[0]), float(d[1])))
                 for (h, l, d), v in zip(mx_lags, predict(mx_items))]
    return EstimateSet(n=grid.n, T=T, H=tuple(H), K=tuple(K),
                       spatial=spatial, temporal=temporal, st=st,
                       spatial_vec=spatial_vec, mixed_vec=mixed_vec)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def iid_frechet_field(n, T, seed):
    from stmaxstab.fields import SpaceTimeField
    gen = np.random.default_rng(seed)
    vals = 1.0 / (-np.log(gen.uniform(size=(n, n, T))))
    return SpaceTimeField(n=n, T=T, values=vals, margins="frechet")
