import math

import numpy as np
import pytest

from conftest import iid_frechet_field
from stmaxstab.errors import InvalidArgs
from stmaxstab.fields import SpaceTimeField
from stmaxstab.lattice import GridSpec, count_spacetime_pairs
from stmaxstab.madogram import (MadogramEstimate, compute_estimates,
                                empirical_spatial_fmadogram,
                                empirical_st_fmadogram,
                                empirical_temporal_fmadogram,
                                empirical_vector_fmadogram, frechet_cdf,
                                read_madogram_csv, write_madogram_csv)
from stmaxstab.models import BRParams, ModelSpec, fmadogram_model
from stmaxstab.simulate import SimConfig, child_seed, simulate_br


def _field(vals):
    n, _, T = vals.shape
    return SpaceTimeField(n=n, T=T, values=vals, margins="frechet")


def test_frechet_cdf():
    assert frechet_cdf(1.0) == pytest.approx(math.exp(-1.0), abs=1e-15)
    assert np.isnan(frechet_cdf(np.array([np.nan]))[0])
    with pytest.raises(InvalidArgs):
        frechet_cdf(np.array([1.0, -2.0]))


def test_estimate_validation():
    with pytest.raises(InvalidArgs):
        MadogramEstimate(h=1.0, lag_t=0, value=0.7, npairs=5)
    with pytest.raises(InvalidArgs):
        MadogramEstimate(h=1.0, lag_t=0, value=0.1, npairs=0)


def test_constant_field_gives_zero():
    f = _field(np.full((4, 4, 6), 3.0))
    for e in empirical_st_fmadogram(f, H=[1.0, 2.0], K=[1, 2]):
        assert e.value == 0.0


def test_iid_field_near_one_sixth():
    f = iid_frechet_field(20, 50, seed=101)
    ests = empirical_st_fmadogram(f, H=[1.0, 2.0], K=[1, 2])
    for e in ests:
        assert e.value == pytest.approx(1.0 / 6.0, abs=0.01)


def test_pair_counts_propagate():
    f = iid_frechet_field(6, 9, seed=7)
    grid = GridSpec(6)
    for e in empirical_st_fmadogram(f, H=[1.0, math.sqrt(2)], K=[1, 3]):
        lag_t = e.lag_t or 0
        h = e.h if e.h is not None else 0.0
        assert e.npairs == count_spacetime_pairs(grid, 9, h, lag_t)


def test_rank_mode_monotone_invariance():
    f = iid_frechet_field(6, 30, seed=13)
    g = SpaceTimeField(n=6, T=30, values=np.exp(f.values / 4.0) + 2.0,
                       margins="raw")
    a = empirical_st_fmadogram(f, H=[1.0], K=[1], use_ranks=True)
    b = empirical_st_fmadogram(g, H=[1.0], K=[1], use_ranks=True)
    for ea, eb in zip(a, b):
        assert ea.value == pytest.approx(eb.value, abs=1e-14)
        assert ea.npairs == eb.npairs


def test_missing_values_dropped():
    f = iid_frechet_field(5, 12, seed=29)
    full = empirical_temporal_fmadogram(f, K=[1], use_ranks=True)
    vals = f.values.copy()
    vals[0, 0, :] = np.nan  # knock out one whole site
    g = SpaceTimeField(n=5, T=12, values=vals, margins="raw")
    part = empirical_temporal_fmadogram(g, K=[1], use_ranks=True)
    assert part[0].npairs == full[0].npairs - 11
    assert 0 <= part[0].value <= 0.5


def test_temporal_and_spatial_split_consistency():
    f = iid_frechet_field(7, 15, seed=3)
    sp = empirical_spatial_fmadogram(f, H=[1.0, 2.0])
    tp = empirical_temporal_fmadogram(f, K=[2])
    st = empirical_st_fmadogram(f, H=[1.0, 2.0], K=[2])
    by_lag = {(e.h if e.h is not None else 0.0, e.lag_t or 0): e for e in st}
    assert by_lag[(1.0, 0)].value == sp[0].value
    assert by_lag[(2.0, 0)].value == sp[1].value
    assert by_lag[(0.0, 2)].value == tp[0].value


def test_vector_classes_partition_scalar_class():
    # pair-weighted average of oriented mixed classes at (h, l) equals the
    # pooled scalar estimate, and their pair counts sum to the pooled count
    f = iid_frechet_field(6, 10, seed=91)
    pooled = empirical_st_fmadogram(f, H=[1.0], K=[1])
    mixed = {(e.h, e.lag_t, e.hvec): e
             for e in empirical_vector_fmadogram(f, H=[1.0], K=[1])[1]}
    tot = sum(e.npairs for e in mixed.values())
    avg = sum(e.npairs * e.value for e in mixed.values()) / tot
    target = [e for e in pooled if e.h == 1.0 and e.lag_t == 1][0]
    assert tot == target.npairs
    assert avg == pytest.approx(target.value, abs=1e-12)


def test_vector_classes_orientation_matters():
    # a field shifted one cell per step is tighter along the shift direction
    gen = np.random.default_rng(5)
    base = 1.0 / (-np.log(gen.uniform(size=(20, 10))))
    vals = np.empty((8, 8, 10))
    for t in range(10):
        vals[:, :, t] = base[t:t + 8, :8]  # pattern moves by (-1, 0) per step
    f = _field(vals)
    mixed = empirical_vector_fmadogram(f, H=[1.0], K=[1])[1]
    by_vec = {e.hvec: e.value for e in mixed}
    assert by_vec[(-1.0, 0.0)] < 0.02           # aligned with the motion
    assert by_vec[(1.0, 0.0)] > by_vec[(-1.0, 0.0)] + 0.05


def test_simulated_field_matches_model_value():
    spec = ModelSpec("A1", BRParams(0.4, 1.5, 0.2, 1.0))
    reps = 40
    vals = np.empty(reps)
    for r in range(reps):
        fld = simulate_br(spec.params, GridSpec(8), 5,
                          SimConfig(seed=child_seed(400, r)))
        vals[r] = empirical_spatial_fmadogram(fld, H=[1.0])[0].value
    want = fmadogram_model(spec, 1.0, 0)
    se = vals.std(ddof=1) / math.sqrt(reps)
    assert abs(vals.mean() - want) < max(4 * se, 0.01)


def test_compute_estimates_shapes():
    f = iid_frechet_field(5, 8, seed=77)
    est = compute_estimates(f, H=[1.0, 2.0], K=[1, 2])
    assert est.n == 5 and est.T == 8
    assert len(est.spatial) == 2 and len(est.temporal) == 2
    assert len(est.st) == 2 + 2 + 4
    assert all(e.hvec is not None for e in est.spatial_vec)
    assert all(e.hvec is not None and e.lag_t > 0 for e in est.mixed_vec)
    assert est.grid.n == 5


def test_csv_round_trip(tmp_path):
    f = iid_frechet_field(5, 8, seed=55)
    ests = (empirical_st_fmadogram(f, H=[1.0], K=[1])
            + empirical_spatial_fmadogram(f, H=[2.0])
            + empirical_temporal_fmadogram(f, K=[3]))
    path = tmp_path / "m.csv"
    write_madogram_csv(ests, path)
    back = read_madogram_csv(path)
    assert len(back) == len(ests)
    for a, b in zip(ests, back):
        assert a.h == b.h and a.lag_t == b.lag_t
        assert a.value == b.value and a.npairs == b.npairs
    with pytest.raises(InvalidArgs):
        bad = tmp_path / "bad.csv"
        bad.write_text("x,y\n")
        read_madogram_csv(bad)
