import numpy as np
import pytest

from conftest import iid_frechet_field
from stmaxstab.errors import InvalidArgs
from stmaxstab.fields import SpaceTimeField
from stmaxstab.madogram import (empirical_spatial_fmadogram,
                                empirical_temporal_fmadogram)
from stmaxstab.models import BRParams
from stmaxstab.permtest import (PermBand, dependence_range, spatial_perm_band,
                                temporal_perm_band, write_band_csv)
from stmaxstab.simulate import SimConfig, simulate_br
from stmaxstab.lattice import GridSpec


def test_band_validation():
    with pytest.raises(InvalidArgs):
        PermBand(lags=(1.0,), lower=(0.2,), upper=(0.1,), B=10, axis="spatial")
    with pytest.raises(InvalidArgs):
        PermBand(lags=(1.0,), lower=(0.1,), upper=(0.2,), B=0, axis="spatial")


def test_determinism():
    f = iid_frechet_field(6, 12, seed=2)
    a = spatial_perm_band(f, H=[1.0, 2.0], B=20, seed=5)
    b = spatial_perm_band(f, H=[1.0, 2.0], B=20, seed=5)
    c = spatial_perm_band(f, H=[1.0, 2.0], B=20, seed=6)
    assert a == b
    assert a != c


def test_single_replicate_degenerate_band():
    f = iid_frechet_field(5, 8, seed=3)
    band = spatial_perm_band(f, H=[1.0], B=1, seed=1)
    assert band.lower == band.upper  # quantiles of one sample coincide


def test_iid_band_near_one_sixth():
    f = iid_frechet_field(10, 30, seed=10)
    sp = spatial_perm_band(f, H=[1.0, 2.0], B=100, seed=0)
    tp = temporal_perm_band(f, K=[1, 2], B=100, seed=0)
    for band in (sp, tp):
        for lo, hi in zip(band.lower, band.upper):
            assert lo < 1.0 / 6.0 < hi + 0.01
            assert hi - lo < 0.05


def test_iid_estimates_fall_inside_band():
    f = iid_frechet_field(10, 30, seed=11)
    band = spatial_perm_band(f, H=[1.0, 2.0], B=200, seed=0)
    ests = empirical_spatial_fmadogram(f, H=[1.0, 2.0])
    for e, lo, hi in zip(ests, band.lower, band.upper):
        assert lo <= e.value <= hi


def test_dependent_field_falls_below_band():
    p = BRParams(0.4, 1.5, 0.2, 1.0)
    f = simulate_br(p, GridSpec(10), 30, SimConfig(seed=77))
    sp = spatial_perm_band(f, H=[1.0], B=100, seed=0)
    tp = temporal_perm_band(f, K=[1], B=100, seed=0)
    e_sp = empirical_spatial_fmadogram(f, H=[1.0])[0].value
    e_tp = empirical_temporal_fmadogram(f, K=[1])[0].value
    assert e_sp < sp.lower[0]
    assert e_tp < tp.lower[0]


def test_dependence_range():
    band = PermBand(lags=(1.0, 2.0, 3.0), lower=(0.15, 0.15, 0.15),
                    upper=(0.18, 0.18, 0.18), B=10, axis="spatial")
    assert dependence_range(band, [0.05, 0.16, 0.17]) == 2.0
    assert dependence_range(band, [0.16, 0.05, 0.17]) == 1.0
    assert dependence_range(band, [0.05, 0.06, 0.07]) is None
    with pytest.raises(InvalidArgs):
        dependence_range(band, [0.1, 0.2])


def test_write_band_csv(tmp_path):
    band = PermBand(lags=(1.0, 2.0), lower=(0.1, 0.11), upper=(0.2, 0.21),
                    B=10, axis="spatial")
    p1 = tmp_path / "a.csv"
    write_band_csv(band, p1)
    assert p1.read_text().splitlines()[0] == "lag,lower,upper"
    p2 = tmp_path / "b.csv"
    write_band_csv(band, p2, fitted=[0.12, 0.13], empirical=[0.14, 0.15])
    lines = p2.read_text().splitlines()
    assert lines[0] == "lag,lower,upper,nu_model,nu_hat"
    assert len(lines) == 3
