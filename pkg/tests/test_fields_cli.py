import json

import numpy as np
import pytest

from conftest import iid_frechet_field
from stmaxstab.cli import main
from stmaxstab.errors import InvalidArgs
from stmaxstab.fields import SpaceTimeField, read_field_csv, write_field_csv


def test_field_validation():
    with pytest.raises(InvalidArgs):
        SpaceTimeField(n=3, T=2, values=np.zeros((3, 3, 3)), margins="raw")
    with pytest.raises(InvalidArgs):
        SpaceTimeField(n=3, T=2, values=np.zeros((3, 3, 2)), margins="weird")
    with pytest.raises(InvalidArgs):
        SpaceTimeField(n=3, T=2, values=np.full((3, 3, 2), np.nan),
                       margins="frechet")


def test_field_csv_round_trip(tmp_path):
    f = iid_frechet_field(4, 5, seed=1)
    path = tmp_path / "field.csv"
    write_field_csv(f, path, metadata={"note": 1})
    back = read_field_csv(path)
    assert back.n == 4 and back.T == 5 and back.margins == "frechet"
    assert np.allclose(back.values, f.values, atol=0.0)  # exact via repr
    meta = json.loads((tmp_path / "field.meta.json").read_text())
    assert meta["n"] == 4 and meta["T"] == 5 and meta["note"] == 1


def test_field_csv_missing_cells(tmp_path):
    vals = np.arange(18, dtype=float).reshape(3, 3, 2)
    vals[1, 2, 0] = np.nan
    f = SpaceTimeField(n=3, T=2, values=vals, margins="raw")
    path = tmp_path / "raw.csv"
    write_field_csv(f, path)
    back = read_field_csv(path)
    assert back.margins == "raw"
    assert np.isnan(back.values[1, 2, 0])
    assert np.array_equal(np.isnan(back.values), np.isnan(vals))


def _run(tmp_path, name, cfg, *extra):
    cfg_path = tmp_path / f"{name}.json"
    cfg_path.write_text(json.dumps(cfg))
    return main([name, "--config", str(cfg_path), "--out", str(tmp_path),
                 *extra])


def test_cli_simulate_deterministic(tmp_path):
    cfg = {"model": {"family": "A1",
                     "params": {"phi_s": 1.0, "kappa_s": 1.0,
                                "phi_t": 1.0, "kappa_t": 1.0}},
           "n": 4, "T": 3, "seed": 9}
    assert _run(tmp_path, "simulate", cfg) == 0
    first = (tmp_path / "field.csv").read_bytes()
    assert _run(tmp_path, "simulate", cfg) == 0
    assert (tmp_path / "field.csv").read_bytes() == first
    assert json.loads((tmp_path / "manifest.json").read_text())["command"] \
        == "simulate"


def test_cli_madogram_and_fit(tmp_path):
    f = iid_frechet_field(6, 12, seed=21)
    write_field_csv(f, tmp_path / "field.csv")
    cfg = {"field": str(tmp_path / "field.csv"), "H": [1.0, 2.0], "K": [1, 2]}
    assert _run(tmp_path, "madogram", cfg) == 0
    for name in ("spatial", "temporal", "spacetime"):
        assert (tmp_path / f"madogram_{name}.csv").exists()
    fit_cfg = {"field": str(tmp_path / "field.csv"), "family": "A1",
               "scheme": 1, "H": [1.0, 2.0, 4.0], "K": [1, 2, 3], "seed": 3}
    assert _run(tmp_path, "fit", fit_cfg) == 0
    fit = json.loads((tmp_path / "fit.json").read_text())
    assert fit["scheme"] == 1 and fit["model"]["family"] == "A1"
    assert (tmp_path / "fitted_vs_empirical.csv").exists()


def test_cli_config_errors(tmp_path):
    # missing required keys
    assert _run(tmp_path, "simulate", {"n": 4, "T": 3, "seed": 1}) == 2
    # missing seed
    cfg = {"model": {"family": "A1",
                     "params": {"phi_s": 1.0, "kappa_s": 1.0,
                                "phi_t": 1.0, "kappa_t": 1.0}},
           "n": 4, "T": 3}
    assert _run(tmp_path, "simulate", cfg) == 2
    # A2 is fit-only
    cfg["seed"] = 1
    cfg["model"] = {"family": "A2",
                    "params": {"phi_s": 1.0, "kappa_s": 1.0,
                               "phi_t": 1.0, "kappa_t": 1.0}}
    assert _run(tmp_path, "simulate", cfg) == 2
    # empty candidate list
    f = iid_frechet_field(5, 6, seed=2)
    write_field_csv(f, tmp_path / "f.csv")
    assert _run(tmp_path, "select", {"field": str(tmp_path / "f.csv"),
                                     "candidates": []}) == 2
    # nonexistent config file
    assert main(["simulate", "--config", str(tmp_path / "missing.json")]) == 2


def test_cli_numeric_exit(tmp_path):
    cfg = {"model": {"family": "A1",
                     "params": {"phi_s": 1.0, "kappa_s": 1.0,
                                "phi_t": 1.0, "kappa_t": 1.0}},
           "n": 8, "T": 3, "seed": 1, "cholesky_budget": 10}
    assert _run(tmp_path, "simulate", cfg) == 3


def test_cli_permtest(tmp_path):
    f = iid_frechet_field(6, 10, seed=5)
    write_field_csv(f, tmp_path / "field.csv")
    cfg = {"field": str(tmp_path / "field.csv"), "H": [1.0, 2.0],
           "K": [1, 2], "B": 25, "seed": 2}
    assert _run(tmp_path, "permtest", cfg) == 0
    lines = (tmp_path / "band_spatial.csv").read_text().splitlines()
    assert lines[0].startswith("lag,lower,upper")
    assert len(lines) == 3
    assert (tmp_path / "band_temporal.csv").exists()
