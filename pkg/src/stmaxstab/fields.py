"""Space-time field container and its CSV/JSON interchange format."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidArgs

MARGIN_TAGS = ("raw", "gumbel", "frechet")


@dataclass
class SpaceTimeField:
    """Values on an n x n grid at T time points.

    ``values[x-1, y-1, t-1]`` holds the observation at site (x, y), time t.
    NaN marks missing observations (allowed for raw data only).
    """

    n: int
    T: int
    values: np.ndarray = field(repr=False)
    margins: str = "raw"

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.n, self.n, self.T):
            raise InvalidArgs(f"values shape {self.values.shape} != "
                              f"({self.n}, {self.n}, {self.T})")
        if self.margins not in MARGIN_TAGS:
            raise InvalidArgs(f"margins must be one of {MARGIN_TAGS}")
        finite = np.isfinite(self.values)
        if self.margins != "raw" and not finite.all():
            raise InvalidArgs("non-raw fields must be fully finite")
        if self.margins == "frechet" and not (self.values[finite] > 0).all():
            raise InvalidArgs("frechet-tagged fields must be strictly positive")
        if self.margins == "raw" and np.isinf(self.values).any():
            raise InvalidArgs("raw fields may contain NaN but not inf")

    @property
    def flat(self) -> np.ndarray:
        """(n*n, T) view, sites in row-major grid order."""
        return self.values.reshape(self.n * self.n, self.T)


def write_field_csv(f: SpaceTimeField, path, metadata: dict | None = None) -> None:
    """Long-format CSV `x,y,t,value` plus a metadata sidecar JSON."""
    path = Path(path)
    x, y, t = np.meshgrid(np.arange(1, f.n + 1), np.arange(1, f.n + 1),
                          np.arange(1, f.T + 1), indexing="ij")
    data = np.column_stack([x.ravel(), y.ravel(), t.ravel(), f.values.ravel()])
    with open(path, "w") as fh:
        fh.write("x,y,t,value\n")
        for row in data:
            fh.write(f"{int(row[0])},{int(row[1])},{int(row[2])},{float(row[3])!r}\n")
    meta = {"n": f.n, "T": f.T, "margins": f.margins}
    meta.update(metadata or {})
    path.with_suffix(".meta.json").write_text(json.dumps(meta, indent=2))


def read_field_csv(path, margins: str | None = None) -> SpaceTimeField:
    """Read a long-format `x,y,t,value` CSV into a SpaceTimeField.

    Missing (x,y,t) rows become NaN. The margins tag comes from the sidecar
    JSON when present, else from the argument, else "raw".
    """
    path = Path(path)
    raw = np.genfromtxt(path, delimiter=",", skip_header=1)
    if raw.ndim == 1:
        raw = raw[None, :]
    if raw.shape[1] != 4:
        raise InvalidArgs("expected 4 columns: x,y,t,value")
    xs = raw[:, 0].astype(int)
    ys = raw[:, 1].astype(int)
    ts = raw[:, 2].astype(int)
    n = max(xs.max(), ys.max())
    T = ts.max()
    if xs.min() < 1 or ys.min() < 1 or ts.min() < 1:
        raise InvalidArgs("coordinates must be 1-based positive integers")
    values = np.full((n, n, T), np.nan)
    values[xs - 1, ys - 1, ts - 1] = raw[:, 3]
    meta_path = path.with_suffix(".meta.json")
    if margins is None:
        if meta_path.exists():
            margins = json.loads(meta_path.read_text()).get("margins", "raw")
        else:
            margins = "raw"
    return SpaceTimeField(n=int(n), T=int(T), values=values, margins=margins)
