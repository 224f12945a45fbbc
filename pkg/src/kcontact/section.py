"""Discretized sections psi: (t, x) -> M and their CSV representation."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import BlowUpError, DimensionError

BOUNDARIES = ("dirichlet-zero", "periodic")


def format_float(value):
    """17 significant digits: enough to round-trip any double."""
    return "%.17g" % value


@dataclass(frozen=True)
class SpaceGrid:
    """Uniform node set on ``[x0, x1]`` including both endpoints.

    For periodic grids the last node duplicates the first; solvers evolve the
    first ``N - 1`` nodes and copy the seam.
    """

    x0: float
    x1: float
    N: int
    boundary: str = "dirichlet-zero"

    def __post_init__(self):
        if self.N < 8:
            raise ValueError(f"grid needs at least 8 nodes, got {self.N}")
        if not self.x1 > self.x0:
            raise ValueError("grid requires x1 > x0")
        if self.boundary not in BOUNDARIES:
            raise ValueError(f"unknown boundary {self.boundary!r}; expected one of {BOUNDARIES}")

    @property
    def dx(self):
        return (self.x1 - self.x0) / (self.N - 1)

    @property
    def length(self):
        return self.x1 - self.x0

    @property
    def nodes(self):
        return np.linspace(self.x0, self.x1, self.N)

    def refined(self):
        """Grid with half the spacing (``2N - 1`` nodes)."""
        return SpaceGrid(self.x0, self.x1, 2 * self.N - 1, self.boundary)


@dataclass(frozen=True)
class SectionGrid:
    """Samples of a section on a rectangular (t, x) grid.

    ``data[i, j]`` holds all chart coordinates at ``(times[i], x[j])``.
    """

    times: np.ndarray
    x: np.ndarray
    data: np.ndarray
    names: Sequence[str]
    model: str = ""
    gauge: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        x = np.asarray(self.x, dtype=float)
        data = np.asarray(self.data, dtype=float)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "names", tuple(self.names))
        if data.shape != (times.size, x.size, len(self.names)):
            raise DimensionError(
                f"section data shape {data.shape} does not match "
                f"({times.size}, {x.size}, {len(self.names)})"
            )
        bad = ~np.isfinite(data)
        if bad.any():
            first = int(np.argwhere(bad)[0][0])
            raise BlowUpError(f"non-finite section values at t={times[first]:g}", time=times[first])

    @property
    def dt(self):
        """Uniform spacing of the stored time levels."""
        if self.times.size < 2:
            raise ValueError("section has a single time level")
        steps = np.diff(self.times)
        if not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
            raise ValueError("stored time levels are not uniformly spaced")
        return float(steps[0])

    @property
    def dx(self):
        steps = np.diff(self.x)
        return float(steps[0])

    def field(self, name):
        return self.data[..., self.names.index(name)]

    def with_data(self, data, **changes):
        kw = dict(
            times=self.times, x=self.x, data=data, names=self.names,
            model=self.model, gauge=self.gauge, meta=dict(self.meta),
        )
        kw.update(changes)
        return SectionGrid(**kw)

    def partials(self):
        """Central-difference partials in t and x on interior nodes.

        Returns ``(points, d_dt, d_dx)`` each shaped ``(Nt-2, Nx-2, m)``.
        """
        d = self.data
        inner = d[1:-1, 1:-1]
        d_dt = (d[2:, 1:-1] - d[:-2, 1:-1]) / (2.0 * self.dt)
        d_dx = (d[1:-1, 2:] - d[1:-1, :-2]) / (2.0 * self.dx)
        return inner, d_dt, d_dx

    def write_csv(self, stream):
        """One row per (t, x) node; columns ``t, x`` then the chart coordinates."""
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["t", "x", *self.names])
        for i, t in enumerate(self.times):
            ts = format_float(t)
            for j, xv in enumerate(self.x):
                writer.writerow([ts, format_float(xv), *(format_float(v) for v in self.data[i, j])])

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            self.write_csv(fh)

    def to_csv_string(self):
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()

    @classmethod
    def read_csv(cls, path, model="", gauge=""):
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            rows = np.array([[float(v) for v in row] for row in reader])
        times = np.unique(rows[:, 0])
        xs = np.unique(rows[:, 1])
        data = rows[:, 2:].reshape(times.size, xs.size, len(header) - 2)
        return cls(times, xs, data, header[2:], model=model, gauge=gauge)
