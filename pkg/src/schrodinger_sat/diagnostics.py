"""Norms, errors against reference runs, convergence indices and reflection metrics."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .core import (
    GridCircle,
    Representation,
    RepresentationError,
    WaveFunction,
    restrict_to_coarse,
)
from .sbp import PeriodicStencil, SbpOperator, weighted_inner

__all__ = [
    "NormRecorder",
    "TimeSeries",
    "convergence_index",
    "crossing_window",
    "error_vs_reference",
    "interface_occupancy",
    "reflected_fraction",
    "relative_drift",
    "sigma_norm",
    "trapezoid_norm",
]

# errors below this are treated as "converged to round-off" in convergence_index
ERROR_FLOOR = 1e-13


@dataclass(frozen=True)
class TimeSeries:
    """Scalar samples at strictly increasing times; ``nan`` marks a missing value."""

    times: np.ndarray
    values: np.ndarray
    name: str = "value"

    def __post_init__(self) -> None:
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.shape != v.shape or t.ndim != 1:
            raise ValueError("times and values must be 1-D arrays of equal length")
        if np.any(np.diff(t) <= 0):
            raise ValueError("sample times must be strictly increasing")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return self.times.size

    def to_csv(self, path: str | Path | None = None) -> str:
        """Write ``time,<name>`` rows with shortest round-trip float formatting."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["time", self.name])
        for t, v in zip(self.times, self.values):
            writer.writerow([repr(float(t)), repr(float(v))])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text

    @classmethod
    def from_csv(cls, path: str | Path) -> TimeSeries:
        """Read a file written by :meth:`to_csv`."""
        return cls.from_csv_text(Path(path).read_text())

    @classmethod
    def from_csv_text(cls, text: str) -> TimeSeries:
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or len(rows[0]) != 2 or rows[0][0] != "time":
            raise ValueError("time-series CSV must start with a 'time,<name>' header")
        data = np.array([[float(a), float(b)] for a, b in rows[1:]]).reshape(-1, 2)
        return cls(data[:, 0], data[:, 1], rows[0][1])


def _trapezoid_weights(u: WaveFunction) -> np.ndarray:
    w = np.ones(u.values.size)
    if u.representation is Representation.INTERFACE:
        w[0] = w[-1] = 0.5
    return w


def trapezoid_norm(u: WaveFunction) -> float:
    """Discrete l2 norm with trapezoidal weights (plain sum for periodic states)."""
    a = np.abs(u.values)
    peak = a.max(initial=0.0)
    if peak == 0 or not np.isfinite(peak):
        return float(peak)
    # scaled so tiny or huge amplitudes do not under- or overflow when squared
    w = _trapezoid_weights(u)
    return float(peak * np.sqrt(u.grid.dx * np.sum(w * (a / peak) ** 2)))


def sigma_norm(op: SbpOperator | PeriodicStencil, u: WaveFunction) -> float:
    """Norm induced by the weights of *op*; conserved by the interface scheme."""
    return float(np.sqrt(weighted_inner(op, u, u).real))


def error_vs_reference(u: WaveFunction, ref: WaveFunction) -> float:
    """Trapezoid norm of ``u`` minus the reference injected onto ``u``'s grid."""
    if ref.grid.n_intervals % u.grid.n_intervals:
        raise RepresentationError(
            f"reference N={ref.grid.n_intervals} is not nested over N={u.grid.n_intervals}"
        )
    coarse = restrict_to_coarse(ref, u.grid, u.representation)
    return trapezoid_norm(u.like(u.values - coarse.values))


def convergence_index(e_coarse: TimeSeries, e_fine: TimeSeries) -> TimeSeries:
    """``log2(e_coarse / e_fine)`` per sample; ``nan`` where either error is at round-off."""
    if e_coarse.times.shape != e_fine.times.shape or not np.allclose(
        e_coarse.times, e_fine.times, rtol=1e-12, atol=1e-15
    ):
        raise ValueError("error series are sampled at different times")
    ec, ef = e_coarse.values, e_fine.values
    valid = (ec > ERROR_FLOOR) & (ef > ERROR_FLOOR)
    q = np.full(ec.shape, np.nan)
    q[valid] = np.log2(ec[valid] / ef[valid])
    return TimeSeries(e_coarse.times, q, "convergence_index")


def _window_mask(u: WaveFunction, window: tuple[float, float]) -> np.ndarray:
    a, b = window
    if not b > a:
        raise ValueError(f"empty window {window}")
    x = u.x
    return (x >= a) & (x <= b)


def reflected_fraction(u: WaveFunction, window: tuple[float, float] = (1.2, 1.8)) -> float:
    """Share of the squared trapezoid norm of *u* that lies inside *window*."""
    mask = _window_mask(u, window)
    w = _trapezoid_weights(u) * np.abs(u.values) ** 2
    total = w.sum()
    return float(w[mask].sum() / total) if total > 0 else 0.0


def interface_occupancy(u: WaveFunction, halfwidth: float) -> float:
    """Share of the squared norm within *halfwidth* of the interface at ``x = 0``."""
    x = u.x
    L = u.grid.length
    dist = np.minimum(x, L - x)
    w = _trapezoid_weights(u) * np.abs(u.values) ** 2
    total = w.sum()
    return float(w[dist <= halfwidth].sum() / total) if total > 0 else 0.0


def crossing_window(occupancy: TimeSeries, threshold: float = 0.05) -> np.ndarray:
    """Boolean mask of samples where the occupancy series exceeds *threshold*."""
    return occupancy.values >= threshold


def relative_drift(series: TimeSeries) -> TimeSeries:
    """``(value - value[0]) / value[0]``."""
    v0 = series.values[0]
    return TimeSeries(series.times, (series.values - v0) / v0, f"{series.name}_drift")


class NormRecorder:
    """Observer collecting scalar functionals of the state at each output time.

    Each entry of *functionals* maps a name to ``f(WaveFunction) -> float``.
    """

    def __init__(self, grid: GridCircle, rep: Representation,
                 functionals: dict[str, Callable[[WaveFunction], float]]) -> None:
        self.grid = grid
        self.rep = Representation(rep)
        self.functionals = functionals
        self.times: list[float] = []
        self.values: dict[str, list[float]] = {k: [] for k in functionals}

    def __call__(self, t: float, values: np.ndarray) -> None:
        u = WaveFunction(values, self.grid, self.rep, t)
        self.times.append(t)
        for name, f in self.functionals.items():
            self.values[name].append(float(f(u)))

    def series(self, name: str) -> TimeSeries:
        return TimeSeries(np.array(self.times), np.array(self.values[name]), name)
