"""Grids, wave-function containers and initial data on a circle.

A circle of circumference ``length`` is sampled at ``x_j = j * dx`` with
``dx = length / n``. Two storage layouts are supported:

* ``interface``: ``n + 1`` values, ``j = 0..n``. The first and last points sit at
  the same physical location (the interface) and are evolved independently.
* ``periodic``: ``n`` values, ``j = 0..n-1``, with wraparound indexing.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ConfigurationError",
    "GridCircle",
    "InitialData",
    "NonFiniteStateError",
    "Representation",
    "RepresentationError",
    "WaveFunction",
    "make_grid",
    "restrict_to_coarse",
    "sample_initial_data",
]

MIN_INTERVALS = 8


class ConfigurationError(ValueError):
    """Invalid grid, operator or run configuration."""


class RepresentationError(ValueError):
    """A state was used with an incompatible grid or storage layout."""


class NonFiniteStateError(FloatingPointError):
    """A state contains NaN or infinite entries."""


class Representation(str, enum.Enum):
    INTERFACE = "interface"
    PERIODIC = "periodic"


@dataclass(frozen=True)
class GridCircle:
    """Uniform grid on a circle with the interface located at ``x = 0``."""

    length: float
    n_intervals: int

    def __post_init__(self) -> None:
        if not np.isfinite(self.length) or self.length <= 0:
            raise ConfigurationError(f"circle length must be positive, got {self.length}")
        if int(self.n_intervals) != self.n_intervals or self.n_intervals < MIN_INTERVALS:
            raise ConfigurationError(
                f"need an integer number of intervals >= {MIN_INTERVALS}, got {self.n_intervals}"
            )
        object.__setattr__(self, "length", float(self.length))
        object.__setattr__(self, "n_intervals", int(self.n_intervals))

    @property
    def dx(self) -> float:
        return self.length / self.n_intervals

    def size(self, rep: Representation | str) -> int:
        rep = Representation(rep)
        return self.n_intervals + 1 if rep is Representation.INTERFACE else self.n_intervals

    def points(self, rep: Representation | str = Representation.INTERFACE) -> np.ndarray:
        return np.arange(self.size(rep)) * self.dx


def make_grid(length: float, n: int) -> GridCircle:
    """Build a :class:`GridCircle` of circumference *length* with *n* intervals."""
    return GridCircle(length, n)


@dataclass(frozen=True, eq=False)
class WaveFunction:
    """Complex amplitudes on a :class:`GridCircle`.

    The value array is copied to ``complex128`` and made read-only.
    """

    values: np.ndarray
    grid: GridCircle
    representation: Representation = Representation.INTERFACE
    time: float = 0.0

    def __post_init__(self) -> None:
        rep = Representation(self.representation)
        values = np.array(self.values, dtype=np.complex128)
        if values.ndim != 1 or values.size != self.grid.size(rep):
            raise RepresentationError(
                f"{rep.value} state on N={self.grid.n_intervals} needs "
                f"{self.grid.size(rep)} values, got shape {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise NonFiniteStateError("wave function has non-finite entries")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "representation", rep)
        object.__setattr__(self, "time", float(self.time))

    @property
    def x(self) -> np.ndarray:
        return self.grid.points(self.representation)

    def like(self, values: np.ndarray, time: float | None = None) -> WaveFunction:
        """Return a new state on the same grid and layout."""
        return WaveFunction(
            values, self.grid, self.representation, self.time if time is None else time
        )

    def __len__(self) -> int:
        return self.values.size


def require(u: WaveFunction, rep: Representation) -> None:
    if u.representation is not rep:
        raise RepresentationError(
            f"expected a {rep.value} state, got {u.representation.value}"
        )


def require_compatible(u: WaveFunction, v: WaveFunction) -> None:
    if u.grid != v.grid or u.representation is not v.representation:
        raise RepresentationError("states live on different grids or layouts")


@dataclass(frozen=True)
class InitialData:
    """Gaussian-modulated plane wave ``A exp(-(x-c)^2/d) exp(i k x)``."""

    envelope_center: float = 1.0
    envelope_denominator: float = 20.0
    wave_number: float = 100.0 * np.pi
    amplitude: complex = 1.0

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        envelope = np.exp(-((x - self.envelope_center) ** 2) / self.envelope_denominator)
        return self.amplitude * envelope * np.exp(1j * self.wave_number * x)


def sample_initial_data(
    data: InitialData,
    grid: GridCircle,
    rep: Representation | str = Representation.INTERFACE,
) -> WaveFunction:
    """Evaluate *data* at the grid points of *grid* in layout *rep*.

    In the interface layout the last value is evaluated at ``x = length``, so
    it can differ from the first value when the data is not periodic.
    """
    rep = Representation(rep)
    return WaveFunction(data(grid.points(rep)), grid, rep)


def restrict_to_coarse(
    fine: WaveFunction,
    coarse_grid: GridCircle,
    rep: Representation | str | None = None,
) -> WaveFunction:
    """Inject *fine* onto *coarse_grid* by sampling coincident points.

    The output layout defaults to the layout of *fine*. Converting a periodic
    state to the interface layout fills the endpoint with the wrapped value.
    """
    rep = fine.representation if rep is None else Representation(rep)
    fg = fine.grid
    if not np.isclose(fg.length, coarse_grid.length, rtol=1e-14, atol=0.0):
        raise RepresentationError(
            f"grid lengths differ: {fg.length} vs {coarse_grid.length}"
        )
    m, rem = divmod(fg.n_intervals, coarse_grid.n_intervals)
    if rem or m < 1:
        raise RepresentationError(
            f"N={fg.n_intervals} is not a multiple of N={coarse_grid.n_intervals}"
        )
    idx = m * np.arange(coarse_grid.size(rep))
    if fine.representation is Representation.PERIODIC:
        idx %= fg.n_intervals
    return WaveFunction(fine.values[idx], coarse_grid, rep, fine.time)
