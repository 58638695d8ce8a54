r"""Semi-discrete right-hand sides for :math:`i \partial_t \Phi = \Delta \Phi + V \Phi`.

Two discretisations are provided.

:class:`PeriodicScheme`
    One periodic grid with a centered stencil ``D``:
    ``du/dt = -i D(D u) - i V u``.

:class:`InterfaceScheme`
    One grid whose two ends meet at the interface ``x = 0``. On top of the
    interior scheme ``-i D(D u)`` the two end points receive

    * boundary-flux cancellation: ``-i (Du)_0 / (dx s_0)`` at ``j = 0`` and
      ``+i (Du)_N / (dx s_N)`` at ``j = N``, which removes the boundary term
      of the SBP identity so the ``sigma`` norm is conserved;
    * a coupling penalty ``-i L (u_0 - u_N)`` at ``j = 0`` and
      ``+i L (u_0 - u_N)`` at ``j = N``, which lets the wave cross the
      interface. For real ``L`` it conserves the norm.

    For IMEX integration the penalty is the stiff part and everything else is
    explicit (:meth:`InterfaceScheme.split`).

Both schemes optionally add the dissipation term of :func:`ko_dissipation`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from . import _kernels
from .core import (
    ConfigurationError,
    GridCircle,
    Representation,
    WaveFunction,
    require,
)
from .sbp import PeriodicStencil, SbpOperator

__all__ = [
    "InteractionFactor",
    "InterfaceScheme",
    "PeriodicScheme",
    "SchemeConfig",
    "ko_dissipation",
    "make_scheme",
    "penalty_solve",
    "rhs_interface",
    "rhs_interface_split",
    "rhs_periodic",
]

Potential = Callable[[np.ndarray, float], np.ndarray]
Operator = Union[SbpOperator, PeriodicStencil]

# dissipation is switched off at least this many points from each grid end
DISSIPATION_MARGIN = 4


@dataclass(frozen=True)
class InteractionFactor:
    """How the penalty strength ``L`` depends on the grid.

    ``rule`` is one of

    * ``"power"``: ``L = coefficient * dx**(-exponent)``
    * ``"explicit_bound"``: ``L = 1 / (sigma_0 dx**2)``, the largest value that
      keeps explicit schemes at the CFL limit of the principal part
    * ``"fixed"``: ``L = coefficient``
    """

    rule: str = "power"
    coefficient: complex = 1.0e3
    exponent: int = 2

    def __post_init__(self) -> None:
        if self.rule not in ("power", "explicit_bound", "fixed"):
            raise ConfigurationError(f"unknown interaction-factor rule {self.rule!r}")

    @classmethod
    def explicit_bound(cls) -> InteractionFactor:
        return cls("explicit_bound", 1.0, 2)

    @classmethod
    def power(cls, coefficient: complex, exponent: int) -> InteractionFactor:
        return cls("power", coefficient, exponent)

    @classmethod
    def fixed(cls, value: complex) -> InteractionFactor:
        return cls("fixed", value, 0)

    def resolve(self, dx: float, sigma0: float) -> complex:
        if self.rule == "explicit_bound":
            value = 1.0 / (sigma0 * dx**2)
        elif self.rule == "power":
            value = self.coefficient * dx ** (-self.exponent)
        else:
            value = self.coefficient
        value = complex(value)
        if value.real < 0 or value.imag > 0:
            raise ConfigurationError(
                f"interaction factor {value} must have Re >= 0 and Im <= 0"
            )
        return value

    def describe(self) -> str:
        if self.rule == "explicit_bound":
            return "1/(sigma0*dx^2)"
        if self.rule == "power":
            return f"{self.coefficient}*dx^-{self.exponent}"
        return str(self.coefficient)


@dataclass(frozen=True)
class SchemeConfig:
    """Everything that defines a semi-discrete right-hand side.

    ``potential`` is called as ``potential(x, t)`` and must return real values.
    ``sat=False`` drops the boundary-flux cancellation terms (diagnostic use
    only; the resulting scheme does not conserve the norm).
    """

    operator: Operator
    interaction: InteractionFactor = InteractionFactor()
    dissipation: float = 0.0
    potential: Potential | None = None
    sat: bool = True

    def __post_init__(self) -> None:
        if not isinstance(self.operator, (SbpOperator, PeriodicStencil)):
            raise ConfigurationError("operator must be an SbpOperator or PeriodicStencil")
        if not self.dissipation >= 0:
            raise ConfigurationError(f"dissipation must be >= 0, got {self.dissipation}")


def _fourth_difference(u: np.ndarray) -> np.ndarray:
    return u[:-4] - 4.0 * u[1:-3] + 6.0 * u[2:-2] - 4.0 * u[3:-1] + u[4:]


def _dissipation_periodic(u: np.ndarray, epsilon: float, dx: float) -> np.ndarray:
    n = u.size
    padded = np.concatenate([u[n - 4:], u, u[:4]])
    return (-epsilon / dx) * _fourth_difference(_fourth_difference(padded))


def _dissipation_interface(
    u: np.ndarray, epsilon: float, dx: float, margin: int
) -> np.ndarray:
    # -eps/dx * B^T B u, B = fourth differences centred on [margin+2, n-3-margin];
    # equals -eps/dx * delta^8 u wherever the full stencil fits and is
    # negative semidefinite with support inside [margin, n-1-margin]
    n = u.size
    out = np.zeros_like(u)
    lo, hi = margin + 2, n - 3 - margin
    if hi < lo:
        return out
    b = np.zeros_like(u)
    b[lo:hi + 1] = _fourth_difference(u)[lo - 2:hi - 1]
    out[2:n - 2] = _fourth_difference(b)
    out *= -epsilon / dx
    return out


def ko_dissipation(op: Operator, epsilon: float, u: WaveFunction) -> WaveFunction:
    """High-order damping ``-epsilon dx^7 (Delta_h)^4 u``.

    ``Delta_h`` is the three-point second difference. In the interface layout
    the term is applied as ``-epsilon/dx * B^T B`` with ``B`` the five-point
    fourth difference restricted to stencils that stay clear of the SBP
    closure and of the last :data:`DISSIPATION_MARGIN` points, so it vanishes
    near both ends and never increases the norm.
    """
    if epsilon < 0:
        raise ConfigurationError(f"dissipation must be >= 0, got {epsilon}")
    dx = u.grid.dx
    if isinstance(op, PeriodicStencil):
        require(u, Representation.PERIODIC)
        return u.like(_dissipation_periodic(u.values, epsilon, dx))
    require(u, Representation.INTERFACE)
    margin = max(DISSIPATION_MARGIN, op.closure_width)
    return u.like(_dissipation_interface(u.values, epsilon, dx, margin))


def penalty_solve(
    L: complex, coeff: float, u0: complex, uN: complex
) -> tuple[complex, complex]:
    """Solve the implicit penalty stage at the two interface points.

    Returns ``(v0, vN)`` with ``v0 = u0 - i coeff L (v0 - vN)`` and
    ``vN = uN + i coeff L (v0 - vN)``. The sum is unchanged and the difference
    is divided by ``1 + 2 i coeff L``.
    """
    denom = 1.0 + 2.0j * coeff * L
    if denom == 0:
        raise ZeroDivisionError(f"singular penalty stage for L={L}, coeff={coeff}")
    s = u0 + uN
    d = (u0 - uN) / denom
    return 0.5 * (s + d), 0.5 * (s - d)


class PeriodicScheme:
    """Homogeneous centered-difference scheme on a periodic grid."""

    representation = Representation.PERIODIC

    def __init__(self, config: SchemeConfig, grid: GridCircle) -> None:
        if not isinstance(config.operator, PeriodicStencil):
            raise ConfigurationError("the periodic scheme needs a PeriodicStencil")
        self.config = config
        self.grid = grid
        self.stencil = config.operator
        self.dx = grid.dx
        self.x = grid.points(Representation.PERIODIC)
        self.interaction = 0.0j

    def rhs(self, u: np.ndarray, t: float) -> np.ndarray:
        dx = self.dx
        out = -1j * self.stencil.apply(self.stencil.apply(u, dx), dx)
        if self.config.potential is not None:
            out -= 1j * self.config.potential(self.x, t) * u
        if self.config.dissipation > 0:
            out += _dissipation_periodic(u, self.config.dissipation, dx)
        return out

    # IMEX protocol: nothing is stiff
    def explicit_rhs(self, u: np.ndarray, t: float) -> np.ndarray:
        return self.rhs(u, t)

    def stiff_rhs(self, u: np.ndarray, t: float) -> np.ndarray:
        return np.zeros_like(u)

    def solve_stiff(self, b: np.ndarray, coeff: float, t: float) -> np.ndarray:
        return b

    def is_time_independent(self) -> bool:
        return self.config.potential is None

    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues of the RHS for the modes of :func:`numpy.fft.fft` order."""
        if not self.is_time_independent():
            raise ConfigurationError("a potential breaks the Fourier diagonalisation")
        n = self.grid.n_intervals
        theta = 2.0 * np.pi * np.fft.fftfreq(n)
        s = self.stencil.symbol(theta)
        lam = 1j * (s / self.dx) ** 2
        if self.config.dissipation > 0:
            lam = lam - self.config.dissipation / self.dx * (2.0 - 2.0 * np.cos(theta)) ** 4
        return lam

    def describe(self) -> dict[str, str]:
        return {
            "scheme": "periodic",
            "operator": self.stencil.name,
            "dissipation": repr(self.config.dissipation),
        }


class InterfaceScheme:
    """SBP scheme with the two grid ends coupled at the interface."""

    representation = Representation.INTERFACE

    def __init__(self, config: SchemeConfig, grid: GridCircle) -> None:
        if not isinstance(config.operator, SbpOperator):
            raise ConfigurationError("the interface scheme needs an SbpOperator")
        self.config = config
        self.grid = grid
        self.op = config.operator
        self.dx = grid.dx
        npts = grid.size(Representation.INTERFACE)
        self.sigma = self.op.sigma(npts)
        self.x = grid.points(Representation.INTERFACE)
        self.interaction = config.interaction.resolve(self.dx, float(self.sigma[0]))
        self._sat0 = -1j / (self.dx * self.sigma[0])
        self._satN = 1j / (self.dx * self.sigma[-1])
        self._margin = max(DISSIPATION_MARGIN, self.op.closure_width)
        self._kernel_args = _kernels.as_kernel_args(
            self.op.interior_stencil, self.op.boundary_closure
        )

    def _kernel_settings(self) -> tuple:
        sat0, satN = (self._sat0, self._satN) if self.config.sat else (0j, 0j)
        lo, hi = self._margin + 2, self.grid.n_intervals - 2 - self._margin
        diss = -self.config.dissipation / self.dx
        return (*self._kernel_args, 1.0 / self.dx, sat0, satN, self.interaction, diss, lo, hi)

    def explicit_rhs(self, u: np.ndarray, t: float) -> np.ndarray:
        dx = self.dx
        if u.dtype == np.complex128 and self.config.potential is None:
            u = np.ascontiguousarray(u)
            stencil, closure, inv_dx, sat0, satN, _, diss, lo, hi = self._kernel_settings()
            out = np.empty_like(u)
            _kernels.interface_rhs(u, stencil, closure, inv_dx, sat0, satN, 0j, diss, lo, hi,
                                   np.empty_like(u), np.empty_like(u), out)
            return out
        # numpy path; also accepts mpmath object arrays for extended-precision checks
        du = self.op.apply(u, dx)
        out = -1j * self.op.apply(du, dx)
        if self.config.sat:
            out[0] += (-1j * du[0]) / (dx * self.sigma[0])
            out[-1] += (1j * du[-1]) / (dx * self.sigma[-1])
        if self.config.potential is not None:
            out -= 1j * self.config.potential(self.x, t) * u
        if self.config.dissipation > 0:
            out += _dissipation_interface(u, self.config.dissipation, dx, self._margin)
        return out

    def compiled_step(self, integrator: str, tableau=None):
        """Compiled single-step function ``step(u, t, dt)``, or ``None``.

        Available for time-independent schemes; it reproduces the generic
        :func:`~schrodinger_sat.integrate.rk4_step` and
        :func:`~schrodinger_sat.integrate.imex_step` to round-off.
        """
        if not self.is_time_independent():
            return None
        args = self._kernel_settings()
        if integrator == "rk4":
            def step(u: np.ndarray, t: float, dt: float) -> np.ndarray:
                return _kernels.rk4_step(u, dt, *args)
            return step
        if integrator == "imex" and tableau is not None:
            A = np.ascontiguousarray(tableau.explicit)
            Ai = np.ascontiguousarray(tableau.implicit)
            b = np.ascontiguousarray(tableau.weights_explicit)
            bi = np.ascontiguousarray(tableau.weights_implicit)
            need_e = (A != 0).any(axis=0) | (b != 0)

            def step(u: np.ndarray, t: float, dt: float) -> np.ndarray:
                return _kernels.imex_step(u, dt, A, Ai, b, bi, need_e, *args)
            return step
        return None

    def stiff_rhs(self, u: np.ndarray, t: float) -> np.ndarray:
        out = np.zeros_like(u)
        jump = -1j * self.interaction * (u[0] - u[-1])
        out[0] = jump
        out[-1] = -jump
        return out

    def rhs(self, u: np.ndarray, t: float) -> np.ndarray:
        out = self.explicit_rhs(u, t)
        jump = -1j * self.interaction * (u[0] - u[-1])
        out[0] += jump
        out[-1] -= jump
        return out

    def split(self, u: np.ndarray, t: float) -> tuple[np.ndarray, np.ndarray]:
        return self.explicit_rhs(u, t), self.stiff_rhs(u, t)

    def solve_stiff(self, b: np.ndarray, coeff: float, t: float) -> np.ndarray:
        """Solve ``v = b + coeff * stiff_rhs(v)``; only the end points change."""
        v = b.copy()
        v[0], v[-1] = penalty_solve(self.interaction, coeff, b[0], b[-1])
        return v

    def is_time_independent(self) -> bool:
        return self.config.potential is None

    def describe(self) -> dict[str, str]:
        return {
            "scheme": "interface",
            "operator": self.op.name,
            "interaction_rule": self.config.interaction.describe(),
            "interaction_factor": repr(self.interaction),
            "dissipation": repr(self.config.dissipation),
            "sat": str(self.config.sat),
        }


def make_scheme(config: SchemeConfig, grid: GridCircle) -> PeriodicScheme | InterfaceScheme:
    if isinstance(config.operator, PeriodicStencil):
        return PeriodicScheme(config, grid)
    return InterfaceScheme(config, grid)


def rhs_periodic(cfg: SchemeConfig, u: WaveFunction, t: float) -> WaveFunction:
    require(u, Representation.PERIODIC)
    return u.like(PeriodicScheme(cfg, u.grid).rhs(u.values, t))


def rhs_interface(cfg: SchemeConfig, u: WaveFunction, t: float) -> WaveFunction:
    require(u, Representation.INTERFACE)
    return u.like(InterfaceScheme(cfg, u.grid).rhs(u.values, t))


def rhs_interface_split(
    cfg: SchemeConfig, u: WaveFunction, t: float
) -> tuple[WaveFunction, WaveFunction]:
    """Explicit part and stiff (penalty) part; they sum to :func:`rhs_interface`."""
    require(u, Representation.INTERFACE)
    explicit, stiff = InterfaceScheme(cfg, u.grid).split(u.values, t)
    return u.like(explicit), u.like(stiff)
