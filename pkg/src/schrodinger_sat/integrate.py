"""Time integration: classical RK4 and the IMEX-SSP3(4,3,3) Runge-Kutta scheme.

States are plain complex arrays here; :func:`evolve` wraps them back into
:class:`~schrodinger_sat.core.WaveFunction` objects.

A scheme used with :func:`imex_step` supplies three callables:

``explicit(u, t)``
    non-stiff part of the right-hand side;
``stiff(u, t)``
    stiff part;
``solve(b, coeff, t)``
    returns ``v`` with ``v = b + coeff * stiff(v, t)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .core import ConfigurationError, WaveFunction

__all__ = [
    "IMEX_SSP3_433",
    "ImexTableau",
    "InstabilityError",
    "StepPolicy",
    "evolve",
    "imex_step",
    "propagate_fourier_rk4",
    "rk4_step",
    "sample_times",
    "step_schedule",
]

RHS = Callable[[np.ndarray, float], np.ndarray]
Observer = Callable[[float, np.ndarray], None]


class InstabilityError(FloatingPointError):
    """Non-finite values appeared during time stepping."""

    def __init__(self, message: str, *, dt: float, time: float | None = None,
                 step: int | None = None, interaction: complex | None = None) -> None:
        super().__init__(message)
        self.dt = dt
        self.time = time
        self.step = step
        self.interaction = interaction


@dataclass(frozen=True)
class ImexTableau:
    """Butcher coefficients of an additive (IMEX) Runge-Kutta method."""

    name: str
    explicit: np.ndarray
    implicit: np.ndarray
    weights_explicit: np.ndarray
    weights_implicit: np.ndarray
    nodes_explicit: np.ndarray = field(init=False)
    nodes_implicit: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        for name in ("explicit", "implicit", "weights_explicit", "weights_implicit"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "nodes_explicit", self.explicit.sum(axis=1))
        object.__setattr__(self, "nodes_implicit", self.implicit.sum(axis=1))

    @property
    def stages(self) -> int:
        return self.explicit.shape[0]


# Pareschi & Russo (2005), L-stable SSP3(4,3,3)
_ALPHA = 0.24169426078821
_BETA = 0.06042356519705
_ETA = 0.12915286960590

IMEX_SSP3_433 = ImexTableau(
    name="IMEX-SSP3(4,3,3)",
    explicit=[
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.25, 0.25, 0.0],
    ],
    implicit=[
        [_ALPHA, 0.0, 0.0, 0.0],
        [-_ALPHA, _ALPHA, 0.0, 0.0],
        [0.0, 1.0 - _ALPHA, _ALPHA, 0.0],
        [_BETA, _ETA, 0.5 - _BETA - _ETA - _ALPHA, _ALPHA],
    ],
    weights_explicit=[0.0, 1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0],
    weights_implicit=[0.0, 1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0],
)


@dataclass(frozen=True)
class StepPolicy:
    """Time step ``dt = cfl * dx**2``."""

    cfl: float = 0.25

    def __post_init__(self) -> None:
        if not self.cfl > 0:
            raise ConfigurationError(f"cfl factor must be positive, got {self.cfl}")

    def dt(self, dx: float) -> float:
        return self.cfl * dx * dx


def _check_finite(u: np.ndarray, dt: float) -> np.ndarray:
    if not np.isfinite(u).all():
        raise InstabilityError(f"non-finite state after a step with dt={dt:.6g}", dt=dt)
    return u


def rk4_step(rhs: RHS, u: np.ndarray, t: float, dt: float) -> np.ndarray:
    """One step of the classical fourth-order Runge-Kutta method."""
    k1 = rhs(u, t)
    k2 = rhs(u + 0.5 * dt * k1, t + 0.5 * dt)
    k3 = rhs(u + 0.5 * dt * k2, t + 0.5 * dt)
    k4 = rhs(u + dt * k3, t + dt)
    return _check_finite(u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4), dt)


def imex_step(
    explicit: RHS,
    stiff: RHS,
    solve: Callable[[np.ndarray, float, float], np.ndarray],
    u: np.ndarray,
    t: float,
    dt: float,
    tableau: ImexTableau = IMEX_SSP3_433,
) -> np.ndarray:
    """One additive Runge-Kutta step with a diagonally implicit stiff part."""
    A, Ai = tableau.explicit, tableau.implicit
    b, bi = tableau.weights_explicit, tableau.weights_implicit
    c, ci = tableau.nodes_explicit, tableau.nodes_implicit
    s = tableau.stages
    # skip stage evaluations that no later stage and no weight uses
    need_e = (A != 0).any(axis=0) | (b != 0)
    need_s = (np.tril(Ai, -1) != 0).any(axis=0) | (bi != 0)
    ke: list[np.ndarray | None] = [None] * s
    ks: list[np.ndarray | None] = [None] * s
    for i in range(s):
        acc = u.copy()
        for j in range(i):
            if A[i, j] != 0:
                acc += (dt * A[i, j]) * ke[j]
            if Ai[i, j] != 0:
                acc += (dt * Ai[i, j]) * ks[j]
        if Ai[i, i] != 0:
            stage = solve(acc, dt * Ai[i, i], t + ci[i] * dt)
        else:
            stage = acc
        if need_e[i]:
            ke[i] = explicit(stage, t + c[i] * dt)
        if need_s[i]:
            ks[i] = stiff(stage, t + ci[i] * dt)
    out = u.copy()
    for i in range(s):
        if b[i] != 0:
            out += (dt * b[i]) * ke[i]
        if bi[i] != 0:
            out += (dt * bi[i]) * ks[i]
    return _check_finite(out, dt)


def step_schedule(span: float, dt: float) -> tuple[int, float]:
    """Split *span* into full steps of *dt* plus one final shorter step.

    Returns ``(n_full, last)`` with ``n_full * dt + last == span`` and
    ``0 < last <= dt``; a span that is an exact multiple of *dt* (to round-off)
    gives ``last == dt``.
    """
    if span <= 0:
        return 0, 0.0
    n = max(1, math.ceil(span / dt - 1e-9))
    last = span - (n - 1) * dt
    return n - 1, last


def sample_times(t_final: float, samples: int) -> np.ndarray:
    """``samples + 1`` uniformly spaced output times from 0 to *t_final*."""
    if samples < 1:
        raise ConfigurationError("need at least one sample")
    return t_final * np.arange(samples + 1) / samples


def evolve(
    scheme,
    u0: WaveFunction,
    t_final: float,
    *,
    integrator: str = "rk4",
    policy: StepPolicy = StepPolicy(),
    observers: Iterable[Observer] = (),
    samples: int | Sequence[float] = 100,
    tableau: ImexTableau = IMEX_SSP3_433,
    use_compiled: bool = True,
) -> WaveFunction:
    """Advance *u0* to *t_final*.

    Steps have size ``policy.dt(dx)``; the last step before each output time is
    shortened to land on it exactly. Each observer is called as
    ``observer(t, values)`` at ``t = 0`` and at every output time. *samples* is
    either a number of uniform intervals or an explicit list of output times.
    Schemes offering ``compiled_step`` use it unless *use_compiled* is false.
    """
    if not t_final > 0:
        raise ConfigurationError(f"t_final must be positive, got {t_final}")
    if integrator not in ("rk4", "imex"):
        raise ConfigurationError(f"unknown integrator {integrator!r}")
    if u0.representation is not scheme.representation or u0.grid != scheme.grid:
        raise ConfigurationError("initial state does not match the scheme grid/layout")
    if isinstance(samples, int):
        times = sample_times(t_final, samples)
    else:
        times = np.unique(np.concatenate([[0.0], np.asarray(samples, float), [t_final]]))
        times = times[(times >= 0) & (times <= t_final)]
    observers = list(observers)
    dt = policy.dt(scheme.grid.dx)

    compiled = getattr(scheme, "compiled_step", None) if use_compiled else None
    fast = compiled(integrator, tableau) if compiled is not None else None
    if fast is not None:
        def step(v: np.ndarray, t: float, h: float) -> np.ndarray:
            return _check_finite(fast(v, t, h), h)
    elif integrator == "rk4":
        def step(v: np.ndarray, t: float, h: float) -> np.ndarray:
            return rk4_step(scheme.rhs, v, t, h)
    else:
        def step(v: np.ndarray, t: float, h: float) -> np.ndarray:
            return imex_step(scheme.explicit_rhs, scheme.stiff_rhs, scheme.solve_stiff,
                             v, t, h, tableau)

    u = np.array(u0.values)
    t_prev = t_now = 0.0
    count = 0
    for obs in observers:
        obs(0.0, u)
    try:
        for t_out in times[1:]:
            n_full, last = step_schedule(t_out - t_prev, dt)
            # overflow shows up as a non-finite state and is reported as instability
            with np.errstate(over="ignore", invalid="ignore"):
                for k in range(n_full + 1):
                    t_now = t_prev + k * dt
                    u = step(u, t_now, dt if k < n_full else last)
                    count += 1
            t_prev = float(t_out)
            for obs in observers:
                obs(t_prev, u)
    except InstabilityError as exc:
        L = getattr(scheme, "interaction", None)
        raise InstabilityError(
            f"{integrator} became unstable at step {count + 1} (t={t_now:.6g}) "
            f"with dt={dt:.6g}, L={L}",
            dt=dt, time=t_now, step=count + 1, interaction=L,
        ) from exc
    return u0.like(u, time=t_prev)


def _rk4_amplification(z: np.ndarray) -> np.ndarray:
    return 1.0 + z * (1.0 + z * (0.5 + z * (1.0 / 6.0 + z / 24.0)))


def propagate_fourier_rk4(
    scheme,
    u0: WaveFunction,
    t_final: float,
    *,
    policy: StepPolicy = StepPolicy(),
    observers: Iterable[Observer] = (),
    samples: int | Sequence[float] = 100,
) -> WaveFunction:
    """RK4 evolution of a periodic, time-independent scheme in Fourier space.

    The periodic right-hand side is circulant, so each Fourier mode is
    multiplied by the RK4 amplification factor at every step. Using the same
    step schedule as :func:`evolve`, this returns the RK4 solution (up to
    round-off) at a cost independent of the number of steps.
    """
    if not scheme.is_time_independent():
        raise ConfigurationError("Fourier propagation needs a time-independent scheme")
    if isinstance(samples, int):
        times = sample_times(t_final, samples)
    else:
        times = np.unique(np.concatenate([[0.0], np.asarray(samples, float), [t_final]]))
    lam = scheme.eigenvalues()
    dt = policy.dt(scheme.grid.dx)
    full = _rk4_amplification(dt * lam)
    if np.any(np.abs(full) > 1.0 + 1e-12):
        raise InstabilityError(
            f"RK4 is unstable for this operator with dt={dt:.6g}", dt=dt
        )
    observers = list(observers)
    uhat = np.fft.fft(u0.values)
    t_prev = 0.0
    for obs in observers:
        obs(0.0, np.array(u0.values))
    for t_out in times[1:]:
        n_full, last = step_schedule(t_out - t_prev, dt)
        uhat = uhat * full**n_full * _rk4_amplification(last * lam)
        t_prev = float(t_out)
        if observers:
            u = np.fft.ifft(uhat)
            for obs in observers:
                obs(t_prev, u)
    return u0.like(np.fft.ifft(uhat), time=t_prev)
