r"""Summation-by-parts first-derivative operators.

Diagonal-norm operators :math:`D = (H \, dx)^{-1} Q` with ``H = diag(sigma)`` and
``Q + Q^T = diag(-1, 0, ..., 0, 1)`` give the discrete integration-by-parts rule

.. math::

    \langle u, D v \rangle + \langle D u, v \rangle
        = \bar u_N v_N - \bar u_0 v_0,
    \qquad
    \langle u, v \rangle = dx \sum_j \sigma_j \bar u_j v_j .

Shipped operators are labelled by ``(interior order, boundary order)``:
(2,1), (4,2), (6,3) and (8,4). The norm weights are Strand's; the
closure blocks of (6,3) and (8,4) carry free parameters, fixed here by
minimising the leading boundary truncation error while keeping the spectral
norm of :math:`H^{-1/2} Q H^{-1/2}` within 2% of its smallest attainable value
(which controls the explicit time step of ``D D``).

Free parameters (entries of the antisymmetric part of ``Q``)::

    (6,3):  Q[4,5] = 0.70128647
    (8,4):  Q[5,6] = 0.72945, Q[5,7] = -0.131954, Q[6,7] = 0.761486

All tables are exact rationals for those values. The right boundary uses the
reflected closure, ``D[N-i, N-j] = -D[i, j]``.

Periodic (centered) stencils of orders 2..8 are provided for reference runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
import scipy.sparse as sps

from .core import (
    ConfigurationError,
    Representation,
    WaveFunction,
    require,
    require_compatible,
)

__all__ = [
    "CENTERED_COEFFICIENTS",
    "PeriodicStencil",
    "SbpOperator",
    "apply_d",
    "apply_d_twice",
    "apply_periodic_d",
    "dump_coefficients",
    "periodic_stencil",
    "sbp_operator",
    "verify_sbp_identity",
    "weighted_inner",
]

# a_k for offsets k = 1..p; (Du)_j = sum_k a_k (u_{j+k} - u_{j-k}) / dx
CENTERED_COEFFICIENTS: dict[int, tuple[Fraction, ...]] = {
    2: (Fraction(1, 2),),
    4: (Fraction(2, 3), Fraction(-1, 12)),
    6: (Fraction(3, 4), Fraction(-3, 20), Fraction(1, 60)),
    8: (Fraction(4, 5), Fraction(-1, 5), Fraction(4, 105), Fraction(-1, 280)),
}

_CLOSURES = {
    2: (
        # norm weights
        ("1/2",),
        # Q closure rows
        (
            ("-1/2", "1/2"),
        ),
    ),
    4: (
        # norm weights
        ("17/48", "59/48", "43/48", "49/48",),
        # Q closure rows
        (
            ("-1/2", "59/96", "-1/12", "-1/32", "0", "0"),
            ("-59/96", "0", "59/96", "0", "0", "0"),
            ("1/12", "-59/96", "0", "59/96", "-1/12", "0"),
            ("1/32", "0", "-59/96", "0", "2/3", "-1/12"),
        ),
    ),
    6: (
        # norm weights
        ("13649/43200", "12013/8640", "2711/4320", "5359/4320", "7877/8640", "43801/43200",),
        # Q closure rows
        (
            ("-1/2", "5203920407/8100000000", "-181325189/4050000000", "-63995281/450000000", "133456061/4050000000", "93732907/8100000000", "0", "0", "0"),
            ("-5203920407/8100000000", "0", "107879719/270000000", "291237311/810000000", "-51767093/540000000", "-28056313/1350000000", "0", "0", "0"),
            ("181325189/4050000000", "-107879719/270000000", "0", "154201657/405000000", "-3962563/270000000", "-15235843/1350000000", "0", "0", "0"),
            ("63995281/450000000", "-291237311/810000000", "-154201657/405000000", "0", "522889157/810000000", "-259700189/4050000000", "1/60", "0", "0"),
            ("-133456061/4050000000", "51767093/540000000", "3962563/270000000", "-522889157/810000000", "0", "70128647/100000000", "-3/20", "1/60", "0"),
            ("-93732907/8100000000", "28056313/1350000000", "15235843/1350000000", "259700189/4050000000", "-70128647/100000000", "0", "3/4", "-3/20", "1/60"),
        ),
    ),
    8: (
        # norm weights
        ("1498139/5080320", "1107307/725760", "20761/80640", "1304999/725760", "299527/725760", "103097/80640", "670091/725760", "5127739/5080320",),
        # Q closure rows
        (
            ("-1/2", "938695973/1411200000", "-414622007/21168000000", "-8339734127/38102400000", "9505999/1058400000", "53079487/604800000", "-11643241/777600000", "-179579093/21168000000", "0", "0", "0", "0"),
            ("-938695973/1411200000", "0", "251832347/1512000000", "106876069/151200000", "-22579939/777600000", "-73280923/302400000", "3182563/75600000", "2004120739/95256000000", "0", "0", "0", "0"),
            ("414622007/21168000000", "-251832347/1512000000", "0", "1944979/12096000", "-8667781/604800000", "374701/56000000", "-369463/42000000", "1842077/705600000", "0", "0", "0", "0"),
            ("8339734127/38102400000", "-106876069/151200000", "-1944979/12096000", "0", "11792867/40320000", "134108083/302400000", "-33724387/680400000", "-15928811/423360000", "0", "0", "0", "0"),
            ("-9505999/1058400000", "22579939/777600000", "8667781/604800000", "-11792867/40320000", "0", "29066429/86400000", "-61811777/604800000", "1045914827/38102400000", "-1/280", "0", "0", "0"),
            ("-53079487/604800000", "73280923/302400000", "-374701/56000000", "-134108083/302400000", "-29066429/86400000", "0", "14589/20000", "-65977/500000", "4/105", "-1/280", "0", "0"),
            ("11643241/777600000", "-3182563/75600000", "369463/42000000", "33724387/680400000", "61811777/604800000", "-14589/20000", "0", "380743/500000", "-1/5", "4/105", "-1/280", "0"),
            ("179579093/21168000000", "-2004120739/95256000000", "-1842077/705600000", "15928811/423360000", "-1045914827/38102400000", "65977/500000", "-380743/500000", "0", "4/5", "-1/5", "4/105", "-1/280"),
        ),
    ),

}


@dataclass(frozen=True, eq=False)
class SbpOperator:
    """Diagonal-norm SBP first derivative for the interface layout.

    Attributes
    ----------
    interior_order
        Order of the centered interior stencil.
    interior_stencil
        Coefficients ``a_1..a_p`` of the interior stencil.
    boundary_closure
        ``(r, r + p)`` block holding the first ``r`` rows of ``dx * D``.
    boundary_q
        The same rows of ``Q`` (before division by the norm weights).
    sigma_boundary
        The first ``r`` norm weights; the remaining interior weights are 1.
    """

    interior_order: int
    interior_stencil: np.ndarray
    boundary_closure: np.ndarray
    boundary_q: np.ndarray
    sigma_boundary: np.ndarray

    @property
    def boundary_order(self) -> int:
        return self.interior_order // 2

    @property
    def closure_width(self) -> int:
        return self.sigma_boundary.size

    @property
    def name(self) -> str:
        return f"sbp{self.interior_order}{self.boundary_order}"

    def min_points(self) -> int:
        return 2 * self.closure_width

    def check_size(self, npoints: int) -> None:
        if npoints < self.min_points():
            raise ConfigurationError(
                f"{self.name} needs at least {self.min_points()} points, got {npoints}"
            )

    def sigma(self, npoints: int) -> np.ndarray:
        self.check_size(npoints)
        r = self.closure_width
        s = np.ones(npoints)
        s[:r] = self.sigma_boundary
        s[npoints - r:] = self.sigma_boundary[::-1]
        return s

    def apply(self, u: np.ndarray, dx: float) -> np.ndarray:
        """Apply ``D`` to a raw array of interface values."""
        n = u.shape[0]
        self.check_size(n)
        out = np.zeros_like(u)
        for k, a in enumerate(self.interior_stencil, start=1):
            out[k:n - k] += a * (u[2 * k:] - u[:n - 2 * k])
        c = self.boundary_closure
        r, m = c.shape
        out[:r] = c @ u[:m]
        out[n - r:] = -(c @ u[::-1][:m])[::-1]
        out /= dx
        return out

    def matrix(self, npoints: int, dx: float = 1.0) -> sps.csr_matrix:
        """Sparse matrix of ``D`` on *npoints* interface points."""
        self.check_size(npoints)
        p = self.interior_stencil.size
        offsets = list(range(-p, 0)) + list(range(1, p + 1))
        diags = [-self.interior_stencil[-k - 1] for k in range(p)]
        diags += list(self.interior_stencil)
        mat = sps.diags(diags, offsets, shape=(npoints, npoints), format="lil")
        c = self.boundary_closure
        r, m = c.shape
        for i in range(r):
            mat[i, :] = 0.0
            mat[i, :m] = c[i]
            mat[npoints - 1 - i, :] = 0.0
            mat[npoints - 1 - i, npoints - m:] = -c[i, ::-1]
        return (mat.tocsr() / dx).tocsr()


@lru_cache(maxsize=None)
def sbp_operator(order: int) -> SbpOperator:
    """Return the shipped diagonal-norm SBP operator of interior *order*."""
    if order not in _CLOSURES:
        raise ConfigurationError(f"no SBP operator of order {order}; choose from 2, 4, 6, 8")
    sig, rows = _CLOSURES[order]
    sigma = np.array([float(Fraction(s)) for s in sig])
    q = np.array([[float(Fraction(x)) for x in row] for row in rows])
    # divide in exact arithmetic so D rows are correctly rounded
    closure = np.array(
        [[float(Fraction(x) / Fraction(s)) for x in row] for row, s in zip(rows, sig)]
    )
    for arr in (sigma, q, closure):
        arr.setflags(write=False)
    stencil = np.array([float(a) for a in CENTERED_COEFFICIENTS[order]])
    stencil.setflags(write=False)
    return SbpOperator(order, stencil, closure, q, sigma)


@dataclass(frozen=True)
class PeriodicStencil:
    """Centered first-derivative stencil applied with wraparound indexing."""

    order: int

    def __post_init__(self) -> None:
        if self.order not in CENTERED_COEFFICIENTS:
            raise ConfigurationError(
                f"no centered stencil of order {self.order}; choose from 2, 4, 6, 8"
            )

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([float(a) for a in CENTERED_COEFFICIENTS[self.order]])

    @property
    def name(self) -> str:
        return f"periodic{self.order}"

    def apply(self, u: np.ndarray, dx: float) -> np.ndarray:
        n = u.shape[0]
        a = self.coefficients
        p = a.size
        if n <= 2 * p:
            raise ConfigurationError(f"{self.name} needs more than {2 * p} points")
        padded = np.concatenate([u[n - p:], u, u[:p]])
        out = np.zeros_like(u)
        for k, ak in enumerate(a, start=1):
            out += ak * (padded[p + k:p + k + n] - padded[p - k:p - k + n])
        return out / dx

    def symbol(self, theta: np.ndarray) -> np.ndarray:
        """Real ``s`` with ``D exp(i theta j) = (i s / dx) exp(i theta j)``."""
        theta = np.asarray(theta, dtype=float)
        return 2.0 * sum(
            ak * np.sin(k * theta) for k, ak in enumerate(self.coefficients, start=1)
        )

    def matrix(self, npoints: int, dx: float = 1.0) -> sps.csr_matrix:
        a = self.coefficients
        mat = sps.lil_matrix((npoints, npoints))
        for j in range(npoints):
            for k, ak in enumerate(a, start=1):
                mat[j, (j + k) % npoints] += ak
                mat[j, (j - k) % npoints] -= ak
        return (mat.tocsr() / dx).tocsr()


def periodic_stencil(order: int) -> PeriodicStencil:
    return PeriodicStencil(order)


def apply_d(op: SbpOperator, u: WaveFunction) -> WaveFunction:
    """First derivative of an interface-layout state."""
    require(u, Representation.INTERFACE)
    return u.like(op.apply(u.values, u.grid.dx))


def apply_d_twice(op: SbpOperator, u: WaveFunction) -> WaveFunction:
    """``D(D u)``; the wide second derivative used by the interface scheme."""
    require(u, Representation.INTERFACE)
    dx = u.grid.dx
    return u.like(op.apply(op.apply(u.values, dx), dx))


def apply_periodic_d(st: PeriodicStencil, u: WaveFunction) -> WaveFunction:
    require(u, Representation.PERIODIC)
    return u.like(st.apply(u.values, u.grid.dx))


def _weights(op: SbpOperator | PeriodicStencil, u: WaveFunction) -> np.ndarray:
    if isinstance(op, PeriodicStencil):
        require(u, Representation.PERIODIC)
        return np.ones(u.values.size)
    require(u, Representation.INTERFACE)
    return op.sigma(u.values.size)


def weighted_inner(
    op: SbpOperator | PeriodicStencil, u: WaveFunction, v: WaveFunction
) -> complex:
    """``dx * sum_j sigma_j conj(u_j) v_j`` with the norm weights of *op*."""
    require_compatible(u, v)
    w = _weights(op, u)
    return complex(u.grid.dx * np.sum(w * np.conj(u.values) * v.values))


def verify_sbp_identity(op: SbpOperator, u: WaveFunction, v: WaveFunction) -> float:
    """Absolute residual of the discrete integration-by-parts identity."""
    require_compatible(u, v)
    require(u, Representation.INTERFACE)
    du, dv = apply_d(op, u), apply_d(op, v)
    a, b = u.values, v.values
    boundary = np.conj(a[-1]) * b[-1] - np.conj(a[0]) * b[0]
    return abs(weighted_inner(op, u, dv) + weighted_inner(op, du, v) - boundary)


def dump_coefficients(op: SbpOperator | PeriodicStencil) -> str:
    """Plain-text coefficient table, one stencil row per line."""
    lines = [f"# {op.name}"]
    if isinstance(op, PeriodicStencil):
        lines.append("interior " + " ".join(repr(a) for a in op.coefficients))
        return "\n".join(lines) + "\n"
    lines.append("interior " + " ".join(repr(a) for a in op.interior_stencil))
    lines.append("sigma " + " ".join(repr(s) for s in op.sigma_boundary))
    for i, row in enumerate(op.boundary_closure):
        lines.append(f"row{i} " + " ".join(repr(x) for x in row))
    return "\n".join(lines) + "\n"
