"""Compiled inner loops for the interface scheme.

These mirror the numpy code paths of :class:`~schrodinger_sat.scheme.InterfaceScheme`
and :func:`~schrodinger_sat.integrate.imex_step`; the numpy versions remain the
reference and the test-suite checks that both agree.
"""

from __future__ import annotations

import numba
import numpy as np


@numba.njit(cache=True)
def sbp_apply(u, stencil, closure, inv_dx, out):
    n = u.shape[0]
    p = stencil.shape[0]
    r, m = closure.shape
    for j in range(r, n - r):
        acc = 0j
        for k in range(p):
            acc += stencil[k] * (u[j + k + 1] - u[j - k - 1])
        out[j] = acc * inv_dx
    for i in range(r):
        a = 0j
        b = 0j
        for jj in range(m):
            a += closure[i, jj] * u[jj]
            b += closure[i, jj] * u[n - 1 - jj]
        out[i] = a * inv_dx
        out[n - 1 - i] = -b * inv_dx
    return out


@numba.njit(cache=True)
def add_dissipation(u, coef, lo, hi, buf, out):
    # out += coef * B^T B u with B the fourth difference centred on lo..hi
    n = u.shape[0]
    for j in range(n):
        buf[j] = 0j
    for j in range(lo, hi + 1):
        buf[j] = u[j - 2] - 4.0 * u[j - 1] + 6.0 * u[j] - 4.0 * u[j + 1] + u[j + 2]
    for j in range(2, n - 2):
        out[j] += coef * (buf[j - 2] - 4.0 * buf[j - 1] + 6.0 * buf[j]
                          - 4.0 * buf[j + 1] + buf[j + 2])


@numba.njit(cache=True)
def interface_rhs(u, stencil, closure, inv_dx, sat0, satN, L, diss, lo, hi, du, buf, out):
    """Full right-hand side; ``L = 0`` gives the explicit part only."""
    sbp_apply(u, stencil, closure, inv_dx, du)
    sbp_apply(du, stencil, closure, inv_dx, out)
    for j in range(out.shape[0]):
        out[j] = -1j * out[j]
    out[0] += sat0 * du[0]
    out[-1] += satN * du[-1]
    if L != 0:
        jump = -1j * L * (u[0] - u[-1])
        out[0] += jump
        out[-1] -= jump
    if diss != 0 and hi >= lo:
        add_dissipation(u, diss, lo, hi, buf, out)
    return out


@numba.njit(cache=True)
def rk4_step(u, dt, stencil, closure, inv_dx, sat0, satN, L, diss, lo, hi):
    n = u.shape[0]
    k = np.empty((4, n), dtype=np.complex128)
    v = np.empty(n, dtype=np.complex128)
    du = np.empty(n, dtype=np.complex128)
    buf = np.empty(n, dtype=np.complex128)
    interface_rhs(u, stencil, closure, inv_dx, sat0, satN, L, diss, lo, hi, du, buf, k[0])
    for s in range(1, 4):
        h = dt if s == 3 else 0.5 * dt
        for j in range(n):
            v[j] = u[j] + h * k[s - 1, j]
        interface_rhs(v, stencil, closure, inv_dx, sat0, satN, L, diss, lo, hi, du, buf, k[s])
    out = np.empty(n, dtype=np.complex128)
    c = dt / 6.0
    for j in range(n):
        out[j] = u[j] + c * (k[0, j] + 2.0 * k[1, j] + 2.0 * k[2, j] + k[3, j])
    return out


@numba.njit(cache=True)
def imex_step(u, dt, A, Ai, b, bi, need_e, stencil, closure, inv_dx,
              sat0, satN, L, diss, lo, hi):
    # the stiff part is -iL(u_0 - u_N) at j = 0 and its negative at j = N,
    # so only its scalar value is stored per stage
    n = u.shape[0]
    s = A.shape[0]
    ke = np.zeros((s, n), dtype=np.complex128)
    ks = np.zeros(s, dtype=np.complex128)
    v = np.empty(n, dtype=np.complex128)
    du = np.empty(n, dtype=np.complex128)
    buf = np.empty(n, dtype=np.complex128)
    for i in range(s):
        for j in range(n):
            v[j] = u[j]
        for m in range(i):
            a = dt * A[i, m]
            if a != 0:
                for j in range(n):
                    v[j] += a * ke[m, j]
            ai = dt * Ai[i, m]
            if ai != 0:
                v[0] += ai * ks[m]
                v[-1] -= ai * ks[m]
        coeff = dt * Ai[i, i]
        if coeff != 0:
            total = v[0] + v[-1]
            diff = (v[0] - v[-1]) / (1.0 + 2.0j * coeff * L)
            v[0] = 0.5 * (total + diff)
            v[-1] = 0.5 * (total - diff)
        if need_e[i]:
            interface_rhs(v, stencil, closure, inv_dx, sat0, satN, 0j, diss, lo, hi,
                          du, buf, ke[i])
        ks[i] = -1j * L * (v[0] - v[-1])
    out = u.copy()
    for i in range(s):
        w = dt * b[i]
        if w != 0:
            for j in range(n):
                out[j] += w * ke[i, j]
        wi = dt * bi[i]
        if wi != 0:
            out[0] += wi * ks[i]
            out[-1] -= wi * ks[i]
    return out


def as_kernel_args(stencil: np.ndarray, closure: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return (np.ascontiguousarray(stencil, dtype=np.float64),
            np.ascontiguousarray(closure, dtype=np.float64))
