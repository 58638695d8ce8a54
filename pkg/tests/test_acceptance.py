"""Acceptance checks, one PASS/FAIL line each (see the terminal summary).

Checks that the method does not reach at the stated setup are asserted
as stated and marked ``xfail(strict=True)``; the reason string gives the
measured numbers.
"""

import dataclasses

import numpy as np
import pytest

from conftest import random_state, report
from test_integrate import A_MAT, B_MAT, empirical_order, imex_linear_step, linear_errors
from test_scheme import penalty_errors
from schrodinger_sat import (
    InitialData,
    InteractionFactor,
    InterfaceScheme,
    SchemeConfig,
    make_grid,
    rk4_step,
    run_preset,
    sbp_operator,
    verify_sbp_identity,
    weighted_inner,
)
from schrodinger_sat.harness import CROSSING_THRESHOLD, get_preset

ORDERS = (2, 4, 6, 8)
SCALINGS = {
    "1e3/dx^2": InteractionFactor.power(1e3, 2),
    "1e3/dx^3": InteractionFactor.power(1e3, 3),
    "1/(sigma0 dx^2)": InteractionFactor.explicit_bound(),
}
_CACHE = {}


def preset_result(name, preset=None):
    if name not in _CACHE:
        _CACHE[name] = run_preset(preset if preset is not None else name)
    return _CACHE[name]


def narrow(name):
    """Full-scale preset with the CI envelope width, so the pulse is localised."""
    p = get_preset(name)
    return dataclasses.replace(p, name=name + "-narrow",
                               data=InitialData(envelope_denominator=0.05))


# ---------------------------------------------------------------- 1-3: algebra


def test_sbp_identity():
    rng = np.random.default_rng(1)
    worst = 0.0
    for order in ORDERS:
        op = sbp_operator(order)
        for n in (16, 64, 256):
            for _ in range(100):
                u, v = random_state(rng, n), random_state(rng, n)
                scale = np.sqrt(weighted_inner(op, u, u).real * weighted_inner(op, v, v).real) / u.grid.dx
                worst = max(worst, verify_sbp_identity(op, u, v) / scale)
    assert report("sbp identity", worst <= 1e-12, f"max relative SBP residual {worst:.2e} (limit 1e-12)")


def test_anti_hermiticity():
    mpmath = pytest.importorskip("mpmath")
    rng = np.random.default_rng(2)
    n = 64
    worst_ext = worst_double = 0.0
    with mpmath.workdps(40):
        for order in ORDERS:
            for interaction in SCALINGS.values():
                sch = InterfaceScheme(SchemeConfig(sbp_operator(order), interaction),
                                      make_grid(2.0, n))
                sig = [mpmath.mpf(float(s)) for s in sch.sigma]
                for _ in range(100):
                    u = random_state(rng, n).values
                    r = sch.rhs(u, 0.0)
                    nrm = np.sum(sch.sigma * np.abs(u) ** 2)
                    worst_double = max(worst_double, abs(np.sum(sch.sigma * np.conj(u) * r).real) / nrm)
                    um = np.array([mpmath.mpc(z) for z in u], dtype=object)
                    rm = sch.rhs(um, 0.0)
                    ip = mpmath.fsum(s * mpmath.conj(a) * b for s, a, b in zip(sig, um, rm))
                    worst_ext = max(worst_ext, float(abs(ip.real)) / nrm)
    report("anti-hermiticity", worst_ext <= 1e-12,
           f"max |Re<u,rhs(u)>|/|u|^2 = {worst_ext:.2e} in 40-digit arithmetic (limit 1e-12); "
           f"double precision gives {worst_double:.2e}")
    assert worst_ext <= 1e-12


def test_integrator_orders():
    steps_rk4, steps_imex = (10, 20, 40, 80), (20, 40, 80, 160)
    q_rk4 = empirical_order(linear_errors(
        lambda u, t, dt: rk4_step(lambda v, s: (A_MAT + B_MAT) @ v, u, t, dt), steps_rk4), steps_rk4)
    q_imex = empirical_order(linear_errors(imex_linear_step, steps_imex), steps_imex)
    rng = np.random.default_rng(3)
    worst_f = worst_b = 0.0
    for _ in range(200):
        L = 10 ** rng.uniform(0, 12) * (1 - 0.5j * rng.uniform())
        coeff = 10 ** rng.uniform(-12, 0)
        u0, uN = rng.normal(size=2) + 1j * rng.normal(size=2)
        f, b = penalty_errors(L, coeff, u0, uN)
        worst_f, worst_b = max(worst_f, f), max(worst_b, b)
    ok = abs(q_rk4 - 4) <= 0.1 and abs(q_imex - 3) <= 0.2 and max(worst_f, worst_b) <= 1e-14
    report("integrator orders", ok, f"RK4 order {q_rk4:.3f}, IMEX order {q_imex:.3f}; penalty_solve forward "
                  f"error {worst_f:.1e}, backward residual {worst_b:.1e} (limit 1e-14)")
    assert ok


# ---------------------------------------------------------------- 4: convergence


def _convergence_line(tag, result):
    qs = {lab: result.summary[f"convergence.{lab}-coarse.{lab}-fine.min_in_crossing"]
          for lab in ("dx2", "dx3")}
    ok = all(2.5 <= q <= 3.6 for q in qs.values())
    report(f"convergence index ({tag})", ok,
           f"min q in crossing window: L=1e3/dx^2 {qs['dx2']:.3f}, "
           f"L=1e3/dx^3 {qs['dx3']:.3f} (band [2.5, 3.6])")
    return qs


def test_convergence_index_ci():
    qs = _convergence_line("CI", preset_result("convergence-ci"))
    assert all(2.5 <= q <= 3.6 for q in qs.values())


@pytest.mark.fullscale
@pytest.mark.xfail(strict=True, reason="wide envelope: q for L=1e3/dx^2 bottoms out at 2.41")
def test_convergence_index_fullscale():
    qs = _convergence_line("full scale", preset_result("convergence"))
    assert all(2.5 <= q <= 3.6 for q in qs.values())


@pytest.mark.fullscale
@pytest.mark.xfail(strict=True, reason="q for L=1e3/dx^2 bottoms out at 2.48")
def test_convergence_index_fullscale_narrow():
    p = narrow("convergence")
    qs = _convergence_line("full scale, narrow envelope", preset_result(p.name, p))
    assert all(2.5 <= q <= 3.6 for q in qs.values())


# ---------------------------------------------------------------- 5: accuracy


def _accuracy(tag, result):
    e = {k: result.summary[f"{k}.final_error"]
         for k in ("interface", "interface-fine", "periodic-o6", "periodic-o8")}
    a = e["interface"] < e["periodic-o6"]
    b = e["interface-fine"] <= 2 * e["periodic-o8"]
    report(f"accuracy vs periodic order 6 ({tag})", a, f"interface N {e['interface']:.3e} < periodic order 6 "
                             f"{e['periodic-o6']:.3e}")
    report(f"accuracy vs periodic order 8 ({tag})", b, f"interface 2N {e['interface-fine']:.3e} within 2x of periodic "
                             f"order 8 {e['periodic-o8']:.3e} (ratio "
                             f"{e['interface-fine'] / e['periodic-o8']:.1f})")
    return a, b


def test_accuracy_against_order6_ci():
    a, _ = _accuracy("CI", preset_result("accuracy-ci"))
    assert a


@pytest.mark.xfail(strict=True, reason="interface error accumulates over ~12 crossings; "
                                       "ratio about 10 at CI scale")
def test_accuracy_against_order8_ci():
    e = preset_result("accuracy-ci").summary
    assert e["interface-fine.final_error"] <= 2 * e["periodic-o8.final_error"]


@pytest.mark.fullscale
def test_accuracy_against_order6_fullscale():
    a, _ = _accuracy("full scale", preset_result("accuracy"))
    assert a


@pytest.mark.fullscale
@pytest.mark.xfail(strict=True, reason="ratio about 4 at full scale after ~10 crossings")
def test_accuracy_against_order8_fullscale():
    e = preset_result("accuracy").summary
    assert e["interface-fine.final_error"] <= 2 * e["periodic-o8.final_error"]


# ---------------------------------------------------------------- 6: reflection


def _reflection(tag, rk4, imex):
    r = rk4.summary["interface.final_reflected_fraction"]
    i = imex.summary["interface.final_reflected_fraction"]
    p = imex.summary["periodic.final_reflected_fraction"]
    ok = r >= 10 * i
    report(f"reflection contrast ({tag})", ok, f"reflected fraction RK4 {r:.3e} vs IMEX {i:.3e} "
                             f"(ratio {r / i:.2f}, need 10; periodic {p:.3e})")
    return ok


@pytest.mark.xfail(strict=True, reason="the dispersed pulse fills the window; "
                                       "RK4 0.0755 vs IMEX 0.0653")
def test_reflection_contrast_ci():
    assert _reflection("CI", preset_result("rk4-bounce-ci"), preset_result("imex-cross-ci"))


@pytest.mark.fullscale
@pytest.mark.xfail(strict=True, reason="flat envelope over the whole circle; RK4 0.279 "
                                       "vs IMEX 0.289")
def test_reflection_contrast_fullscale():
    assert _reflection("full scale", preset_result("rk4-bounce"), preset_result("imex-cross"))


@pytest.mark.fullscale
def test_reflection_contrast_fullscale_narrow():
    rk4, imex = narrow("rk4-bounce"), narrow("imex-cross")
    assert _reflection("full scale, narrow envelope", preset_result(rk4.name, rk4),
                       preset_result(imex.name, imex))


# ---------------------------------------------------------------- 7: norms


def _drift(series):
    v = series.values
    return np.abs(v / v[0] - 1.0)


def _norm_checks(tag, cross, norm):
    run = cross.runs["interface"].series
    crossing = run["occupancy"].values >= CROSSING_THRESHOLD
    away = ~crossing
    sig, trap = _drift(run["sigma_norm"]), _drift(run["trapezoid_norm"])
    if away.any() and crossing.any():
        sig_away, trap_away = sig[away].max(), trap[away].max()
        a = sig_away <= 1e-6 and sig.max() <= 1e-4
        b = trap[crossing].max() > trap_away
        report(f"sigma-norm drift ({tag})", a, f"sigma drift away from crossing {sig_away:.2e} (limit 1e-6), "
                                 f"overall {sig.max():.2e} (limit 1e-4)")
        report(f"trapezoid transient ({tag})", b, f"trapezoid drift during crossing {trap[crossing].max():.2e} "
                                 f"> away {trap_away:.2e}")
    else:
        a = b = False
        msg = f"{int(crossing.sum())} of {crossing.size} samples in the crossing window"
        report(f"sigma-norm drift ({tag})", a, f"no samples away from the interface; {msg}")
        report(f"trapezoid transient ({tag})", b, f"cannot compare crossing and far field; {msg}")
    s2 = norm.runs["interface-o2"].series["sigma_norm"].values
    rise = np.diff(s2).max() / s2[0]
    c = rise <= 1e-14
    report(f"(2,1) norm monotone ({tag})", c, f"(2,1) sigma norm largest relative increase between samples "
                             f"{rise:.2e} (monotone if <= 1e-14)")
    return a, b, c


def test_norm_drift_ci():
    a, b, _ = _norm_checks("CI", preset_result("imex-cross-ci"), preset_result("norm-ci"))
    assert a and b


@pytest.mark.xfail(strict=True, reason="IMEX truncation raises the (2,1) norm by up to "
                                       "3.7e-9 between samples while the pulse crosses")
def test_low_order_norm_monotone_ci():
    s2 = preset_result("norm-ci").runs["interface-o2"].series["sigma_norm"].values
    assert np.diff(s2).max() / s2[0] <= 1e-14


@pytest.mark.fullscale
@pytest.mark.xfail(strict=True, reason="flat envelope: every sample is in the crossing window")
def test_norms_fullscale():
    assert all(_norm_checks("full scale", preset_result("imex-cross"), preset_result("norm")))


@pytest.mark.fullscale
def test_norms_fullscale_narrow():
    cross, norm = narrow("imex-cross"), narrow("norm")
    assert all(_norm_checks("full scale, narrow envelope", preset_result(cross.name, cross),
                            preset_result(norm.name, norm)))


# ---------------------------------------------------------------- 8: dissipation


def test_dissipation_tradeoff_ci():
    s = preset_result("dissipation-ci").summary
    runs = {lab: preset_result("dissipation-ci").runs[lab] for lab in ("eps000", "eps005",
                                                                      "eps010", "eps020")}
    final_sigma = {lab: r.series["sigma_norm"].values[-1] / r.series["sigma_norm"].values[0]
                   for lab, r in runs.items()}
    ok = True
    parts = []
    for lab in ("eps005", "eps010", "eps020"):
        err_ok = s[f"{lab}.final_error"] <= s["eps000.final_error"]
        decay_ok = final_sigma[lab] < final_sigma["eps000"]
        ok &= err_ok and decay_ok
        parts.append(f"{lab}: error {s[f'{lab}.final_error']:.3e}, sigma loss "
                     f"{1 - final_sigma[lab]:.2e}")
    report("dissipation trade-off (CI)", ok, f"eps000: error {s['eps000.final_error']:.3e}, sigma loss "
                  f"{1 - final_sigma['eps000']:.2e}; " + "; ".join(parts))
    assert ok
