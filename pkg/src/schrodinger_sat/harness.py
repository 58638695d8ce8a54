"""Experiment presets, reference runs and file output.

A preset is a list of runs sharing initial data, final time and sample times,
plus an optional periodic reference run against which errors are measured.
Every preset exists at full scale and as a ``-ci`` variant with a ten times
coarser grid, a ten times smaller wave number and a narrow envelope; the
variant covers the same distance in units of the pulse speed.

Output layout of :func:`run_preset` in ``out_dir``::

    manifest.txt              resolved configuration (key = value)
    summary.txt               scalar results (key = value)
    <label>/<series>.csv      time series, see :data:`SERIES`
    <label>/snapshot.csv      final state
    convergence_<a>_<b>.csv   convergence index of run a against run b
"""

from __future__ import annotations

import configparser
import dataclasses
import datetime
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .core import (
    ConfigurationError,
    GridCircle,
    InitialData,
    Representation,
    RepresentationError,
    WaveFunction,
    make_grid,
    sample_initial_data,
)
from .diagnostics import (
    TimeSeries,
    convergence_index,
    crossing_window,
    error_vs_reference,
    interface_occupancy,
    reflected_fraction,
    sigma_norm,
    trapezoid_norm,
)
from .integrate import StepPolicy, evolve, propagate_fourier_rk4
from .sbp import periodic_stencil, sbp_operator
from .scheme import InteractionFactor, SchemeConfig, make_scheme

__all__ = [
    "CONFIG_KEYS",
    "ExperimentPreset",
    "ExperimentResult",
    "Overrides",
    "PRESETS",
    "ReferenceSolution",
    "RunResult",
    "RunSpec",
    "SERIES",
    "SnapshotFormatError",
    "apply_overrides",
    "get_preset",
    "read_config",
    "read_key_values",
    "run_preset",
    "run_reference",
    "snapshot_read",
    "snapshot_write",
]

SERIES = ("sigma_norm", "trapezoid_norm", "occupancy", "reflected_fraction", "error")

# the convergence index is evaluated where this share of the norm is near x = 0
CROSSING_THRESHOLD = 0.05
# occupancy counts points within this fraction of the circle length of x = 0
OCCUPANCY_HALFWIDTH = 0.1

# dt = cfl * dx^2 for IMEX runs. At 0.25 the time error hides the spatial
# convergence of the interface; the norm presets use a smaller step still so
# the integrator's own norm loss stays below the far-field drift budget.
IMEX_CFL = 0.05
NORM_CFL = 0.01


# ---------------------------------------------------------------------------
# preset definitions


@dataclass(frozen=True)
class RunSpec:
    """One simulation inside a preset.

    Periodic runs with ``integrator="rk4"`` are propagated mode by mode
    (:func:`~schrodinger_sat.integrate.propagate_fourier_rk4`), which gives
    the RK4 result without stepping.
    """

    label: str
    layout: Representation
    n: int
    order: int = 8
    integrator: str = "rk4"
    interaction: InteractionFactor = InteractionFactor()
    epsilon: float = 0.0
    cfl: float = 0.25

    def __post_init__(self) -> None:
        object.__setattr__(self, "layout", Representation(self.layout))
        if self.integrator not in ("rk4", "imex"):
            raise ConfigurationError(f"unknown integrator {self.integrator!r}")
        if self.order not in (2, 4, 6, 8):
            raise ConfigurationError(f"operator order must be 2, 4, 6 or 8, got {self.order}")
        if not self.label or "/" in self.label or "." in self.label:
            raise ConfigurationError(f"invalid run label {self.label!r}")

    @property
    def is_interface(self) -> bool:
        return self.layout is Representation.INTERFACE

    def scheme_config(self) -> SchemeConfig:
        op = sbp_operator(self.order) if self.is_interface else periodic_stencil(self.order)
        return SchemeConfig(op, self.interaction, self.epsilon)

    def describe(self) -> dict[str, str]:
        out = {
            "layout": self.layout.value,
            "n": str(self.n),
            "order": str(self.order),
            "integrator": self.integrator,
            "epsilon": repr(self.epsilon),
            "cfl": repr(self.cfl),
        }
        if self.is_interface:
            out["interaction"] = self.interaction.describe()
        return out


@dataclass(frozen=True)
class ExperimentPreset:
    name: str
    description: str
    runs: tuple[RunSpec, ...]
    t_final: float
    reference: RunSpec | None = None
    data: InitialData = InitialData()
    length: float = 2.0
    samples: int = 100
    comparisons: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        labels = [r.label for r in self.runs]
        if len(set(labels)) != len(labels) or "reference" in labels:
            raise ConfigurationError(f"duplicate or reserved run labels in {self.name}")
        for a, b in self.comparisons:
            if a not in labels or b not in labels:
                raise ConfigurationError(f"comparison ({a}, {b}) names unknown runs")

    def run(self, label: str) -> RunSpec:
        for r in self.runs:
            if r.label == label:
                return r
        raise KeyError(label)


@dataclass(frozen=True)
class _Scale:
    suffix: str
    data: InitialData
    n: int
    n_ref: int
    t_short: float
    t_long: float


FULL = _Scale("", InitialData(), 2000, 8000, 0.004, 0.04)
CI = _Scale(
    "-ci",
    InitialData(envelope_denominator=0.05, wave_number=10.0 * math.pi),
    200, 800, 0.04, 0.4,
)


def _interface(label: str, n: int, integrator: str, interaction: InteractionFactor,
               *, order: int = 8, epsilon: float = 0.0, cfl: float | None = None) -> RunSpec:
    if cfl is None:
        cfl = IMEX_CFL if integrator == "imex" else 0.25
    return RunSpec(label, Representation.INTERFACE, n, order, integrator,
                   interaction, epsilon, cfl)


def _periodic(label: str, n: int, order: int = 8) -> RunSpec:
    return RunSpec(label, Representation.PERIODIC, n, order, "rk4")


def _build_presets(s: _Scale) -> list[ExperimentPreset]:
    n, n2 = s.n, 2 * s.n
    dx2 = InteractionFactor.power(1.0e3, 2)
    dx3 = InteractionFactor.power(1.0e3, 3)
    ref = _periodic("reference", s.n_ref)
    common = dict(reference=ref, data=s.data)

    def name(base: str) -> str:
        return base + s.suffix

    return [
        ExperimentPreset(
            name("rk4-bounce"),
            "RK4 with the explicit-bound interaction factor; part of the pulse bounces",
            (_interface("interface", n, "rk4", InteractionFactor.explicit_bound()),
             _periodic("periodic", n)),
            s.t_short, **common,
        ),
        ExperimentPreset(
            name("rk4-bounce-caption"),
            "RK4 with L = 1e3/dx^2, which forces a very small time step",
            (_interface("interface", n, "rk4", dx2, cfl=1.0e-3),
             _periodic("periodic", n)),
            s.t_short, **common,
        ),
        ExperimentPreset(
            name("imex-cross"),
            "IMEX with L = 1e3/dx^2; the pulse crosses the interface cleanly",
            (_interface("interface", n, "imex", dx2, cfl=NORM_CFL), _periodic("periodic", n)),
            s.t_short, **common,
        ),
        ExperimentPreset(
            name("convergence"),
            "convergence index for L = 1e3/dx^2 and L = 1e3/dx^3",
            (_interface("dx2-coarse", n, "imex", dx2),
             _interface("dx2-fine", n2, "imex", dx2),
             _interface("dx3-coarse", n, "imex", dx3),
             _interface("dx3-fine", n2, "imex", dx3)),
            s.t_short,
            comparisons=(("dx2-coarse", "dx2-fine"), ("dx3-coarse", "dx3-fine")),
            **common,
        ),
        ExperimentPreset(
            name("accuracy"),
            "long-run error of interface runs against periodic runs of order 6 and 8",
            (_interface("interface", n, "imex", dx2),
             _interface("interface-fine", n2, "imex", dx2),
             _interface("interface-dissipation", n, "imex", dx2, epsilon=0.1),
             _periodic("periodic-o6", n, 6),
             _periodic("periodic-o8", n, 8)),
            s.t_long, **common,
        ),
        ExperimentPreset(
            name("norm"),
            "sigma and trapezoid norms for the (8,4) and (2,1) operators",
            (_interface("interface-o8", n, "imex", dx2, cfl=NORM_CFL),
             _interface("interface-o2", n, "imex", dx2, order=2, cfl=NORM_CFL)),
            s.t_short, **common,
        ),
        ExperimentPreset(
            name("dissipation"),
            "long runs with increasing dissipation strength",
            tuple(_interface(f"eps{round(eps * 100):03d}", n, "imex", dx2, epsilon=eps)
                  for eps in (0.0, 0.05, 0.1, 0.2)),
            s.t_long, **common,
        ),
        ExperimentPreset(
            name("reference"),
            "periodic order-8 reference solution",
            (), s.t_short, **common,
        ),
    ]


PRESETS: dict[str, ExperimentPreset] = {
    p.name: p for scale in (FULL, CI) for p in _build_presets(scale)
}


def get_preset(name: str) -> ExperimentPreset:
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown preset {name!r}; choose from {', '.join(sorted(PRESETS))}"
        ) from None


# ---------------------------------------------------------------------------
# overrides and configuration files

CONFIG_KEYS = (
    "preset", "n", "order", "integrator", "l_coeff", "l_exponent",
    "l_explicit_bound", "epsilon", "t_final", "cfl", "samples",
)


@dataclass(frozen=True)
class Overrides:
    """Changes applied on top of a preset; ``None`` keeps the preset value.

    ``n`` rescales every grid of the preset (including the reference) so the
    first run gets ``n`` intervals. ``order``, ``integrator``, the interaction
    settings and ``epsilon`` apply to the interface runs; ``cfl`` to every run
    except the reference.
    """

    n: int | None = None
    order: int | None = None
    integrator: str | None = None
    l_coeff: float | None = None
    l_exponent: int | None = None
    l_explicit_bound: bool = False
    epsilon: float | None = None
    t_final: float | None = None
    cfl: float | None = None
    samples: int | None = None

    def __post_init__(self) -> None:
        if self.l_explicit_bound and (self.l_coeff is not None or self.l_exponent is not None):
            raise ConfigurationError("the explicit bound excludes l_coeff and l_exponent")
        if self.l_exponent is not None and self.l_exponent not in (2, 3):
            raise ConfigurationError(f"l_exponent must be 2 or 3, got {self.l_exponent}")
        if self.epsilon is not None and self.epsilon < 0:
            raise ConfigurationError(f"epsilon must be >= 0, got {self.epsilon}")
        for key in ("t_final", "cfl"):
            value = getattr(self, key)
            if value is not None and not value > 0:
                raise ConfigurationError(f"{key} must be positive, got {value}")
        if self.samples is not None and self.samples < 1:
            raise ConfigurationError(f"samples must be >= 1, got {self.samples}")
        if self.n is not None and self.n < 8:
            raise ConfigurationError(f"n must be >= 8, got {self.n}")

    def as_dict(self) -> dict[str, object]:
        return {k: v for k, v in dataclasses.asdict(self).items()
                if v is not None and v is not False}

    @classmethod
    def from_mapping(cls, values: Mapping[str, object]) -> Overrides:
        kinds = {
            "n": int, "order": int, "integrator": str, "l_coeff": float,
            "l_exponent": int, "l_explicit_bound": _parse_bool, "epsilon": float,
            "t_final": float, "cfl": float, "samples": int,
        }
        kwargs = {}
        for key, raw in values.items():
            if key not in kinds:
                raise ConfigurationError(f"unknown setting {key!r}")
            try:
                kwargs[key] = kinds[key](raw)
            except ValueError as exc:
                raise ConfigurationError(f"bad value for {key}: {raw!r}") from exc
        return cls(**kwargs)


def _parse_bool(raw: object) -> bool:
    if isinstance(raw, bool):
        return raw
    text = str(raw).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off"):
        return False
    raise ValueError(raw)


def _override_interaction(base: InteractionFactor, ov: Overrides) -> InteractionFactor:
    if ov.l_explicit_bound:
        return InteractionFactor.explicit_bound()
    if ov.l_coeff is None and ov.l_exponent is None:
        return base
    coeff = ov.l_coeff if ov.l_coeff is not None else (
        base.coefficient if base.rule == "power" else 1.0e3)
    exponent = ov.l_exponent if ov.l_exponent is not None else (
        base.exponent if base.rule == "power" else 2)
    return InteractionFactor.power(coeff, exponent)


def apply_overrides(preset: ExperimentPreset, ov: Overrides) -> ExperimentPreset:
    """Return *preset* with the settings in *ov* applied."""
    runs = list(preset.runs)
    reference = preset.reference
    if ov.n is not None:
        base = runs[0].n if runs else reference.n
        sizes = [r.n for r in runs] + ([reference.n] if reference else [])
        if any((m * ov.n) % base for m in sizes):
            raise ConfigurationError(
                f"n={ov.n} does not rescale the grids {sizes} to whole numbers"
            )
        runs = [dataclasses.replace(r, n=r.n * ov.n // base) for r in runs]
        if reference is not None:
            reference = dataclasses.replace(reference, n=reference.n * ov.n // base)
    updated = []
    for r in runs:
        changes: dict[str, object] = {}
        if ov.cfl is not None:
            changes["cfl"] = ov.cfl
        if r.is_interface:
            if ov.order is not None:
                changes["order"] = ov.order
            if ov.integrator is not None:
                changes["integrator"] = ov.integrator
            if ov.epsilon is not None:
                changes["epsilon"] = ov.epsilon
            changes["interaction"] = _override_interaction(r.interaction, ov)
        updated.append(dataclasses.replace(r, **changes))
    return dataclasses.replace(
        preset,
        runs=tuple(updated),
        reference=reference,
        t_final=preset.t_final if ov.t_final is None else ov.t_final,
        samples=preset.samples if ov.samples is None else ov.samples,
    )


def read_key_values(text: str, source: str = "<config>") -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment line."""
    parser = configparser.ConfigParser(interpolation=None, delimiters=("=",))
    parser.optionxform = str
    try:
        parser.read_string("[settings]\n" + text, source=source)
    except configparser.Error as exc:
        raise ConfigurationError(f"cannot parse {source}: {exc}") from exc
    return dict(parser["settings"])


def read_config(path: str | Path) -> tuple[str | None, Overrides]:
    """Load a configuration or manifest file.

    Returns the preset name (if present) and the overrides. Manifest-only
    entries (``run.*``, ``reference.*``, ``preset.*``, ``created``) are ignored.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file {path}: {exc}") from exc
    values = read_key_values(text, str(path))
    preset = values.pop("preset", None)
    settings = {k: v for k, v in values.items()
                if not k.startswith(("run.", "reference.", "preset.")) and k != "created"}
    return preset, Overrides.from_mapping(settings)


# ---------------------------------------------------------------------------
# snapshots


class SnapshotFormatError(ValueError):
    """Malformed snapshot file; ``line`` is the 1-based line number."""

    def __init__(self, message: str, line: int) -> None:
        super().__init__(f"line {line}: {message}")
        self.line = line


_SNAPSHOT_COLUMNS = "x,re,im,abs2"


def snapshot_write(u: WaveFunction, path: str | Path) -> None:
    """Write *u* as CSV with a ``# key = value`` header."""
    lines = [
        f"# N = {u.grid.n_intervals}",
        f"# length = {u.grid.length!r}",
        f"# time = {u.time!r}",
        f"# representation = {u.representation.value}",
        _SNAPSHOT_COLUMNS,
    ]
    v = u.values
    for x, re, im, a2 in zip(u.x, v.real, v.imag, v.real * v.real + v.imag * v.imag):
        lines.append(f"{float(x)!r},{float(re)!r},{float(im)!r},{float(a2)!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def snapshot_read(path: str | Path, grid: GridCircle | None = None) -> WaveFunction:
    """Read a file written by :func:`snapshot_write`.

    If *grid* is given the header must describe the same grid, otherwise a
    :class:`~schrodinger_sat.core.RepresentationError` is raised.
    """
    lines = Path(path).read_text().splitlines()
    header: dict[str, str] = {}
    k = 0
    while k < len(lines) and lines[k].startswith("#"):
        key, sep, value = lines[k][1:].partition("=")
        if not sep:
            raise SnapshotFormatError("header lines must read '# key = value'", k + 1)
        header[key.strip()] = value.strip()
        k += 1
    missing = {"N", "length", "time", "representation"} - header.keys()
    if missing:
        raise SnapshotFormatError(f"header lacks {', '.join(sorted(missing))}", k + 1)
    try:
        n = int(header["N"])
        length = float(header["length"])
        time = float(header["time"])
        rep = Representation(header["representation"])
        file_grid = make_grid(length, n)
    except (ValueError, ConfigurationError) as exc:
        raise SnapshotFormatError(f"invalid header: {exc}", k) from exc
    if grid is not None and grid != file_grid:
        raise RepresentationError(
            f"snapshot grid (N={n}, length={length}) differs from the requested "
            f"grid (N={grid.n_intervals}, length={grid.length})"
        )
    if k >= len(lines) or lines[k].strip() != _SNAPSHOT_COLUMNS:
        raise SnapshotFormatError(f"expected column header '{_SNAPSHOT_COLUMNS}'", k + 1)
    rows = lines[k + 1:]
    expected = file_grid.size(rep)
    if len(rows) != expected:
        raise SnapshotFormatError(
            f"expected {expected} data rows, found {len(rows)}", k + 2 + len(rows)
        )
    values = np.empty(expected, dtype=np.complex128)
    for i, row in enumerate(rows):
        parts = row.split(",")
        try:
            if len(parts) != 4:
                raise ValueError(f"expected 4 columns, got {len(parts)}")
            values[i] = complex(float(parts[1]), float(parts[2]))
        except ValueError as exc:
            raise SnapshotFormatError(str(exc), k + 2 + i) from exc
    return WaveFunction(values, file_grid, rep, time)


# ---------------------------------------------------------------------------
# running


@dataclass
class ReferenceSolution:
    spec: RunSpec
    states: list[WaveFunction]

    @property
    def times(self) -> np.ndarray:
        return np.array([s.time for s in self.states])


@dataclass
class RunResult:
    spec: RunSpec
    final: WaveFunction
    series: dict[str, TimeSeries]


@dataclass
class ExperimentResult:
    preset: ExperimentPreset
    runs: dict[str, RunResult]
    reference: ReferenceSolution | None
    convergence: dict[tuple[str, str], TimeSeries] = field(default_factory=dict)
    summary: dict[str, float] = field(default_factory=dict)


def _initial_state(preset: ExperimentPreset, spec: RunSpec) -> WaveFunction:
    return sample_initial_data(preset.data, make_grid(preset.length, spec.n), spec.layout)


def _advance(spec: RunSpec, u0: WaveFunction, t_final: float, samples,
             observers, fourier: bool = True) -> WaveFunction:
    scheme = make_scheme(spec.scheme_config(), u0.grid)
    policy = StepPolicy(spec.cfl)
    if fourier and not spec.is_interface and spec.integrator == "rk4":
        return propagate_fourier_rk4(scheme, u0, t_final, policy=policy,
                                     observers=observers, samples=samples)
    return evolve(scheme, u0, t_final, integrator=spec.integrator, policy=policy,
                  observers=observers, samples=samples)


def run_reference(
    n: int = 8000,
    order: int = 8,
    t_final: float = 0.004,
    *,
    data: InitialData = InitialData(),
    length: float = 2.0,
    samples: int = 100,
    cfl: float = 0.25,
    out_dir: str | Path | None = None,
    fourier: bool = True,
) -> ReferenceSolution:
    """Periodic RK4 solution stored at every sample time.

    With *out_dir* each state is written to ``snapshot_<k>.csv``. ``fourier``
    selects mode-by-mode propagation instead of time stepping.
    """
    spec = RunSpec("reference", Representation.PERIODIC, n, order, "rk4", cfl=cfl)
    u0 = sample_initial_data(data, make_grid(length, n), Representation.PERIODIC)
    states: list[WaveFunction] = []

    def keep(t: float, values: np.ndarray) -> None:
        states.append(u0.like(values, time=t))

    _advance(spec, u0, t_final, samples, [keep], fourier)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for k, s in enumerate(states):
            snapshot_write(s, out / f"snapshot_{k:04d}.csv")
    return ReferenceSolution(spec, states)


class _Recorder:
    def __init__(self, spec: RunSpec, grid: GridCircle,
                 reference: list[WaveFunction] | None) -> None:
        self.spec = spec
        self.grid = grid
        self.op = spec.scheme_config().operator
        self.reference = reference
        self.times: list[float] = []
        self.values: dict[str, list[float]] = {k: [] for k in SERIES}

    def __call__(self, t: float, values: np.ndarray) -> None:
        u = WaveFunction(values, self.grid, self.spec.layout, t)
        k = len(self.times)
        self.times.append(t)
        self.values["sigma_norm"].append(sigma_norm(self.op, u))
        self.values["trapezoid_norm"].append(trapezoid_norm(u))
        self.values["occupancy"].append(
            interface_occupancy(u, OCCUPANCY_HALFWIDTH * self.grid.length))
        self.values["reflected_fraction"].append(
            reflected_fraction(u, (0.6 * self.grid.length, 0.9 * self.grid.length)))
        if self.reference is not None:
            ref = self.reference[k]
            if abs(ref.time - t) > 1e-12 * max(1.0, abs(t)):
                raise RuntimeError("reference and run sample times disagree")
            self.values["error"].append(error_vs_reference(u, ref))
        else:
            self.values["error"].append(math.nan)

    def series(self) -> dict[str, TimeSeries]:
        t = np.array(self.times)
        return {k: TimeSeries(t, np.array(v), k) for k, v in self.values.items()}


def _execute(preset: ExperimentPreset, spec: RunSpec,
             reference: list[WaveFunction] | None) -> RunResult:
    u0 = _initial_state(preset, spec)
    rec = _Recorder(spec, u0.grid, reference)
    final = _advance(spec, u0, preset.t_final, preset.samples, [rec])
    return RunResult(spec, final, rec.series())


def _summarise(result: ExperimentResult) -> dict[str, float]:
    out: dict[str, float] = {}
    for label, run in result.runs.items():
        s = run.series
        sig = s["sigma_norm"].values
        trap = s["trapezoid_norm"].values
        out[f"{label}.final_error"] = float(s["error"].values[-1])
        out[f"{label}.max_error"] = float(np.max(s["error"].values))
        out[f"{label}.final_reflected_fraction"] = float(s["reflected_fraction"].values[-1])
        out[f"{label}.sigma_norm_drift"] = float(np.max(np.abs(sig / sig[0] - 1.0)))
        out[f"{label}.trapezoid_norm_drift"] = float(np.max(np.abs(trap / trap[0] - 1.0)))
    for (a, b), q in result.convergence.items():
        window = crossing_window(result.runs[b].series["occupancy"], CROSSING_THRESHOLD)
        vals = q.values[window & np.isfinite(q.values)]
        out[f"convergence.{a}.{b}.min_in_crossing"] = float(vals.min()) if vals.size else math.nan
    return out


def run_preset(
    name: str | ExperimentPreset,
    overrides: Overrides = Overrides(),
    *,
    out_dir: str | Path | None = None,
    jobs: int = 1,
) -> ExperimentResult:
    """Run every simulation of a preset and optionally write its outputs."""
    preset = get_preset(name) if isinstance(name, str) else name
    preset = apply_overrides(preset, overrides)
    if not preset.runs and preset.reference is None:
        raise ConfigurationError(f"preset {preset.name} defines no runs")

    reference = None
    if preset.reference is not None:
        r = preset.reference
        reference = run_reference(r.n, r.order, preset.t_final, data=preset.data,
                                  length=preset.length, samples=preset.samples, cfl=r.cfl)
    ref_states = reference.states if reference is not None else None

    if jobs > 1 and len(preset.runs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_execute, preset, spec, ref_states) for spec in preset.runs]
            results = [f.result() for f in futures]
    else:
        results = [_execute(preset, spec, ref_states) for spec in preset.runs]

    result = ExperimentResult(preset, {r.spec.label: r for r in results}, reference)
    for a, b in preset.comparisons:
        result.convergence[(a, b)] = convergence_index(
            result.runs[a].series["error"], result.runs[b].series["error"]
        )
    result.summary = _summarise(result)
    if out_dir is not None:
        write_outputs(result, overrides, out_dir)
    return result


def _key_values(items: Iterable[tuple[str, object]]) -> str:
    return "".join(f"{k} = {v}\n" for k, v in items)


def manifest_text(result: ExperimentResult, overrides: Overrides,
                  created: str | None = None) -> str:
    p = result.preset
    items: list[tuple[str, object]] = [("preset", p.name)]
    items += list(overrides.as_dict().items())
    items += [
        ("preset.t_final", repr(p.t_final)),
        ("preset.samples", p.samples),
        ("preset.length", repr(p.length)),
        ("preset.envelope_center", repr(p.data.envelope_center)),
        ("preset.envelope_denominator", repr(p.data.envelope_denominator)),
        ("preset.wave_number", repr(p.data.wave_number)),
        ("preset.amplitude", repr(p.data.amplitude)),
    ]
    for spec in p.runs:
        items += [(f"run.{spec.label}.{k}", v) for k, v in spec.describe().items()]
        scheme = make_scheme(spec.scheme_config(), make_grid(p.length, spec.n))
        if spec.is_interface:
            items.append((f"run.{spec.label}.interaction_factor", repr(scheme.interaction)))
        method = "fourier-rk4" if not spec.is_interface and spec.integrator == "rk4" else spec.integrator
        items.append((f"run.{spec.label}.method", method))
        items.append((f"run.{spec.label}.dt", repr(StepPolicy(spec.cfl).dt(scheme.grid.dx))))
    if p.reference is not None:
        items += [(f"reference.{k}", v) for k, v in p.reference.describe().items()]
    items.append(("created", created or datetime.datetime.now(datetime.timezone.utc).isoformat()))
    return _key_values(items)


def write_outputs(result: ExperimentResult, overrides: Overrides,
                  out_dir: str | Path) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "manifest.txt").write_text(manifest_text(result, overrides))
    (out / "summary.txt").write_text(
        _key_values((k, repr(v)) for k, v in result.summary.items())
    )
    for label, run in result.runs.items():
        d = out / label
        d.mkdir(exist_ok=True)
        for name, series in run.series.items():
            series.to_csv(d / f"{name}.csv")
        snapshot_write(run.final, d / "snapshot.csv")
    if result.reference is not None:
        d = out / "reference"
        d.mkdir(exist_ok=True)
        if result.preset.runs:
            snapshot_write(result.reference.states[-1], d / "snapshot.csv")
        else:
            for k, s in enumerate(result.reference.states):
                snapshot_write(s, d / f"snapshot_{k:04d}.csv")
    for (a, b), q in result.convergence.items():
        q.to_csv(out / f"convergence_{a}_{b}.csv")

