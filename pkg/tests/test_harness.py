import math

import numpy as np
import pytest

from conftest import random_state
from schrodinger_sat import (
    PRESETS,
    ConfigurationError,
    ExperimentPreset,
    InteractionFactor,
    Overrides,
    Representation,
    RepresentationError,
    RunSpec,
    SnapshotFormatError,
    get_preset,
    make_grid,
    run_preset,
    run_reference,
    snapshot_read,
    snapshot_write,
)
from schrodinger_sat.cli import EXIT_CONFIG, EXIT_OK, EXIT_UNSTABLE, main
from schrodinger_sat.harness import SERIES, apply_overrides, read_config, read_key_values

SMALL = Overrides(n=40, t_final=2e-3, samples=4)
BASE_NAMES = ("rk4-bounce", "rk4-bounce-caption", "imex-cross", "convergence",
              "accuracy", "norm", "dissipation", "reference")


# ---------------------------------------------------------------- presets


def test_every_preset_has_a_ci_variant():
    assert set(PRESETS) == set(BASE_NAMES) | {n + "-ci" for n in BASE_NAMES}
    for name in BASE_NAMES:
        full, ci = PRESETS[name], PRESETS[name + "-ci"]
        assert [r.label for r in full.runs] == [r.label for r in ci.runs]
        for a, b in zip(full.runs, ci.runs):
            assert a.n == 10 * b.n and a.integrator == b.integrator and a.order == b.order
        assert full.reference.n == 8000 and ci.reference.n == 800
        # same distance travelled in units of the pulse speed
        assert full.data.wave_number * full.t_final == pytest.approx(
            ci.data.wave_number * ci.t_final)


def test_full_scale_presets_follow_the_setup():
    bounce = get_preset("rk4-bounce")
    assert bounce.t_final == 0.004 and bounce.runs[0].n == 2000
    assert bounce.runs[0].interaction == InteractionFactor.explicit_bound()
    assert get_preset("rk4-bounce-caption").runs[0].interaction == InteractionFactor.power(1e3, 2)
    cross = get_preset("imex-cross").runs[0]
    assert cross.integrator == "imex" and cross.interaction == InteractionFactor.power(1e3, 2)
    conv = get_preset("convergence")
    assert sorted(r.n for r in conv.runs) == [2000, 2000, 4000, 4000]
    assert {r.interaction for r in conv.runs} == {InteractionFactor.power(1e3, 2),
                                                  InteractionFactor.power(1e3, 3)}
    acc = get_preset("accuracy")
    assert acc.t_final == 0.04
    assert {(r.layout, r.order, r.n) for r in acc.runs if not r.is_interface} == {
        (Representation.PERIODIC, 6, 2000), (Representation.PERIODIC, 8, 2000)}
    assert get_preset("norm").run("interface-o2").order == 2
    for p in PRESETS.values():
        assert p.samples == 100 and p.length == 2.0


def test_unknown_preset():
    with pytest.raises(ConfigurationError, match="unknown preset"):
        get_preset("bounce")


def test_run_spec_validation():
    with pytest.raises(ConfigurationError):
        RunSpec("a.b", Representation.INTERFACE, 10)
    with pytest.raises(ConfigurationError):
        RunSpec("a", Representation.INTERFACE, 10, order=3)
    with pytest.raises(ConfigurationError):
        RunSpec("a", Representation.INTERFACE, 10, integrator="euler")


# ---------------------------------------------------------------- overrides


def test_overrides_rescale_every_grid():
    p = apply_overrides(get_preset("convergence-ci"), Overrides(n=50))
    assert [r.n for r in p.runs] == [50, 100, 50, 100]
    assert p.reference.n == 200
    odd = ExperimentPreset("odd", "", (RunSpec("a", Representation.INTERFACE, 30),
                                       RunSpec("b", Representation.INTERFACE, 45)), 1e-3)
    assert [r.n for r in apply_overrides(odd, Overrides(n=20)).runs] == [20, 30]
    with pytest.raises(ConfigurationError):
        apply_overrides(odd, Overrides(n=25))


def test_overrides_touch_interface_runs_only():
    ov = Overrides(order=4, integrator="imex", epsilon=0.1, l_coeff=5.0, l_exponent=3, cfl=0.01)
    p = apply_overrides(get_preset("rk4-bounce-ci"), ov)
    iface, per = p.run("interface"), p.run("periodic")
    assert (iface.order, iface.integrator, iface.epsilon) == (4, "imex", 0.1)
    assert iface.interaction == InteractionFactor.power(5.0, 3)
    assert (per.order, per.integrator, per.epsilon) == (8, "rk4", 0.0)
    assert iface.cfl == per.cfl == 0.01
    partial = apply_overrides(get_preset("imex-cross-ci"), Overrides(l_exponent=3))
    assert partial.run("interface").interaction == InteractionFactor.power(1e3, 3)
    bound = apply_overrides(get_preset("imex-cross-ci"), Overrides(l_explicit_bound=True))
    assert bound.run("interface").interaction == InteractionFactor.explicit_bound()


@pytest.mark.parametrize("kwargs", [
    dict(l_explicit_bound=True, l_coeff=1.0), dict(l_exponent=4), dict(epsilon=-1.0),
    dict(t_final=0.0), dict(cfl=-0.1), dict(samples=0), dict(n=4),
])
def test_invalid_overrides(kwargs):
    with pytest.raises(ConfigurationError):
        Overrides(**kwargs)


def test_overrides_from_mapping():
    ov = Overrides.from_mapping({"n": "100", "l_explicit_bound": "yes", "cfl": "0.1"})
    assert ov == Overrides(n=100, l_explicit_bound=True, cfl=0.1)
    assert Overrides.from_mapping(ov.as_dict()) == ov
    with pytest.raises(ConfigurationError):
        Overrides.from_mapping({"colour": "red"})
    with pytest.raises(ConfigurationError):
        Overrides.from_mapping({"n": "many"})


def test_key_value_parsing(tmp_path):
    assert read_key_values("# comment\nn = 10\norder=4\n") == {"n": "10", "order": "4"}
    with pytest.raises(ConfigurationError):
        read_key_values("just words\n")
    path = tmp_path / "run.cfg"
    path.write_text("preset = norm-ci\nn = 100\nepsilon = 0.05\n")
    assert read_config(path) == ("norm-ci", Overrides(n=100, epsilon=0.05))
    with pytest.raises(ConfigurationError):
        read_config(tmp_path / "missing.cfg")


# ---------------------------------------------------------------- snapshots


@pytest.mark.parametrize("rep", list(Representation))
def test_snapshot_round_trip(rep, rng, tmp_path):
    u = random_state(rng, 33, rep, length=2.0)
    u = u.like(u.values * 1e-7 + 1.0 / 3.0, time=0.00123)
    path = tmp_path / "s.csv"
    snapshot_write(u, path)
    back = snapshot_read(path)
    np.testing.assert_array_equal(back.values, u.values)
    assert back.grid == u.grid and back.representation is rep and back.time == u.time
    for row in path.read_text().splitlines()[5:]:
        x, re, im, a2 = map(float, row.split(","))
        assert a2 == re * re + im * im
    assert snapshot_read(path, u.grid).grid == u.grid
    with pytest.raises(RepresentationError):
        snapshot_read(path, make_grid(2.0, 34))


def test_snapshot_parse_errors(rng, tmp_path):
    u = random_state(rng, 8)
    path = tmp_path / "s.csv"
    snapshot_write(u, path)
    good = path.read_text().splitlines()

    def check(lines, line_no):
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(SnapshotFormatError) as info:
            snapshot_read(path)
        assert info.value.line == line_no

    check(good[:1] + ["# nothing"] + good[2:], 2)
    check(good[1:], 4)
    check(good[:4] + ["x,y"] + good[5:], 5)
    check(good[:7] + ["0.1,0.2,abc,0.3"] + good[8:], 8)
    check(good[:7] + ["0.1,0.2"] + good[8:], 8)
    check(good[:-1], len(good))
    check(["# N = -3"] + good[1:], 4)


# ---------------------------------------------------------------- running


def test_reference_smoke_case(tmp_path):
    import time
    t0 = time.perf_counter()
    ref = run_reference(200, 8, 1e-4, samples=5, out_dir=tmp_path)
    assert time.perf_counter() - t0 < 1.0
    assert len(ref.states) == 6
    np.testing.assert_allclose(ref.times, np.linspace(0, 1e-4, 6))
    back = snapshot_read(tmp_path / "snapshot_0005.csv")
    np.testing.assert_array_equal(back.values, ref.states[-1].values)
    direct = run_reference(200, 8, 1e-4, samples=5, fourier=False)
    assert np.abs(direct.states[-1].values - ref.states[-1].values).max() < 1e-11


def test_run_preset_outputs(tmp_path):
    res = run_preset("convergence-ci", SMALL, out_dir=tmp_path)
    assert set(res.runs) == {"dx2-coarse", "dx2-fine", "dx3-coarse", "dx3-fine"}
    for label, run in res.runs.items():
        assert set(run.series) == set(SERIES)
        for name in SERIES:
            assert (tmp_path / label / f"{name}.csv").exists()
        assert len(run.series["error"]) == 5 and run.series["error"].values[0] < 1e-20
        assert snapshot_read(tmp_path / label / "snapshot.csv").time == pytest.approx(2e-3)
    assert (tmp_path / "convergence_dx2-coarse_dx2-fine.csv").exists()
    assert (tmp_path / "reference" / "snapshot.csv").exists()
    summary = read_key_values((tmp_path / "summary.txt").read_text())
    assert set(summary) == {k for k in res.summary}
    assert "convergence.dx2-coarse.dx2-fine.min_in_crossing" in summary
    manifest = read_key_values((tmp_path / "manifest.txt").read_text())
    assert manifest["preset"] == "convergence-ci"
    assert manifest["run.dx2-fine.n"] == "80"
    assert manifest["run.dx2-fine.interaction_factor"] == repr(1e3 / (2.0 / 80) ** 2 + 0j)
    assert manifest["reference.n"] == "160"


def test_outputs_are_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run_preset("rk4-bounce-ci", SMALL, out_dir=a)
    run_preset("rk4-bounce-ci", SMALL, out_dir=b)
    files = sorted(p.relative_to(a) for p in a.rglob("*") if p.is_file())
    assert files == sorted(p.relative_to(b) for p in b.rglob("*") if p.is_file())
    for rel in files:
        if rel.name != "manifest.txt":
            assert (a / rel).read_bytes() == (b / rel).read_bytes(), rel
    strip = lambda p: [l for l in p.read_text().splitlines() if not l.startswith("created")]  # noqa: E731,E741
    assert strip(a / "manifest.txt") == strip(b / "manifest.txt")


def test_manifest_reproduces_the_run(tmp_path):
    ov = Overrides(n=40, t_final=1e-3, samples=2, epsilon=0.05, l_exponent=3)
    first = run_preset("imex-cross-ci", ov, out_dir=tmp_path / "a")
    preset, again = read_config(tmp_path / "a" / "manifest.txt")
    assert preset == "imex-cross-ci" and again == ov
    second = run_preset(preset, again)
    for label in first.runs:
        np.testing.assert_array_equal(first.runs[label].final.values,
                                      second.runs[label].final.values)


def test_parallel_jobs_match_serial():
    a = run_preset("norm-ci", SMALL)
    b = run_preset("norm-ci", SMALL, jobs=2)
    for label in a.runs:
        np.testing.assert_array_equal(a.runs[label].final.values, b.runs[label].final.values)


def test_reference_preset_writes_every_sample(tmp_path):
    res = run_preset("reference-ci", Overrides(n=160, t_final=1e-3, samples=3), out_dir=tmp_path)
    assert not res.runs and len(res.reference.states) == 4
    assert len(list((tmp_path / "reference").glob("snapshot_*.csv"))) == 4


def test_summary_marks_missing_crossing():
    res = run_preset("convergence-ci", Overrides(n=40, t_final=1e-4, samples=2))
    key = "convergence.dx2-coarse.dx2-fine.min_in_crossing"
    assert key in res.summary
    value = res.summary[key]
    assert math.isnan(value) or value > 0


# ---------------------------------------------------------------- CLI


def test_cli_runs_a_preset(tmp_path, capsys):
    code = main(["--preset", "imex-cross-ci", "--n", "40", "--t-final", "1e-3",
                 "--samples", "2", "--out-dir", str(tmp_path)])
    assert code == EXIT_OK
    out = capsys.readouterr().out
    assert "interface.final_error = " in out
    assert (tmp_path / "manifest.txt").exists()


def test_cli_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("preset = imex-cross-ci\nn = 40\nt_final = 0.001\nsamples = 2\nepsilon = 0.1\n")
    assert main(["--config", str(cfg), "--epsilon", "0.2", "--out-dir", str(tmp_path / "o")]) == 0
    manifest = read_key_values((tmp_path / "o" / "manifest.txt").read_text())
    assert manifest["epsilon"] == "0.2" and manifest["run.interface.epsilon"] == "0.2"


def test_cli_list(capsys):
    assert main(["--list"]) == EXIT_OK
    assert "convergence-ci" in capsys.readouterr().out


@pytest.mark.parametrize("argv", [
    ["--preset", "nope"],
    [],
    ["--preset", "norm-ci", "--n", "4"],
    ["--preset", "norm-ci", "--cfl", "-1"],
    ["--preset", "norm-ci", "--config", "/nonexistent/file.cfg"],
])
def test_cli_configuration_errors(argv, tmp_path, capsys):
    assert main(argv + ["--out-dir", str(tmp_path)]) == EXIT_CONFIG
    assert "configuration error" in capsys.readouterr().err


def test_cli_instability(tmp_path, capsys):
    code = main(["--preset", "rk4-bounce-caption-ci", "--n", "40", "--t-final", "0.05",
                 "--samples", "1", "--cfl", "0.25", "--out-dir", str(tmp_path)])
    assert code == EXIT_UNSTABLE
    assert "unstable" in capsys.readouterr().err


def test_cli_rejects_bad_flag_values(capsys):
    with pytest.raises(SystemExit) as info:
        main(["--preset", "norm-ci", "--order", "5"])
    assert info.value.code == 2
