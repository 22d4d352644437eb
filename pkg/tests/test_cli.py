"""Command line entry points, run in-process."""

from kplateau.cli import run_cli

MINI = """\
[rod1]
length = 6.283185307179586
nodes = 192
radius = 0.05
stiffness = 50.0 50.0 50.0
kappa1 = 1.0
origin = 1.0 0.0 0.0
frame_u = -1.0 0.0 0.0
frame_v = 0.0 0.0 1.0
frame_w = 0.0 1.0 0.0

[rod2]
length = 6.283185307179586
nodes = 192
radius = 0.03
stiffness = 0.05 0.05 0.05
mass_density = 0.2
kappa1 = 1.0
origin = 2.0 0.0 0.0
frame_u = -1.0 0.0 0.0
frame_v = 0.0 1.0 0.0
frame_w = 0.0 0.0 -1.0

[problem]
sigma = 0.1
gravity = 0.0 0.0 -1.0

[solver]
outer_iters = 3
film_steps_per_outer = 60

[mesh]
stations = 24
rings = 4
"""

RING_SMALL = """\
[rod1]
length = 6.283185307179586
nodes = 192
radius = 0.02
stiffness = 1.0 1.0 1.0
kappa1 = 1.0
origin = 1.0 0.0 0.0
frame_u = -1.0 0.0 0.0
frame_v = 0.0 0.0 1.0
frame_w = 0.0 1.0 0.0

[solver]
outer_iters = 2
film_steps_per_outer = 80

[mesh]
stations = 32
rings = 5
"""


def test_check_preset_hopf(capsys):
    code = run_cli(["check", "--preset", "hopf"])
    out = capsys.readouterr().out
    assert code == 0
    assert "admissible: yes" in out
    assert "Lk12=1" in out


def test_invariants_preset_hopf(capsys):
    code = run_cli(["invariants", "--preset", "hopf"])
    out = capsys.readouterr().out
    assert code == 0
    assert "Lk12 = 1" in out
    assert "self-link" in out


def test_solve_requires_scenario(capsys):
    code = run_cli(["solve"])
    err = capsys.readouterr().err
    assert code == 2
    assert "exactly one of --config or --preset" in err


def test_missing_config_file(capsys):
    code = run_cli(["check", "--config", "/nonexistent/path.cfg"])
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_bad_config_reports_line(tmp_path, capsys):
    path = tmp_path / "bad.cfg"
    path.write_text(RING_SMALL.replace("radius = 0.02", "radius = 0"))
    code = run_cli(["check", "--config", str(path)])
    err = capsys.readouterr().err
    assert code == 2
    assert "line 4:" in err and "radius" in err


def test_unknown_subcommand(capsys):
    assert run_cli(["frobnicate"]) == 2
    assert run_cli(["solve", "--bogus-flag"]) == 2


def test_unknown_preset(capsys):
    code = run_cli(["check", "--preset", "moebius"])
    assert code == 2


def test_export_writes_bundle(tmp_path, capsys):
    path = tmp_path / "mini.cfg"
    path.write_text(MINI)
    out = tmp_path / "bundle"
    code = run_cli(["export", "--config", str(path), "--out", str(out)])
    assert code == 0
    for name in ("scenario.cfg", "tube1.obj", "tube2.obj", "film0.obj", "configuration.png"):
        assert (out / name).is_file(), name
    reparsed = (out / "scenario.cfg").read_text()
    assert "[rod2]" in reparsed


def test_relax_film_ring(tmp_path, capsys):
    path = tmp_path / "ring.cfg"
    path.write_text(RING_SMALL)
    out = tmp_path / "film"
    code = run_cli(["relax-film", "--config", str(path), "--out", str(out)])
    stdout = capsys.readouterr().out
    assert code == 0
    assert "spanning certificate: PASS" in stdout
    for name in ("film.obj", "relax.csv", "film-area.png", "configuration.png"):
        assert (out / name).is_file(), name
    rows = (out / "relax.csv").read_text().splitlines()
    assert rows[0] == "step,area"
    areas = [float(r.split(",")[1]) for r in rows[1:]]
    assert all(b <= a + 1e-15 for a, b in zip(areas, areas[1:]))


def test_solve_mini_and_determinism(tmp_path, capsys):
    path = tmp_path / "mini.cfg"
    path.write_text(MINI)
    outs = []
    for tag in ("one", "two"):
        out = tmp_path / tag
        code = run_cli(["solve", "--config", str(path), "--out", str(out), "--seed", "7"])
        assert code == 0
        for name in ("trace.csv", "film.obj", "tube1.obj", "tube2.obj", "trace.png", "configuration.png"):
            assert (out / name).is_file(), name
        outs.append(out)
    stdout = capsys.readouterr().out
    assert "admissible: yes" in stdout
    for name in ("trace.csv", "film.obj", "tube1.obj", "tube2.obj"):
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes(), name
