import numpy as np
import pytest

from bbmb.feedback import BoundaryMode
from bbmb.scenarios import ConfigError, load_config, load_preset, parse_config, preset_names

BASE = """
mode = both_neumann_control   # feedback at both ends
mu = 0.5
nu = 0.5
w_d = 3
n_cells = 12
dt = 0.01
t_end = 0.5
initial = cubic
"""


def test_parse_defaults():
    cfg = parse_config(BASE)
    assert cfg.mode is BoundaryMode.BOTH_NEUMANN_CONTROL
    assert (cfg.c0, cfg.c1, cfg.newton_tol, cfg.newton_max_iters) == (1.0, 1.0, 1e-10, 25)
    assert cfg.stepper.n_steps == 50
    assert cfg.mesh.n_cells == 12


@pytest.mark.parametrize(
    "edit, message",
    [
        ("mode = sideways", "unknown mode"),
        ("colour = red", "unknown key"),
        ("mu = 0.5", "duplicate key"),
        ("just words", "expected 'key = value'"),
        ("w_d = 5", "targets w_d"),
        ("nu = -1", "nu must be positive"),
        ("n_cells = 0", "n_cells"),
        ("dt = abc", "bad value"),
        ("dt = 0.3", "whole number"),
    ],
)
def test_config_errors(edit, message):
    key = edit.split("=")[0].strip()
    text = BASE
    if key in ("mode", "w_d", "nu", "n_cells", "dt"):
        text = "\n".join(l for l in BASE.splitlines() if not l.startswith(key + " ")) + "\n"
    with pytest.raises(ConfigError, match=message):
        parse_config(text + edit + "\n")


def test_missing_keys():
    with pytest.raises(ConfigError, match="missing keys: initial"):
        parse_config(BASE.replace("initial = cubic", ""))


def test_nodal_file_initial(tmp_path):
    (tmp_path / "w0.txt").write_text(", ".join(str(v) for v in np.linspace(1, 2, 13)))
    cfg_path = tmp_path / "s.cfg"
    cfg_path.write_text(BASE.replace("initial = cubic", "initial = w0.txt"))
    w = load_config(cfg_path).initial_field()
    np.testing.assert_allclose(w.values, np.linspace(1, 2, 13))
    (tmp_path / "w0.txt").write_text("1 2 3")
    with pytest.raises(ConfigError, match="mesh has 13 nodes"):
        load_config(cfg_path).initial_field()


def test_missing_file():
    with pytest.raises(ConfigError):
        load_config("/nonexistent/scenario.cfg")


def test_presets_load_and_match_examples():
    names = preset_names()
    assert {"example1_controlled", "example1_uncontrolled", "example2_c1_0p1", "example2_c1_1", "example2_c1_10"} <= set(names)
    for name in names:
        cfg = load_preset(name)
        assert cfg.dt == 1e-4 and cfg.n_cells == 60
    ex1 = load_preset("example1_controlled")
    assert (ex1.mu, ex1.nu, ex1.w_d, ex1.t_end, ex1.initial) == (0.5, 0.5, 3.0, 3.5, "cubic")
    assert sorted(load_preset(f"example2_c1_{s}").c1 for s in ("0p1", "1", "10")) == [0.1, 1.0, 10.0]
    with pytest.raises(ConfigError):
        load_preset("example3")


def test_initial_profiles():
    w = load_preset("example1_controlled").initial_field()
    assert w.values[0] == pytest.approx(-0.5, abs=1e-3) and w.values[-1] == pytest.approx(-5.5, abs=1e-3)
    d = load_preset("example2_c1_1").initial_field()
    assert d.values[0] == 0.0
    assert d.values[-1] == pytest.approx(-5.0, abs=1e-2)


def test_replace():
    cfg = parse_config(BASE)
    assert cfg.replace(c0=0.1).params.c0 == 0.1
