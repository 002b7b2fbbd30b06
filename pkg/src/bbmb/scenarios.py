"""Scenario configuration files and initial profiles.

A scenario file is flat ``key = value`` text; ``#`` starts a comment.
Recognised keys::

    mode, mu, nu, w_d, c0, c1, n_cells, dt, t_end, initial,
    record_every, newton_tol, newton_max_iters, out_path

``initial`` is ``cubic``, ``sine``, ``zero`` or the path of a nodal-value
file (whitespace or comma separated numbers, one per mesh node). Relative
paths resolve against the directory of the scenario file.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Callable, NamedTuple

import numpy as np

from .fem1d import NodalField, auxiliary_projection
from .feedback import BoundaryMode, ModelParams
from .mesh import Mesh, uniform_mesh
from .stepper import StepperConfig


class ConfigError(ValueError):
    pass


class Profile(NamedTuple):
    """Analytic initial state with its derivative; `w_d` is the steady state it targets."""

    f: Callable
    df: Callable
    w_d: float | None


PROFILES = {
    "cubic": Profile(lambda x: 20.0 * (0.5 - x) ** 3 - 3.0, lambda x: -60.0 * (0.5 - x) ** 2, 3.0),
    "sine": Profile(
        lambda x: 15.0 * np.sin(np.pi * x) - 5.0, lambda x: 15.0 * np.pi * np.cos(np.pi * x), 5.0
    ),
    "zero": Profile(lambda x: np.zeros_like(x), lambda x: np.zeros_like(x), None),
}

_FLOAT_KEYS = ("mu", "nu", "w_d", "c0", "c1", "dt", "t_end", "newton_tol")
_INT_KEYS = ("n_cells", "record_every", "newton_max_iters")
_STR_KEYS = ("mode", "initial", "out_path")
KNOWN_KEYS = frozenset(_FLOAT_KEYS + _INT_KEYS + _STR_KEYS)
REQUIRED_KEYS = frozenset(("mode", "mu", "nu", "w_d", "n_cells", "dt", "t_end", "initial"))


@dataclass(frozen=True)
class ScenarioConfig:
    mode: BoundaryMode
    mu: float
    nu: float
    w_d: float
    n_cells: int
    dt: float
    t_end: float
    initial: str
    c0: float = 1.0
    c1: float = 1.0
    record_every: int = 100
    newton_tol: float = 1e-10
    newton_max_iters: int = 25
    out_path: str | None = None
    base_dir: Path = Path(".")

    def __post_init__(self):
        try:
            object.__setattr__(self, "mode", BoundaryMode(self.mode))
        except ValueError:
            modes = ", ".join(m.value for m in BoundaryMode)
            raise ConfigError(f"unknown mode {self.mode!r}; expected one of {modes}") from None
        profile = PROFILES.get(self.initial)
        if profile is not None and profile.w_d is not None and profile.w_d != self.w_d:
            raise ConfigError(
                f"initial profile {self.initial!r} targets w_d={profile.w_d}, config has w_d={self.w_d}"
            )
        try:
            self.params
            self.stepper.n_steps
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.n_cells < 1:
            raise ConfigError("n_cells must be >= 1")

    @property
    def params(self) -> ModelParams:
        return ModelParams(
            mu=self.mu, nu=self.nu, w_d=self.w_d, c0=self.c0, c1=self.c1, mode=self.mode
        )

    @property
    def stepper(self) -> StepperConfig:
        return StepperConfig(
            dt=self.dt,
            t_end=self.t_end,
            newton_tol=self.newton_tol,
            newton_max_iters=self.newton_max_iters,
            record_every=self.record_every,
        )

    @property
    def mesh(self) -> Mesh:
        return uniform_mesh(self.n_cells)

    def replace(self, **changes) -> ScenarioConfig:
        return dataclasses.replace(self, **changes)

    def initial_field(self, mesh: Mesh | None = None) -> NodalField:
        """W^0: the H1 projection of an analytic profile, or nodal values read from file.

        In Dirichlet-left mode the value at x = 0 is then overwritten with 0,
        the usual nodal imposition of an essential boundary condition.
        """
        mesh = self.mesh if mesh is None else mesh
        profile = PROFILES.get(self.initial)
        if profile is not None:
            values = auxiliary_projection(profile.f, profile.df, mesh).values.copy()
        else:
            values = self._read_nodal_file(mesh)
        if self.mode is BoundaryMode.DIRICHLET_LEFT_CONTROL_RIGHT:
            values[0] = 0.0
        return NodalField(mesh, values)

    def _read_nodal_file(self, mesh: Mesh) -> np.ndarray:
        path = Path(self.initial)
        if not path.is_absolute():
            path = self.base_dir / path
        try:
            values = np.array(path.read_text().replace(",", " ").split(), dtype=float)
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read nodal initial data from {path}: {exc}") from None
        if values.size != mesh.n_nodes:
            raise ConfigError(
                f"{path} holds {values.size} values, mesh has {mesh.n_nodes} nodes"
            )
        return values

def parse_config(text: str, base_dir: Path | str = ".") -> ScenarioConfig:
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value
    missing = REQUIRED_KEYS - raw.keys()
    if missing:
        raise ConfigError(f"missing keys: {', '.join(sorted(missing))}")
    kwargs = {}
    for key, value in raw.items():
        try:
            if key in _FLOAT_KEYS:
                kwargs[key] = float(value)
            elif key in _INT_KEYS:
                kwargs[key] = int(value)
            else:
                kwargs[key] = value
        except ValueError:
            raise ConfigError(f"bad value for {key}: {value!r}") from None
    return ScenarioConfig(base_dir=Path(base_dir), **kwargs)


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    return parse_config(text, base_dir=path.parent)


def preset_names() -> list[str]:
    files = resources.files("bbmb") / "presets"
    return sorted(p.name[: -len(".cfg")] for p in files.iterdir() if p.name.endswith(".cfg"))


def load_preset(name: str) -> ScenarioConfig:
    """Load a shipped scenario, e.g. ``load_preset("example1_controlled")``."""
    res = resources.files("bbmb") / "presets" / f"{name}.cfg"
    if not res.is_file():
        raise ConfigError(f"no preset {name!r}; available: {', '.join(preset_names())}")
    return parse_config(res.read_text(encoding="utf-8"))
