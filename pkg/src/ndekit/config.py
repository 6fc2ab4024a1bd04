"""Run configuration: a flat ``key = value`` file with one ``[run]`` section.

Species data live in their own file, pulled in with ``include``.  A path is
taken relative to the config file; the prefix ``package:`` names a file
shipped in ``ndekit/data``.  Unknown keys are rejected so typos surface
early.  :meth:`RunConfig.to_text` writes every field back, and parsing that
text gives an equal object.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field, fields, replace
from importlib import resources
from pathlib import Path

from .casec import CaseCParams, CurveOptions, SymmetryLabel, all_labels
from .errors import ConfigError

__all__ = ["RunConfig", "load_config", "parse_config", "resolve_species"]

_SECTION = "run"
_ASYMPTOTES = ("p3/2", "p1/2")
_MODELS = ("casec", "harmonic")
_SPACINGS = ("geometric", "linear")


def _bool(text: str, key: str) -> bool:
    t = text.strip().lower()
    if t in ("on", "yes", "true", "1"):
        return True
    if t in ("off", "no", "false", "0"):
        return False
    raise ConfigError(f"{key}: expected on/off, got {text!r}")


def _floats(text: str, key: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.replace(",", " ").split())
    except ValueError:
        raise ConfigError(f"{key}: expected a list of numbers, got {text!r}") from None


def _ints(text: str, key: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.replace(",", " ").split())
    except ValueError:
        raise ConfigError(f"{key}: expected a list of integers, got {text!r}") from None


def _opt_int(text: str, key: str) -> int | None:
    t = text.strip().lower()
    if t in ("", "none"):
        return None
    try:
        return int(t)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer or 'none', got {text!r}") from None


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "on" if value else "off"
    if value is None:
        return "none"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        if value and all(isinstance(x, str) for x in value):
            return " ".join(value)
        return " ".join(_fmt(x) for x in value)
    return str(value)


@dataclass(frozen=True)
class RunConfig:
    """Everything a CLI run needs besides the command-line flags.

    Lengths are in bohr; ``windows`` and ``terms_binding`` are binding
    energies ``D - E`` in ``units``.
    """

    include: str = "package:cs133.ini"
    labels: tuple = ("0g-",)
    branch: int = 1
    asymptote: str = "p3/2"
    model: str = "casec"
    epsilon: bool = True
    c8: bool = True
    spin_spin: bool = False
    rotation_J: int | None = None
    retardation: bool = False
    r_min: float = 1.0
    grid_start: float = 5.0
    grid_stop: float = 200.0
    grid_points: int = 400
    grid_spacing: str = "geometric"
    expand_powers: tuple = (3, 6, 9)
    expand_window: tuple = (200.0, 2000.0)
    tail_n: int = 3
    tail_m: int | None = 6
    R_plus_c: float = 35.0
    terms_binding: tuple = (30.0, 10.0, 1.0)
    windows: tuple = (30.0, 10.0, 5.0, 2.0)
    fit_all: bool = True
    v_min: int = 0
    v_max: int | None = None
    harmonic_omega: float = 10.0
    harmonic_r_e: float = 30.0
    units: str = "cm-1"
    output: str = "out"
    flambaum: bool = False
    base_dir: str = field(default=".", compare=False)

    def __post_init__(self):
        for lab in self.labels:
            if lab != "all":
                try:
                    SymmetryLabel.parse(lab)
                except ValueError as exc:
                    raise ConfigError(f"labels: {exc}") from None
        if self.asymptote not in _ASYMPTOTES:
            raise ConfigError(f"asymptote must be one of {_ASYMPTOTES}, got {self.asymptote!r}")
        if self.model not in _MODELS:
            raise ConfigError(f"model must be one of {_MODELS}, got {self.model!r}")
        if self.grid_spacing not in _SPACINGS:
            raise ConfigError(f"grid_spacing must be one of {_SPACINGS}, got {self.grid_spacing!r}")
        if self.grid_points < 1:
            raise ConfigError("grid_points must be at least 1")
        if not 0 < self.grid_start <= self.grid_stop:
            raise ConfigError(f"need 0 < grid_start <= grid_stop, got {self.grid_start}, {self.grid_stop}")
        if len(self.expand_window) != 2 or not 0 < self.expand_window[0] < self.expand_window[1]:
            raise ConfigError(f"expand_window needs two increasing radii, got {self.expand_window}")
        if not self.expand_powers:
            raise ConfigError("expand_powers is empty")
        if any(w <= 0 for w in self.windows) or any(b <= 0 for b in self.terms_binding):
            raise ConfigError("windows and terms_binding must be positive binding energies")
        if not (self.R_plus_c > 0 and self.r_min > 0):
            raise ConfigError("R_plus_c and r_min must be positive")
        if self.v_min < 0:
            raise ConfigError("v_min must be >= 0")
        if not (math.isfinite(self.harmonic_omega) and self.harmonic_omega > 0):
            raise ConfigError("harmonic_omega must be positive")

    # derived ---------------------------------------------------------------

    @property
    def symmetry_labels(self) -> list[SymmetryLabel]:
        if "all" in self.labels:
            return all_labels()
        return [SymmetryLabel.parse(lab) for lab in self.labels]

    @property
    def species_path(self) -> Path:
        return resolve_species(self.include, Path(self.base_dir))

    def params(self) -> CaseCParams:
        try:
            return CaseCParams.from_species(self.species_path, include_c8=self.c8, include_epsilon=self.epsilon)
        except (KeyError, OSError, configparser.Error) as exc:
            raise ConfigError(f"species file {self.include}: {exc}") from None

    def curve_options(self) -> CurveOptions:
        return CurveOptions(
            include_epsilon=self.epsilon,
            include_spin_spin=self.spin_spin,
            rotation_J=self.rotation_J,
            include_retardation=self.retardation,
        )

    def with_(self, **changes) -> "RunConfig":
        return replace(self, **changes)

    # serialization ---------------------------------------------------------

    def to_text(self) -> str:
        lines = [f"[{_SECTION}]"]
        for f in fields(self):
            if f.name == "base_dir":
                continue
            lines.append(f"{f.name} = {_fmt(getattr(self, f.name))}")
        return "\n".join(lines) + "\n"


def resolve_species(include: str, base_dir: Path) -> Path:
    """Path of the species file named by an ``include`` value."""
    if include.startswith("package:"):
        name = include.split(":", 1)[1]
        ref = resources.files("ndekit") / "data" / name
        if not ref.is_file():
            raise ConfigError(f"include: no bundled species file {name!r}")
        return Path(str(ref))
    path = Path(include)
    if not path.is_absolute():
        path = base_dir / path
    if not path.is_file():
        raise ConfigError(f"include: species file {path} not found")
    return path


_PARSERS = {
    "include": lambda t, k: t.strip(),
    "labels": lambda t, k: tuple(t.replace(",", " ").split()),
    "branch": lambda t, k: _ints(t, k)[0] if len(_ints(t, k)) == 1 else _bad(k, t),
    "asymptote": lambda t, k: t.strip(),
    "model": lambda t, k: t.strip(),
    "epsilon": _bool,
    "c8": _bool,
    "spin_spin": _bool,
    "rotation_J": _opt_int,
    "retardation": _bool,
    "r_min": lambda t, k: _one_float(t, k),
    "grid_start": lambda t, k: _one_float(t, k),
    "grid_stop": lambda t, k: _one_float(t, k),
    "grid_points": lambda t, k: _ints(t, k)[0] if len(_ints(t, k)) == 1 else _bad(k, t),
    "grid_spacing": lambda t, k: t.strip(),
    "expand_powers": _ints,
    "expand_window": _floats,
    "tail_n": lambda t, k: _ints(t, k)[0] if len(_ints(t, k)) == 1 else _bad(k, t),
    "tail_m": _opt_int,
    "R_plus_c": lambda t, k: _one_float(t, k),
    "terms_binding": _floats,
    "windows": _floats,
    "fit_all": _bool,
    "v_min": lambda t, k: _ints(t, k)[0] if len(_ints(t, k)) == 1 else _bad(k, t),
    "v_max": _opt_int,
    "harmonic_omega": lambda t, k: _one_float(t, k),
    "harmonic_r_e": lambda t, k: _one_float(t, k),
    "units": lambda t, k: t.strip(),
    "output": lambda t, k: t.strip(),
    "flambaum": _bool,
}


def _bad(key: str, text: str):
    raise ConfigError(f"{key}: expected a single value, got {text!r}")


def _one_float(text: str, key: str) -> float:
    vals = _floats(text, key)
    if len(vals) != 1:
        _bad(key, text)
    return vals[0]


def parse_config(text: str, base_dir: str | Path = ".") -> RunConfig:
    """Parse config text; ``base_dir`` anchors relative ``include`` paths."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str  # type: ignore[assignment]
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from None
    if _SECTION not in cp:
        raise ConfigError(f"config has no [{_SECTION}] section")
    extra = [s for s in cp.sections() if s != _SECTION]
    if extra:
        raise ConfigError(f"unexpected sections {extra}; only [{_SECTION}] is allowed")
    values = {}
    for key, raw in cp[_SECTION].items():
        if key not in _PARSERS:
            raise ConfigError(f"unknown key {key!r}; valid keys: {', '.join(sorted(_PARSERS))}")
        values[key] = _PARSERS[key](raw, key)
    try:
        return RunConfig(base_dir=str(base_dir), **values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text, path.parent)
