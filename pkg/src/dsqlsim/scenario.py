"""Scenario files: YAML with unit-suffixed keys, parsed into SI values.

Every dimensioned quantity carries its unit in the key name, e.g.
``wavelength_nm: 810`` or ``altitude_km``.  Parse and validation problems are
reported as ``ScenarioError`` with the offending line number.
"""
from __future__ import annotations

import hashlib
import json
import math
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Optional

import numpy as np
import yaml

from .constants import CONST

EXPERIMENTS = ("clock", "link", "bell", "bell-scan", "cow-scan", "hom-scan",
               "teleport-map", "decohere", "human-bell")
MONTE_CARLO = ("teleport-map",)

# suffix -> (dimension, factor to SI)
UNITS: dict[str, tuple[str, float]] = {
    "m": ("length", 1.0), "km": ("length", 1e3), "mm": ("length", 1e-3),
    "um": ("length", 1e-6), "nm": ("length", 1e-9), "angstrom": ("length", 1e-10),
    "s": ("time", 1.0), "ms": ("time", 1e-3), "us": ("time", 1e-6),
    "ns": ("time", 1e-9), "ps": ("time", 1e-12), "fs": ("time", 1e-15),
    "h": ("time", 3600.0),
    "hz": ("frequency", 1.0), "khz": ("frequency", 1e3), "mhz": ("frequency", 1e6),
    "ghz": ("frequency", 1e9),
    "rad_s": ("angular_frequency", 1.0),
    "rad": ("angle", 1.0), "deg": ("angle", math.pi / 180.0),
    "db": ("decibel", 1.0),
    "kg": ("mass", 1.0), "amu": ("mass", CONST.amu),
    "j": ("energy", 1.0), "ev": ("energy", CONST.eV),
    "k": ("temperature", 1.0),
    "cps": ("rate", 1.0), "kcps": ("rate", 1e3),
    "m_s": ("speed", 1.0), "km_s": ("speed", 1e3),
    "m2": ("area", 1.0),
    "ph_s_m2_sr_hz": ("spectral_photon_radiance", 1.0),
    "per_s": ("rate", 1.0),
}
# longest suffix first so "rad_s" wins over "s"
_SUFFIXES = sorted(UNITS, key=len, reverse=True)


class ScenarioError(Exception):
    """Malformed or invalid scenario file."""

    def __init__(self, message: str, line: Optional[int] = None, source: str = ""):
        self.line = line
        self.source = source
        loc = f"{source}:{line}" if line is not None else source
        super().__init__(f"{loc}: {message}" if loc else message)


def split_unit(key: str) -> tuple[str, Optional[str]]:
    """('wavelength', 'nm') for 'wavelength_nm'; (key, None) when unitless."""
    for suf in _SUFFIXES:
        if key.endswith("_" + suf) and len(key) > len(suf) + 1:
            return key[: -len(suf) - 1], suf
    return key, None


@dataclass(frozen=True)
class Axis:
    name: str
    unit: Optional[str]
    values: np.ndarray  # SI

    @property
    def display(self) -> np.ndarray:
        """Values in the unit the file used."""
        return self.values / UNITS[self.unit][1] if self.unit else self.values


@dataclass
class Section:
    """A mapping from the file together with the line of each key."""

    data: dict
    lines: dict
    line: Optional[int]
    source: str
    used: set = field(default_factory=set)

    def error(self, msg: str, key: Optional[str] = None) -> ScenarioError:
        return ScenarioError(msg, self.lines.get(key, self.line), self.source)

    def _find(self, name: str) -> Optional[str]:
        hits = [k for k in self.data if split_unit(k)[0] == name or k == name]
        if len(hits) > 1:
            raise self.error(f"'{name}' given more than once ({', '.join(hits)})", hits[1])
        return hits[0] if hits else None

    def has(self, name: str) -> bool:
        return self._find(name) is not None

    def quantity(self, name: str, dimension: str, default: Any = None) -> float:
        key = self._find(name)
        if key is None:
            if default is None:
                raise self.error(f"missing required quantity '{name}' ({dimension})")
            return default
        self.used.add(key)
        base, unit = split_unit(key)
        if unit is None or base != name:
            raise self.error(f"'{key}' needs a unit suffix for a {dimension}", key)
        dim, factor = UNITS[unit]
        if dim != dimension:
            raise self.error(f"'{key}': unit '{unit}' is a {dim}, expected {dimension}", key)
        return self._number(key) * factor

    def number(self, name: str, default: Any = None) -> float:
        if name not in self.data:
            if default is None:
                raise self.error(f"missing required value '{name}'")
            return default
        self.used.add(name)
        return self._number(name)

    def integer(self, name: str, default: Optional[int] = None) -> int:
        v = self.number(name, default)
        if v != int(v):
            raise self.error(f"'{name}' must be an integer", name)
        return int(v)

    def text(self, name: str, default: Optional[str] = None,
             choices: Optional[tuple] = None) -> str:
        if name not in self.data:
            if default is None:
                raise self.error(f"missing required value '{name}'")
            return default
        self.used.add(name)
        v = self.data[name]
        if not isinstance(v, str) or (choices and v not in choices):
            want = f" (one of {', '.join(choices)})" if choices else ""
            raise self.error(f"'{name}' must be a string{want}, got {v!r}", name)
        return v

    def flag(self, name: str, default: bool = False) -> bool:
        if name not in self.data:
            return default
        self.used.add(name)
        v = self.data[name]
        if not isinstance(v, bool):
            raise self.error(f"'{name}' must be true or false", name)
        return v

    def _number(self, key: str) -> float:
        v = self.data[key]
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise self.error(f"'{key}' must be a finite number, got {v!r}", key)
        return float(v)

    def check_unused(self) -> None:
        extra = [k for k in self.data if k not in self.used]
        if extra:
            raise self.error(f"unknown key '{extra[0]}'", extra[0])


@dataclass
class Scenario:
    name: str
    experiment: str
    description: str
    params: Section
    grids: dict
    seed: Optional[int]
    output: Optional[str]
    source: str
    digest: str
    grid_lines: dict = field(default_factory=dict)

    def axis(self, name: str, dimension: Optional[str] = None, required: bool = True
             ) -> Optional[Axis]:
        hits = [a for a in self.grids.values() if a.name == name]
        if not hits:
            if required:
                raise ScenarioError(f"missing grid axis '{name}'", None, self.source)
            return None
        ax = hits[0]
        key = f"{ax.name}_{ax.unit}" if ax.unit else ax.name
        line = self.grid_lines.get(key)
        if dimension is None and ax.unit is not None:
            raise ScenarioError(f"grid axis '{key}' must be dimensionless", line, self.source)
        if dimension is not None:
            if ax.unit is None:
                raise ScenarioError(f"grid axis '{name}' needs a unit suffix for a {dimension}",
                                    line, self.source)
            if UNITS[ax.unit][0] != dimension:
                raise ScenarioError(f"grid axis '{key}' must be a {dimension}", line, self.source)
        return ax


def _plain(node: yaml.Node, lines: dict, key: Optional[str] = None):
    """Convert a composed YAML node into Python objects, recording key lines."""
    if isinstance(node, yaml.MappingNode):
        out = {}
        for k, v in node.value:
            name = k.value
            if name in out:
                raise ScenarioError(f"duplicate key '{name}'", k.start_mark.line + 1)
            lines[name] = k.start_mark.line + 1
            out[name] = v
        return out
    if isinstance(node, yaml.SequenceNode):
        return [_scalar(x) for x in node.value]
    return _scalar(node)


_SCI = re.compile(r"^[-+]?(\d+\.?\d*|\.\d+)[eE][-+]?\d+$")


def _scalar(node: yaml.Node):
    if not isinstance(node, yaml.ScalarNode):
        raise ScenarioError("nested structure not allowed here", node.start_mark.line + 1)
    value = yaml.safe_load(yaml.serialize(node))
    # YAML 1.1 reads 1e13 as a string; accept it as the number it looks like
    if isinstance(value, str) and node.style is None and _SCI.match(value):
        return float(value)
    return value


def _section(node: Optional[yaml.Node], source: str, parent_line: Optional[int]) -> Section:
    if node is None:
        return Section({}, {}, parent_line, source)
    if not isinstance(node, yaml.MappingNode):
        raise ScenarioError("expected a mapping", node.start_mark.line + 1, source)
    lines: dict = {}
    raw = _plain(node, lines)
    data = {}
    for k, v in raw.items():
        if isinstance(v, (yaml.MappingNode, yaml.SequenceNode)):
            data[k] = _plain(v, {}) if isinstance(v, yaml.SequenceNode) else v
        else:
            data[k] = _scalar(v)
    return Section(data, lines, node.start_mark.line + 1, source)


def _axis(key: str, node: yaml.Node, source: str) -> Axis:
    line = node.start_mark.line + 1
    base, unit = split_unit(key)
    factor = UNITS[unit][1] if unit else 1.0
    if isinstance(node, yaml.SequenceNode):
        vals = [_scalar(x) for x in node.value]
    elif isinstance(node, yaml.MappingNode):
        sec = _section(node, source, line)
        if "values" in sec.data:
            vals = sec.data["values"]
            sec.used.add("values")
            if not isinstance(vals, list):
                raise sec.error("'values' must be a list", "values")
        else:
            lo, hi = sec.number("min"), sec.number("max")
            n = sec.integer("points")
            scale = sec.text("scale", "linear", ("linear", "log"))
            if n < 1:
                raise sec.error("grid needs at least one point", "points")
            if lo > hi or (n > 1 and lo == hi):
                raise sec.error(f"grid min ({lo}) must be below max ({hi})", "min")
            if scale == "log":
                if lo <= 0:
                    raise sec.error("log grid needs a positive minimum", "min")
                vals = list(np.geomspace(lo, hi, n))
            else:
                vals = list(np.linspace(lo, hi, n))
        sec.check_unused()
    else:
        raise ScenarioError(f"grid '{key}' must be a list or a min/max/points mapping",
                            line, source)
    if not vals or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in vals):
        raise ScenarioError(f"grid '{key}' must hold numbers", line, source)
    return Axis(base, unit, np.asarray(vals, dtype=float) * factor)


def parse_scenario(text: str, source: str = "<scenario>") -> Scenario:
    try:
        root = yaml.compose(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        raise ScenarioError(f"YAML syntax error: {getattr(exc, 'problem', exc)}", line,
                            source) from None
    if root is None:
        raise ScenarioError("empty scenario file", 1, source)
    top = _section(root, source, 1)
    name = top.text("name")
    if not name.replace("_", "").replace("-", "").isalnum():
        raise top.error("name must be alphanumeric with '_' or '-'", "name")
    experiment = top.text("experiment", choices=EXPERIMENTS)
    description = top.text("description", "")
    top.text("reproduces", "")
    seed = None
    if "seed" in top.data:
        seed = top.integer("seed")
        if not 0 <= seed < 2**64:
            raise top.error("seed must be a 64-bit unsigned integer", "seed")
    if experiment in MONTE_CARLO and seed is None:
        raise top.error(f"experiment '{experiment}' is Monte-Carlo and needs a seed")
    output = top.text("output", "") or None

    params_node = top.data.get("params")
    top.used.add("params")
    params = _section(params_node, source, top.lines.get("params"))

    grids: dict = {}
    grid_lines: dict = {}
    gnode = top.data.get("grids")
    top.used.add("grids")
    if gnode is not None:
        if not isinstance(gnode, yaml.MappingNode):
            raise top.error("'grids' must be a mapping", "grids")
        for k, v in gnode.value:
            grid_lines[k.value] = k.start_mark.line + 1
            if k.value in grids:
                raise ScenarioError(f"duplicate grid '{k.value}'", k.start_mark.line + 1, source)
            grids[k.value] = _axis(k.value, v, source)
    top.check_unused()

    canon = json.dumps(yaml.safe_load(text), sort_keys=True, default=str)
    digest = hashlib.sha256(canon.encode()).hexdigest()
    return Scenario(name, experiment, description, params, grids, seed, output, source,
                    digest, grid_lines)


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario: {exc.strerror}", None, str(path)) from None
    return parse_scenario(text, str(path))


def bundled_dir():
    return resources.files("dsqlsim") / "scenarios"


def bundled_scenarios() -> dict:
    """name -> (path, one-line annotation) for every bundled scenario."""
    out = {}
    for entry in sorted(bundled_dir().iterdir(), key=lambda p: p.name):
        if entry.name.endswith(".yaml"):
            meta = yaml.safe_load(entry.read_text(encoding="utf-8"))
            out[meta["name"]] = (entry, meta.get("reproduces", ""))
    return out


def resolve(path_or_name: str):
    """A file path, or the name of a bundled scenario."""
    p = Path(path_or_name)
    if p.exists():
        return p
    catalog = bundled_scenarios()
    if path_or_name in catalog:
        return catalog[path_or_name][0]
    return p
