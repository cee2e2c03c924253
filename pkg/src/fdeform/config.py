"""YAML scenario configuration.

Example::

    deformation:
      kind: self_collision      # identity | self_collision | cross_collision
      kappa: 0.25               # | q_oscillator | custom_entangled | custom_separable
      symmetric: true
    alpha_sq: 1.0
    phi: 0.0
    fringe_phase: 0.0
    time: {t_start: 0.0, t_end: 12.566370614359172, n_steps: 101}
    truncation: {epsilon: 1.0e-12, n_cap: 4096}
    intensity: {deltas: [0.0, 1.5707963267948966, 3.141592653589793]}
    output: visibility.csv

Custom deformations use ``table`` (square 2-D list of f^2 values, entangled)
or ``fa_table``/``fb_table`` (1-D lists, separable).  All quantities are
dimensionless (hbar = c = 1, unit mode frequencies).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import yaml

from .deformation import DeformationSpec, Kind
from .series import CoherentScenario, TruncationPolicy

_TOP_KEYS = {"deformation", "alpha_sq", "phi", "fringe_phase", "time", "truncation",
             "intensity", "output"}
_DEFORMATION_KEYS = {"kind", "kappa", "lambda", "symmetric", "table", "fa_table", "fb_table"}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ScenarioConfig:
    deformation: DeformationSpec
    alpha_sq: float
    phi: float
    fringe_phase: float
    t_start: float
    t_end: float
    n_steps: int
    epsilon: float = 1e-12
    n_cap: int = 4096
    deltas: Optional[tuple] = None
    output: Optional[str] = None

    @property
    def times(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_end, self.n_steps)

    def scenario(self) -> CoherentScenario:
        return CoherentScenario(self.alpha_sq, self.phi, self.fringe_phase, self.times)

    def policy(self) -> TruncationPolicy:
        return TruncationPolicy(self.epsilon, self.n_cap)


class _Reader:
    """Field access with ``path (line N): message`` diagnostics."""

    def __init__(self, data, root_node):
        self.data = data
        self.root = root_node

    def line(self, path):
        node = self.root
        for key in path:
            if node is None or not isinstance(node, yaml.MappingNode):
                break
            match = [v for k, v in node.value if getattr(k, "value", None) == key]
            if not match:
                break
            node = match[0]
        return None if node is None else node.start_mark.line + 1

    def fail(self, path, msg):
        where = ".".join(path) or "<root>"
        line = self.line(path)
        raise ConfigError(f"{where}" + (f" (line {line})" if line else "") + f": {msg}")

    def get(self, path, default=...):
        node = self.data
        for key in path:
            if not isinstance(node, dict):
                self.fail(path[:-1], "expected a mapping")
            if key not in node:
                if default is ...:
                    self.fail(path, "required field missing")
                return default
            node = node[key]
        return node

    def number(self, path, default=..., integer=False):
        value = self.get(path, default)
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            if isinstance(value, str):
                try:
                    value = float(value)
                except ValueError:
                    self.fail(path, f"expected a number, got {value!r}")
            else:
                self.fail(path, f"expected a number, got {value!r}")
        if not math.isfinite(value):
            self.fail(path, "must be finite")
        if integer:
            if float(value) != int(value):
                self.fail(path, f"expected an integer, got {value!r}")
            return int(value)
        return float(value)

    def check_keys(self, path, allowed):
        block = self.get(path) if path else self.data
        if not isinstance(block, dict):
            self.fail(path, "expected a mapping")
        unknown = sorted(set(block) - allowed)
        if unknown:
            self.fail(path + (unknown[0],), f"unknown field (allowed: {', '.join(sorted(allowed))})")


def _deformation(r: _Reader) -> DeformationSpec:
    p = ("deformation",)
    r.check_keys(p, _DEFORMATION_KEYS)
    block = r.get(p)
    kind_name = block.get("kind")
    if kind_name is None:
        if "table" in block:
            kind_name = "custom_entangled"
        elif "fa_table" in block or "fb_table" in block:
            kind_name = "custom_separable"
        else:
            r.fail(p + ("kind",), "required field missing")
    try:
        kind = Kind.parse(kind_name)
    except ValueError as exc:
        r.fail(p + ("kind",), str(exc))
    symmetric = block.get("symmetric")
    if symmetric is not None and not isinstance(symmetric, bool):
        r.fail(p + ("symmetric",), "expected true or false")

    try:
        if kind is Kind.IDENTITY:
            spec = DeformationSpec.identity()
        elif kind is Kind.SELF_COLLISION:
            spec = DeformationSpec.self_collision(r.number(p + ("kappa",)))
        elif kind is Kind.CROSS_COLLISION:
            spec = DeformationSpec.cross_collision(r.number(p + ("kappa",)))
        elif kind is Kind.Q_OSCILLATOR:
            lam = r.number(p + ("lambda",))
            if lam <= 0:
                r.fail(p + ("lambda",), "must be > 0")
            spec = DeformationSpec.q_oscillator(lam)
        elif kind is Kind.CUSTOM_ENTANGLED:
            table = _table(r, p + ("table",), ndim=2)
            spec = DeformationSpec.custom_entangled(table, symmetric=bool(symmetric))
        else:
            fa = _table(r, p + ("fa_table",), ndim=1)
            fb = _table(r, p + ("fb_table",), ndim=1)
            spec = DeformationSpec.custom_separable(fa, fb, symmetric=bool(symmetric))
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        r.fail(p, str(exc))
    if symmetric is not None and kind not in (Kind.CUSTOM_ENTANGLED, Kind.CUSTOM_SEPARABLE):
        spec = DeformationSpec(spec.kind, spec.kappa, spec.lam, declared_symmetric=symmetric)
    return spec


def _table(r: _Reader, path, ndim):
    raw = r.get(path)
    try:
        arr = np.array(raw, dtype=float)
    except (TypeError, ValueError):
        r.fail(path, "expected a numeric array")
    if arr.ndim != ndim:
        r.fail(path, f"expected a {ndim}-D array, got {arr.ndim}-D")
    if ndim == 2 and arr.shape[0] != arr.shape[1]:
        r.fail(path, f"table must be square, got {arr.shape[0]}x{arr.shape[1]}")
    if not np.all(np.isfinite(arr)):
        r.fail(path, "all entries must be finite")
    return arr


def parse_config(text: str) -> ScenarioConfig:
    try:
        root = yaml.compose(text, Loader=yaml.SafeLoader)
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"YAML parse error: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("<root>: expected a mapping of scenario fields")
    r = _Reader(data, root)
    r.check_keys((), _TOP_KEYS)

    deformation = _deformation(r)
    alpha_sq = r.number(("alpha_sq",))
    if alpha_sq < 0:
        r.fail(("alpha_sq",), "must be >= 0")
    phi = r.number(("phi",), 0.0)
    fringe_phase = r.number(("fringe_phase",), 0.0)

    r.check_keys(("time",), {"t_start", "t_end", "n_steps"})
    t_start = r.number(("time", "t_start"))
    t_end = r.number(("time", "t_end"))
    n_steps = r.number(("time", "n_steps"), integer=True)
    if n_steps < 1:
        r.fail(("time", "n_steps"), "must be >= 1")
    if t_end < t_start:
        r.fail(("time", "t_end"), "must be >= t_start")
    if n_steps > 1 and t_end == t_start:
        r.fail(("time", "t_end"), "must exceed t_start when n_steps > 1")

    epsilon, n_cap = 1e-12, 4096
    if "truncation" in data:
        r.check_keys(("truncation",), {"epsilon", "n_cap"})
        epsilon = r.number(("truncation", "epsilon"), 1e-12)
        n_cap = r.number(("truncation", "n_cap"), 4096, integer=True)
        if not 0 < epsilon < 1:
            r.fail(("truncation", "epsilon"), "must lie in (0, 1)")
        if n_cap < 0:
            r.fail(("truncation", "n_cap"), "must be >= 0")

    deltas = None
    if "intensity" in data:
        r.check_keys(("intensity",), {"deltas"})
        raw = r.get(("intensity", "deltas"))
        if not isinstance(raw, list) or not raw:
            r.fail(("intensity", "deltas"), "expected a non-empty list of numbers")
        deltas = tuple(_as_float(r, ("intensity", "deltas"), x) for x in raw)

    output = data.get("output")
    if output is not None and not isinstance(output, str):
        r.fail(("output",), "expected a path string")

    return ScenarioConfig(deformation, alpha_sq, phi, fringe_phase, t_start, t_end,
                          n_steps, epsilon, n_cap, deltas, output)


def _as_float(r, path, x):
    if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
        r.fail(path, f"expected finite numbers, got {x!r}")
    return float(x)


def load_config(path) -> ScenarioConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text)
