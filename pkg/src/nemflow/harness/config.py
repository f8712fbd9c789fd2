"""Flat ``section.key = value`` run configuration.

Blank lines and ``#`` comments are ignored.  Every key is optional;
unknown keys are rejected with the offending line number.  The
canonical text produced by :func:`format_config` lists every key in a
fixed order and is what the configuration hash is taken over.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace

from ..diagnostics import WEIGHTED
from ..errors import ConfigurationError
from ..initdata import InitSpec
from ..integrator import StepPolicy
from ..model import Params
from ..spectral import make_grid

INEQUALITIES = WEIGHTED + ("pointwise",)
FIT_MODELS = ("algebraic", "logarithmic", "none")


@dataclass(frozen=True)
class GridSpec:
    n: int = 64
    length: float = 32.0


@dataclass(frozen=True)
class DiagOptions:
    inequalities: tuple = ()
    weight_exponent: float = 3.0
    heat_stride: int = 10
    budget_tol: float = 1e-4
    eps0_check: bool = True
    checkpoint_interval: float = 0.0


@dataclass(frozen=True)
class FitOptions:
    model: str = "algebraic"
    t_lo: float = 1.0
    t_hi: float = 10.0
    c_sat: float = 0.05
    target: float = 1.0


@dataclass(frozen=True)
class RunConfig:
    grid: GridSpec = field(default_factory=GridSpec)
    params: Params = field(default_factory=Params)
    init: InitSpec = field(default_factory=InitSpec)
    policy: StepPolicy = field(default_factory=lambda: StepPolicy(t_end=10.0, sample_interval=0.1, cfl=0.5))
    diag: DiagOptions = field(default_factory=DiagOptions)
    fit: FitOptions = field(default_factory=FitOptions)
    output_dir: str = "out"

    def __post_init__(self):
        make_grid(self.grid.n, self.grid.length)
        for name in self.diag.inequalities:
            if name not in INEQUALITIES:
                raise ConfigurationError(f"unknown inequality {name!r} in diag.inequalities")
        if self.diag.heat_stride < 1:
            raise ConfigurationError("diag.heat_stride must be at least 1")
        if self.diag.checkpoint_interval < 0:
            raise ConfigurationError("diag.checkpoint_interval must be nonnegative")
        if self.fit.model not in FIT_MODELS:
            raise ConfigurationError(f"unknown fit model {self.fit.model!r}")
        if self.fit.model != "none":
            cap = min(self.policy.t_end, self.fit.c_sat * self.grid.length ** 2)
            if self.fit.t_lo < 1.0:
                raise ConfigurationError(f"fit.t_lo must be >= 1, got {self.fit.t_lo}")
            if self.fit.t_hi > cap * (1 + 1e-12):
                raise ConfigurationError(
                    f"fit.t_hi = {self.fit.t_hi} exceeds min(t_end, c_sat L^2) = {cap:.6g}")
            if self.fit.t_hi <= self.fit.t_lo:
                raise ConfigurationError("fit window is empty (t_hi <= t_lo)")


# (section.key, object path, kind)
_KEYS = [
    ("grid.n", ("grid", "n"), "int"),
    ("grid.length", ("grid", "length"), "float"),
    ("params.nu", ("params", "nu"), "float"),
    ("params.lambda", ("params", "lam"), "float"),
    ("params.gamma", ("params", "gamma"), "float"),
    ("init.family", ("init", "family"), "str"),
    ("init.amplitude", ("init", "amplitude"), "float"),
    ("init.slope", ("init", "slope"), "float"),
    ("init.seed", ("init", "seed"), "int"),
    ("init.eps0", ("init", "eps0"), "float"),
    ("init.director_amplitude", ("init", "director_amplitude"), "float"),
    ("step.dt", ("policy", "dt"), "optfloat"),
    ("step.cfl", ("policy", "cfl"), "optfloat"),
    ("step.t_end", ("policy", "t_end"), "float"),
    ("step.sample_interval", ("policy", "sample_interval"), "float"),
    ("step.mode", ("policy", "mode"), "str"),
    ("step.max_dt", ("policy", "max_dt"), "float"),
    ("step.nonlinear", ("policy", "nonlinear"), "bool"),
    ("diag.inequalities", ("diag", "inequalities"), "list"),
    ("diag.weight_exponent", ("diag", "weight_exponent"), "float"),
    ("diag.heat_stride", ("diag", "heat_stride"), "int"),
    ("diag.budget_tol", ("diag", "budget_tol"), "float"),
    ("diag.eps0_check", ("diag", "eps0_check"), "bool"),
    ("diag.checkpoint_interval", ("diag", "checkpoint_interval"), "float"),
    ("fit.model", ("fit", "model"), "str"),
    ("fit.t_lo", ("fit", "t_lo"), "float"),
    ("fit.t_hi", ("fit", "t_hi"), "float"),
    ("fit.c_sat", ("fit", "c_sat"), "float"),
    ("fit.target", ("fit", "target"), "float"),
    ("output.dir", ("output_dir",), "str"),
]
_BY_NAME = {k: (path, kind) for k, path, kind in _KEYS}


def _convert(kind, raw, key, lineno):
    try:
        if kind == "int":
            return int(raw, 0)
        if kind == "float":
            return float(raw)
        if kind == "optfloat":
            return None if raw.lower() in ("", "none") else float(raw)
        if kind == "bool":
            low = raw.lower()
            if low in ("true", "yes", "1", "on"):
                return True
            if low in ("false", "no", "0", "off"):
                return False
            raise ValueError(raw)
        if kind == "list":
            return tuple(x.strip() for x in raw.split(",") if x.strip() and x.strip() != "none")
        return raw
    except ValueError:
        raise ConfigurationError(f"line {lineno}: cannot read {key} = {raw!r} as {kind}") from None


def _format(kind, value):
    if kind == "optfloat":
        return "none" if value is None else repr(float(value))
    if kind == "float":
        return repr(float(value))
    if kind == "bool":
        return "true" if value else "false"
    if kind == "list":
        return ", ".join(value) if value else "none"
    return str(value)


def _get(cfg, path):
    obj = cfg
    for part in path:
        obj = getattr(obj, part)
    return obj


def parse_config(text: str) -> RunConfig:
    """Parse configuration text into a validated :class:`RunConfig`."""
    values = {}
    seen = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigurationError(f"line {lineno}: expected 'key = value', got {line.strip()!r}")
        key, raw = (s.strip() for s in stripped.split("=", 1))
        if key not in _BY_NAME:
            raise ConfigurationError(f"line {lineno}: unknown key {key!r}")
        if key in seen:
            raise ConfigurationError(f"line {lineno}: duplicate key {key!r} (first on line {seen[key]})")
        seen[key] = lineno
        path, kind = _BY_NAME[key]
        values[path] = _convert(kind, raw, key, lineno)
    try:
        return build_config(values)
    except ConfigurationError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(str(exc)) from None


def build_config(values: dict) -> RunConfig:
    """Assemble a config from ``{path tuple: value}`` over the defaults."""
    sections = {}
    top = {}
    for path, value in values.items():
        if len(path) == 1:
            top[path[0]] = value
        else:
            sections.setdefault(path[0], {})[path[1]] = value
    grid = GridSpec(**sections.get("grid", {}))
    params = Params(**sections.get("params", {}))
    init = InitSpec(**sections.get("init", {}))
    pol = dict(t_end=10.0, sample_interval=0.1, cfl=0.5)
    pol.update(sections.get("policy", {}))
    if "dt" in sections.get("policy", {}) and sections["policy"]["dt"] is not None \
            and "cfl" not in sections["policy"]:
        pol["cfl"] = None
    policy = StepPolicy(**pol)
    diag = DiagOptions(**sections.get("diag", {}))
    fit = FitOptions(**sections.get("fit", {}))
    return RunConfig(grid, params, init, policy, diag, fit, top.get("output_dir", "out"))


def format_config(cfg: RunConfig) -> str:
    """Canonical text: every key, fixed order, ``repr`` floats."""
    lines = [f"{key} = {_format(kind, _get(cfg, path))}" for key, path, kind in _KEYS]
    return "\n".join(lines) + "\n"


def config_hash(cfg: RunConfig) -> str:
    """SHA-256 of the canonical text, excluding the output directory."""
    text = "\n".join(line for line in format_config(cfg).splitlines()
                     if not line.startswith("output.dir"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def with_overrides(cfg: RunConfig, **sections) -> RunConfig:
    """Copy of ``cfg`` with whole sections or fields replaced.

    ``with_overrides(cfg, init={"seed": 3}, grid={"n": 128})``.
    """
    kw = {}
    for name, changes in sections.items():
        current = getattr(cfg, name)
        kw[name] = replace(current, **changes) if isinstance(changes, dict) else changes
    return replace(cfg, **kw)


__all__ = [
    "GridSpec", "DiagOptions", "FitOptions", "RunConfig", "parse_config", "format_config",
    "config_hash", "build_config", "with_overrides", "INEQUALITIES", "FIT_MODELS",
]
