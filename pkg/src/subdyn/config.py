"""Scenario configuration: one JSON document per run, strictly validated.

Unknown keys are rejected with a nearest-match suggestion rather than
silently ignored, since a typo like "lamda" would otherwise run a different
experiment than the one described.
"""

from __future__ import annotations

import dataclasses
import difflib
import json
import pathlib

from .models import ModelSpec
from .subdynamics import normalize_order

SCENARIOS = ("classify", "evolve", "swap-calibrate", "cnot-demo", "turing-demo", "verify")
DIM_CAP = 64

_MODEL_KEYS = tuple(f.name for f in dataclasses.fields(ModelSpec))
_INT_FIELDS = {"fock_cutoff", "bath_cutoff", "seed", "tape_spins"}


class ConfigError(ValueError):
    """Configuration document rejected before any computation ran."""


@dataclasses.dataclass(frozen=True)
class ScenarioConfig:
    """Validated description of one run.

    t_grid is (t_start, t_end, steps); eta is the imaginary regulator handed
    to perturbative orders; t_swap, tape_spins, rotation_angle and
    shear_strength parameterize the gate and Turing scenarios and are
    ignored elsewhere.
    """

    scenario: str
    model: ModelSpec
    order: str = "exact"
    t_grid: tuple[float, float, int] = (0.0, 10.0, 101)
    eta: float = 0.0
    seed: int = 0
    output_dir: str | None = None
    allow_large: bool = False
    t_swap: float = 1.0
    tape_spins: int = 2
    rotation_angle: float = 0.8
    shear_strength: float = 0.4

    def times(self):
        import numpy as np

        start, end, steps = self.t_grid
        return np.linspace(start, end, steps)


_TOP_KEYS = tuple(f.name for f in dataclasses.fields(ScenarioConfig))


def _reject_unknown(keys, valid, where: str) -> None:
    for key in keys:
        if key in valid:
            continue
        near = difflib.get_close_matches(key, valid, n=1)
        hint = f"; did you mean {near[0]!r}?" if near else ""
        raise ConfigError(f"unknown {where} key {key!r}{hint}")


def _coerce_int(value, name: str) -> int:
    if isinstance(value, bool):
        raise ConfigError(f"{name} must be an integer, got {value!r}")
    try:
        out = int(value)
    except (TypeError, ValueError, OverflowError) as exc:
        raise ConfigError(f"{name} must be an integer, got {value!r}") from exc
    if isinstance(value, float) and value != out:
        raise ConfigError(f"{name} must be an integer, got {value!r}")
    return out


def _build_model(raw: dict) -> ModelSpec:
    if not isinstance(raw, dict):
        raise ConfigError("model must be an object of ModelSpec fields")
    _reject_unknown(raw.keys(), _MODEL_KEYS, "model")
    fields = dict(raw)
    if "omega_atoms" in fields:
        fields["omega_atoms"] = tuple(float(x) for x in fields["omega_atoms"])
    if "bath" in fields:
        fields["bath"] = tuple(tuple(float(x) for x in mode) for mode in fields["bath"])
    for name in ("fock_cutoff", "bath_cutoff"):
        if name in fields:
            fields[name] = _coerce_int(fields[name], f"model.{name}")
    try:
        return ModelSpec(**fields)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid model: {exc}") from exc


def load_config(source) -> ScenarioConfig:
    """Parse and validate a config document (path, JSON text, or dict)."""
    if isinstance(source, dict):
        raw = dict(source)
    else:
        path = pathlib.Path(source)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {source}: {exc}") from exc
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {source} is not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config document must be a JSON object")

    _reject_unknown(raw.keys(), _TOP_KEYS, "config")
    if "scenario" not in raw:
        raise ConfigError("config needs a 'scenario' key")
    if "model" not in raw:
        raise ConfigError("config needs a 'model' object")
    scenario = raw["scenario"]
    if scenario not in SCENARIOS:
        near = difflib.get_close_matches(str(scenario), SCENARIOS, n=1)
        hint = f"; did you mean {near[0]!r}?" if near else ""
        raise ConfigError(f"unknown scenario {scenario!r}{hint}")

    model = _build_model(raw["model"])
    fields: dict = {"scenario": scenario, "model": model}

    if "order" in raw:
        try:
            fields["order"] = normalize_order(raw["order"])
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    if "t_grid" in raw:
        grid = raw["t_grid"]
        if not isinstance(grid, (list, tuple)) or len(grid) != 3:
            raise ConfigError("t_grid must be [t_start, t_end, steps]")
        start, end, steps = float(grid[0]), float(grid[1]), _coerce_int(grid[2], "t_grid steps")
        if end < start:
            raise ConfigError(f"t_grid end {end} is before start {start}")
        if steps < 1:
            raise ConfigError("t_grid needs at least one step")
        fields["t_grid"] = (start, end, steps)
    if "eta" in raw:
        eta = float(raw["eta"])
        if eta < 0:
            raise ConfigError("eta must be non-negative")
        fields["eta"] = eta
    for name in ("seed", "tape_spins"):
        if name in raw:
            fields[name] = _coerce_int(raw[name], name)
    for name in ("t_swap", "rotation_angle", "shear_strength"):
        if name in raw:
            fields[name] = float(raw[name])
    if "output_dir" in raw and raw["output_dir"] is not None:
        fields["output_dir"] = str(raw["output_dir"])
    if "allow_large" in raw:
        if not isinstance(raw["allow_large"], bool):
            raise ConfigError("allow_large must be true or false")
        fields["allow_large"] = raw["allow_large"]

    config = ScenarioConfig(**fields)
    if config.tape_spins < 0:
        raise ConfigError("tape_spins must be non-negative")
    if config.model.dim > DIM_CAP and not config.allow_large:
        raise ConfigError(
            f"model Hilbert dimension {config.model.dim} exceeds the cap {DIM_CAP} "
            "(Liouville space grows as its square); pass allow_large to override")
    return config


def config_echo(config: ScenarioConfig) -> dict:
    """Resolved config as a plain dict for the run report.

    output_dir is omitted: it says where the report went, not what was run,
    and keeping it out lets identical runs produce identical payloads.
    """
    echo = dataclasses.asdict(config)
    echo.pop("output_dir")
    echo["model"] = dataclasses.asdict(config.model)
    return echo
