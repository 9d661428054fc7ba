"""Flat ``key = value`` run configuration.

Example::

    # 50 m of standard fiber with a fused 90:10 coupler
    fiber.preset = ssmf
    fiber.length_m = 50
    coupler.eta = 0.10
    pulse.fwhm_fs = 130
    pulse.energy_pj = 156

Units are part of the key names.  Unknown keys are rejected.  ``loss.<label>``
keys (transmission fractions) replace the default loss budget as a whole.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .errors import ConfigError, InvalidParameterError
from .nlse import TimeGrid, default_steps
from .params import (DEFAULT_NOISE_BUDGET, FIBER_PRESETS, CouplerSpec, FiberSpec, LossBudget,
                     PulseSpec)

DEFAULTS = {
    "fiber.preset": "hb1500",
    "pulse.fwhm_fs": 100.0,
    "pulse.wavelength_nm": 1530.0,
    "pulse.rep_rate_mhz": 82.0,
    "pulse.mean_power_mw": 12.0,
    "coupler.eta": 0.07,
    "grid.n": 4096,
    "grid.window_ps": 16.0,
}

# key -> (type, lower bound, upper bound, lower inclusive)
_NUMERIC = {
    "fiber.beta2_ps2_per_km": (float, -math.inf, math.inf, True),
    "fiber.gamma_per_w_km": (float, 0.0, math.inf, True),
    "fiber.length_m": (float, 0.0, math.inf, False),
    "pulse.fwhm_fs": (float, 0.0, math.inf, False),
    "pulse.wavelength_nm": (float, 0.0, math.inf, False),
    "pulse.rep_rate_mhz": (float, 0.0, math.inf, False),
    "pulse.mean_power_mw": (float, 0.0, math.inf, True),
    "pulse.energy_pj": (float, 0.0, math.inf, True),
    "coupler.eta": (float, 0.0, 0.5, True),
    "grid.n": (int, 64, 2 ** 24, True),
    "grid.window_ps": (float, 0.0, math.inf, False),
    "solver.n_steps": (int, 1, 10 ** 8, True),
    "noise.loss": (float, 0.0, 1.0, True),
    "noise.kappa_rad_per_mw": (float, 0.0, math.inf, False),
}
_TEXT = {"fiber.preset"}


@dataclass(frozen=True)
class RunConfig:
    fiber: FiberSpec
    pulse: PulseSpec
    coupler: CouplerSpec
    grid: TimeGrid
    n_steps: int
    budget: LossBudget
    noise_loss: float
    kappa: Optional[float] = None
    source: str = "<defaults>"

    def loop_config(self):
        from .sagnac import LoopConfig

        try:
            return LoopConfig(self.fiber, self.coupler, self.pulse, self.grid, self.n_steps)
        except InvalidParameterError as exc:
            raise ConfigError(str(exc)) from exc


def _convert(key, raw, lineno):
    if key in _TEXT:
        return raw.strip().lower()
    kind, lo, hi, lo_incl = _NUMERIC[key]
    try:
        value = kind(raw) if kind is float else int(raw, 0)
    except ValueError:
        raise ConfigError(f"line {lineno}: {key}: cannot parse {raw!r} as {kind.__name__}")
    if not math.isfinite(value):
        raise ConfigError(f"line {lineno}: {key} must be finite")
    below = value < lo if lo_incl else value <= lo
    if below or value > hi:
        bracket = "[" if lo_incl else "("
        raise ConfigError(f"line {lineno}: {key} = {raw} outside {bracket}{lo:g}, {hi:g}]")
    return value


def parse_config(text: str, source: str = "<string>") -> RunConfig:
    values = {}
    losses = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in line.split("=", 1))
        if not key or not raw:
            raise ConfigError(f"line {lineno}: empty key or value")
        if key in values or any("loss." + label == key for label, _ in losses):
            raise ConfigError(f"line {lineno}: duplicate key {key}")
        if key.startswith("loss.") and len(key) > 5:
            try:
                frac = float(raw)
            except ValueError:
                raise ConfigError(f"line {lineno}: {key}: cannot parse {raw!r} as float")
            if not 0.0 < frac <= 1.0:
                raise ConfigError(f"line {lineno}: {key} = {raw} outside (0, 1]")
            losses.append((key[5:], frac))
            continue
        if key not in _NUMERIC and key not in _TEXT:
            raise ConfigError(f"line {lineno}: unknown key {key}")
        values[key] = _convert(key, raw, lineno)
    return _build(values, losses, source)


def load_config(path: Optional[str]) -> RunConfig:
    if path is None:
        return parse_config("", "<defaults>")
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}")
    return parse_config(text, path)


def _get(values, key):
    return values.get(key, DEFAULTS.get(key))


def _build(values, losses, source):
    preset_name = _get(values, "fiber.preset")
    if preset_name not in FIBER_PRESETS and preset_name != "custom":
        raise ConfigError(
            f"fiber.preset: unknown preset {preset_name!r} (hb1500, ssmf, custom)")
    if preset_name == "custom":
        missing = [k for k in ("fiber.beta2_ps2_per_km", "fiber.gamma_per_w_km", "fiber.length_m")
                   if k not in values]
        if missing:
            raise ConfigError(f"fiber.preset = custom requires {', '.join(missing)}")
        base = FiberSpec(0.0, 0.0, 1.0)
    else:
        base = FIBER_PRESETS[preset_name]
    try:
        fiber = FiberSpec(
            beta2_ps2_per_km=values.get("fiber.beta2_ps2_per_km", base.beta2_ps2_per_km),
            gamma_per_w_km=values.get("fiber.gamma_per_w_km", base.gamma_per_w_km),
            length_m=values.get("fiber.length_m", base.length_m),
            name=preset_name,
        )
    except InvalidParameterError as exc:
        raise ConfigError(str(exc)) from exc

    energy = values.get("pulse.energy_pj")
    mean_power = values.get("pulse.mean_power_mw")
    if energy is None and mean_power is None:
        mean_power = DEFAULTS["pulse.mean_power_mw"]
    try:
        pulse = PulseSpec(
            t_fwhm_fs=_get(values, "pulse.fwhm_fs"),
            energy_pj=energy,
            wavelength_nm=_get(values, "pulse.wavelength_nm"),
            rep_rate_mhz=_get(values, "pulse.rep_rate_mhz"),
            mean_power_mw=mean_power,
        )
    except InvalidParameterError as exc:
        raise ConfigError(f"pulse: {exc}") from exc

    coupler = CouplerSpec(_get(values, "coupler.eta"))
    window = values.get("grid.window_ps")
    if window is None:
        from .sagnac import required_window_ps

        # widen the default window in steps of 16 ps until dispersive spreading fits
        need = required_window_ps(fiber, pulse.t_fwhm_fs)
        window = DEFAULTS["grid.window_ps"] * max(1, math.ceil(need / DEFAULTS["grid.window_ps"]))
    try:
        grid = TimeGrid(_get(values, "grid.n"), window)
    except InvalidParameterError as exc:
        raise ConfigError(str(exc)) from exc

    n_steps = values.get("solver.n_steps", default_steps(fiber))
    budget = LossBudget(tuple(losses)) if losses else DEFAULT_NOISE_BUDGET
    noise_loss = values.get("noise.loss", budget.loss)
    return RunConfig(fiber, pulse, coupler, grid, n_steps, budget, noise_loss,
                     values.get("noise.kappa_rad_per_mw"), source)
