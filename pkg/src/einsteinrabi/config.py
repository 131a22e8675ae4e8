"""Run configuration: JSON schema, unit conversion and scenario assembly.

Every frequency-like quantity in a config is an object ``{"value": x,
"unit": "hz" | "rad_s"}``; ``hz`` values are multiplied by 2 pi once, here,
and everything downstream works in rad/s.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import jsonschema

from . import constants as const
from .coupling import (
    CavityGeometry,
    CouplingSolution,
    Scenario,
    TwoLevelSystem,
    blackbody_coupling,
    free_space_a0,
    lossy_fixed_point,
    net_quality_factor,
    renorm_coherent,
    renorm_lossy,
    solve_cavity_coupled,
)
from .errors import ConfigError
from .photons import PhotonField, mean_photon_number
from .transition import CavityMode, TransitionModel

_FREQUENCY = {
    "type": "object",
    "properties": {
        "value": {"type": "number"},
        "unit": {"enum": ["hz", "rad_s"]},
    },
    "required": ["value", "unit"],
    "additionalProperties": False,
}

_POSITIVE = {"type": "number", "exclusiveMinimum": 0}
_NONNEG = {"type": "number", "minimum": 0}

_BOUNDS_PLAIN = {
    "type": "array",
    "items": {"type": "number"},
    "minItems": 2,
    "maxItems": 2,
}
_BOUNDS_FREQ = {
    "type": "object",
    "properties": {"lo": {"type": "number"}, "hi": {"type": "number"}, "unit": {"enum": ["hz", "rad_s"]}},
    "required": ["lo", "hi", "unit"],
    "additionalProperties": False,
}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "description": {"type": "string"},
        "system": {
            "type": "object",
            "properties": {
                "omega0": _FREQUENCY,
                "wavelength": {
                    "type": "object",
                    "properties": {"value": _POSITIVE, "unit": {"enum": ["m", "nm"]}},
                    "required": ["value", "unit"],
                    "additionalProperties": False,
                },
                "dipole": {
                    "oneOf": [
                        {
                            "type": "object",
                            "properties": {"a0e": _POSITIVE},
                            "required": ["a0e"],
                            "additionalProperties": False,
                        },
                        {
                            "type": "object",
                            "properties": {"value": _POSITIVE, "unit": {"const": "C_m"}},
                            "required": ["value", "unit"],
                            "additionalProperties": False,
                        },
                    ]
                },
            },
            "required": ["dipole"],
            "oneOf": [{"required": ["omega0"]}, {"required": ["wavelength"]}],
            "additionalProperties": False,
        },
        "field": {
            "oneOf": [
                {
                    "type": "object",
                    "properties": {"type": {"const": "thermal"}, "temperature": _NONNEG},
                    "required": ["type", "temperature"],
                    "additionalProperties": False,
                },
                {
                    "type": "object",
                    "properties": {"type": {"const": "coherent"}, "nbar": _NONNEG},
                    "required": ["type", "nbar"],
                    "additionalProperties": False,
                },
            ]
        },
        "cavity": {
            "type": "object",
            "properties": {
                "mode": {"enum": ["ideal", "lossy"]},
                "Q": _POSITIVE,
                "radius": _POSITIVE,
                "separation": _POSITIVE,
                "q_net": _POSITIVE,
                "a0": _FREQUENCY,
                "renorm": {"enum": ["mean", "exact"]},
                "calibration": {
                    "type": "object",
                    "properties": {"omega_rabi": _FREQUENCY, "nbar": _NONNEG},
                    "required": ["omega_rabi"],
                    "additionalProperties": False,
                },
            },
            "required": ["mode"],
            "additionalProperties": False,
        },
        "grid": {
            "type": "object",
            "properties": {
                "t_max": _NONNEG,
                "points": {"type": "integer", "minimum": 1},
                "t_unit": {"enum": ["s", "rabi"]},
            },
            "required": ["t_max", "points"],
            "additionalProperties": False,
        },
        "rabi": {
            "type": "object",
            "properties": {
                "evaluator": {"enum": ["full", "low_nbar"]},
                "method": {"enum": ["auto", "time", "frequency"]},
            },
            "additionalProperties": False,
        },
        "coefficients": {
            "type": "object",
            "properties": {"normalize": {"type": "boolean"}},
            "additionalProperties": False,
        },
        "dynamics": {
            "type": "object",
            "properties": {
                "init": {"enum": ["excited", "ground", "thermal-average"]},
                "rates": {
                    "type": "object",
                    "properties": {
                        "a0_over_omega_rabi": _NONNEG,
                        "r0_over_omega_rabi": _NONNEG,
                    },
                    "required": ["a0_over_omega_rabi", "r0_over_omega_rabi"],
                    "additionalProperties": False,
                },
            },
            "additionalProperties": False,
        },
        "fit": {
            "type": "object",
            "properties": {
                "vary": {
                    "type": "array",
                    "items": {"enum": ["omega_rabi", "q_factor", "nbar", "amplitude", "offset"]},
                    "minItems": 1,
                    "uniqueItems": True,
                },
                "bounds": {
                    "type": "object",
                    "properties": {
                        "omega_rabi": _BOUNDS_FREQ,
                        "q_factor": _BOUNDS_PLAIN,
                        "nbar": _BOUNDS_PLAIN,
                        "amplitude": _BOUNDS_PLAIN,
                        "offset": _BOUNDS_PLAIN,
                    },
                    "additionalProperties": False,
                },
                "initial": {
                    "type": "object",
                    "properties": {
                        "omega_rabi": _FREQUENCY,
                        "q_factor": _POSITIVE,
                        "nbar": _NONNEG,
                        "amplitude": {"type": "number"},
                        "offset": {"type": "number"},
                    },
                    "additionalProperties": False,
                },
                "restarts": {"type": "integer", "minimum": 1},
                "budget": {"type": "integer", "minimum": 1},
            },
            "required": ["vary", "bounds"],
            "additionalProperties": False,
        },
    },
    "required": ["system", "field"],
    "additionalProperties": False,
}

_VALIDATOR = jsonschema.Draft202012Validator(SCHEMA)


def frequency(spec: dict) -> float:
    """Convert a unit-tagged frequency object to rad/s."""
    value = float(spec["value"])
    return const.hz_to_rad_s(value) if spec["unit"] == "hz" else value


def validate(raw: dict) -> None:
    errors = sorted(_VALIDATOR.iter_errors(raw), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        where = ".".join(str(p) for p in err.absolute_path) or "<root>"
        raise ConfigError(f"config error at {where}: {err.message}")


def load_config(path: str | Path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    validate(raw)
    return raw


@dataclass(frozen=True)
class RunSetup:
    """Everything the subcommands need, resolved to SI units and rad/s."""

    raw: dict
    system: TwoLevelSystem
    field: PhotonField
    coupling: CouplingSolution
    model: TransitionModel
    geometry: CavityGeometry | None
    renorm: str | None

    @property
    def nbar(self) -> float:
        return mean_photon_number(self.field)

    @property
    def is_lossy(self) -> bool:
        return self.model.cavity_mode is CavityMode.LOSSY

    def times(self):
        """Output time grid in seconds."""
        from .timeseries import time_grid

        grid = self.raw.get("grid")
        if grid is None:
            raise ConfigError("config error at grid: this command needs a time grid")
        t = time_grid(float(grid["t_max"]), int(grid["points"]))
        if grid.get("t_unit", "s") == "rabi":
            t = t / self.coupling.omega_rabi
        return t


def _system(raw: dict) -> TwoLevelSystem:
    sys_cfg = raw["system"]
    if "omega0" in sys_cfg:
        omega0 = frequency(sys_cfg["omega0"])
    else:
        wl = sys_cfg["wavelength"]
        metres = wl["value"] * (1e-9 if wl["unit"] == "nm" else 1.0)
        omega0 = const.omega_from_wavelength(metres)
    dip = sys_cfg["dipole"]
    d21 = const.dipole_from_a0e(dip["a0e"]) if "a0e" in dip else float(dip["value"])
    if not omega0 > 0:
        raise ConfigError("config error at system.omega0: must be positive")
    return TwoLevelSystem(omega0, d21)


def _field(raw: dict, omega0: float) -> PhotonField:
    f = raw["field"]
    if f["type"] == "thermal":
        return PhotonField.thermal(omega0, float(f["temperature"]))
    return PhotonField.coherent(omega0, float(f["nbar"]))


def _geometry(cav: dict) -> CavityGeometry | None:
    keys = ("Q", "radius", "separation")
    present = [k for k in keys if k in cav]
    if not present:
        return None
    if len(present) != len(keys):
        missing = sorted(set(keys) - set(present))
        raise ConfigError(f"config error at cavity: geometry also needs {missing}")
    return CavityGeometry(float(cav["Q"]), float(cav["radius"]), float(cav["separation"]))


def _lossy_coupling(system, field, cav, geometry, nbar):
    omega0 = system.omega0
    if "calibration" in cav:
        if geometry is None:
            raise ConfigError("config error at cavity.calibration: needs Q, radius and separation")
        cal = cav["calibration"]
        cal_nbar = float(cal.get("nbar", nbar))
        solved = solve_cavity_coupled(frequency(cal["omega_rabi"]), cal_nbar, geometry, omega0)
        a0, q_net = solved.a0_coefficient, solved.q_net
    else:
        a0 = frequency(cav["a0"]) if "a0" in cav else free_space_a0(system)
        if "q_net" in cav:
            q_net = float(cav["q_net"])
        elif geometry is not None:
            q_net = net_quality_factor(geometry, a0, omega0)
        else:
            raise ConfigError("config error at cavity: lossy mode needs q_net or Q/radius/separation")
    renorm = cav.get("renorm", "mean" if field.is_thermal else "exact")
    if not field.is_thermal:
        return renorm_coherent(a0, nbar, q_net, omega0, method=renorm), renorm
    if renorm == "mean":
        return lossy_fixed_point(a0, nbar, q_net, omega0), renorm
    g = renorm_lossy(a0, field, q_net, omega0)
    mean = lossy_fixed_point(a0, nbar, q_net, omega0)
    return (
        CouplingSolution(
            g_prime=g,
            omega_rabi=2.0 * g * math.sqrt(nbar + 1.0),
            a0_coefficient=a0,
            b0_coefficient=mean.b0_coefficient,
            scenario=Scenario.LOSSY_THERMAL,
            nbar=nbar,
            omega0=omega0,
            q_net=q_net,
        ),
        renorm,
    )


def build_setup(raw: dict) -> RunSetup:
    """Turn a validated config into the coupling and transition model it describes."""
    validate(raw)
    system = _system(raw)
    field = _field(raw, system.omega0)
    nbar = mean_photon_number(field)
    cav = raw.get("cavity", {"mode": "ideal"})
    geometry = _geometry(cav)
    if cav["mode"] == "lossy":
        coupling, renorm = _lossy_coupling(system, field, cav, geometry, nbar)
        mode = CavityMode.LOSSY
    else:
        if not field.is_thermal:
            raise ConfigError("config error at field: a coherent field needs a lossy cavity")
        a0 = frequency(cav["a0"]) if "a0" in cav else free_space_a0(system)
        coupling = blackbody_coupling(a0, nbar, system.omega0)
        renorm, mode = None, CavityMode.IDEAL
    model = TransitionModel(system, field, coupling, mode)
    return RunSetup(raw, system, field, coupling, model, geometry, renorm)
