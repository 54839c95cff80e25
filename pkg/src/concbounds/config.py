"""YAML scenario files and command-line state specs.

Scenario schema (unknown keys are rejected)::

    seed: 7                     # optional, falls back to $CONCBOUNDS_SEED
    noiseless: false            # exact expectations instead of counts
    workers: 1
    states:                     # exactly one of d / thickness_mm / explicit
      d: [0.932, 0.910]
      thickness_mm: [0, 2.985]
      calibration: {birefringence: 0.00871, center_wavelength_nm: 780, bandwidth_nm: 3}
      explicit:
        - {label: mixed, real: [[...4x4...]], imag: [[...]]}
    sim:
      mode_overlap: 1.0
      signal_strength: 3000
      class_weights: [1, 1, 1]
      mc_trials: 1000
      visibility_correction: false
    tomography: {shots: 10000}
    output: {csv: table1.csv, json: table1.json}
"""

from __future__ import annotations

import json
import os
from functools import partial
from pathlib import Path

import numpy as np
import yaml

from . import constants
from .coincidence import SimConfig
from .errors import ConfigError
from .qlinalg import DensityMatrix
from .report import ScenarioConfig
from .states import (
    CalibrationParams,
    bell_singlet,
    dephased_singlet,
    maximally_mixed,
    quartz_to_coherence,
    random_density,
    werner,
)

_SCHEMA = {
    "seed": None,
    "noiseless": None,
    "workers": None,
    "states": {"d": None, "thickness_mm": None, "calibration": None, "explicit": None},
    "sim": {
        "mode_overlap": None,
        "signal_strength": None,
        "class_weights": None,
        "mc_trials": None,
        "visibility_correction": None,
    },
    "tomography": {"shots": None},
    "output": {"csv": None, "json": None},
}
_CALIBRATION_KEYS = {"birefringence", "center_wavelength_nm", "bandwidth_nm"}


def default_seed() -> int:
    raw = os.environ.get(constants.SEED_ENV_VAR)
    if raw is None:
        return constants.DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"${constants.SEED_ENV_VAR}={raw!r} is not an integer") from None


def _key_lines(node, prefix="") -> dict[str, int]:
    """Map dotted key paths to 1-based source lines from a composed YAML node."""
    out = {}
    if isinstance(node, yaml.MappingNode):
        for k, v in node.value:
            path = f"{prefix}{k.value}"
            out[path] = k.start_mark.line + 1
            out.update(_key_lines(v, path + "."))
    return out


def _check_keys(doc: dict, schema: dict, lines: dict, source: str, prefix=""):
    if not isinstance(doc, dict):
        raise ConfigError(f"{source}: '{prefix.rstrip('.') or '<root>'}' must be a mapping")
    for k, v in doc.items():
        path = f"{prefix}{k}"
        if k not in schema:
            raise ConfigError(f"{source}: line {lines.get(path, '?')}: unknown key '{path}'")
        if isinstance(schema[k], dict):
            _check_keys(v, schema[k], lines, source, path + ".")


def _states(spec: dict, where) -> list:
    given = [k for k in ("d", "thickness_mm", "explicit") if k in spec]
    if len(given) != 1:
        raise ConfigError(f"{where('states')}: give exactly one of d, thickness_mm, explicit")
    kind = given[0]
    if kind == "d":
        out = []
        for d in spec["d"]:
            d = float(d)
            if not 0.0 <= d <= 1.0:
                raise ConfigError(f"{where('states.d')}: d={d} outside [0, 1]")
            out.append((f"{d:g}", partial(dephased_singlet, d)))
        return out
    if kind == "thickness_mm":
        cal_doc = spec.get("calibration", {}) or {}
        bad = set(cal_doc) - _CALIBRATION_KEYS
        if bad:
            raise ConfigError(f"{where('states.calibration')}: unknown key(s) {sorted(bad)}")
        try:
            cal = CalibrationParams(**{k: float(v) for k, v in cal_doc.items()})
        except ValueError as exc:
            raise ConfigError(f"{where('states.calibration')}: {exc}") from None
        out = []
        for t in spec["thickness_mm"]:
            t = float(t)
            if t < 0:
                raise ConfigError(f"{where('states.thickness_mm')}: negative thickness {t}")
            out.append((f"{t:g}", partial(dephased_singlet, quartz_to_coherence(t, cal))))
        return out
    out = []
    for i, item in enumerate(spec["explicit"]):
        try:
            m = np.asarray(item["real"], dtype=float) + 1j * np.asarray(item.get("imag", 0.0), dtype=float)
            rho = DensityMatrix(m, (2, 2))
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"{where('states.explicit')}: entry {i}: {exc}") from None
        out.append((str(item.get("label", i)), (lambda r=rho: r)))
    return out


def load_scenario(path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return parse_scenario(text, str(path))


def parse_scenario(text: str, source: str = "<config>") -> ScenarioConfig:
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"line {mark.line + 1}" if mark else "?"
        raise ConfigError(f"{source}: {where}: {getattr(exc, 'problem', exc)}") from None
    if doc is None:
        raise ConfigError(f"{source}: empty config")
    lines = _key_lines(node)

    def where(key):
        return f"{source}: line {lines.get(key, '?')}: '{key}'"

    _check_keys(doc, _SCHEMA, lines, source)
    if "states" not in doc:
        raise ConfigError(f"{source}: missing required section 'states'")
    states = _states(doc["states"], where)
    try:
        sim = SimConfig.from_dict(doc.get("sim", {}) or {})
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where('sim')}: {exc}") from None
    out = doc.get("output", {}) or {}
    try:
        return ScenarioConfig(
            states=states,
            sim=sim,
            tomo_shots=int((doc.get("tomography") or {}).get("shots", 10_000)),
            seed=int(doc["seed"]) if "seed" in doc else default_seed(),
            noiseless=bool(doc.get("noiseless", False)),
            workers=int(doc.get("workers", 1)),
            csv_path=out.get("csv"),
            json_path=out.get("json"),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{source}: {exc}") from None


def parse_state(spec: str) -> DensityMatrix:
    """Build a state from a short spec.

    ``singlet``, ``mixed``, ``werner:P``, ``dephased:D``, ``quartz:MM``,
    ``random:SEED[:RANK]`` or a path to a JSON file holding ``real`` and
    optional ``imag`` 4x4 arrays.
    """
    name, _, arg = spec.partition(":")
    try:
        if name == "singlet":
            return bell_singlet()
        if name == "mixed":
            return maximally_mixed(4)
        if name == "werner":
            return werner(float(arg))
        if name == "dephased":
            return dephased_singlet(float(arg))
        if name == "quartz":
            return dephased_singlet(quartz_to_coherence(float(arg)))
        if name == "random":
            seed, _, rank = arg.partition(":")
            return random_density(int(seed), int(rank or 4))
    except ValueError as exc:
        raise ConfigError(f"bad state spec {spec!r}: {exc}") from None
    p = Path(spec)
    if p.is_file():
        doc = json.loads(p.read_text())
        m = np.asarray(doc["real"], dtype=float) + 1j * np.asarray(doc.get("imag", 0.0), dtype=float)
        return DensityMatrix(m, (2, 2))
    raise ConfigError(f"unknown state spec {spec!r}")
