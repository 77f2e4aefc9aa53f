"""Curve definitions from JSON.

Schema::

    {"family": "figure1" | "figure2" | "circle" | "rose" | "fourier" | "samples",
     "params": {...},
     "period": T,
     "space_form": {"kind": "euclidean" | "kappa" | "halfplane", "kappa": k},
     "polarisation": "arc" | "neg_arc" | {"explicit_m": [values] or value},
     "run": {optional default command parameters}}
"""

import json
from pathlib import Path

import numpy as np

from . import curves
from .polarised import ARC_LENGTH, EXPLICIT, NEG_ARC_LENGTH, PolarisedCurve
from .space_forms import SpaceForm


class ConfigError(ValueError):
    """Malformed or inconsistent curve definition."""


DEFAULT_PERIODS = {"figure1": np.pi, "figure2": 2 * np.pi, "circle": 2 * np.pi}


def _family(name, params):
    try:
        if name == "figure1":
            return curves.figure1()
        if name == "figure2":
            return curves.figure2()
        if name == "circle":
            return curves.Circle(params.get("r", 1.0), params.get("center", (0.0, 0.0)))
        if name == "rose":
            return curves.Rose(params.get("a", 3.0), params.get("b", 1.0))
        if name == "fourier":
            return curves.Fourier(params["cos"], params["sin"], params.get("period", 2 * np.pi))
        if name == "samples":
            return curves.Samples(params["points"], params["period"])
    except KeyError as exc:
        raise ConfigError(f"family {name!r} needs parameter {exc.args[0]!r}") from None
    raise ConfigError(f"unknown curve family {name!r}")


def space_form_from(entry):
    entry = entry or {"kind": "euclidean"}
    kind = entry.get("kind", "euclidean")
    if kind == "euclidean":
        return SpaceForm.euclidean()
    if kind == "kappa":
        if "kappa" not in entry:
            raise ConfigError("space_form kind 'kappa' needs a 'kappa' value")
        return SpaceForm.curved(float(entry["kappa"]))
    if kind == "halfplane":
        return SpaceForm.halfplane()
    raise ConfigError(f"unknown space form kind {kind!r}")


def curve_from_dict(cfg):
    """Build a :class:`PolarisedCurve` from a parsed curve definition."""
    if not isinstance(cfg, dict) or "family" not in cfg:
        raise ConfigError("curve definition must be an object with a 'family' key")
    family = cfg["family"]
    params = dict(cfg.get("params") or {})
    if "period" in cfg:
        period = float(cfg["period"])
    elif family in DEFAULT_PERIODS:
        period = DEFAULT_PERIODS[family]
    elif family == "samples" and "period" in params:
        period = float(params["period"])
    else:
        raise ConfigError("curve definition needs a 'period'")
    if family == "fourier":
        params.setdefault("period", period)
    if family == "samples":
        params.setdefault("period", period)
    path = _family(family, params)
    pol = cfg.get("polarisation", ARC_LENGTH)
    m = None
    if isinstance(pol, dict):
        if "explicit_m" not in pol:
            raise ConfigError("explicit polarisation needs 'explicit_m'")
        m, pol = pol["explicit_m"], EXPLICIT
    elif pol not in (ARC_LENGTH, NEG_ARC_LENGTH):
        raise ConfigError(f"unknown polarisation {pol!r}")
    return PolarisedCurve(path, period, space_form_from(cfg.get("space_form")), pol, m)


def load(path):
    """Parse a JSON curve file; returns ``(curve, raw_dict)``."""
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    return curve_from_dict(raw), raw
