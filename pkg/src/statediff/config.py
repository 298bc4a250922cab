"""Experiment configuration: INI files with strict schemas, plus the
plain-text field grammar.

Field grammar (1D): either a single expression over the whole domain or
``pw(x: b1, b2, ... | expr_0 | expr_1 | ...)`` with sorted interior
breakpoints and one expression per piece.  Expressions may be polynomials
in x, ``exp(<quadratic>)``, or ``c*(<polynomial>)**p`` (so ``sqrt`` works);
they are parsed symbolically and mapped onto the closed-form piece types.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass

import numpy as np
import sympy as sp

from .errors import ConfigError
from .fields import Box, Const, ExpQuad1, Poly1, PolyPower1, ScalarField

_X = sp.Symbol("x")
_LOCALS = {"x": _X, "exp": sp.exp, "sqrt": sp.sqrt, "pi": sp.pi, "E": sp.E}


def _poly_coeffs(e):
    poly = sp.Poly(sp.expand(e), _X)
    coeffs = [float(c) for c in reversed(poly.all_coeffs())]
    return np.array(coeffs)


def parse_expression(text):
    """One closed-form piece from text (polynomial, exp-quadratic, power)."""
    try:
        e = sp.sympify(text, locals=_LOCALS)
    except (sp.SympifyError, SyntaxError, TypeError) as exc:
        raise ConfigError(f"cannot parse expression {text!r}: {exc}") from None
    if e.free_symbols - {_X}:
        raise ConfigError(f"expression {text!r} may only use the symbol x")
    if e.is_polynomial(_X):
        coeffs = _poly_coeffs(e)
        if coeffs.size == 1:
            return Const(coeffs[0])
        return Poly1(coeffs)
    scale, rest = e.as_coeff_Mul()
    if isinstance(rest, sp.exp):
        arg = rest.args[0]
        if not arg.is_polynomial(_X):
            raise ConfigError(f"exp argument in {text!r} must be polynomial")
        q = _poly_coeffs(arg)
        if q.size > 3:
            raise ConfigError(f"exp argument in {text!r} must be quadratic")
        return ExpQuad1(q, scale=float(scale))
    if isinstance(rest, sp.Pow):
        base, power = rest.args
        if not (base.is_polynomial(_X) and power.is_number):
            raise ConfigError(f"power in {text!r} must be poly**number")
        return PolyPower1(_poly_coeffs(base), float(power), scale=float(scale))
    raise ConfigError(
        f"expression {text!r} is not a polynomial, exp(quadratic), or poly**p")


def parse_field_1d(text, box):
    """A 1D ScalarField from the config grammar."""
    text = text.strip()
    if text.startswith("pw(") and text.endswith(")"):
        inner = text[3:-1]
        axis, sep, rest = inner.partition(":")
        if axis.strip() != "x" or not sep:
            raise ConfigError(f"piecewise field must start with 'pw(x:': {text!r}")
        parts = [p.strip() for p in rest.split("|")]
        if len(parts) < 2:
            raise ConfigError(f"piecewise field needs breaks and pieces: {text!r}")
        try:
            breaks = [float(v) for v in parts[0].split(",") if v.strip()]
        except ValueError as exc:
            raise ConfigError(f"bad breakpoints in {text!r}: {exc}") from None
        pieces = [parse_expression(p) for p in parts[1:]]
        if len(pieces) != len(breaks) + 1:
            raise ConfigError(
                f"{text!r}: {len(breaks)} breaks need {len(breaks) + 1} pieces")
        return ScalarField.from_pieces_1d(box, breaks, pieces)
    return ScalarField.from_pieces_1d(box, [], [parse_expression(text)])


def field_to_text(field):
    """Inverse of parse_field_1d for manifests and replay."""
    if field.dim != 1:
        raise ConfigError("only 1D fields serialize to config text")
    if field.breaks[0].size == 0:
        return field.pieces[0].to_text()
    breaks = ", ".join(repr(float(b)) for b in field.breaks[0])
    pieces = " | ".join(p.to_text() for p in field.pieces)
    return f"pw(x: {breaks} | {pieces})"


# ----------------------------------------------------------------------------
# experiment schemas
# ----------------------------------------------------------------------------

_COMMON = {"experiment": {"name": str, "seed": int, "out_dir": str}}

SCHEMAS = {
    "occupation": {
        **_COMMON,
        "occupation": {
            "box": str, "r1": float, "phi1": float, "r2": float, "phi2": float,
            "total_time": float, "batches": int, "sample_interval": float,
            "max_sweeps": int,
        },
    },
    "fcurve": {
        **_COMMON,
        "fcurve": {"phis": str, "r_ref": float, "ensemble": int,
                   "horizon": float, "cell_side": float,
                   "lag_lo": float, "lag_hi": float, "max_sweeps": int},
    },
    "estimate-d": {
        **_COMMON,
        "destimate": {"r": float, "phi": float, "ensemble": int,
                      "horizon": float, "cell_side": float,
                      "lag_lo": float, "lag_hi": float, "max_sweeps": int},
    },
    "maem": {
        **_COMMON,
        "model": {"domain": str, "d": str, "rho_eq": str},
        "maem": {"h": float, "n_steps": int, "n_chains": int, "scheme": str,
                 "bins": int, "trajectory_steps": int, "trajectory_stride": int},
    },
    "em-box": {
        **_COMMON,
        "embox": {"box": str, "d_left": float, "d_right": float, "h": float,
                  "n_steps": int, "n_chains": int},
    },
    "fp": {
        **_COMMON,
        "model": {"domain": str, "d": str, "rho_eq": str},
        "fp": {"cells": int, "dt": float, "t_end": float, "theta": float,
               "rho0": str},
    },
    "gen-field": {
        **_COMMON,
        "genfield": {"box": str, "mode": str, "r": float, "phi": float,
                     "r1": float, "phi1": float, "r2": float, "phi2": float,
                     "max_sweeps": int},
    },
}

_REQUIRED = {
    "occupation": [("occupation", k) for k in ("r1", "phi1", "r2", "phi2", "total_time")],
    "fcurve": [("fcurve", "phis")],
    "estimate-d": [("destimate", "r"), ("destimate", "phi")],
    "maem": [("model", "d"), ("model", "rho_eq"), ("model", "domain"),
             ("maem", "h"), ("maem", "n_steps")],
    "em-box": [("embox", k) for k in ("d_left", "d_right", "h", "n_steps")],
    "fp": [("model", "d"), ("model", "rho_eq"), ("model", "domain"),
           ("fp", "t_end")],
    "gen-field": [("genfield", "box"), ("genfield", "mode")],
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated, typed view of one experiment's INI file."""

    experiment: str
    seed: int
    out_dir: str
    sections: dict

    def get(self, section, key, default=None):
        return self.sections.get(section, {}).get(key, default)


def load_config(path, experiment):
    """Parse and validate an INI config against the experiment's schema.

    Unknown sections or keys are rejected; required keys must be present.
    """
    if experiment not in SCHEMAS:
        raise ConfigError(f"unknown experiment {experiment!r}")
    schema = SCHEMAS[experiment]
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    read = cp.read(path)
    if not read:
        raise ConfigError(f"config file {path!r} not found or unreadable")
    sections = {}
    for sec in cp.sections():
        if sec not in schema:
            raise ConfigError(f"unknown section [{sec}] for {experiment}")
        sections[sec] = {}
        for key, raw in cp[sec].items():
            if key not in schema[sec]:
                raise ConfigError(f"unknown key {key!r} in section [{sec}]")
            typ = schema[sec][key]
            try:
                if typ is int:
                    val = int(float(raw))
                elif typ is float:
                    val = float(raw)
                else:
                    val = raw.strip()
            except ValueError:
                raise ConfigError(f"key {sec}.{key}={raw!r} is not a {typ.__name__}") from None
            sections[sec][key] = val
    for sec, key in _REQUIRED[experiment]:
        if key not in sections.get(sec, {}):
            raise ConfigError(f"missing required key {sec}.{key} for {experiment}")
    name = sections.get("experiment", {}).get("name", experiment)
    if name != experiment:
        raise ConfigError(f"config names experiment {name!r}, command is {experiment!r}")
    seed = sections.get("experiment", {}).get("seed", 0)
    out_dir = sections.get("experiment", {}).get("out_dir", "")
    return ExperimentConfig(experiment, seed, out_dir, sections)


def parse_box_numbers(text, n):
    vals = [float(v) for v in text.replace(",", " ").split()]
    if len(vals) != n:
        raise ConfigError(f"expected {n} numbers, got {text!r}")
    return vals


def model_from_sections(cfg):
    """Build the 1D DiffusionModel named by [model] in a config."""
    from .model import DiffusionModel

    dom = parse_box_numbers(cfg.get("model", "domain", "-1 1"), 2)
    box = Box.interval(dom[0], dom[1])
    d = parse_field_1d(cfg.get("model", "d", "1"), box)
    rho = parse_field_1d(cfg.get("model", "rho_eq", "1"), box)
    return DiffusionModel(box, d, rho)
