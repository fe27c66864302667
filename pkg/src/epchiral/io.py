"""
File formats: model and loop descriptions, canonical JSON and atomic writes.

Model files::

    {"model": "nh_dirac", "b_x": 1.0}
    {"model": "square_root", "z1": [0, -1], "z2": [0, 1]}

Loop files::

    {"kind": "circle", "center": [0, 0], "radius": 3, "orientation": "cw",
     "start_angle": 0, "samples": 4096}
    {"kind": "polyline", "points": [[x, y], ...]}
    {"kind": "arcs", "segments": [{"type": "line", "start": [x, y], "end": [x, y]},
                                   {"type": "arc", "center": [x, y], "radius": r,
                                    "start_angle": t, "sweep": s}]}
"""
from __future__ import annotations

import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from .loops import ArcSegment, LineSegment, Loop
from .spectra import NHDirac, SquareRoot, TwoBandModel


class ConfigError(ValueError):
    """Malformed or inconsistent input (CLI exit code 2)."""


def _point(v, what) -> complex:
    try:
        x, y = v
        z = complex(float(x), float(y))
    except (TypeError, ValueError):
        raise ConfigError(f"{what} must be a pair [x, y], got {v!r}") from None
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ConfigError(f"{what} must be finite")
    return z


def _number(spec, key, default=None) -> float:
    if key not in spec:
        if default is None:
            raise ConfigError(f"missing field {key!r}")
        return default
    try:
        v = float(spec[key])
    except (TypeError, ValueError):
        raise ConfigError(f"field {key!r} must be a number") from None
    if not math.isfinite(v):
        raise ConfigError(f"field {key!r} must be finite")
    return v


def model_from_spec(spec: dict) -> TwoBandModel:
    if not isinstance(spec, dict):
        raise ConfigError("a model description must be a JSON object")
    kind = spec.get("model")
    if kind == "nh_dirac":
        return NHDirac(_number(spec, "b_x", 1.0))
    if kind == "square_root":
        z1 = _point(spec.get("z1", [0, -1]), "z1")
        z2 = _point(spec.get("z2", [0, 1]), "z2")
        if z1 == z2:
            raise ConfigError("z1 and z2 must differ")
        return SquareRoot(z1, z2)
    raise ConfigError(f"unknown model {kind!r}; expected 'nh_dirac' or 'square_root'")


def loop_from_spec(spec: dict) -> Loop:
    if not isinstance(spec, dict):
        raise ConfigError("a loop description must be a JSON object")
    samples = int(_number(spec, "samples", 4096))
    if samples < 64:
        raise ConfigError("samples must be at least 64")
    kind = spec.get("kind")
    try:
        if kind == "circle":
            return Loop.circle(_point(spec.get("center", [0, 0]), "center"),
                               _number(spec, "radius"), spec.get("orientation", "cw"),
                               _number(spec, "start_angle", 0.0), samples=samples)
        if kind == "polyline":
            pts = [_point(p, "polyline point") for p in spec.get("points", [])]
            return Loop.polyline(pts, samples=samples)
        if kind == "arcs":
            segs = []
            for s in spec.get("segments", []):
                if s.get("type") == "line":
                    segs.append(LineSegment(_point(s.get("start"), "start"), _point(s.get("end"), "end")))
                elif s.get("type") == "arc":
                    segs.append(ArcSegment(_point(s.get("center"), "center"), _number(s, "radius"),
                                           _number(s, "start_angle"), _number(s, "sweep")))
                else:
                    raise ConfigError(f"unknown segment type {s.get('type')!r}")
            return Loop(segs, samples=samples)
    except ConfigError:
        raise
    except (ValueError, TypeError, AttributeError) as exc:
        raise ConfigError(f"invalid loop: {exc}") from None
    raise ConfigError(f"unknown loop kind {kind!r}; expected 'circle', 'polyline' or 'arcs'")


def read_json(path_or_text) -> dict:
    """Load JSON from a file path, or from inline text starting with ``{``."""
    text = str(path_or_text)
    try:
        if text.lstrip().startswith("{"):
            return json.loads(text)
        return json.loads(Path(text).read_text())
    except FileNotFoundError:
        raise ConfigError(f"file not found: {text}") from None
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read {text}: {exc}") from None


def _canon(obj):
    if isinstance(obj, dict):
        return {str(k): _canon(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_canon(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
        x = float(f"{x:.12g}")
        return 0.0 if x == 0 else x
    if isinstance(obj, complex):
        return [_canon(obj.real), _canon(obj.imag)]
    return obj


def canonical_json(obj) -> str:
    """Sorted keys, floats rounded to 12 significant digits, trailing newline."""
    return json.dumps(_canon(obj), sort_keys=True, indent=2) + "\n"


def write_atomic(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path
