from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional

from harmonic_cli.paths import config_path
from harmonic_core.circle_gon import CIRCLE_TOL, VERIFY_TOL
from harmonic_core.tangents import TANGENT_TOL

CONFIG_VERSION = "2026-10-harmonic-config-v1"

DEFAULT_CELLS = 512
ANGLE_RANGES = ("0-2pi", "pi")
DEFAULT_ANGLE_RANGE = "0-2pi"


def normalize_angle_range(value: str) -> str:
    v = value.strip().lower()
    if v in ("0-2pi", "0..2pi", "positive"):
        return "0-2pi"
    if v in ("pi", "-pi-pi", "signed"):
        return "pi"
    raise ValueError(f"angle range must be one of {', '.join(ANGLE_RANGES)}")


def _positive_float(d: Dict[str, Any], key: str, default: float) -> float:
    try:
        v = float(d.get(key, default))
    except Exception:
        return default
    return v if v > 0.0 else default


@dataclass
class HarmonicConfig:
    version: str
    verify_tol: float
    circle_tol: float
    tangent_tol: float
    cells: int
    angle_range: str

    @staticmethod
    def default() -> "HarmonicConfig":
        return HarmonicConfig(
            version=CONFIG_VERSION,
            verify_tol=VERIFY_TOL,
            circle_tol=CIRCLE_TOL,
            tangent_tol=TANGENT_TOL,
            cells=DEFAULT_CELLS,
            angle_range=DEFAULT_ANGLE_RANGE,
        )

    @staticmethod
    def from_dict(d: Dict[str, Any]) -> "HarmonicConfig":
        try:
            cells = int(d.get("cells", DEFAULT_CELLS))
        except Exception:
            cells = DEFAULT_CELLS
        if cells < 8:
            cells = DEFAULT_CELLS
        try:
            angle_range = normalize_angle_range(str(d.get("angle_range", DEFAULT_ANGLE_RANGE)))
        except Exception:
            angle_range = DEFAULT_ANGLE_RANGE
        return HarmonicConfig(
            version=str(d.get("version", "")) or CONFIG_VERSION,
            verify_tol=_positive_float(d, "verify_tol", VERIFY_TOL),
            circle_tol=_positive_float(d, "circle_tol", CIRCLE_TOL),
            tangent_tol=_positive_float(d, "tangent_tol", TANGENT_TOL),
            cells=cells,
            angle_range=angle_range,
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "version": self.version,
            "verify_tol": float(self.verify_tol),
            "circle_tol": float(self.circle_tol),
            "tangent_tol": float(self.tangent_tol),
            "cells": int(self.cells),
            "angle_range": self.angle_range,
        }


def load_config(path: Optional[Path] = None) -> HarmonicConfig:
    p = path or config_path()
    if not p.exists():
        return HarmonicConfig.default()
    try:
        with p.open("r", encoding="utf-8") as f:
            data = json.load(f)
        if not isinstance(data, dict):
            return HarmonicConfig.default()
        return HarmonicConfig.from_dict(data)
    except Exception:
        return HarmonicConfig.default()


def save_config(cfg: HarmonicConfig, path: Optional[Path] = None) -> None:
    p = path or config_path()
    p.parent.mkdir(parents=True, exist_ok=True)
    tmp = p.with_suffix(p.suffix + ".tmp")
    with tmp.open("w", encoding="utf-8") as f:
        json.dump(cfg.to_dict(), f, indent=2, sort_keys=True)
        f.write("\n")
    tmp.replace(p)
