from __future__ import annotations

import os
from pathlib import Path


def harmonic_home() -> Path:
    env = os.environ.get("HARMONIC_HOME")
    if env:
        return Path(env).expanduser()
    return Path.home() / ".harmonic"


def config_path() -> Path:
    return harmonic_home() / "config.json"
