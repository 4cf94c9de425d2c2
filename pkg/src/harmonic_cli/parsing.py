from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from harmonic_core.errors import DomainError
from harmonic_core.polynomial import RootMultiset
from harmonic_core.rng import XorShift64Star, random_circle_angles

# Options that take several values in one go: `--roots-angles 0 1.5 3`.
VARIADIC_OPTIONS = ("--roots-angles",)

_PI_EXPR = re.compile(r"^([+-]?(?:\d+(?:\.\d*)?|\.\d+)?)\s*\*?\s*pi(?:\s*/\s*(\d+(?:\.\d*)?))?$")
_DEGREE_MARK = re.compile(r"(°|deg(rees?)?|d)$", re.IGNORECASE)


def _looks_like_value(token: str) -> bool:
    if not token.startswith("-") or token == "-":
        return True
    rest = token[1:]
    return bool(rest) and (rest[0].isdigit() or rest[0] == "." or rest.lower().startswith("pi"))


def expand_argv(argv: Sequence[str]) -> List[str]:
    """Rewrite `--roots-angles a b c` into `--roots-angles a --roots-angles b ...`.

    Values run until the next token that looks like an option (negative numbers
    and `-pi/2` style values are values).
    """
    out: List[str] = []
    i = 0
    args = list(argv)
    while i < len(args):
        tok = args[i]
        if tok == "--":
            out.extend(args[i:])
            break
        if tok in VARIADIC_OPTIONS:
            i += 1
            values = []
            while i < len(args) and _looks_like_value(args[i]):
                values.append(args[i])
                i += 1
            if not values:
                out.append(tok)
            for v in values:
                out.extend([tok, v])
            continue
        out.append(tok)
        i += 1
    return out


def parse_radians(value: str) -> float:
    """Parse an angle in radians: a decimal, or a multiple of pi such as `pi/2`, `-3pi/4`, `2*pi`.

    Degree-marked values are rejected rather than converted.
    """
    s = str(value).strip()
    if not s:
        raise DomainError("empty angle")
    if _DEGREE_MARK.search(s):
        raise DomainError(f"angle {value!r} looks like degrees; angles are given in radians only")
    m = _PI_EXPR.match(s.lower())
    if m:
        coef_s, div_s = m.group(1), m.group(2)
        if coef_s in ("", "+"):
            coef = 1.0
        elif coef_s == "-":
            coef = -1.0
        else:
            coef = float(coef_s)
        div = float(div_s) if div_s else 1.0
        if div == 0.0:
            raise DomainError(f"division by zero in angle {value!r}")
        return coef * math.pi / div
    try:
        v = float(s)
    except ValueError as e:
        raise DomainError(f"invalid angle {value!r} (expected radians, e.g. 1.5708 or pi/2)") from e
    if not math.isfinite(v):
        raise DomainError(f"angle must be finite, got {value!r}")
    return v


def load_roots_file(path: Path) -> RootMultiset:
    """Read `{"roots": [[re, im], ...], "multiplicities": [m1, ...]}` (multiplicities optional)."""
    try:
        with Path(path).open("r", encoding="utf-8") as f:
            data = json.load(f)
    except OSError as e:
        raise DomainError(f"failed to read roots file {str(path)!r}: {e}") from e
    except json.JSONDecodeError as e:
        raise DomainError(f"invalid JSON in roots file {str(path)!r}: {e}") from e
    if not isinstance(data, dict) or not isinstance(data.get("roots"), list):
        raise DomainError('roots file must be an object with a "roots" list of [re, im] pairs')
    mults = data.get("multiplicities")
    if mults is not None and not isinstance(mults, list):
        raise DomainError('"multiplicities" must be a list of integers')
    return RootMultiset.from_roots(data["roots"], mults)


@dataclass(frozen=True)
class InstanceSpec:
    roots: RootMultiset
    theta: float
    source: str  # "file" | "angles" | "random"
    seed: Optional[int] = None


def resolve_instance(
    *,
    roots_file: Optional[Path],
    roots_angles: Optional[Sequence[str]],
    random_n: Optional[int],
    seed: Optional[int],
    theta: Optional[str],
) -> InstanceSpec:
    sources = [roots_file is not None, bool(roots_angles), random_n is not None]
    if sum(sources) != 1:
        raise DomainError("specify exactly one of --roots FILE, --roots-angles A1 A2 ..., or --random N --seed S")
    th = parse_radians(theta) if theta is not None else 0.0

    if roots_file is not None:
        return InstanceSpec(roots=load_roots_file(roots_file), theta=th, source="file")
    if roots_angles:
        angles = [parse_radians(a) for a in roots_angles]
        return InstanceSpec(roots=RootMultiset.from_angles(angles), theta=th, source="angles")

    assert random_n is not None
    if random_n < 1:
        raise DomainError(f"--random expects n >= 1, got {random_n}")
    if seed is None:
        raise DomainError("--random needs --seed so the instance is reproducible")
    rng = XorShift64Star(seed)
    return InstanceSpec(
        roots=RootMultiset.from_angles(random_circle_angles(rng, random_n)),
        theta=th,
        source="random",
        seed=seed,
    )


def batch_instances(seed: int, count: int) -> List[Tuple[List[float], float]]:
    """`count` instances (root angles, theta) from one generator: n in 1..10, theta uniform in [0, pi)."""
    rng = XorShift64Star(seed)
    out: List[Tuple[List[float], float]] = []
    for _ in range(count):
        n = rng.randint(1, 10)
        angles = random_circle_angles(rng, n)
        out.append((angles, rng.uniform(0.0, math.pi)))
    return out
