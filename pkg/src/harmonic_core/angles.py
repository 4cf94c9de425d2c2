"""Angle arithmetic on R/2piZ and R/piZ.

Angles are plain radians. The canonical representative of an angle modulo
`modulus` lies in [0, modulus); `modulus` is either 2*pi (arguments of complex
numbers) or pi (directions of lines, curve parameters theta).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from harmonic_core.errors import DomainError

TWO_PI = 2.0 * math.pi
PI = math.pi
HALF_PI = 0.5 * math.pi

SUPPORTED_MODULI = (TWO_PI, PI)

# |sin((nu - psi) / 2)| below this means e^{i nu} and e^{i psi} coincide.
COINCIDENT_SIN_EPS = 1e-15


def _check_modulus(modulus: float) -> float:
    m = float(modulus)
    if m not in SUPPORTED_MODULI:
        raise DomainError(f"unsupported angle modulus {modulus!r} (expected 2*pi or pi)")
    return m


def _canonical(x: float, modulus: float) -> float:
    r = math.fmod(x, modulus)
    if r < 0.0:
        r += modulus
    # r + modulus can round up to modulus itself.
    if r >= modulus:
        r = 0.0
    return r


@dataclass(frozen=True)
class Angle:
    """An angle modulo `modulus`, stored by its representative in [0, modulus)."""

    value: float
    modulus: float = TWO_PI

    def __post_init__(self) -> None:
        m = _check_modulus(self.modulus)
        v = float(self.value)
        if not math.isfinite(v):
            raise DomainError(f"angle must be finite, got {self.value!r}")
        object.__setattr__(self, "modulus", m)
        object.__setattr__(self, "value", _canonical(v, m))

    def __float__(self) -> float:
        return self.value

    def signed(self) -> float:
        """Representative in (-modulus/2, modulus/2]."""
        half = 0.5 * self.modulus
        return self.value - self.modulus if self.value > half else self.value

    def distance(self, other: Union["Angle", float]) -> float:
        return circular_distance(self.value, float(other), self.modulus)


AngleLike = Union[Angle, float, int]


def as_radians(x: AngleLike) -> float:
    v = float(x)
    if not math.isfinite(v):
        raise DomainError(f"angle must be finite, got {x!r}")
    return v


def normalize_angle(x: AngleLike, modulus: float = TWO_PI) -> Angle:
    """Canonical representative of x in [0, modulus). Idempotent."""
    return Angle(as_radians(x), modulus)


def circular_distance(a: float, b: float, modulus: float = TWO_PI) -> float:
    """Distance between a and b on R/modulusZ, in [0, modulus/2]."""
    d = _canonical(float(a) - float(b), _check_modulus(modulus))
    return min(d, modulus - d)


def arg(z: complex) -> float:
    """Arg(z) in [0, 2*pi). Arg(0) is undefined."""
    if z == 0:
        raise DomainError("argument of 0 is undefined")
    return _canonical(math.atan2(z.imag, z.real), TWO_PI)


def to_signed(x: float) -> float:
    """Map a mod-2*pi angle to (-pi, pi]."""
    v = _canonical(float(x), TWO_PI)
    return v - TWO_PI if v > PI else v


def arg_diff_unit(nu: float, psi: float) -> Angle:
    """Arg(e^{i nu} - e^{i psi}) from the closed form of the difference.

    e^{i nu} - e^{i psi} = 2i sin((nu - psi)/2) e^{i (nu + psi)/2}, so the argument is
    (nu + psi)/2 + pi/2, plus pi when the sine factor is negative.
    """
    nu = as_radians(nu)
    psi = as_radians(psi)
    s = math.sin(0.5 * (nu - psi))
    if abs(s) < COINCIDENT_SIN_EPS:
        raise DomainError(f"e^(i*{nu!r}) and e^(i*{psi!r}) coincide; their difference has no argument")
    value = 0.5 * (nu + psi) + HALF_PI
    if s < 0.0:
        value += PI
    return Angle(value, TWO_PI)


def arg_diff_unit_sgn(nu: float, psi: float) -> Angle:
    """The displayed sign form (nu + psi)/2 + pi/2 + pi*sgn(sin((nu - psi)/2)).

    Agrees with `arg_diff_unit` modulo pi only: it is off by pi modulo 2*pi whenever
    the sine is positive. Kept to document that discrepancy.
    """
    nu = as_radians(nu)
    psi = as_radians(psi)
    s = math.sin(0.5 * (nu - psi))
    if abs(s) < COINCIDENT_SIN_EPS:
        raise DomainError(f"e^(i*{nu!r}) and e^(i*{psi!r}) coincide; their difference has no argument")
    sgn = 1.0 if s > 0.0 else -1.0
    return Angle(0.5 * (nu + psi) + HALF_PI + PI * sgn, TWO_PI)
