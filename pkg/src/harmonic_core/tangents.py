"""Tangent lines of C_theta(P) at its roots.

Near a root z_i of multiplicity k, P(z) = (z - z_i)^k Q(z) with Q(z_i) = q != 0,
so Arg P(z) ~ k Arg(z - z_i) + Arg q and the curve has k tangent lines through
z_i, at directions (theta - Arg q + m*pi)/k (mod pi), m = 0..k-1. For roots on
the unit circle one of them is tangent to the circle exactly when z_i is a
vertex of the gon.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Any, Dict, List, Tuple

from harmonic_core.angles import HALF_PI, PI, Angle, AngleLike, arg, as_radians, circular_distance
from harmonic_core.circle_gon import CIRCLE_TOL, gon_vertices, require_on_circle
from harmonic_core.errors import DomainError
from harmonic_core.polynomial import Polynomial, RootMultiset, evaluate

TANGENT_TOL = 1e-8

# Distances within [tol / _BAND, tol * _BAND] are too close to the threshold to call.
_BAND = 10.0


def _synthetic_division(coeffs: List[complex], z: complex) -> Tuple[List[complex], complex]:
    """Divide an ascending coefficient list by (x - z); returns (quotient, remainder)."""
    desc = list(reversed(coeffs))
    out = [desc[0]]
    for c in desc[1:]:
        out.append(c + z * out[-1])
    rem = out.pop()
    return list(reversed(out)), rem


def deflate_at_root(p: Polynomial, roots: RootMultiset, index: int) -> Tuple[int, complex]:
    """(k, Q(z_i)) for P(z) = (z - z_i)^k Q(z), by k synthetic divisions."""
    if not (0 <= index < len(roots.entries)):
        raise DomainError(f"root index {index} out of range for {len(roots.entries)} distinct roots")
    z, k = roots.entries[index]
    coeffs = list(p.coeffs)
    for _ in range(k):
        coeffs, _rem = _synthetic_division(coeffs, z)
    q = evaluate(Polynomial(coeffs=tuple(coeffs)), z)
    scale = max(abs(c) for c in coeffs)
    if abs(q) <= 1e-12 * scale:
        raise DomainError(
            f"Q(z_{index}) vanishes after removing multiplicity {k}: roots were not clustered into one entry"
        )
    return k, q


def tangent_directions(p: Polynomial, roots: RootMultiset, index: int, theta: AngleLike) -> List[Angle]:
    k, q = deflate_at_root(p, roots, index)
    base = as_radians(theta) - cmath.phase(q)
    return sorted((Angle((base + m * PI) / k, PI) for m in range(k)), key=lambda a: a.value)


def direction_residual(p: Polynomial, z: complex, direction: float, eps: float, theta: AngleLike) -> float:
    """|Arg P(z + eps*e^{i direction}) - theta| reduced mod pi, for probing a tangent."""
    w = evaluate(p, z + eps * cmath.exp(1j * direction))
    return circular_distance(arg(w), as_radians(theta), PI)


@dataclass(frozen=True)
class TangentReport:
    root: complex
    multiplicity: int
    directions: Tuple[float, ...]
    circle_tangent_dir: float
    coincides: bool
    on_gon: bool
    tangent_distance: float
    gon_distance: float
    inconclusive: bool

    @property
    def consistent(self) -> bool:
        """The circle-tangency criterion holds (vacuously when inconclusive)."""
        return self.inconclusive or self.coincides == self.on_gon

    def to_dict(self) -> Dict[str, Any]:
        return {
            "root": [self.root.real, self.root.imag],
            "multiplicity": self.multiplicity,
            "directions": list(self.directions),
            "circle_tangent_dir": self.circle_tangent_dir,
            "coincides": self.coincides,
            "on_gon": self.on_gon,
            "tangent_distance": self.tangent_distance,
            "gon_distance": self.gon_distance,
            "inconclusive": self.inconclusive,
            "consistent": self.consistent,
        }


def circle_tangency_test(
    p: Polynomial,
    roots: RootMultiset,
    index: int,
    theta: AngleLike,
    tol: float = TANGENT_TOL,
    *,
    circle_tol: float = CIRCLE_TOL,
) -> TangentReport:
    require_on_circle(roots, circle_tol)
    th = as_radians(theta)
    dirs = tangent_directions(p, roots, index, th)
    z, k = roots.entries[index]
    a = arg(z)
    circle_dir = Angle(a + HALF_PI, PI).value
    d_tan = min(circular_distance(d.value, circle_dir, PI) for d in dirs)
    d_gon = gon_vertices(roots, th, circle_tol=circle_tol).distance_to(a)

    def near_threshold(d: float) -> bool:
        return tol / _BAND <= d <= tol * _BAND

    return TangentReport(
        root=z,
        multiplicity=k,
        directions=tuple(d.value for d in dirs),
        circle_tangent_dir=circle_dir,
        coincides=d_tan <= tol,
        on_gon=d_gon <= tol,
        tangent_distance=d_tan,
        gon_distance=d_gon,
        inconclusive=near_threshold(d_tan) or near_threshold(d_gon),
    )
