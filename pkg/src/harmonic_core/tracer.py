"""Tracing C_theta(P) in the plane and matching its asymptotes.

Two independent routes to the asymptote matching:

- `matching` follows the curve from each asymptote by predictor-corrector
  continuation until it leaves the disk |z| <= R again;
- `components` contours the implicit function on a (graded) grid with marching
  squares and reads the matching off the ends of each traced component.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from harmonic_core.angles import PI, TWO_PI, AngleLike, arg, as_radians, circular_distance
from harmonic_core.errors import DomainError, NonGenericError
from harmonic_core.polynomial import (
    Polynomial,
    RootMultiset,
    critical_points,
    error_scale,
    evaluate,
    evaluate_array,
    evaluate_array_with_derivative,
    evaluate_with_derivative,
)
from harmonic_core.roots import fujiwara_bound

logger = logging.getLogger(__name__)

MIN_CELLS = 8
DEFAULT_COMPONENT_CELLS = 1024
DEFAULT_COMPONENT_GRADING = 4.0

TRACE_RESIDUAL = 1e-10
CRITICAL_GUARD = 1e-6

_EDGE_BISECTIONS = 60

# Continuation controls, as fractions of R.
_STEP_INITIAL = 1.0 / 200.0
_STEP_MAX = 1.0 / 200.0
_STEP_MIN = 1e-6
_STEP_GROWTH = 1.5
# Steps stay below this fraction of the distance to the nearest saddle or between roots.
_LOCAL_STEP = 0.25
_MAX_TURN = 0.5
_CORRECTOR_ITERS = 8
_CORRECTOR_TOL = 1e-12
_MAX_STEPS = 200_000

EdgeKey = Tuple[str, int, int]


@dataclass(frozen=True)
class Window:
    """Square window of side 2*half_width about center, cells x cells grid.

    With grading g > 0 the grid nodes along each axis sit at
    center + half_width * sinh(g*u)/sinh(g) for u uniform in [-1, 1].
    """

    center: complex
    half_width: float
    cells: int
    grading: float = 0.0

    def __post_init__(self) -> None:
        hw = float(self.half_width)
        if not math.isfinite(hw) or hw <= 0.0:
            raise DomainError(f"window half_width must be > 0, got {self.half_width!r}")
        if int(self.cells) != self.cells or self.cells < MIN_CELLS:
            raise DomainError(f"window cells must be an integer >= {MIN_CELLS}, got {self.cells!r}")
        if not math.isfinite(float(self.grading)) or self.grading < 0.0:
            raise DomainError(f"window grading must be >= 0, got {self.grading!r}")
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "half_width", hw)
        object.__setattr__(self, "cells", int(self.cells))
        object.__setattr__(self, "grading", float(self.grading))

    def offsets(self) -> np.ndarray:
        u = np.linspace(-1.0, 1.0, self.cells + 1)
        if self.grading > 0.0:
            u = np.sinh(self.grading * u) / math.sinh(self.grading)
        return self.half_width * u

    def grid(self) -> np.ndarray:
        """Complex node grid indexed [iy, ix]."""
        off = self.offsets()
        return (self.center.real + off)[None, :] + 1j * (self.center.imag + off)[:, None]

    def max_cell_diagonal(self) -> float:
        return float(np.max(np.diff(self.offsets()))) * math.sqrt(2.0)

    def contains(self, z: complex, margin: float = 0.0) -> bool:
        d = z - self.center
        lim = self.half_width - margin
        return abs(d.real) <= lim and abs(d.imag) <= lim


@dataclass(frozen=True)
class Polyline:
    points: Tuple[complex, ...]
    closed: bool = False

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class AsymptoteFan:
    n: int
    theta: float
    angles: Tuple[float, ...]

    def nearest(self, direction: float) -> Tuple[int, float]:
        """Fan index closest to a direction, and the angular distance to it."""
        k = int(round((direction * self.n - self.theta) / PI)) % (2 * self.n)
        return k, circular_distance(direction, self.angles[k])

    @property
    def half_gap(self) -> float:
        return PI / (2 * self.n)


def asymptote_fan(n: int, theta: AngleLike) -> AsymptoteFan:
    if n < 1:
        raise DomainError(f"asymptote fan needs n >= 1, got {n}")
    th = as_radians(theta)
    angles = tuple(math.fmod(math.fmod((PI * k + th) / n, TWO_PI) + TWO_PI, TWO_PI) for k in range(2 * n))
    return AsymptoteFan(n=n, theta=th, angles=angles)


@dataclass(frozen=True)
class Matching:
    """Fixed-point-free involution on the fan indices 0..2n-1."""

    partners: Tuple[int, ...]

    def __post_init__(self) -> None:
        size = len(self.partners)
        if size == 0 or size % 2:
            raise DomainError(f"a matching needs an even, non-zero number of indices, got {size}")
        for k, j in enumerate(self.partners):
            if not (0 <= j < size) or j == k or self.partners[j] != k:
                raise DomainError(f"not a perfect matching: index {k} -> {j}")

    @staticmethod
    def from_pairs(n: int, pairs: Sequence[Tuple[int, int]]) -> "Matching":
        partners = [-1] * (2 * n)
        for a, b in pairs:
            for x in (a, b):
                if not (0 <= x < 2 * n) or partners[x] != -1:
                    raise DomainError(f"index {x} repeated or out of range in pairs {list(pairs)!r}")
            partners[a], partners[b] = b, a
        if -1 in partners:
            raise DomainError(f"pairs {list(pairs)!r} do not cover all {2 * n} fan indices")
        return Matching(partners=tuple(partners))

    @property
    def n(self) -> int:
        return len(self.partners) // 2

    def partner(self, k: int) -> int:
        return self.partners[k]

    def pairs(self) -> List[Tuple[int, int]]:
        return [(k, j) for k, j in enumerate(self.partners) if k < j]


def shift_matching(m: Matching, s: int) -> Matching:
    """Relabel every fan index k as k + s (mod 2n)."""
    size = len(m.partners)
    partners = [0] * size
    for k, j in enumerate(m.partners):
        partners[(k + s) % size] = (j + s) % size
    return Matching(partners=tuple(partners))


def is_noncrossing(m: Matching) -> bool:
    pairs = m.pairs()
    for i, (a, b) in enumerate(pairs):
        for c, d in pairs[i + 1:]:
            if a < c < b < d or c < a < d < b:
                return False
    return True


def has_alternating_parity(m: Matching) -> bool:
    """Every pair joins an even fan index to an odd one."""
    return all((k + j) % 2 == 1 for k, j in m.pairs())


@dataclass(frozen=True)
class CurveComponent:
    polyline: Polyline
    end_asymptotes: Optional[Tuple[int, int]]
    flag: Optional[str] = None  # "closed" | "ambiguous" | None


def implicit_value(p: Polynomial, theta: AngleLike, z: complex) -> float:
    """Im(e^{-i theta} P(z))."""
    return (cmath.exp(-1j * as_radians(theta)) * evaluate(p, complex(z))).imag


def on_curve(p: Polynomial, theta: AngleLike, z: complex, tol: float = TRACE_RESIDUAL) -> bool:
    """|Im(e^{-i theta} P(z))| within tol of the Horner error scale at z."""
    z = complex(z)
    return abs(implicit_value(p, theta, z)) <= tol * max(1.0, error_scale(p, z))


def arg_sum_condition(roots: RootMultiset, theta: AngleLike, z: complex) -> float:
    """sum_i m_i Arg(z - z_i) - theta reduced mod pi into (-pi/2, pi/2].

    Zero exactly when z (not a root) lies on C_theta(P).
    """
    total = sum(m * arg(complex(z) - zi) for zi, m in roots.entries) - as_radians(theta)
    r = math.fmod(total, PI)
    if r <= -0.5 * PI:
        r += PI
    elif r > 0.5 * PI:
        r -= PI
    return r


def _grid_values(p: Polynomial, rot: complex, z: np.ndarray) -> np.ndarray:
    return np.imag(rot * evaluate_array(p, z))


def _refine_edge_points(p: Polynomial, rot: complex, a: np.ndarray, b: np.ndarray, fa: np.ndarray) -> np.ndarray:
    """Zero of the implicit function on each segment [a, b], then one gradient Newton step."""
    pos_a = fa > 0.0
    for _ in range(_EDGE_BISECTIONS):
        mid = 0.5 * (a + b)
        same = (_grid_values(p, rot, mid) > 0.0) == pos_a
        a = np.where(same, mid, a)
        b = np.where(same, b, mid)
    z = 0.5 * (a + b)

    val, der = evaluate_array_with_derivative(p, z)
    f = np.imag(rot * val)
    grad = 1j * np.conj(rot * der)
    g2 = np.abs(grad) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        step = np.where(g2 > 0.0, f * grad / g2, 0.0)
    moved = z - step
    better = np.abs(_grid_values(p, rot, moved)) < np.abs(f)
    return np.where(better, moved, z)


def trace(p: Polynomial, theta: AngleLike, window: Window) -> List[Polyline]:
    """Marching-squares contour of Im(e^{-i theta} P) = 0 over the window.

    Crossing points sit on cell edges (sign test F > 0), refined by bisection
    along the edge. Saddle cells are split according to the sign at the cell
    center. Segments are linked in lexicographic edge order, open chains
    first, so the output is deterministic.
    """
    th = as_radians(theta)
    rot = cmath.exp(-1j * th)
    Z = window.grid()
    PZ = evaluate_array(p, Z)
    F = np.imag(rot * PZ)
    S = F > 0.0

    points: Dict[EdgeKey, complex] = {}
    hy, hx = np.nonzero(S[:, :-1] != S[:, 1:])
    vy, vx = np.nonzero(S[:-1, :] != S[1:, :])
    if len(hy) + len(vy):
        a = np.concatenate([Z[hy, hx], Z[vy, vx]])
        b = np.concatenate([Z[hy, hx + 1], Z[vy + 1, vx]])
        fa = np.concatenate([F[hy, hx], F[vy, vx]])
        refined = _refine_edge_points(p, rot, a, b, fa)
        keys: List[EdgeKey] = [("h", int(y), int(x)) for y, x in zip(hy, hx)]
        keys += [("v", int(y), int(x)) for y, x in zip(vy, vx)]
        points = {k: complex(z) for k, z in zip(keys, refined)}

    bound = TRACE_RESIDUAL * (1.0 + float(np.max(np.abs(PZ))))
    bad = sum(1 for z in points.values() if abs((rot * evaluate(p, z)).imag) > bound)
    if bad:
        logger.debug("%d traced points above residual bound %.3e", bad, bound)

    adjacency: Dict[EdgeKey, List[EdgeKey]] = {k: [] for k in points}

    def link(e: EdgeKey, f: EdgeKey) -> None:
        adjacency[e].append(f)
        adjacency[f].append(e)

    code = (
        S[:-1, :-1].astype(np.int8)
        + 2 * S[:-1, 1:].astype(np.int8)
        + 4 * S[1:, 1:].astype(np.int8)
        + 8 * S[1:, :-1].astype(np.int8)
    )
    for iy, ix in np.argwhere((code != 0) & (code != 15)):
        iy, ix = int(iy), int(ix)
        e0: EdgeKey = ("h", iy, ix)
        e1: EdgeKey = ("v", iy, ix + 1)
        e2: EdgeKey = ("h", iy + 1, ix)
        e3: EdgeKey = ("v", iy, ix)
        crossed = [e for e in (e0, e1, e2, e3) if e in points]
        if len(crossed) == 2:
            link(crossed[0], crossed[1])
        elif len(crossed) == 4:
            mid = 0.5 * (Z[iy, ix] + Z[iy + 1, ix + 1])
            center_pos = (rot * evaluate(p, complex(mid))).imag > 0.0
            if center_pos == bool(S[iy, ix]):
                link(e0, e1)
                link(e2, e3)
            else:
                link(e0, e3)
                link(e1, e2)

    visited: set[EdgeKey] = set()

    def walk(start: EdgeKey) -> List[EdgeKey]:
        chain = [start]
        visited.add(start)
        cur = start
        while True:
            nxt = next((e for e in adjacency[cur] if e not in visited), None)
            if nxt is None:
                return chain
            visited.add(nxt)
            chain.append(nxt)
            cur = nxt

    ordered = sorted(adjacency)
    out: List[Polyline] = []
    for key in ordered:
        if key not in visited and len(adjacency[key]) <= 1:
            chain = walk(key)
            out.append(Polyline(points=tuple(points[e] for e in chain), closed=False))
    for key in ordered:
        if key not in visited:
            chain = walk(key)
            out.append(Polyline(points=tuple(points[e] for e in chain), closed=True))
    return out


def validity_radius(p: Polynomial) -> float:
    """R = 2n(1 + max |z_i|); the Fujiwara bound stands in when roots are unknown."""
    n = p.degree
    if p.roots is not None:
        big = p.roots.max_modulus()
    else:
        big = fujiwara_bound(p.coeffs)
    return 2.0 * n * (1.0 + big)


def _curve_center(p: Polynomial) -> complex:
    if p.roots is not None:
        return p.roots.centroid()
    return -p.coeffs[-2] / (p.degree * p.coeffs[-1])


def _saddles(p: Polynomial) -> List[complex]:
    """Critical points of P off the curve's singular set (multiple roots are skipped)."""
    if p.degree < 2:
        return []
    out = []
    for c in critical_points(p):
        if abs(evaluate(p, c)) > _CORRECTOR_TOL * max(1.0, error_scale(p, c)):
            out.append(c)
    return out


def _root_gap(p: Polynomial) -> float:
    if p.roots is None or len(p.roots) < 2:
        return math.inf
    pts = p.roots.points
    return min(abs(a - b) for i, a in enumerate(pts) for b in pts[i + 1 :])


class _Follower:
    """Predictor-corrector continuation of Im(e^{-i theta} P) = 0."""

    def __init__(self, p: Polynomial, theta: float, radius: float) -> None:
        self.p = p
        self.theta = theta
        self.rot = cmath.exp(-1j * theta)
        self.radius = radius
        self.saddles = _saddles(p)
        self.root_points = list(p.roots.points) if p.roots is not None else []
        self.root_gap = _root_gap(p)
        self.h_max = _STEP_MAX * radius
        self.h_floor = 8.0 * _STEP_MIN * radius

    def max_step(self, z: complex) -> float:
        """Largest step allowed at z.

        Branches of the curve come close near a saddle of P and, on the scale of
        the smallest root separation, around the roots.
        """
        h = self.h_max
        if self.saddles:
            h = min(h, _LOCAL_STEP * min(abs(z - c) for c in self.saddles))
        if self.root_points:
            near = min(abs(z - r) for r in self.root_points)
            h = min(h, _LOCAL_STEP * max(near, self.root_gap))
        return max(h, self.h_floor)

    def value(self, z: complex) -> float:
        return (self.rot * evaluate(self.p, z)).imag

    def tangent(self, z: complex) -> Optional[complex]:
        _, der = evaluate_with_derivative(self.p, z)
        t = (self.rot * der).conjugate()
        if t == 0:
            return None
        return t / abs(t)

    def correct(self, z: complex) -> Optional[complex]:
        """Newton iteration along the gradient i*conj(f') back onto the curve."""
        for _ in range(_CORRECTOR_ITERS):
            val, der = evaluate_with_derivative(self.p, z)
            f = (self.rot * val).imag
            if abs(f) <= _CORRECTOR_TOL * max(1.0, error_scale(self.p, z)):
                return z
            grad = 1j * (self.rot * der).conjugate()
            g2 = abs(grad) ** 2
            if g2 == 0.0:
                return None
            z = z - f * grad / g2
        val = evaluate(self.p, z)
        if abs((self.rot * val).imag) <= 1e3 * _CORRECTOR_TOL * max(1.0, error_scale(self.p, z)):
            return z
        return None

    def start(self, fan: AsymptoteFan, k: int, center: complex) -> complex:
        """Zero of the implicit function on |z - center| = R bracketed about fan angle k."""
        R = self.radius
        half = fan.half_gap
        lo, hi = fan.angles[k] - half, fan.angles[k] + half

        def at(phi: float) -> complex:
            return center + R * cmath.exp(1j * phi)

        flo, fhi = self.value(at(lo)), self.value(at(hi))
        if flo * fhi > 0.0:
            raise NonGenericError(
                f"no curve crossing near asymptote {k} on |z| = {R:.6g}: radius too small",
                diagnostics={"asymptote": k, "radius": R, "theta": self.theta},
            )
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            fm = self.value(at(mid))
            if fm == 0.0:
                lo = hi = mid
                break
            if (fm > 0.0) == (flo > 0.0):
                lo, flo = mid, fm
            else:
                hi = mid
        z = at(0.5 * (lo + hi))
        zc = self.correct(z)
        return z if zc is None else zc

    def follow(self, z: complex, inward: complex, center: complex) -> complex:
        """Walk from z (on the circle) until the path leaves |z - center| <= R again."""
        R = self.radius
        T = self.tangent(z)
        if T is None:
            raise NonGenericError("curve is singular at its starting point", diagnostics={"z": [z.real, z.imag]})
        sign = 1.0 if (T * inward.conjugate()).real >= 0.0 else -1.0
        T = sign * T
        h = min(_STEP_INITIAL * R, self.max_step(z))
        h_min = _STEP_MIN * R
        inside = False

        for _ in range(_MAX_STEPS):
            pred = z + h * T
            zc = self.correct(pred)
            Tn = None
            ok = zc is not None and abs(zc - pred) <= 0.5 * h
            if ok:
                Tn = self.tangent(zc)
                ok = Tn is not None
            if ok:
                Tn = sign * Tn
                ok = abs(cmath.phase(Tn * T.conjugate())) <= _MAX_TURN and ((zc - z) * T.conjugate()).real > 0.0
            if not ok:
                h *= 0.5
                logger.debug("continuation step rejected at %r, h -> %.3e", z, h)
                if h < h_min:
                    raise NonGenericError(
                        f"continuation stalled near {z.real:.6g}{z.imag:+.6g}j (step below {h_min:.3e})",
                        diagnostics={"z": [z.real, z.imag], "theta": self.theta, "radius": R},
                    )
                continue
            z, T = zc, Tn
            h = min(h * _STEP_GROWTH, self.max_step(z))
            r = abs(z - center)
            if r < R:
                inside = True
            elif inside:
                return z
        raise NonGenericError("continuation did not leave the disk", diagnostics={"theta": self.theta, "radius": R})


def _check_generic_theta(p: Polynomial, theta: float, guard: float) -> None:
    # necklace imports this module.
    from harmonic_core.necklace import critical_thetas

    for crit in critical_thetas(p):
        d = circular_distance(theta, crit.value, PI)
        if d < guard:
            raise NonGenericError(
                f"theta={theta!r} is within {d:.3e} of critical theta {crit.value!r}",
                diagnostics={"theta": theta, "critical_theta": crit.value, "guard": guard},
            )


def _validated_matching(partners: List[int], diagnostics: Dict) -> Matching:
    for k, j in enumerate(partners):
        if j == k or partners[j] != k:
            raise NonGenericError(
                "inconsistent pairing: non-generic or R too small",
                diagnostics=dict(diagnostics, partners=list(partners)),
            )
    m = Matching(partners=tuple(partners))
    if not has_alternating_parity(m):
        raise NonGenericError(
            "pairing joins asymptotes of equal parity: non-generic or R too small",
            diagnostics=dict(diagnostics, partners=list(partners)),
        )
    if not is_noncrossing(m):
        raise NonGenericError(
            "pairing is crossing: non-generic or R too small",
            diagnostics=dict(diagnostics, partners=list(partners)),
        )
    return m


def matching(
    p: Polynomial,
    theta: AngleLike,
    radius: Optional[float] = None,
    *,
    guard: float = CRITICAL_GUARD,
) -> Matching:
    """Asymptote matching of C_theta(P) by curve continuation.

    From the crossing of the curve with |z - c| = R nearest each fan direction
    (c the root centroid), the curve is followed inward until it exits the disk;
    the exit direction names the partner.
    """
    n = p.degree
    if n < 1:
        raise DomainError("matching needs a polynomial of degree >= 1")
    th = as_radians(theta)
    R_min = validity_radius(p)
    R = R_min if radius is None else float(radius)
    if not math.isfinite(R) or R < R_min:
        raise DomainError(f"radius {radius!r} is below the asymptote-validity radius {R_min:.6g}")
    if n >= 2:
        _check_generic_theta(p, th, guard)

    fan = asymptote_fan(n, th)
    center = _curve_center(p)
    follower = _Follower(p, th, R)
    partners: List[int] = []
    for k in range(2 * n):
        z0 = follower.start(fan, k, center)
        exit_z = follower.follow(z0, -(z0 - center), center)
        j, dist = fan.nearest(arg(exit_z - center))
        if dist > fan.half_gap:
            raise NonGenericError(
                f"exit of the path from asymptote {k} is {dist:.3e} rad from every asymptote",
                diagnostics={"asymptote": k, "exit": [exit_z.real, exit_z.imag], "theta": th},
            )
        partners.append(j)
    return _validated_matching(partners, {"theta": th, "radius": R})


def default_window(p: Polynomial, cells: int = DEFAULT_COMPONENT_CELLS, grading: float = DEFAULT_COMPONENT_GRADING) -> Window:
    """Window about the root centroid reaching the asymptote-validity radius beyond every root."""
    c = _curve_center(p)
    if p.roots is not None:
        spread = max(abs(z - c) for z in p.roots.points)
    else:
        spread = fujiwara_bound(p.coeffs) + abs(c)
    return Window(center=c, half_width=spread + validity_radius(p), cells=cells, grading=grading)


def components(
    p: Polynomial,
    theta: AngleLike,
    window: Optional[Window] = None,
    fan: Optional[AsymptoteFan] = None,
) -> List[CurveComponent]:
    """Traced components of the curve with the fan index at each window exit."""
    th = as_radians(theta)
    if window is None:
        window = default_window(p)
    if fan is None:
        fan = asymptote_fan(p.degree, th)
    center = _curve_center(p)

    out: List[CurveComponent] = []
    for line in trace(p, th, window):
        if line.closed:
            out.append(CurveComponent(polyline=line, end_asymptotes=None, flag="closed"))
            continue
        ends = []
        for z in (line.points[0], line.points[-1]):
            if z == center:
                ends.append(None)
                continue
            k, dist = fan.nearest(arg(z - center))
            ends.append(k if dist <= fan.half_gap else None)
        if None in ends or ends[0] == ends[1]:
            out.append(CurveComponent(polyline=line, end_asymptotes=None, flag="ambiguous"))
        else:
            out.append(CurveComponent(polyline=line, end_asymptotes=(ends[0], ends[1])))
    return out


def matching_from_components(comps: Sequence[CurveComponent], n: int) -> Matching:
    flagged = [c.flag for c in comps if c.flag is not None]
    if flagged:
        raise NonGenericError(
            f"{len(flagged)} traced component(s) could not be assigned to asymptotes",
            diagnostics={"flags": flagged},
        )
    pairs = [c.end_asymptotes for c in comps if c.end_asymptotes is not None]
    try:
        return Matching.from_pairs(n, pairs)
    except DomainError as e:
        raise NonGenericError(f"traced components do not form a perfect matching: {e}", diagnostics={"pairs": pairs}) from e
