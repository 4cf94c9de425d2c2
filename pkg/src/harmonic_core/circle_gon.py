"""The regular n-gon cut out of the unit circle by C_theta(P).

When every root of P lies on the unit circle U, C_theta(P) meets U exactly in the
roots and in the vertices of a regular n-gon G(z) with phase

    Omega = (2*theta - sum_j Arg(z_j)) / n - pi        (mod 2*pi)

This module computes Omega and G(z), finds the zeros of
g(t) = Im(e^{-i theta} P(e^{it})) numerically, and compares the two as multisets.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from harmonic_core.angles import PI, TWO_PI, Angle, AngleLike, arg, as_radians, circular_distance
from harmonic_core.errors import DegenerateCurveError, DomainError
from harmonic_core.polynomial import MACHINE_EPS, Polynomial, RootMultiset, poly_from_roots

logger = logging.getLogger(__name__)

CIRCLE_TOL = 1e-9
VERIFY_TOL = 1e-8
DEFAULT_ZERO_TOL = 1e-12

MIN_SAMPLES_PER_DEGREE = 16
DEFAULT_SAMPLES_PER_DEGREE = 64
DEFAULT_MIN_SAMPLES = 4096

# Dips of |g| are zoomed by this many sub-intervals until narrower than _DIP_FLOOR.
_ZOOM_POINTS = 32
_DIP_FLOOR = 1e-10

# Disk radii tried (smallest first) when counting zeros near a candidate.
_COUNT_RADII = tuple(10.0 ** -e for e in range(10, 2, -1))
_TAYLOR_ORDER = 12

# Radius used to merge candidates whose local count could not be decided.
_FALLBACK_CLUSTER_RADIUS = 1e-9


def require_on_circle(roots: RootMultiset, tol: float = CIRCLE_TOL) -> None:
    for idx, (z, _m) in enumerate(roots.entries):
        dev = abs(abs(z) - 1.0)
        if dev > tol:
            raise DomainError(
                f"root #{idx} ({z.real:.17g}{z.imag:+.17g}j) is off the unit circle: "
                f"||z| - 1| = {dev:.3e} > {tol:g}"
            )


def root_arg_sum(roots: RootMultiset) -> float:
    """sum_j Arg(z_j) with multiplicity, each Arg taken in [0, 2*pi)."""
    return sum(m * arg(z) for z, m in roots.entries)


def omega(roots: RootMultiset, theta: AngleLike, *, circle_tol: float = CIRCLE_TOL) -> Angle:
    """Phase of the gon: (2*theta - sum Arg z_j)/n - pi, canonical mod 2*pi."""
    require_on_circle(roots, circle_tol)
    n = roots.degree
    t = as_radians(theta)
    return Angle((2.0 * t - root_arg_sum(roots)) / n - PI, TWO_PI)


@dataclass(frozen=True)
class NGon:
    omega: Angle
    n: int
    vertices: Tuple[complex, ...]

    @property
    def angles(self) -> List[float]:
        """Vertex angles Omega + 2*pi*k/n, k = 0..n-1, canonical mod 2*pi."""
        return [Angle(self.omega.value + TWO_PI * k / self.n).value for k in range(self.n)]

    def distance_to(self, t: float) -> float:
        """Circular distance from angle t to the nearest vertex."""
        return min(circular_distance(t, a) for a in self.angles)


def gon_vertices(roots: RootMultiset, theta: AngleLike, *, circle_tol: float = CIRCLE_TOL) -> NGon:
    om = omega(roots, theta, circle_tol=circle_tol)
    n = roots.degree
    verts = tuple(cmath.exp(1j * (om.value + TWO_PI * k / n)) for k in range(n))
    return NGon(omega=om, n=n, vertices=verts)


def theta_placing_root_on_gon(roots: RootMultiset, index: int, slot: int) -> Angle:
    """theta (mod pi) for which gon vertex `slot` sits on root entry `index`.

    Solves Omega(theta) + 2*pi*slot/n = Arg(z_index) (mod 2*pi).
    """
    require_on_circle(roots)
    if not (0 <= index < len(roots.entries)):
        raise DomainError(f"root index {index} out of range for {len(roots.entries)} distinct roots")
    n = roots.degree
    a = arg(roots.entries[index][0])
    return Angle(0.5 * (n * (a + PI - TWO_PI * slot / n) + root_arg_sum(roots)), PI)


class _CircleFunction:
    """g(t) = Im(e^{-i theta} P(e^{it})) and its t-derivatives."""

    def __init__(self, p: Polynomial, theta: float) -> None:
        self.n = p.degree
        self.coeffs = list(p.coeffs)
        self.rot = cmath.exp(-1j * theta)
        self._np_coeffs = np.asarray(self.coeffs, dtype=np.complex128)
        self._derived: Dict[int, List[complex]] = {0: self.coeffs}
        ks = np.arange(self.n + 1, dtype=float)
        mags = np.abs(self._np_coeffs)
        self._scales = [float(np.sum(mags * ks ** j)) if j else float(np.sum(mags)) for j in range(_TAYLOR_ORDER + 2)]

    def scale(self, order: int) -> float:
        """sum_k |c_k| k^order, an upper bound of |g^(order)| on the whole circle."""
        return self._scales[order]

    def noise(self, order: int) -> float:
        return 8.0 * (self.n + 1) * MACHINE_EPS * self._scales[order] + MACHINE_EPS * self._scales[order + 1]

    def _coeffs_for(self, order: int) -> List[complex]:
        cs = self._derived.get(order)
        if cs is None:
            cs = [c * (1j * k) ** order for k, c in enumerate(self.coeffs)]
            self._derived[order] = cs
        return cs

    def value(self, t: float, order: int = 0) -> float:
        w = cmath.exp(1j * t)
        acc = 0j
        for c in reversed(self._coeffs_for(order)):
            acc = acc * w + c
        return (self.rot * acc).imag

    def values(self, ts: np.ndarray) -> np.ndarray:
        w = np.exp(1j * ts)
        acc = np.zeros_like(w)
        for c in reversed(self._np_coeffs):
            acc = acc * w + c
        return np.imag(self.rot * acc)


@dataclass(frozen=True)
class CircleZero:
    angle: float
    residual: float
    multiplicity: int


@dataclass(frozen=True)
class CircleZeroSet:
    zeros: Tuple[CircleZero, ...]
    theta: float
    samples: int

    @property
    def angles(self) -> List[float]:
        return [z.angle for z in self.zeros]

    @property
    def total_multiplicity(self) -> int:
        return sum(z.multiplicity for z in self.zeros)

    def expanded_angles(self) -> List[float]:
        out: List[float] = []
        for z in self.zeros:
            out.extend([z.angle] * z.multiplicity)
        return out


@dataclass
class _Candidate:
    t: float
    kind: str  # "sign" | "exact" | "dip"
    multiplicity: int = 1
    radius: float = _FALLBACK_CLUSTER_RADIUS
    residual: float = 0.0


class _ZeroFinder:
    def __init__(self, g: _CircleFunction, tol: float) -> None:
        self.g = g
        self.tol = tol
        self.res_floor = max(tol * g.scale(0), g.noise(0))
        self.candidates: List[_Candidate] = []

    # -- bracketing ---------------------------------------------------------

    def scan(self, ts: np.ndarray, gs: np.ndarray, *, periodic: bool) -> None:
        count = len(ts)
        if periodic:
            tt = np.append(ts, ts[0] + TWO_PI)
            gg = np.append(gs, gs[0])
        else:
            tt, gg = ts, gs
        last = count if periodic else count - 1

        for j in range(last):
            a, b = float(gg[j]), float(gg[j + 1])
            if a == 0.0:
                self.candidates.append(_Candidate(float(tt[j]), "exact"))
            elif a * b < 0.0:
                self.candidates.append(_Candidate(self._bisect(float(tt[j]), float(tt[j + 1]), a, b, 0), "sign"))
        if not periodic and float(gg[-1]) == 0.0:
            self.candidates.append(_Candidate(float(tt[-1]), "exact"))

        s1 = self.g.scale(1)
        lo_j, hi_j = (0, count) if periodic else (1, count - 1)
        for j in range(lo_j, hi_j):
            jm, jp = (j - 1) % count, (j + 1) % count
            gj, gm, gp = float(gs[j]), float(gs[jm]), float(gs[jp])
            if gj == 0.0 or gm * gj <= 0.0 or gj * gp <= 0.0:
                continue
            if abs(gj) > abs(gm) or abs(gj) > abs(gp):
                continue
            tj = float(ts[j])
            h = max(tj - float(ts[jm]) if jm < j else tj - float(ts[jm]) + TWO_PI,
                    float(ts[jp]) - tj if jp > j else float(ts[jp]) + TWO_PI - tj)
            # |g'| <= s1, so g cannot vanish within h of t_j.
            if abs(gj) > s1 * h:
                continue
            if 2.0 * h <= _DIP_FLOOR:
                self.candidates.append(_Candidate(self._dip_point(tj - h, tj + h, tj), "dip"))
                continue
            sub = np.linspace(tj - h, tj + h, _ZOOM_POINTS + 1)
            self.scan(sub, self.g.values(sub), periodic=False)

    def _bisect(self, lo: float, hi: float, glo: float, ghi: float, order: int) -> float:
        a0, b0 = lo, hi
        for _ in range(200):
            if hi - lo <= self.tol:
                break
            mid = 0.5 * (lo + hi)
            gm = self.g.value(mid, order)
            if gm == 0.0:
                return mid
            if (gm < 0.0) == (glo < 0.0):
                lo, glo = mid, gm
            else:
                hi, ghi = mid, gm
        t = 0.5 * (lo + hi)
        # Newton polish on g^(order), kept only while it stays in the bracket and improves.
        for _ in range(3):
            val = self.g.value(t, order)
            der = self.g.value(t, order + 1)
            if der == 0.0 or val == 0.0:
                break
            nt = t - val / der
            if not (a0 <= nt <= b0) or abs(self.g.value(nt, order)) >= abs(val):
                break
            t = nt
        return t

    def _dip_point(self, lo: float, hi: float, fallback: float) -> float:
        dlo, dhi = self.g.value(lo, 1), self.g.value(hi, 1)
        if dlo * dhi < 0.0:
            return self._bisect(lo, hi, dlo, dhi, 1)
        return fallback

    # -- counting -----------------------------------------------------------

    def _local_count(self, t: float) -> Tuple[Optional[int], Optional[float]]:
        """Number of zeros of g near t, by a Pellet test on the Taylor expansion.

        For the smallest radius r where one term |a_m| r^m dominates the sum of all
        others (error bounds included), g has exactly m zeros in the disk |s - t| < r.
        """
        g = self.g
        a: List[float] = []
        err: List[float] = []
        for j in range(_TAYLOR_ORDER + 1):
            f = float(math.factorial(j))
            a.append(abs(g.value(t, j)) / f)
            err.append(g.noise(j) / f)
        n = max(g.n, 1)
        for r in _COUNT_RADII:
            nr = n * r
            tail = g.scale(0) * nr ** (_TAYLOR_ORDER + 1) / math.factorial(_TAYLOR_ORDER + 1) * math.exp(nr)
            upper = [(a[j] + err[j]) * r ** j for j in range(_TAYLOR_ORDER + 1)]
            total = sum(upper) + tail
            for m in range(_TAYLOR_ORDER + 1):
                lower = (a[m] - err[m]) * r ** m
                if lower > 0.0 and lower > total - upper[m]:
                    return m, r
        return None, None

    def resolve(self) -> List[CircleZero]:
        resolved: List[_Candidate] = []
        for cand in self.candidates:
            m, r = self._local_count(cand.t)
            if m is None or m == 0:
                if cand.kind in ("sign", "exact"):
                    m, r = 1, _FALLBACK_CLUSTER_RADIUS
                elif abs(self.g.value(cand.t)) <= self.res_floor:
                    m, r = 2, _FALLBACK_CLUSTER_RADIUS
                else:
                    continue
            t = cand.t
            if m >= 2:
                # A zero of order m is a simple zero of g^(m-1): locate it there.
                lo, hi = t - r, t + r
                dlo, dhi = self.g.value(lo, m - 1), self.g.value(hi, m - 1)
                if dlo * dhi < 0.0:
                    t = self._bisect(lo, hi, dlo, dhi, m - 1)
            cand.t = Angle(t).value
            cand.multiplicity = m
            cand.radius = r
            cand.residual = abs(self.g.value(t))
            resolved.append(cand)

        resolved.sort(key=lambda c: c.t)
        clusters: List[_Candidate] = []
        for cand in resolved:
            if clusters and cand.t - clusters[-1].t <= max(cand.radius, clusters[-1].radius):
                clusters[-1] = _better(clusters[-1], cand)
            else:
                clusters.append(cand)
        if len(clusters) > 1:
            first, last = clusters[0], clusters[-1]
            if first.t + TWO_PI - last.t <= max(first.radius, last.radius):
                keep = _better(first, last)
                clusters = [keep] + clusters[1:-1]
                clusters.sort(key=lambda c: c.t)

        return [CircleZero(angle=c.t, residual=c.residual, multiplicity=c.multiplicity) for c in clusters]


def _better(a: _Candidate, b: _Candidate) -> _Candidate:
    if a.multiplicity != b.multiplicity:
        return a if a.multiplicity > b.multiplicity else b
    return a if a.residual <= b.residual else b


def circle_zeros(
    p: Polynomial,
    theta: AngleLike,
    samples: Optional[int] = None,
    tol: float = DEFAULT_ZERO_TOL,
) -> CircleZeroSet:
    """Zeros t in [0, 2*pi) of g(t) = Im(e^{-i theta} P(e^{it})).

    Sign changes on a uniform sampling are bisected to width tol and Newton
    polished; dips of |g| without a sign change are zoomed until they either
    split into sign changes or shrink below 1e-10, where they become tangential
    (even order) candidates. Each candidate's multiplicity is the number of
    zeros a Pellet test finds in a small disk about it; candidates sharing a
    disk are one cluster.
    """
    n = p.degree
    if n < 1:
        raise DomainError("circle zeros need a polynomial of degree >= 1")
    if samples is None:
        samples = max(DEFAULT_MIN_SAMPLES, DEFAULT_SAMPLES_PER_DEGREE * n)
    if samples < MIN_SAMPLES_PER_DEGREE * n:
        raise DomainError(f"samples must be >= {MIN_SAMPLES_PER_DEGREE}*n = {MIN_SAMPLES_PER_DEGREE * n}, got {samples}")
    th = as_radians(theta)

    g = _CircleFunction(p, th)
    ts = TWO_PI * np.arange(samples) / samples
    gs = g.values(ts)
    finder = _ZeroFinder(g, tol)
    if np.all(np.abs(gs) <= finder.res_floor):
        raise DegenerateCurveError("degenerate: circle contained in curve (g vanishes at every sample)")

    finder.scan(ts, gs, periodic=True)
    zeros = finder.resolve()
    total = sum(z.multiplicity for z in zeros)
    if total != 2 * n:
        logger.warning("circle zeros total multiplicity %d, expected %d for theta=%r", total, 2 * n, th)
    return CircleZeroSet(zeros=tuple(zeros), theta=th, samples=samples)


def circle_polynomial(p: Polynomial, theta: AngleLike) -> Polynomial:
    """H(w) = e^{-i theta} w^n P(w) - e^{i theta} w^n conj(P)(1/w), of degree 2n.

    On |w| = 1, H(e^{it}) = 2i e^{int} g(t), so the roots of H on the unit circle are
    the circle zeros of C_theta(P), multiplicities included.
    """
    th = as_radians(theta)
    n = p.degree
    rot = cmath.exp(-1j * th)
    coeffs = [0j] * (2 * n + 1)
    for k, c in enumerate(p.coeffs):
        coeffs[n + k] += rot * c
        coeffs[n - k] -= c.conjugate() / rot
    return Polynomial(coeffs=tuple(coeffs))


@dataclass(frozen=True)
class MatchedPair:
    predicted: float
    found: float
    distance: float
    source: str  # "root" | "gon"


@dataclass(frozen=True)
class VerificationReport:
    passed: bool
    theta: float
    omega: float
    tol: float
    matched_pairs: Tuple[MatchedPair, ...]
    max_distance: float
    unmatched_predicted: Tuple[float, ...]
    unmatched_found: Tuple[float, ...]
    zeros: CircleZeroSet
    predicted: Tuple[float, ...] = field(default=())

    def to_dict(self) -> Dict[str, Any]:
        return {
            "pass": self.passed,
            "theta": self.theta,
            "omega": self.omega,
            "tol": self.tol,
            "max_distance": self.max_distance,
            "zeros": [
                {"angle": z.angle, "residual": z.residual, "multiplicity": z.multiplicity}
                for z in self.zeros.zeros
            ],
            "predicted": list(self.predicted),
            "matched_pairs": [
                {"predicted": m.predicted, "found": m.found, "distance": m.distance, "source": m.source}
                for m in self.matched_pairs
            ],
            "unmatched_predicted": list(self.unmatched_predicted),
            "unmatched_found": list(self.unmatched_found),
        }


def match_circular(
    predicted: Sequence[Tuple[float, str]], found: Sequence[float]
) -> Tuple[List[MatchedPair], List[float], List[float]]:
    """Greedy nearest-first matching of two angle multisets on the circle."""
    pairs = []
    for i, (a, _src) in enumerate(predicted):
        for j, b in enumerate(found):
            pairs.append((circular_distance(a, b), i, j))
    pairs.sort()
    used_p: set[int] = set()
    used_f: set[int] = set()
    matched: List[MatchedPair] = []
    for d, i, j in pairs:
        if i in used_p or j in used_f:
            continue
        used_p.add(i)
        used_f.add(j)
        matched.append(MatchedPair(predicted=predicted[i][0], found=found[j], distance=d, source=predicted[i][1]))
    matched.sort(key=lambda m: (m.predicted, m.found))
    left_p = sorted(predicted[i][0] for i in range(len(predicted)) if i not in used_p)
    left_f = sorted(found[j] for j in range(len(found)) if j not in used_f)
    return matched, left_p, left_f


def verify_proposition(
    roots: RootMultiset,
    theta: AngleLike,
    tol: float = VERIFY_TOL,
    *,
    samples: Optional[int] = None,
    circle_tol: float = CIRCLE_TOL,
) -> VerificationReport:
    """Check C_theta(P) cap U = z cup G(z) numerically, as multisets.

    A root of multiplicity m contributes m copies of its angle; a root on the gon
    fills a root slot and a gon slot.
    """
    require_on_circle(roots, circle_tol)
    th = as_radians(theta)
    gon = gon_vertices(roots, th, circle_tol=circle_tol)
    predicted: List[Tuple[float, str]] = []
    for z, m in roots.entries:
        predicted.extend([(arg(z), "root")] * m)
    predicted.extend((a, "gon") for a in gon.angles)

    zs = circle_zeros(poly_from_roots(roots), th, samples=samples)
    matched, left_p, left_f = match_circular(predicted, zs.expanded_angles())
    max_d = max((m.distance for m in matched), default=0.0)
    passed = not left_p and not left_f and max_d <= tol
    if not passed:
        logger.info(
            "verification failed: max_distance=%.3e unmatched_predicted=%d unmatched_found=%d",
            max_d, len(left_p), len(left_f),
        )
    return VerificationReport(
        passed=passed,
        theta=th,
        omega=gon.omega.value,
        tol=tol,
        matched_pairs=tuple(matched),
        max_distance=max_d,
        unmatched_predicted=tuple(left_p),
        unmatched_found=tuple(left_f),
        zeros=zs,
        predicted=tuple(sorted(a for a, _ in predicted)),
    )
