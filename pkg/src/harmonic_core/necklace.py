"""Critical theta values and the necklace of matchings over theta in [0, pi).

C_theta(P) can only change topology when it passes through a critical point c
of P, i.e. when theta = Arg P(c) (mod pi). Between consecutive critical values
the matching is constant; each such interval with its matching is a bead.
"""

from __future__ import annotations

import cmath
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from harmonic_core.angles import PI, Angle, circular_distance
from harmonic_core.errors import TransitionError
from harmonic_core.polynomial import DEFAULT_CRITICAL_TOL, Polynomial, critical_points, error_scale, evaluate
from harmonic_core.tracer import Matching, matching, shift_matching

logger = logging.getLogger(__name__)

DEFAULT_GUARD = 1e-4
DEDUP_TOL = 1e-9
DEBUG_SWEEP_SAMPLES = 64

BEAD_FRACTIONS = (0.25, 0.5, 0.75)
SLOW_BEAD_FRACTIONS = tuple(i / 10.0 for i in range(1, 10))


def critical_thetas(p: Polynomial, tol: float = DEFAULT_CRITICAL_TOL) -> List[Angle]:
    """Sorted {Arg P(c) mod pi : P'(c) = 0, P(c) != 0}, deduplicated within 1e-9.

    Critical points where P itself vanishes are multiple roots; the curve is
    singular there for every theta, so they are left out with a warning.
    """
    if p.degree < 2:
        return []
    values: List[float] = []
    for c in critical_points(p, tol):
        v = evaluate(p, c)
        if abs(v) <= tol * max(1.0, error_scale(p, c)):
            logger.warning("critical point %r is a multiple root of P; excluded from critical thetas", c)
            continue
        t = Angle(cmath.phase(v), PI).value
        if PI - t < DEDUP_TOL:
            t = 0.0
        values.append(t)
    values.sort()

    out: List[Angle] = []
    for t in values:
        if out and circular_distance(t, out[-1].value, PI) <= DEDUP_TOL:
            continue
        out.append(Angle(t, PI))
    if len(out) > 1 and circular_distance(out[0].value, out[-1].value, PI) <= DEDUP_TOL:
        out.pop()
    return out


@dataclass(frozen=True)
class Bead:
    """Open theta interval (start, end) with its matching.

    The last bead of a necklace wraps past pi: its end is the first critical
    value plus pi and its matching uses the labels of that unreduced theta.
    """

    start: float
    end: float
    matching: Matching
    samples: Tuple[float, ...]

    def contains(self, theta: float) -> bool:
        return self.start < theta < self.end


@dataclass(frozen=True)
class Necklace:
    critical_thetas: Tuple[float, ...]
    beads: Tuple[Bead, ...]

    def to_dict(self) -> dict:
        return {
            "critical_thetas": list(self.critical_thetas),
            "beads": [
                {"interval": [b.start, b.end], "pairs": [list(pr) for pr in b.matching.pairs()]}
                for b in self.beads
            ],
        }


def _sample_thetas(start: float, end: float, fractions: Sequence[float], guard: float) -> List[float]:
    lo, hi = start + guard, end - guard
    if hi <= lo:
        return [0.5 * (start + end)]
    return [min(max(start + f * (end - start), lo), hi) for f in fractions]


def build_necklace(
    p: Polynomial,
    guard: float = DEFAULT_GUARD,
    *,
    fractions: Sequence[float] = BEAD_FRACTIONS,
    radius: Optional[float] = None,
) -> Necklace:
    crits = [c.value for c in critical_thetas(p)]
    if crits:
        bounds = [(a, crits[i + 1] if i + 1 < len(crits) else crits[0] + PI) for i, a in enumerate(crits)]
    else:
        bounds = [(0.0, PI)]

    beads: List[Bead] = []
    for start, end in bounds:
        thetas = _sample_thetas(start, end, fractions, guard)
        found = [matching(p, t, radius) for t in thetas]
        if any(m != found[0] for m in found[1:]):
            raise TransitionError(
                f"unresolved transition structure in bead ({start:.6g}, {end:.6g})",
                thetas=thetas,
                matchings=[m.pairs() for m in found],
            )
        beads.append(Bead(start=start, end=end, matching=found[0], samples=tuple(thetas)))
        logger.debug("bead (%.6g, %.6g): %s", start, end, found[0].pairs())
    return Necklace(critical_thetas=tuple(crits), beads=tuple(beads))


@dataclass(frozen=True)
class SweepMismatch:
    theta: float
    expected: Matching
    actual: Matching


def necklace_debug_sweep(
    p: Polynomial,
    necklace: Necklace,
    samples: int = DEBUG_SWEEP_SAMPLES,
    guard: float = DEFAULT_GUARD,
) -> List[SweepMismatch]:
    """Matchings at `samples` uniform thetas in (0, pi) compared to the bead holding each.

    An empty result means the matching changed only across listed critical values.
    """
    mismatches: List[SweepMismatch] = []
    for j in range(samples):
        theta = PI * (j + 0.5) / samples
        if any(circular_distance(theta, c, PI) < guard for c in necklace.critical_thetas):
            continue
        expected: Optional[Matching] = None
        for bead in necklace.beads:
            if bead.contains(theta):
                expected = bead.matching
                break
            if bead.contains(theta + PI):
                # matching(theta + pi) is matching(theta) relabelled by -1.
                expected = shift_matching(bead.matching, 1)
                break
        if expected is None:
            continue
        actual = matching(p, theta)
        if actual != expected:
            mismatches.append(SweepMismatch(theta=theta, expected=expected, actual=actual))
    if mismatches:
        logger.warning("debug sweep found %d matchings inconsistent with their bead", len(mismatches))
    return mismatches
