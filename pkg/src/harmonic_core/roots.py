from __future__ import annotations

import cmath
import logging
import math
from typing import List, Sequence, Tuple

from harmonic_core.errors import ConvergenceError, DomainError

logger = logging.getLogger(__name__)

DEFAULT_MAX_ITER = 200
DEFAULT_STEP_TOL = 1e-15

# Offsets the starting circle from the real axis so symmetric polynomials do not
# start on a symmetry line of their own root set.
_START_ANGLE_OFFSET = 0.4


def _horner_with_derivative(coeffs: Sequence[complex], z: complex) -> Tuple[complex, complex]:
    p = coeffs[-1]
    dp = 0j
    for c in reversed(coeffs[:-1]):
        dp = dp * z + p
        p = p * z + c
    return p, dp


def _error_scale(coeffs: Sequence[complex], z: complex) -> float:
    r = abs(z)
    s = 0.0
    for c in reversed(coeffs):
        s = s * r + abs(c)
    return s


def fujiwara_bound(coeffs: Sequence[complex]) -> float:
    """Upper bound on the modulus of every root (ascending coefficients)."""
    cs = [complex(c) for c in coeffs]
    n = len(cs) - 1
    lead = abs(cs[-1])
    if n < 1 or lead == 0.0:
        raise DomainError("polynomial must have degree >= 1 and a non-zero leading coefficient")
    bound = 0.0
    for k in range(n):
        c = abs(cs[k]) / lead
        if c == 0.0:
            continue
        if k == 0:
            c *= 0.5
        bound = max(bound, c ** (1.0 / (n - k)))
    return 2.0 * bound


def aberth_roots(
    coeffs: Sequence[complex],
    *,
    tol: float = 1e-12,
    max_iter: int = DEFAULT_MAX_ITER,
) -> Tuple[List[complex], List[float]]:
    """All roots of a polynomial by Aberth/Ehrlich simultaneous iteration.

    `coeffs` are in ascending degree order with a non-zero leading coefficient.
    Initial guesses sit on a circle about the root centroid whose radius is
    |p(centroid)|^(1/n) (half the Fujiwara bound when that vanishes). Returns (roots, residuals) with residual_i = |p(z_i)| /
    Horner error scale at z_i. Raises ConvergenceError carrying the best
    residuals when the iteration cap is reached with some residual above tol.
    """
    cs = [complex(c) for c in coeffs]
    while len(cs) > 1 and cs[-1] == 0:
        cs.pop()
    n = len(cs) - 1
    if n < 1:
        raise DomainError("polynomial must have degree >= 1 to have roots")

    lead = cs[-1]
    monic = [c / lead for c in cs]
    if n == 1:
        return [-monic[0]], [0.0]

    centroid = -monic[n - 1] / n
    p_centroid, _ = _horner_with_derivative(monic, centroid)
    if abs(p_centroid) > 0.0:
        # Geometric mean of the root distances from the centroid.
        radius = abs(p_centroid) ** (1.0 / n)
    else:
        radius = 0.5 * fujiwara_bound(monic)
    radius = max(radius, 1e-3)

    z = [centroid + radius * cmath.exp(1j * (2.0 * math.pi * i / n + _START_ANGLE_OFFSET)) for i in range(n)]

    converged = False
    for iteration in range(max_iter):
        converged = True
        for i in range(n):
            zi = z[i]
            p, dp = _horner_with_derivative(monic, zi)
            if p == 0:
                continue
            s = 0j
            for j in range(n):
                if j != i:
                    diff = zi - z[j]
                    if diff != 0:
                        s += 1.0 / diff
            ratio = p / dp if dp != 0 else p
            denom = 1.0 - ratio * s
            delta = ratio / denom if denom != 0 else ratio
            z[i] = zi - delta
            if abs(delta) > DEFAULT_STEP_TOL * max(1.0, abs(zi)):
                converged = False
        if converged:
            logger.debug("aberth converged after %d iterations (degree %d)", iteration + 1, n)
            break

    residuals = []
    for zi in z:
        p, _ = _horner_with_derivative(monic, zi)
        residuals.append(abs(p) / max(_error_scale(monic, zi), 1e-300))

    if not converged and max(residuals) > tol:
        raise ConvergenceError(
            f"root finder did not converge in {max_iter} iterations (worst residual {max(residuals):.3e})",
            residuals=residuals,
        )
    return z, residuals
