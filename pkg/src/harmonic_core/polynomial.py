"""Root multisets and the monic polynomials built from them.

Coefficients are stored in ascending degree order: coeffs[k] multiplies z^k.
"""

from __future__ import annotations

import cmath
import logging
import math
import sys
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from harmonic_core.errors import ConvergenceError, DomainError
from harmonic_core.roots import aberth_roots

logger = logging.getLogger(__name__)

MACHINE_EPS = sys.float_info.epsilon

# Relative to max(1, max |z_i|).
CLUSTER_TOL = 1e-9

DEFAULT_CRITICAL_TOL = 1e-10

ComplexLike = Union[complex, float, int, Tuple[float, float], Sequence[float]]


def as_complex(value: ComplexLike) -> complex:
    """Coerce a number or an (re, im) pair to a finite complex."""
    if isinstance(value, (tuple, list)):
        if len(value) != 2:
            raise DomainError(f"expected [re, im], got {value!r}")
        z = complex(float(value[0]), float(value[1]))
    else:
        try:
            z = complex(value)
        except (TypeError, ValueError) as e:
            raise DomainError(f"not a complex number: {value!r}") from e
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError(f"complex values must be finite, got {value!r}")
    return z


@dataclass(frozen=True)
class RootMultiset:
    """Distinct roots with multiplicities, in input order."""

    entries: Tuple[Tuple[complex, int], ...]

    def __post_init__(self) -> None:
        if not self.entries:
            raise DomainError("root multiset must be non-empty")
        for z, m in self.entries:
            if int(m) != m or m < 1:
                raise DomainError(f"multiplicity must be an integer >= 1, got {m!r} for root {z!r}")
            as_complex(z)

    @staticmethod
    def from_roots(
        roots: Iterable[ComplexLike],
        multiplicities: Optional[Sequence[int]] = None,
        *,
        cluster_tol: float = CLUSTER_TOL,
    ) -> "RootMultiset":
        """Build a multiset, merging roots closer than cluster_tol * max(1, max |z_i|).

        A merged root keeps the position of its first occurrence.
        """
        points = [as_complex(r) for r in roots]
        if not points:
            raise DomainError("root multiset must be non-empty")
        if multiplicities is None:
            mults = [1] * len(points)
        else:
            mults = [int(m) for m in multiplicities]
            if len(mults) != len(points):
                raise DomainError(
                    f"got {len(points)} roots but {len(mults)} multiplicities"
                )
        scale = max(1.0, max(abs(z) for z in points))
        tol = cluster_tol * scale

        merged: List[List] = []
        for z, m in zip(points, mults):
            if m < 1:
                raise DomainError(f"multiplicity must be >= 1, got {m} for root {z!r}")
            for entry in merged:
                if abs(entry[0] - z) <= tol:
                    logger.info("merging root %r into %r (distance %.3e)", z, entry[0], abs(entry[0] - z))
                    entry[1] += m
                    break
            else:
                merged.append([z, m])
        return RootMultiset(entries=tuple((z, m) for z, m in merged))

    @staticmethod
    def from_angles(angles: Iterable[float], multiplicities: Optional[Sequence[int]] = None) -> "RootMultiset":
        """Roots e^{i a} on the unit circle."""
        return RootMultiset.from_roots([cmath.exp(1j * float(a)) for a in angles], multiplicities)

    @property
    def degree(self) -> int:
        return sum(m for _, m in self.entries)

    @property
    def points(self) -> List[complex]:
        return [z for z, _ in self.entries]

    @property
    def multiplicities(self) -> List[int]:
        return [m for _, m in self.entries]

    def expanded(self) -> List[complex]:
        """Every root repeated by its multiplicity."""
        out: List[complex] = []
        for z, m in self.entries:
            out.extend([z] * m)
        return out

    def max_modulus(self) -> float:
        return max(abs(z) for z, _ in self.entries)

    def centroid(self) -> complex:
        return sum(z * m for z, m in self.entries) / self.degree

    def rotated(self, alpha: float) -> "RootMultiset":
        """Every root multiplied by e^{i alpha}."""
        rot = cmath.exp(1j * alpha)
        return RootMultiset(entries=tuple((z * rot, m) for z, m in self.entries))

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class Polynomial:
    """Complex polynomial, ascending coefficients.

    `condition` is the construction bound kappa: for a polynomial built by
    `poly_from_roots`, |P(z_i)| <= kappa * eps at every stored root.
    """

    coeffs: Tuple[complex, ...]
    condition: float = 1.0
    roots: Optional[RootMultiset] = None

    def __post_init__(self) -> None:
        if not self.coeffs:
            raise DomainError("polynomial needs at least one coefficient")
        object.__setattr__(self, "coeffs", tuple(as_complex(c) for c in self.coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_monic(self) -> bool:
        return self.coeffs[-1] == 1

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def max_coeff(self) -> float:
        return max(abs(c) for c in self.coeffs)

    def __call__(self, z: complex) -> complex:
        return evaluate(self, z)


def poly_from_roots(roots: RootMultiset) -> Polynomial:
    """Monic P(z) = prod (z - z_i) by repeated multiplication by (z - z_i)."""
    if roots.degree < 1:
        raise DomainError("root multiset must be non-empty")
    coeffs: List[complex] = [1 + 0j]
    for z in roots.expanded():
        nxt = [0j] * (len(coeffs) + 1)
        for k, c in enumerate(coeffs):
            nxt[k + 1] += c
            nxt[k] -= z * c
        coeffs = nxt
    coeffs[-1] = 1 + 0j

    n = roots.degree
    big = max(1.0, roots.max_modulus())
    kappa = 4.0 * (n + 1) * (big ** n)
    for z, m in roots.entries:
        kappa *= (1.0 + abs(z)) ** m
    return Polynomial(coeffs=tuple(coeffs), condition=kappa, roots=roots)


def evaluate(p: Polynomial, z: complex) -> complex:
    """Horner evaluation of P at z."""
    acc = 0j
    for c in reversed(p.coeffs):
        acc = acc * z + c
    return acc


def evaluate_with_derivative(p: Polynomial, z: complex) -> Tuple[complex, complex]:
    """(P(z), P'(z)) in one Horner pass."""
    cs = p.coeffs
    val = cs[-1]
    der = 0j
    for c in reversed(cs[:-1]):
        der = der * z + val
        val = val * z + c
    return val, der


def error_scale(p: Polynomial, z: complex) -> float:
    """sum |c_k| |z|^k, the magnitude that rounding errors of Horner are relative to."""
    r = abs(z)
    s = 0.0
    for c in reversed(p.coeffs):
        s = s * r + abs(c)
    return s


def evaluate_array(p: Polynomial, z: np.ndarray) -> np.ndarray:
    """Horner evaluation over a numpy array of points."""
    acc = np.zeros_like(z, dtype=np.complex128)
    for c in reversed(p.coeffs):
        acc = acc * z + c
    return acc


def evaluate_array_with_derivative(p: Polynomial, z: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    cs = p.coeffs
    val = np.full(np.shape(z), cs[-1], dtype=np.complex128)
    der = np.zeros(np.shape(z), dtype=np.complex128)
    for c in reversed(cs[:-1]):
        der = der * z + val
        val = val * z + c
    return val, der


def derivative(p: Polynomial) -> Polynomial:
    """Exact coefficient-wise derivative. Not monic in general."""
    if p.degree < 1:
        logger.warning("derivative of a constant polynomial is the zero polynomial")
        return Polynomial(coeffs=(0j,))
    return Polynomial(coeffs=tuple(k * p.coeffs[k] for k in range(1, len(p.coeffs))))


def critical_points(p: Polynomial, tol: float = DEFAULT_CRITICAL_TOL) -> List[complex]:
    """All n-1 roots of P' (with multiplicity), by simultaneous iteration.

    Every returned c satisfies |P'(c)| <= tol * max |coefficient of P'| * max(1, |c|)^(n-1).
    Inside the closed unit disk, where every critical point lies when the roots
    are on the unit circle, this is tol * max |coefficient of P'|; outside it the
    bound grows with |c| like P' itself.
    """
    if p.degree < 2:
        raise DomainError(f"critical points need degree >= 2, got degree {p.degree}")
    dp = derivative(p)
    found, _ = aberth_roots(dp.coeffs, tol=tol)

    scale = dp.max_coeff()
    residuals = []
    for c in found:
        bound = tol * scale * max(1.0, abs(c)) ** (dp.degree)
        residuals.append(abs(evaluate(dp, c)) / bound)
    if residuals and max(residuals) > 1.0:
        raise ConvergenceError(
            f"critical points not resolved to tolerance {tol:g}",
            residuals=[r * tol for r in residuals],
        )
    return sorted(found, key=lambda c: (round(c.real, 12), round(c.imag, 12)))
