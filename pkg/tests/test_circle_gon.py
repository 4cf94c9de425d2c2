import cmath
import math
import unittest
from typing import Sequence

import numpy as np

from harmonic_cli.parsing import batch_instances
from harmonic_core.angles import PI, TWO_PI, arg, circular_distance
from harmonic_core.circle_gon import (
    circle_polynomial,
    circle_zeros,
    gon_vertices,
    match_circular,
    omega,
    theta_placing_root_on_gon,
    verify_proposition,
)
from harmonic_core.errors import DegenerateCurveError, DomainError
from harmonic_core.polynomial import Polynomial, RootMultiset, poly_from_roots
from harmonic_core.rng import XorShift64Star, random_circle_angles


def _assert_same_circle_set(tc: unittest.TestCase, got: Sequence[float], want: Sequence[float], tol: float) -> None:
    tc.assertEqual(len(got), len(want), msg=f"got={got!r} want={want!r}")
    matched, left_a, left_b = match_circular([(a, "x") for a in want], list(got))
    tc.assertEqual(left_a, [])
    tc.assertEqual(left_b, [])
    for m in matched:
        tc.assertLess(m.distance, tol, msg=f"got={got!r} want={want!r}")


def _seeded_roots(seed: int, n: int) -> RootMultiset:
    return RootMultiset.from_angles(random_circle_angles(XorShift64Star(seed), n))


class TestOmegaAndGon(unittest.TestCase):
    def test_single_root(self) -> None:
        roots = RootMultiset.from_angles([0.0])
        self.assertLess(circular_distance(omega(roots, 0.0).value, PI), 1e-15)
        gon = gon_vertices(roots, 0.0)
        self.assertEqual(gon.n, 1)
        self.assertLess(abs(gon.vertices[0] + 1), 1e-15)

    def test_two_roots(self) -> None:
        roots = RootMultiset.from_roots([1.0, -1.0])
        self.assertLess(circular_distance(omega(roots, 0.0).value, 0.5 * PI), 1e-15)
        _assert_same_circle_set(self, gon_vertices(roots, 0.0).angles, [0.5 * PI, 1.5 * PI], 1e-14)

    def test_two_roots_quarter_turn(self) -> None:
        roots = RootMultiset.from_roots([1.0, -1.0])
        gon = gon_vertices(roots, 0.5 * PI)
        _assert_same_circle_set(self, gon.angles, [0.0, PI], 1e-14)
        zs = circle_zeros(poly_from_roots(roots), 0.5 * PI)
        # Found zeros minus the root angles leave the gon.
        rest = list(zs.expanded_angles())
        for root_angle in (0.0, PI):
            j = min(range(len(rest)), key=lambda i: circular_distance(rest[i], root_angle))
            rest.pop(j)
        _assert_same_circle_set(self, rest, gon.angles, 1e-9)

    def test_cube_roots_of_unity_against_zeros(self) -> None:
        roots = RootMultiset.from_angles([0.0, TWO_PI / 3, 2 * TWO_PI / 3])
        report = verify_proposition(roots, 0.9)
        self.assertTrue(report.passed)
        self.assertLess(circular_distance(report.omega, omega(roots, 0.9).value), 1e-15)

    def test_off_circle_root_rejected(self) -> None:
        roots = RootMultiset.from_roots([1.0, 1.1j])
        with self.assertRaises(DomainError) as cm:
            omega(roots, 0.0)
        self.assertIn("root #1", str(cm.exception))
        with self.assertRaises(DomainError):
            verify_proposition(roots, 0.0)

    def test_gon_unchanged_under_half_turn(self) -> None:
        rng = XorShift64Star(10)
        for _ in range(50):
            n = rng.randint(1, 10)
            roots = RootMultiset.from_angles(random_circle_angles(rng, n))
            theta = rng.uniform(0.0, PI)
            a = gon_vertices(roots, theta).angles
            b = gon_vertices(roots, theta + PI).angles
            _assert_same_circle_set(self, a, b, 1e-12)

    def test_rotation_equivariance(self) -> None:
        rng = XorShift64Star(11)
        for _ in range(50):
            n = rng.randint(1, 10)
            roots = RootMultiset.from_angles(random_circle_angles(rng, n))
            theta = rng.uniform(0.0, PI)
            alpha = rng.uniform(0.0, TWO_PI)
            base = gon_vertices(roots, theta).angles
            rotated = gon_vertices(roots.rotated(alpha), theta).angles
            _assert_same_circle_set(self, rotated, [a - alpha for a in base], 1e-9)

    def test_omega_moves_at_rate_two_over_n(self) -> None:
        rng = XorShift64Star(12)
        for _ in range(50):
            n = rng.randint(1, 10)
            roots = RootMultiset.from_angles(random_circle_angles(rng, n))
            theta = rng.uniform(0.0, PI)
            delta = 0.01
            moved = omega(roots, theta + delta).value
            self.assertLess(circular_distance(moved, omega(roots, theta).value + 2.0 * delta / n), 1e-12)


class TestCircleZeros(unittest.TestCase):
    def test_linear(self) -> None:
        zs = circle_zeros(poly_from_roots(RootMultiset.from_roots([1.0])), 0.0)
        _assert_same_circle_set(self, zs.expanded_angles(), [0.0, PI], 1e-12)

    def test_quadratic(self) -> None:
        zs = circle_zeros(poly_from_roots(RootMultiset.from_roots([1.0, -1.0])), 0.0)
        _assert_same_circle_set(self, zs.expanded_angles(), [0.0, 0.5 * PI, PI, 1.5 * PI], 1e-12)
        self.assertEqual(zs.total_multiplicity, 4)

    def test_double_root(self) -> None:
        # g(t) = -4 sin^2(t/2) sin(t): order three at 0, simple at pi.
        zs = circle_zeros(poly_from_roots(RootMultiset.from_roots([1.0], [2])), 0.0)
        self.assertEqual(zs.total_multiplicity, 4)
        self.assertEqual(len(zs.zeros), 2)
        by_mult = {z.multiplicity: z.angle for z in zs.zeros}
        self.assertEqual(sorted(by_mult), [1, 3])
        self.assertLess(circular_distance(by_mult[3], 0.0), 1e-8)
        self.assertLess(circular_distance(by_mult[1], PI), 1e-12)

    def test_too_few_samples(self) -> None:
        with self.assertRaises(DomainError):
            circle_zeros(poly_from_roots(RootMultiset.from_roots([1.0, -1.0])), 0.0, samples=31)

    def test_identically_zero_on_circle(self) -> None:
        with self.assertRaises(DegenerateCurveError):
            circle_zeros(Polynomial(coeffs=(2, 0)), 0.0)

    def test_count_between_n_and_2n(self) -> None:
        for seed in range(5):
            n = 3 + seed
            p = poly_from_roots(_seeded_roots(seed, n))
            zs = circle_zeros(p, 0.3 * seed)
            self.assertGreaterEqual(len(zs.zeros), n)
            self.assertLessEqual(len(zs.zeros), 2 * n)
            self.assertEqual(zs.total_multiplicity, 2 * n)

    def test_agrees_with_circle_polynomial_roots(self) -> None:
        for seed in (1, 2, 3):
            n = 4 + seed
            theta = 0.25 * seed
            p = poly_from_roots(_seeded_roots(100 + seed, n))
            h = circle_polynomial(p, theta)
            self.assertEqual(h.degree, 2 * n)
            ws = np.roots(list(reversed(h.coeffs)))
            for w in ws:
                self.assertLess(abs(abs(complex(w)) - 1.0), 1e-6)
            want = [arg(complex(w)) for w in ws]
            _assert_same_circle_set(self, circle_zeros(p, theta).expanded_angles(), want, 1e-6)


class TestVerifyProposition(unittest.TestCase):
    def test_single_root(self) -> None:
        report = verify_proposition(RootMultiset.from_angles([0.0]), 0.0)
        self.assertTrue(report.passed)
        _assert_same_circle_set(self, report.zeros.expanded_angles(), [0.0, PI], 1e-12)
        self.assertEqual(sorted(m.source for m in report.matched_pairs), ["gon", "root"])

    def test_seeded_degree_seven(self) -> None:
        report = verify_proposition(_seeded_roots(42, 7), 0.0)
        self.assertTrue(report.passed)
        self.assertLess(report.max_distance, 1e-8)
        self.assertEqual(len(report.matched_pairs), 14)
        d = report.to_dict()
        self.assertIs(d["pass"], True)
        self.assertEqual(len(d["predicted"]), 14)
        self.assertEqual(d["unmatched_found"], [])

    def test_double_root_fills_root_and_gon_slots(self) -> None:
        report = verify_proposition(RootMultiset.from_roots([1.0], [2]), 0.0)
        self.assertTrue(report.passed)
        _assert_same_circle_set(self, list(report.predicted), [0.0, 0.0, 0.0, PI], 1e-12)

    def test_hundred_seeded_instances(self) -> None:
        for i, (angles, theta) in enumerate(batch_instances(1, 100)):
            report = verify_proposition(RootMultiset.from_angles(angles), theta)
            self.assertTrue(report.passed, msg=f"instance {i}: n={len(angles)} theta={theta!r}")


class TestThetaPlacingRootOnGon(unittest.TestCase):
    def test_single_root(self) -> None:
        roots = RootMultiset.from_angles([0.0])
        theta = theta_placing_root_on_gon(roots, 0, 1)
        self.assertAlmostEqual(theta.value, 0.5 * PI, places=14)
        self.assertLess(abs(gon_vertices(roots, theta).vertices[0] - 1), 1e-14)

    def test_double_root(self) -> None:
        roots = RootMultiset.from_roots([1.0], [2])
        for slot in (0, 1):
            theta = theta_placing_root_on_gon(roots, 0, slot)
            self.assertLess(circular_distance(theta.value, 0.0, PI), 1e-14)

    def test_substitution(self) -> None:
        roots = _seeded_roots(5, 5)
        for i, z in enumerate(roots.points):
            for slot in range(5):
                theta = theta_placing_root_on_gon(roots, i, slot)
                self.assertEqual(theta.modulus, PI)
                self.assertLess(gon_vertices(roots, theta).distance_to(arg(z)), 1e-12)

    def test_index_out_of_range(self) -> None:
        with self.assertRaises(DomainError):
            theta_placing_root_on_gon(_seeded_roots(5, 3), 3, 0)


if __name__ == "__main__":
    unittest.main()
