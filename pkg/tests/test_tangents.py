import math
import os
import unittest

from harmonic_core.angles import HALF_PI, PI, circular_distance
from harmonic_core.circle_gon import theta_placing_root_on_gon
from harmonic_core.errors import DomainError
from harmonic_core.polynomial import Polynomial, RootMultiset, poly_from_roots
from harmonic_core.rng import XorShift64Star, random_circle_angles
from harmonic_core.tangents import (
    circle_tangency_test,
    deflate_at_root,
    direction_residual,
    tangent_directions,
)

SLOW = os.environ.get("HARMONIC_SLOW_TESTS") == "1"


def seeded_roots(rng: XorShift64Star, n: int) -> RootMultiset:
    return RootMultiset.from_angles(random_circle_angles(rng, n))


class TestDeflate(unittest.TestCase):
    def test_examples(self) -> None:
        double = RootMultiset.from_roots([1.0], [2])
        k, q = deflate_at_root(poly_from_roots(double), double, 0)
        self.assertEqual(k, 2)
        self.assertAlmostEqual(q, 1.0, places=14)

        pair = RootMultiset.from_roots([1.0, -1.0])
        k, q = deflate_at_root(poly_from_roots(pair), pair, 0)
        self.assertEqual(k, 1)
        self.assertAlmostEqual(q, 2.0, places=14)

    def test_matches_product_of_differences(self) -> None:
        roots = seeded_roots(XorShift64Star(6), 6)
        p = poly_from_roots(roots)
        for i, zi in enumerate(roots.points):
            k, q = deflate_at_root(p, roots, i)
            want = 1 + 0j
            for j, zj in enumerate(roots.points):
                if j != i:
                    want *= zi - zj
            self.assertEqual(k, 1)
            self.assertLess(abs(q - want), 1e-10 * max(1.0, abs(want)))

    def test_unclustered_roots_are_reported(self) -> None:
        # The same root listed twice as separate entries leaves Q(z) = 0.
        roots = RootMultiset(entries=((1 + 0j, 1), (1 + 0j, 1)))
        p = Polynomial(coeffs=(1, -2, 1))
        with self.assertRaises(DomainError):
            deflate_at_root(p, roots, 0)

    def test_index_out_of_range(self) -> None:
        roots = RootMultiset.from_roots([1.0])
        with self.assertRaises(DomainError):
            deflate_at_root(poly_from_roots(roots), roots, 1)


class TestTangentDirections(unittest.TestCase):
    def test_examples(self) -> None:
        double = RootMultiset.from_roots([1.0], [2])
        dirs = [d.value for d in tangent_directions(poly_from_roots(double), double, 0, 0.0)]
        self.assertEqual(len(dirs), 2)
        self.assertLess(circular_distance(dirs[0], 0.0, PI), 1e-14)
        self.assertLess(circular_distance(dirs[1], HALF_PI, PI), 1e-14)

        single = RootMultiset.from_roots([1.0])
        dirs = tangent_directions(poly_from_roots(single), single, 0, 0.0)
        self.assertEqual(len(dirs), 1)
        self.assertLess(circular_distance(dirs[0].value, 0.0, PI), 1e-14)

    def test_small_step_along_direction(self) -> None:
        rng = XorShift64Star(77)
        for _ in range(5):
            roots = seeded_roots(rng, 5)
            p = poly_from_roots(roots)
            theta = rng.uniform(0.0, PI)
            for i, z in enumerate(roots.points):
                (d,) = tangent_directions(p, roots, i, theta)
                r1 = direction_residual(p, z, d.value, 1e-5, theta)
                r2 = direction_residual(p, z, d.value, 1e-6, theta)
                self.assertLess(r1, 1e-2)
                # First-order agreement: the residual shrinks with eps.
                self.assertLess(r2, 0.2 * r1 + 1e-9)
                off = direction_residual(p, z, d.value + 0.3, 1e-6, theta)
                self.assertGreater(off, 0.1)

    def test_half_turn_rotates_directions_by_pi_over_k(self) -> None:
        double = RootMultiset.from_roots([1j, -1.0], [2, 1])
        p = poly_from_roots(double)
        a = [d.value for d in tangent_directions(p, double, 0, 0.4)]
        b = [d.value for d in tangent_directions(p, double, 0, 0.4 + PI)]
        self.assertEqual(len(a), 2)
        for x in a:
            self.assertLess(min(circular_distance(x + 0.5 * PI, y, PI) for y in b), 1e-12)


class TestCircleTangency(unittest.TestCase):
    def test_double_root(self) -> None:
        roots = RootMultiset.from_roots([1.0], [2])
        rep = circle_tangency_test(poly_from_roots(roots), roots, 0, 0.0)
        self.assertEqual(rep.multiplicity, 2)
        self.assertAlmostEqual(rep.circle_tangent_dir, HALF_PI, places=14)
        self.assertTrue(rep.coincides)
        self.assertTrue(rep.on_gon)
        self.assertFalse(rep.inconclusive)
        self.assertTrue(rep.consistent)

    def test_single_root(self) -> None:
        roots = RootMultiset.from_roots([1.0])
        rep = circle_tangency_test(poly_from_roots(roots), roots, 0, 0.0)
        self.assertEqual(len(rep.directions), 1)
        self.assertAlmostEqual(rep.circle_tangent_dir, HALF_PI, places=14)
        self.assertFalse(rep.coincides)
        self.assertFalse(rep.on_gon)
        self.assertTrue(rep.consistent)
        self.assertIs(rep.to_dict()["consistent"], True)

    def test_root_placed_on_gon(self) -> None:
        rng = XorShift64Star(55)
        for _ in range(3):
            roots = seeded_roots(rng, 5)
            p = poly_from_roots(roots)
            i = rng.randint(0, 4)
            theta = theta_placing_root_on_gon(roots, i, rng.randint(0, 4))
            rep = circle_tangency_test(p, roots, i, theta)
            self.assertTrue(rep.on_gon)
            self.assertTrue(rep.coincides)

    def test_off_circle_root_rejected(self) -> None:
        roots = RootMultiset.from_roots([1.0, 0.5j])
        with self.assertRaises(DomainError):
            circle_tangency_test(poly_from_roots(roots), roots, 0, 0.0)

    def test_equivalence_on_random_instances(self) -> None:
        generic, placed = (200, 200) if SLOW else (50, 50)
        rng = XorShift64Star(2718)
        for _ in range(generic):
            roots = seeded_roots(rng, rng.randint(1, 10))
            p = poly_from_roots(roots)
            theta = rng.uniform(0.0, PI)
            for i in range(len(roots)):
                rep = circle_tangency_test(p, roots, i, theta)
                self.assertFalse(rep.inconclusive, msg=str(rep.to_dict()))
                self.assertEqual(rep.coincides, rep.on_gon, msg=str(rep.to_dict()))
        for _ in range(placed):
            n = rng.randint(1, 10)
            roots = seeded_roots(rng, n)
            p = poly_from_roots(roots)
            i = rng.randint(0, len(roots) - 1)
            theta = theta_placing_root_on_gon(roots, i, rng.randint(0, n - 1))
            rep = circle_tangency_test(p, roots, i, theta)
            self.assertFalse(rep.inconclusive, msg=str(rep.to_dict()))
            self.assertTrue(rep.coincides and rep.on_gon, msg=str(rep.to_dict()))

    def test_gon_distance_tracks_tangent_distance(self) -> None:
        # Away from the threshold, moving the root off the gon by d tilts the tangent by about n*d/(2k).
        roots = RootMultiset.from_angles([0.0, 2.0, 4.0])
        p = poly_from_roots(roots)
        theta = theta_placing_root_on_gon(roots, 0, 0).value + 1e-3
        rep = circle_tangency_test(p, roots, 0, theta)
        self.assertFalse(rep.on_gon)
        self.assertFalse(rep.coincides)
        self.assertTrue(math.isclose(rep.tangent_distance / rep.gon_distance, 3 / 2, rel_tol=1e-2))


if __name__ == "__main__":
    unittest.main()
