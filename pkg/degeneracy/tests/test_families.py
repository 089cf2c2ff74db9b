import math

import mpmath
import numpy as np
from django.test import SimpleTestCase
from scipy.spatial.distance import pdist

from degeneracy.cc_core import Formulation, is_central_configuration, normalized, residual_norm
from degeneracy.exceptions import CollisionError, DomainError, NoSignChangeError
from degeneracy.families import (
    RHOMBUS_DOMAIN, TRIANGLE_CENTER_CRITICAL_MASS, FamilyPoint, NewtonOptions, evaluate_family_point,
    family_data, family_reduction, family_scan, find_critical_mass, lagrange_configuration,
    newton_solve, residual_identity_check, rhombus_configuration, rhombus_mass, rhombus_masses,
    square_configuration, triangle_center_configuration, triangle_center_detJ2_reference,
)
from degeneracy.reduction import Verdict, reduce

SQRT3 = math.sqrt(3.0)


class NewtonTests(SimpleTestCase):

    def test_perturbed_square_form_one(self):
        rng = np.random.default_rng(2)
        q_init = square_configuration() + 1e-2 * rng.normal(size=8)
        opts = NewtonOptions(normalization='unit_inertia')
        result = newton_solve('I', np.ones(4), q_init, opts)
        self.assertLessEqual(residual_norm('I', result, np.ones(4)), 1e-10)
        target = normalized(square_configuration(), np.ones(4))
        np.testing.assert_allclose(np.sort(pdist(result.points)),
                                   np.sort(pdist(target.reshape(-1, 2))), atol=1e-8)

    def test_perturbed_triangle_form_three(self):
        rng = np.random.default_rng(3)
        m = np.array([1.0, 2.0, 3.0])
        q_init = lagrange_configuration() + 1e-2 * rng.normal(size=6)
        result = newton_solve('III', m, q_init)
        sides = pdist(result.points)
        self.assertLessEqual(sides.max() - sides.min(), 1e-8 * sides.max())
        self.assertTrue(is_central_configuration('III', result, m))

    def test_form_two_keeps_initial_multiplier(self):
        rng = np.random.default_rng(4)
        q_init = square_configuration() + 1e-3 * rng.normal(size=8)
        result = newton_solve('II', np.ones(4), q_init, NewtonOptions(normalization='center'))
        self.assertTrue(is_central_configuration('II', result, np.ones(4)))
        np.testing.assert_allclose(result.points.mean(axis=0), [0.0, 0.0], atol=1e-14)
        with self.assertRaises(ValueError):
            newton_solve('II', np.ones(4), q_init, NewtonOptions(normalization='unit_inertia'))

    def test_coincident_bodies(self):
        q_init = np.array([0.0, 0.0, 0.0, 0.0, 1.0, 0.0])
        with self.assertRaises(CollisionError):
            newton_solve('III', np.ones(3), q_init)

    def test_options_validated(self):
        with self.assertRaises(ValueError):
            NewtonOptions(max_iterations=0)
        with self.assertRaises(ValueError):
            NewtonOptions(tolerance=0.0)
        with self.assertRaises(ValueError):
            NewtonOptions(normalization='canonical')


class RhombusMassTests(SimpleTestCase):

    def test_square_case(self):
        self.assertAlmostEqual(rhombus_mass(1.0), 1.0, delta=1e-14)

    def test_vanishes_at_right_end(self):
        self.assertAlmostEqual(rhombus_mass(SQRT3), 0.0, delta=1e-13)

    def test_extended_precision_baseline(self):
        mpmath.mp.dps = 50
        a = mpmath.mpf(0.7)
        s32 = (a ** 2 + 1) ** mpmath.mpf(1.5)
        expected = a ** 3 * (s32 - 8) / (s32 - 8 * a ** 3)
        self.assertLessEqual(abs(rhombus_mass(0.7) - float(expected)), 1e-12 * float(expected))
        self.assertAlmostEqual(rhombus_mass(0.7), 2.291512, places=5)

    def test_pole(self):
        with self.assertRaises(DomainError):
            rhombus_mass(SQRT3 / 3)
        with self.assertRaises(DomainError):
            rhombus_mass(-1.0)

    def test_strictly_decreasing_on_the_family(self):
        values = [rhombus_mass(a) for a in np.linspace(SQRT3 / 3 + 0.01, SQRT3 - 0.01, 500)]
        self.assertTrue(all(b < a for a, b in zip(values, values[1:])))
        self.assertTrue(all(v > 0 for v in values))

    def test_negative_outside_the_family(self):
        for a in np.linspace(0.05, SQRT3 / 3 - 0.01, 50):
            self.assertLess(rhombus_mass(a), 0)
        for a in np.linspace(SQRT3 + 0.01, 3.0, 50):
            self.assertLess(rhombus_mass(a), 0)

    def test_family_members_are_central(self):
        for a in (0.7, 0.9, 1.3, 1.6):
            q, m = family_data('rhombus', a)
            self.assertTrue(is_central_configuration('III', q, m))


class ResidualIdentityTests(SimpleTestCase):

    def test_square(self):
        self.assertLessEqual(residual_identity_check(1.0, 1.0), 1e-14)

    def test_family_value(self):
        self.assertLessEqual(residual_identity_check(0.8, rhombus_mass(0.8)), 1e-12)

    def test_mass_independent(self):
        self.assertLessEqual(residual_identity_check(0.8, 5.0), 1e-12)

    def test_arguments_validated(self):
        with self.assertRaises(ValueError):
            residual_identity_check(0.8, 0.0)


class TriangleCenterTests(SimpleTestCase):

    def assertRelative(self, value, expected, tol=1e-9):
        self.assertLessEqual(abs(value - expected), tol * abs(expected))

    def test_form_one_closed_form(self):
        for m4 in (0.2, 0.5, 1.0):
            det = family_reduction('triangle-center', 'I', m4).detJ2
            self.assertRelative(det, triangle_center_detJ2_reference('I', m4))

    def test_form_two_closed_form(self):
        for m4 in (0.2, 0.5, 1.0):
            det = family_reduction('triangle-center', 'II', m4).detJ2
            self.assertRelative(det, triangle_center_detJ2_reference('II', m4))

    def test_form_one_closed_form_vanishes_without_central_mass(self):
        self.assertEqual(triangle_center_detJ2_reference('I', 0.0), 0.0)
        self.assertGreater(triangle_center_detJ2_reference('I', 1e-3), 0.0)

    def test_no_closed_form_for_form_three(self):
        with self.assertRaises(ValueError):
            triangle_center_detJ2_reference('III', 0.5)

    def test_critical_factor_changes_sign_but_determinant_does_not(self):
        factor = lambda m4: -249 * m4 + 81 + 64 * SQRT3
        self.assertGreater(factor(0.5), 0)
        self.assertLess(factor(1.0), 0)
        for form in ('I', 'II'):
            low = family_reduction('triangle-center', form, 0.5).detJ2
            high = family_reduction('triangle-center', form, 1.0).detJ2
            self.assertGreater(low * high, 0)

    def test_degenerate_at_critical_mass(self):
        q = triangle_center_configuration()
        m = [1.0, 1.0, 1.0, TRIANGLE_CENTER_CRITICAL_MASS]
        for form in ('I', 'II'):
            self.assertIs(reduce(form, q, m).verdict, Verdict.DEGENERATE)
        self.assertIs(reduce('II', q, [1.0, 1.0, 1.0, 0.5]).verdict, Verdict.NONDEGENERATE)

    def test_critical_mass_form_two(self):
        root = find_critical_mass('triangle-center', 'II', (0.5, 1.0))
        self.assertAlmostEqual(root, TRIANGLE_CENTER_CRITICAL_MASS, delta=1e-10)

    def test_critical_mass_form_one(self):
        root = find_critical_mass('triangle-center', 'I', (0.5, 1.0))
        self.assertAlmostEqual(root, TRIANGLE_CENTER_CRITICAL_MASS, delta=1e-6)

    def test_rhombus_has_no_critical_mass(self):
        with self.assertRaises(NoSignChangeError):
            find_critical_mass('rhombus', 'III', (0.7, 1.6))

    def test_bracket_validated(self):
        with self.assertRaises(ValueError):
            find_critical_mass('triangle-center', 'II', (1.0, 0.5))


class FamilyScanTests(SimpleTestCase):

    def test_rhombus_at_one(self):
        point = evaluate_family_point('rhombus', 'III', 1.0)
        self.assertAlmostEqual(point.detJ2, 4.4064, delta=5e-4)
        self.assertIs(point.verdict, Verdict.NONDEGENERATE)
        self.assertFalse(point.flagged)

    def test_rhombus_positive(self):
        points = family_scan('rhombus', 'III', 0.7, 1.6, 100, sequential=True)
        self.assertEqual(len(points), 100)
        self.assertTrue(all(p.detJ2 > 0 for p in points))
        self.assertEqual([p.parameter for p in points], sorted(p.parameter for p in points))

    def test_reflected_rhombus(self):
        for a in (0.7, 1.2, 1.5):
            m = rhombus_masses(rhombus_mass(a))
            q = rhombus_configuration(a)
            flipped = q * np.array([1.0, -1.0] * 4)
            base = reduce('III', q, m).detJ2
            self.assertLessEqual(abs(reduce('III', flipped, m).detJ2 - base), 1e-10 * abs(base))

    def test_out_of_domain_points_are_flagged(self):
        points = family_scan('rhombus', 'III', 1.5, 2.0, 6, sequential=True)
        flagged = [p for p in points if p.flagged]
        self.assertTrue(flagged)
        self.assertTrue(all(p.parameter >= RHOMBUS_DOMAIN[1] for p in flagged))
        self.assertTrue(all(p.detJ2 > 0 for p in points if not p.flagged))

    def test_triangle_scan_minimum_near_critical_mass(self):
        points = family_scan('triangle-center', 'II', 0.5, 1.0, 51, sequential=True)
        smallest = min(points, key=lambda p: abs(p.detJ2))
        self.assertAlmostEqual(smallest.parameter, TRIANGLE_CENTER_CRITICAL_MASS, delta=0.01)

    def test_scan_is_deterministic(self):
        first = family_scan('rhombus', 'III', 0.8, 1.4, 13, sequential=True)
        second = family_scan('rhombus', 'III', 0.8, 1.4, 13, sequential=True)
        self.assertEqual([p.as_dict() for p in first], [p.as_dict() for p in second])

    def test_point_dict_round_trip(self):
        point = evaluate_family_point('triangle-center', 'I', 0.5)
        again = FamilyPoint.from_dict(point.as_dict())
        self.assertEqual(again.as_dict(), point.as_dict())

    def test_invalid_scans(self):
        with self.assertRaises(ValueError):
            family_scan('rhombus', 'III', 0.8, 1.4, 1)
        with self.assertRaises(ValueError):
            family_scan('square', 'III', 0.8, 1.4, 5)
