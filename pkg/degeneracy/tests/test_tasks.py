from unittest import mock

from django.test import SimpleTestCase, override_settings

from degeneracy.families import FamilyPoint, evaluate_family_point, family_scan
from degeneracy.tasks import evaluate_family_point_task


class EvaluateFamilyPointTaskTests(SimpleTestCase):

    def test_returns_point_dict(self):
        result = evaluate_family_point_task('rhombus', 'III', 1.0)
        self.assertIsNone(result['error'])
        self.assertEqual(result['verdict'], 'nondegenerate')
        self.assertAlmostEqual(result['detJ2'], 4.4064, delta=5e-4)
        self.assertEqual(FamilyPoint.from_dict(result).as_dict(), result)

    def test_domain_error_is_reported(self):
        result = evaluate_family_point_task('rhombus', 'III', 2.5)
        self.assertIsNone(result['detJ2'])
        self.assertIn('outside', result['error'])

    def test_bad_arguments_become_error_dict(self):
        result = evaluate_family_point_task('pentagon', 'III', 1.0)
        self.assertIsNotNone(result['error'])
        self.assertIsNone(result['verdict'])


class ScanDispatchTests(SimpleTestCase):

    @override_settings(CC_USE_CELERY=True, CC_FORCE_SEQUENTIAL=False)
    def test_celery_dispatch(self):
        fake = [evaluate_family_point('rhombus', 'III', a) for a in (1.2, 0.8, 1.0)]
        with mock.patch('degeneracy.families._scan_with_celery', return_value=fake) as dispatch:
            points = family_scan('rhombus', 'III', 0.8, 1.2, 3)
        dispatch.assert_called_once()
        self.assertEqual([p.parameter for p in points], [0.8, 1.0, 1.2])

    @override_settings(CC_USE_CELERY=True, CC_FORCE_SEQUENTIAL=True)
    def test_forced_sequential(self):
        with mock.patch('degeneracy.families._scan_with_celery') as dispatch:
            points = family_scan('rhombus', 'III', 0.8, 1.2, 3)
        dispatch.assert_not_called()
        self.assertEqual(len(points), 3)

    @override_settings(CC_USE_CELERY=True, CC_FORCE_SEQUENTIAL=False)
    def test_explicit_sequential_argument(self):
        with mock.patch('degeneracy.families._scan_with_celery') as dispatch:
            family_scan('rhombus', 'III', 0.8, 1.2, 3, sequential=True)
        dispatch.assert_not_called()
