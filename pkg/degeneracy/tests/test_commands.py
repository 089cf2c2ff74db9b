import csv
import json
import math
import os
import tempfile
from io import StringIO

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from degeneracy.families import TRIANGLE_CENTER_CRITICAL_MASS

SQRT2 = math.sqrt(2.0)
SQUARE = [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]]
TRIANGLE_CENTER = [[1.0, 0.0], [-0.5, math.sqrt(3) / 2], [-0.5, -math.sqrt(3) / 2], [0.0, 0.0]]


class CommandTestCase(SimpleTestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def path(self, name):
        return os.path.join(self.tmp.name, name)

    def write_problem(self, name, data):
        path = self.path(name)
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(data, f)
        return path

    def run_command(self, *args, **kwargs):
        out = StringIO()
        call_command(*args, stdout=out, stderr=StringIO(), **kwargs)
        return out.getvalue()

    def assertExitCode(self, code, *args, **kwargs):
        with self.assertRaises(CommandError) as cm:
            self.run_command(*args, **kwargs)
        self.assertEqual(cm.exception.returncode, code)
        return cm.exception


class CheckCommandTests(CommandTestCase):

    def test_square_form_one(self):
        path = self.write_problem('square.json', {'masses': [1, 1, 1, 1], 'positions': SQUARE, 'form': 'I'})
        output = self.run_command('check_cc', path)
        report, _ = json.JSONDecoder().raw_decode(output)
        self.assertEqual(report['verdict'], 'nondegenerate')
        self.assertAlmostEqual(report['detJ2'], 459 / 32 + 3249 * SQRT2 / 256, places=9)
        self.assertEqual(report['pivot_rows'], [0, 1])
        self.assertAlmostEqual(report['summary']['lambda'], 0.25 + SQRT2 / 2, places=12)

    def test_report_reparses_as_problem(self):
        path = self.write_problem('square.json', {'masses': [1, 1, 1, 1], 'positions': SQUARE, 'form': 'III',
                                                  'tolerances': {'det_tol': 1e-7}})
        report, _ = json.JSONDecoder().raw_decode(self.run_command('check_cc', path))
        again_path = self.write_problem('report.json', report)
        again, _ = json.JSONDecoder().raw_decode(self.run_command('check_cc', again_path))
        self.assertEqual(again, report)

    def test_critical_triangle_is_degenerate(self):
        path = self.write_problem('triangle.json', {
            'masses': [1, 1, 1, TRIANGLE_CENTER_CRITICAL_MASS], 'positions': TRIANGLE_CENTER, 'form': 'II'})
        self.assertExitCode(10, 'check_cc', path)

    def test_not_central(self):
        positions = [list(p) for p in SQUARE]
        positions[0][0] = 1.1
        path = self.write_problem('bent.json', {'masses': [1, 1, 1, 1], 'positions': positions, 'form': 'I'})
        error = self.assertExitCode(11, 'check_cc', path)
        self.assertIn('residual', str(error))

    def test_form_override(self):
        path = self.write_problem('square.json', {'masses': [1, 1, 1, 1], 'positions': SQUARE, 'form': 'I'})
        report, _ = json.JSONDecoder().raw_decode(self.run_command('check_cc', path, form='II'))
        self.assertEqual(report['form'], 'II')
        self.assertAlmostEqual(report['detJ2'], 999 / 128 + 1755 * SQRT2 / 512, places=9)

    def test_negative_mass(self):
        path = self.write_problem('bad.json', {'masses': [1, -1, 1, 1], 'positions': SQUARE, 'form': 'I'})
        error = self.assertExitCode(1, 'check_cc', path)
        self.assertIn('masses', str(error))

    def test_zero_tolerance_is_an_input_error(self):
        for tolerances in ({'residual_tol': 0}, {'det_tol': 0.0}):
            path = self.write_problem('zero.json', {'masses': [1, 1, 1, 1], 'positions': SQUARE,
                                                    'form': 'I', 'tolerances': tolerances})
            error = self.assertExitCode(1, 'check_cc', path)
            self.assertIn('positive', str(error))
        path = self.write_problem('square.json', {'masses': [1, 1, 1, 1], 'positions': SQUARE, 'form': 'I'})
        self.assertExitCode(1, 'check_cc', path, tol=0.0)

    def test_length_mismatch_and_bad_json(self):
        path = self.write_problem('short.json', {'masses': [1, 1, 1], 'positions': SQUARE, 'form': 'I'})
        self.assertExitCode(1, 'check_cc', path)
        broken = self.path('broken.json')
        with open(broken, 'w', encoding='utf-8') as f:
            f.write('{"masses": [1, 1,\n')
        error = self.assertExitCode(1, 'check_cc', broken)
        self.assertIn('line', str(error))
        self.assertExitCode(1, 'check_cc', self.path('missing.json'))

    def test_collision(self):
        positions = [[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]
        path = self.write_problem('collide.json', {'masses': [1, 1, 1], 'positions': positions, 'form': 'III'})
        self.assertExitCode(1, 'check_cc', path)


class EigCommandTests(CommandTestCase):

    def test_trivial_zero_counts(self):
        for form, expected in (('I', 2), ('II', 3), ('III', 4)):
            path = self.write_problem(f'square-{form}.json',
                                      {'masses': [1, 1, 1, 1], 'positions': SQUARE, 'form': form})
            output = self.run_command('eig', path)
            self.assertEqual(output.count('near-zero\n'), expected)
            self.assertIn(f'near-zero eigenvalues: {expected} (trivial: {expected})', output)


class ScanCommandTests(CommandTestCase):

    def read_rows(self, path):
        with open(path, newline='', encoding='ascii') as f:
            return list(csv.reader(f))

    def test_rhombus_scan(self):
        out = self.path('rhombus.csv')
        self.run_command('scan', family='rhombus', form='III', lo=0.8, hi=1.2, steps=5, out=out, sequential=True)
        rows = self.read_rows(out)
        self.assertEqual(rows[0], ['param', 'detJ2', 'verdict'])
        self.assertEqual(len(rows), 6)
        middle = min(rows[1:], key=lambda row: abs(float(row[0]) - 1.0))
        self.assertAlmostEqual(float(middle[1]), 4.4064, delta=5e-4)
        self.assertEqual(middle[2], 'nondegenerate')

    def test_scan_is_byte_identical(self):
        first, second = self.path('a.csv'), self.path('b.csv')
        for out in (first, second):
            self.run_command('scan', family='triangle-center', form='II', lo=0.5, hi=1.0, steps=11,
                             out=out, sequential=True)
        with open(first, 'rb') as f, open(second, 'rb') as g:
            self.assertEqual(f.read(), g.read())

    def test_flagged_rows(self):
        out = self.path('flagged.csv')
        self.run_command('scan', family='rhombus', form='III', lo=1.6, hi=2.0, steps=5, out=out, sequential=True)
        rows = self.read_rows(out)[1:]
        self.assertTrue(any(row[2].startswith('flagged') and row[1] == '' for row in rows))

    def test_single_step_rejected(self):
        self.assertExitCode(1, 'scan', family='rhombus', form='III', lo=0.8, hi=1.2, steps=1,
                            out=self.path('x.csv'))


class CertifyCommandTests(CommandTestCase):

    def test_default_run(self):
        out = self.path('rhombus.cert')
        output = self.run_command('certify_rhombus', out=out)
        self.assertIn('Total leaves', output)
        with open(out, encoding='ascii') as f:
            text = f.read()
        self.assertIn('status certified', text)

    def test_truncated_depth(self):
        out = self.path('shallow.cert')
        error = self.assertExitCode(20, 'certify_rhombus', out=out, max_depth=1)
        self.assertIn('regime A', str(error))
        with open(out, encoding='ascii') as f:
            self.assertIn('status failed', f.read())

    def test_unwritable_output(self):
        self.assertExitCode(1, 'certify_rhombus', out=os.path.join(self.tmp.name, 'missing', 'x.cert'))
