import csv

from django.core.management.base import BaseCommand, CommandError

from degeneracy.cc_core import Formulation
from degeneracy.families import FAMILIES, family_scan

from .check_cc import EXIT_INPUT_ERROR

CSV_HEADER = ['param', 'detJ2', 'verdict']


class Command(BaseCommand):
    help = 'Sample detJ2 along a one-parameter family and write CSV'

    def add_arguments(self, parser):
        parser.add_argument('--family', type=str, required=True, choices=FAMILIES)
        parser.add_argument('--form', type=str, default='III', choices=[f.value for f in Formulation])
        parser.add_argument('--from', type=float, required=True, dest='lo', help='First parameter value')
        parser.add_argument('--to', type=float, required=True, dest='hi', help='Last parameter value')
        parser.add_argument('--steps', type=int, required=True, help='Number of samples (>= 2)')
        parser.add_argument('--out', type=str, required=True, help='CSV output path')
        parser.add_argument('--det-tol', type=float, dest='det_tol', help='Relative detJ2 threshold')
        parser.add_argument('--sequential', action='store_true', help='Run every point in-process')

    def handle(self, *args, **options):
        try:
            points = family_scan(options['family'], options['form'], options['lo'], options['hi'],
                                 options['steps'], det_tol=options['det_tol'],
                                 sequential=options['sequential'] or None)
        except ValueError as e:
            raise CommandError(f"Invalid scan: {e}", returncode=EXIT_INPUT_ERROR)

        try:
            with open(options['out'], 'w', newline='', encoding='ascii') as f:
                writer = csv.writer(f, lineterminator='\n')
                writer.writerow(CSV_HEADER)
                for point in points:
                    if point.flagged:
                        writer.writerow([repr(point.parameter), '', f'flagged: {point.error}'])
                    else:
                        writer.writerow([repr(point.parameter), repr(point.detJ2), point.verdict.value])
        except OSError as e:
            raise CommandError(f"Cannot write {options['out']}: {e}", returncode=EXIT_INPUT_ERROR)

        flagged = sum(point.flagged for point in points)
        self.stdout.write(self.style.SUCCESS(
            f"Wrote {len(points)} rows to {options['out']} ({flagged} flagged)"))
