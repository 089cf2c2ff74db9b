from django.core.management.base import BaseCommand, CommandError

from degeneracy.cc_core import Formulation
from degeneracy.exceptions import DegeneracyException
from degeneracy.reduction import spectrum
from degeneracy.serializers import problem_arrays

from .check_cc import EXIT_INPUT_ERROR, load_problem


class Command(BaseCommand):
    help = 'List all Jacobian eigenvalues and flag the near-zero ones'

    def add_arguments(self, parser):
        parser.add_argument('problem', type=str, help='JSON problem file')
        parser.add_argument('--form', type=str, choices=[f.value for f in Formulation],
                            help='Override the form tag of the file')
        parser.add_argument('--threshold', type=float, default=1e-9,
                            help='Near-zero threshold relative to the spectral radius')

    def handle(self, *args, **options):
        problem = load_problem(options['problem'])
        form = Formulation.from_tag(options['form'] or problem['form'])
        q, m = problem_arrays(problem)
        try:
            report = spectrum(form, q, m, relative_threshold=options['threshold'])
        except (DegeneracyException, ValueError) as e:
            raise CommandError(f"Cannot compute spectrum: {e}", returncode=EXIT_INPUT_ERROR)

        self.stdout.write(f"{form}: {report.eigenvalues.size} eigenvalues, "
                          f"spectral radius {report.spectral_radius!r}")
        for value, small in zip(report.eigenvalues, report.near_zero):
            flag = '  near-zero' if small else ''
            self.stdout.write(f"{float(value.real)!r} {float(value.imag)!r}{flag}")
        expected = form.symmetry_count
        message = f"near-zero eigenvalues: {report.near_zero_count} (trivial: {expected})"
        if report.near_zero_count == expected:
            self.stdout.write(self.style.SUCCESS(message))
        else:
            self.stdout.write(self.style.WARNING(message))
