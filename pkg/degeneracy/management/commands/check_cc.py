from django.core.management.base import BaseCommand, CommandError
from rest_framework.exceptions import ValidationError

from degeneracy.cc_core import Formulation, residual_norm, scalar_summary
from degeneracy.exceptions import DegeneracyException, NotCentralConfigurationError
from degeneracy.reduction import Verdict, reduce
from degeneracy.serializers import parse_problem, problem_arrays, render, verdict_report

EXIT_INPUT_ERROR = 1
EXIT_DEGENERATE = 10
EXIT_NOT_CENTRAL = 11


def load_problem(path):
    """Read and validate a problem file, mapping failures to exit code 1."""
    try:
        with open(path, encoding='utf-8') as f:
            return parse_problem(f.read())
    except OSError as e:
        raise CommandError(f"Cannot read {path}: {e}", returncode=EXIT_INPUT_ERROR)
    except ValidationError as e:
        raise CommandError(f"Invalid problem file {path}: {e.detail}", returncode=EXIT_INPUT_ERROR)


class Command(BaseCommand):
    help = 'Decide whether a configuration is a nondegenerate central configuration'

    def add_arguments(self, parser):
        parser.add_argument('problem', type=str, help='JSON problem file')
        parser.add_argument('--form', type=str, choices=[f.value for f in Formulation],
                            help='Override the form tag of the file')
        parser.add_argument('--tol', type=float, help='Residual tolerance')
        parser.add_argument('--det-tol', type=float, dest='det_tol', help='Relative detJ2 threshold')

    def handle(self, *args, **options):
        problem = load_problem(options['problem'])
        if options['form']:
            problem['form'] = options['form']
        tolerances = dict(problem.get('tolerances') or {})
        if options['tol'] is not None:
            tolerances['residual_tol'] = options['tol']
        if options['det_tol'] is not None:
            tolerances['det_tol'] = options['det_tol']
        problem['tolerances'] = tolerances
        form = Formulation.from_tag(problem['form'])
        q, m = problem_arrays(problem)

        try:
            summary = scalar_summary(q, m)
            norm = residual_norm(form, q, m)
            report = reduce(form, q, m, tol=tolerances.get('residual_tol'),
                            det_tol=tolerances.get('det_tol'))
        except NotCentralConfigurationError as e:
            self.stdout.write(render(verdict_report(problem, summary, norm,
                                                    verdict='not-a-central-configuration')))
            raise CommandError(str(e), returncode=EXIT_NOT_CENTRAL)
        except (DegeneracyException, ValueError) as e:
            raise CommandError(f"Cannot check configuration: {e}", returncode=EXIT_INPUT_ERROR)

        self.stdout.write(render(verdict_report(problem, summary, norm, report=report)))
        if report.verdict is Verdict.DEGENERATE:
            raise CommandError(f"Degenerate central configuration: detJ2 = {report.detJ2!r}",
                               returncode=EXIT_DEGENERATE)
        self.stdout.write(self.style.SUCCESS(f"{form}: nondegenerate, detJ2 = {report.detJ2!r}"))
