import time

from django.core.management.base import BaseCommand, CommandError

from degeneracy.certifier import DEFAULT_THRESHOLD, certify_rhombus_nondegeneracy

from .check_cc import EXIT_INPUT_ERROR

EXIT_NOT_CERTIFIED = 20


class Command(BaseCommand):
    help = 'Prove det(J2) > 0 along the rhombus family with interval arithmetic'

    def add_arguments(self, parser):
        parser.add_argument('--out', type=str, required=True, help='Certificate output path')
        parser.add_argument('--max-depth', type=int, dest='max_depth', help='Bisection depth limit')
        parser.add_argument('--threshold', type=float, default=DEFAULT_THRESHOLD,
                            help='Mass threshold M of the small-a regime')

    def handle(self, *args, **options):
        # fail on an unwritable path before spending time on the proof
        try:
            open(options['out'], 'a').close()
        except OSError as e:
            raise CommandError(f"Cannot write {options['out']}: {e}", returncode=EXIT_INPUT_ERROR)

        started = time.monotonic()
        certificate = certify_rhombus_nondegeneracy(max_depth=options['max_depth'],
                                                    threshold=options['threshold'])
        elapsed = time.monotonic() - started
        try:
            certificate.write(options['out'])
        except OSError as e:
            raise CommandError(f"Cannot write {options['out']}: {e}", returncode=EXIT_INPUT_ERROR)

        a, b = certificate.regime_a, certificate.regime_b
        self.stdout.write(f"Regime A on [{a.domain.lo!r}, {a.domain.hi!r}]: "
                          f"{len(a.leaves)} leaves, {'certified' if a.certified else 'failed'}")
        self.stdout.write(f"Regime B on [{b.box.lo!r}, {b.box.hi!r}]: m1 >= {b.mass_lower_bound!r}, "
                          f"G positive beyond {b.threshold!r}: {b.tail_ok}")
        self.stdout.write(f"Total leaves: {len(a.leaves)} ({elapsed:.1f}s)")
        if not certificate.certified:
            raise CommandError(f"Certification failed: {certificate.failure}", returncode=EXIT_NOT_CERTIFIED)
        self.stdout.write(self.style.SUCCESS(f"Certificate written to {options['out']}"))
