"""Closed-form configurations, Newton refinement, family scans and critical masses."""
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
from scipy import optimize

from .cc_core import (
    Formulation, PlanarConfiguration, equations, multiplier, normalized,
    prepared, recentered,
)
from .conf import setting
from .exceptions import (
    CollisionError, ConvergenceError, DegeneracyException, DomainError, NoSignChangeError,
)
from .jacobian import jacobian_analytic
from .reduction import Verdict, build_P, reduce, symmetry_generators

logger = logging.getLogger('degeneracy')

SQRT3 = math.sqrt(3.0)
TRIANGLE_CENTER_CRITICAL_MASS = (81.0 + 64.0 * SQRT3) / 249.0
RHOMBUS_DOMAIN = (SQRT3 / 3.0, SQRT3)

FAMILIES = ('triangle-center', 'rhombus')
NORMALIZATIONS = ('none', 'center', 'unit_inertia')


# Worked configurations

def square_configuration() -> np.ndarray:
    """Unit-circumradius square centered at the origin."""
    return np.array([1.0, 0.0, 0.0, 1.0, -1.0, 0.0, 0.0, -1.0])


def unit_square_configuration() -> np.ndarray:
    return np.array([0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0, 1.0])


def lagrange_configuration() -> np.ndarray:
    return np.array([1.0, 0.0, -0.5, SQRT3 / 2.0, -0.5, -SQRT3 / 2.0])


def triangle_center_configuration() -> np.ndarray:
    return np.concatenate([lagrange_configuration(), [0.0, 0.0]])


def rhombus_configuration(a: float) -> np.ndarray:
    if a <= 0:
        raise DomainError(f"Rhombus half-diagonal must be positive, got {a}")
    return np.array([0.0, a, -1.0, 0.0, 0.0, -a, 1.0, 0.0])


def rhombus_masses(m1: float) -> np.ndarray:
    return np.array([m1, 1.0, m1, 1.0])


def rhombus_mass(a: float) -> float:
    """m1 for which the rhombus with vertical half-diagonal a is central."""
    if a <= 0:
        raise DomainError(f"Rhombus mass needs a > 0, got {a}")
    s32 = (a * a + 1.0) ** 1.5
    denominator = s32 - 8.0 * a ** 3
    if abs(denominator) < 1e-14:
        raise DomainError(f"Rhombus mass has a pole at a={a!r}")
    return a ** 3 * (s32 - 8.0) / denominator


def residual_identity_check(a: float, m1: float) -> float:
    """|a f_y1 - f_x2 / m1| on the rhombus, using the per-unit-mass Form III equations."""
    if a <= 0 or m1 <= 0:
        raise ValueError("residual_identity_check needs a > 0 and m1 > 0")
    f = equations(Formulation.FORM_III, rhombus_configuration(a), rhombus_masses(m1), per_unit_mass=True)
    f_y1, f_x2 = f[1], f[2]
    return abs(a * f_y1 - f_x2 / m1)


# Closed-form determinants

def lagrange_detJ2(m: Sequence[float]) -> float:
    m1, m2, m3 = m
    return (m1 * m2 + m1 * m3 + m2 * m3) / 4.0


def triangle_center_detJ2_reference(form, m4: float) -> float:
    form = Formulation.from_tag(form)
    factor = -249.0 * m4 + 81.0 + 64.0 * SQRT3
    if form is Formulation.FORM_I:
        return (133.0 - 60.0 * SQRT3) * (SQRT3 + 3.0 * m4) ** 2 * factor ** 2 * m4 ** 2 / 881792.0
    if form is Formulation.FORM_II:
        return -(60.0 * SQRT3 - 133.0) * (SQRT3 + 3.0 * m4) * factor ** 2 / 330672.0
    raise ValueError("No closed form is known for the Form III triangle-plus-center determinant")


# Newton refinement

@dataclass
class NewtonOptions:
    max_iterations: int = 50
    tolerance: float = 1e-11
    damping: float = 1.0
    normalization: str = 'none'
    max_halvings: int = 30

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if not 0 < self.damping <= 1:
            raise ValueError("damping must lie in (0, 1]")
        if self.normalization not in NORMALIZATIONS:
            raise ValueError(f"normalization must be one of {NORMALIZATIONS}")


def newton_solve(form, m, q_init, opts: Optional[NewtonOptions] = None) -> PlanarConfiguration:
    """Damped Gauss-Newton with steps restricted to the complement of the symmetry generators."""
    form = Formulation.from_tag(form)
    opts = opts or NewtonOptions()
    if opts.normalization == 'unit_inertia' and form is Formulation.FORM_II:
        raise ValueError("Form II fixes the scale through lambda; unit_inertia does not apply")
    pts, masses = prepared(q_init, m)
    q = pts.ravel().copy()
    lam = multiplier(pts, masses) if form is Formulation.FORM_II else None
    k = form.symmetry_count

    F = equations(form, q, masses, lam=lam)
    norm = float(np.max(np.abs(F)))
    iteration = 0
    while norm > opts.tolerance:
        if iteration >= opts.max_iterations:
            raise ConvergenceError(iteration, norm)
        iteration += 1
        P, _, _ = build_P(symmetry_generators(form, q))
        E = P[:, k:]
        J = jacobian_analytic(form, q, masses, lam=lam)
        delta, *_ = np.linalg.lstsq(J @ E, -F, rcond=None)
        step = E @ delta

        t = opts.damping
        for _ in range(opts.max_halvings + 1):
            candidate = q + t * step
            try:
                F_candidate = equations(form, candidate, masses, lam=lam)
            except CollisionError:
                F_candidate = None
            if F_candidate is not None and np.max(np.abs(F_candidate)) < norm:
                break
            t *= 0.5
        else:
            raise ConvergenceError(iteration, norm)
        q, F = candidate, F_candidate
        norm = float(np.max(np.abs(F)))
        logger.debug(f"Newton {form} iteration {iteration}: residual {norm:.3e}, step scale {t:g}")

    if opts.normalization == 'center':
        q = recentered(q, masses)
    elif opts.normalization == 'unit_inertia':
        q = normalized(q, masses)
    return PlanarConfiguration(q)


# Families

@dataclass
class FamilyPoint:
    family: str
    form: Formulation
    parameter: float
    configuration: Optional[np.ndarray] = None
    masses: Optional[np.ndarray] = None
    detJ2: Optional[float] = None
    verdict: Optional[Verdict] = None
    error: Optional[str] = None

    @property
    def flagged(self) -> bool:
        return self.error is not None

    def as_dict(self) -> dict:
        return {
            'family': self.family,
            'form': self.form.value,
            'parameter': self.parameter,
            'configuration': None if self.configuration is None else self.configuration.tolist(),
            'masses': None if self.masses is None else self.masses.tolist(),
            'detJ2': self.detJ2,
            'verdict': None if self.verdict is None else self.verdict.value,
            'error': self.error,
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'FamilyPoint':
        return cls(
            family=data['family'],
            form=Formulation.from_tag(data['form']),
            parameter=float(data['parameter']),
            configuration=None if data.get('configuration') is None else np.array(data['configuration']),
            masses=None if data.get('masses') is None else np.array(data['masses']),
            detJ2=data.get('detJ2'),
            verdict=None if data.get('verdict') is None else Verdict(data['verdict']),
            error=data.get('error'),
        )


def family_name(family: str) -> str:
    name = str(family).strip().lower().replace('_', '-')
    if name not in FAMILIES:
        raise ValueError(f"Unknown family {family!r} (expected one of {FAMILIES})")
    return name


def family_data(family: str, parameter: float) -> Tuple[np.ndarray, np.ndarray]:
    """Closed-form (configuration, masses) of a family member."""
    family = family_name(family)
    if family == 'triangle-center':
        if parameter <= 0:
            raise DomainError(f"Central mass must be positive, got {parameter}")
        return triangle_center_configuration(), np.array([1.0, 1.0, 1.0, parameter])
    lo, hi = RHOMBUS_DOMAIN
    if not lo < parameter < hi:
        raise DomainError(f"Rhombus parameter {parameter} lies outside ({lo}, {hi})")
    m1 = rhombus_mass(parameter)
    if m1 <= 0:
        raise DomainError(f"Rhombus mass {m1} is not positive at a={parameter}")
    return rhombus_configuration(parameter), rhombus_masses(m1)


def family_reduction(family: str, form, parameter: float, **kwargs):
    q, m = family_data(family, parameter)
    return reduce(form, q, m, **kwargs)


def evaluate_family_point(family: str, form, parameter: float,
                          det_tol: Optional[float] = None) -> FamilyPoint:
    family = family_name(family)
    form = Formulation.from_tag(form)
    point = FamilyPoint(family=family, form=form, parameter=float(parameter))
    try:
        q, m = family_data(family, parameter)
        point.configuration, point.masses = q, m
        report = reduce(form, q, m, det_tol=det_tol)
    except DegeneracyException as e:
        logger.warning(f"{family} {form} at {parameter!r} flagged: {e}")
        point.error = str(e)
        return point
    point.detJ2 = report.detJ2
    point.verdict = report.verdict
    return point


def _scan_with_celery(family: str, form: Formulation, parameters, det_tol) -> List[FamilyPoint]:
    from celery import group
    from .tasks import evaluate_family_point_task

    job = group(evaluate_family_point_task.s(family, form.value, float(p), det_tol) for p in parameters)
    return [FamilyPoint.from_dict(result) for result in job.apply_async().get()]


def family_scan(family: str, form, lo: float, hi: float, steps: int,
                det_tol: Optional[float] = None, sequential: Optional[bool] = None) -> List[FamilyPoint]:
    family = family_name(family)
    form = Formulation.from_tag(form)
    if steps < 2:
        raise ValueError(f"A scan needs at least 2 steps, got {steps}")
    if not lo < hi:
        raise ValueError(f"Empty scan range [{lo}, {hi}]")
    parameters = np.linspace(lo, hi, steps)
    if sequential is None:
        sequential = setting('CC_FORCE_SEQUENTIAL', False) or not setting('CC_USE_CELERY', False)
    logger.info(f"Scanning {family} under {form} on [{lo}, {hi}] with {steps} points"
                f" ({'sequential' if sequential else 'celery'})")
    if sequential:
        points = [evaluate_family_point(family, form, float(p), det_tol=det_tol) for p in parameters]
    else:
        points = _scan_with_celery(family, form, parameters, det_tol)
    return sorted(points, key=lambda point: point.parameter)


# Critical masses

def _smallest_singular_value(family: str, form: Formulation, parameter: float) -> float:
    J2 = family_reduction(family, form, parameter).J2
    return float(scipy.linalg.svdvals(J2)[-1])


def find_critical_mass(family: str, form, bracket: Tuple[float, float],
                       root_tol: Optional[float] = None, grid: int = 65) -> float:
    """Parameter value in the bracket where detJ2 vanishes.

    A sign change is refined with Brent's method. Without one, detJ2 may
    still have a double root; the smallest singular value of J2, which
    vanishes linearly there, is minimized by golden-section search and the
    minimizer is accepted when |detJ2| is at round-off level.
    """
    family = family_name(family)
    form = Formulation.from_tag(form)
    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo < hi:
        raise ValueError(f"Bracket must satisfy lo < hi, got {bracket}")
    if root_tol is None:
        root_tol = setting('CC_ROOT_TOL', 1e-12)

    def det(p):
        return family_reduction(family, form, p).detJ2

    f_lo, f_hi = det(lo), det(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if np.sign(f_lo) != np.sign(f_hi):
        root = optimize.brentq(det, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
        logger.info(f"{family} {form}: sign change of detJ2 at {root!r}")
        return float(root)

    logger.info(f"{family} {form}: detJ2 keeps its sign on [{lo}, {hi}], looking for a double root")
    samples = np.linspace(lo, hi, grid)
    sigma = np.array([_smallest_singular_value(family, form, p) for p in samples])
    best = int(np.argmin(sigma))
    candidate = float(samples[best])
    if 0 < best < grid - 1:
        objective = lambda p: _smallest_singular_value(family, form, p)
        try:
            result = optimize.minimize_scalar(
                objective,
                bracket=(samples[best - 1], samples[best], samples[best + 1]),
                method='golden',
                options={'xtol': 1e-14, 'maxiter': 5000},
            )
            candidate = float(result.x)
        except ValueError:
            result = optimize.minimize_scalar(
                objective, bounds=(samples[best - 1], samples[best + 1]), method='bounded',
                options={'xatol': 1e-13})
            candidate = float(result.x)

    report = family_reduction(family, form, candidate)
    if abs(report.detJ2) <= root_tol * report.hadamard_scale:
        logger.info(f"{family} {form}: double root of detJ2 at {candidate!r}")
        return candidate
    raise NoSignChangeError(
        f"detJ2 has no sign change on [{lo}, {hi}] and its minimum |detJ2|={abs(report.detJ2):.3e}"
        f" at {candidate!r} is not at root level")
