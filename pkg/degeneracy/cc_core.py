"""Planar N-body central configurations: domain types, scalar invariants and residuals.

Positions are stored as (N, 2) arrays and flattened in the order
(x1, y1, x2, y2, ..., xN, yN). Body indices are 0-based.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

import numpy as np
from numpy.typing import ArrayLike
from scipy.spatial.distance import pdist

from .conf import setting
from .exceptions import CollisionError

logger = logging.getLogger('degeneracy')


class Formulation(Enum):
    """Residual formulation, tagged as in problem files."""

    FORM_I = 'I'
    FORM_II = 'II'
    FORM_III = 'III'

    @property
    def symmetry_count(self) -> int:
        return {'I': 2, 'II': 3, 'III': 4}[self.value]

    @property
    def per_unit_mass(self) -> bool:
        # Forms II and III are differentiated as f_i = F_i / m_i.
        return self is not Formulation.FORM_I

    @classmethod
    def from_tag(cls, tag) -> 'Formulation':
        if isinstance(tag, Formulation):
            return tag
        cleaned = str(tag).strip().upper()
        if cleaned.startswith('FORM'):
            cleaned = cleaned[4:].strip(' _')
        cleaned = {'1': 'I', '2': 'II', '3': 'III'}.get(cleaned, cleaned)
        try:
            return cls(cleaned)
        except ValueError:
            raise ValueError(f"Unknown formulation tag: {tag!r} (expected I, II or III)")

    def __str__(self):
        return f"Form {self.value}"


@dataclass(frozen=True, eq=False)
class MassVector:
    values: np.ndarray

    def __post_init__(self):
        arr = np.array(self.values, dtype=float).ravel()
        if arr.size < 2:
            raise ValueError(f"Need at least two masses, got {arr.size}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("Masses must be finite")
        if np.any(arr <= 0):
            raise ValueError(f"Masses must be strictly positive: {arr.tolist()}")
        arr.setflags(write=False)
        object.__setattr__(self, 'values', arr)

    @property
    def count(self) -> int:
        return self.values.size

    @property
    def total(self) -> float:
        return float(self.values.sum())


@dataclass(frozen=True, eq=False)
class PlanarConfiguration:
    points: np.ndarray

    def __post_init__(self):
        arr = np.array(self.points, dtype=float)
        if arr.ndim == 1:
            if arr.size % 2:
                raise ValueError(f"Flat position vector needs an even length, got {arr.size}")
            arr = arr.reshape(-1, 2)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError(f"Positions must be N planar points, got shape {arr.shape}")
        if arr.shape[0] < 2:
            raise ValueError("Need at least two bodies")
        if not np.all(np.isfinite(arr)):
            raise ValueError("Positions must be finite")
        _check_collisions(arr)
        arr.setflags(write=False)
        object.__setattr__(self, 'points', arr)

    @property
    def count(self) -> int:
        return self.points.shape[0]

    @property
    def flat(self) -> np.ndarray:
        return self.points.ravel()


@dataclass(frozen=True)
class ScalarSummary:
    U: float
    I: float
    c: tuple
    lam: float

    def as_dict(self) -> dict:
        return {'U': self.U, 'I': self.I, 'c': list(self.c), 'lambda': self.lam}


ConfigurationLike = Union[PlanarConfiguration, ArrayLike]
MassesLike = Union[MassVector, ArrayLike]


def _check_collisions(points: np.ndarray):
    distances = pdist(points)
    diameter = float(distances.max())
    tol = setting('CC_COLLISION_TOL', 1e-12)
    threshold = tol * diameter
    worst = int(np.argmin(distances))
    if diameter == 0.0 or distances[worst] <= threshold:
        i, j = _pair_from_condensed(worst, points.shape[0])
        raise CollisionError(i, j, float(distances[worst]))


def _pair_from_condensed(k: int, n: int):
    rows, cols = np.triu_indices(n, 1)
    return int(rows[k]), int(cols[k])


def as_configuration(q: ConfigurationLike) -> PlanarConfiguration:
    if isinstance(q, PlanarConfiguration):
        return q
    return PlanarConfiguration(q)


def as_masses(m: MassesLike) -> MassVector:
    if isinstance(m, MassVector):
        return m
    return MassVector(m)


def prepared(q: ConfigurationLike, m: MassesLike):
    """Validated (points, masses) arrays for a configuration and mass vector."""
    config = as_configuration(q)
    masses = as_masses(m)
    if config.count != masses.count:
        raise ValueError(f"{config.count} positions but {masses.count} masses")
    return config.points, masses.values


def pairwise_distance(q: ConfigurationLike, i: int, j: int) -> float:
    pts = as_configuration(q).points
    n = pts.shape[0]
    if i == j:
        raise ValueError("pairwise_distance needs two different bodies")
    if not (0 <= i < n and 0 <= j < n):
        raise ValueError(f"Body index out of range for {n} bodies: ({i}, {j})")
    return float(np.hypot(*(pts[j] - pts[i])))


def center_of_mass(q: ConfigurationLike, m: MassesLike) -> np.ndarray:
    pts, masses = prepared(q, m)
    return masses @ pts / masses.sum()


def potential(q: ConfigurationLike, m: MassesLike) -> float:
    pts, masses = prepared(q, m)
    rows, cols = np.triu_indices(masses.size, 1)
    return float(np.sum(masses[rows] * masses[cols] / pdist(pts)))


def moment_of_inertia(q: ConfigurationLike, m: MassesLike, about_origin: bool = False) -> float:
    pts, masses = prepared(q, m)
    if not about_origin:
        pts = pts - masses @ pts / masses.sum()
    return float(np.sum(masses * np.sum(pts * pts, axis=1)))


def multiplier(q: ConfigurationLike, m: MassesLike) -> float:
    """lambda = U / I with I taken about the center of mass."""
    return potential(q, m) / moment_of_inertia(q, m)


def scalar_summary(q: ConfigurationLike, m: MassesLike) -> ScalarSummary:
    U = potential(q, m)
    I = moment_of_inertia(q, m)
    c = center_of_mass(q, m)
    return ScalarSummary(U=U, I=I, c=(float(c[0]), float(c[1])), lam=U / I)


def pairwise_geometry(pts: np.ndarray):
    """Displacements d[i, j] = q_j - q_i and distances, with inf on the diagonal."""
    d = pts[None, :, :] - pts[:, None, :]
    r = np.sqrt(np.sum(d * d, axis=2))
    np.fill_diagonal(r, np.inf)
    return d, r


def attraction(pts: np.ndarray, masses: np.ndarray) -> np.ndarray:
    """Sum_j m_i m_j (q_j - q_i) / r_ij^3 per body; also the gradient of U."""
    d, r = pairwise_geometry(pts)
    weights = np.outer(masses, masses) / r ** 3
    return np.einsum('ij,ijk->ik', weights, d)


def residual(form, q: ConfigurationLike, m: MassesLike, lam: Optional[float] = None) -> np.ndarray:
    """Central-configuration residual F(q, m) of length 2N.

    Form I uses q_i as given (no recentering) and I about the origin.
    Form II uses a constant multiplier: ``lam`` when given, else U/I at q.
    Form III uses U/I with I about the center of mass.
    """
    form = Formulation.from_tag(form)
    pts, masses = prepared(q, m)
    if lam is not None and form is not Formulation.FORM_II:
        raise ValueError("A caller-fixed multiplier only applies to Form II")
    U = potential(pts, masses)
    if form is Formulation.FORM_I:
        lam_value = U / moment_of_inertia(pts, masses, about_origin=True)
        offsets = pts
    else:
        c = masses @ pts / masses.sum()
        offsets = pts - c
        if lam is None:
            lam_value = U / float(np.sum(masses * np.sum(offsets * offsets, axis=1)))
        else:
            lam_value = float(lam)
    F = attraction(pts, masses) + lam_value * masses[:, None] * offsets
    return F.ravel()


def critical_point_scale(q: ConfigurationLike, m: MassesLike) -> float:
    """sqrt(I0 / 2), I0 taken about the origin; the Form I row scale of the critical-point equations."""
    return float(np.sqrt(0.5 * moment_of_inertia(q, m, about_origin=True)))


def equations(form, q: ConfigurationLike, m: MassesLike, lam: Optional[float] = None,
              per_unit_mass: Optional[bool] = None) -> np.ndarray:
    """Residual in the convention the Jacobian is taken of.

    Form I is scaled by critical_point_scale; Forms II and III are taken per
    unit mass. Both conventions share the zero set of ``residual``.
    """
    form = Formulation.from_tag(form)
    F = residual(form, q, m, lam=lam)
    if form is Formulation.FORM_I:
        F = critical_point_scale(q, m) * F
    if per_unit_mass is None:
        per_unit_mass = form.per_unit_mass
    if per_unit_mass:
        F = F / np.repeat(as_masses(m).values, 2)
    return F


def residual_scale(q: ConfigurationLike, m: MassesLike) -> float:
    pts, masses = prepared(q, m)
    return max(1.0, float(masses.max()) ** 2 / float(pdist(pts).min()) ** 2)


def residual_norm(form, q: ConfigurationLike, m: MassesLike, lam: Optional[float] = None) -> float:
    return float(np.max(np.abs(residual(form, q, m, lam=lam))))


def is_central_configuration(form, q: ConfigurationLike, m: MassesLike,
                             tol: Optional[float] = None) -> bool:
    if tol is None:
        tol = setting('CC_RESIDUAL_TOL', 1e-9)
    if tol <= 0:
        raise ValueError("tol must be positive")
    norm = residual_norm(form, q, m)
    bound = tol * residual_scale(q, m)
    logger.debug(f"{Formulation.from_tag(form)} residual {norm:.3e} against bound {bound:.3e}")
    return norm <= bound


# Normalization helpers

def recentered(q: ConfigurationLike, m: MassesLike) -> np.ndarray:
    pts, masses = prepared(q, m)
    return (pts - masses @ pts / masses.sum()).ravel()


def normalized(q: ConfigurationLike, m: MassesLike) -> np.ndarray:
    """Recentered and scaled to unit moment of inertia; orientation is left as is."""
    centered = recentered(q, m)
    return centered / np.sqrt(moment_of_inertia(centered, m))


def rotated(q: ConfigurationLike, theta: float) -> np.ndarray:
    pts = as_configuration(q).points
    c, s = np.cos(theta), np.sin(theta)
    return (pts @ np.array([[c, s], [-s, c]])).ravel()


def scaled(q: ConfigurationLike, t: float) -> np.ndarray:
    if t <= 0:
        raise ValueError("Scale factor must be positive")
    return as_configuration(q).flat * t


def translated(q: ConfigurationLike, v) -> np.ndarray:
    pts = as_configuration(q).points
    return (pts + np.asarray(v, dtype=float)[None, :]).ravel()
