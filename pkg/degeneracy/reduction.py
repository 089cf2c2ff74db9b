"""Symmetry reduction of the Jacobian.

P = [G | E] has the k symmetry generators G as its first columns and
standard basis vectors E on the remaining (non-pivot) rows. At a central
configuration P^-1 J P = [[0, J1], [0, J2]] and the configuration is
nondegenerate exactly when det(J2) != 0.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from .cc_core import (
    Formulation, as_configuration, prepared, residual_norm, residual_scale,
)
from .conf import setting
from .exceptions import DegenerateBasisError, NotCentralConfigurationError
from .jacobian import jacobian_analytic

logger = logging.getLogger('degeneracy')

GENERATOR_KINDS = ('translation-x', 'translation-y', 'rotation', 'scaling')

FORM_GENERATORS = {
    Formulation.FORM_I: ('rotation', 'scaling'),
    Formulation.FORM_II: ('translation-x', 'translation-y', 'rotation'),
    Formulation.FORM_III: GENERATOR_KINDS,
}

# Leading rows are kept while their block stays this well conditioned.
LEADING_ROWS_MAX_COND = 1e6


class Verdict(str, Enum):
    NONDEGENERATE = 'nondegenerate'
    DEGENERATE = 'degenerate'
    # only the interval path reports this; floating verdicts always decide
    UNCERTAIN = 'uncertain'

    def __str__(self):
        return self.value


@dataclass(frozen=True, eq=False)
class SymmetryBasis:
    generators: np.ndarray  # (k, 2N), one generator per row
    kinds: Tuple[str, ...]

    @property
    def k(self) -> int:
        return len(self.kinds)

    @property
    def matrix(self) -> np.ndarray:
        """Generators as the columns of a 2N x k matrix."""
        return self.generators.T


@dataclass(frozen=True, eq=False)
class ReductionReport:
    form: Formulation
    P: np.ndarray
    P_inverse: np.ndarray
    conjugated: np.ndarray
    J2: np.ndarray
    detJ2: float
    zero_column_residual: float
    verdict: Verdict
    pivot_rows: Tuple[int, ...]
    hadamard_scale: float
    jacobian: np.ndarray = field(repr=False)
    residual_norm: float = 0.0

    @property
    def k(self) -> int:
        return self.form.symmetry_count


@dataclass(frozen=True, eq=False)
class SpectrumReport:
    eigenvalues: np.ndarray  # sorted by modulus, smallest first
    near_zero: np.ndarray
    spectral_radius: float
    threshold: float

    @property
    def near_zero_count(self) -> int:
        return int(self.near_zero.sum())


def symmetry_generators(form, q) -> SymmetryBasis:
    form = Formulation.from_tag(form)
    pts = as_configuration(q).points
    n = pts.shape[0]
    vectors = {
        'translation-x': np.tile([1.0, 0.0], n),
        'translation-y': np.tile([0.0, 1.0], n),
        'rotation': np.column_stack([-pts[:, 1], pts[:, 0]]).ravel(),
        'scaling': pts.ravel().copy(),
    }
    kinds = FORM_GENERATORS[form]
    generators = np.array([vectors[kind] for kind in kinds])
    rank = np.linalg.matrix_rank(generators)
    if rank < len(kinds):
        raise DegenerateBasisError(f"{form} generators have rank {rank} < {len(kinds)}")
    return SymmetryBasis(generators=generators, kinds=kinds)


def choose_pivot_rows(G: np.ndarray) -> Tuple[int, ...]:
    """Rows carrying the invertible k x k block B1 of P.

    The leading rows are used when their block is well conditioned;
    otherwise greedy column-pivoted QR on G^T picks the rows.
    """
    k = G.shape[1]
    leading = G[:k]
    if np.linalg.cond(leading) <= LEADING_ROWS_MAX_COND:
        return tuple(range(k))
    _, _, piv = scipy.linalg.qr(G.T, pivoting=True, mode='economic')
    rows = tuple(sorted(int(r) for r in piv[:k]))
    logger.debug(f"Leading generator block ill-conditioned, pivoting on rows {rows}")
    return rows


def build_P(basis: SymmetryBasis, n: Optional[int] = None,
            pivot_rows: Optional[Sequence[int]] = None):
    """Return (P, P_inverse, pivot_rows) for the basis."""
    G = basis.matrix
    size, k = G.shape
    if n is not None and 2 * n != size:
        raise ValueError(f"Basis has length {size}, expected {2 * n}")
    if pivot_rows is None:
        pivot_rows = choose_pivot_rows(G)
    pivot_rows = tuple(int(r) for r in pivot_rows)
    if len(pivot_rows) != k or len(set(pivot_rows)) != k or not all(0 <= r < size for r in pivot_rows):
        raise ValueError(f"Need {k} distinct pivot rows in [0, {size}), got {pivot_rows}")
    free_rows = [r for r in range(size) if r not in pivot_rows]
    B1 = G[list(pivot_rows)]
    if np.linalg.cond(B1) > 1.0 / np.finfo(float).eps:
        raise DegenerateBasisError(f"Generator block on rows {pivot_rows} is singular")

    P = np.zeros((size, size))
    P[:, :k] = G
    P[free_rows, np.arange(k, size)] = 1.0

    # [[B1, 0], [B2, I]]^-1 = [[B1^-1, 0], [-B2 B1^-1, I]], columns permuted back
    B1_inv = scipy.linalg.inv(B1)
    P_inverse = np.zeros((size, size))
    P_inverse[:k, list(pivot_rows)] = B1_inv
    P_inverse[k:, list(pivot_rows)] = -G[free_rows] @ B1_inv
    P_inverse[k:, free_rows] = np.eye(size - k)
    return P, P_inverse, pivot_rows


def hadamard_scale(matrix: np.ndarray) -> float:
    """Product of row norms, an upper bound for |det|."""
    return float(np.prod(np.linalg.norm(matrix, axis=1)))


def reduce(form, q, m, tol: Optional[float] = None, det_tol: Optional[float] = None,
           pivot_rows: Optional[Sequence[int]] = None, per_unit_mass: Optional[bool] = None) -> ReductionReport:
    form = Formulation.from_tag(form)
    pts, masses = prepared(q, m)
    if tol is None:
        tol = setting('CC_RESIDUAL_TOL', 1e-9)
    if det_tol is None:
        det_tol = setting('CC_DET_TOL', 1e-8)
    if not tol > 0 or not det_tol > 0:
        raise ValueError(f"Tolerances must be positive, got tol={tol!r}, det_tol={det_tol!r}")
    norm = residual_norm(form, pts, masses)
    bound = tol * residual_scale(pts, masses)
    if norm > bound:
        raise NotCentralConfigurationError(norm, bound)

    basis = symmetry_generators(form, pts)
    P, P_inverse, pivots = build_P(basis, pivot_rows=pivot_rows)
    J = jacobian_analytic(form, pts, masses, per_unit_mass=per_unit_mass)
    conjugated = P_inverse @ J @ P
    k = basis.k
    J2 = conjugated[k:, k:]
    det = float(np.linalg.det(J2))
    scale = hadamard_scale(J2)
    verdict = Verdict.NONDEGENERATE if abs(det) > det_tol * scale else Verdict.DEGENERATE
    report = ReductionReport(
        form=form,
        P=P,
        P_inverse=P_inverse,
        conjugated=conjugated,
        J2=J2,
        detJ2=det,
        zero_column_residual=float(np.max(np.abs(conjugated[:, :k]))),
        verdict=verdict,
        pivot_rows=pivots,
        hadamard_scale=scale,
        jacobian=J,
        residual_norm=norm,
    )
    logger.debug(f"{form}: detJ2={det:.6g} (scale {scale:.3g}) -> {verdict}")
    return report


def degeneracy_verdict(form, q, m, det_tol: Optional[float] = None) -> Tuple[Verdict, float]:
    report = reduce(form, q, m, det_tol=det_tol)
    return report.verdict, report.detJ2


def spectrum(form, q, m, relative_threshold: float = 1e-9,
             per_unit_mass: Optional[bool] = None) -> SpectrumReport:
    """Full eigenvalue listing of J, for inspection only."""
    J = jacobian_analytic(form, q, m, per_unit_mass=per_unit_mass)
    eigenvalues = scipy.linalg.eigvals(J)
    eigenvalues = eigenvalues[np.argsort(np.abs(eigenvalues), kind='stable')]
    radius = float(np.max(np.abs(eigenvalues)))
    threshold = relative_threshold * radius
    return SpectrumReport(
        eigenvalues=eigenvalues,
        near_zero=np.abs(eigenvalues) <= threshold,
        spectral_radius=radius,
        threshold=threshold,
    )
