"""Jacobian of the central-configuration equations with respect to positions.

Rows and columns are ordered (x1, y1, ..., xN, yN). By default Forms II and
III are differentiated per unit mass and Form I in force form scaled by
sqrt(I0 / 2), matching cc_core.equations; pass ``per_unit_mass`` to override.
"""
import logging
from typing import Optional

import numpy as np

from .cc_core import (
    Formulation, attraction, equations, multiplier, pairwise_geometry, potential, prepared,
)
from .conf import setting

logger = logging.getLogger('degeneracy')


def _pairwise_blocks(pts: np.ndarray, masses: np.ndarray) -> np.ndarray:
    """(N, N, 2, 2) blocks of the attraction term: off-diagonal m_i m_j K(q_j - q_i)."""
    d, r = pairwise_geometry(pts)
    r3 = r[:, :, None, None] ** 3
    r5 = r[:, :, None, None] ** 5
    outer = d[:, :, :, None] * d[:, :, None, :]
    K = np.outer(masses, masses)[:, :, None, None] * (np.eye(2) / r3 - 3.0 * outer / r5)
    blocks = K.copy()
    idx = np.arange(masses.size)
    blocks[idx, idx] = -K.sum(axis=1)
    return blocks


def _assemble(blocks: np.ndarray) -> np.ndarray:
    n = blocks.shape[0]
    return blocks.transpose(0, 2, 1, 3).reshape(2 * n, 2 * n)


def jacobian_analytic(form, q, m, lam: Optional[float] = None,
                      per_unit_mass: Optional[bool] = None) -> np.ndarray:
    form = Formulation.from_tag(form)
    pts, masses = prepared(q, m)
    n = masses.size
    total = masses.sum()
    blocks = _pairwise_blocks(pts, masses)
    U = potential(pts, masses)
    grad_U = attraction(pts, masses)

    if form is Formulation.FORM_I:
        offsets = pts
        I = float(np.sum(masses * np.sum(pts * pts, axis=1)))
        lam_value = U / I
        coupling = np.eye(n)
    else:
        c = masses @ pts / total
        offsets = pts - c
        I = float(np.sum(masses * np.sum(offsets * offsets, axis=1)))
        lam_value = U / I if lam is None else float(lam)
        # d(q_i - c)/dq_j = (delta_ij - m_j / M) Id
        coupling = np.eye(n) - masses[None, :] / total
    if lam is not None and form is not Formulation.FORM_II:
        raise ValueError("A caller-fixed multiplier only applies to Form II")

    blocks = blocks + (lam_value * masses[:, None] * coupling)[:, :, None, None] * np.eye(2)
    J = _assemble(blocks)

    if form is not Formulation.FORM_II:
        grad_I = 2.0 * masses[:, None] * offsets
        grad_lam = (grad_U * I - U * grad_I) / I ** 2
        J = J + np.outer((masses[:, None] * offsets).ravel(), grad_lam.ravel())

    if form is Formulation.FORM_I:
        # d(s F) = s dF + F ds with s = sqrt(I0 / 2), ds = m q / (2 s)
        s = np.sqrt(0.5 * I)
        F = (grad_U + lam_value * masses[:, None] * offsets).ravel()
        J = s * J + np.outer(F, (masses[:, None] * offsets).ravel() / (2.0 * s))

    if per_unit_mass is None:
        per_unit_mass = form.per_unit_mass
    if per_unit_mass:
        J = J / np.repeat(masses, 2)[:, None]
    return J


def jacobian_fd(form, q, m, step: Optional[float] = None, lam: Optional[float] = None,
                per_unit_mass: Optional[bool] = None) -> np.ndarray:
    """Central finite differences of the same equations, column by column.

    For Form II the multiplier is frozen at its value at q, matching the
    constant-lambda derivative of jacobian_analytic.
    """
    form = Formulation.from_tag(form)
    if step is None:
        step = setting('CC_FD_STEP', 1e-6)
    if not step > 0:
        raise ValueError(f"Finite-difference step must be positive, got {step}")
    pts, masses = prepared(q, m)
    if form is Formulation.FORM_II and lam is None:
        lam = multiplier(pts, masses)
    base = pts.ravel().copy()
    size = base.size
    J = np.empty((size, size))
    for col in range(size):
        shift = np.zeros(size)
        shift[col] = step
        forward = equations(form, base + shift, masses, lam=lam, per_unit_mass=per_unit_mass)
        backward = equations(form, base - shift, masses, lam=lam, per_unit_mass=per_unit_mass)
        J[:, col] = (forward - backward) / (2.0 * step)
    return J
