"""Interval-certified positivity of det(J2) along the rhombus family.

The rhombus q = [0, a, -1, 0, 0, -a, 1, 0] with masses [m1, 1, m1, 1] is a
central configuration exactly when m1 = m1(a), which is positive on
(sqrt(3)/3, sqrt(3)) and blows up at the left end. The proof has two parts:

* regime A: adaptive bisection of [sqrt(3)/3 + 1e-4, sqrt(3) - 1e-3] until
  the interval enclosure of det(J2) has a positive lower bound on every box;
* regime B: on [sqrt(3)/3, sqrt(3)/3 + 1e-4], G = (a^2 m1 + 1)^4 det(J2) is
  a degree-8 polynomial in m1 which is positive for every m1 >= M, and
  m1(a) >= M holds on the whole tiny interval.
"""
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, List, Optional

from .conf import setting
from .exceptions import DomainError
from .families import rhombus_mass
from .interval import (
    Interval, IntervalPoly, det4, generic_sqrt, iv_div, sqrt3, sqrt3_over_3,
)
from .reduction import Verdict

logger = logging.getLogger('degeneracy.certifier')

REGIME_B_WIDTH = '0.0001'
RIGHT_MARGIN = '0.001'
DEFAULT_THRESHOLD = 2072.0


class RhombusJ2Symbolic:
    """Closed-form J2 of the rhombus family as a function of (a, m1).

    Arguments may be floats, Intervals, or (for m1) an IntervalPoly in m1;
    the same expressions serve the floating check, the interval enclosures
    and the G polynomial. m1 is a free parameter here: the entries agree with
    the Jacobian reduction only on the family m1 = m1(a).
    """

    def __init__(self, a, m1):
        self.a = a
        self.m1 = m1
        s = a ** 2 + 1
        root = generic_sqrt(s)
        self.s = s
        self.R5 = s ** 2 * root
        self.R7 = s ** 3 * root
        self.D = a ** 2 * m1 + 1

    def _diagonal(self):
        """(numerator, denominator) pairs with J_ii = numerator / (denominator * D)."""
        a, m1, s, R5, R7 = self.a, self.m1, self.s, self.R5, self.R7
        a2, a3, a4, a5, a6, a7 = a ** 2, a ** 3, a ** 4, a ** 5, a ** 6, a ** 7
        m1sq = m1 * m1
        n11 = (R5 * (a4 * m1sq - m1 + a5 + a3) / 4
               - 2 * (a6 * m1sq + (-5 * m1sq - 3 * m1 + 1) * a4 + (-10 * m1 - 1) * a2 - m1 - 2) * a3)
        n22 = (R5 * (a4 * m1sq + 3 * a2 * m1sq + 2 * m1 + a5 + a3) / 4
               + 4 * ((m1sq + 1.5 * m1) * a6 + (-2 * m1sq + 3 * m1 + 1) * a4
                      + (0.5 - m1) * a2 + 0.5 * m1 - 0.5) * a3)
        n33 = ((0.5 * s * m1sq + a5 * m1 + 1.5 * a3 + 0.5 * a) * R5
               - (4 * a6 * (m1sq - m1) + 4 * a4 * (2 * m1 - m1sq)
                  + 4 * a2 * (-2 * m1sq - 6 * m1 + 4) - 12 * m1 - 8) * a)
        n44 = (R5 * (s * m1sq - a5 * m1 + a)
               + (16 * m1sq + 8 * m1) * a7 + (8 * m1sq + 80 * m1) * a5
               - (8 * m1sq - 24 * m1 - 40) * a3 - 8 * a)
        return [(n11, R7 * a3), (n22, R7 * a3), (n33, 2 * R7 * a), (n44, 4 * R7 * a)]

    def _off_diagonal(self):
        a, m1, R5, R7 = self.a, self.m1, self.R5, self.R7
        a2, a3, a5 = a ** 2, a ** 3, a ** 5
        A = R5 - 20 * a5 + 4 * a3
        B = R5 - 32 * a5 + 16 * a3
        C = R5 + 4 * a2 - 20
        E = R5 + 16 * a2 - 32
        return {
            (0, 1): A / (2 * a2 * R7) * m1,
            (0, 2): a2 * C / (2 * R7),
            (0, 3): a * E / (4 * R7),
            (1, 0): B / (4 * a2 * R7) * m1,
            (1, 2): a * C / (2 * R7),
            (1, 3): -(a2 * E) / (4 * R7),
            (2, 0): -B / (4 * R7 * a3) * m1,
            (2, 1): A / (2 * a2 * R7) * m1,
            (2, 3): a * E / (4 * R7),
            (3, 0): B / (4 * a2 * R7) * m1,
            (3, 1): A / (2 * R7 * a3) * m1,
            (3, 2): a * C / (2 * R7),
        }

    def entries(self):
        matrix = [[None] * 4 for _ in range(4)]
        for i, (numerator, denominator) in enumerate(self._diagonal()):
            matrix[i][i] = numerator / (denominator * self.D)
        for (i, j), value in self._off_diagonal().items():
            matrix[i][j] = value
        return matrix

    def scaled_entries(self):
        """Entries of (a^2 m1 + 1) J2; each is a polynomial of degree <= 2 in m1."""
        matrix = [[None] * 4 for _ in range(4)]
        for i, (numerator, denominator) in enumerate(self._diagonal()):
            matrix[i][i] = numerator / denominator
        for (i, j), value in self._off_diagonal().items():
            matrix[i][j] = self.D * value
        return matrix

    def det(self):
        return det4(self.entries())

    def G(self):
        return det4(self.scaled_entries())


# Rhombus mass in interval arithmetic

def rhombus_mass_interval(a_box: Interval) -> Interval:
    if a_box.lo <= 0:
        raise DomainError(f"Rhombus parameter box must be positive: {a_box}")
    s = a_box ** 2 + 1
    s32 = s * generic_sqrt(s)
    return iv_div(a_box ** 3 * (s32 - 8), s32 - 8 * a_box ** 3)


def rhombus_mass_slope_numerator(a_box: Interval) -> Interval:
    """Numerator n'g - ng' of dm1/da = (n/g)'; same sign as the derivative where g != 0."""
    a = a_box
    s = a ** 2 + 1
    root = generic_sqrt(s)
    s32 = s * root
    n = a ** 3 * (s32 - 8)
    dn = 3 * a ** 2 * (s32 - 8) + 3 * a ** 4 * root
    g = s32 - 8 * a ** 3
    dg = 3 * a * root - 24 * a ** 2
    return dn * g - n * dg


def rhombus_detJ2_interval(a_box: Interval) -> Interval:
    m1 = rhombus_mass_interval(a_box)
    return RhombusJ2Symbolic(a_box, m1).det()


def interval_verdict(enclosure: Optional[Interval]) -> Verdict:
    """Verdict from an enclosure of det(J2); a box straddling zero stays undecided."""
    if enclosure is None:
        return Verdict.UNCERTAIN
    if enclosure.lo > 0 or enclosure.hi < 0:
        return Verdict.NONDEGENERATE
    if enclosure.lo == 0.0 and enclosure.hi == 0.0:
        return Verdict.DEGENERATE
    return Verdict.UNCERTAIN


def rhombus_verdict(a_box: Interval) -> Verdict:
    """Interval verdict for every rhombus in a_box; boxes touching the mass pole are uncertain."""
    try:
        enclosure = rhombus_detJ2_interval(a_box)
    except DomainError as e:
        logger.debug(f"No enclosure on {a_box}: {e}")
        enclosure = None
    return interval_verdict(enclosure)


def rhombus_detJ2(a: float, m1: Optional[float] = None) -> float:
    """Floating det(J2) from the closed form; m1 defaults to the family value."""
    if m1 is None:
        m1 = rhombus_mass(a)
    return RhombusJ2Symbolic(a, m1).det()


def _pieces(a_box: Interval, count: int) -> List[Interval]:
    if count <= 1 or a_box.width == 0.0:
        return [a_box]
    bounds = [a_box.lo + (a_box.hi - a_box.lo) * i / count for i in range(count + 1)]
    bounds[0], bounds[-1] = a_box.lo, a_box.hi
    bounds = sorted(set(bounds))
    return [Interval(lo, hi) for lo, hi in zip(bounds, bounds[1:])]


def rhombus_G_poly(a_box: Interval, pieces: Optional[int] = None) -> IntervalPoly:
    """Interval coefficients of G(m1) = (a^2 m1 + 1)^4 det(J2), valid for every a in a_box.

    The box is cut into ``pieces`` sub-boxes and the coefficient enclosures
    are hulled, which limits the overestimation from repeated occurrences of a.
    """
    if pieces is None:
        pieces = setting('CC_CERT_G_PIECES', 64)
    m1 = IntervalPoly.variable()
    G = None
    for piece in _pieces(a_box, pieces):
        piece_G = RhombusJ2Symbolic(piece, m1).G()
        G = piece_G if G is None else G.hull(piece_G)
    return G


def tail_positive(p: IntervalPoly, M: float) -> bool:
    """True when every member of p is provably positive for all m1 >= M.

    Sufficient condition on coefficient lower bounds: all of them non-negative
    except the linear one, and g2 M + g1 >= 0 with M (g2 M + g1) + g0 > 0.
    """
    if not M > 0:
        raise ValueError("tail_positive needs M > 0")
    if p.degree < 2:
        return False
    lows = [c.lo for c in p.coefficients]
    if any(low < 0 for k, low in enumerate(lows) if k != 1):
        return False
    slope = Interval.point(lows[2]) * M + lows[1]
    if slope.lo < 0:
        return False
    bound = Interval.point(M) * slope.lo + lows[0]
    return bound.lo > 0


# Subdivision

@dataclass(frozen=True)
class Leaf:
    box: Interval
    enclosure: Optional[Interval]
    depth: int


@dataclass
class PositivityResult:
    domain: Interval
    leaves: List[Leaf] = field(default_factory=list)
    failure: Optional[Leaf] = None
    failure_reason: Optional[str] = None

    @property
    def certified(self) -> bool:
        return self.failure is None


def certify_positive(f: Callable[[Interval], Interval], domain: Interval,
                     max_depth: Optional[int] = None) -> PositivityResult:
    """Midpoint bisection until f's enclosure is positive on every box.

    Boxes are visited depth first, left to right, so the leaf list is
    reproducible. Stops at the first box that is provably non-positive or
    that would need a split beyond max_depth.
    """
    if max_depth is None:
        max_depth = setting('CC_CERT_MAX_DEPTH', 42)
    result = PositivityResult(domain=domain)
    stack = [(domain, 0)]
    while stack:
        box, depth = stack.pop()
        try:
            enclosure = f(box)
        except DomainError as e:
            logger.debug(f"Box {box} not evaluable at depth {depth}: {e}")
            enclosure = None
        if enclosure is not None and enclosure.lo > 0:
            result.leaves.append(Leaf(box, enclosure, depth))
            continue
        reason = None
        if enclosure is not None and enclosure.hi <= 0:
            reason = 'enclosure is non-positive'
        elif depth >= max_depth:
            reason = f'maximum depth {max_depth} reached'
        else:
            try:
                left, right = box.split()
            except ValueError:
                reason = 'box cannot be split further'
        if reason is not None:
            result.failure = Leaf(box, enclosure, depth)
            result.failure_reason = reason
            logger.warning(f"Positivity not certified on {box}: {reason}")
            return result
        stack.append((right, depth + 1))
        stack.append((left, depth + 1))
    logger.info(f"Certified positivity on {domain} with {len(result.leaves)} leaves")
    return result


def certify_uniform(f: Callable[[Interval], Interval], domain: Interval, pieces: int) -> PositivityResult:
    """Fixed uniform split of the domain, no refinement."""
    if pieces < 1:
        raise ValueError("pieces must be at least 1")
    result = PositivityResult(domain=domain)
    for box in _pieces(domain, pieces):
        try:
            enclosure = f(box)
        except DomainError:
            enclosure = None
        if enclosure is None or enclosure.lo <= 0:
            result.failure = Leaf(box, enclosure, 0)
            result.failure_reason = 'enclosure not positive'
            return result
        result.leaves.append(Leaf(box, enclosure, 0))
    return result


# Rhombus certificate

@dataclass
class RegimeB:
    box: Interval
    G: IntervalPoly
    threshold: float
    mass_lower_bound: float
    slope_numerator: Interval
    tail_ok: bool

    @property
    def mass_ok(self) -> bool:
        return self.mass_lower_bound >= self.threshold

    @property
    def slope_ok(self) -> bool:
        return self.slope_numerator.hi < 0

    @property
    def certified(self) -> bool:
        return self.tail_ok and self.mass_ok and self.slope_ok


@dataclass
class Certificate:
    regime_a: PositivityResult
    regime_b: RegimeB

    @property
    def status(self) -> str:
        return 'certified' if self.certified else 'failed'

    @property
    def certified(self) -> bool:
        return self.regime_a.certified and self.regime_b.certified

    @property
    def failure(self) -> Optional[str]:
        if not self.regime_a.certified:
            box = self.regime_a.failure.box
            return f"regime A box [{box.lo!r}, {box.hi!r}]: {self.regime_a.failure_reason}"
        b = self.regime_b
        if not b.tail_ok:
            return f"regime B: G not provably positive for m1 >= {b.threshold!r}"
        if not b.mass_ok:
            return f"regime B: m1 lower bound {b.mass_lower_bound!r} below {b.threshold!r}"
        if not b.slope_ok:
            return "regime B: dm1/da not provably negative"
        return None

    def to_text(self) -> str:
        a, b = self.regime_a, self.regime_b
        lines = [
            '# rhombus central configuration nondegeneracy certificate',
            f'status {self.status}',
            f'regime-a-range {a.domain.lo!r} {a.domain.hi!r}',
            f'regime-a-leaves {len(a.leaves)}',
        ]
        for leaf in a.leaves:
            lines.append(f'leaf {leaf.box.lo!r} {leaf.box.hi!r} '
                         f'{leaf.enclosure.lo!r} {leaf.enclosure.hi!r} {leaf.depth}')
        if a.failure is not None:
            lines.append(f'regime-a-failure {a.failure.box.lo!r} {a.failure.box.hi!r} '
                         f'{a.failure.depth} {a.failure_reason}')
        lines += [
            f'regime-b-range {b.box.lo!r} {b.box.hi!r}',
            f'regime-b-threshold {b.threshold!r}',
            f'regime-b-mass-lower-bound {b.mass_lower_bound!r}',
            f'regime-b-slope-numerator {b.slope_numerator.lo!r} {b.slope_numerator.hi!r}',
            f'regime-b-tail-positive {str(b.tail_ok).lower()}',
        ]
        for k, c in enumerate(b.G.coefficients):
            lines.append(f'g {k} {c.lo!r} {c.hi!r}')
        return '\n'.join(lines) + '\n'

    def write(self, path) -> None:
        Path(path).write_text(self.to_text(), encoding='ascii')


def regime_boundaries():
    """(pole enclosure, regime split point, right end) as floats."""
    pole = sqrt3_over_3()
    split = (pole + Interval.enclose(REGIME_B_WIDTH)).hi
    right = (sqrt3() - Interval.enclose(RIGHT_MARGIN)).lo
    return pole, split, right


def certify_regime_b(threshold: float = DEFAULT_THRESHOLD, pieces: Optional[int] = None) -> RegimeB:
    pole, split, _ = regime_boundaries()
    box = Interval(pole.lo, split)
    G = rhombus_G_poly(box, pieces=pieces)
    mass_lower_bound = rhombus_mass_interval(Interval.point(split)).lo
    slope = rhombus_mass_slope_numerator(box)
    regime = RegimeB(
        box=box,
        G=G,
        threshold=threshold,
        mass_lower_bound=mass_lower_bound,
        slope_numerator=slope,
        tail_ok=tail_positive(G, threshold),
    )
    logger.info(f"Regime B on {box}: tail positive {regime.tail_ok}, m1 >= {mass_lower_bound!r},"
                f" slope numerator {slope}")
    return regime


def certify_rhombus_nondegeneracy(max_depth: Optional[int] = None,
                                  threshold: float = DEFAULT_THRESHOLD,
                                  pieces: Optional[int] = None) -> Certificate:
    _, split, right = regime_boundaries()
    regime_a = certify_positive(rhombus_detJ2_interval, Interval(split, right), max_depth=max_depth)
    regime_b = certify_regime_b(threshold=threshold, pieces=pieces)
    certificate = Certificate(regime_a=regime_a, regime_b=regime_b)
    if certificate.certified:
        logger.info(f"Rhombus family certified nondegenerate ({len(regime_a.leaves)} regime A leaves)")
    else:
        logger.warning(f"Rhombus certification failed: {certificate.failure}")
    return certificate
