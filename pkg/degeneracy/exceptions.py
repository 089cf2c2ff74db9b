class DegeneracyException(Exception):
    """Base class for errors raised by the degeneracy library"""
    pass


class CollisionError(DegeneracyException):
    """Two bodies closer than the collision tolerance"""

    def __init__(self, i, j, distance):
        self.i = i
        self.j = j
        self.distance = distance
        super().__init__(f"Bodies {i} and {j} collide (distance {distance:.3e})")


class NotCentralConfigurationError(DegeneracyException):
    def __init__(self, residual_norm, tolerance):
        self.residual_norm = residual_norm
        self.tolerance = tolerance
        super().__init__(
            f"Not a central configuration: residual {residual_norm:.3e} exceeds {tolerance:.3e}")


class DegenerateBasisError(DegeneracyException):
    """Symmetry generators are linearly dependent"""
    pass


class ConvergenceError(DegeneracyException):
    def __init__(self, iterations, residual_norm):
        self.iterations = iterations
        self.residual_norm = residual_norm
        super().__init__(
            f"Newton iteration did not converge after {iterations} steps (residual {residual_norm:.3e})")


class DomainError(DegeneracyException):
    """A formula was evaluated outside its domain"""
    pass


class IntervalDomainError(DomainError):
    """Interval division by an interval containing zero, or sqrt of a negative interval"""
    pass


class NoSignChangeError(DegeneracyException):
    """detJ2 neither changes sign nor reaches zero inside the bracket"""
    pass
