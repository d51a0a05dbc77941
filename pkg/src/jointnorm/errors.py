"""Exception hierarchy."""


class JointNormError(Exception):
    """Base class for all errors raised by this package."""


class ZeroVectorError(JointNormError, ValueError):
    """A duality map or derivative was requested at the zero vector."""


class NotUnitVectorError(JointNormError, ValueError):
    pass


class DimensionMismatch(JointNormError, ValueError):
    pass


class DimensionTooLarge(JointNormError, ValueError):
    pass


class ShapeMismatch(JointNormError, ValueError):
    pass


class ZeroOperatorError(JointNormError, ValueError):
    pass


class HypothesisNotSatisfied(JointNormError):
    """A theorem's hypothesis failed; ``margin`` says by how much."""

    def __init__(self, msg, margin=None):
        super().__init__(msg)
        self.margin = margin


class CertificateNotFound(JointNormError):
    """No convex combination of candidate functionals annihilates the subspace.

    ``residual`` is the optimal l1 residual of the feasibility LP.
    """

    def __init__(self, msg, residual):
        super().__init__(msg)
        self.residual = residual


class InstanceError(JointNormError, ValueError):
    """Malformed instance document; ``path`` locates the fault."""

    def __init__(self, path, msg):
        super().__init__(f"{path}: {msg}")
        self.path = path
