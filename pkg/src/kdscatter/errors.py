"""Exception hierarchy shared by all modules."""


class KdsError(Exception):
    """Base class for every error raised by this package."""


# -- geometry -----------------------------------------------------------------

class ExtremalityViolated(KdsError):
    """Parameters (a, l) do not admit a double inner horizon."""


class NonPositiveCosmologicalConstant(KdsError):
    """l = sqrt(Lambda/3) must be strictly positive."""


class OutOfDomain(KdsError):
    """Radius outside the open block (r_e, r_+)."""


class ConvergenceFailure(KdsError):
    """Iterative inversion did not reach the requested tolerance."""


# -- potentials ---------------------------------------------------------------

class PoleProximity(KdsError):
    """Evaluation too close to the theta coordinate singularity."""


class NotBlockDiagonal(KdsError):
    """boxtimes needs a 2x2-block-diagonal matrix."""


class InsufficientSamples(KdsError):
    """Too few samples for a decay fit."""


class DegenerateFit(KdsError):
    """Decay fit impossible (values underflow or are zero)."""


# -- angular ------------------------------------------------------------------

class NotHalfInteger(KdsError):
    """Azimuthal numbers must lie in Z + 1/2."""


class EigensolverFailure(KdsError):
    """Dense Hermitian eigensolver failed or returned garbage."""


class BracketingFailure(KdsError):
    """No sign change found near an oracle eigenvalue."""


class PairingAmbiguity(KdsError):
    """Gamma^1 image of an eigenfunction matches no partner mode."""


# -- radial1d / scattering -----------------------------------------------------

class SupportOverflow(KdsError):
    """Wave packet support does not fit inside the grid window."""


class BoundaryTouch(KdsError):
    """Norm reached the grid boundary; the run is invalid."""


class QuadratureFailure(KdsError):
    """Adaptive quadrature of a Dollard phase failed."""


class StiffIntegration(KdsError):
    """ODE integration for the Groenwall diagnostic failed."""


class UnfilteredState(KdsError):
    """State was not energy-filtered away from zero."""


# -- field2d ------------------------------------------------------------------

class SolverStall(KdsError):
    """Crank-Nicolson inner solve did not reach its residual target."""


class GridTooCoarse(KdsError):
    """theta resolution below the minimum needed for spinor regularity."""


# -- cli ----------------------------------------------------------------------

class ParseError(KdsError):
    """Config text could not be parsed; message carries line numbers."""


class ValidationError(KdsError):
    """Config parsed but violates one or more physical bounds."""
