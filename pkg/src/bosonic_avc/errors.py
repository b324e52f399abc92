class InvalidParameter(ValueError):
    """Raised when an argument lies outside the domain of an operation."""


class InfeasibleJammer(InvalidParameter):
    """Raised when a jammer strategy exceeds the jammer's energy budget."""


class InfeasibleAttack(InvalidParameter):
    """Raised when the codeword-replay attack cannot be mounted (P < E)."""


class DegenerateCovariance(InvalidParameter):
    """Raised when a covariance matrix is too close to singular to sample from."""
