"""Exception types shared across the pipeline."""


class PrecisionExhausted(ArithmeticError):
    """A pivot or determinant lost all guaranteed significant bits.

    The caller should retry at higher precision (typically double).
    ``n`` is the polynomial degree at which the breakdown was detected,
    ``prec`` the working precision in bits.
    """

    def __init__(self, message, n=None, prec=None):
        super().__init__(message)
        self.n = n
        self.prec = prec


class PoleAtJump(ValueError):
    """Evaluation point fell inside the exclusion radius around z = +/-a."""


class AuxDegenerate(ArithmeticError):
    """An auxiliary quantity R_n vanished (B = 0 or a polynomial zero at a)."""


class DivisionBreakdown(ArithmeticError):
    """The three-term difference iteration hit a vanishing denominator."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class PoleInODE(ArithmeticError):
    """A denominator of an ODE right-hand side vanished on the grid."""


class AnZero(ArithmeticError):
    """A_n(z) = 0, so the second-order ODE coefficients are undefined."""
