"""Heat kernels on hyperbolic and Damek-Ricci spaces.

Evaluates the radial heat kernels of real hyperbolic spaces, the hyperbolic
Jacobi operator with real dimension parameter, Damek-Ricci (harmonic AN)
spaces and the Maass Laplacian through several independent integral and
symbolic representations, and cross-validates the representations against
each other and against the Hartman-Watson / Yor bridging identities.
"""

from .precision import (
    AccuracyLossError,
    BigReal,
    CancellationError,
    ConvergenceError,
    DomainError,
    PrecisionEscalationError,
    PrecisionPolicy,
    SingularEvaluationError,
    auto,
    fixed,
)
from .quad import (
    QuadResult,
    gruet_oscillatory,
    integrate_adaptive,
    integrate_semi_infinite,
    integrate_sqrt_singular,
)
from .specfun import (
    SpectralWeight,
    bessel_i,
    bessel_k,
    bessel_poly_2f0,
    chebyshev_T,
    gamma,
    gamma_ratio_sq,
    gauss_2f1,
    jacobi_phi,
)
from .symop import (
    HypTerm,
    TermSum,
    apply_d_full,
    apply_d_half,
    eval_termsum,
    seed_even_dim,
    seed_gaussian,
)

__version__ = "0.1.0"
