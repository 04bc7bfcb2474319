"""Piece-wise hypergeometric orthogonal systems on the half-line.

A numerical library for the three-parameter family of orthogonal functions
that perturbs the Jacobi polynomials by a real shift of the degree: function
evaluation, singular-endpoint pairings, the associated Sturm-Liouville
boundary problem at the interior singular point, Mellin-Barnes machinery, the
discrete+continuous spectral transform, and mixed beta-integral identities.
"""

__version__ = "0.1.0"

from .errors import (
    DomainError,
    LogarithmicCase,
    NoConvergence,
    PoleError,
    PwhypError,
    SingularPoint,
    StripViolation,
)
from .ortho import (
    LocalExpansion,
    Params,
    PhiFunction,
    PsiFunction,
    SpectralIndex,
    XiFunction,
    jacobi_eval,
    jacobi_norm_sq,
    lambda_basis,
    n_min,
    phi_norm_sq,
    phi_p,
    phi_p_local,
    psi_local,
    psi_s,
    xi_mu,
)
from .quadrature import (
    PairingResult,
    QuadratureSpec,
    bilinear_pairing,
    cross_integral_X,
    cross_integral_Y,
    gram_matrix,
    hermitian_pairing,
)
from .spectral import (
    SpectralData,
    apply_D,
    boundary_check,
    forward_transform,
    lambda_of_p,
    p_of_lambda,
    parseval_check,
    plancherel_weight,
    spectral_inner,
    symmetry_defect,
)

__all__ = [name for name in dir() if not name.startswith("_")]
