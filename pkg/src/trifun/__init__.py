"""Functions of lower-triangular matrices with simple spectrum.

One coefficient table per matrix serves every matrix function, every time
of an exponential semigroup, and the extraction of a semigroup generator
from a single snapshot.
"""

from .estimators import GeneratorEstimator, MatrixFunctionTransformer, ThetaExpansion
from .exceptions import (
    DegenerateSpectrum,
    DimensionMismatch,
    DomainViolation,
    EigenvalueOnCut,
    NonPositiveDiagonal,
    NotConverged,
    NotTriangular,
    SingularResolvent,
    SpectralRadiusTooLarge,
    TrifunError,
)
from .funm import ScalarFunction, apply, exp_semigroup, parlett_apply, parlett_coefficients
from .genlog import (
    GeneratorResult,
    SemigroupSample,
    check_markov,
    eta_coefficients,
    extract_generator,
    verify_generator,
)
from .matcore import (
    LowerTriangular,
    SpectrumInfo,
    dense_from,
    dense_multiply,
    from_dense,
    row_sums,
    validate_simple_spectrum,
)
from .theta import (
    ThetaTable,
    check_identities,
    compute_theta,
    conditioning_indicator,
    theta_from_eigenvectors,
)

__version__ = "0.1.0"
