"""Gaussian states on the boson Fock space of infinitely many modes."""

from .exceptions import (
    CapacityError,
    GaussFockError,
    InfiniteParameterError,
    InvalidDimensionError,
    InvalidIndexError,
    InvalidInputError,
    InvalidParameterError,
    NoDensityMatrixError,
    NotPositiveDefiniteError,
    NumericalDegeneracyError,
    UnsupportedOperationError,
    ValidationError,
)
from .symplectic import (
    WilliamsonDecomposition,
    block_to_complex,
    complex_to_block,
    decompose_symplectic,
    is_orthogonal,
    is_symplectic,
    principal_sqrt,
    shale_defect,
    standard_involution,
    symplectic_spectrum,
    t_form,
    uncertainty_psd_check,
    williamson,
)
from .tails import (
    TailClassification,
    TailModel,
    classify_tail,
    tail_d,
    tail_log_weight,
    tail_partial_sums,
    tail_s,
)
from .states import (
    ExtremePair,
    GaussianState,
    ValidationReport,
    apply_gaussian_symmetry,
    beam_splitter_mix,
    characteristic_function,
    coherent_state,
    displace,
    extreme_decompose,
    from_momentum_position,
    is_pure,
    kernel_matrix,
    kernel_psd_check,
    marginal,
    mean_momentum_position,
    pure_state,
    purify,
    shale_conjugate,
    spectrum,
    spectrum_levels,
    symplectic_inverse,
    tensor,
    thermal_state,
    vacuum,
    validate,
)
from .fock import (
    FockBasis,
    exponential_vector,
    gaussian_density,
    oracle_char_fn,
    oracle_spectrum,
    second_quantize_diag,
    shale_unitary,
    squeeze_matrix,
    thermal_density,
    verify_gaussian,
    verify_shale_action,
    verify_weyl,
    weyl_matrix,
)

__version__ = "0.1.0"
