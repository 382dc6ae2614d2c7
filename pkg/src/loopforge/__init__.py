"""loopforge: an exact-arithmetic workbench for loops K^n x| Gamma_0 built
from matrices A, B, a matrix group, and an endomorphism of it."""

from .errors import (
    CapExceeded,
    ClosureCapExceeded,
    DimensionMismatch,
    DivisionByZero,
    EligibilityFailed,
    ElementNotInClosure,
    FieldMismatch,
    InvalidParams,
    LoopforgeError,
    NonUniqueTau,
    NotInOrbit,
    NumericEligibilityLost,
    SingularMatrix,
    SingularPsi,
    SpecFileError,
)
from .fields import (
    ComplexField,
    Field,
    FieldElement,
    PrimeField,
    QuadraticField,
    RationalField,
    RealField,
    fe_arith,
)
from .linalg import (
    SquareMatrix,
    det,
    has_eigenvalue_one,
    kernel_basis,
    mat_inv,
    mat_mul,
)
from .matgroup import (
    EndoDesc,
    Gamma,
    GammaElement,
    GroupDesc,
    apply_endo,
    close_group,
    coset_decompose,
    gamma_mul,
    validate_endomorphism,
)
from .loops import (
    EligibilityReport,
    Loop,
    LoopElement,
    LoopSpec,
    cayley_table,
    check_eligibility,
    find_nonassoc_witness,
    inverse_property_witnesses,
    latin_square_verdict,
    left_div,
    left_translation_group_report,
    loop_mul,
    parse_cayley_csv,
    right_div,
    theta_subspace,
    verify_loop_axioms,
    verify_sharp_transitivity,
)

__version__ = "0.1.0"
