"""latbox: lattice point counting in aligned boxes at arbitrary precision.

Core objects: lattice bases over exact rationals or multiprecision
floats, axis-aligned boxes, the product-minimum metric nu, dyadic
dilation sums, explicit error bounds for |count - volume|, dual-lattice
comparison tools, and a Diophantine counting application driven by
continued fractions.
"""

from .errors import (
    AssumptionViolationError,
    BudgetExceededError,
    DegenerateLatticeError,
    EmptyCandidateSetError,
    LatboxError,
    NotWeaklyAdmissibleError,
    PrecisionExhaustedError,
    RhoBelowThresholdError,
)
from .precision import (
    apply_context,
    as_mpfr,
    get_working_digits,
    scalar_str,
    set_working_digits,
    to_scalar,
)
from .linalg import (
    LatticeBasis,
    Matrix,
    determinant,
    dot,
    dual_basis,
    inverse,
    norm,
    norm_sq,
    operator_norm,
    parse_matrix,
    vec,
)
from .reduction import (
    LatticeVector,
    MinimaVector,
    ShortVectorSet,
    enumerate_below,
    lll_reduce,
    shortest_vector,
    successive_minima,
)
from .numetrics import (
    DeltaFamily,
    HermiteConstant,
    NuProfile,
    NuResult,
    SSumResult,
    delta_set,
    dyadic_scale,
    hermite_constant,
    nu,
    nu_values,
    s_sum,
    star,
    weak_admissibility_probe,
)
from .boxes import (
    AlignedBox,
    BoundReport,
    CountResult,
    HomogeneousBoundReport,
    NormalizedSystem,
    count_points,
    normalize,
    skriganov_bound_homogeneous,
    skriganov_bound_inhomogeneous,
    surface_area,
    t_quantity,
    volume,
)
from .dualcompare import (
    CompareRow,
    example31_build,
    is_signed_permutation,
    nu_profile_compare,
    symplectic_form,
    verify_prop_conditions,
)
from .dio import (
    CFExpansion,
    DioCountResult,
    IrrationalSpec,
    PhiBound,
    build_application,
    continued_fraction,
    corollary_bound,
    count_N,
    decimal_spec,
    lemma41_check,
    parse_irrational,
    phi_from_cf,
    surd_spec,
)

__version__ = "0.1.0"
