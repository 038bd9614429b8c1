"""shiftlab: weighted backward shifts, hitting-set families, and orbit checks.

The package makes the finite-horizon content of the shift hypercyclicity
characterizations executable: weight/v-sequence arithmetic in log domain,
generators for separated hitting-set families of positive upper/lower
density, the norm- and product-form criteria with reproducible witnesses,
and the explicit hypercyclic-vector construction with orbit verification
of its 2^{-q} error bound.
"""

from .logdomain import LogScalar, log_abs
from .weights import (
    WeightError,
    WeightRule,
    WeightPrefix,
    constant_weight,
    two_sided_weight,
    periodic_weight,
    table_weight,
    product_weight,
    callable_weight,
    unweighted,
    weight_product,
    weight_product_exact,
    invert_reflect,
    weight_rule_to_config,
    weight_rule_from_config,
)
from .sequences import VSequence, WindowError, v_at
from .spaces import (
    SpaceError,
    SpaceModel,
    FiniteVector,
    norm,
    triple_norm,
    triple_norm_truncation_oracle,
    reflect_vector,
    conjugate_phi_v,
    conjugate_phi_v_inverse,
)
from .shifts import apply_shift_power, apply_forward_power
from .densities import (
    IndexSet,
    DensityReport,
    density_report,
    UpperDensityFamily,
    upper_family_membership,
    MembershipResult,
)
from .families import (
    FamilyError,
    SeparationRule,
    HittingFamily,
    SeparationViolation,
    generate_block_family,
    generate_lower_family,
    block_end_samples,
    block_upper_density_estimate,
    check_separation,
    family_to_text,
    family_from_text,
)
from .schedules import EpsilonSchedule, Schedules, default_epsilon, default_schedules
from .criteria import (
    Verdict,
    JMode,
    Witness,
    CheckHorizons,
    CriterionReport,
    check_norm_form,
    check_c0_products,
    check_unilateral,
    reevaluate_witness,
    GrowthVerdict,
    GrowthReport,
    check_frequent_growth,
    SymmetryReport,
    SymmetryMismatchError,
    symmetry_check,
)
from .targets import TargetError, TargetList, TargetEntry, enumerate_targets, minimal_admissible_p
from .builder import BuildError, AHCVector, build_vector, enforce_series_bound
from .orbits import OrbitError, OrbitFailure, OrbitReport, verify_orbit

__version__ = "0.1.0"
