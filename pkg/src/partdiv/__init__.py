"""Divisibility of finitely supported probability measures on Z, Z_N and lattices in R.

The public surface re-exported here covers the common workflow: build a
measure, inspect its characteristic function, test fractional powers and
scan the set of admissible exponents.
"""

__version__ = "0.1.0"

from .cyclic import (
    BranchAssignment,
    RootSet,
    cyclic_char_fn,
    cyclic_nth_roots,
    delta1_membership,
    lambda_k_scan,
    z2_nth_root,
)
from .dual import (
    DualGrid,
    SecondCharacteristic,
    ZeroPoint,
    char_fn,
    char_fn_derivative,
    find_zeros,
    sample_char_fn,
    second_characteristic,
    winding_number,
)
from .fractional import MembershipVerdict, Verdict, fractional_power, is_member, nth_root, nth_root_admissible
from .measure import (
    GroupKind,
    GroupSpec,
    Measure,
    convolve,
    convolve_power,
    make_measure,
    point_mass,
    poisson_type,
    rational,
    total_variation,
)
from .scan import (
    ConstraintSet,
    LambdaReport,
    StructureSummary,
    lambda_scan,
    rational_in_constraints,
    summarize,
    t0_lower_bound,
    winding_constraints,
)
