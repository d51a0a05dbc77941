"""Joint operator norms, best approximation and orthogonality for tuples of l_p operators."""

from .approx import (
    BJDecision, DistanceResult, SingerCertificate, bj_orthogonal, brute_force_distance,
    build_singer_certificate, certify_orthogonality, distance_to_diagonal_subspace, distance_to_line,
    kernel_distance_functional_tuple, restricted_functional_norm, vector_distance_to_line,
    verify_certificate,
)
from .config import Config
from .derivatives import (
    GateauxPair, SmoothnessReport, check_smoothness_sufficiency, rho_attainment_formula,
    rho_operator, rho_sandwich_bounds, rho_tuple_infty_formula, smoothness_of_operator,
)
from .errors import *  # noqa: F401,F403
from .instance_io import dump_instance, load_instance, parse_instance
from .linops import Operator, OperatorTuple, affine_tuple
from .normcalc import (
    AttainmentSet, JointAttainment, NormResult, attainment_set, brute_force_norm,
    joint_attainment_check, operator_norm, tuple_norm,
)
from .spaces import Exponent, LpSpace, duality_map, is_extreme_point, is_smooth_point, lp_norm, rho_vector
from .theorems import CheckReport, Instance, run_suite

__version__ = "0.1.0"
