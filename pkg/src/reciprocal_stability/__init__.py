"""Exact verification of Hyers-Ulam stability for a reciprocal functional
equation over non-Archimedean valued fields."""

__version__ = "0.1.0"

from .errors import (AlreadyPerturbed, ConfigError, DegenerateDenominator, DomainError,
                     InvalidParameter, LimitMissing, MuUndefined, StabilityError,
                     ZeroToNegativePower)
from .valued_field import (INF, ValuationSpec, format_norm, format_rational, norm, norm_pow,
                           parse_norm, parse_rational, ultrametric_check, valuation)
from .funceq import (DefectSample, PointFunction, defect_basic, defect_eq1, evaluate,
                     exact_reciprocal, parse_function, tabulated)
from .direct_method import (Condition, ConditionVerdict, IterateProfile, PsiValue,
                            check_eqt0, check_premise_on_orbit, check_uniqueness_condition,
                            detect_limit, iterate_sequence, psi, verify_bound)
from .perturbation import (ConstantShift, ControlFunction, SeededDyadic, check_tau,
                           compare_bounds, constant, corollary_bound, measure_mu, measured,
                           mu_eval, orbit_pairs, parse_control, parse_perturbation, perturb,
                           power_sum, tau_sum)
