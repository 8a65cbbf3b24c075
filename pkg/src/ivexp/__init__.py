"""Guaranteed enclosures for linear differential inclusions x' = Q(t) x, Q(t) in an interval matrix."""

__version__ = "0.1.0"

from .bounds import (A_bound, BoundParams, appendix_bound, choose_steps,
                     exp_set_distance_bound, linear_product_bound)
from .ctmc import (GeneratorInterval, transition_bounds, transition_operators,
                   validate_generator)
from .errors import (EmptyRowError, InfeasibleError, MonotonicityViolation,
                     UnsoundWarning)
from .intervals import (IntervalMatrix, IntervalVector, RowPolytope, interval_image,
                        lower_image, row_extremal, set_norm, upper_image)
from .linalg import inf_norm, mat_mul, mat_vec, matrix_exp
from .partition import Partition, dyadic_refine, is_elementary_refinement, stats
from .propagation import (BoundReport, propagate, propagate_many, propagate_uniform,
                          refine_until, step_condition)
