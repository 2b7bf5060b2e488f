"""Geometric discrepancy toolkit.

Exact L2-type discrepancies (direct formulas and a divide-and-conquer fast
path), exact L-infinity star discrepancy (dimension-specialized formulas,
grid enumeration with weighted and G-star variants, and a decomposition
algorithm), guaranteed two-sided bounds from delta-covers, heuristic lower
bounds (threshold accepting and an evolutionary scheme), even-p weighted L_p
discrepancies, plus two applications: evolutionary optimization of
generalized-Halton digit permutations and scenario reduction of discrete
measures under the anchored-box metric.
"""

from .pointset import (BudgetExceededError, CriticalCorner, GridView,
                       LocalDiscrepancy, PointSet, WeightedPointSet,
                       classify_critical, enumerate_critical, grid_view,
                       local_discrepancy, snap_down, snap_up, volume)
from .generators import (Graph, PermutationConfig, dominating_set_instance,
                         halton, midpoint_set, primes, radical_inverse,
                         rank1_lattice, random_permutation,
                         reverse_permutation, scrambled_radical_inverse)
from .l2 import (HeinrichArray, extreme_l2, extreme_l2_sq, heinrich_D,
                 modified_l2, modified_l2_sq, star_l2, star_l2_sq_fast,
                 warnock_star_l2_sq, warnock_star_l2_sq_stable,
                 weighted_star_l2, weighted_star_l2_sq)
from .lp import lp_cost_estimate, weighted_star_lp_pow
from .linf_exact import (MarginalCDF, StarResult, dem_cost_estimate, star_1d,
                         star_2d, star_3d, star_dem, star_exact,
                         star_grid_enum)
from .linf_approx import (BoundResult, DeltaCover, TAConfig, build_delta_cover,
                          cover_bounds, ga_lower_bound, ta_basic, ta_improved)
from .applications import (DiscreteMeasure, LPError, ReductionResult,
                           ReportCell, backward_selection, forward_selection,
                           optimal_inner_weights, optimize_halton_permutations,
                           quality_report, two_measure_star_disc)

__version__ = "0.1.0"
