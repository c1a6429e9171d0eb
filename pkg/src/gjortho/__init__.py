"""Orthogonal polynomials, quadrature and weighted norm inequalities for
generalized Jacobi weights with logarithmic factors."""

from .errors import *  # noqa: F401,F403
from .weights import (BoundedFactor, ClassReport, MinMaxWeight, ProductWeight, Verdict,
                      WeightSpec, as_spec, chebyshev, classify, envelope, eval_regularized,
                      gjlog, jacobi, legendre, product, varphi)
from .quad import FULL, IntegralResult, Region, delta_region, discretize, integrate, lp_norm
from .orthopoly import (GaussRule, RecurrenceTable, christoffel, cd_kernel, eval_basis,
                        gauss_rule, modified_chebyshev, recurrence_table)
from .conditions import (Clause, ConditionReport, fourier_check, hilbert_check, mz_check,
                         nevai)
from .sampling import RatioSample, Sampler
from .fourier import operator_norm_estimate, partial_sum, pollard_split, project
from .interp import JetData, PolyEvaluator, best_error, converge_sweep, hermite, lagrange
from .mz import (adversarial_sup, bernstein_ratio, mz_hermite_ratio, mz_ratio, quad_sum_ratio,
                 restricted_ratio)
from .hilbert import condition_sup, transform, weighted_ratio

__version__ = "0.1.0"
