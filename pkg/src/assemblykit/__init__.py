"""Exact and floating-point computation over weighted component assemblies.

The package counts labeled structures built from weighted connected
components, derives component-count laws and moments of additive
functionals, checks the growth conditions under which variance bounds
apply, and samples exact structures by rejection.
"""

from .bounds import (MomentReport, SweepResult, moment_report,
                     tk_ratio_sweep, tk_rhs_complete, tk_rhs_general)
from .classes import (BUILTIN_NAMES, AssemblyClass, builtin_class,
                      class_from_config, resolve_class)
from .conditions import (CONDITION_NUMBERS, ConditionVerdict, WeaklyLogParams,
                         Witness, check_all_conditions, check_condition,
                         suggest_constants)
from .counting import (CoeffTable, assembly_count, clear_cache, coeff_table,
                       normalize_mode)
from .errors import (ClassConfigError, EmptySupportError, NumericError,
                     RejectionLimitError)
from .families import FAMILY_NAMES, FunctionFamily, get_family
from .moments import (AdditiveFunction, SpectrumPMF, comp_count_pmf,
                      completely_additive, general_additive, mean_additive,
                      moment_table, moments_additive, second_moment_pairwise,
                      variance_additive)
from .oracle import (Profile, oracle_coeff, oracle_moments, oracle_pmf,
                     profiles, structure_oracle_permutations)
from .sampler import (ChiSquareResult, EmpiricalMoments, SampleBatch,
                      SamplerConfig, chi_square_marginal, empirical_moments,
                      sample_batch, sample_profile, tune_tilt)

__version__ = "0.1.0"

__all__ = [n for n in dir() if not n.startswith("_")]
