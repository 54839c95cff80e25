"""Numerical tolerances shared by every module.

Keeping them in one table means property tests and runtime validation
agree on what "Hermitian" or "trace one" means.
"""

HERMITIAN_ATOL = 1e-12
TRACE_ATOL = 1e-12
PSD_ATOL = 1e-10
EIG_HERMITIAN_ATOL = 1e-10
SQRT_PSD_ATOL = 1e-10
PROJECTOR_ATOL = 1e-12

# project_to_density refuses inputs whose trace is further than this from 1
TRACE_SANITY = 0.5

# corrected traces outside [-eps, 1 + eps] raise a warning flag on estimates
TRACE_RANGE_EPS = 0.05

MAX_SIDE = 16

SEED_ENV_VAR = "CONCBOUNDS_SEED"
DEFAULT_SEED = 20100301
