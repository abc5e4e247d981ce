"""First passage percolation on the configuration model.

Samplers for coloured geodesic neighbourhoods and limiting coloured trees,
canonical codes, and total-variation comparison between the two laws.
"""

from fpplocal._core import (
    canonical_code,
    derive_scalars,
    run_convergence,
    sample_limit_tree,
    sample_neighbourhood,
    tv_distance,
    validate_config,
)

__all__ = [
    "canonical_code",
    "derive_scalars",
    "run_convergence",
    "sample_limit_tree",
    "sample_neighbourhood",
    "tv_distance",
    "validate_config",
]
