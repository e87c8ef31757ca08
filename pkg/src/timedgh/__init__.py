"""Finite timed metric spaces: nets, addresses, timed Frechet embeddings,
Hausdorff estimates, limit synthesis and exact small-space oracles."""

from .addresses import Address, address_of, resolve, shared_addresses
from .convergence import (
    EmbeddedFamily,
    LimitSynthesis,
    arzela_ascoli,
    embed_family,
    hausdorff_sup,
    hausdorff_to_limit,
    synthesize_limit,
    timed_hausdorff_ub,
    uniform_address_gap,
)
from .embedding import SupVector, canonical_frame, frechet, sup_distance, target_causal, timed_frechet
from .nets import LevelPlan, NetHierarchy, build_hierarchy, plan_for_family, verify_hierarchy
from .oracles import exact_kappa_gh, exact_kappa_tH, gh_exact
from .space import FiniteTimedMetricSpace, InvalidSpaceError, causal_relation, validate_space

__version__ = "0.1.0"
