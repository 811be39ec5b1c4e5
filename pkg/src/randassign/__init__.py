"""Exact efficiency tests for random assignments."""

from .birkhoff import birkhoff_decompose, find_consistent_matching, peel
from .core import (
    Decomposition,
    DeterministicAssignment,
    GuardExceeded,
    InstanceError,
    PreferenceProfile,
    RandomAssignment,
    SDRelation,
    SupportMask,
    parse_instance,
    sd_prefers,
    serialize_instance,
    support,
)
from .expost import (
    HullMembershipResult,
    Membership,
    enumerate_consistent_assignments,
    has_consistent_pareto_optimal,
    is_ex_post_efficient,
    lp_membership,
    no_top_object_certificate,
    pruned_ex_post_search,
)
from .pareto import (
    TradingCycle,
    corresponding_graph,
    find_trading_cycle,
    is_pareto_optimal,
    rsd_assignment,
    serial_dictatorship,
    uniform_assignment,
)
from .robust import (
    AgentTypePartition,
    compute_agent_types,
    is_robust_by_types,
    is_robust_ex_post_efficient,
    uniform_is_robust,
    verify_non_robust_witness,
)
from .sdeff import ConsistentTradingCycle, find_consistent_cycle, is_sd_efficient

__version__ = "0.1.0"
