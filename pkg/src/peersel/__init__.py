"""Exact-arithmetic toolkit for selecting a peer over a signed relation network.

Five randomized selection mechanisms (three that know the network, two that
don't), truthfulness and efficiency verification, structural-balance
analysis, efficiency evaluation under an independent needy prior, and
LP-based infeasibility certificates for two-state counterexample families.
All probability arithmetic is exact (``fractions.Fraction``).
"""

from .balance import (
    BalanceDecomposition,
    BalanceVerdict,
    BalanceViolation,
    EfComponent,
    Theorem5Reason,
    Theorem5Verdict,
    UnbalancedNetworkError,
    check_structural_balance,
    classify_theorem5,
    decompose,
    network_from_decomposition,
)
from .efficiency import (
    ComparisonRow,
    ComparisonTable,
    DegreeProfile,
    EfficiencyEstimate,
    closed_form_prd,
    compare_mechanisms,
    degree_profile,
    duples_sb_lower_bound,
    exact_efficiency,
    mc_efficiency,
    needy_mass_by_mask,
    rd_equals_prior_condition,
)
from .instances import (
    FAMILIES,
    GeneratorError,
    Instance,
    InstanceFormatError,
    generate,
    load_instance,
    parse_instance,
    save_instance,
    serialize_instance,
)
from .known_net import (
    IntersectionKind,
    IntersectionVerdict,
    PositiveVoteQuery,
    RelationSelector,
    check_intersection,
    mechanism_g1,
    mechanism_g2k,
    mechanism_g3k,
    positive_vote_set,
)
from .lp import (
    FeasibilityProblem,
    FeasibleResult,
    InfeasibleResult,
    LinearConstraint,
    solve_feasibility,
    verify_infeasibility,
    verify_point,
)
from .mechanisms import (
    MechanismHandle,
    MechanismKind,
    parse_mechanism,
    resolve,
    run_mechanism,
)
from .model import (
    BudgetExceededError,
    FullTypeMessage,
    InvalidDistributionError,
    InvalidMessageError,
    InvalidNetworkError,
    MessageProfile,
    Mode,
    ModeMismatchError,
    NeedyPrior,
    NeedySetMessage,
    PeerselError,
    Relation,
    RelationNetwork,
    SelectionDistribution,
    WorldState,
    build_network,
    format_rational,
    parse_rational,
    sets_of,
    truthful_profile,
)
from .prefs import (
    DeviationDelta,
    PreferenceWeights,
    deviation_delta,
    robust_improvement,
    strictly_prefers,
    witness_weights,
)
from .unknown_net import (
    PairVoteTally,
    dictator_pick,
    duple_vote,
    hierarchy_tiers,
    mechanism_constant,
    mechanism_duples,
    mechanism_rd,
)
from .verify import (
    DsicReport,
    DsicViolation,
    EfficiencyReport,
    Exhaustive,
    FullTypeSpace,
    MessageSpace,
    NeedyOnlySpace,
    Sampled,
    ValidityReport,
    check_dsic,
    check_efficiency,
    check_validity,
    reference_dsic,
    space_for,
)
from .witness import (
    CertificateEntry,
    LpWitness,
    Theorem4Construction,
    Theorem5bConstruction,
    WitnessStatus,
    build_two_state_problem,
    impossibility_witness,
    theorem5b_network,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
