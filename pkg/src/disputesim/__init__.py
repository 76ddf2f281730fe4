"""Simulator and calibrator for challenge-based fraud-proof incentive games."""

from .calibration import (
    FeasibleInterval,
    alpha_lower_bound,
    alpha_upper_bound,
    check_goals,
    fair_single_winner_min_payout,
    feasible_interval,
    phi_free_upper_bound,
    scale_free_min_deposit,
)
from .engine import decide_participation, run_dispute
from .analytics import estimate_utilities
from .harness import verify_theorem
from .model import (
    BuilderPriority,
    Capped,
    CostBounds,
    CostProfile,
    CostSampling,
    FairOrdering,
    NonExclusion,
    Population,
    ProposerPriority,
    ProtocolParams,
    Scenario,
    SingleWinner,
    StrategyConfig,
)

__version__ = "0.1.0"

__all__ = [
    "BuilderPriority",
    "Capped",
    "CostBounds",
    "CostProfile",
    "CostSampling",
    "FairOrdering",
    "FeasibleInterval",
    "NonExclusion",
    "Population",
    "ProposerPriority",
    "ProtocolParams",
    "Scenario",
    "SingleWinner",
    "StrategyConfig",
    "alpha_lower_bound",
    "alpha_upper_bound",
    "check_goals",
    "decide_participation",
    "estimate_utilities",
    "fair_single_winner_min_payout",
    "feasible_interval",
    "phi_free_upper_bound",
    "run_dispute",
    "scale_free_min_deposit",
    "verify_theorem",
]
