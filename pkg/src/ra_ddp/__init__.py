"""Reach-avoid game synthesis by shielded minimax dynamic programming on integer lattices."""
from .game import TOP, CostWeights, DoubleIntegrator, FunctionDynamics, Kinematic, ModalGame, sat_add
from .lattice import MoveSet, Region, ScopeBox, Trajectory
from .player import AdversaryModel, Configuration, TaskConfig, hybrid_play, play_correct
from .scope import HyperPolicyConfig, Unsolvable, hyper_policy_synthesize
from .solver import Approximate, Policy, PolicyMode, Solution, ddp_solve, extract_policy, value, winning_region

__version__ = "0.1.0"

__all__ = [
    "TOP", "CostWeights", "DoubleIntegrator", "FunctionDynamics", "Kinematic", "ModalGame", "sat_add",
    "MoveSet", "Region", "ScopeBox", "Trajectory",
    "AdversaryModel", "Configuration", "TaskConfig", "hybrid_play", "play_correct",
    "HyperPolicyConfig", "Unsolvable", "hyper_policy_synthesize",
    "Approximate", "Policy", "PolicyMode", "Solution", "ddp_solve", "extract_policy", "value", "winning_region",
]
