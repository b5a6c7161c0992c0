"""Monotone submodular multiway partition: relaxation, roundings, exact
solvers, the grid symmetry-gap instance and the Max-Cut reduction."""

from .core import (CoverageOracle, CutOracle, ExplicitOracle, GraphCoverageOracle, GroundSet, Instance,
                   Partition, PartitionMatroidOracle, SetFunctionOracle, lovasz_ext, multilinear_ext, objective)
from .errors import (CapacityError, DomainError, InputError, NumericError, SubmwpError, VerificationError)
from .estimators import (BruteForcePartitioner, ExponentialClockRounder, GreedyPartitioner, RelaxationSolver,
                         ThresholdRounder)
from .exact import SearchBudget, brute_force_opt, brute_force_sym_opt, greedy_baseline
from .gcov import WeightedGraph, ckr_instance, exp_clock_round
from .relax import FractionalAssignment, SolverConfig, solve_relaxation
from .rounding import RoundingConfig, expected_cost, round_at, round_random
from .symgap import SymInstance, SymPartition, structure_partition, symmetry_gap

__version__ = "0.1.0"

__all__ = [
    "BruteForcePartitioner", "CapacityError", "CoverageOracle", "CutOracle", "DomainError",
    "ExplicitOracle", "ExponentialClockRounder", "FractionalAssignment", "GraphCoverageOracle",
    "GreedyPartitioner", "GroundSet", "InputError", "Instance", "NumericError", "Partition",
    "PartitionMatroidOracle", "RelaxationSolver", "RoundingConfig", "SearchBudget", "SetFunctionOracle",
    "SolverConfig", "SubmwpError", "SymInstance", "SymPartition", "ThresholdRounder",
    "VerificationError", "WeightedGraph", "brute_force_opt", "brute_force_sym_opt", "ckr_instance",
    "exp_clock_round", "expected_cost", "greedy_baseline", "lovasz_ext", "multilinear_ext",
    "objective", "round_at", "round_random", "solve_relaxation", "structure_partition",
    "symmetry_gap",
]
