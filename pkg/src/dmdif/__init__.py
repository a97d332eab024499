"""Distributed mirror descent with integral feedback over agent networks."""

from .diagnostics import (TrajectoryRecord, build_context, consensus_error, linear_rate_fit,
                          lyapunov, lyapunov_rate_expression)
from .dynamics import (AlgorithmSpec, NetworkState, NumericalDivergence, euler_step, init_state,
                       rk4_step, run, step_plain, vector_field_dmd_if)
from .graph import Network, cycle, from_edge_list, neighbor_sum
from .harness import ExperimentConfig, preset_paper_experiment, run_experiment
from .mirror import Euclidean, MirrorMap, NegativeEntropy, euclidean, negative_entropy
from .objective import ProblemInstance, generate_paper_instance

__version__ = "0.1.0"
