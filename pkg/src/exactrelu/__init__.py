"""Exact, globally optimal training of two-layer ReLU networks in low dimension."""

from .concave import EquationPool, solve_subproblem_concave, train_concave, verify_pointedness
from .convex import SubproblemSpec, TrainResult, solve_subproblem_l1, solve_subproblem_l2, train_l1, train_l2
from .core import (
    AffineTransform,
    BudgetExceeded,
    Dataset,
    DimensionError,
    Label,
    LabeledPoint,
    LabelKindError,
    LossSpec,
    LossValue,
    Neuron,
    ReluNetwork,
    affine_hull_reduce,
    dedupe,
    dist_interval,
    eval_network,
    lift_network,
    loss_value,
    rational,
)
from .dichotomies import (
    Dichotomy,
    enumerate_open_dichotomies,
    enumerate_open_dichotomies_geometric,
    is_open_dichotomy,
)
from .linalg import Singular, rank, solve_square_system
from .linf import LinfResult, ThresholdLadder, build_lp_s, check_realizable, train_linf_interval
from .lp import LinearProgram, LpOutcome, LpStatus, solve_lp
from .reduction import (
    ColoredGraph,
    ReductionOutput,
    brute_force_multicolored_clique,
    circle_point,
    compute_params,
    decode_clique,
    generate_instance,
    witness_weights,
)

__version__ = "0.1.0"
