"""Super-twisting sliding-mode observers with fuzzy switching and adaptive order."""
from .fuzzy import (
    FuzzyRule,
    FuzzySystem,
    MembershipFunction,
    build_psi,
    build_standard_psi,
    eval_membership,
    infer,
)
from .metrics import (
    MetricsReport,
    chattering_index,
    convergence_time,
    report,
    rmse,
    tail_loss,
    total_variation,
)
from .observer import (
    ObserverConfig,
    ObserverState,
    adapt_gamma,
    correction,
    gate,
    gates,
    loss,
    sign_switch,
    step_observer,
)
from .plant import (
    Polynomial,
    Signal,
    SimulationError,
    TriangularSystem,
    augment_with_input,
    derivative,
    paper_example,
    paper_example_augmented,
    simulate_truth,
)
from .simulate import Scenario, SimulationTrace, run, run_comparison

__version__ = "0.1.0"
