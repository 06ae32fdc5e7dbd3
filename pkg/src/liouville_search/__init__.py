"""Ensemble (Liouville-space) search on coupled spin-1/2 systems."""

from .engine import (
    PEAK_EPSILON,
    PopulationState,
    PulsePlan,
    Spectrum,
    apply_pi,
    apply_plan,
    compile_swap,
    equilibrium_populations,
    prepare_initial,
    readout_mf,
    readout_small_angle,
)
from .labeler import (
    Labeling,
    LabelingConstraints,
    assign_labels,
    conventional_labeling,
    find_ancilla_matchings,
    label_system,
    validate_labeling,
)
from .search import (
    LabeledInstance,
    OracleSpec,
    SearchResult,
    apply_oracle,
    cross_check,
    decide_bit,
    run_search,
    run_weak_search,
)
from .spin_core import EigenSystem, SpinSystem, TransitionTable, analyze, build_hamiltonian, diagonalize, transitions

__version__ = "0.1.0"
