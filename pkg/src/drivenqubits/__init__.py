"""Steady states and correlations of two laser-driven two-level atoms with collective damping."""
from .algebra import (
    BasisTag,
    BlochDecomposition,
    DensityMatrix4,
    bloch_decompose,
    bloch_reconstruct,
    change_basis,
    hermitian_eigen,
    partial_trace,
    psd_sqrt,
    reorder_qubits,
    tensor_product,
    trace_distance,
)
from .correlations import (
    CorrelationReport,
    ProjectorParams,
    classical_correlation,
    concurrence,
    conditional_entropy_objective,
    conditional_state,
    full_report,
    geometric_discord,
    linear_entropy,
    mutual_information,
    quantum_discord,
    von_neumann_entropy,
)
from .master import (
    Liouvillian,
    ModelParams,
    SteadyStateSolution,
    apply_generator,
    build_liouvillian,
    coupling_f,
    spectral_gap,
    steady_state,
    time_evolve,
)
from .oracles import (
    asymptotic_scalars_g2zero,
    limit_far_apart_g2zero,
    limit_xstate_g2zero,
    steady_equal_g,
    steady_g2zero,
    weak_concurrence_equal_g,
    weak_concurrence_g2zero,
    weak_field_equal_g,
    weak_field_g2zero,
)
from .sweeps import FIGURES, FigureFamily, SweepConfig, run_figure, run_sweep

__version__ = "0.1.0"
