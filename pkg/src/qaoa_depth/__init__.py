"""Critical-depth measurements for QAOA on random MAX-2-SAT."""

__version__ = "0.1.0"

from .engine import (  # noqa: E402
    QaoaParameters,
    StabilityBounds,
    apply_mixer_layer,
    apply_phase_layer,
    energy_and_gradient,
    energy_gradient,
    expectation,
    ground_overlap,
    initial_state,
    prepare_ansatz,
    stability_bounds,
)
from .errors import CapacityError, ConsistencyError, FitError, ParseError  # noqa: E402
from .experiments import (  # noqa: E402
    CriticalDepthRecord,
    SweepSummary,
    critical_depth,
    density_sweep,
    energy_error,
    error_profile,
)
from .fitting import LogisticFitResult, fit_logistic, fit_scaling, logistic  # noqa: E402
from .sat import (  # noqa: E402
    DiagonalHamiltonian,
    IsingForm,
    SatInstance,
    SpectrumSummary,
    analyze_spectrum,
    build_hamiltonian,
    clause_density,
    generate_instance,
    ising_coefficients,
    read_dimacs,
    violated_count,
    write_dimacs,
)
from .training import TrainConfig, TrainResult, layerwise_train, optimize_at_depth  # noqa: E402
