"""Resource theory of the particle aspect of small quantum systems.

A d-level system facing an energy-threshold detector has "free" states,
whose mean energy cannot trigger it, and resourceful ones.  This package
classifies states against the threshold, verifies free operations, computes
trace-norm particleness/coherence measures with certified convex solvers,
and reproduces the complementarity scatter between the two measures.
"""

__version__ = "0.1.0"

from .errors import (
    DimensionMismatchError,
    EmptyInputError,
    IncompleteKrausSetError,
    InvalidRankError,
    NonHermitianInputError,
    NotNormalizedError,
    NotResourcefulError,
    ParticlenessError,
    ScanFailureError,
    SolverNotConvergedError,
    TooManyKrausOperatorsError,
    WrongDimensionError,
    WrongSpecError,
)
from .linalg import adjoint, eigh, hermitian_part, trace_norm
from .states import (
    density_from_pure,
    project_to_density,
    sample_haar_pure,
    sample_induced_mixed,
    validate,
)
from .system import (
    EPS_EDGE,
    Classification,
    Label,
    SystemSpec,
    classify,
    energy,
    is_free_state,
    mix_to_free,
    qutrit_mixed_is_free,
    qutrit_pure_is_free,
    random_free_states,
    witness,
    witness_value,
)
from .operations import (
    FreeOpVerdict,
    Verdict,
    apply_channel,
    commutes_with_hamiltonian,
    completeness_defect,
    is_energy_invariant,
    is_free_operation,
    random_commuting_kraus,
)
from .measures import (
    BoundReport,
    Certificate,
    MeasureResult,
    bound_report,
    coherence_oracle,
    coherence_trace,
    complementarity_value,
    lemma_upper_bound,
    line_upper_bound,
    particleness_oracle,
    particleness_trace,
    witness_lower_bound,
)
from .experiments import (
    BoundCheck,
    ScanConfig,
    ScanRecord,
    check_bound,
    emit_plot_script,
    find_saturating_pure,
    run_scan,
    run_scan_to_files,
)
