"""Entanglement invariants of a damped qubit within a tripartite purification."""
from .channel import QubitDensity, Schedule, apply_damping, evolved_reduced, excitations, schedule_to_p
from .errors import (
    CapacityError,
    EntinvError,
    LabelError,
    NormalizationError,
    PhysicalityError,
    PreconditionError,
)
from .ghz import GhzConfig, GhzReport, build_ghz, evolve_and_check
from .invariants import (
    InvariantReport,
    Regime,
    closed_form_w,
    evaluate_invariant,
    excitation_from_purity,
    lambda_of,
    purity_from_excitation,
    regime_select,
    w_value,
)
from .qstate import (
    DensityMatrix,
    PureState,
    Subsystem,
    density_from_pure,
    partial_trace,
    purity_and_schmidt,
    reduced_density,
    tensor_product,
)
from .tripartite import PurificationAmplitudes, SweepResult, build_initial, evolve_tripartite, rho_m_analytic, run_sweep

__version__ = "0.1.0"
