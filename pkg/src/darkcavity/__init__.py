"""Driven two-cavity optical molecule: steady states, dark phases, oracle."""
from .params import (LabFrameSpec, SteadyState, ThreeModeParams, TwoModeParams,
                     ValidationReport, collective_coupling, fig2_params, fig4_params,
                     load_config, save_config, to_rotating_frame, validate)
from .dynamics import (DriftSystem, PhaseSchedule, Trajectory, drift, drift_three,
                       drift_two, integrate, stability, steady_state_closed_form,
                       steady_state_solve)
from .dark import (DarkSolution, dark_phase_cavity1, dark_phase_cavity2,
                   design_symmetric, gain_diagnostic, mutual_exclusion)
from .atoms import (dark_phase_cavity1_atoms, dark_phase_cavity2_atoms,
                    design_symmetric_atoms, steady_state_closed_form_atoms)
from .oracle import FockConfig, liouvillian_steady_state, truncation_sweep

__version__ = "0.1.0"

__all__ = [
    "LabFrameSpec", "SteadyState", "ThreeModeParams", "TwoModeParams", "ValidationReport",
    "collective_coupling", "fig2_params", "fig4_params", "load_config", "save_config",
    "to_rotating_frame", "validate",
    "DriftSystem", "PhaseSchedule", "Trajectory", "drift", "drift_three", "drift_two",
    "integrate", "stability", "steady_state_closed_form", "steady_state_solve",
    "DarkSolution", "dark_phase_cavity1", "dark_phase_cavity2", "design_symmetric",
    "gain_diagnostic", "mutual_exclusion",
    "dark_phase_cavity1_atoms", "dark_phase_cavity2_atoms", "design_symmetric_atoms",
    "steady_state_closed_form_atoms",
    "FockConfig", "liouvillian_steady_state", "truncation_sweep",
]
