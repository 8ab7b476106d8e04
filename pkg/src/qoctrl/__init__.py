"""Control-enhanced quantum parameter estimation toolkit.

Lindblad dynamics with piecewise-constant controls, Krotov pulse
optimization of final-state distinguishability, and quantum Fisher
information evaluation for one- and two-qubit estimation scenarios.
"""

from .dynamics import LindbladModel, TimeGrid, propagate_backward, propagate_forward
from .krotov import (KrotovConfig, OptimizationResult, ShapeSpec, default_guess,
                     evaluate_schedule_qfi, optimize, reseed)
from .metrology import (StatePair, bures_distance, concurrence, fidelity,
                        hs_terminal_cost, qfi_bloch_single_qubit, qfi_from_pair,
                        qfi_sld)
from .scenarios import (ScenarioSpec, analytic_uncontrolled_qfi, build_model,
                        default_probe, get_scenario, n_rotation_qfi)

__all__ = [
    "LindbladModel", "TimeGrid", "propagate_forward", "propagate_backward",
    "KrotovConfig", "OptimizationResult", "ShapeSpec", "default_guess",
    "evaluate_schedule_qfi", "optimize", "reseed",
    "StatePair", "bures_distance", "concurrence", "fidelity",
    "hs_terminal_cost", "qfi_bloch_single_qubit", "qfi_from_pair", "qfi_sld",
    "ScenarioSpec", "analytic_uncontrolled_qfi", "build_model",
    "default_probe", "get_scenario", "n_rotation_qfi",
]

__version__ = "0.1.0"
