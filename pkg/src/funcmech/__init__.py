"""Phase-space probability densities evolved by the Liouville equation.

Modules
-------
phase_density        Gaussian densities and free-motion closed forms
characteristic_flow  Hamiltonian flow, pullback solution, phase-space averages
newton_corrections   cubic-force averages and their deviation from Newton
box_dynamics         reflecting interval: image series and limiting laws
quantum_bridge       Gaussian packets, Wigner function, quantum box
scenario_cli         command-line scenarios
"""

from .errors import NumericalFailure, ValidationError
from .phase_density import GaussianState, Marginal, MarginalKind, MomentReport

__all__ = [
    "GaussianState",
    "Marginal",
    "MarginalKind",
    "MomentReport",
    "NumericalFailure",
    "ValidationError",
]

__version__ = "0.1.0"
