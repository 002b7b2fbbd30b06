"""Finite-element simulation of boundary-feedback stabilized BBM-Burgers equations."""

from .feedback import BoundaryMode, ModelParams
from .fem1d import NodalField, auxiliary_projection
from .mesh import Mesh, refine, uniform_mesh
from .stepper import NewtonDivergence, SimulationResult, StepperConfig, run_simulation

__version__ = "0.1.0"

__all__ = [
    "BoundaryMode",
    "Mesh",
    "ModelParams",
    "NewtonDivergence",
    "NodalField",
    "SimulationResult",
    "StepperConfig",
    "auxiliary_projection",
    "refine",
    "run_simulation",
    "uniform_mesh",
]
