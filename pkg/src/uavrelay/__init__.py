"""Link-level simulation and design search for a UAV-relayed mmWave backhaul."""

__version__ = "0.1.0"

from .errors import DomainError, InfeasibleError, NoFeasibleDesign, NumericalError
from .scenario import Design, Scenario

__all__ = ["Design", "Scenario", "DomainError", "InfeasibleError", "NoFeasibleDesign",
           "NumericalError", "__version__"]
