"""Newton polyhedra, nondegeneracy and decay predictions for oscillatory
Loomis-Whitney forms, with numeric cross-checks."""

from .phase import Phase, PhaseError

__version__ = "0.1.0"
__all__ = ["Phase", "PhaseError", "__version__"]
