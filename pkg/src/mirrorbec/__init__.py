"""Macro-qubit photon statistics, a Bragg-structured condensate mirror and
CARL-BEC recoil dynamics."""
from .estimators import BraggMirror, CarlSimulator, QIOPAmplifier, RecoilScenario
from .species import RUBIDIUM_87, AtomSpecies

__version__ = "0.1.0"

__all__ = [
    "AtomSpecies",
    "BraggMirror",
    "CarlSimulator",
    "QIOPAmplifier",
    "RUBIDIUM_87",
    "RecoilScenario",
    "__version__",
]
