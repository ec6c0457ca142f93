from .base import (NONPOSITIVE, POSITIVE, STRICTLY_NEGATIVE, AmbiguousLog,
                   CurvatureClassViolation, StepTooLarge, Target, TargetError)
from .hyperbolic import (FuchsianRep, HyperbolicQuotient, InvalidRepresentation,
                         deck_transform, octagon_rep)
from .sphere import RoundSphere
from .torus import FlatTorus

__all__ = [
    "NONPOSITIVE", "POSITIVE", "STRICTLY_NEGATIVE", "AmbiguousLog", "CurvatureClassViolation",
    "StepTooLarge", "Target", "TargetError", "FuchsianRep", "HyperbolicQuotient",
    "InvalidRepresentation", "deck_transform", "octagon_rep", "RoundSphere", "FlatTorus",
]
