from .diagnostics import local_energy_concentration, map_distance_c0, map_distance_l2
from .energy import (EnergyReport, cotan_weights, dirichlet_energy, energy, tension,
                     tension_l2sq, vertex_areas)
from .harmonic import MaxIterExceeded, connection_laplacian, harmonic_solve
from .state import Incomparable, MapState, constant_map, identity_map, make_map

__all__ = [
    "local_energy_concentration", "map_distance_c0", "map_distance_l2", "EnergyReport",
    "cotan_weights", "dirichlet_energy", "energy", "tension", "tension_l2sq", "vertex_areas",
    "MaxIterExceeded", "connection_laplacian", "harmonic_solve", "Incomparable", "MapState",
    "constant_map", "identity_map", "make_map",
]
