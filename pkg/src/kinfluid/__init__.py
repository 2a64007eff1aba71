"""Hybrid kinetic/fluid solver.

Nodal discontinuous Galerkin discretizations of the reduced BGK equation
and the compressible Navier-Stokes system, coupled across a dynamically
decomposed domain by kinetic flux-vector-splitting interface fluxes.
"""

__version__ = "0.1.0"

from .config import RunConfig, parse_config
from .decomposition import DecompositionConfig, RegionMap
from .errors import ConfigurationError, SolverError
from .hybrid import HybridState, hybrid_cfl_dt, hybrid_step_1d, hybrid_step_2d
from .kinetic import (
    DiffuseMovingWall,
    EvaporatingWall,
    KineticState,
    Outflow,
    Periodic,
    kinetic_step_1d,
    kinetic_step_2d,
)
from .fluid import FluidState, ns_step_1d, ns_step_2d
from .mesh import Mesh, NodalBasis
from .runner import Snapshot, run, write_snapshot
from .scenarios import (
    SCENARIOS,
    ScenarioSpec,
    build_evaporation,
    build_ghost2d,
    build_riemann2d,
    build_scenario,
)
from .velocity import Moments, VelocityGrid

__all__ = [
    "ConfigurationError", "SolverError", "__version__",
    "Mesh", "NodalBasis", "VelocityGrid", "Moments",
    "EvaporatingWall", "DiffuseMovingWall", "Outflow", "Periodic",
    "KineticState", "kinetic_step_1d", "kinetic_step_2d",
    "FluidState", "ns_step_1d", "ns_step_2d",
    "DecompositionConfig", "RegionMap",
    "HybridState", "hybrid_cfl_dt", "hybrid_step_1d", "hybrid_step_2d",
    "SCENARIOS", "ScenarioSpec", "build_scenario", "build_evaporation",
    "build_riemann2d", "build_ghost2d",
    "RunConfig", "parse_config", "Snapshot", "run", "write_snapshot",
]
