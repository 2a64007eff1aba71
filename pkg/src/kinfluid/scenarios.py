"""Prebuilt problem setups: evaporation channel, 2D Riemann, ghost flow.

Each builder returns a ScenarioSpec bundling the discretization, boundary
conditions, initial moments and stepping parameters.  Every default comes
from the reference experiments; the CLI layer overrides them per key.
"""

from dataclasses import dataclass, field

import numpy as np

from .decomposition import DecompositionConfig, forced_band_mask
from .errors import ConfigurationError
from .hybrid import MODES, HybridState, hybrid_cfl_dt
from .kinetic import DiffuseMovingWall, EvaporatingWall, Outflow, Periodic
from .mesh import Mesh, NodalBasis
from .velocity import Moments, VelocityGrid

SCENARIOS = ("evap_weak", "evap_strong", "riemann2d", "ghost2d")


@dataclass
class ScenarioSpec:
    name: str
    mesh: Mesh
    bases: tuple
    grid: VelocityGrid
    bc: tuple
    initial: Moments
    eps: float
    dt: float
    t_final: float
    mode: str = "hybrid"
    decomposition: DecompositionConfig = field(default_factory=DecompositionConfig)
    forced: np.ndarray = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigurationError(
                f"unknown mode {self.mode!r}; pick one of {MODES}")
        for q in ("eps", "dt", "t_final"):
            if getattr(self, q) <= 0:
                raise ConfigurationError(f"{q} must be positive")
        for axis in range(self.mesh.dim):
            extent = self.mesh.edges[axis][-1] - self.mesh.edges[axis][0]
            if self.decomposition.forced_band >= 0.5 * extent:
                raise ConfigurationError(
                    "forced band must be narrower than half the domain")
        self.initial.check_valid("initial data")

    @property
    def dim(self):
        return self.mesh.dim

    def initial_state(self):
        return HybridState.from_moments(
            self.initial, self.grid, self.eps, mode=self.mode,
            forced=self.forced)


def _derived_dt(mesh, bases, grid, m, eps, dt):
    if dt is not None:
        return float(dt)
    return hybrid_cfl_dt(mesh, bases, grid, m, eps)


def default_decomposition(name):
    """Indicator thresholds and forced-band width for a named scenario.

    The evaporation problems pin exactly the refined 0.05 wall zones of
    their graded mesh to the kinetic model; the wall-driven 2D problem
    forces a band of width 0.1 along each moving wall.
    """
    band = 0.05 if name.startswith("evap") else 0.1
    return DecompositionConfig(forced_band=band)


def graded_edges(n_cells):
    """Evaporation mesh: quarters of the cells on each 0.05 wall band,
    the remaining half across the central 0.9."""
    if n_cells % 4 != 0:
        raise ConfigurationError(
            f"evaporation mesh needs nx divisible by 4, got {n_cells}")
    nb, nc = n_cells // 4, n_cells // 2
    return np.concatenate([
        np.linspace(0.0, 0.05, nb + 1),
        np.linspace(0.05, 0.95, nc + 1)[1:],
        np.linspace(0.95, 1.0, nb + 1)[1:],
    ])


def build_evaporation(weak, n_x=40, eps=1e-3, *, order=1, nv=32, vcut=8.0,
                      dt=None, t_final=40.0, mode="hybrid",
                      decomposition=None):
    """Vapor slab between two evaporating/condensing walls on [0, 1].

    weak=True uses the near-equilibrium wall pair (1, 1) / (1.002, 1.02);
    weak=False the strongly driven pair (0.5, 0.01) / (1, 1).  Initial T
    and p interpolate linearly between the wall values, the gas is at
    rest, and the mesh is graded toward both walls.
    """
    T_wl, p_wl, T_wr, p_wr = (1.0, 1.0, 1.002, 1.02) if weak \
        else (0.5, 0.01, 1.0, 1.0)
    mesh = Mesh(graded_edges(n_x))
    bases = (NodalBasis(order),)
    grid = VelocityGrid(vcut=vcut, nv=nv, dim=1)
    bc = ((EvaporatingWall(T_w=T_wl, p_w=p_wl),
           EvaporatingWall(T_w=T_wr, p_w=p_wr)),)
    x = mesh.node_coords(bases[0], 0)
    T = T_wl + (T_wr - T_wl) * x
    p = p_wl + (p_wr - p_wl) * x
    m0 = Moments(rho=p / T, u1=np.zeros_like(x), T=T)
    name = "evap_weak" if weak else "evap_strong"
    dcfg = decomposition or default_decomposition(name)
    return ScenarioSpec(
        name=name,
        mesh=mesh, bases=bases, grid=grid, bc=bc, initial=m0, eps=eps,
        dt=_derived_dt(mesh, bases, grid, m0, eps, dt), t_final=t_final,
        mode=mode, decomposition=dcfg,
        forced=forced_band_mask(mesh, bc, dcfg.forced_band))


def build_riemann2d(n=80, eps=1e-3, *, order=0, nv=64, vcut=8.0, dt=1e-4,
                    t_final=0.35, mode="hybrid", decomposition=None):
    """Four-quadrant Riemann problem on [-1/2, 1/2]^2 with outflow edges.

    Quadrant states (rho, p, u1, u2), counterclockwise from x,y > 0:
    (1.5, 1.5, 0, 0), (0.6429, 0.3, 1.0328, 0),
    (0.1891, 0.0143, 1.0328, 1.0328), (0.6429, 0.3, 0, 1.0328).

    The default step matches the reference runs at eps = 1e-3; pass
    dt=None to derive it from the CFL bound instead.
    """
    if n < 2:
        raise ConfigurationError("riemann2d needs at least 2 cells per axis")
    mesh = Mesh(np.linspace(-0.5, 0.5, n + 1), np.linspace(-0.5, 0.5, n + 1))
    bases = (NodalBasis(order), NodalBasis(order))
    grid = VelocityGrid(vcut=vcut, nv=nv, dim=2)
    bc = ((Outflow(), Outflow()), (Outflow(), Outflow()))
    X = mesh.node_coords(bases[0], 0)[:, None, :, None]
    Y = mesh.node_coords(bases[1], 1)[None, :, None, :]
    shape = (n, n, bases[0].npts, bases[1].npts)
    east, north = (X >= 0) * np.ones(shape, bool), (Y >= 0) * np.ones(shape, bool)
    quads = [east & north, ~east & north, ~east & ~north, east & ~north]
    vals = [(1.5, 1.5, 0.0, 0.0), (0.6429, 0.3, 1.0328, 0.0),
            (0.1891, 0.0143, 1.0328, 1.0328), (0.6429, 0.3, 0.0, 1.0328)]
    rho, p, u1, u2 = (np.zeros(shape) for _ in range(4))
    for mask, (r, pq, uq, vq) in zip(quads, vals):
        rho[mask], p[mask], u1[mask], u2[mask] = r, pq, uq, vq
    m0 = Moments(rho=rho, u1=u1, T=p / rho, u2=u2)
    dcfg = decomposition or default_decomposition("riemann2d")
    return ScenarioSpec(
        name="riemann2d", mesh=mesh, bases=bases, grid=grid, bc=bc,
        initial=m0, eps=eps,
        dt=_derived_dt(mesh, bases, grid, m0, eps, dt), t_final=t_final,
        mode=mode, decomposition=dcfg,
        forced=forced_band_mask(mesh, bc, dcfg.forced_band))


def wall_temperature_profile(s):
    return 1.0 - 0.5 * np.cos(2.0 * np.pi * s)


def build_ghost2d(n=40, eps=0.02, *, order=1, nv=16, vcut=8.0, dt=1.0 / 5000,
                  t_final=80.0, mode="hybrid", decomposition=None):
    """Slow wall-driven flow on the unit square.

    Diffuse walls at y = 0 and y = 1 carry the tangential temperature
    profile 1 - cos(2 pi x)/2 and creep with speed eps; the x direction
    is periodic.  The gas starts at rest with rho = 1 and T equal to the
    wall profile, which both walls share.
    """
    mesh = Mesh(np.linspace(0.0, 1.0, n + 1), np.linspace(0.0, 1.0, n + 1))
    bases = (NodalBasis(order), NodalBasis(order))
    grid = VelocityGrid(vcut=vcut, nv=nv, dim=2)
    wall = DiffuseMovingWall(T_w=wall_temperature_profile, u_w=eps)
    bc = ((Periodic(), Periodic()), (wall, wall))
    X = mesh.node_coords(bases[0], 0)[:, None, :, None]
    shape = (n, n, bases[0].npts, bases[1].npts)
    m0 = Moments(rho=np.ones(shape),
                 u1=np.zeros(shape),
                 T=wall_temperature_profile(X) * np.ones(shape),
                 u2=np.zeros(shape))
    dcfg = decomposition or default_decomposition("ghost2d")
    return ScenarioSpec(
        name="ghost2d", mesh=mesh, bases=bases, grid=grid, bc=bc,
        initial=m0, eps=eps,
        dt=_derived_dt(mesh, bases, grid, m0, eps, dt), t_final=t_final,
        mode=mode, decomposition=dcfg,
        forced=forced_band_mask(mesh, bc, dcfg.forced_band))


def build_scenario(name, **kwargs):
    """Dispatch by scenario name; kwargs pass through to the builder."""
    builders = {
        "evap_weak": lambda **kw: build_evaporation(True, **kw),
        "evap_strong": lambda **kw: build_evaporation(False, **kw),
        "riemann2d": build_riemann2d,
        "ghost2d": build_ghost2d,
    }
    if name not in builders:
        raise ConfigurationError(
            f"unknown scenario {name!r}; pick one of {SCENARIOS}")
    return builders[name](**kwargs)
