"""IMEX nodal DG solver for the reduced BGK pair in 1D and 2D.

One step splits into an explicit transport stage

    R = f^n - dt * v . grad_x f^n        (DG weak form, upwind face fluxes)

followed by the implicit relaxation, which is solvable in closed form
because the moments of R already are the new moments:

    U^{n+1} = moments(R)
    f^{n+1} = eps/(eps + nu dt) R + nu dt/(eps + nu dt) M(U^{n+1})

with nu = 2 rho/sqrt(pi) evaluated at U^{n+1} per space node.  The weight
of M tends to 1 as eps -> 0, which is what makes the scheme asymptotic
preserving with a dt independent of eps.
"""

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .errors import ConfigurationError, SolverError
from .mesh import apply_matrix, edge_traces
from .velocity import (
    Moments,
    collision_frequency,
    moments_from_g,
    moments_from_h,
    reduced_maxwellian_g,
    reduced_maxwellian_h,
)

__all__ = [
    "EvaporatingWall",
    "DiffuseMovingWall",
    "Outflow",
    "Periodic",
    "KineticState",
    "upwind_flux",
    "kinetic_cfl_dt",
    "check_kinetic_cfl",
    "face_states_1d",
    "face_states_2d",
    "transport_stage_1d",
    "transport_stage_2d",
    "imex_update_1d",
    "imex_update_2d",
    "kinetic_step_1d",
    "kinetic_step_2d",
]


# ---------------------------------------------------------------------------
# boundary specifications

@dataclass(frozen=True)
class EvaporatingWall:
    """Wall held at fixed temperature and saturation pressure.

    Incoming velocities carry the resting Maxwellian with rho_w = p_w / T_w;
    the outgoing half is extrapolated from the interior trace.
    """

    T_w: float
    p_w: float

    def __post_init__(self):
        if self.T_w <= 0 or self.p_w <= 0:
            raise ConfigurationError("evaporating wall needs T_w > 0 and p_w > 0")


@dataclass(frozen=True)
class DiffuseMovingWall:
    """Diffusely reflecting wall with tangential velocity and a temperature
    profile along the wall.  The emitted density is scaled so the discrete
    normal mass flux through the wall vanishes."""

    T_w: Union[float, Callable]
    u_w: float = 0.0

    def temperature(self, s):
        if callable(self.T_w):
            return np.asarray(self.T_w(s), dtype=float)
        return np.full_like(np.asarray(s, dtype=float), float(self.T_w))


@dataclass(frozen=True)
class Outflow:
    """Ghost trace copies the interior trace."""


@dataclass(frozen=True)
class Periodic:
    """Wrap-around; must be used on both ends of an axis."""


def validate_boundaries(bc, dim):
    if len(bc) != dim:
        raise ConfigurationError("need one boundary pair per space axis")
    for lo, hi in bc:
        if isinstance(lo, Periodic) != isinstance(hi, Periodic):
            raise ConfigurationError("periodic boundaries must be paired per axis")


# ---------------------------------------------------------------------------
# state

@dataclass
class KineticState:
    """Distribution pair with its moments kept in sync after every update."""

    f: np.ndarray
    moments: Moments
    t: float
    eps: float

    @classmethod
    def from_pair(cls, f, grid, eps, t=0.0):
        if grid.dim == 1:
            mom = moments_from_h(f[0], f[1], grid)
        else:
            mom = moments_from_g(f[0], f[1], grid)
        return cls(f=f, moments=mom, t=t, eps=eps)


# ---------------------------------------------------------------------------
# CFL

def kinetic_cfl_dt(mesh, bases, grid, safety=0.9):
    """Largest stable step: dt <= safety * min_axis h_min / (V_c (2K+1))."""
    dts = []
    for ax in range(mesh.dim):
        hmin = mesh.widths[ax].min()
        dts.append(hmin / (grid.vcut * (2 * bases[ax].order + 1)))
    return safety * min(dts)


def check_kinetic_cfl(mesh, bases, grid, dt):
    limit = kinetic_cfl_dt(mesh, bases, grid, safety=1.0)
    if dt > limit * (1.0 + 1e-12):
        raise ConfigurationError(
            f"kinetic CFL violated: dt={dt:g} exceeds h/(V_c(2K+1))={limit:g}"
        )


# ---------------------------------------------------------------------------
# fluxes and face states

def upwind_flux(v, f_minus, f_plus):
    """v * f^- for v >= 0, v * f^+ for v < 0, elementwise over velocity."""
    return np.where(v >= 0, v * f_minus, v * f_plus)


def _wall_pair_1d(bcond, grid):
    m = Moments(rho=np.asarray(bcond.p_w / bcond.T_w), u1=np.asarray(0.0),
                T=np.asarray(bcond.T_w))
    return np.stack(reduced_maxwellian_h(m, grid))


def _ghost_1d(bcond, side, tl, tr, grid):
    """Ghost trace (2, Nv) outside one end of a 1D mesh.

    side=0 is the lower wall (ghost feeds fm[0]), side=1 the upper
    (ghost feeds fp[-1]).  tl/tr are the interior edge traces (2, Nx, Nv).
    """
    interior = tl[:, 0] if side == 0 else tr[:, -1]
    if isinstance(bcond, Periodic):
        return tr[:, -1] if side == 0 else tl[:, 0]
    if isinstance(bcond, Outflow):
        return interior
    if isinstance(bcond, EvaporatingWall):
        return _wall_pair_1d(bcond, grid)
    if isinstance(bcond, DiffuseMovingWall):
        Tw = float(np.asarray(bcond.temperature(0.0)))
        m = Moments(rho=np.asarray(1.0), u1=np.asarray(0.0), T=np.asarray(Tw))
        mhat = np.stack(reduced_maxwellian_h(m, grid))
        vn = grid.v if side == 0 else -grid.v
        out_flux = grid.weight * np.sum(np.where(vn < 0, vn * interior[0], 0.0))
        in_flux = grid.weight * np.sum(np.where(vn > 0, vn * mhat[0], 0.0))
        sigma = -out_flux / in_flux
        return sigma * mhat
    raise ConfigurationError(f"unsupported 1D boundary {bcond!r}")


def face_states_1d(f, basis, grid, bc):
    """Traces on both sides of every x-face, ghosts included.

    Returns (fm, fp) of shape (2, Nx+1, Nv): fm[i] approaches face i from
    below, fp[i] from above.
    """
    tl, tr = edge_traces(f, basis, axis=2)
    lo, hi = bc[0]
    nx = f.shape[1]
    fm = np.empty((2, nx + 1) + f.shape[3:])
    fp = np.empty_like(fm)
    fm[:, 1:] = tr
    fp[:, :-1] = tl
    fm[:, 0] = _ghost_1d(lo, 0, tl, tr, grid)
    fp[:, -1] = _ghost_1d(hi, 1, tl, tr, grid)
    return fm, fp


def transport_stage_1d(f, mesh, basis, grid, bc, dt, face_states=None):
    """Explicit DG transport: R = f - dt * d(v f)/dx in weak form.

    face_states lets the hybrid coupler substitute reconstructed traces at
    mixed interfaces; by default they come from f and the boundary spec.
    """
    check_kinetic_cfl(mesh, (basis,), grid, dt)
    if face_states is None:
        face_states = face_states_1d(f, basis, grid, bc)
    fm, fp = face_states
    q = upwind_flux(grid.v, fm, fp)
    vol = apply_matrix(f, basis.volume_kernel, 2) * grid.v
    surf = (
        basis.trace_right[None, None, :, None] * q[:, 1:, None, :]
        - basis.trace_left[None, None, :, None] * q[:, :-1, None, :]
    )
    scale = dt / (mesh.widths[0][None, :, None, None] * basis.weights[None, None, :, None])
    return f + scale * (vol - surf)


def imex_update_1d(R, eps, dt, grid, nu_scale=1.0):
    """Implicit relaxation toward the Maxwellian of R's own moments.

    nu_scale=0 switches collisions off (pure transport), a test hook.
    """
    mom = moments_from_h(R[0], R[1], grid)
    nu = nu_scale * collision_frequency(mom)
    Mpair = np.stack(reduced_maxwellian_h(mom, grid))
    w = (nu * dt)[None, :, :, None]
    f_new = (eps * R + w * Mpair) / (eps + w)
    return f_new, mom


def kinetic_step_1d(state, mesh, basis, grid, bc, dt, face_states=None, nu_scale=1.0):
    R = transport_stage_1d(state.f, mesh, basis, grid, bc, dt, face_states)
    f_new, mom = imex_update_1d(R, state.eps, dt, grid, nu_scale)
    return KineticState(f=f_new, moments=mom, t=state.t + dt, eps=state.eps)


# ---------------------------------------------------------------------------
# 2D: the same operator applied per axis
#
# f has shape (2, Nx, Ny, K1+1, K2+1, Nv, Nv); cell axes (1, 2), node axes
# (3, 4), velocity axes (5, 6) with v1 on axis 5.

def _wall_pair_2d(Tw_nodes, u_w, axis, grid):
    """Unit-density wall Maxwellian; u_w creeps along the wall, so it lands
    in the velocity component tangential to the `axis`-normal faces."""
    shape = np.shape(Tw_nodes)
    tangential = np.full(shape, float(u_w))
    normal = np.zeros(shape)
    m = Moments(
        rho=np.ones(shape),
        u1=normal if axis == 0 else tangential,
        T=np.asarray(Tw_nodes, dtype=float),
        u2=tangential if axis == 0 else normal,
    )
    return np.stack(reduced_maxwellian_g(m, grid))


def _ghost_2d(bcond, axis, side, tl, tr, mesh, bases, grid):
    """Ghost trace outside one 2D boundary face.

    tl/tr are interior edge traces with the normal node axis removed, e.g.
    for axis=0: (2, Nx, Ny, K2+1, Nv, Nv) sliced at the boundary.
    """
    if axis == 0:
        interior = tl[:, 0] if side == 0 else tr[:, -1]
        opposite = tr[:, -1] if side == 0 else tl[:, 0]
    else:
        interior = tl[:, :, 0] if side == 0 else tr[:, :, -1]
        opposite = tr[:, :, -1] if side == 0 else tl[:, :, 0]
    if isinstance(bcond, Periodic):
        return opposite
    if isinstance(bcond, Outflow):
        return interior
    if isinstance(bcond, DiffuseMovingWall):
        # tangential coordinate: Gauss nodes along the wall
        tang = 1 - axis
        coords = mesh.node_coords(bases[tang], tang)
        Tw = bcond.temperature(coords)
        mhat = _wall_pair_2d(Tw, bcond.u_w, axis, grid)
        v1, v2 = grid.axes_2d()
        vn = (v1 if axis == 0 else v2) * (1.0 if side == 0 else -1.0)
        w = grid.weight
        out_flux = w * np.sum(np.where(vn < 0, vn * interior[0], 0.0), axis=(-2, -1))
        in_flux = w * np.sum(np.where(vn > 0, vn * mhat[0], 0.0), axis=(-2, -1))
        sigma = -out_flux / in_flux
        return sigma[None, ..., None, None] * mhat
    if isinstance(bcond, EvaporatingWall):
        tang = 1 - axis
        shape = (mesh.ncells[tang], bases[tang].npts)
        m = Moments(
            rho=np.full(shape, bcond.p_w / bcond.T_w),
            u1=np.zeros(shape),
            T=np.full(shape, bcond.T_w),
            u2=np.zeros(shape),
        )
        return np.stack(reduced_maxwellian_g(m, grid))
    raise ConfigurationError(f"unsupported 2D boundary {bcond!r}")


def face_states_2d(f, mesh, bases, grid, bc, axis):
    """Both-side traces at every face normal to `axis`, ghosts included.

    axis=0: (fm, fp) of shape (2, Nx+1, Ny, K2+1, Nv, Nv)
    axis=1: (2, Nx, Ny+1, K1+1, Nv, Nv)
    """
    node_axis = 3 + axis
    tl, tr = edge_traces(f, bases[axis], axis=node_axis)
    lo, hi = bc[axis]
    face_axis = 1 + axis
    shape = list(tl.shape)
    shape[face_axis] += 1
    fm = np.empty(shape)
    fp = np.empty(shape)
    if axis == 0:
        fm[:, 1:] = tr
        fp[:, :-1] = tl
        fm[:, 0] = _ghost_2d(lo, 0, 0, tl, tr, mesh, bases, grid)
        fp[:, -1] = _ghost_2d(hi, 0, 1, tl, tr, mesh, bases, grid)
    else:
        fm[:, :, 1:] = tr
        fp[:, :, :-1] = tl
        fm[:, :, 0] = _ghost_2d(lo, 1, 0, tl, tr, mesh, bases, grid)
        fp[:, :, -1] = _ghost_2d(hi, 1, 1, tl, tr, mesh, bases, grid)
    return fm, fp


def _axis_residual_2d(f, mesh, bases, grid, q, axis):
    """DG residual of d(v_a f)/dx_a from precomputed face fluxes q."""
    node_axis = 3 + axis
    basis = bases[axis]
    v1, v2 = grid.axes_2d()
    vn = v1 if axis == 0 else v2
    vol = apply_matrix(f, basis.volume_kernel, node_axis) * vn
    if axis == 0:
        qE = np.expand_dims(q[:, 1:], node_axis)
        qW = np.expand_dims(q[:, :-1], node_axis)
        width = mesh.widths[0][None, :, None, None, None, None, None]
    else:
        qE = np.expand_dims(q[:, :, 1:], node_axis)
        qW = np.expand_dims(q[:, :, :-1], node_axis)
        width = mesh.widths[1][None, None, :, None, None, None, None]
    tr_shape = [1] * f.ndim
    tr_shape[node_axis] = basis.npts
    phiR = basis.trace_right.reshape(tr_shape)
    phiL = basis.trace_left.reshape(tr_shape)
    omega = basis.weights.reshape(tr_shape)
    return (vol - (phiR * qE - phiL * qW)) / (width * omega)


def transport_stage_2d(f, mesh, bases, grid, bc, dt, face_states=None):
    """Explicit 2D DG transport; the 1D operator applied along each axis."""
    check_kinetic_cfl(mesh, bases, grid, dt)
    if face_states is None:
        face_states = tuple(face_states_2d(f, mesh, bases, grid, bc, ax) for ax in (0, 1))
    v1, v2 = grid.axes_2d()
    R = f.copy()
    for ax, vn in ((0, v1), (1, v2)):
        fm, fp = face_states[ax]
        q = upwind_flux(vn, fm, fp)
        R += dt * _axis_residual_2d(f, mesh, bases, grid, q, ax)
    return R


def imex_update_2d(R, eps, dt, grid, nu_scale=1.0):
    mom = moments_from_g(R[0], R[1], grid)
    nu = nu_scale * collision_frequency(mom)
    Mpair = np.stack(reduced_maxwellian_g(mom, grid))
    w = (nu * dt)[None, ..., None, None]
    f_new = (eps * R + w * Mpair) / (eps + w)
    return f_new, mom


def kinetic_step_2d(state, mesh, bases, grid, bc, dt, face_states=None, nu_scale=1.0):
    R = transport_stage_2d(state.f, mesh, bases, grid, bc, dt, face_states)
    f_new, mom = imex_update_2d(R, state.eps, dt, grid, nu_scale)
    return KineticState(f=f_new, moments=mom, t=state.t + dt, eps=state.eps)
