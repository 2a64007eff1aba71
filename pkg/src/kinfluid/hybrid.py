"""Domain-decomposed time stepping: kinetic and fluid cells side by side.

The coupled step advances one global state through both discretizations.
Kinetic cells carry the reduced distribution pair and relax implicitly;
fluid cells advance conserved variables with split-Gaussian face fluxes.
At a mixed face the fluid side is lifted to a truncated expansion built
from its own trace, the shared numerical flux is evaluated in velocity
space, and the fluid cell receives its moments.  Both models therefore
see one flux function at the interface and the scheme conserves mass,
momentum and energy across it by construction.

Bookkeeping conventions:

* `f` spans the whole mesh but is authoritative only on kinetic cells.
  Fluid cells keep whatever pair they last held; those values are dead
  storage and every read is masked.  Starting from an all-kinetic map
  keeps the invariant that stale entries were once valid states.
* `U` is live everywhere.  Kinetic cells are overwritten from velocity
  moments after every step, so diagnostics and the breakdown indicator
  never look at f directly.
* Region labels are re-evaluated on the post-step state every `period`
  steps.  A cell promoted to kinetic is seeded with the expansion pair
  of its own moments and in-cell gradients; a cell demoted to fluid just
  keeps its synced conserved variables.
"""

from dataclasses import dataclass, replace

import numpy as np

from .decomposition import (
    DecompositionConfig,
    RegionMap,
    compression_distance_1d,
    compression_distance_2d,
    lambda_field_1d,
    lambda_field_2d,
    update_regions,
)
from .errors import ConfigurationError, SolverError
from .fluid import (
    FluidState,
    conserved_from_moments,
    face_primitive_traces_1d,
    face_primitive_traces_2d,
    fluid_cfl_dt,
    gradient_reconstruct_1d,
    gradient_reconstruct_2d,
    kfvs_interface_flux_1d,
    kfvs_interface_flux_2d,
    moments_from_conserved,
    ns_advance_1d,
    ns_advance_2d,
    ns_step_1d,
    ns_step_2d,
    primitive_gradients_1d,
    primitive_gradients_2d,
)
from .kinetic import (
    Outflow,
    Periodic,
    face_states_1d,
    face_states_2d,
    imex_update_1d,
    imex_update_2d,
    kinetic_cfl_dt,
    transport_stage_1d,
    transport_stage_2d,
    upwind_flux,
)
from .velocity import (
    Moments,
    chapman_enskog_g,
    chapman_enskog_h,
    reduced_maxwellian_g,
    reduced_maxwellian_h,
)

MODES = ("hybrid", "kinetic", "fluid")


# ---------------------------------------------------------------------------
# state

@dataclass
class HybridState:
    f: np.ndarray
    U: np.ndarray
    region: RegionMap
    t: float
    eps: float
    step: int = 0
    mode: str = "hybrid"

    @property
    def moments(self):
        return moments_from_conserved(self.U, "state access")

    @classmethod
    def from_moments(cls, m, grid, eps, mode="hybrid", forced=None, t=0.0):
        """Initial state: Maxwellian pair everywhere, map chosen by mode."""
        if mode not in MODES:
            raise ConfigurationError(f"unknown mode {mode!r}; pick one of {MODES}")
        if grid.dim == 1:
            pair = np.stack(reduced_maxwellian_h(m, grid))
        else:
            pair = np.stack(reduced_maxwellian_g(m, grid))
        U = conserved_from_moments(m)
        ncells = m.rho.shape[:grid.dim]
        if mode == "fluid":
            if forced is not None and np.any(forced):
                raise ConfigurationError(
                    "forced kinetic cells are incompatible with fluid mode")
            region = RegionMap(kinetic=np.zeros(ncells, dtype=bool),
                               forced=np.zeros(ncells, dtype=bool))
        else:
            # hybrid also starts all-kinetic: every stale f entry then
            # holds a state that was once authoritative
            region = RegionMap.all_kinetic(ncells, forced)
        return cls(f=pair, U=U, region=region, t=t, eps=eps, mode=mode)


def hybrid_cfl_dt(mesh, bases, grid, m, eps, safety=0.9):
    """Stable step for the coupled scheme: min of both solvers' bounds."""
    return min(kinetic_cfl_dt(mesh, bases, grid, safety),
               fluid_cfl_dt(mesh, bases, m, eps, safety))


# ---------------------------------------------------------------------------
# mixed-face bookkeeping

def _mixed_face_masks(kin, axis, periodic):
    """Face masks along `axis` for a boolean cell map `kin`.

    Returns (sub_minus, sub_plus, kin_faces): faces whose minus (plus)
    side trace must be replaced because that cell is fluid while the
    face still feeds a kinetic cell, and all faces touching at least one
    kinetic cell.  Boundary faces join in only through the periodic
    wrap; wall and outflow ghosts always mirror the interior cell's own
    model, so they are never mixed.
    """
    def at(idx):
        return tuple(idx if a == axis else slice(None)
                     for a in range(kin.ndim))

    shape = list(kin.shape)
    shape[axis] += 1
    sub_minus = np.zeros(shape, dtype=bool)
    sub_plus = np.zeros(shape, dtype=bool)
    kin_faces = np.zeros(shape, dtype=bool)
    sub_minus[at(slice(1, None))] = ~kin
    sub_plus[at(slice(0, -1))] = ~kin
    kin_faces[at(slice(1, None))] |= kin
    kin_faces[at(slice(0, -1))] |= kin
    if periodic:
        sub_minus[at(0)] = ~kin[at(-1)]
        sub_plus[at(-1)] = ~kin[at(0)]
        kin_faces[at(0)] |= kin[at(-1)]
        kin_faces[at(-1)] |= kin[at(0)]
    return sub_minus & kin_faces, sub_plus & kin_faces, kin_faces


def _mask_moments(m, mask):
    return Moments(rho=m.rho[mask], u1=m.u1[mask], T=m.T[mask],
                   u2=None if m.u2 is None else m.u2[mask])


def _pair_from_traces_1d(m, grads, mask, eps, grid):
    msel = _mask_moments(m, mask)
    return np.stack(chapman_enskog_h(
        msel, grads[0][mask], grads[1][mask], eps, grid))


def _pair_from_traces_2d(m, grads, mask, eps, grid):
    msel = _mask_moments(m, mask)
    gsel = tuple(g[mask] for g in grads)
    return np.stack(chapman_enskog_g(msel, gsel, eps, grid))


def _moment_flux_1d(q, grid):
    """Conserved flux as velocity moments of per-velocity face fluxes."""
    w = grid.weight
    v = grid.v
    return np.stack([
        w * q[0].sum(axis=-1),
        w * (v * q[0]).sum(axis=-1),
        w * (0.5 * v * v * q[0] + q[1]).sum(axis=-1),
    ])


def _moment_flux_2d(q, grid):
    v1, v2 = grid.axes_2d()
    w = grid.weight
    esq = 0.5 * (v1 * v1 + v2 * v2)
    return np.stack([
        w * q[0].sum(axis=(-2, -1)),
        w * (v1 * q[0]).sum(axis=(-2, -1)),
        w * (v2 * q[0]).sum(axis=(-2, -1)),
        w * (esq * q[0] + q[1]).sum(axis=(-2, -1)),
    ])


def _is_wall(bcond):
    return not isinstance(bcond, (Periodic, Outflow))


def _check_wall_cells(region, bc, dim):
    """Every cell column touching a wall must be kinetic."""
    kin = region.kinetic
    for axis in range(dim):
        lo, hi = bc[axis]
        edge_lo = kin[(0,) if axis == 0 else (slice(None), 0)]
        edge_hi = kin[(-1,) if axis == 0 else (slice(None), -1)]
        if (_is_wall(lo) and not np.all(edge_lo)) or \
                (_is_wall(hi) and not np.all(edge_hi)):
            raise SolverError(
                "fluid region touches a wall boundary; walls must stay "
                "inside forced kinetic bands")


def _cells_valid(U, dim):
    """Per-cell moment validity without raising; NaN counts as invalid."""
    rho = U[0]
    with np.errstate(invalid="ignore", divide="ignore"):
        ke = sum(U[1 + k] ** 2 for k in range(dim)) / (2.0 * rho)
        T = (U[-1] - ke) / rho * (2.0 / 3.0)
    ok = (rho > 0.0) & (T > 0.0) & np.isfinite(T)
    node_axes = tuple(range(dim, ok.ndim))
    return ok.all(axis=node_axes)


# ---------------------------------------------------------------------------
# one step, 1D

def _mixed_step_1d(state, mesh, basis, grid, bc, dt):
    kin = state.region.kinetic
    eps = state.eps
    _check_wall_cells(state.region, bc, 1)

    S = gradient_reconstruct_1d(state.U, mesh, basis, bc)
    mL, gL, mR, gR = face_primitive_traces_1d(state.U, S, basis, bc)

    fm, fp = face_states_1d(state.f, basis, grid, bc)
    sub_m, sub_p, kin_faces = _mixed_face_masks(
        kin, 0, isinstance(bc[0][0], Periodic))
    if sub_m.any():
        fm[:, sub_m] = _pair_from_traces_1d(mL, gL, sub_m, eps, grid)
    if sub_p.any():
        fp[:, sub_p] = _pair_from_traces_1d(mR, gR, sub_p, eps, grid)

    R = transport_stage_1d(state.f, mesh, basis, grid, bc, dt,
                           face_states=(fm, fp))
    fk, mk = imex_update_1d(R[:, kin], eps, dt, grid)
    f_new = state.f.copy()
    f_new[:, kin] = fk

    fhat = kfvs_interface_flux_1d(mL, gL, mR, gR, eps)
    q = upwind_flux(grid.v, fm, fp)
    fhat[:, kin_faces] = _moment_flux_1d(q, grid)[:, kin_faces]
    U_new = ns_advance_1d(state.U, S, fhat, mesh, basis, dt, eps)
    U_new[:, kin] = conserved_from_moments(mk)
    moments_from_conserved(U_new, "hybrid step")
    return f_new, U_new


def _reassign_regions_1d(state, mesh, basis, grid, bc, dcfg):
    periodic = isinstance(bc[0][0], Periodic)
    lam = lambda_field_1d(state.U, mesh, basis, periodic, state.eps)
    dist = compression_distance_1d(state.f, mesh, basis, grid, state.eps)
    dist = np.where(state.region.kinetic, dist, np.inf)
    new_region = update_regions(state.region, lam, dist, dcfg, state.step)

    demoted = state.region.kinetic & ~new_region.kinetic
    if demoted.any():
        stuck = demoted & ~_cells_valid(state.U, 1)
        if stuck.any():
            new_region = replace(new_region,
                                 kinetic=new_region.kinetic | stuck)

    promoted = new_region.kinetic & ~state.region.kinetic
    f = state.f
    if promoted.any():
        S = gradient_reconstruct_1d(state.U, mesh, basis, bc)
        m = moments_from_conserved(state.U[:, promoted], "region switch")
        du, dT = primitive_gradients_1d(m, S[:, promoted])
        f = f.copy()
        f[:, promoted] = np.stack(chapman_enskog_h(m, du, dT, state.eps, grid))
    return replace(state, f=f, region=new_region)


def _kinetic_substep_1d(state, mesh, basis, grid, bc, dt):
    """The standalone kinetic update applied to the whole domain."""
    R = transport_stage_1d(state.f, mesh, basis, grid, bc, dt)
    f_new, mom = imex_update_1d(R, state.eps, dt, grid)
    return f_new, conserved_from_moments(mom)


def hybrid_step_1d(state, mesh, basis, grid, bc, dt,
                   dcfg=DecompositionConfig()):
    """Advance the coupled 1D state by one step of size dt."""
    if state.mode == "kinetic":
        f_new, U_new = _kinetic_substep_1d(state, mesh, basis, grid, bc, dt)
        return replace(state, f=f_new, U=U_new, t=state.t + dt,
                       step=state.step + 1)
    if state.mode == "fluid":
        fs = ns_step_1d(FluidState(U=state.U, t=state.t, eps=state.eps),
                        mesh, basis, bc, dt)
        return replace(state, U=fs.U, t=fs.t, step=state.step + 1)

    region = state.region
    if region.all_kinetic_cells:
        f_new, U_new = _kinetic_substep_1d(state, mesh, basis, grid, bc, dt)
    elif region.all_fluid_cells:
        fs = ns_step_1d(FluidState(U=state.U, t=state.t, eps=state.eps),
                        mesh, basis, bc, dt)
        f_new, U_new = state.f, fs.U
    else:
        f_new, U_new = _mixed_step_1d(state, mesh, basis, grid, bc, dt)

    out = replace(state, f=f_new, U=U_new, t=state.t + dt,
                  step=state.step + 1)
    if out.step % dcfg.period == 0:
        out = _reassign_regions_1d(out, mesh, basis, grid, bc, dcfg)
    return out


# ---------------------------------------------------------------------------
# one step, 2D

def _mixed_step_2d(state, mesh, bases, grid, bc, dt):
    kin = state.region.kinetic
    eps = state.eps
    _check_wall_cells(state.region, bc, 2)

    Sx, Sy = gradient_reconstruct_2d(state.U, mesh, bases, bc)
    v1, v2 = grid.axes_2d()
    face_states = []
    fhats = []
    for axis, vn in ((0, v1), (1, v2)):
        mL, gL, mR, gR = face_primitive_traces_2d(
            state.U, Sx, Sy, mesh, bases, bc, axis)
        fm, fp = face_states_2d(state.f, mesh, bases, grid, bc, axis)
        sub_m, sub_p, kin_faces = _mixed_face_masks(
            kin, axis, isinstance(bc[axis][0], Periodic))
        if sub_m.any():
            fm[:, sub_m] = _pair_from_traces_2d(mL, gL, sub_m, eps, grid)
        if sub_p.any():
            fp[:, sub_p] = _pair_from_traces_2d(mR, gR, sub_p, eps, grid)
        face_states.append((fm, fp))

        fhat = kfvs_interface_flux_2d(mL, gL, mR, gR, eps, axis=axis)
        q = upwind_flux(vn, fm, fp)
        fhat[:, kin_faces] = _moment_flux_2d(q, grid)[:, kin_faces]
        fhats.append(fhat)

    R = transport_stage_2d(state.f, mesh, bases, grid, bc, dt,
                           face_states=tuple(face_states))
    fk, mk = imex_update_2d(R[:, kin], eps, dt, grid)
    f_new = state.f.copy()
    f_new[:, kin] = fk

    U_new = ns_advance_2d(state.U, (Sx, Sy), tuple(fhats), mesh, bases,
                          dt, eps)
    U_new[:, kin] = conserved_from_moments(mk)
    moments_from_conserved(U_new, "hybrid step")
    return f_new, U_new


def _reassign_regions_2d(state, mesh, bases, grid, bc, dcfg):
    periodic = tuple(isinstance(bc[ax][0], Periodic) for ax in range(2))
    lam = lambda_field_2d(state.U, mesh, bases, periodic, state.eps)
    dist = compression_distance_2d(state.f, mesh, bases, grid, state.eps)
    dist = np.where(state.region.kinetic, dist, np.inf)
    new_region = update_regions(state.region, lam, dist, dcfg, state.step)

    demoted = state.region.kinetic & ~new_region.kinetic
    if demoted.any():
        stuck = demoted & ~_cells_valid(state.U, 2)
        if stuck.any():
            new_region = replace(new_region,
                                 kinetic=new_region.kinetic | stuck)

    promoted = new_region.kinetic & ~state.region.kinetic
    f = state.f
    if promoted.any():
        Sx, Sy = gradient_reconstruct_2d(state.U, mesh, bases, bc)
        m = moments_from_conserved(state.U[:, promoted], "region switch")
        grads = primitive_gradients_2d(m, Sx[:, promoted], Sy[:, promoted])
        f = f.copy()
        f[:, promoted] = np.stack(chapman_enskog_g(m, grads, state.eps, grid))
    return replace(state, f=f, region=new_region)


def _kinetic_substep_2d(state, mesh, bases, grid, bc, dt):
    R = transport_stage_2d(state.f, mesh, bases, grid, bc, dt)
    f_new, mom = imex_update_2d(R, state.eps, dt, grid)
    return f_new, conserved_from_moments(mom)


def hybrid_step_2d(state, mesh, bases, grid, bc, dt,
                   dcfg=DecompositionConfig()):
    """Advance the coupled 2D state by one step of size dt."""
    if state.mode == "kinetic":
        f_new, U_new = _kinetic_substep_2d(state, mesh, bases, grid, bc, dt)
        return replace(state, f=f_new, U=U_new, t=state.t + dt,
                       step=state.step + 1)
    if state.mode == "fluid":
        fs = ns_step_2d(FluidState(U=state.U, t=state.t, eps=state.eps),
                        mesh, bases, bc, dt)
        return replace(state, U=fs.U, t=fs.t, step=state.step + 1)

    region = state.region
    if region.all_kinetic_cells:
        f_new, U_new = _kinetic_substep_2d(state, mesh, bases, grid, bc, dt)
    elif region.all_fluid_cells:
        fs = ns_step_2d(FluidState(U=state.U, t=state.t, eps=state.eps),
                        mesh, bases, bc, dt)
        f_new, U_new = state.f, fs.U
    else:
        f_new, U_new = _mixed_step_2d(state, mesh, bases, grid, bc, dt)

    out = replace(state, f=f_new, U=U_new, t=state.t + dt,
                  step=state.step + 1)
    if out.step % dcfg.period == 0:
        out = _reassign_regions_2d(out, mesh, bases, grid, bc, dcfg)
    return out
