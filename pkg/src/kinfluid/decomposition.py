"""Regime indicators and the per-cell kinetic/fluid region map.

Two one-sided criteria guard the exits from each model.  A fluid cell
abandons the hydrodynamic description when the gradient indicator lambda
exceeds eta0; a kinetic cell may drop to the fluid description when its
stored distribution sits within delta0 (discrete L2) of the truncated
expansion built from its own moments.  Cells inside a forced band next to
a wall never leave the kinetic region.

Both indicators are evaluated at cell centers.  First derivatives come
from the cell's own polynomial where it has one (K >= 1) and from
neighbour-difference reconstruction at K = 0; second derivatives are
always neighbour differences of the per-cell first derivatives, one-sided
at non-periodic boundaries.
"""

from dataclasses import dataclass

import numpy as np

from .fluid import moments_from_conserved
from .kinetic import DiffuseMovingWall, EvaporatingWall
from .mesh import apply_matrix, contract
from .velocity import chapman_enskog_g, chapman_enskog_h, moments_from_g, moments_from_h


@dataclass(frozen=True)
class DecompositionConfig:
    eta0: float = 1e-3
    delta0: float = 1e-3
    forced_band: float = 0.1
    period: int = 1

    def __post_init__(self):
        if self.eta0 <= 0 or self.delta0 <= 0:
            raise ValueError("decomposition thresholds must be positive")


@dataclass
class RegionMap:
    kinetic: np.ndarray       # bool per cell
    forced: np.ndarray        # bool per cell, forced cells stay kinetic
    last_change: int = 0

    def __post_init__(self):
        self.kinetic = np.asarray(self.kinetic, dtype=bool) | self.forced

    @classmethod
    def all_kinetic(cls, ncells, forced=None):
        kin = np.ones(ncells, dtype=bool)
        if forced is None:
            forced = np.zeros(ncells, dtype=bool)
        return cls(kinetic=kin, forced=forced)

    @property
    def kinetic_fraction(self):
        return float(np.count_nonzero(self.kinetic)) / self.kinetic.size

    @property
    def all_kinetic_cells(self):
        return bool(self.kinetic.all())

    @property
    def all_fluid_cells(self):
        return bool(~self.kinetic.any())


def forced_band_mask(mesh, bc, width):
    """Cells whose center lies within `width` of a wall-type boundary."""
    mask = np.zeros(mesh.ncells, dtype=bool)
    for axis in range(mesh.dim):
        lo, hi = bc[axis]
        c = mesh.centers[axis]
        lo_band = c - mesh.edges[axis][0] <= width + 1e-12
        hi_band = mesh.edges[axis][-1] - c <= width + 1e-12
        for bcond, band in ((lo, lo_band), (hi, hi_band)):
            if isinstance(bcond, (EvaporatingWall, DiffuseMovingWall)):
                if mesh.dim == 1:
                    mask |= band
                elif axis == 0:
                    mask |= band[:, None]
                else:
                    mask |= band[None, :]
    return mask


# ---------------------------------------------------------------------------
# cell-center fields and derivative reconstructions

def _neighbor_diff(vals, centers, axis, periodic):
    """d/dx of per-cell center values by neighbour differences."""
    if periodic:
        h = centers[1] - centers[0]
        return (np.roll(vals, -1, axis=axis) - np.roll(vals, 1, axis=axis)) / (2.0 * h)
    return np.gradient(vals, centers, axis=axis)


def center_values_1d(field, basis):
    return contract(field, basis.center_interp, axis=field.ndim - 1)


def center_values_2d(field, bases):
    out = contract(field, bases[0].center_interp, axis=field.ndim - 2)
    return contract(out, bases[1].center_interp, axis=out.ndim - 1)


def _center_deriv_1d(field, vals, mesh, basis, periodic):
    if basis.order >= 1:
        return contract(field, basis.center_deriv, axis=1) / mesh.widths[0]
    return _neighbor_diff(vals, mesh.centers[0], 0, periodic)


def _center_deriv_2d(field, vals, mesh, bases, axis, periodic):
    if bases[axis].order >= 1:
        d = contract(field, bases[axis].center_deriv, axis=2 + axis)
        d = contract(d, bases[1 - axis].center_interp, axis=2)
        h = mesh.widths[axis]
        return d / (h[:, None] if axis == 0 else h[None, :])
    return _neighbor_diff(vals, mesh.centers[axis], axis, periodic)


# ---------------------------------------------------------------------------
# fluid-breakdown indicator

def indicator_lambda(m, grad_T, grad_u, lap_u, lap_rho, eps):
    """Gradient-magnitude indicator at cell centers.

    lambda = eps^2 ( |grad T|^2 / T + |grad u|^2
                     + sqrt((|lap u|^2 + (lap rho / rho)^2)(1 + T^2)) )

    grad_T and lap_u are tuples over axes resp. velocity components;
    grad_u collects every du_i/dx_j; the velocity-Jacobian norm is
    Frobenius, so the value is invariant under u -> -u.
    """
    gT2 = sum(np.asarray(g) ** 2 for g in grad_T)
    gU2 = sum(np.asarray(g) ** 2 for g in grad_u)
    lU2 = sum(np.asarray(l) ** 2 for l in lap_u)
    curv = np.sqrt((lU2 + (lap_rho / m.rho) ** 2) * (1.0 + m.T ** 2))
    return eps ** 2 * (gT2 / m.T + gU2 + curv)


def lambda_field_1d(U, mesh, basis, periodic, eps):
    """Indicator at every cell center from the conserved nodal field."""
    m_nod = moments_from_conserved(U, "indicator")
    Uc = center_values_1d(U, basis)
    m = moments_from_conserved(Uc, "indicator centers")
    cen = mesh.centers[0]

    def d1(field, vals):
        return _center_deriv_1d(field, vals, mesh, basis, periodic)

    drho = d1(m_nod.rho, m.rho)
    du1 = d1(m_nod.u1, m.u1)
    dT = d1(m_nod.T, m.T)
    lap_u1 = _neighbor_diff(du1, cen, 0, periodic)
    lap_rho = _neighbor_diff(drho, cen, 0, periodic)
    return indicator_lambda(m, (dT,), (du1,), (lap_u1,), lap_rho, eps)


def lambda_field_2d(U, mesh, bases, periodic, eps):
    m_nod = moments_from_conserved(U, "indicator")
    Uc = center_values_2d(U, bases)
    m = moments_from_conserved(Uc, "indicator centers")

    def d1(field, vals, axis):
        return _center_deriv_2d(field, vals, mesh, bases, axis, periodic[axis])

    grads = {}
    for name, field, vals in (("rho", m_nod.rho, m.rho), ("u1", m_nod.u1, m.u1),
                              ("u2", m_nod.u2, m.u2), ("T", m_nod.T, m.T)):
        grads[name] = tuple(d1(field, vals, axis) for axis in range(2))

    def lap(pair):
        return sum(_neighbor_diff(pair[axis], mesh.centers[axis], axis, periodic[axis])
                   for axis in range(2))

    grad_u = grads["u1"] + grads["u2"]
    lap_u = (lap(grads["u1"]), lap(grads["u2"]))
    return indicator_lambda(m, grads["T"], grad_u, lap_u, lap(grads["rho"]), eps)


def fluid_breakdown(lam, config):
    """Strictly above threshold; equality keeps the fluid description."""
    return np.asarray(lam) > config.eta0


# ---------------------------------------------------------------------------
# kinetic-compression indicator

def compression_distance_1d(f, mesh, basis, grid, eps):
    """Discrete L2 distance per cell between f and its own truncated pair.

    Gradients feeding the expansion are the in-cell polynomial derivatives
    of the moment fields, which vanish identically at K = 0; the norm uses
    the cell-average Gauss weights in space and the trapezoid weight in
    velocity, aggregated over both reduced components.
    """
    m = moments_from_h(f[0], f[1], grid)
    dx = mesh.widths[0][:, None]
    ddx = basis.diff.T
    du1 = apply_matrix(m.u1, ddx, axis=1) / dx
    dT = apply_matrix(m.T, ddx, axis=1) / dx
    fce = np.stack(chapman_enskog_h(m, du1, dT, eps, grid))
    sq = ((f - fce) ** 2).sum(axis=0)
    sq = (sq * basis.weights[None, :, None]).sum(axis=(1, 2))
    return np.sqrt(grid.weight * sq)


def compression_distance_2d(f, mesh, bases, grid, eps):
    m = moments_from_g(f[0], f[1], grid)
    hx = mesh.widths[0][:, None, None, None]
    hy = mesh.widths[1][None, :, None, None]

    def dx(field):
        return apply_matrix(field, bases[0].diff.T, axis=2) / hx

    def dy(field):
        return apply_matrix(field, bases[1].diff.T, axis=3) / hy

    grads = (dx(m.u1), dy(m.u1), dx(m.u2), dy(m.u2), dx(m.T), dy(m.T))
    fce = np.stack(chapman_enskog_g(m, grads, eps, grid))
    sq = ((f - fce) ** 2).sum(axis=0)
    w = bases[0].weights[:, None, None, None] * bases[1].weights[None, :, None, None]
    sq = (sq * w[None, None]).sum(axis=(2, 3, 4, 5))
    return np.sqrt(grid.weight * sq)


def kinetic_compression(dist, config):
    """At or below threshold: the distribution is hydrodynamic enough."""
    return np.asarray(dist) <= config.delta0


# ---------------------------------------------------------------------------
# region map update

def update_regions(region, lam, dist, config, step=0):
    """One sweep of both criteria.

    lam must cover every cell (only fluid cells consult it); dist likewise
    (only non-forced kinetic cells consult it; fluid cells may carry any
    placeholder, conventionally inf).  Idempotent when the criteria
    outcomes are unchanged.
    """
    stays_kinetic = ~kinetic_compression(dist, config)
    becomes_kinetic = fluid_breakdown(lam, config)
    label = np.where(region.kinetic, stays_kinetic, becomes_kinetic)
    label = label | region.forced
    changed = bool((label != region.kinetic).any())
    return RegionMap(kinetic=label, forced=region.forced,
                     last_change=step if changed else region.last_change)
