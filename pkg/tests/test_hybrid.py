"""Coupled stepping: mode dispatch, mixed faces, and region switching."""

from dataclasses import replace

import numpy as np
import pytest

from kinfluid.decomposition import DecompositionConfig, RegionMap
from kinfluid.errors import ConfigurationError, SolverError
from kinfluid.fluid import (FluidState, conserved_from_moments, fluid_cfl_dt,
                            ns_step_1d)
from kinfluid.hybrid import (HybridState, hybrid_cfl_dt, hybrid_step_1d,
                             hybrid_step_2d)
from kinfluid.kinetic import (EvaporatingWall, Periodic, imex_update_1d,
                              kinetic_cfl_dt, transport_stage_1d)
from kinfluid.mesh import Mesh, NodalBasis
from kinfluid.velocity import (Moments, VelocityGrid, moments_from_h,
                               reduced_maxwellian_h)

PER = ((Periodic(), Periodic()),)
FROZEN = DecompositionConfig(period=10 ** 9)   # labels never re-evaluated


def smooth_setup(n=16, nv=32, eps=0.05):
    mesh = Mesh(np.linspace(0.0, 1.0, n + 1))
    basis = NodalBasis(1)
    grid = VelocityGrid(vcut=8.0, nv=nv)
    x = mesh.node_coords(basis, 0)
    m = Moments(rho=1.0 + 0.2 * np.sin(2 * np.pi * x),
                u1=0.1 * np.cos(2 * np.pi * x),
                T=0.8 + 0.05 * np.sin(2 * np.pi * x))
    state = HybridState.from_moments(m, grid, eps)
    return mesh, basis, grid, state


def totals(U, mesh, basis):
    w = basis.weights[None, None, :] * mesh.widths[0][None, :, None]
    return (U * w).sum(axis=(1, 2))


def test_from_moments_validates_mode_and_forced():
    mesh, basis, grid, state = smooth_setup(n=8, nv=16)
    m = state.moments
    with pytest.raises(ConfigurationError, match="unknown mode"):
        HybridState.from_moments(m, grid, 0.1, mode="implicit")
    forced = np.zeros(8, bool)
    forced[0] = True
    with pytest.raises(ConfigurationError, match="incompatible with fluid mode"):
        HybridState.from_moments(m, grid, 0.1, mode="fluid", forced=forced)
    hyb = HybridState.from_moments(m, grid, 0.1, forced=forced)
    assert hyb.region.all_kinetic_cells and hyb.region.forced[0]


def test_kinetic_mode_is_the_standalone_solver_bitwise():
    mesh, basis, grid, state = smooth_setup(n=8, nv=16)
    dt = 0.5 * kinetic_cfl_dt(mesh, (basis,), grid)
    kin = replace(state, mode="kinetic")
    for _ in range(3):
        kin = hybrid_step_1d(kin, mesh, basis, grid, PER, dt)
    R = state.f
    U = state.U
    for _ in range(3):
        R = transport_stage_1d(R, mesh, basis, grid, PER, dt)
        R, mom = imex_update_1d(R, state.eps, dt, grid)
        U = conserved_from_moments(mom)
    assert np.array_equal(kin.f, R) and np.array_equal(kin.U, U)


def test_fluid_mode_is_the_standalone_solver_bitwise():
    mesh, basis, grid, state = smooth_setup(n=8, nv=16)
    m = state.moments
    dt = 0.5 * fluid_cfl_dt(mesh, (basis,), m, state.eps)
    fl = HybridState.from_moments(m, grid, state.eps, mode="fluid")
    fs = FluidState.from_moments(m, eps=state.eps)
    stale = fl.f.copy()
    for _ in range(3):
        fl = hybrid_step_1d(fl, mesh, basis, grid, PER, dt)
        fs = ns_step_1d(fs, mesh, basis, PER, dt)
    assert np.array_equal(fl.U, fs.U)
    assert np.array_equal(fl.f, stale)


def test_cfl_is_the_tighter_of_the_two():
    mesh, basis, grid, state = smooth_setup()
    m = state.moments
    dt = hybrid_cfl_dt(mesh, (basis,), grid, m, state.eps)
    assert dt == min(kinetic_cfl_dt(mesh, (basis,), grid),
                     fluid_cfl_dt(mesh, (basis,), m, state.eps))


def split_region(n, n_kin):
    kin = np.zeros(n, bool)
    kin[:n_kin] = True
    return RegionMap(kinetic=kin, forced=np.zeros(n, bool))


def test_stale_distribution_entries_are_dead_storage():
    """Fluid cells keep an untouched f; planting huge finite garbage there
    must not change the step at all."""
    mesh, basis, grid, state = smooth_setup()
    state = replace(state, region=split_region(16, 8))
    dt = 0.25 * hybrid_cfl_dt(mesh, (basis,), grid, state.moments, state.eps)
    poisoned = replace(state, f=state.f.copy())
    poisoned.f[:, ~state.region.kinetic] = 1e30
    a = hybrid_step_1d(state, mesh, basis, grid, PER, dt, FROZEN)
    b = hybrid_step_1d(poisoned, mesh, basis, grid, PER, dt, FROZEN)
    assert np.array_equal(a.U, b.U)
    kin = state.region.kinetic
    assert np.array_equal(a.f[:, kin], b.f[:, kin])
    assert np.all(b.f[:, ~kin] == 1e30)


def test_mixed_region_conserves_invariants():
    mesh, basis, grid, state = smooth_setup()
    state = replace(state, region=split_region(16, 8))
    dt = 0.5 * hybrid_cfl_dt(mesh, (basis,), grid, state.moments, state.eps)
    before = totals(state.U, mesh, basis)
    for _ in range(50):
        state = hybrid_step_1d(state, mesh, basis, grid, PER, dt, FROZEN)
    after = totals(state.U, mesh, basis)
    drift = np.abs(after - before)
    assert drift[0] <= 1e-10 * before[0]
    assert np.all(drift[1:] <= 1e-8 * np.abs(before).max())


def test_dynamic_switching_conserves_invariants():
    mesh, basis, grid, state = smooth_setup(eps=0.01)
    dt = 0.5 * hybrid_cfl_dt(mesh, (basis,), grid, state.moments, state.eps)
    before = totals(state.U, mesh, basis)
    for _ in range(200):
        state = hybrid_step_1d(state, mesh, basis, grid, PER, dt)
    after = totals(state.U, mesh, basis)
    drift = np.abs(after - before)
    assert drift[0] <= 1e-10 * before[0]
    assert np.all(drift[1:] <= 1e-8 * np.abs(before).max())


def test_fluid_cells_may_not_touch_walls():
    mesh, basis, grid, state = smooth_setup(n=8, nv=16)
    walls = ((EvaporatingWall(T_w=1.0, p_w=1.0),) * 2,)
    kin = np.ones(8, bool)
    kin[0] = False
    state = replace(state, region=RegionMap(kinetic=kin, forced=np.zeros(8, bool)))
    with pytest.raises(SolverError, match="forced kinetic bands"):
        hybrid_step_1d(state, mesh, basis, grid, walls, 1e-4, FROZEN)


def test_promotion_seeds_the_gradient_corrected_pair():
    """A cell entering the kinetic region starts from the truncated
    expansion of its own moments, not from a bare Maxwellian."""
    mesh, basis, grid, state = smooth_setup()
    state = replace(state, region=RegionMap(kinetic=np.zeros(16, bool),
                                            forced=np.zeros(16, bool)))
    dt = 0.25 * hybrid_cfl_dt(mesh, (basis,), grid, state.moments, state.eps)
    eager = DecompositionConfig(eta0=1e-30, delta0=1e-300)
    out = hybrid_step_1d(state, mesh, basis, grid, PER, dt, eager)
    assert out.region.all_kinetic_cells
    got = moments_from_h(out.f[0], out.f[1], grid)
    m = out.moments
    assert np.allclose(got.rho, m.rho, rtol=1e-9)
    assert np.allclose(got.u1, m.u1, atol=1e-9)
    assert np.allclose(got.T, m.T, rtol=1e-9)
    plain = np.stack(reduced_maxwellian_h(m, grid))
    assert np.max(np.abs(out.f - plain)) > 1e-4


def test_demotion_spares_forced_cells():
    mesh, basis, grid, state = smooth_setup()
    forced = np.zeros(16, bool)
    forced[[0, 15]] = True
    state = replace(state, region=RegionMap(kinetic=np.ones(16, bool),
                                            forced=forced))
    dt = 0.25 * hybrid_cfl_dt(mesh, (basis,), grid, state.moments, state.eps)
    sleepy = DecompositionConfig(eta0=1e30, delta0=1e30)
    out = hybrid_step_1d(state, mesh, basis, grid, PER, dt, sleepy)
    assert np.array_equal(out.region.kinetic, forced)


def test_mixed_region_conserves_in_2d():
    # nv = 16 would put the lattice-aliasing floor of the Maxwellian moments
    # near 1e-7 at these temperatures and swamp the conservation check
    mesh = Mesh(np.linspace(0.0, 1.0, 5), np.linspace(0.0, 1.0, 5))
    bases = (NodalBasis(1), NodalBasis(1))
    grid = VelocityGrid(vcut=8.0, nv=32, dim=2)
    bc = ((Periodic(), Periodic()), (Periodic(), Periodic()))
    x = mesh.node_coords(bases[0], 0)[:, None, :, None]
    y = mesh.node_coords(bases[1], 1)[None, :, None, :]
    m = Moments(rho=1.0 + 0.2 * np.sin(2 * np.pi * x) * np.cos(2 * np.pi * y),
                u1=0.1 * np.cos(2 * np.pi * x) + 0.0 * y,
                T=0.8 + 0.05 * np.sin(2 * np.pi * y) + 0.0 * x,
                u2=0.05 * np.sin(2 * np.pi * x) + 0.0 * y)
    state = HybridState.from_moments(m, grid, eps=0.05)
    kin = np.zeros((4, 4), bool)
    kin[:2] = True
    state = replace(state, region=RegionMap(kinetic=kin, forced=np.zeros((4, 4), bool)))
    dt = 0.5 * hybrid_cfl_dt(mesh, bases, grid, m, state.eps)
    w = (mesh.widths[0][:, None, None, None] * mesh.widths[1][None, :, None, None]
         * bases[0].weights[None, None, :, None] * bases[1].weights[None, None, None, :])
    before = (state.U * w).sum(axis=(1, 2, 3, 4))
    for _ in range(8):
        state = hybrid_step_2d(state, mesh, bases, grid, bc, dt, FROZEN)
    after = (state.U * w).sum(axis=(1, 2, 3, 4))
    drift = np.abs(after - before)
    assert drift[0] <= 1e-10 * before[0]
    assert np.all(drift[1:] <= 1e-8 * np.abs(before).max())
