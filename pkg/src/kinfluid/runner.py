"""Batch run driver: build a scenario, march to t_final, write outputs.

Outputs land in (first match wins) the KINFLUID_OUTPUT_DIR environment
variable, the config's output_dir, or the working directory:

  snapshot_NNNN.csv   per-node records at t=0, every snapshot_interval,
                      and t_final; columns t,x,y,rho,u1,u2,T,p,region
  diagnostics.csv     one row per step: conserved totals and the
                      kinetic cell fraction

Numbers are written in shortest round-trip decimal form, so identical
configs give byte-identical files.
"""

import os
import warnings
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import SolverError
from .fluid import check_fluid_cfl
from .hybrid import hybrid_step_1d, hybrid_step_2d
from .kinetic import check_kinetic_cfl
from .scenarios import build_scenario, default_decomposition

OUTPUT_ENV = "KINFLUID_OUTPUT_DIR"


def scenario_kwargs(config):
    """Builder keyword arguments from the non-None config overrides."""
    dcfg = default_decomposition(config.scenario)
    given = {key: getattr(config, key)
             for key in ("eta0", "delta0", "forced_band")
             if getattr(config, key) is not None}
    if given:
        dcfg = replace(dcfg, **given)
    kwargs = {"decomposition": dcfg}
    simple = {"epsilon": "eps", "nv": "nv", "vcut": "vcut", "order": "order",
              "dt": "dt", "t_final": "t_final", "mode": "mode"}
    for key, kw in simple.items():
        val = getattr(config, key)
        if val is not None:
            kwargs[kw] = val
    cells = config.nx if config.nx is not None else config.ny
    if cells is not None:
        kwargs["n_x" if config.scenario.startswith("evap") else "n"] = cells
    return kwargs


def _totals(spec, U):
    if spec.dim == 1:
        w = spec.bases[0].weights[None, None, :] \
            * spec.mesh.widths[0][None, :, None]
        return (U * w).sum(axis=(1, 2))
    w = (spec.bases[0].weights[:, None]
         * spec.bases[1].weights[None, :])[None, None, None]
    vol = (spec.mesh.widths[0][:, None]
           * spec.mesh.widths[1][None, :])[None, :, :, None, None]
    return (U * w * vol).sum(axis=(1, 2, 3, 4))


@dataclass
class Snapshot:
    t: float
    x: np.ndarray
    y: np.ndarray
    rho: np.ndarray
    u1: np.ndarray
    u2: np.ndarray
    T: np.ndarray
    p: np.ndarray
    region: np.ndarray
    mass: float
    momentum: tuple
    energy: float
    kinetic_fraction: float

    @classmethod
    def from_state(cls, spec, state):
        m = state.moments
        labels = np.where(state.region.kinetic, "K", "F")
        if spec.dim == 1:
            x = spec.mesh.node_coords(spec.bases[0], 0)
            y = np.zeros_like(x)
            u2 = np.zeros_like(x)
            region = np.broadcast_to(labels[:, None], x.shape)
        else:
            shape = m.rho.shape
            x = np.broadcast_to(
                spec.mesh.node_coords(spec.bases[0], 0)[:, None, :, None], shape)
            y = np.broadcast_to(
                spec.mesh.node_coords(spec.bases[1], 1)[None, :, None, :], shape)
            u2 = m.u2
            region = np.broadcast_to(labels[:, :, None, None], shape)
        totals = _totals(spec, state.U)
        return cls(
            t=state.t, x=x.ravel(), y=y.ravel(),
            rho=m.rho.ravel(), u1=m.u1.ravel(), u2=u2.ravel(),
            T=m.T.ravel(), p=m.pressure().ravel(), region=region.ravel(),
            mass=float(totals[0]),
            momentum=tuple(float(v) for v in totals[1:-1]),
            energy=float(totals[-1]),
            kinetic_fraction=float(state.region.kinetic_fraction),
        )


def write_snapshot(snap, path):
    cols = (snap.x, snap.y, snap.rho, snap.u1, snap.u2, snap.T, snap.p)
    with open(path, "w") as fh:
        fh.write("t,x,y,rho,u1,u2,T,p,region\n")
        tstr = repr(float(snap.t))
        for i in range(snap.x.size):
            nums = ",".join(repr(float(c[i])) for c in cols)
            fh.write(f"{tstr},{nums},{snap.region[i]}\n")


def _diag_row(spec, state):
    totals = _totals(spec, state.U)
    mom = list(totals[1:-1]) + [0.0] * (2 - (len(totals) - 2))
    vals = [state.t, totals[0], mom[0], mom[1], totals[-1],
            state.region.kinetic_fraction]
    return ",".join(repr(float(v)) for v in vals) + "\n"


def output_directory(config):
    env = os.environ.get(OUTPUT_ENV)
    chosen = env or config.output_dir or "."
    path = Path(chosen)
    path.mkdir(parents=True, exist_ok=True)
    return path


def run(config):
    """Drive one batch run; returns the list of files written.

    Raises ConfigurationError before stepping for inconsistent setups
    (including a dt override that violates the CFL bounds) and
    SolverError tagged with the failing step if the march breaks down.
    """
    spec = build_scenario(config.scenario, **scenario_kwargs(config))
    if spec.mode != "fluid":
        check_kinetic_cfl(spec.mesh, spec.bases, spec.grid, spec.dt)
    if spec.mode != "kinetic":
        check_fluid_cfl(spec.dt, spec.mesh, spec.bases, spec.initial,
                        spec.eps)
    if spec.mode == "hybrid" and spec.eps >= 1e-1:
        warnings.warn(
            f"eps = {spec.eps:g} is outside the hydrodynamic regime; "
            "a full kinetic run (mode=kinetic) is usually cheaper than "
            "the hybrid bookkeeping here", stacklevel=2)

    outdir = output_directory(config)
    step = hybrid_step_1d if spec.dim == 1 else hybrid_step_2d
    args = (spec.mesh, spec.bases[0] if spec.dim == 1 else spec.bases,
            spec.grid, spec.bc)
    state = spec.initial_state()

    written = []

    def emit(snap_index, st):
        snap = Snapshot.from_state(spec, st)
        path = outdir / f"snapshot_{snap_index:04d}.csv"
        write_snapshot(snap, path)
        written.append(path)
        return snap_index + 1

    interval = config.snapshot_interval
    diag_path = outdir / "diagnostics.csv"
    with open(diag_path, "w") as diag:
        diag.write("t,mass,momentum_x,momentum_y,energy,kinetic_fraction\n")
        diag.write(_diag_row(spec, state))
        nsnap = emit(0, state)
        next_snap = spec.t_final if interval is None else interval
        while state.t < spec.t_final * (1.0 - 1e-12):
            dt = min(spec.dt, spec.t_final - state.t)
            try:
                state = step(state, *args, dt, spec.decomposition)
            except SolverError as exc:
                raise SolverError(
                    f"step {state.step + 1} (t = {state.t:.6g}): {exc}"
                ) from exc
            diag.write(_diag_row(spec, state))
            if interval is not None and \
                    state.t >= next_snap * (1.0 - 1e-12) and \
                    state.t < spec.t_final * (1.0 - 1e-12):
                nsnap = emit(nsnap, state)
                next_snap += interval
        emit(nsnap, state)
    written.append(diag_path)
    return written
