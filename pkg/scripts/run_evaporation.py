#!/usr/bin/env python3
"""Vapor flow between an evaporating and a condensing wall.

Runs the hybrid solver and, with --compare, a full kinetic reference,
then reports the steady-state profiles and where the kinetic region
ended up.  Reaching steady state takes until about t=40; pass a
smaller --t-final for a quick look.
"""
import argparse
import sys
import time

import numpy as np

from kinfluid import build_evaporation
from kinfluid.hybrid import hybrid_step_1d

parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
parser.add_argument("--strong", action="store_true",
                    help="strongly driven wall pair (0.5, 0.01)/(1, 1) "
                         "instead of the near-equilibrium one")
parser.add_argument("--nx", type=int, default=40, help="cells (multiple of 4)")
parser.add_argument("--eps", type=float, default=1e-3, help="Knudsen number")
parser.add_argument("--t-final", type=float, default=40.0)
parser.add_argument("--compare", action="store_true",
                    help="also run full kinetic and print the difference")
parser.add_argument("--report-every", type=float, default=5.0,
                    help="progress interval in simulation time")
args = parser.parse_args()


def march(mode):
    spec = build_evaporation(not args.strong, n_x=args.nx, eps=args.eps,
                             t_final=args.t_final, mode=mode)
    state = spec.initial_state()
    wall = time.time()
    report = args.report_every
    while state.t < spec.t_final * (1 - 1e-12):
        dt = min(spec.dt, spec.t_final - state.t)
        state = hybrid_step_1d(state, spec.mesh, spec.bases[0], spec.grid,
                               spec.bc, dt, spec.decomposition)
        if state.t >= report:
            m = state.moments
            print(f"  [{mode}] t={state.t:7.2f}  u1 mid={np.median(m.u1):+.4e}  "
                  f"kinetic={state.region.kinetic_fraction:.2f}  "
                  f"({time.time()-wall:.0f}s)", file=sys.stderr)
            report += args.report_every
    return spec, state


spec, hyb = march("hybrid")
m = hyb.moments
x = spec.mesh.node_coords(spec.bases[0], 0)
print("# steady state, hybrid")
print("# x rho u1 T p region")
labels = np.where(hyb.region.kinetic, "K", "F")
for i in range(x.shape[0]):
    for k in range(x.shape[1]):
        print(f"{x[i,k]:.6f} {m.rho[i,k]:.8e} {m.u1[i,k]:.8e} "
              f"{m.T[i,k]:.8e} {m.pressure()[i,k]:.8e} {labels[i]}")
print(f"# kinetic fraction: {hyb.region.kinetic_fraction:.3f}")

if args.compare:
    _, kin = march("kinetic")
    mk = kin.moments
    print(f"# max |dT|  hybrid vs kinetic: {np.max(np.abs(m.T - mk.T)):.3e}")
    print(f"# max |dp|  hybrid vs kinetic: "
          f"{np.max(np.abs(m.pressure() - mk.pressure())):.3e}")
