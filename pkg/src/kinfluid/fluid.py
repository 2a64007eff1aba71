"""Compressible Navier-Stokes solver with kinetic flux-vector-split faces.

The gas is monatomic (gamma = 5/3) with transport coefficients inherited
from the relaxation model, so this solver is the exact hydrodynamic limit
of the kinetic one.  Interface fluxes integrate the upwind half-range
fluxes of the gradient-corrected distribution in closed form; no velocity
quadrature appears anywhere on the fluid side.

Conserved fields are stored nodally with the component axis first:
(3, Nx, K+1) in one dimension, (4, Nx, Ny, K1+1, K2+1) in two, ordered
(rho, rho*u1, E) resp. (rho, rho*u1, rho*u2, E).
"""

from dataclasses import dataclass
from math import comb

import numpy as np
from scipy.special import erfc

from .errors import ConfigurationError, SolverError
from .kinetic import Outflow, Periodic
from .mesh import apply_matrix, edge_traces
from .velocity import Moments, collision_frequency, transport_coefficients

_SQRT_PI = np.sqrt(np.pi)


# ---------------------------------------------------------------------------
# half-range Gaussian moments

def _half_table(s, nmax):
    """I_k(s) = int_s^inf z^k exp(-z^2) dz for k = 0..nmax.

    Integration by parts gives I_k = (s^(k-1)/2) e^(-s^2) + ((k-1)/2) I_(k-2),
    anchored by I_0 = (sqrt(pi)/2) erfc(s) and I_1 = e^(-s^2)/2.
    """
    s = np.asarray(s, dtype=float)
    es = np.exp(-s * s)
    table = [0.5 * _SQRT_PI * erfc(s), 0.5 * es]
    for k in range(2, nmax + 1):
        table.append(0.5 * s ** (k - 1) * es + 0.5 * (k - 1) * table[k - 2])
    return table[: nmax + 1]


def half_moment(n, s):
    """Closed form of int_s^inf z^n exp(-z^2) dz, n = 0..6."""
    if not 0 <= n <= 6:
        raise ValueError(f"half_moment defined for n in 0..6, got {n}")
    return _half_table(s, n)[n]


def _split_tables(rho, u, T, side, nmax, mmax):
    """Table S[n, m] = int_side v^n V^m M(v) dv with V = (v - u)/sqrt(T).

    M is the Maxwellian with moments (rho, u, T); side=+1 integrates over
    v >= 0, side=-1 over v < 0.  Substituting v = u + sqrt(2T) z turns every
    entry into a linear combination of half-range Gaussian moments; the
    lower half is the reflection z -> -z of the upper one.
    """
    rt2T = np.sqrt(2.0 * T)
    a = side * rt2T
    c = side * np.sqrt(2.0)
    half = _half_table(-side * u / rt2T, nmax + mmax)
    pref = rho / _SQRT_PI
    table = {}
    for n in range(nmax + 1):
        for m in range(mmax + 1):
            acc = half[n + m] * a ** n  # j = n term
            for j in range(n):
                acc = acc + comb(n, j) * a ** j * u ** (n - j) * half[j + m]
            table[n, m] = pref * c ** m * acc
    return table


def split_gaussian_moment(n, m, rho, u, T, side):
    """One entry of the half-range moment table, for direct use and tests."""
    if not (0 <= n <= 3 and 0 <= m <= 3):
        raise ValueError("split_gaussian_moment supports 0 <= n, m <= 3")
    if side not in (+1, -1):
        raise ValueError("side must be +1 (v >= 0) or -1 (v < 0)")
    return _split_tables(rho, u, T, side, n, m)[n, m]


def _full_tables(u, T, nmax, mmax):
    """Full-line moments int v^n V^m M(v) dv at unit density."""
    one = np.ones_like(np.asarray(u, dtype=float))
    up = _split_tables(one, u, T, +1, nmax, mmax)
    lo = _split_tables(one, u, T, -1, nmax, mmax)
    return {key: up[key] + lo[key] for key in up}


# ---------------------------------------------------------------------------
# kinetic flux-vector-splitting interface fluxes

def _grad_coeffs_1d(m, grads, eps):
    """Coefficients of the truncated pair in powers of V = (v - u1)/sqrt(T).

    h1 = M1 * sum_m c[m] V^m and h2 = M1 * sum_m d[m] V^m.  With zero
    gradients (or eps = 0) this degenerates to c = (1,0,0,0), d = T*c.
    """
    du1, dT = grads
    a = eps / collision_frequency(m)
    tx = dT / np.sqrt(m.T)
    c0 = 1.0 + (2.0 / 3.0) * a * du1
    c1 = 1.5 * a * tx
    c2 = -(2.0 / 3.0) * a * du1
    c3 = -0.5 * a * tx
    c = (c0, c1, c2, c3)
    d = [m.T * ci for ci in c]
    d[0] = d[0] + a * m.T * (2.0 / 3.0) * du1
    d[1] = d[1] - a * m.T * tx
    return c, d


def _kfvs_half_1d(m, grads, eps, side):
    c, d = _grad_coeffs_1d(m, grads, eps)
    S = _split_tables(m.rho, m.u1, m.T, side, 3, 3)
    f_rho = sum(c[k] * S[1, k] for k in range(4))
    f_mom = sum(c[k] * S[2, k] for k in range(4))
    f_en = 0.5 * sum(c[k] * S[3, k] for k in range(4)) \
        + sum(d[k] * S[1, k] for k in range(4))
    return np.stack([np.asarray(f_rho), np.asarray(f_mom), np.asarray(f_en)])


def kfvs_interface_flux_1d(mL, gradsL, mR, gradsR, eps):
    """Upwind-split interface flux (rho, rho*u1, E components).

    Each side contributes the outgoing half of its own truncated
    distribution: v >= 0 from the left state, v < 0 from the right.
    grads = (d_x u1, d_x T) one-sided traces.
    """
    return _kfvs_half_1d(mL, gradsL, eps, +1) + _kfvs_half_1d(mR, gradsR, eps, -1)


def _grad_coeffs_2d(m, grads, eps):
    """Coefficient tables c[m1][m2], d[m1][m2] of the 2D truncated pair.

    g1 = M1 * sum c[m1][m2] V1^m1 V2^m2, g2 likewise with d.  Only ten of
    the sixteen entries are nonzero; the rest stay scalar zeros so that
    the flux assembly can skip them cheaply.
    """
    ux, uy, vx, vy, Tx, Ty = grads
    a = eps / collision_frequency(m)
    tx = Tx / np.sqrt(m.T)
    ty = Ty / np.sqrt(m.T)
    c = [[0.0] * 4 for _ in range(4)]
    c[0][0] = 1.0 + a * (ux + vy) / 3.0
    c[2][0] = a * (-(2.0 / 3.0) * ux + vy / 3.0)
    c[0][2] = a * (-(2.0 / 3.0) * vy + ux / 3.0)
    c[1][1] = -a * (vx + uy)
    c[1][0] = 2.0 * a * tx
    c[0][1] = 2.0 * a * ty
    c[3][0] = -0.5 * a * tx
    c[1][2] = -0.5 * a * tx
    c[0][3] = -0.5 * a * ty
    c[2][1] = -0.5 * a * ty
    d = [[0.5 * m.T * c[i][j] for j in range(4)] for i in range(4)]
    d[0][0] = d[0][0] + a * m.T * (ux + vy) / 3.0
    d[1][0] = d[1][0] - 0.5 * a * m.T * tx
    d[0][1] = d[0][1] - 0.5 * a * m.T * ty
    return c, d


def _kfvs_half_2d(m, grads, eps, side):
    """Half flux along the v1 axis; transverse integrals run over all of v2."""
    c, d = _grad_coeffs_2d(m, grads, eps)
    S = _split_tables(m.rho, m.u1, m.T, side, 3, 3)
    G = _full_tables(m.u2, m.T, 2, 3)
    f = [0.0, 0.0, 0.0, 0.0]
    for m1 in range(4):
        for m2 in range(4):
            cij = c[m1][m2]
            if np.all(cij == 0.0) and np.all(d[m1][m2] == 0.0):
                continue
            f[0] = f[0] + cij * S[1, m1] * G[0, m2]
            f[1] = f[1] + cij * S[2, m1] * G[0, m2]
            f[2] = f[2] + cij * S[1, m1] * G[1, m2]
            f[3] = f[3] + 0.5 * cij * (S[3, m1] * G[0, m2] + S[1, m1] * G[2, m2]) \
                + d[m1][m2] * S[1, m1] * G[0, m2]
    return np.stack([np.asarray(fi, dtype=float) for fi in f])


def _swap_xy(m, grads):
    ux, uy, vx, vy, Tx, Ty = grads
    ms = Moments(rho=m.rho, u1=m.u2, T=m.T, u2=m.u1)
    return ms, (vy, vx, uy, ux, Ty, Tx)


def kfvs_interface_flux_2d(mL, gradsL, mR, gradsR, eps, axis=0):
    """Interface flux normal to `axis` (rho, rho*u1, rho*u2, E components).

    grads = (d_x u1, d_y u1, d_x u2, d_y u2, d_x T, d_y T).  A y-normal face
    is handled by relabelling the axes, evaluating the x-normal formula,
    and swapping the two momentum components back.
    """
    if axis == 1:
        mL, gradsL = _swap_xy(mL, gradsL)
        mR, gradsR = _swap_xy(mR, gradsR)
    f = _kfvs_half_2d(mL, gradsL, eps, +1) + _kfvs_half_2d(mR, gradsR, eps, -1)
    if axis == 1:
        f = f[[0, 2, 1, 3]]
    return f


# ---------------------------------------------------------------------------
# conserved variables and analytic fluxes

def conserved_from_moments(m):
    comps = [m.rho, m.rho * m.u1]
    if m.u2 is not None:
        comps.append(m.rho * m.u2)
    comps.append(m.energy())
    return np.stack(comps)


def moments_from_conserved(U, where=""):
    """Primitive moments from a conserved stack; validates positivity."""
    if U.shape[0] == 3:
        rho = U[0]
        u1 = U[1] / rho
        T = (U[2] / rho - 0.5 * u1 ** 2) * (2.0 / 3.0)
        m = Moments(rho=rho, u1=u1, T=T)
    else:
        rho = U[0]
        u1 = U[1] / rho
        u2 = U[2] / rho
        T = (U[3] / rho - 0.5 * (u1 ** 2 + u2 ** 2)) * (2.0 / 3.0)
        m = Moments(rho=rho, u1=u1, T=T, u2=u2)
    m.check_valid(where)
    return m


def euler_flux_1d(m):
    p = m.pressure()
    return np.stack([
        m.rho * m.u1,
        m.rho * m.u1 ** 2 + p,
        m.u1 * (m.energy() + p),
    ])


def euler_flux_2d(m, axis=0):
    un = m.u1 if axis == 0 else m.u2
    p = m.pressure()
    f = np.stack([
        m.rho * un,
        m.rho * m.u1 * un,
        m.rho * m.u2 * un,
        un * (m.energy() + p),
    ])
    f[1 + axis] = f[1 + axis] + p
    return f


# ---------------------------------------------------------------------------
# gradient reconstruction (central interface values)

def _face_values(tl, tr, bcond_lo, bcond_hi, face_axis):
    """Minus/plus traces at every face along one axis, ghosts filled.

    Anything that is not periodic copies the interior trace outward, which
    is the right thing for outflow; walls never border fluid cells.
    """
    shape = list(tl.shape)
    shape[face_axis] += 1
    fm = np.empty(shape)
    fp = np.empty(shape)
    src_l = [slice(None)] * tl.ndim
    src_r = [slice(None)] * tl.ndim

    def at(arr, idx):
        sl = [slice(None)] * arr.ndim
        sl[face_axis] = idx
        return tuple(sl)

    fm[at(fm, slice(1, None))] = tr
    fp[at(fp, slice(0, -1))] = tl
    if isinstance(bcond_lo, Periodic):
        fm[at(fm, 0)] = tr[at(tr, -1)]
    else:
        fm[at(fm, 0)] = tl[at(tl, 0)]
    if isinstance(bcond_hi, Periodic):
        fp[at(fp, -1)] = tl[at(tl, 0)]
    else:
        fp[at(fp, -1)] = tr[at(tr, -1)]
    return fm, fp


def gradient_reconstruct_1d(U, mesh, basis, bc):
    """S = d_x U by the auxiliary weak form with central interface values.

    At K = 0 this collapses to the centred difference of neighbouring cell
    means; at K >= 1 it is exact for globally polynomial data of degree K.
    """
    tl, tr = edge_traces(U, basis, axis=2)
    fm, fp = _face_values(tl, tr, bc[0][0], bc[0][1], face_axis=1)
    uhat = 0.5 * (fm + fp)
    vol = apply_matrix(U, basis.volume_kernel, axis=2)
    surf = uhat[:, 1:, None] * basis.trace_right - uhat[:, :-1, None] * basis.trace_left
    scale = 1.0 / (mesh.widths[0][None, :, None] * basis.weights)
    return scale * (surf - vol)


def gradient_reconstruct_2d(U, mesh, bases, bc):
    out = []
    for axis in range(2):
        node_axis = 3 + axis
        tl, tr = edge_traces(U, bases[axis], axis=node_axis)
        fm, fp = _face_values(tl, tr, bc[axis][0], bc[axis][1], face_axis=1 + axis)
        uhat = 0.5 * (fm + fp)
        uhat = np.expand_dims(uhat, node_axis)
        basis = bases[axis]
        shp = [1] * U.ndim
        shp[node_axis] = basis.npts
        phi_r = basis.trace_right.reshape(shp)
        phi_l = basis.trace_left.reshape(shp)
        sel_r = [slice(None)] * U.ndim
        sel_r[1 + axis] = slice(1, None)
        sel_l = [slice(None)] * U.ndim
        sel_l[1 + axis] = slice(0, -1)
        surf = uhat[tuple(sel_r)] * phi_r - uhat[tuple(sel_l)] * phi_l
        vol = apply_matrix(U, basis.volume_kernel, axis=node_axis)
        hshape = [1] * U.ndim
        hshape[1 + axis] = mesh.ncells[axis]
        scale = 1.0 / (mesh.widths[axis].reshape(hshape)
                       * basis.weights.reshape(shp))
        out.append(scale * (surf - vol))
    return tuple(out)


def primitive_gradients_1d(m, S):
    """(d_x u1, d_x T) from conserved gradients by the chain rule."""
    du1 = (S[1] - m.u1 * S[0]) / m.rho
    E = m.energy()
    dT = (2.0 / 3.0) * (S[2] / m.rho - E * S[0] / m.rho ** 2 - m.u1 * du1)
    return du1, dT


def primitive_gradients_2d(m, Sx, Sy):
    """(ux, uy, vx, vy, Tx, Ty) from per-axis conserved gradients."""
    E = m.energy()

    def one_axis(S):
        du1 = (S[1] - m.u1 * S[0]) / m.rho
        du2 = (S[2] - m.u2 * S[0]) / m.rho
        dT = (2.0 / 3.0) * (S[3] / m.rho - E * S[0] / m.rho ** 2
                            - m.u1 * du1 - m.u2 * du2)
        return du1, du2, dT

    ux, vx, Tx = one_axis(Sx)
    uy, vy, Ty = one_axis(Sy)
    return ux, uy, vx, vy, Tx, Ty


# ---------------------------------------------------------------------------
# viscous volume fluxes

def viscous_volume_flux_1d(m, grads, beta=0.0):
    """F^d such that the update reads d_t U + d_x (F^a - eps F^d) = 0."""
    du1, dT = grads
    mu, kappa = transport_coefficients(m, beta)
    sigma = mu * (4.0 / 3.0) * du1
    zeros = np.zeros_like(sigma)
    return np.stack([zeros, sigma, sigma * m.u1 + kappa * dT])


def viscous_volume_flux_2d(m, grads, beta=0.0):
    """Per-axis F^d pair; the deformation tensor is symmetric trace-free."""
    ux, uy, vx, vy, Tx, Ty = grads
    mu, kappa = transport_coefficients(m, beta)
    d11 = (4.0 / 3.0) * ux - (2.0 / 3.0) * vy
    d22 = (4.0 / 3.0) * vy - (2.0 / 3.0) * ux
    d12 = vx + uy
    zeros = np.zeros_like(d11)
    fx = np.stack([zeros, mu * d11, mu * d12,
                   mu * (d11 * m.u1 + d12 * m.u2) + kappa * Tx])
    fy = np.stack([zeros, mu * d12, mu * d22,
                   mu * (d12 * m.u1 + d22 * m.u2) + kappa * Ty])
    return fx, fy


# ---------------------------------------------------------------------------
# time stepping

@dataclass
class FluidState:
    U: np.ndarray
    t: float
    eps: float

    @property
    def moments(self):
        return moments_from_conserved(self.U)

    @classmethod
    def from_moments(cls, m, eps, t=0.0):
        return cls(U=conserved_from_moments(m), t=t, eps=eps)


def fluid_cfl_dt(mesh, bases, m, eps, safety=0.9):
    """Largest stable step: advective everywhere, diffusive at the max-T node."""
    speed = np.abs(m.u1) + np.sqrt(5.0 * m.T / 3.0)
    if m.u2 is not None:
        speed = np.maximum(speed, np.abs(m.u2) + np.sqrt(5.0 * m.T / 3.0))
    smax = float(np.max(speed))
    mu_max = float(np.max(transport_coefficients(m)[0]))
    dt = np.inf
    for axis in range(mesh.dim):
        h = float(mesh.widths[axis].min())
        p = 2 * bases[axis].order + 1
        dt = min(dt, h / (smax * p))
        if eps > 0.0:
            dt = min(dt, h * h / (2.0 * eps * mu_max * p * p))
    return safety * dt


def check_fluid_cfl(dt, mesh, bases, m, eps):
    limit = fluid_cfl_dt(mesh, bases, m, eps, safety=1.0)
    if dt > limit * (1.0 + 1e-12):
        raise ConfigurationError(
            f"fluid time step {dt:g} exceeds the stability limit {limit:g}")


def _require_no_wall(bc, dim):
    for axis in range(dim):
        for bcond in bc[axis]:
            if not isinstance(bcond, (Periodic, Outflow)):
                raise SolverError(
                    "fluid region touches a wall boundary; walls must stay "
                    "inside forced kinetic bands")


def face_primitive_traces_1d(U, S, basis, bc):
    """One-sided (moments, gradients) pairs at all Nx+1 faces."""
    tl, tr = edge_traces(U, basis, axis=2)
    um, up = _face_values(tl, tr, bc[0][0], bc[0][1], face_axis=1)
    sl, sr = edge_traces(S, basis, axis=2)
    sm, sp = _face_values(sl, sr, bc[0][0], bc[0][1], face_axis=1)
    mL = moments_from_conserved(um, "left face trace")
    mR = moments_from_conserved(up, "right face trace")
    return (mL, primitive_gradients_1d(mL, sm),
            mR, primitive_gradients_1d(mR, sp))


def ns_face_flux_1d(U, S, mesh, basis, bc, eps):
    """Interface fluxes at all Nx+1 faces from one-sided (U, S) traces."""
    _require_no_wall(bc, 1)
    mL, gL, mR, gR = face_primitive_traces_1d(U, S, basis, bc)
    return kfvs_interface_flux_1d(mL, gL, mR, gR, eps)


def ns_advance_1d(U, S, fhat, mesh, basis, dt, eps):
    m = moments_from_conserved(U, "volume nodes")
    F = euler_flux_1d(m)
    if eps > 0.0:
        F = F - eps * viscous_volume_flux_1d(m, primitive_gradients_1d(m, S))
    vol = apply_matrix(F, basis.volume_kernel, axis=2)
    surf = fhat[:, 1:, None] * basis.trace_right \
        - fhat[:, :-1, None] * basis.trace_left
    scale = dt / (mesh.widths[0][None, :, None] * basis.weights)
    return U + scale * (vol - surf)


def ns_step_1d(state, mesh, basis, bc, dt):
    S = gradient_reconstruct_1d(state.U, mesh, basis, bc)
    fhat = ns_face_flux_1d(state.U, S, mesh, basis, bc, state.eps)
    U = ns_advance_1d(state.U, S, fhat, mesh, basis, dt, state.eps)
    moments_from_conserved(U, "fluid step")
    return FluidState(U=U, t=state.t + dt, eps=state.eps)


def face_primitive_traces_2d(U, Sx, Sy, mesh, bases, bc, axis):
    """One-sided (moments, gradients) pairs at faces normal to `axis`."""
    node_axis = 3 + axis

    def traces(field):
        tl, tr = edge_traces(field, bases[axis], axis=node_axis)
        return _face_values(tl, tr, bc[axis][0], bc[axis][1], face_axis=1 + axis)

    um, up = traces(U)
    sxm, sxp = traces(Sx)
    sym, syp = traces(Sy)
    mL = moments_from_conserved(um, "minus face trace")
    mR = moments_from_conserved(up, "plus face trace")
    return (mL, primitive_gradients_2d(mL, sxm, sym),
            mR, primitive_gradients_2d(mR, sxp, syp))


def ns_face_flux_2d(U, Sx, Sy, mesh, bases, bc, eps, axis):
    """Interface fluxes at faces normal to `axis`, at transverse nodes."""
    _require_no_wall(bc, 2)
    mL, gL, mR, gR = face_primitive_traces_2d(U, Sx, Sy, mesh, bases, bc, axis)
    return kfvs_interface_flux_2d(mL, gL, mR, gR, eps, axis=axis)


def ns_advance_2d(U, S, fhats, mesh, bases, dt, eps):
    m = moments_from_conserved(U, "volume nodes")
    grads = primitive_gradients_2d(m, S[0], S[1]) if eps > 0.0 else None
    Unew = U.copy()
    for axis in range(2):
        F = euler_flux_2d(m, axis)
        if eps > 0.0:
            F = F - eps * viscous_volume_flux_2d(m, grads)[axis]
        node_axis = 3 + axis
        basis = bases[axis]
        vol = apply_matrix(F, basis.volume_kernel, axis=node_axis)
        fhat = np.expand_dims(fhats[axis], node_axis)
        shp = [1] * U.ndim
        shp[node_axis] = basis.npts
        phi_r = basis.trace_right.reshape(shp)
        phi_l = basis.trace_left.reshape(shp)
        sel_r = [slice(None)] * U.ndim
        sel_r[1 + axis] = slice(1, None)
        sel_l = [slice(None)] * U.ndim
        sel_l[1 + axis] = slice(0, -1)
        surf = fhat[tuple(sel_r)] * phi_r - fhat[tuple(sel_l)] * phi_l
        hshape = [1] * U.ndim
        hshape[1 + axis] = mesh.ncells[axis]
        scale = dt / (mesh.widths[axis].reshape(hshape)
                      * basis.weights.reshape(shp))
        Unew = Unew + scale * (vol - surf)
    return Unew


def ns_step_2d(state, mesh, bases, bc, dt):
    Sx, Sy = gradient_reconstruct_2d(state.U, mesh, bases, bc)
    fhats = tuple(
        ns_face_flux_2d(state.U, Sx, Sy, mesh, bases, bc, state.eps, axis)
        for axis in range(2))
    U = ns_advance_2d(state.U, (Sx, Sy), fhats, mesh, bases, dt, state.eps)
    moments_from_conserved(U, "fluid step")
    return FluidState(U=U, t=state.t + dt, eps=state.eps)
