"""Discrete velocity grid and the reduced distribution pairs.

The transverse velocity directions are integrated out once and for all
(Chu reduction), leaving a coupled pair per space dimension:

  1D: h1(v) = int f dv2 dv3,            h2(v) = int (v2^2+v3^2)/2 f dv2 dv3
  2D: g1(v1,v2) = int f dv3,            g2(v1,v2) = int v3^2/2 f dv3

Moments close with E = 1/2 rho |u|^2 + 3/2 rho T (monatomic, gamma = 5/3),
and the pair of a Maxwellian is (M1, T*M1) in 1D and (M1, T/2*M1) in 2D.
Velocity integrals use the mid-point rule on a uniform lattice, which is
spectrally accurate for the near-Gaussian integrands that matter here.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, SolverError

__all__ = [
    "VelocityGrid",
    "Moments",
    "collision_frequency",
    "transport_coefficients",
    "moments_from_h",
    "moments_from_g",
    "reduced_maxwellian_h",
    "reduced_maxwellian_g",
    "chapman_enskog_h",
    "chapman_enskog_g",
]


class VelocityGrid:
    """Uniform mid-point lattice on [-vcut, vcut]^dim.

    Nodes sit at cell mid-points, so none lies exactly on the cut-off, the
    lattice is symmetric about 0, and the quadrature weight is h^dim.
    """

    def __init__(self, vcut=8.0, nv=32, dim=1):
        if vcut <= 0 or nv < 2:
            raise ConfigurationError("velocity grid needs vcut > 0 and nv >= 2")
        if dim not in (1, 2):
            raise ConfigurationError("velocity grid dimension must be 1 or 2")
        self.vcut = float(vcut)
        self.nv = int(nv)
        self.dim = int(dim)
        self.h = 2.0 * self.vcut / self.nv
        self.v = -self.vcut + self.h * (np.arange(self.nv) + 0.5)
        self.weight = self.h**self.dim

    def axes_2d(self):
        """Broadcastable (v1, v2) views for trailing (Nv, Nv) array axes."""
        return self.v[:, None], self.v[None, :]


@dataclass
class Moments:
    """Pointwise macroscopic fields (rho, u, T); u2 is None for 1D flows."""

    rho: np.ndarray
    u1: np.ndarray
    T: np.ndarray
    u2: np.ndarray = None

    def speed_squared(self):
        if self.u2 is None:
            return self.u1 * self.u1
        return self.u1 * self.u1 + self.u2 * self.u2

    def energy(self):
        return 0.5 * self.rho * self.speed_squared() + 1.5 * self.rho * self.T

    def pressure(self):
        return self.rho * self.T

    def check_valid(self, where=""):
        if not np.all(self.rho > 0):
            raise SolverError(f"nonpositive density{' in ' + where if where else ''}")
        if not np.all(self.T > 0):
            raise SolverError(f"nonpositive temperature{' in ' + where if where else ''}")
        return self


def collision_frequency(m):
    """BGK collision frequency nu = 2 rho / sqrt(pi)."""
    m.check_valid("collision_frequency")
    return 2.0 * m.rho / np.sqrt(np.pi)


def transport_coefficients(m, beta=0.0):
    """Viscosity and heat conductivity of the (ES-)BGK closure.

    mu = rho T / ((1 - beta) nu), kappa = (5/2) rho T / nu.  beta = 0 is the
    plain BGK case with Prandtl number 1.
    """
    if beta >= 1.0:
        raise ConfigurationError("Prandtl parameter beta must be < 1")
    nu = collision_frequency(m)
    mu = m.rho * m.T / ((1.0 - beta) * nu)
    kappa = 2.5 * m.rho * m.T / nu
    return mu, kappa


def moments_from_h(h1, h2, grid):
    """Discrete moments of a 1D reduced pair; arrays carry a trailing velocity axis."""
    w = grid.weight
    rho = w * h1.sum(axis=-1)
    if not np.all(rho > 0):
        raise SolverError("nonpositive discrete density")
    u1 = w * (h1 * grid.v).sum(axis=-1) / rho
    energy = w * (0.5 * grid.v**2 * h1 + h2).sum(axis=-1)
    T = (energy / rho - 0.5 * u1 * u1) * (2.0 / 3.0)
    if not np.all(T > 0):
        raise SolverError("nonpositive discrete temperature")
    return Moments(rho=rho, u1=u1, T=T)


def moments_from_g(g1, g2, grid):
    """Discrete moments of a 2D reduced pair; arrays carry trailing (Nv, Nv) axes."""
    w = grid.weight
    v1, v2 = grid.axes_2d()
    rho = w * g1.sum(axis=(-2, -1))
    if not np.all(rho > 0):
        raise SolverError("nonpositive discrete density")
    u1 = w * (g1 * v1).sum(axis=(-2, -1)) / rho
    u2 = w * (g1 * v2).sum(axis=(-2, -1)) / rho
    energy = w * (0.5 * (v1**2 + v2**2) * g1 + g2).sum(axis=(-2, -1))
    T = (energy / rho - 0.5 * (u1 * u1 + u2 * u2)) * (2.0 / 3.0)
    if not np.all(T > 0):
        raise SolverError("nonpositive discrete temperature")
    return Moments(rho=rho, u1=u1, T=T, u2=u2)


def reduced_maxwellian_h(m, grid):
    """Maxwellian pair (M1, T*M1) at the velocity nodes, broadcast over m's shape."""
    m.check_valid("reduced_maxwellian_h")
    rho = np.asarray(m.rho)[..., None]
    u1 = np.asarray(m.u1)[..., None]
    T = np.asarray(m.T)[..., None]
    M1 = rho / np.sqrt(2.0 * np.pi * T) * np.exp(-((grid.v - u1) ** 2) / (2.0 * T))
    return M1, T * M1


def reduced_maxwellian_g(m, grid):
    """Maxwellian pair (M1, T/2*M1) on the 2D lattice, broadcast over m's shape."""
    m.check_valid("reduced_maxwellian_g")
    rho = np.asarray(m.rho)[..., None, None]
    u1 = np.asarray(m.u1)[..., None, None]
    u2 = np.asarray(m.u2)[..., None, None]
    T = np.asarray(m.T)[..., None, None]
    v1, v2 = grid.axes_2d()
    M1 = rho / (2.0 * np.pi * T) * np.exp(-((v1 - u1) ** 2 + (v2 - u2) ** 2) / (2.0 * T))
    return M1, 0.5 * T * M1


def chapman_enskog_h(m, dux, dTx, eps, grid):
    """First-order truncated pair in 1D.

    With V = (v - u1)/sqrt(T), a = eps/nu and tx = dT/dx / sqrt(T):

      h1T = M1 [1 - a (2/3)(V^2 - 1) du/dx - a (1/2) V (V^2 - 3) tx]
      h2T = T [h1T + a M1 ((2/3) du/dx - V tx)]

    The correction carries zero moments, so (h1T, h2T) reproduces m exactly
    up to velocity quadrature.
    """
    nu = collision_frequency(m)
    a = np.asarray(eps / nu)[..., None]
    rho = np.asarray(m.rho)[..., None]
    u1 = np.asarray(m.u1)[..., None]
    T = np.asarray(m.T)[..., None]
    dux = np.asarray(dux)[..., None]
    tx = np.asarray(dTx)[..., None] / np.sqrt(T)
    V = (grid.v - u1) / np.sqrt(T)
    M1 = rho / np.sqrt(2.0 * np.pi * T) * np.exp(-0.5 * V * V)
    h1 = M1 * (1.0 - a * (2.0 / 3.0) * (V * V - 1.0) * dux - a * 0.5 * V * (V * V - 3.0) * tx)
    h2 = T * (h1 + a * M1 * ((2.0 / 3.0) * dux - V * tx))
    return h1, h2


def chapman_enskog_g(m, grads, eps, grid):
    """First-order truncated pair in 2D.

    grads = (ux, uy, vx, vy, Tx, Ty) holds d(u1)/dx, d(u1)/dy, d(u2)/dx,
    d(u2)/dy, dT/dx, dT/dy.  With V = (v - u)/sqrt(T) and a = eps/nu:

      g1T = M1 {1 - a [(V1^2 - (V1^2+V2^2+1)/3) ux + (V2^2 - (V1^2+V2^2+1)/3) vy
                       + V1 V2 (vx + uy)
                       + (V1^2+V2^2-4)/2 (V1 Tx/sqrt(T) + V2 Ty/sqrt(T))]}
      g2T = T/2 g1T + a T M1 [(ux + vy)/3 - (V1 Tx/sqrt(T) + V2 Ty/sqrt(T))/2]
    """
    nu = collision_frequency(m)

    def _b(x):
        return np.asarray(x)[..., None, None]

    a = _b(eps / nu)
    rho, u1, u2, T = _b(m.rho), _b(m.u1), _b(m.u2), _b(m.T)
    ux, uy, vx, vy = _b(grads[0]), _b(grads[1]), _b(grads[2]), _b(grads[3])
    tx = _b(grads[4]) / np.sqrt(T)
    ty = _b(grads[5]) / np.sqrt(T)
    v1, v2 = grid.axes_2d()
    V1 = (v1 - u1) / np.sqrt(T)
    V2 = (v2 - u2) / np.sqrt(T)
    Vsq = V1 * V1 + V2 * V2
    M1 = rho / (2.0 * np.pi * T) * np.exp(-0.5 * Vsq)
    bracket = (
        (V1 * V1 - (Vsq + 1.0) / 3.0) * ux
        + (V2 * V2 - (Vsq + 1.0) / 3.0) * vy
        + V1 * V2 * (vx + uy)
        + 0.5 * (Vsq - 4.0) * (V1 * tx + V2 * ty)
    )
    g1 = M1 * (1.0 - a * bracket)
    g2 = 0.5 * T * g1 + a * T * M1 * ((ux + vy) / 3.0 - 0.5 * (V1 * tx + V2 * ty))
    return g1, g2
