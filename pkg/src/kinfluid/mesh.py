"""Tensor-product meshes and nodal discontinuous Galerkin machinery.

The reference element is (-1/2, 1/2), so Gauss-Legendre weights sum to one
and every physical cell is the affine image x = center + width * xi.  All
unknowns live at the mapped Gauss nodes (Lagrange/nodal convention), which
makes the mass matrix diagonal and lets moments and fluxes stay pointwise.
"""

import numpy as np

__all__ = [
    "gauss_legendre",
    "lagrange_eval",
    "lagrange_diff_matrix",
    "NodalBasis",
    "Mesh",
    "project",
    "edge_traces",
    "apply_matrix",
    "contract",
    "cell_integral",
    "evaluate_1d",
]


def gauss_legendre(order):
    """Gauss-Legendre nodes and weights on (-1/2, 1/2) for polynomial order K.

    Returns K+1 nodes (symmetric about 0) and weights summing to 1.
    """
    if order < 0:
        raise ValueError("polynomial order must be >= 0")
    x, w = np.polynomial.legendre.leggauss(order + 1)
    return x / 2.0, w / 2.0


def _barycentric_weights(nodes):
    diff = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(diff, 1.0)
    return 1.0 / np.prod(diff, axis=1)


def lagrange_eval(nodes, x):
    """Values of the Lagrange basis through `nodes` at the point x."""
    nodes = np.asarray(nodes, dtype=float)
    hit = np.isclose(x, nodes, rtol=0.0, atol=1e-14)
    if hit.any():
        out = np.zeros_like(nodes)
        out[np.argmax(hit)] = 1.0
        return out
    b = _barycentric_weights(nodes)
    terms = b / (x - nodes)
    return terms / terms.sum()


def _lagrange_deriv_eval(nodes, x):
    """Derivatives of the Lagrange basis at an arbitrary point x."""
    nodes = np.asarray(nodes, dtype=float)
    hit = np.isclose(x, nodes, rtol=0.0, atol=1e-14)
    if hit.any():
        return lagrange_diff_matrix(nodes)[np.argmax(hit)]
    n = len(nodes)
    phi = lagrange_eval(nodes, x)
    out = np.empty(n)
    for k in range(n):
        out[k] = phi[k] * np.sum([1.0 / (x - nodes[m]) for m in range(n) if m != k])
    return out


def lagrange_diff_matrix(nodes):
    """Differentiation matrix D[k, l] = phi_l'(x_k) for the Lagrange basis.

    Rows sum to zero (the derivative of a constant vanishes) and D applied
    to nodal values of a degree-<=K polynomial is exact.
    """
    nodes = np.asarray(nodes, dtype=float)
    n = len(nodes)
    if n == 1:
        return np.zeros((1, 1))
    b = _barycentric_weights(nodes)
    diff = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(diff, 1.0)
    D = (b[None, :] / b[:, None]) / diff
    np.fill_diagonal(D, 0.0)
    np.fill_diagonal(D, -D.sum(axis=1))
    return D


class NodalBasis:
    """Nodal basis of order K on the reference element (-1/2, 1/2).

    Carries everything the solvers contract against:
      nodes, weights   Gauss-Legendre points/weights, weights sum to 1
      diff             D[k, l] = phi_l'(xi_k)
      trace_left/right phi_k(-1/2), phi_k(+1/2)
      volume_kernel    VK[l, k] = weights[l] * diff[l, k], the transposed
                       stiffness contraction of the weak volume term
      center_interp    phi_k(0), interpolation to the cell center
      center_deriv     phi_k'(0), used for cell-center gradients
    """

    def __init__(self, order):
        self.order = int(order)
        self.nodes, self.weights = gauss_legendre(self.order)
        self.diff = lagrange_diff_matrix(self.nodes)
        self.trace_left = lagrange_eval(self.nodes, -0.5)
        self.trace_right = lagrange_eval(self.nodes, 0.5)
        self.volume_kernel = self.weights[:, None] * self.diff
        self.center_interp = lagrange_eval(self.nodes, 0.0)
        self.center_deriv = _lagrange_deriv_eval(self.nodes, 0.0)

    @property
    def npts(self):
        return self.order + 1


class Mesh:
    """1D or 2D tensor-product mesh given by edge coordinates per axis."""

    def __init__(self, *edges):
        if not 1 <= len(edges) <= 2:
            raise ValueError("mesh must be 1D or 2D")
        self.edges = tuple(np.asarray(e, dtype=float) for e in edges)
        for e in self.edges:
            if e.ndim != 1 or len(e) < 2:
                raise ValueError("each axis needs at least two edge coordinates")
            if not np.all(np.diff(e) > 0):
                raise ValueError("edge coordinates must be strictly increasing")
        self.dim = len(self.edges)
        self.widths = tuple(np.diff(e) for e in self.edges)
        self.centers = tuple(0.5 * (e[1:] + e[:-1]) for e in self.edges)
        self.ncells = tuple(len(w) for w in self.widths)

    def extent(self, axis=0):
        e = self.edges[axis]
        return e[-1] - e[0]

    def node_coords(self, basis, axis=0):
        """Physical Gauss-node coordinates along one axis, shape (Ncell, K+1)."""
        return self.centers[axis][:, None] + self.widths[axis][:, None] * basis.nodes[None, :]

    def cell_volumes(self):
        if self.dim == 1:
            return self.widths[0]
        return self.widths[0][:, None] * self.widths[1][None, :]


def project(fn, mesh, bases):
    """Sample a pointwise function at the mapped Gauss nodes (nodal interpolation).

    1D fields come out as (Nx, K+1); 2D as (Nx, Ny, K1+1, K2+1).
    """
    if mesh.dim == 1:
        x = mesh.node_coords(bases[0], 0)
        return np.asarray(fn(x), dtype=float)
    x = mesh.node_coords(bases[0], 0)
    y = mesh.node_coords(bases[1], 1)
    X = x[:, None, :, None]
    Y = y[None, :, None, :]
    out = np.asarray(fn(X, Y), dtype=float)
    return np.broadcast_to(out, (mesh.ncells[0], mesh.ncells[1], bases[0].npts, bases[1].npts)).copy()


def contract(field, vec, axis):
    """Sum vec[k] * field[..., k, ...] over the given axis (axis is removed)."""
    return np.tensordot(field, vec, axes=(axis, 0))


def apply_matrix(field, mat, axis):
    """Contract mat[l, k] with field over `axis` (index l), keeping k in place."""
    out = np.tensordot(field, mat, axes=(axis, 0))
    return np.moveaxis(out, -1, axis)


def edge_traces(field, basis, axis):
    """Left and right cell-edge limits of a nodal field along one node axis.

    Returns (left, right) with the node axis removed: left[i] is the value at
    the cell's lower edge, right[i] at its upper edge.
    """
    left = contract(field, basis.trace_left, axis)
    right = contract(field, basis.trace_right, axis)
    return left, right


def cell_integral(field, mesh, bases, cell_axes, node_axes):
    """Integral of a nodal DG field over the whole domain.

    cell_axes/node_axes give the positions of the cell and node axes per
    direction; any leading component axes survive.
    """
    out = field
    # contract node axes against quadrature weights, highest axis first so
    # positions of the remaining axes stay valid
    order = np.argsort(node_axes)[::-1]
    axes_c = list(cell_axes)
    for i in order:
        out = contract(out, bases[i].weights, node_axes[i])
        axes_c = [a - 1 if a > node_axes[i] else a for a in axes_c]
    for i in np.argsort(axes_c)[::-1]:
        out = contract(out, mesh.widths[i], axes_c[i])
    return out


def evaluate_1d(field, mesh, basis, xs):
    """Evaluate a 1D nodal DG field (..., Nx, K+1) at arbitrary points xs."""
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    edges = mesh.edges[0]
    cells = np.clip(np.searchsorted(edges, xs, side="right") - 1, 0, mesh.ncells[0] - 1)
    xi = (xs - mesh.centers[0][cells]) / mesh.widths[0][cells]
    out = np.empty(field.shape[:-2] + xs.shape, dtype=float)
    for p, (c, z) in enumerate(zip(cells, xi)):
        phi = lagrange_eval(basis.nodes, z)
        out[..., p] = field[..., c, :] @ phi
    return out
