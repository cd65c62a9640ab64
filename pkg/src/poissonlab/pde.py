"""Discrete Laplace-Beltrami operator on polar grids and Dirichlet solves.

The operator is assembled in self-adjoint divergence form with cell-face
averaged coefficients.  The pole is a single unknown whose equation is the
flux balance over the innermost half-cell disk, which avoids the coordinate
singularity.  For g >= 0 the scaled system is SPD and solved by Jacobi-
preconditioned CG; sign-indefinite g falls back to BiCGStab and reports
non-convergence instead of masking it.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import bicgstab, cg

from .rearrange import WeightedSamples
from .surface import MetricProfile


@dataclass(frozen=True)
class PolarGrid:
    """Tensor-product (r, theta) discretization of the geodesic ball
    B_{r_max}; ring i sits at r = (i+1) dr, the last ring is the boundary."""

    metric: MetricProfile
    n_r: int
    n_theta: int
    r_max: float

    def __post_init__(self):
        if self.n_r < 8 or self.n_theta < 8:
            raise ValueError("need at least 8 nodes per direction")
        if self.r_max <= 0 or self.r_max > self.metric.r_max * (1 + 1e-12):
            raise ValueError("r_max out of metric range")

    @property
    def dr(self) -> float:
        return self.r_max / self.n_r

    @property
    def dtheta(self) -> float:
        return 2 * np.pi / self.n_theta

    @property
    def r_nodes(self) -> np.ndarray:
        return self.dr * np.arange(1, self.n_r + 1)

    @property
    def theta_nodes(self) -> np.ndarray:
        return self.dtheta * np.arange(self.n_theta)

    def mesh(self):
        return np.meshgrid(self.r_nodes, self.theta_nodes, indexing="ij")

    def node_positions(self):
        R, T = self.mesh()
        return R * np.cos(T), R * np.sin(T)

    @property
    def pole_volume(self) -> float:
        # V(B_{dr/2}) by 5-point Simpson in r, trapezoid in theta
        rr = np.linspace(0.0, self.dr / 2, 5)
        g = self.metric.G(rr[:, None], self.theta_nodes)
        ell = g.mean(axis=1) * 2 * np.pi
        w = np.array([1.0, 4.0, 2.0, 4.0, 1.0]) * (self.dr / 2 / 4) / 3.0
        return float(np.sum(w * ell))

    def node_weights(self) -> np.ndarray:
        """Quadrature weights G dr dtheta per node (half weight on the
        boundary ring); pole weight is pole_volume."""
        R, T = self.mesh()
        w = self.metric.G(R, T) * self.dr * self.dtheta
        w[-1] *= 0.5
        return w

    @property
    def total_measure(self) -> float:
        return float(self.node_weights().sum()) + self.pole_volume


@dataclass
class DiscreteField:
    """Nodal values (n_r x n_theta) plus the pole value."""

    grid: PolarGrid
    values: np.ndarray
    pole: float = 0.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.n_r, self.grid.n_theta):
            raise ValueError("values shape must be (n_r, n_theta)")

    def copy(self) -> "DiscreteField":
        return DiscreteField(self.grid, self.values.copy(), self.pole)

    def sup_norm(self, radius: float | None = None) -> float:
        """Grid maximum of |u| over r <= radius (the discrete C-norm proxy)."""
        if radius is None:
            return max(abs(self.pole), float(np.max(np.abs(self.values))))
        mask = self.grid.r_nodes <= radius * (1 + 1e-12)
        m = abs(self.pole)
        if np.any(mask):
            m = max(m, float(np.max(np.abs(self.values[mask]))))
        return m

    def l1_norm(self, radius: float | None = None) -> float:
        w = self.grid.node_weights()
        mask = np.ones(self.grid.n_r, dtype=bool)
        if radius is not None:
            mask = self.grid.r_nodes <= radius * (1 + 1e-12)
        return float(np.sum(np.abs(self.values[mask]) * w[mask])
                     + abs(self.pole) * self.grid.pole_volume)

    def min_max(self, radius: float | None = None):
        mask = np.ones(self.grid.n_r, dtype=bool)
        if radius is not None:
            mask = self.grid.r_nodes <= radius * (1 + 1e-12)
        vals = np.append(self.values[mask].ravel(), self.pole)
        return float(vals.min()), float(vals.max())

    def as_samples(self, radius: float | None = None) -> WeightedSamples:
        """Node samples with planar positions, pole included."""
        w = self.grid.node_weights()
        X, Y = self.grid.node_positions()
        mask = np.ones(self.grid.n_r, dtype=bool)
        if radius is not None:
            mask = self.grid.r_nodes <= radius * (1 + 1e-12)
        vals = np.append(self.values[mask].ravel(), self.pole)
        meas = np.append(w[mask].ravel(), self.grid.pole_volume)
        pos = np.concatenate([np.stack([X[mask].ravel(), Y[mask].ravel()], axis=-1),
                              [[0.0, 0.0]]])
        return WeightedSamples(vals, meas, pos)


@dataclass(frozen=True)
class SolveReport:
    residual_norm: float
    iterations: int
    converged: bool


def field_from_function(grid: PolarGrid, func) -> DiscreteField:
    """func(x, y) evaluated at planar node positions (and the pole)."""
    X, Y = grid.node_positions()
    return DiscreteField(grid, np.asarray(func(X, Y), dtype=float) + np.zeros_like(X),
                         float(np.asarray(func(0.0, 0.0))))


def constant_field(grid: PolarGrid, value: float) -> DiscreteField:
    return DiscreteField(grid, np.full((grid.n_r, grid.n_theta), float(value)), float(value))


def _face_coefficients(grid: PolarGrid):
    """Coupling coefficients of the measure-scaled operator."""
    m, dr, dth = grid.metric, grid.dr, grid.dtheta
    rn, tn = grid.r_nodes, grid.theta_nodes
    # radial faces at r_{i+1/2}, i = 0..n_r-1 rings (face 0 couples pole-ring0)
    r_faces = dr * (np.arange(grid.n_r) + 0.5)
    a = m.G(r_faces[:, None], tn) * dth / dr                  # (n_r, n_t)
    # angular faces at theta_{j+1/2} for each ring
    t_faces = tn + dth / 2
    b = dr / (m.G(rn[:, None], t_faces) * dth)                # (n_r, n_t)
    return a, b


def laplace_beltrami_apply(grid: PolarGrid, u: DiscreteField) -> DiscreteField:
    """Second-order divergence-form Laplacian; the boundary ring is left zero
    (no one-sided closure there)."""
    a, b = _face_coefficients(grid)
    w = grid.metric.G(*grid.mesh()) * grid.dr * grid.dtheta
    v = u.values
    out = np.zeros_like(v)
    flux_out = a[1:] * (v[1:] - v[:-1])          # between ring i and i+1
    flux_in0 = a[0] * (v[0] - u.pole)            # pole face
    interior = np.zeros_like(v)
    interior[0] = flux_out[0] - flux_in0
    interior[1:-1] = flux_out[1:] - flux_out[:-1]
    ang = b * (np.roll(v, -1, axis=1) - v) - np.roll(b, 1, axis=1) * (v - np.roll(v, 1, axis=1))
    interior[:-1] += ang[:-1]
    out[:-1] = interior[:-1] / w[:-1]
    pole = float(np.sum(flux_in0) / grid.pole_volume)
    return DiscreteField(grid, out, pole)


def assemble_system(grid: PolarGrid, g: DiscreteField | None, f: DiscreteField,
                    boundary: np.ndarray):
    """Sparse SPD-for-nonnegative-g system M(-Lap + g) u = -M f + boundary flux."""
    n_r, n_t = grid.n_r, grid.n_theta
    a, b = _face_coefficients(grid)
    w = grid.metric.G(*grid.mesh()) * grid.dr * grid.dtheta
    n_int = n_r - 1
    N = 1 + n_int * n_t

    def idx(i, j):
        return 1 + i * n_t + j

    gv = np.zeros((n_r, n_t)) if g is None else g.values
    gp = 0.0 if g is None else g.pole

    rows, cols, vals = [], [], []
    J = np.arange(n_t)

    # pole row
    rows.append(np.array([0]))
    cols.append(np.array([0]))
    vals.append(np.array([a[0].sum() + gp * grid.pole_volume]))
    rows.append(np.zeros(n_t, dtype=int))
    cols.append(idx(0, J))
    vals.append(-a[0])
    # symmetric counterpart: ring 0 to pole
    rows.append(idx(0, J))
    cols.append(np.zeros(n_t, dtype=int))
    vals.append(-a[0])

    for i in range(n_int):
        diag = a[i] + a[i + 1] + b[i] + np.roll(b[i], 1) + gv[i] * w[i]
        rows.append(idx(i, J)); cols.append(idx(i, J)); vals.append(diag)
        if i + 1 < n_int:
            rows.append(idx(i, J)); cols.append(idx(i + 1, J)); vals.append(-a[i + 1])
            rows.append(idx(i + 1, J)); cols.append(idx(i, J)); vals.append(-a[i + 1])
        rows.append(idx(i, J)); cols.append(idx(i, (J + 1) % n_t)); vals.append(-b[i])
        rows.append(idx(i, (J + 1) % n_t)); cols.append(idx(i, J)); vals.append(-b[i])

    A = sparse.csr_matrix((np.concatenate(vals),
                           (np.concatenate(rows), np.concatenate(cols))), shape=(N, N))

    rhs = np.zeros(N)
    rhs[0] = -f.pole * grid.pole_volume
    for i in range(n_int):
        rhs[idx(i, J)] = -f.values[i] * w[i]
    rhs[idx(n_int - 1, J)] += a[n_int] * boundary
    return A, rhs


def solve_dirichlet(grid: PolarGrid, g: DiscreteField | None, f: DiscreteField,
                    boundary, tol: float = 1e-10, maxiter: int | None = None):
    """Solve Lap u = g u + f with Dirichlet data on r = r_max."""
    boundary = np.broadcast_to(np.asarray(boundary, dtype=float), (grid.n_theta,)).copy()
    if not np.all(np.isfinite(boundary)):
        raise ValueError("boundary values must be finite")
    A, rhs = assemble_system(grid, g, f, boundary)
    diag = A.diagonal()
    precond = sparse.diags(1.0 / diag) if np.all(diag > 0) else None
    count = [0]

    def cb(_):
        count[0] += 1

    spd = g is None or (np.min(g.values) >= 0 and g.pole >= 0)
    if maxiter is None:
        maxiter = 40 * int(np.sqrt(A.shape[0])) + 2000
    solver = cg if spd else bicgstab
    x, info = solver(A, rhs, rtol=tol, atol=0.0, maxiter=maxiter, M=precond, callback=cb)
    rnorm = float(np.linalg.norm(A @ x - rhs))
    bnorm = float(np.linalg.norm(rhs))
    rel = rnorm / bnorm if bnorm > 0 else rnorm
    report = SolveReport(rel, count[0], bool(info == 0))

    vals = np.empty((grid.n_r, grid.n_theta))
    vals[:-1] = x[1:].reshape(grid.n_r - 1, grid.n_theta)
    vals[-1] = boundary
    return DiscreteField(grid, vals, float(x[0])), report


def gradient_l2(grid: PolarGrid, u: DiscreteField) -> float:
    """Metric-weighted H1 seminorm via midpoint face differences."""
    a, b = _face_coefficients(grid)
    v = u.values
    total = float(np.sum(a[0] * (v[0] - u.pole) ** 2))
    total += float(np.sum(a[1:] * (v[1:] - v[:-1]) ** 2))
    dth_sq = b[:-1] * (np.roll(v[:-1], -1, axis=1) - v[:-1]) ** 2
    total += float(np.sum(dth_sq))
    return float(np.sqrt(total))


def lq_norm(grid: PolarGrid, u: DiscreteField, q: float) -> float:
    w = grid.node_weights()
    s = float(np.sum(np.abs(u.values) ** q * w) + abs(u.pole) ** q * grid.pole_volume)
    return s ** (1.0 / q)


def log_potential(f: WeightedSamples, eval_points, correct_singular: bool = True) -> np.ndarray:
    """Newtonian potential u(x) = (1/2pi) int ln|x-y| f(y) dy by midpoint cell
    quadrature; cells containing the evaluation point use the exact radial
    integral over an equal-area disk."""
    if f.positions is None:
        raise ValueError("samples carry no positions")
    pts = np.atleast_2d(np.asarray(eval_points, dtype=float))
    radii = np.sqrt(f.measures / np.pi)
    out = np.empty(pts.shape[0])
    for k, p in enumerate(pts):
        d = np.hypot(f.positions[:, 0] - p[0], f.positions[:, 1] - p[1])
        near = d < radii
        if np.any(near) and not correct_singular:
            raise ValueError("evaluation point inside a source cell; enable the singular correction")
        far = ~near
        acc = float(np.sum(f.values[far] * f.measures[far] * np.log(np.maximum(d[far], 1e-300))))
        if np.any(near):
            acc += float(np.sum(f.values[near] * f.measures[near]
                                * (np.log(radii[near]) - 0.5)))
        out[k] = acc / (2 * np.pi)
    return out


def convergence_order(errors, resolutions) -> float:
    """Mean log2 error ratio across successive dyadic resolutions."""
    resolutions = list(resolutions)
    if len(resolutions) < 3:
        raise ValueError("need at least 3 resolutions")
    if any(b <= a for a, b in zip(resolutions, resolutions[1:])):
        raise ValueError("resolutions must increase")
    orders = []
    for (e0, n0), (e1, n1) in zip(zip(errors, resolutions), zip(errors[1:], resolutions[1:])):
        orders.append(np.log(e0 / e1) / np.log(n1 / n0))
    return float(np.mean(orders))
