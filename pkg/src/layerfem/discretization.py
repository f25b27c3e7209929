"""Streamline-diffusion discretization on a layer-adapted mesh.

Row ``i`` of the scheme for component ``k`` reads::

    -eps [(U_{i+1} - U_i)/h_{i+1} - (U_i - U_{i-1})/h_i]
        + alpha_{k,i} (U_{i+1} - U_i)/h_{i+1}
        + beta_{k,i} (U_i - U_{i-1})/h_i + gamma_{k,i} U_i = rhs_{k,i}

All cell integrals use two-point Gauss quadrature.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .mesh import Mesh
from .problem import Problem

__all__ = [
    "SDParameters",
    "SchemeCoefficients",
    "StabilizationError",
    "assemble",
    "bilinear_form",
    "hat_basis",
    "lumped_weights",
    "sd_parameters",
]

_GAUSS = np.array([-1.0, 1.0]) / np.sqrt(3.0)
_SAMPLES = 1001


class StabilizationError(ArithmeticError):
    pass


def _gauss_points(mesh: Mesh):
    """Quadrature points of shape (N, 2) and their per-cell weight ``h/2``."""
    x = mesh.points
    h = mesh.steps
    mid = 0.5 * (x[:-1] + x[1:])
    pts = mid[:, None] + 0.5 * h[:, None] * _GAUSS[None, :]
    return pts, 0.5 * h[:, None]


def _sup_norm(coef_values: np.ndarray) -> float:
    return float(np.max(np.abs(coef_values)))


def hat_basis(mesh: Mesh, i: int, x: float) -> tuple:
    """Value and derivative of the ``i``-th hat function at ``x``.

    The derivative is piecewise constant; at a node the limit from the right
    is returned (at ``x = 1`` the limit from the left).
    """
    pts = mesh.points
    N = mesh.N
    if not 0 <= i <= N:
        raise IndexError(f"node index {i} outside 0..{N}")
    value = 0.0
    if i > 0 and pts[i - 1] <= x <= pts[i]:
        value = (x - pts[i - 1]) / (pts[i] - pts[i - 1])
    elif i < N and pts[i] <= x <= pts[i + 1]:
        value = (pts[i + 1] - x) / (pts[i + 1] - pts[i])

    # cell c (0-based) is [x_c, x_{c+1}); right-limit convention
    c = int(np.searchsorted(pts, x, side="right")) - 1
    c = min(max(c, 0), N - 1)
    if c == i - 1:
        deriv = 1.0 / (pts[i] - pts[i - 1])
    elif c == i:
        deriv = -1.0 / (pts[i + 1] - pts[i])
    else:
        deriv = 0.0
    return float(value), float(deriv)


@dataclass(frozen=True, eq=False)
class SDParameters:
    """Per-cell stabilization parameters; ``delta1[c]`` belongs to cell ``c+1``.

    ``bound`` is the coercivity limit ``min(sigma1, sigma2) / (4 mu^2)`` with
    ``mu`` the largest sampled ``|a_ij|``.
    """

    delta1: np.ndarray
    delta2: np.ndarray
    bound: float = np.inf

    @property
    def within_bound(self) -> bool:
        return bool(np.all(self.delta1 <= self.bound) and np.all(self.delta2 <= self.bound))

    def delta(self, k: int) -> np.ndarray:
        return (self.delta1, self.delta2)[k - 1]

    def clamped(self, limit: float = None) -> "SDParameters":
        limit = self.bound if limit is None else limit
        return SDParameters(np.minimum(self.delta1, limit), np.minimum(self.delta2, limit),
                            self.bound)

    @classmethod
    def zeros(cls, N: int, bound: float = np.inf) -> "SDParameters":
        return cls(np.zeros(N), np.zeros(N), bound)


def coercivity_bound(p: Problem) -> float:
    x = np.linspace(0.0, 1.0, _SAMPLES)
    mu = max(_sup_norm(p.a_ij(i, j, x)) for i in (1, 2) for j in (1, 2))
    return 0.25 * p.sigma / mu**2


def sd_parameters(p: Problem, mesh: Mesh) -> SDParameters:
    """Choose the stabilization so that the ``alpha`` coefficients vanish.

    On cells with ``h_i <= 2 eps / ||b_k||`` the parameter is zero; elsewhere
    the 2x2 system for ``(delta1, delta2)`` is solved in closed form with all
    coefficients taken at the right end point ``x_i``.
    """
    xs = np.linspace(0.0, 1.0, _SAMPLES)
    h = mesh.steps
    xr = mesh.points[1:]
    b1, b2 = p.b(1, xr), p.b(2, xr)
    a11, a12 = p.a_ij(1, 1, xr), p.a_ij(1, 2, xr)
    a21, a22 = p.a_ij(2, 1, xr), p.a_ij(2, 2, xr)

    den = (2 * b1**2 + h * b1 * a11) * (2 * b2**2 + h * b2 * a22) - h**2 * b1 * b2 * a12 * a21
    num1 = b1 * h * (2 * b2**2 + h * b2 * a22) - h**2 * b2**2 * a21
    num2 = b2 * h * (2 * b1**2 + h * b1 * a11) - h**2 * b1**2 * a12

    eps = p.epsilon
    active1 = h > 2 * eps / _sup_norm(p.b(1, xs))
    active2 = h > 2 * eps / _sup_norm(p.b(2, xs))
    bad = (active1 | active2) & (np.abs(den) < 1e-300)
    if np.any(bad):
        c = int(np.flatnonzero(bad)[0]) + 1
        raise StabilizationError(f"vanishing denominator for the stabilization on cell {c}")
    with np.errstate(divide="ignore", invalid="ignore"):
        delta1 = np.where(active1, num1 / den, 0.0)
        delta2 = np.where(active2, num2 / den, 0.0)

    sd = SDParameters(delta1, delta2, coercivity_bound(p))
    if not sd.within_bound:
        warnings.warn("stabilization parameters exceed the coercivity bound "
                      f"{sd.bound:.4g}", stacklevel=2)
    return sd


def _lumped_all(p: Problem, mesh: Mesh) -> np.ndarray:
    """Lumped weights for every interior node, shape (2, 2, N-1)."""
    x = mesh.points
    xl, xr = x[:-2], x[1:-1]
    xm = 0.5 * (xl + xr)
    betas = (p.beta1, p.beta2)
    out = np.empty((2, 2, mesh.N - 1))
    for j in (1, 2):
        scale = p.b(j, xr) ** 2 / betas[j - 1] ** 2
        for k in (1, 2):
            at_node = p.a_ij(j, k, xr)
            norm = np.max(np.abs([p.a_ij(j, k, xl), p.a_ij(j, k, xm), at_node]), axis=0)
            out[j - 1, k - 1] = scale * norm * np.sign(at_node)
    return out


def lumped_weights(p: Problem, mesh: Mesh, i: int) -> tuple:
    """Lumped reaction weights ``(a11, a12, a21, a22)`` at interior node ``i``.

    Each weight is ``(b_j(x_i)/beta_j)^2`` times the largest ``|a_jk|`` over
    ``[x_{i-1}, x_i]`` (end points and midpoint), carrying the sign of
    ``a_jk(x_i)``.
    """
    if not 1 <= i <= mesh.N - 1:
        raise IndexError(f"interior node index {i} outside 1..{mesh.N - 1}")
    w = _lumped_all(p, mesh)[:, :, i - 1]
    return float(w[0, 0]), float(w[0, 1]), float(w[1, 0]), float(w[1, 1])


@dataclass(frozen=True, eq=False)
class SchemeCoefficients:
    """Scheme coefficients on the interior nodes; axis 0 is the component."""

    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray
    rhs: np.ndarray
    epsilon: float

    @property
    def rhs1(self) -> np.ndarray:
        return self.rhs[0]

    @property
    def rhs2(self) -> np.ndarray:
        return self.rhs[1]


def _source_at_gauss(p: Problem, mesh: Mesh, k: int, pts: np.ndarray) -> np.ndarray:
    """Source ``f_k`` at quadrature points, using the averaged value at ``d``.

    Cells left of ``d`` use the left branch and cells right of it the right
    branch. In the two cells touching ``d`` the branch is shifted by
    ``(f_avg - f_branch(d)) * phi_d`` so that the node value at ``d`` equals
    the mean of the neighbouring node values.
    """
    f = p.f(k)
    N = mesh.N
    mid = N // 2
    x = mesh.points
    vals = np.empty_like(pts)
    vals[:mid] = f.left_value(pts[:mid])
    vals[mid:] = f.right_value(pts[mid:])

    avg = 0.5 * (float(f.left_value(x[mid - 1])) + float(f.right_value(x[mid + 1])))
    d = x[mid]
    # cell mid-1 is [x_{mid-1}, d]: the hat at d rises across it
    phi_d = (pts[mid - 1] - x[mid - 1]) / (d - x[mid - 1])
    vals[mid - 1] += (avg - float(f.left_value(d))) * phi_d
    phi_d = (x[mid + 1] - pts[mid]) / (x[mid + 1] - d)
    vals[mid] += (avg - float(f.right_value(d))) * phi_d
    return vals


def assemble(p: Problem, mesh: Mesh, sd: SDParameters) -> SchemeCoefficients:
    """Coefficients ``alpha, beta, gamma`` and right-hand sides of both rows."""
    N = mesh.N
    if len(sd.delta1) != N or len(sd.delta2) != N:
        raise ValueError(f"stabilization has {len(sd.delta1)} cells, mesh has {N}")
    x = mesh.points
    h = mesh.steps
    pts, w = _gauss_points(mesh)
    # local shape functions on each cell: L falls from 1 to 0, R rises
    L = (x[1:, None] - pts) / h[:, None]
    R = 1.0 - L
    dR = (1.0 / h)[:, None]
    dL = -dR

    b = [p.b(1, pts), p.b(2, pts)]
    a = [[p.a_ij(i, j, pts) for j in (1, 2)] for i in (1, 2)]
    d1 = sd.delta1[:, None]
    d2 = sd.delta2[:, None]
    lump = _lumped_all(p, mesh)
    hbar = mesh.avg_steps

    alpha = np.empty((2, N - 1))
    beta = np.empty((2, N - 1))
    gamma = np.empty((2, N - 1))
    rhs = np.empty((2, N - 1))

    def integrate(values):
        return np.sum(w * values, axis=1)

    for k in (1, 2):
        bk = b[k - 1]
        dk = (d1, d2)[k - 1]
        # reaction part of the streamline terms that multiplies u_k
        kappa = d1 * b[0] * a[0][k - 1] + d2 * b[1] * a[1][k - 1]
        sd_diff = integrate(dk * bk**2 * dR * dL)
        right = integrate(bk * dR * L + kappa * R * dL) + sd_diff  # cell right of node
        left = integrate(bk * dL * R + kappa * L * dR) + sd_diff  # cell left of node
        k_rise = integrate(kappa * dR)
        k_fall = integrate(kappa * dL)

        alpha[k - 1] = h[1:] * right[1:]
        beta[k - 1] = -h[:-1] * left[:-1]
        gamma[k - 1] = (hbar * (lump[0, k - 1] + lump[1, k - 1])
                        + k_rise[:-1] + k_fall[1:])

        fk = _source_at_gauss(p, mesh, k, pts)
        load_rise = integrate(fk * R + dk * fk * bk * dR)
        load_fall = integrate(fk * L + dk * fk * bk * dL)
        rhs[k - 1] = load_rise[:-1] + load_fall[1:]

    return SchemeCoefficients(alpha, beta, gamma, rhs, p.epsilon)


def bilinear_form(p: Problem, mesh: Mesh, sd: SDParameters, u, v, lumped: bool = False) -> float:
    """Evaluate the stabilized bilinear form ``B_h(u, v)``.

    ``u`` and ``v`` are pairs of nodal arrays of length ``N + 1``. With
    ``lumped=True`` the reaction terms use the lumped nodal weights as the
    difference scheme does.
    """
    u1, u2 = (np.asarray(c, dtype=float) for c in u)
    v1, v2 = (np.asarray(c, dtype=float) for c in v)
    x = mesh.points
    h = mesh.steps
    pts, w = _gauss_points(mesh)
    L = (x[1:, None] - pts) / h[:, None]
    R = 1.0 - L

    def interp(c):
        return c[:-1, None] * L + c[1:, None] * R

    def slope(c):
        return (np.diff(c) / h)[:, None]

    U = (interp(u1), interp(u2))
    dU = (slope(u1), slope(u2))
    V = (interp(v1), interp(v2))
    dV = (slope(v1), slope(v2))
    eps = p.epsilon
    deltas = (sd.delta1[:, None], sd.delta2[:, None])

    total = 0.0
    for k in (1, 2):
        bk = p.b(k, pts)
        reaction = p.a_ij(k, 1, pts) * U[0] + p.a_ij(k, 2, pts) * U[1]
        integrand = eps * dU[k - 1] * dV[k - 1] + bk * dU[k - 1] * V[k - 1]
        if not lumped:
            integrand = integrand + reaction * V[k - 1]
        integrand = integrand + deltas[k - 1] * (bk * dU[k - 1] + reaction) * bk * dV[k - 1]
        total += float(np.sum(w * integrand))

    if lumped:
        lump = _lumped_all(p, mesh)
        hbar = mesh.avg_steps
        ui = (u1[1:-1], u2[1:-1])
        vi = (v1[1:-1], v2[1:-1])
        for j in range(2):
            for k in range(2):
                total += float(np.sum(hbar * lump[j, k] * ui[k] * vi[j]))
    return total
