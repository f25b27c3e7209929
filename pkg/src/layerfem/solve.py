"""Tridiagonal systems for the two components and the end-to-end solver."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .discretization import SchemeCoefficients, SDParameters, assemble, sd_parameters
from .mesh import Mesh, MeshSpec, build_mesh
from .problem import Problem

__all__ = [
    "DiscreteSolution",
    "SingularSystemError",
    "TridiagonalSystem",
    "build_split_systems",
    "solve_bvp",
    "thomas_solve",
]

PIVOT_TOL = 1e-300


class SingularSystemError(ArithmeticError):
    pass


@dataclass(frozen=True, eq=False)
class TridiagonalSystem:
    """Rows ``sub[i] x[i-1] + diag[i] x[i] + sup[i] x[i+1] = rhs[i]``.

    ``sub[0]`` and ``sup[-1]`` are ignored.
    """

    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray
    rhs: np.ndarray

    def __post_init__(self):
        n = len(self.diag)
        if not (len(self.sub) == len(self.sup) == len(self.rhs) == n):
            raise ValueError("tridiagonal arrays must have equal length")

    def __len__(self):
        return len(self.diag)

    def to_dense(self) -> np.ndarray:
        n = len(self.diag)
        A = np.diag(self.diag)
        if n > 1:
            A += np.diag(self.sub[1:], -1) + np.diag(self.sup[:-1], 1)
        return A

    def matvec(self, x: np.ndarray) -> np.ndarray:
        y = self.diag * x
        y[1:] += self.sub[1:] * x[:-1]
        y[:-1] += self.sup[:-1] * x[1:]
        return y


def thomas_solve(sys: TridiagonalSystem) -> np.ndarray:
    """Solve a tridiagonal system by forward elimination and back substitution.

    No pivoting is done; the scheme matrices are diagonally dominant M-matrices.
    """
    a = np.asarray(sys.sub, dtype=float)
    c = np.asarray(sys.sup, dtype=float)
    n = len(sys.diag)
    cp = np.empty(n)
    dp = np.empty(n)

    piv = float(sys.diag[0])
    if abs(piv) < PIVOT_TOL:
        raise SingularSystemError("zero pivot in row 0")
    cp[0] = c[0] / piv
    dp[0] = sys.rhs[0] / piv
    for i in range(1, n):
        piv = sys.diag[i] - a[i] * cp[i - 1]
        if abs(piv) < PIVOT_TOL:
            raise SingularSystemError(f"zero pivot in row {i}")
        cp[i] = c[i] / piv
        dp[i] = (sys.rhs[i] - a[i] * dp[i - 1]) / piv

    x = np.empty(n)
    x[-1] = dp[-1]
    for i in range(n - 2, -1, -1):
        x[i] = dp[i] - cp[i] * x[i + 1]
    return x


def build_split_systems(coeffs: SchemeCoefficients, mesh: Mesh) -> tuple:
    """One tridiagonal system per component from the scheme coefficients."""
    h = mesh.steps
    hl, hr = h[:-1], h[1:]
    eps = coeffs.epsilon
    systems = []
    for k in range(2):
        al, be, ga = coeffs.alpha[k], coeffs.beta[k], coeffs.gamma[k]
        sub = -(eps + be) / hl
        sup = (al - eps) / hr
        diag = eps / hl + eps / hr - al / hr + be / hl + ga
        sub[0] = 0.0
        sup[-1] = 0.0
        systems.append(TridiagonalSystem(sub, diag, sup, coeffs.rhs[k].copy()))
    return tuple(systems)


@dataclass(frozen=True, eq=False)
class DiscreteSolution:
    """Nodal values of both components; evaluable as piecewise linears."""

    mesh: Mesh
    U1: np.ndarray
    U2: np.ndarray

    def __post_init__(self):
        n = self.mesh.N + 1
        if len(self.U1) != n or len(self.U2) != n:
            raise ValueError(f"expected {n} nodal values per component")

    def __call__(self, x):
        from .analysis import eval_piecewise_linear

        return eval_piecewise_linear(self, x)

    def component(self, k: int) -> np.ndarray:
        return (self.U1, self.U2)[k - 1]


def solve_bvp(p: Problem, spec: MeshSpec, sd: SDParameters = None) -> DiscreteSolution:
    """Mesh, stabilize, assemble and solve both components.

    ``sd`` overrides the default stabilization choice when given.
    """
    mesh = build_mesh(p, spec)
    if sd is None:
        sd = sd_parameters(p, mesh)
    coeffs = assemble(p, mesh, sd)
    U = []
    for system in build_split_systems(coeffs, mesh):
        u = np.zeros(mesh.N + 1)
        u[1:-1] = thomas_solve(system)
        U.append(u)
    return DiscreteSolution(mesh, U[0], U[1])
