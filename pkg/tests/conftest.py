import warnings

import numpy as np
import pytest

from layerfem import builtin_example1
from layerfem.discretization import _lumped_all

ACCEPTANCE_LINES = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: exit criteria of the build")
    warnings.filterwarnings("ignore", message="tau0=.*< 2")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def example1():
    return builtin_example1()


def dense_split_matrix(p, mesh, sd, k, order=5):
    """Reference Galerkin assembly of the component-``k`` operator.

    Loops over cells and local basis pairs with a high-order Gauss rule,
    independent of the coefficient formulas used by the library.
    """
    N = mesh.N
    x = mesh.points
    gx, gw = np.polynomial.legendre.leggauss(order)
    A = np.zeros((N + 1, N + 1))
    F = np.zeros(N + 1)
    deltas = (sd.delta1, sd.delta2)
    for c in range(N):
        xl, xr = x[c], x[c + 1]
        h = xr - xl
        q = 0.5 * (xl + xr) + 0.5 * h * gx
        w = 0.5 * h * gw
        shape = [(xr - q) / h, (q - xl) / h]
        dshape = [-1.0 / h, 1.0 / h]
        bk = p.b(k, q)
        kappa = (deltas[0][c] * p.b(1, q) * p.a_ij(1, k, q)
                 + deltas[1][c] * p.b(2, q) * p.a_ij(2, k, q))
        dk = deltas[k - 1][c]
        f = p.f(k).left_value(q) if c < N // 2 else p.f(k).right_value(q)
        for a in range(2):
            v, dv = shape[a], dshape[a]
            F[c + a] += np.sum(w * (f * v + dk * f * bk * dv))
            for b in range(2):
                u, du = shape[b], dshape[b]
                integrand = (p.epsilon * du * dv + bk * du * v + dk * bk**2 * du * dv
                             + kappa * u * dv)
                A[c + a, c + b] += np.sum(w * integrand)
    lump = _lumped_all(p, mesh)
    A[np.arange(1, N), np.arange(1, N)] += mesh.avg_steps * (lump[0, k - 1] + lump[1, k - 1])
    return A[1:-1, 1:-1], F[1:-1]
