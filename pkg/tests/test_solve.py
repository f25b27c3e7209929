import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from layerfem import builtin_example1
from layerfem.discretization import SchemeCoefficients, SDParameters, assemble, sd_parameters
from layerfem.mesh import Mesh, MeshKind, MeshSpec, build_mesh
from layerfem.problem import PiecewiseSource
from layerfem.solve import (
    DiscreteSolution,
    SingularSystemError,
    TridiagonalSystem,
    build_split_systems,
    solve_bvp,
    thomas_solve,
)

from conftest import dense_split_matrix


def _quarter_mesh():
    return Mesh(np.linspace(0, 1, 5), MeshKind.UNIFORM, 2.0, 1.0, 0.5, 0.25, 0.25)


def test_pure_diffusion_row():
    mesh = _quarter_mesh()
    z = np.zeros((2, 3))
    coeffs = SchemeCoefficients(z, z, z, z, 1.0)
    s1, _ = build_split_systems(coeffs, mesh)
    assert (s1.sub[1], s1.diag[1], s1.sup[1]) == (-4.0, 8.0, -4.0)
    assert s1.sub[0] == 0.0 and s1.sup[-1] == 0.0


def test_vanishing_alpha_leaves_diffusive_superdiagonal():
    mesh = _quarter_mesh()
    z = np.zeros((2, 3))
    beta = np.full((2, 3), 0.1)
    coeffs = SchemeCoefficients(z, beta, z, z, 0.5)
    s1, s2 = build_split_systems(coeffs, mesh)
    assert s1.sup[0] == pytest.approx(-0.5 / 0.25)
    assert s2.sub[1] == pytest.approx(-(0.5 + 0.1) / 0.25)


def test_thomas_identity():
    n = 6
    rhs = np.arange(1.0, n + 1)
    sys = TridiagonalSystem(np.zeros(n), np.ones(n), np.zeros(n), rhs)
    assert np.array_equal(thomas_solve(sys), rhs)


def test_thomas_zero_rhs():
    sys = TridiagonalSystem(-np.ones(5), 4 * np.ones(5), -np.ones(5), np.zeros(5))
    assert np.all(thomas_solve(sys) == 0.0)


def test_thomas_random_dominant_against_dense():
    rng = np.random.default_rng(11)
    n = 7
    sub, sup = rng.uniform(-1, 1, n), rng.uniform(-1, 1, n)
    diag = np.abs(sub) + np.abs(sup) + rng.uniform(0.5, 2, n)
    sys = TridiagonalSystem(sub, diag, sup, rng.normal(size=n))
    expected = np.linalg.solve(sys.to_dense(), sys.rhs)
    np.testing.assert_allclose(thomas_solve(sys), expected, rtol=1e-13, atol=1e-14)


@settings(max_examples=50, deadline=None)
@given(n=st.integers(1, 40), seed=st.integers(0, 2**32 - 1))
def test_thomas_residual_property(n, seed):
    rng = np.random.default_rng(seed)
    sub, sup = rng.uniform(-1, 1, n), rng.uniform(-1, 1, n)
    diag = np.abs(sub) + np.abs(sup) + rng.uniform(0.1, 1, n)
    rhs = rng.normal(size=n)
    sys = TridiagonalSystem(sub, diag, sup, rhs)
    x = thomas_solve(sys)
    assert np.max(np.abs(sys.matvec(x) - rhs)) <= 1e-12 * (1 + np.abs(rhs).max())


def test_thomas_singular_pivot():
    sys = TridiagonalSystem(np.array([0.0, 1.0]), np.array([1.0, 1.0]),
                            np.array([1.0, 0.0]), np.ones(2))
    with pytest.raises(SingularSystemError, match="row 1"):
        thomas_solve(sys)


def test_mismatched_lengths_rejected():
    with pytest.raises(ValueError):
        TridiagonalSystem(np.zeros(2), np.ones(3), np.zeros(3), np.zeros(3))


def test_zero_source_gives_zero_solution():
    sol = solve_bvp(builtin_example1().with_zero_sources(), MeshSpec(64))
    assert np.all(sol.U1 == 0.0) and np.all(sol.U2 == 0.0)


def test_solution_is_linear_in_sources():
    p = builtin_example1(2.0**-10)
    spec = MeshSpec(64)
    base = solve_bvp(p, spec)
    scaled = solve_bvp(p.with_sources_scaled(-3.0), spec)
    np.testing.assert_allclose(scaled.U1, -3 * base.U1, rtol=1e-12, atol=1e-15)
    np.testing.assert_allclose(scaled.U2, -3 * base.U2, rtol=1e-12, atol=1e-15)


def test_boundary_values_are_zero():
    sol = solve_bvp(builtin_example1(), MeshSpec(32))
    assert sol.U1[0] == sol.U1[-1] == sol.U2[0] == sol.U2[-1] == 0.0


def test_small_system_matches_dense_solve():
    p = builtin_example1(0.25)
    p = dataclasses.replace(p, f1=PiecewiseSource(lambda x: 1 + x, lambda x: 1 + x, 0.5),
                            f2=PiecewiseSource(1.0, 1.0, 0.5))
    spec = MeshSpec(8)
    mesh = build_mesh(p, spec)
    sd = sd_parameters(p, mesh)
    sol = solve_bvp(p, spec)
    systems = build_split_systems(assemble(p, mesh, sd), mesh)
    for k, system in zip((1, 2), systems):
        A, _ = dense_split_matrix(p, mesh, sd, k)
        expected = np.linalg.solve(A, system.rhs)
        np.testing.assert_allclose(sol.component(k)[1:-1], expected, rtol=1e-12)


def test_example1_row_residual_and_boundedness():
    p = builtin_example1(2.0**-18)
    spec = MeshSpec(512)
    mesh = build_mesh(p, spec)
    sol = solve_bvp(p, spec)
    systems = build_split_systems(assemble(p, mesh, sd_parameters(p, mesh)), mesh)
    for k, system in zip((1, 2), systems):
        u = sol.component(k)[1:-1]
        assert np.max(np.abs(system.matvec(u) - system.rhs)) <= 1e-10
    assert max(np.abs(sol.U1).max(), np.abs(sol.U2).max()) < 10
    # the split rows carry the column sums a_1k + a_2k = 1, so away from layers
    # each component follows u_k' + u_k = f_k with u_k(0) = 0
    i = np.searchsorted(mesh.points, 0.25)
    xi = mesh.points[i]
    assert sol.U1[i] == pytest.approx(1.0 * (1 - math.exp(-xi)), abs=1e-2)
    assert sol.U2[i] == pytest.approx(-2.0 * (1 - math.exp(-xi)), abs=1e-2)


def test_custom_stabilization_is_used():
    p = builtin_example1(2.0**-6)
    spec = MeshSpec(32)
    default = solve_bvp(p, spec)
    plain = solve_bvp(p, spec, sd=SDParameters.zeros(32))
    assert not np.allclose(default.U1, plain.U1)


def test_discrete_solution_checks_lengths():
    mesh = build_mesh(builtin_example1(), MeshSpec(8))
    with pytest.raises(ValueError):
        DiscreteSolution(mesh, np.zeros(8), np.zeros(9))


def _exact_decoupled(eps, x):
    # -eps u'' + u' + u = 1 with u(0) = u(1) = 0
    s = math.sqrt(1 + 4 * eps)
    r1, r2 = (1 + s) / (2 * eps), (1 - s) / (2 * eps)
    # u = 1 + c1 exp(r1 (x - 1)) + c2 exp(r2 x), scaled to avoid overflow
    M = np.array([[math.exp(-r1), 1.0], [1.0, math.exp(r2)]])
    c1, c2 = np.linalg.solve(M, [-1.0, -1.0])
    return 1 + c1 * np.exp(r1 * (x - 1)) + c2 * np.exp(r2 * x)


@pytest.mark.parametrize("eps", [2.0**-4, 2.0**-12])
def test_first_order_against_exact_solution(eps):
    p = dataclasses.replace(builtin_example1(eps), a=((1.0, 0.0), (0.0, 1.0)),
                            f1=PiecewiseSource(1.0, 1.0, 0.5), f2=PiecewiseSource(1.0, 1.0, 0.5))
    errs = []
    for N in (64, 128, 256, 512):
        sol = solve_bvp(p, MeshSpec(N))
        x = sol.mesh.points
        errs.append(np.abs(sol.U1 - _exact_decoupled(eps, x)).max())
        np.testing.assert_array_equal(sol.U1, sol.U2)
    rates = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert errs[-1] < 1e-2
    assert rates.min() > 0.8
