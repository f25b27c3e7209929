"""Error norms, double-mesh error estimates and convergence tables."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np

from .discretization import SDParameters, sd_parameters
from .mesh import Mesh, MeshKind, MeshSpec, build_mesh
from .problem import Problem
from .solve import DiscreteSolution, solve_bvp

__all__ = [
    "ConvergenceRow",
    "ConvergenceTable",
    "NormTriple",
    "convergence_rate",
    "convergence_table",
    "discrete_energy_norm",
    "double_mesh_error",
    "eval_piecewise_linear",
    "norm_triple_of_difference",
    "restrict_fine_to_coarse",
]


@dataclass(frozen=True)
class NormTriple:
    max_norm: float
    l2_norm: float
    energy_norm: float

    def as_tuple(self) -> tuple:
        return self.max_norm, self.l2_norm, self.energy_norm


def eval_piecewise_linear(sol: DiscreteSolution, x):
    """Values ``(u1, u2)`` of the piecewise-linear solution at ``x``."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0.0) or np.any(xa > 1.0) or np.any(np.isnan(xa)):
        raise ValueError(f"evaluation point outside [0, 1]: {x}")
    pts = sol.mesh.points
    u1 = np.interp(xa, pts, sol.U1)
    u2 = np.interp(xa, pts, sol.U2)
    if xa.ndim == 0:
        return float(u1), float(u2)
    return u1, u2


def restrict_fine_to_coarse(fine: DiscreteSolution, coarse_mesh: Mesh) -> DiscreteSolution:
    """Interpolate ``fine`` at the nodes of ``coarse_mesh``.

    Coarse and fine transition points generally differ, so values are always
    obtained by evaluation, never by picking every other node.
    """
    u1, u2 = eval_piecewise_linear(fine, coarse_mesh.points)
    return DiscreteSolution(coarse_mesh, u1, u2)


def discrete_energy_norm(p: Problem, mesh: Mesh, sd: SDParameters, u1, u2) -> float:
    """Stabilized energy norm of a piecewise-linear pair given by nodal values."""
    h = mesh.steps
    b1 = p.b(1, mesh.points[1:])
    b2 = p.b(2, mesh.points[1:])
    total = 0.0
    for u, b, delta in ((u1, b1, sd.delta1), (u2, b2, sd.delta2)):
        u = np.asarray(u, dtype=float)
        du2 = np.diff(u) ** 2 / h  # integral of (u')^2 over each cell
        l2sq = np.sum(h / 3.0 * (u[:-1] ** 2 + u[:-1] * u[1:] + u[1:] ** 2))
        total += p.epsilon * np.sum(du2) + p.sigma * l2sq + np.sum(delta * b**2 * du2)
    return math.sqrt(total)


def norm_triple_of_difference(a: DiscreteSolution, b: DiscreteSolution, p: Problem,
                              sd: SDParameters) -> NormTriple:
    """Maximum, L2 and energy norms of ``a - b`` on their common mesh.

    The maximum runs over the interior nodes of both components. Squared
    piecewise linears are integrated exactly (Simpson per cell).
    """
    if not a.mesh.same_as(b.mesh):
        raise ValueError("solutions live on different meshes")
    mesh = a.mesh
    h = mesh.steps
    e1 = a.U1 - b.U1
    e2 = a.U2 - b.U2
    max_norm = float(max(np.max(np.abs(e1[1:-1])), np.max(np.abs(e2[1:-1]))))
    l2sq = 0.0
    for e in (e1, e2):
        # Simpson's rule with midpoint value (e_l + e_r)/2
        mid = 0.5 * (e[:-1] + e[1:])
        l2sq += np.sum(h / 6.0 * (e[:-1] ** 2 + 4 * mid**2 + e[1:] ** 2))
    energy = discrete_energy_norm(p, mesh, sd, e1, e2)
    return NormTriple(max_norm, math.sqrt(l2sq), energy)


def _pair_error(p: Problem, coarse: DiscreteSolution, fine: DiscreteSolution) -> NormTriple:
    sd = sd_parameters(p, coarse.mesh)
    return norm_triple_of_difference(coarse, restrict_fine_to_coarse(fine, coarse.mesh), p, sd)


def double_mesh_error(p: Problem, kind, tau0: float, N: int) -> NormTriple:
    """Difference between the ``N`` solution and the interpolated ``2N`` solution."""
    coarse = solve_bvp(p, MeshSpec(N, tau0, kind))
    fine = solve_bvp(p, MeshSpec(2 * N, tau0, kind))
    return _pair_error(p, coarse, fine)


def convergence_rate(e_coarse: float, e_fine: float):
    """``log2(E^N / E^{2N})``; ``None`` when either error vanishes."""
    if not (e_coarse > 0 and e_fine > 0):
        return None
    return math.log2(e_coarse / e_fine)


@dataclass(frozen=True)
class ConvergenceRow:
    N: int
    errors: NormTriple
    rates: tuple = None  # (r_max, r_l2, r_energy); None in the last row


@dataclass(frozen=True)
class ConvergenceTable:
    rows: tuple
    kind: MeshKind
    epsilon: float
    tau0: float
    header: str = field(default="N,E_max,r_max,E_l2,r_l2,E_energy,r_energy", init=False)

    @property
    def N(self) -> list:
        return [r.N for r in self.rows]

    def errors(self, norm: str) -> np.ndarray:
        idx = ("max", "l2", "energy").index(norm)
        return np.array([r.errors.as_tuple()[idx] for r in self.rows])

    def rates(self, norm: str) -> list:
        idx = ("max", "l2", "energy").index(norm)
        return [None if r.rates is None else r.rates[idx] for r in self.rows[:-1]]

    def to_csv(self, provenance: bool = True) -> str:
        out = io.StringIO()
        if provenance:
            out.write(f"# converge kind={self.kind.value} epsilon={self.epsilon!r} "
                      f"tau0={self.tau0!r} N={self.N[0]}..{self.N[-1]}\n")
        out.write(self.header + "\n")
        for r in self.rows:
            cells = [str(r.N)]
            for j, e in enumerate(r.errors.as_tuple()):
                cells.append(f"{e:.4e}")
                if r.rates is None:
                    cells.append("")
                else:
                    rate = r.rates[j]
                    cells.append("nan" if rate is None else f"{rate:.4f}")
            out.write(",".join(cells) + "\n")
        return out.getvalue()


def convergence_table(p: Problem, kind, tau0: float, N_list) -> ConvergenceTable:
    """Double-mesh errors for every ``N`` and rates between consecutive rows.

    Each mesh size is solved once and shared between the two pairs it takes
    part in.
    """
    N_list = [int(n) for n in N_list]
    if not N_list:
        raise ValueError("empty list of mesh sizes")
    for n0, n1 in zip(N_list, N_list[1:]):
        if n1 != 2 * n0:
            raise ValueError(f"mesh sizes must double: {n0} -> {n1}")
    kind = MeshKind.parse(kind)
    sols = {n: solve_bvp(p, MeshSpec(n, tau0, kind)) for n in N_list + [2 * N_list[-1]]}
    errs = [_pair_error(p, sols[n], sols[2 * n]) for n in N_list]
    rows = []
    for j, n in enumerate(N_list):
        rates = None
        if j + 1 < len(N_list):
            rates = tuple(convergence_rate(a, b)
                          for a, b in zip(errs[j].as_tuple(), errs[j + 1].as_tuple()))
        rows.append(ConvergenceRow(n, errs[j], rates))
    return ConvergenceTable(tuple(rows), kind, p.epsilon, tau0)
