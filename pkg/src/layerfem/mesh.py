"""Layer-adapted partitions of [0, 1].

Meshes are refined on the left of the interior layer at ``d`` and near the
outflow boundary ``x = 1``. The index ranges ``0..N/4`` and ``N/2..3N/4``
are uniform; ``N/4..N/2`` and ``3N/4..N`` are graded by a mesh-generating
function ``phi = -ln(psi)``.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .problem import Problem

__all__ = [
    "Mesh",
    "MeshKind",
    "MeshSpec",
    "MeshSpecError",
    "build_mesh",
    "mesh_generating_phi",
    "transition_widths",
]


class MeshSpecError(ValueError):
    pass


class MeshKind(enum.Enum):
    SHISHKIN = "shishkin"
    BAKHVALOV_SHISHKIN = "bakhvalov-shishkin"
    UNIFORM = "uniform"

    @classmethod
    def parse(cls, value) -> "MeshKind":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "-")
        aliases = {"s": "shishkin", "bs": "bakhvalov-shishkin", "b-s": "bakhvalov-shishkin"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise MeshSpecError(
                f"unknown mesh kind {value!r}; expected one of "
                f"{', '.join(k.value for k in cls)}") from None


@dataclass(frozen=True)
class MeshSpec:
    """Number of intervals, transition parameter ``tau0`` and mesh family.

    ``N`` must be a multiple of 4 and larger than 4. Values of ``tau0`` below
    2 are accepted with a warning since the convergence theory needs
    ``tau0 >= 2``.
    """

    N: int
    tau0: float = 2.0
    kind: MeshKind = MeshKind.SHISHKIN

    def __post_init__(self):
        object.__setattr__(self, "kind", MeshKind.parse(self.kind))
        if int(self.N) != self.N or self.N % 4 != 0 or self.N <= 4:
            raise MeshSpecError(f"N must be a multiple of 4 larger than 4, got {self.N}")
        object.__setattr__(self, "N", int(self.N))
        if not self.tau0 > 0:
            raise MeshSpecError(f"tau0 must be positive, got {self.tau0}")
        if self.tau0 < 2:
            warnings.warn(f"tau0={self.tau0} < 2: the uniform convergence order "
                          "is not guaranteed", stacklevel=3)


@dataclass(frozen=True, eq=False)
class Mesh:
    points: np.ndarray
    kind: MeshKind
    tau0: float
    epsilon: float
    d: float
    width_interior: float
    width_boundary: float

    @property
    def N(self) -> int:
        return len(self.points) - 1

    @cached_property
    def steps(self) -> np.ndarray:
        """``h[i-1] = x_i - x_{i-1}`` for ``i = 1..N`` (0-based storage)."""
        return np.diff(self.points)

    @cached_property
    def avg_steps(self) -> np.ndarray:
        """``(h_i + h_{i+1}) / 2`` for the interior nodes ``i = 1..N-1``."""
        h = self.steps
        return 0.5 * (h[:-1] + h[1:])

    @property
    def transition_indices(self) -> tuple:
        N = self.N
        return N // 4, N // 2, 3 * N // 4

    def h(self, i: int) -> float:
        """Step of cell ``i`` (1-based, as ``x_i - x_{i-1}``)."""
        return float(self.steps[i - 1])

    def same_as(self, other: "Mesh") -> bool:
        return self.N == other.N and np.array_equal(self.points, other.points)


def transition_widths(p: Problem, spec: MeshSpec) -> tuple:
    """Widths ``(d - x_{N/4}, 1 - x_{3N/4})`` of the two layer regions."""
    layer = p.epsilon / p.beta * spec.tau0 * math.log(spec.N)
    return min(p.d / 2, layer), min((1 - p.d) / 2, layer)


def _psi(kind: MeshKind, which: str, t: float, N: int) -> float:
    lnN = math.log(N)
    if kind is MeshKind.SHISHKIN:
        if which == "interior":
            return math.exp(-2 * (1 - 2 * t) * lnN)
        return math.exp(-4 * (1 - t) * lnN)
    if kind is MeshKind.BAKHVALOV_SHISHKIN:
        if which == "interior":
            return 1 - 2 * (1 - 1 / N) * (1 - 2 * t)
        return 1 - 4 * (1 - 1 / N) * (1 - t)
    raise MeshSpecError(f"{kind.value} mesh has no generating function")


def mesh_generating_phi(kind, which: str, t: float, N: int) -> float:
    """Return ``phi(t) = -ln psi(t)`` for the interior or boundary layer.

    The interior family lives on ``t in [1/4, 1/2]`` and the boundary family
    on ``[3/4, 1]``; both fall from ``ln N`` to 0 across their interval.
    """
    kind = MeshKind.parse(kind)
    lo, hi = {"interior": (0.25, 0.5), "boundary": (0.75, 1.0)}.get(which, (None, None))
    if lo is None:
        raise ValueError(f"which must be 'interior' or 'boundary', got {which!r}")
    if not lo <= t <= hi:
        raise ValueError(f"t={t} outside [{lo}, {hi}] for the {which} layer")
    psi = _psi(kind, which, t, N)
    if not psi > 0:
        raise ValueError(f"psi({t}) = {psi} is not positive")
    return -math.log(psi)


def build_mesh(p: Problem, spec: MeshSpec) -> Mesh:
    """Build the layer-adapted mesh for ``p``.

    Graded points are ``x_i = d - w * phi(t_i) / ln N`` with ``t_i = i/N``
    and ``w`` the layer width, which reduces to ``d - (tau0/beta) eps phi``
    whenever the width is ``(tau0 eps/beta) ln N`` and stretches the same
    distribution over the half interval otherwise.
    """
    N = spec.N
    q1, q2, q3 = N // 4, N // 2, 3 * N // 4
    d = p.d
    x = np.empty(N + 1)

    if spec.kind is MeshKind.UNIFORM:
        if abs(d - 0.5) > 1e-14:
            raise MeshSpecError(f"uniform mesh requires d = 1/2, got d = {d}")
        x[:] = np.arange(N + 1) / N
        x[q2] = d
        return Mesh(x, spec.kind, spec.tau0, p.epsilon, d, 0.25, 0.25)

    w1, w2 = transition_widths(p, spec)
    lnN = math.log(N)
    i = np.arange(N + 1)

    x[: q1 + 1] = 4 * i[: q1 + 1] / N * (d - w1)
    x[q2 : q3 + 1] = d + 4 / N * (1 - d - w2) * (i[q2 : q3 + 1] - q2)
    for j in range(q1 + 1, q2):
        x[j] = d - w1 * mesh_generating_phi(spec.kind, "interior", j / N, N) / lnN
    for j in range(q3 + 1, N):
        x[j] = 1 - w2 * mesh_generating_phi(spec.kind, "boundary", j / N, N) / lnN

    # transition points are set exactly, never accumulated
    x[0], x[q1], x[q2], x[q3], x[N] = 0.0, d - w1, d, 1 - w2, 1.0

    # phi(1/4) = ln N is what makes the uniform and graded branches meet
    phi_start = mesh_generating_phi(spec.kind, "interior", 0.25, N)
    assert abs(phi_start - lnN) <= 1e-12 * lnN
    if np.any(np.diff(x) <= 0):
        raise MeshSpecError("mesh points are not strictly increasing "
                            f"(N={N}, eps={p.epsilon:g}, kind={spec.kind.value})")
    return Mesh(x, spec.kind, spec.tau0, p.epsilon, d, w1, w2)
