"""Continuous problem data for a weakly coupled pair of convection-diffusion equations.

The system solved throughout the package is::

    -eps u1'' + b1 u1' + a11 u1 + a12 u2 = f1
    -eps u2'' + b2 u2' + a21 u1 + a22 u2 = f2      on (0, d) U (d, 1)

with homogeneous Dirichlet data and sources that jump at ``x = d``.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

Coefficient = Union[float, Callable]

__all__ = [
    "CoefficientEvaluationError",
    "ConditionResult",
    "PiecewiseSource",
    "Problem",
    "WellPosednessReport",
    "builtin_example1",
    "evaluate",
    "validate_problem",
]


class CoefficientEvaluationError(ValueError):
    """A coefficient returned a non-finite value."""


def evaluate(coef: Coefficient, x, name: str = "coefficient") -> np.ndarray:
    """Evaluate a scalar or callable coefficient on an array of points.

    Callables are first tried on the whole array; functions that only accept
    scalars are vectorized as a fallback. The result always has the shape of
    ``x``.
    """
    x = np.asarray(x, dtype=float)
    if callable(coef):
        try:
            val = np.asarray(coef(x), dtype=float)
        except (TypeError, ValueError):
            val = np.vectorize(lambda s: float(coef(s)), otypes=[float])(x)
    else:
        val = np.asarray(coef, dtype=float)
    val = np.broadcast_to(val, x.shape).astype(float)
    bad = ~np.isfinite(val)
    if np.any(bad):
        xb = x[bad].flat[0] if x.ndim else float(x)
        raise CoefficientEvaluationError(
            f"{name} is not finite at x={float(xb):.17g}")
    return val


@dataclass(frozen=True)
class PiecewiseSource:
    """Source term with a single jump at ``d``.

    ``left`` is used on ``[0, d]`` and ``right`` on ``[d, 1]``; both are
    evaluable at ``d`` itself, which gives the one-sided limits.
    """

    left: Coefficient
    right: Coefficient
    d: float

    def __post_init__(self):
        if not 0.0 < self.d < 1.0:
            raise ValueError(f"discontinuity point must lie in (0, 1), got {self.d}")

    def left_value(self, x) -> np.ndarray:
        return evaluate(self.left, x, "source (left branch)")

    def right_value(self, x) -> np.ndarray:
        return evaluate(self.right, x, "source (right branch)")

    def __call__(self, x) -> np.ndarray:
        # At x == d the mean of the one-sided limits is returned.
        x = np.asarray(x, dtype=float)
        lv = self.left_value(x)
        rv = self.right_value(x)
        return np.where(x < self.d, lv, np.where(x > self.d, rv, 0.5 * (lv + rv)))

    def scaled(self, c: float) -> "PiecewiseSource":
        left, right = self.left, self.right
        return PiecewiseSource(
            left=lambda x: c * evaluate(left, x),
            right=lambda x: c * evaluate(right, x),
            d=self.d,
        )


@dataclass(frozen=True)
class Problem:
    """Data of the coupled boundary value problem.

    ``a`` is the 2x2 reaction matrix ``((a11, a12), (a21, a22))``. The
    constants ``beta1, beta2, alpha, sigma1, sigma2`` are the bounds the
    coefficients are assumed to satisfy; they are supplied by the caller and
    checked by :func:`validate_problem`, never estimated.
    """

    epsilon: float
    d: float
    b1: Coefficient
    b2: Coefficient
    a: tuple
    f1: PiecewiseSource
    f2: PiecewiseSource
    beta1: float
    beta2: float
    alpha: float
    sigma1: float
    sigma2: float
    name: str = field(default="custom", compare=False)

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if not 0.0 < self.d < 1.0:
            raise ValueError(f"d must lie in (0, 1), got {self.d}")
        for label in ("beta1", "beta2", "alpha", "sigma1", "sigma2"):
            if not getattr(self, label) > 0:
                raise ValueError(f"{label} must be positive, got {getattr(self, label)}")
        if len(self.a) != 2 or any(len(row) != 2 for row in self.a):
            raise ValueError("reaction matrix must be 2x2")
        if self.f1.d != self.d or self.f2.d != self.d:
            raise ValueError("sources must jump at the problem's d")

    @property
    def beta(self) -> float:
        return min(self.beta1, self.beta2)

    @property
    def sigma(self) -> float:
        return min(self.sigma1, self.sigma2)

    def b(self, k: int, x) -> np.ndarray:
        """Convection coefficient of equation ``k`` (1 or 2)."""
        return evaluate((self.b1, self.b2)[k - 1], x, f"b{k}")

    def a_ij(self, i: int, j: int, x) -> np.ndarray:
        return evaluate(self.a[i - 1][j - 1], x, f"a{i}{j}")

    def f(self, k: int) -> PiecewiseSource:
        return (self.f1, self.f2)[k - 1]

    def with_epsilon(self, epsilon: float) -> "Problem":
        return dataclasses.replace(self, epsilon=epsilon)

    def with_sources_scaled(self, c: float) -> "Problem":
        return dataclasses.replace(self, f1=self.f1.scaled(c), f2=self.f2.scaled(c))

    def with_zero_sources(self) -> "Problem":
        zero = PiecewiseSource(0.0, 0.0, self.d)
        return dataclasses.replace(self, f1=zero, f2=zero)


def builtin_example1(epsilon: float = 2.0**-18) -> Problem:
    """Constant-coefficient test problem with sources jumping at ``d = 0.5``.

    ``b1 = b2 = 1``, ``A = [[2, -1], [-1, 2]]``, ``f1 = 1 | -0.8`` and
    ``f2 = -2 | 1.8``.
    """
    d = 0.5
    return Problem(
        epsilon=epsilon,
        d=d,
        b1=1.0,
        b2=1.0,
        a=((2.0, -1.0), (-1.0, 2.0)),
        f1=PiecewiseSource(1.0, -0.8, d),
        f2=PiecewiseSource(-2.0, 1.8, d),
        beta1=1.0,
        beta2=1.0,
        alpha=1.0,
        sigma1=1.0,
        sigma2=1.0,
        name="example1",
    )


@dataclass(frozen=True)
class ConditionResult:
    """Outcome of one sampled well-posedness check.

    ``worst_value`` is the tested quantity at the least favourable sample
    ``worst_x``; the check passes when it lies on the right side of
    ``threshold``.
    """

    condition: int
    description: str
    passed: bool
    worst_x: float
    worst_value: float
    threshold: float


@dataclass(frozen=True)
class WellPosednessReport:
    conditions: tuple
    sample_count: int

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.conditions)

    def __getitem__(self, condition: int) -> ConditionResult:
        for c in self.conditions:
            if c.condition == condition:
                return c
        raise KeyError(condition)

    def format(self) -> str:
        lines = [f"# validate samples={self.sample_count}"]
        for c in self.conditions:
            status = "PASS" if c.passed else "FAIL"
            lines.append(
                f"({c.condition}) {status}  {c.description}: worst value "
                f"{c.worst_value:.6g} at x={c.worst_x:.6g} (threshold {c.threshold:.6g})")
        return "\n".join(lines)


def _lowest(x, values, threshold, condition, description, tol=0.0):
    # condition holds when values >= threshold (up to tol)
    j = int(np.argmin(values))
    return ConditionResult(condition, description, bool(values[j] >= threshold - tol),
                           float(x[j]), float(values[j]), float(threshold))


def validate_problem(p: Problem, samples: int = 1001) -> WellPosednessReport:
    """Check the structural conditions on a uniform grid of ``samples`` points.

    The conditions are::

        (4) b_k(x) >= beta_k
        (5) a12(x) <= 0, a21(x) <= 0
        (6) a11 > |a21|, a22 > |a12|
        (7) smallest eigenvalue of (A + A^T)/2 >= alpha
        (8) alpha - b_k'(x)/2 >= sigma_k  (central differences)
    """
    if samples < 3:
        raise ValueError("at least 3 samples are required")
    x = np.linspace(0.0, 1.0, samples)
    # tolerance absorbs rounding in the eigenvalue and derivative estimates
    tol = 1e-12

    b = [p.b(1, x), p.b(2, x)]
    margin4 = np.minimum(b[0] - p.beta1, b[1] - p.beta2)
    which = np.where(b[0] - p.beta1 <= b[1] - p.beta2, 0, 1)
    vals4 = np.choose(which, b)
    j = int(np.argmin(margin4))
    thr4 = (p.beta1, p.beta2)[which[j]]
    c4 = ConditionResult(4, "b_k(x) >= beta_k", bool(margin4[j] >= 0.0),
                         float(x[j]), float(vals4[j]), float(thr4))

    a11, a12 = p.a_ij(1, 1, x), p.a_ij(1, 2, x)
    a21, a22 = p.a_ij(2, 1, x), p.a_ij(2, 2, x)
    off = np.maximum(a12, a21)
    j = int(np.argmax(off))
    c5 = ConditionResult(5, "a12 <= 0 and a21 <= 0", bool(off[j] <= 0.0),
                         float(x[j]), float(off[j]), 0.0)

    dom = np.minimum(a11 - np.abs(a21), a22 - np.abs(a12))
    j = int(np.argmin(dom))
    c6 = ConditionResult(6, "a11 > |a21| and a22 > |a12|", bool(dom[j] > 0.0),
                         float(x[j]), float(dom[j]), 0.0)

    # eigenvalues of the symmetric part [[a11, m], [m, a22]]
    m = 0.5 * (a12 + a21)
    lam_min = 0.5 * (a11 + a22) - np.sqrt(0.25 * (a11 - a22) ** 2 + m**2)
    c7 = _lowest(x, lam_min, p.alpha, 7, "min eig((A + A^T)/2) >= alpha", tol)

    step = 1.0 / (10 * samples)
    vals8 = []
    for k, sig in ((1, p.sigma1), (2, p.sigma2)):
        db = (p.b(k, x + step) - p.b(k, x - step)) / (2 * step)
        vals8.append(p.alpha - 0.5 * db - sig)
    margin8 = np.minimum(*vals8)
    j = int(np.argmin(margin8))
    k8 = 0 if vals8[0][j] <= vals8[1][j] else 1
    sig8 = (p.sigma1, p.sigma2)[k8]
    c8 = ConditionResult(8, "alpha - b_k'(x)/2 >= sigma_k", bool(margin8[j] >= -tol),
                         float(x[j]), float(vals8[k8][j] + sig8), float(sig8))

    return WellPosednessReport((c4, c5, c6, c7, c8), samples)
