"""Mesh layout and problem validation at a glance.

Prints the transition points and the smallest and largest steps of both
layer-adapted meshes, then the sampled check of the well-posedness
conditions for the built-in example and for a deliberately broken variant.

    python demos/meshes_and_validation.py
"""

import dataclasses

import numpy as np

from layerfem import builtin_example1
from layerfem.mesh import MeshSpec, build_mesh
from layerfem.problem import validate_problem

p = builtin_example1(2.0**-18)
for kind in ("shishkin", "bakhvalov-shishkin"):
    mesh = build_mesh(p, MeshSpec(64, 2.0, kind))
    q1, q2, q3 = mesh.transition_indices
    h = mesh.steps
    print(f"{kind}: x[{q1}] = {mesh.points[q1]:.8f}, x[{q2}] = {mesh.points[q2]}, "
          f"x[{q3}] = {mesh.points[q3]:.8f}")
    print(f"  coarse step {h[0]:.4e}, layer steps {h[q1:q2].min():.3e} .. {h[q1:q2].max():.3e}")
    ratio = h[1:] / h[:-1]
    print(f"  largest neighbour ratio {ratio.max():.3e} at node {int(np.argmax(ratio)) + 1}")

print()
print(validate_problem(p).format())

# a positive off-diagonal coupling breaks the M-matrix structure
bad = dataclasses.replace(p, a=((2.0, 0.5), (-1.0, 2.0)))
report = validate_problem(bad)
print()
print(report.format())
print("all conditions hold:", report.passed)
