"""Streamline-diffusion finite elements for coupled singularly perturbed problems."""

from .analysis import (
    ConvergenceTable,
    NormTriple,
    convergence_table,
    discrete_energy_norm,
    double_mesh_error,
    eval_piecewise_linear,
    norm_triple_of_difference,
    restrict_fine_to_coarse,
)
from .discretization import (
    SchemeCoefficients,
    SDParameters,
    assemble,
    bilinear_form,
    hat_basis,
    lumped_weights,
    sd_parameters,
)
from .mesh import Mesh, MeshKind, MeshSpec, build_mesh, mesh_generating_phi, transition_widths
from .problem import PiecewiseSource, Problem, builtin_example1, validate_problem
from .solve import (
    DiscreteSolution,
    TridiagonalSystem,
    build_split_systems,
    solve_bvp,
    thomas_solve,
)

__version__ = "0.1.0"
