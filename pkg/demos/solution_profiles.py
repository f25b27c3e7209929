"""Solution profiles for several perturbation parameters on N = 512.

Writes one ``x U1 U2`` file per eps into ``profiles/``. For each component
it prints the value at x = d, the slope on the cells on either side of d
(the kink produced by the source jump) and the cell where the solution
changes fastest, which sits in the boundary layer at x = 1.

    python demos/solution_profiles.py [outdir]
"""

import sys
from pathlib import Path

import numpy as np

from layerfem import builtin_example1
from layerfem.mesh import MeshSpec
from layerfem.solve import solve_bvp

outdir = Path(sys.argv[1] if len(sys.argv) > 1 else "profiles")
outdir.mkdir(parents=True, exist_ok=True)

for e in (-6, -10, -18):
    eps = 2.0**e
    sol = solve_bvp(builtin_example1(eps), MeshSpec(512))
    x = sol.mesh.points
    np.savetxt(outdir / f"example1_eps2^{e}.dat", np.column_stack([x, sol.U1, sol.U2]),
               header=f"x U1 U2  eps=2^{e} N=512 shishkin", fmt="%.10e")
    print(f"eps = 2^{e}")
    for k in (1, 2):
        u = sol.component(k)
        du = np.diff(u) / sol.mesh.steps
        i = int(np.argmax(np.abs(du)))
        mid = 0.5 * (x[i] + x[i + 1])
        print(f"  U{k}: U(d) = {u[256]:+.4f}, slope {du[255]:+.3f} | {du[256]:+.3f} "
              f"across d, steepest cell centred at x = {mid:.8f} ({du[i]:+.3e})")
print(f"profiles written to {outdir}/")
