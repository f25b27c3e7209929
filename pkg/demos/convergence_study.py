"""Double-mesh convergence study for the two-component example.

Runs the N = 32..2048 study on both layer-adapted meshes and prints the
error and rate columns in the same layout as the ``layerfem converge`` CSV.

    python demos/convergence_study.py
"""

import time

from layerfem import builtin_example1
from layerfem.analysis import convergence_table

N_LIST = [32, 64, 128, 256, 512, 1024, 2048]

p = builtin_example1(2.0**-18)
for kind in ("shishkin", "bakhvalov-shishkin"):
    t0 = time.perf_counter()
    table = convergence_table(p, kind, 2.0, N_LIST)
    elapsed = time.perf_counter() - t0
    print(f"\n{kind} mesh, eps = 2^-18 ({elapsed:.2f} s)")
    print(f"{'N':>6} {'E_max':>11} {'r':>7} {'E_l2':>11} {'r':>7} {'E_energy':>11} {'r':>7}")
    for row in table.rows:
        cells = [f"{row.N:>6}"]
        for j, e in enumerate(row.errors.as_tuple()):
            r = "" if row.rates is None else f"{row.rates[j]:.4f}"
            cells.append(f"{e:11.4e} {r:>7}")
        print(" ".join(cells))

# The rates should not depend on eps once the layers are resolved
print("\nmax-norm rates on the Shishkin mesh for several eps")
for e in (-10, -14, -18):
    rates = convergence_table(builtin_example1(2.0**e), "shishkin", 2.0, N_LIST).rates("max")
    print(f"  eps = 2^{e:<4}", " ".join(f"{r:.4f}" for r in rates))
