"""Solving the polyharmonic oracle family and watching the error bars.

The family f = 1 - |x|^(2(m-1)) has constant boundary data, so its
Dirichlet chain is known in closed form. The solver knows nothing of
that: it extends the data with the Poisson kernel and applies the Green
operator layer by layer.
"""

import numpy as np

from polypotential.problem import oracle_spec
from polypotential.radial_oracle import polyharmonic_oracle
from polypotential.solver import get_solver

n = 3
radii = np.linspace(0.0, 0.95, 6)
direction = np.array([1.0, 2.0, 2.0]) / 3.0

for m in (2, 3):
    exact, phis = polyharmonic_oracle(n, m)
    print(f"m = {m}: f coefficients in t = |x|^2: {[str(c) for c in exact.coeffs]}, chain data {[str(p) for p in phis[:m]]}")
    solver = get_solver(oracle_spec(n, m))  # first call builds the operator (a few seconds)
    print(f"{'r':>6} {'f(x)':>12} {'exact':>12} {'|err|':>10} {'bar':>10}")
    for r in radii:
        x = r * direction
        est = solver.solve(x)
        want = float(exact(r * r))
        print(f"{r:6.2f} {est.value[0]:12.8f} {want:12.8f} {abs(est.value[0] - want):10.2e} {est.error:10.2e}")
    print()
