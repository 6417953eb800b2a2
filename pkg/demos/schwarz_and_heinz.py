"""The harmonic measure function U and the two boundary inequalities.

With phi_0 the hemisphere sign (+1 on the upper half, -1 on the lower)
the Poisson extension is U itself. Its boundary slope at the north pole
is the Heinz constant L(n); for n = 3 that is sqrt(2) - 1.
"""

import numpy as np

from polypotential import specfun
from polypotential.inequality_lab import heinz_liminf_check, schwarz_bound_check
from polypotential.kernels import KernelContext
from polypotential.problem import Preset, ProblemSpec

n = 3
ctx = KernelContext(n)

# U along the axis, and its derivative Phi, which decreases
for r in (0.0, 0.5, 0.9, 0.99, 0.999):
    print(f"U({r}) = {ctx.harmonic_measure_U(r):.6f}   Phi({r}) = {ctx.phi_derivative(r):.6f}")
print("L(3) =", specfun.heinz_constant(3), " sqrt(2) - 1 =", np.sqrt(2) - 1)

# a biharmonic problem with sign data and a constant Laplacian on the boundary
spec = ProblemSpec(
    n=n,
    m=2,
    phis=(Preset("hemisphere_sign", n, 1), Preset("const", n, 1, {"value": [0.2]}), Preset("zero", n, 1)),
)
rng = np.random.default_rng(1)
pts = rng.standard_normal((8, n))
pts *= (rng.random(8) ** (1 / 3) / np.linalg.norm(pts, axis=1))[:, None]
rep = schwarz_bound_check(spec, pts)
print("\nSchwarz bound:", rep.summary())
for e in rep.entries[:4]:
    print(f"  |x| = {np.linalg.norm(e.point):.3f}: lhs {e.lhs:.5f} <= rhs {e.rhs:.5f}")

# the liminf quotient at the north pole stays above the perturbed Heinz bound
rep = heinz_liminf_check(spec, np.array([0.0, 0.0, 1.0]), tol=0.05)
print("\nHeinz bound:", rep.summary())
for e in rep.entries:
    print(f"  quotient {e.lhs:.5f} >= {e.rhs:.5f}")
