"""Constants of the inequality lab, and how the Lipschitz bound grows with K."""

from polypotential import specfun
from polypotential.inequality_lab import LipschitzInputs, c0, delta_n, lipschitz_constants, t_star

print(f"c0 = {c0():.9f} (maximised at t = {t_star():.6f})")
for n in (3, 4, 5, 6):
    print(f"n = {n}: L(n) = {specfun.heinz_constant(n):.8f}   delta(n) = {delta_n(n):.8f}")

print("\nLipschitz constants, n = 3, norms (0.1, 0.1), q = exp(K - 1)")
print(f"{'K':>5} {'alpha':>8} {'mu1':>9} {'M1':>10} {'N1':>10}  branch")
for K in (1.0, 1.1, 1.25, 1.5, 2.0, 3.0):
    rep = lipschitz_constants(LipschitzInputs(n=3, K=K, phi_norms=(0.1, 0.1)))
    v = rep.values
    print(f"{K:5.2f} {v['alpha']:8.4f} {v['mu1']:9.4f} {v['M1']:10.4f} {v['N1']:10.4f}  {v['branch']}")
