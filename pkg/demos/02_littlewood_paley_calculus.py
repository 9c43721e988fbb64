"""Dyadic cutoffs, Littlewood-Paley pieces and the block Sobolev norm."""

import numpy as np

from dgbo import TorusGrid, chi, chi_k, lp_project, sobolev_norm, to_spectral

# the generating bump: 1 on [-5/4, 5/4], 0 outside [-8/5, 8/5]
for x in (1.0, 1.25, 1.4, 1.5, 1.6, 2.0):
    print(f"chi({x}) = {chi(x):.6f}")

# dyadic pieces tile the integers: sum_k chi_k(xi) = 1 for 1 <= |xi| <= 2^K
xs = np.arange(1, 129, dtype=float)
total = sum(chi_k(k, xs) for k in range(8))
print("\npartition of unity, max deviation:", np.max(np.abs(total - 1)))

# a field concentrated at frequency 12 is seen by blocks 3 and 4 only
grid = TorusGrid(128)
u = to_spectral(grid, np.cos(12 * grid.nodes()))
for k in range(7):
    print(f"||P_{k} u||_L2 = {lp_project(u, k).l2_norm():.6f}")

# the block norm weights piece k by 2^(ks); negative s is allowed
for s in (-0.5, 0.0, 1.0, 2.0):
    print(f"H^{s:+.1f} norm of cos(12x): {sobolev_norm(u, s):.6f}")
