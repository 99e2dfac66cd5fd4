"""
Saturation depth versus problem size
====================================

Repeat the density sweep for several n, fit the logistic curve at each size
and regress the plateau height p_max on n.
"""

from fractions import Fraction

from qaoa_depth import density_sweep, fit_logistic, fit_scaling
from qaoa_depth.training import TrainConfig

grid = [Fraction(k, 2) for k in range(1, 9)]
cfg = TrainConfig(seeds_per_step=10)

fits = []
for n in (4, 5, 6, 7):
    sweep = density_sweep(n, grid, 10, 0.3, 30, cfg, master_seed=7)
    fit = fit_logistic(sweep.fit_points())
    fits.append((n, fit))
    print(f"n={n}  p_max={fit.p_max:.2f}  alpha_c={fit.alpha_c:.2f}")

line = fit_scaling(fits)
print(f"p_max ~ {line.slope:.3f} n + {line.intercept:.3f}   (r = {line.correlation:.3f})")

# Extrapolation is only a guide: sizes this small carry strong finite-size effects.
print("extrapolated p_max at n=15:", round(line.slope * 15 + line.intercept, 1))
