"""
A single level with a shifted frequency
=======================================

``i dx/dt = (omega + epsilon) x`` with ``x(0) = 1``.  Treating ``epsilon``
perturbatively gives ``x ~ exp(-i omega t) (1 - i epsilon t)``, whose
modulus grows linearly in time.  Taking the logarithm of the same series
first gives ``exp(-i epsilon t)``: the frequency is simply renormalized.
"""
import numpy as np

from tdpt_resum import analysis, models
from tdpt_resum.engine import TimeGrid

params = models.make_params("toy_phase", dict(omega=1.0, epsilon=0.01))
grid = TimeGrid(1e4, 10_001)

report = analysis.compare_methods("toy_phase", grid, order=1, params=params)

# |x_a| = sqrt(P_naive) grows like epsilon * t
naive_modulus = np.sqrt(report.p_naive[:, 0])
fit = analysis.fit_power_law(report.t, naive_modulus)
print(f"naive |x_a| at t = {grid.t_max:g}: {naive_modulus[-1]:.3f}")
print(f"log-log tail slope of |x_a|: {fit.exponent:.4f}")

# the resummed amplitude keeps unit modulus at every node
print(f"max | |x_resum|^2 - 1 |: {np.max(np.abs(report.p_resum - 1)):.2e}")
