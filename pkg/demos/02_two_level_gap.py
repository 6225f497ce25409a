"""
Gapped two-level system under constant coupling
===============================================

``H0 = diag(E1, E2)``, ``h = gamma * sigma_x``, starting in the ground
state.  The second-order diagonal coefficient has a term linear in time, so
the naive ground-state probability eventually grows like ``t**2``.  The
exponential form ``exp(c_1^(2))`` stays bounded and tracks the exact Rabi
solution.
"""
import numpy as np

from tdpt_resum import analysis
from tdpt_resum.engine import TimeGrid

params = dict(e1=1.0, e2=2.0, gamma=0.05)
grid = TimeGrid(500.0, 50_001)
report = analysis.compare_methods("two_level_gap", grid, order=2, params=params)

print(f"{'t':>8}{'P_naive':>12}{'P_resum':>12}{'P_exact':>12}")
for j in np.linspace(0, grid.n_points - 1, 11).astype(int):
    print(f"{report.t[j]:8.1f}{report.p_naive[j, 0]:12.6f}"
          f"{report.p_resum[j, 0]:12.6f}{report.p_exact[j, 0]:12.6f}")

# the excess over the exact value is the secular part
excess = analysis.secular_fit(report, "err_naive", state=0)
print(f"\ntail slope of |P_naive - P_exact|: {excess.exponent:.3f}")
print(f"max |P_resum - P_exact|: {report.err_resum[:, 0].max():.2e}")

# Raising the order keeps improving the resummed amplitude.  Past order 3
# the real part of sum(alpha) may become positive, so P_resum can slightly
# exceed one.
short = TimeGrid(200.0, 40_001)
print(f"\n{'order':>5}{'max err naive':>16}{'max err resum':>16}{'max P_resum':>14}")
for order in range(1, 7):
    r = analysis.compare_methods("two_level_gap", short, order, params=params)
    print(f"{order:5d}{r.err_naive[:, 0].max():16.3e}{r.err_resum[:, 0].max():16.3e}"
          f"{r.p_resum.max():14.6f}")
