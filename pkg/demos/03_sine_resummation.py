"""
Degenerate levels and spin resonance
====================================

In both systems the first-order transition amplitude is linear in time
(``-i gamma t`` and ``i omega1 T / 2``), so ``|c^(1)|^2`` is unbounded.
Taking the arcsine of the real and imaginary parts turns the same
coefficient into ``-i sin(gamma t)`` and ``i sin(omega1 T / 2)``, which
are the exact amplitudes.
"""

from tdpt_resum import analysis
from tdpt_resum.engine import TimeGrid

cases = [
    ("two_level_degenerate", dict(e0=1.0, gamma=0.1), TimeGrid(60.0, 6001)),
    ("spin_resonance", dict(omega0=1.0, omega1=0.02, omega=-1.0), TimeGrid(300.0, 30_001)),
]
for model, params, grid in cases:
    r = analysis.compare_methods(model, grid, order=1, params=params)
    print(model)
    print(f"  max P_naive (transition):      {r.p_naive[:, 1].max():.3f}")
    print(f"  max |P_resum - P_exact|:       {r.err_resum[:, 1].max():.2e}")
    fit = analysis.secular_fit(r, "p_naive", state=1)
    print(f"  naive tail slope:              {fit.exponent:.3f}")

# Off resonance the transition stays small, and the exact column comes from RK4
off = analysis.compare_methods("spin_resonance", TimeGrid(300.0, 30_001), 1,
                               params=dict(omega0=1.0, omega1=0.02, omega=-0.95))
print("\nspin_resonance, detuning 0.05 (exact column from", off.metadata["exact_source"] + ")")
print(f"  max P_naive {off.p_naive[:, 1].max():.4f}, max P_exact {off.p_exact[:, 1].max():.4f}, "
      f"max |P_resum - P_exact| {off.err_resum[:, 1].max():.2e}")
