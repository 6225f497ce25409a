"""Time-dependent perturbation theory with exponential / sine resummation."""
from .analysis import (ComparisonReport, SecularFit, compare_methods, emit_csv, emit_json,
                       read_csv, secular_fit)
from .engine import (CoefficientTable, SystemSpec, TimeGrid, bohr_frequencies,
                     compute_coefficients, integrate_exact, normalization_defect)
from .models import ModelId, build_system, closed_form_coefficients, exact_amplitude
from .series import (AnalyticTaylorData, TruncatedSeries, arcsin_transform_reim,
                     compose_analytic, eval_exp_resummed, eval_naive, eval_sin_resummed,
                     log_transform)

__version__ = "0.1.0"
