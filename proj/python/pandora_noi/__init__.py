"""Pandora's box with nonobligatory inspection.

Exact solvers, two-phase and committing policies, the approximation
pipeline and a seeded Monte Carlo simulator, all backed by the C++ core.
Rationals cross the boundary as "p/q" strings; instances and policies as
their JSON forms.
"""

from ._core import (
    BudgetError,
    Instance,
    ValidationError,
    ValueTable,
    best_committing,
    best_two_phase,
    eval_two_phase,
    gen_instance,
    obligatory_opt,
    ptas_pipeline,
    simulate,
    simulate_optimal,
    solve,
    threshold_of_set,
    verify_certificate,
    weitz_value,
    __version__,
)

__all__ = [
    "BudgetError",
    "Instance",
    "ValidationError",
    "ValueTable",
    "best_committing",
    "best_two_phase",
    "eval_two_phase",
    "gen_instance",
    "obligatory_opt",
    "ptas_pipeline",
    "simulate",
    "simulate_optimal",
    "solve",
    "threshold_of_set",
    "verify_certificate",
    "weitz_value",
    "__version__",
]
