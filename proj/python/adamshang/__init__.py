"""Trace-ratio adaptive optimization: benchmark oracles, optimizer form
checks, decay-envelope diagnostics and the experiment runner."""

from ._core import (  # noqa: F401
    PiecewisePower,
    adam_form_equivalence,
    average_regret,
    bregman,
    collapse_deviation,
    conditional_second_moment,
    contraction_product,
    contraction_telescoped,
    count_ordering_violations,
    energy_trace,
    form_equivalence,
    noise_accumulation,
    noise_accumulation_constant,
    run_experiment,
    sample_gradient,
    theorem_bound_series,
    trace_lower_bound_check,
    trace_ratio_stepsize,
    __version__,
)
