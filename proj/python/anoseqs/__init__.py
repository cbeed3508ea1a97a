"""Python bindings for the anoseqs C++ core."""

from ._core import (
    AnoseqsError,
    Detector,
    Env,
    Pipeline,
    RunConfig,
    episodic_cost_rate,
    episodic_return,
    make_env,
    mean_std,
    read_curve_csv,
    read_threshold,
    total_cost_rate,
)

__all__ = [
    "AnoseqsError",
    "Detector",
    "Env",
    "Pipeline",
    "RunConfig",
    "episodic_cost_rate",
    "episodic_return",
    "make_env",
    "mean_std",
    "read_curve_csv",
    "read_threshold",
    "total_cost_rate",
]
