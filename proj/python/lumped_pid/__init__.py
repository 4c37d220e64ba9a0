"""Lumped-disturbance PID controllers, plants and analysis."""

from ._core import (
    GeneralizedController,
    LumpedPidError,
    Scenario,
    bode,
    classic_gains,
    synthesize_gains,
    ultimate_bound,
)

__all__ = [
    "GeneralizedController",
    "LumpedPidError",
    "Scenario",
    "bode",
    "classic_gains",
    "simulate",
    "synthesize_gains",
    "ultimate_bound",
]


def simulate(config_text, seed=None):
    """Run a scenario given as config text. Returns (columns, metrics)."""
    scenario = Scenario.from_text(config_text)
    if seed is not None:
        scenario.seed = seed
    return scenario.run()
