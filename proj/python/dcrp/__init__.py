"""Disordered Chinese restaurant process: simulators, scaling limits and experiment runners."""

from ._core import (
    DcrpError,
    FitnessSpec,
    ScalingTriple,
    box_prediction,
    cli,
    phi_t,
    pi_At,
    run_experiment,
    scaling_residual,
    simulate_discrete,
    solve_scaling,
    void_identity,
    yule_tail_bound,
)

__all__ = [
    "DcrpError",
    "FitnessSpec",
    "ScalingTriple",
    "box_prediction",
    "cli",
    "phi_t",
    "pi_At",
    "run_experiment",
    "scaling_residual",
    "simulate_discrete",
    "solve_scaling",
    "void_identity",
    "yule_tail_bound",
]


def rows(table):
    """Rows of a table returned by run_experiment as a list of dicts."""
    cols = table["columns"]
    return [dict(zip(cols, r)) for r in table["rows"]]
