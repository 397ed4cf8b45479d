"""End-to-end subcommands."""

from .runner import COMMANDS, EXIT_CONFIG, EXIT_CONVERGENCE, EXIT_OK, EXIT_VALIDATION, Pipeline, run_pipeline

__all__ = [
    "COMMANDS",
    "EXIT_CONFIG",
    "EXIT_CONVERGENCE",
    "EXIT_OK",
    "EXIT_VALIDATION",
    "Pipeline",
    "run_pipeline",
]
