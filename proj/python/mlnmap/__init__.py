"""MAP inference for weighted first-order rule programs."""

from ._core import (
    BudgetError,
    IoError,
    ParseError,
    generate_example1,
    ground_text,
    oracle,
    run,
)

__all__ = [
    "BudgetError",
    "IoError",
    "ParseError",
    "generate_example1",
    "ground_text",
    "oracle",
    "run",
]
