"""Python bindings for the mbt toolchain."""

from ._pymbt import (
    MbtError,
    Model,
    evaluate,
    generate,
    instantiate,
    load_model,
    measure_coverage,
    parse_dsl,
    parse_expr,
    run_cli,
    run_reference,
)

__all__ = [
    "MbtError",
    "Model",
    "evaluate",
    "generate",
    "instantiate",
    "load_model",
    "measure_coverage",
    "parse_dsl",
    "parse_expr",
    "run_cli",
    "run_reference",
]
