"""ACT-R abstract semantics, CHR translation and bisimulation checking."""

from ._actrchr import (
    Model,
    ParseError,
    State,
    canonical,
    check,
    chr_of_state,
    initial_state,
    normalize,
    parse_model,
    print_model,
    run,
    state_hash,
    successors,
    translate,
    validate,
)

__all__ = [
    "Model",
    "ParseError",
    "State",
    "canonical",
    "check",
    "chr_of_state",
    "initial_state",
    "normalize",
    "parse_model",
    "print_model",
    "run",
    "state_hash",
    "successors",
    "translate",
    "validate",
]
