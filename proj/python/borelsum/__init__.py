"""Python front end to the borelsum C++ toolkit."""

from ._borelsum import (
    RunResult,
    check_problem,
    commands,
    harry_dym_series,
    m0_constant,
    override_keys,
    run,
    sha256_hex,
)

__all__ = [
    "RunResult",
    "check_problem",
    "commands",
    "harry_dym_series",
    "m0_constant",
    "override_keys",
    "run",
    "sha256_hex",
]
