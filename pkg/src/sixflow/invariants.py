"""Internal runtime checks.

The solver turns every structural guarantee it relies on into an executable
check. A failing check is always a bug in this package, never a property of
the input, so it raises InternalInvariantError instead of returning an error
value. The module keeps a running count of evaluated checks so the test suite
can confirm they were exercised.
"""

from __future__ import annotations

_checks_evaluated = 0


class InternalInvariantError(RuntimeError):
    """A derived precondition or invariant failed; indicates a solver bug."""


def require(condition: bool, message: str) -> None:
    """Raise InternalInvariantError unless condition holds."""
    global _checks_evaluated
    _checks_evaluated += 1
    if not condition:
        raise InternalInvariantError(message)


def checks_evaluated() -> int:
    """Number of require() calls evaluated so far (diagnostic only)."""
    return _checks_evaluated
