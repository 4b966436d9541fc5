"""Exception types shared across the package."""


class UsageError(ValueError):
    """Caller violated an operation's documented precondition."""


class PreconditionViolation(Exception):
    """A lemma checker was handed an instance outside the lemma's premise.

    Kept separate from :class:`UsageError` so sweeps can count skipped
    instances without confusing them with counterexamples.
    """


class InfeasibleSpec(Exception):
    """Instance generation could not satisfy its constraints."""


class OracleOverflow(RuntimeError):
    """Exact convolution would exceed the representable value range."""
