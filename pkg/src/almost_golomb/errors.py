class UsageError(ValueError):
    """Bad arguments: mismatched radicands, unparsable shifts, out-of-range r."""


class ConstructionError(RuntimeError):
    """The greedy construction found no feasible value."""

    def __init__(self, n, message):
        super().__init__(f"n={n}: {message}")
        self.n = n


class InternalConsistencyError(RuntimeError):
    """Two independent computations of the same quantity disagreed."""


class OstrowskiError(ValueError):
    """An integer has no digit string under the requested convention."""

    def __init__(self, n, convention):
        super().__init__(f"{n} is not representable under the {convention!r} convention")
        self.n = n
        self.convention = convention
