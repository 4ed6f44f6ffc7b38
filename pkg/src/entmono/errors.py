class InputError(ValueError):
    """Malformed arguments: bad indices, wrong dimensions, unknown names."""


class InvariantError(InputError):
    """A state or matrix failed a structural invariant (norm, hermiticity, trace)."""
