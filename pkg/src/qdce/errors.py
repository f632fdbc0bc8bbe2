class NumericalInvariantError(RuntimeError):
    """A simulated quantity broke an invariant the ideal protocol guarantees."""
