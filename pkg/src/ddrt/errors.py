class ResourceLimitError(Exception):
    """A node/step budget was exhausted before the computation closed.

    Callers treat this as "no answer", never as a negative answer.
    """
