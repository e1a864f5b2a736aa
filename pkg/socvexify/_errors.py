class SocvexifyError(Exception):
    """Common base of all custom errors raised by the socvexify package."""

    pass
