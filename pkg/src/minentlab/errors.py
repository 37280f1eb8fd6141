class InvalidInput(ValueError):
    """Raised when an argument violates an operation's precondition."""
